#include "uniprot/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

#include "uniprot/rng.hpp"

namespace uniprot {

namespace {

constexpr char kMagic[4] = {'U', 'P', 'S', 'M'};
constexpr std::uint8_t kFormatVersion = 1;

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    std::size_t pos = line.find(',', start);
    if (pos == std::string::npos) {
      out.push_back(line.substr(start));
      break;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

double parse_double_cell(const std::string& cell, std::size_t row,
                         std::size_t col) {
  double value = 0.0;
  const char* first = cell.data();
  const char* last = cell.data() + cell.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last || cell.empty()) {
    throw DataError(DataErrorCode::non_numeric,
                    "row " + std::to_string(row) + ", column " +
                        std::to_string(col) + ": cell '" + cell +
                        "' is not a number",
                    row, col);
  }
  return value;
}

long long parse_label_cell(const std::string& cell, std::size_t row,
                           std::size_t col) {
  long long value = 0;
  const char* first = cell.data();
  const char* last = cell.data() + cell.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last || cell.empty()) {
    throw DataError(DataErrorCode::non_numeric,
                    "row " + std::to_string(row) + ", column " +
                        std::to_string(col) + ": cell '" + cell +
                        "' is not an integer label",
                    row, col);
  }
  return value;
}

void put_u64_le(std::ostream& os, std::uint64_t v) {
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  os.write(reinterpret_cast<const char*>(b), 8);
}

void put_f64_le(std::ostream& os, double v) {
  std::uint64_t bits = 0;
  std::memcpy(&bits, &v, 8);
  put_u64_le(os, bits);
}

std::uint64_t get_u64_le(std::istream& is, const char* what) {
  unsigned char b[8];
  if (!is.read(reinterpret_cast<char*>(b), 8)) {
    throw DataError(DataErrorCode::truncated,
                    std::string("file ends before ") + what);
  }
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return v;
}

double get_f64_le(std::istream& is, const char* what) {
  std::uint64_t bits = get_u64_le(is, what);
  double v = 0.0;
  std::memcpy(&v, &bits, 8);
  return v;
}

double sq_dist(const double* a, const double* b, std::size_t d) {
  double acc = 0.0;
  for (std::size_t t = 0; t < d; ++t) {
    const double diff = a[t] - b[t];
    acc += diff * diff;
  }
  return acc;
}

}  // namespace

void SkewSpec::validate() const {
  if (num_classes == 0) {
    throw std::invalid_argument("skew: num_classes must be positive");
  }
  double total = 0.0;
  std::vector<bool> seen(num_classes, false);
  for (const auto& [cls, frac] : skew_classes) {
    if (cls >= num_classes) {
      throw std::invalid_argument("skew: class id " + std::to_string(cls) +
                                  " out of range");
    }
    if (seen[cls]) {
      throw std::invalid_argument("skew: class id " + std::to_string(cls) +
                                  " listed twice");
    }
    seen[cls] = true;
    if (!(frac > 0.0)) {
      throw std::invalid_argument("skew: fractions must be positive");
    }
    total += frac;
  }
  if (!(total < 1.0)) {
    throw std::invalid_argument(
        "skew: listed fractions must sum to less than 1");
  }
  if (skew_classes.size() == num_classes) {
    throw std::invalid_argument(
        "skew: at least one class must be left unlisted to absorb the "
        "remaining mass");
  }
}

std::vector<std::size_t> apportion_counts(const std::vector<double>& fractions,
                                          std::size_t total) {
  if (fractions.empty()) {
    throw std::invalid_argument("apportion: need at least one fraction");
  }
  double sum = 0.0;
  for (double f : fractions) {
    if (!(f >= 0.0) || !std::isfinite(f)) {
      throw std::invalid_argument("apportion: fractions must be finite and >= 0");
    }
    sum += f;
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    throw std::invalid_argument("apportion: fractions must sum to 1");
  }
  const std::size_t c = fractions.size();
  std::vector<std::size_t> counts(c, 0);
  std::vector<double> leftover(c, 0.0);
  std::size_t assigned = 0;
  for (std::size_t i = 0; i < c; ++i) {
    const double share = fractions[i] * static_cast<double>(total);
    const double fl = std::floor(share);
    counts[i] = static_cast<std::size_t>(fl);
    leftover[i] = share - fl;
    assigned += counts[i];
  }
  // Hand out what flooring dropped, biggest fractional part first; equal
  // parts go to the lower class id.
  std::vector<std::size_t> order(c);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return leftover[a] > leftover[b];
  });
  std::size_t remaining = total - assigned;
  for (std::size_t t = 0; t < c && remaining > 0; ++t) {
    ++counts[order[t]];
    --remaining;
  }
  if (remaining != 0) {
    throw std::logic_error("apportion: rounding failed to converge");
  }
  return counts;
}

std::pair<Dataset, Dataset> gen_gaussian_longtail(std::size_t num_classes,
                                                  std::size_t dim,
                                                  std::size_t per_class_source,
                                                  std::size_t target_total,
                                                  const SkewSpec& skew,
                                                  double cluster_sep,
                                                  std::uint64_t seed) {
  if (num_classes == 0 || dim == 0 || per_class_source == 0 ||
      target_total == 0) {
    throw std::invalid_argument(
        "gen: num_classes, dim, per_class_source, target_total must be "
        "positive");
  }
  if (!(cluster_sep > 0.0) || !std::isfinite(cluster_sep)) {
    throw std::invalid_argument("gen: cluster_sep must be positive and finite");
  }
  if (skew.num_classes != num_classes) {
    throw std::invalid_argument("gen: skew.num_classes mismatch");
  }
  skew.validate();

  Rng rng(seed);

  // Class means: random points, rescaled so the closest pair sits exactly
  // cluster_sep apart (so every pair is at least that far).
  Matrix means(num_classes, dim);
  if (num_classes == 1) {
    for (std::size_t t = 0; t < dim; ++t) means(0, t) = rng.uniform();
  } else {
    while (true) {
      for (std::size_t c = 0; c < num_classes; ++c) {
        for (std::size_t t = 0; t < dim; ++t) means(c, t) = rng.uniform();
      }
      double min_d2 = std::numeric_limits<double>::infinity();
      for (std::size_t a = 0; a + 1 < num_classes; ++a) {
        for (std::size_t b = a + 1; b < num_classes; ++b) {
          min_d2 = std::min(min_d2, sq_dist(means.row(a), means.row(b), dim));
        }
      }
      if (min_d2 > 1e-12) {
        const double scale = cluster_sep / std::sqrt(min_d2);
        for (double& v : means.data) v *= scale;
        break;
      }
    }
  }

  auto draw_point = [&](std::size_t cls, double* out) {
    for (std::size_t t = 0; t < dim; ++t) {
      out[t] = means(cls, t) + rng.normal();
    }
  };

  Dataset source;
  source.features = Matrix(num_classes * per_class_source, dim);
  source.labels = std::vector<int>(source.features.rows);
  source.class_counts.assign(num_classes, per_class_source);
  source.label_map.resize(num_classes);
  std::iota(source.label_map.begin(), source.label_map.end(), 0ll);
  std::size_t row = 0;
  for (std::size_t c = 0; c < num_classes; ++c) {
    for (std::size_t i = 0; i < per_class_source; ++i, ++row) {
      draw_point(c, source.features.row(row));
      (*source.labels)[row] = static_cast<int>(c);
    }
  }

  std::vector<double> fractions(num_classes, 0.0);
  double listed = 0.0;
  std::vector<bool> is_listed(num_classes, false);
  for (const auto& [cls, frac] : skew.skew_classes) {
    fractions[cls] = frac;
    is_listed[cls] = true;
    listed += frac;
  }
  const double rest =
      (1.0 - listed) /
      static_cast<double>(num_classes - skew.skew_classes.size());
  for (std::size_t c = 0; c < num_classes; ++c) {
    if (!is_listed[c]) fractions[c] = rest;
  }
  const std::vector<std::size_t> tcounts =
      apportion_counts(fractions, target_total);

  Dataset target;
  target.features = Matrix(target_total, dim);
  target.labels = std::vector<int>(target_total);
  target.class_counts = tcounts;
  target.label_map = source.label_map;
  row = 0;
  for (std::size_t c = 0; c < num_classes; ++c) {
    for (std::size_t i = 0; i < tcounts[c]; ++i, ++row) {
      draw_point(c, target.features.row(row));
      (*target.labels)[row] = static_cast<int>(c);
    }
  }

  return {std::move(source), std::move(target)};
}

void save_csv(const std::string& path, const Dataset& ds,
              const std::string& label_column) {
  std::ofstream os(path, std::ios::binary);
  if (!os) {
    throw DataError(DataErrorCode::io_failure, "cannot open for writing: " + path);
  }
  for (std::size_t t = 0; t < ds.dim(); ++t) {
    if (t > 0) os << ',';
    os << 'f' << t;
  }
  if (ds.labels) {
    if (ds.dim() > 0) os << ',';
    os << label_column;
  }
  os << '\n';
  for (std::size_t i = 0; i < ds.size(); ++i) {
    for (std::size_t t = 0; t < ds.dim(); ++t) {
      if (t > 0) os << ',';
      os << fmt17(ds.features(i, t));
    }
    if (ds.labels) {
      if (ds.dim() > 0) os << ',';
      const int id = (*ds.labels)[i];
      const long long original =
          (static_cast<std::size_t>(id) < ds.label_map.size())
              ? ds.label_map[static_cast<std::size_t>(id)]
              : id;
      os << original;
    }
    os << '\n';
  }
  if (!os) {
    throw DataError(DataErrorCode::io_failure, "write failed: " + path);
  }
}

Dataset load_csv(const std::string& path,
                 const std::optional<std::string>& label_column) {
  std::ifstream is(path, std::ios::binary);
  if (!is) {
    throw DataError(DataErrorCode::missing_file, "cannot open file: " + path);
  }
  std::string line;
  if (!std::getline(is, line)) {
    throw DataError(DataErrorCode::bad_header, "empty file: " + path);
  }
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const std::vector<std::string> header = split_fields(line);
  if (header.empty() || (header.size() == 1 && header[0].empty())) {
    throw DataError(DataErrorCode::bad_header, "header row has no columns");
  }

  std::size_t label_idx = header.size();  // sentinel: no label column
  if (label_column) {
    const auto it = std::find(header.begin(), header.end(), *label_column);
    if (it == header.end()) {
      throw DataError(DataErrorCode::missing_column,
                      "label column '" + *label_column + "' not in header");
    }
    label_idx = static_cast<std::size_t>(it - header.begin());
  }
  const std::size_t ncols = header.size();
  const std::size_t nfeat = label_column ? ncols - 1 : ncols;

  std::vector<double> values;
  std::vector<long long> raw_labels;
  std::size_t nrows = 0;
  std::size_t datarow = 0;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() && is.peek() == std::char_traits<char>::eof()) break;
    ++datarow;
    const std::vector<std::string> cells = split_fields(line);
    if (cells.size() != ncols) {
      throw DataError(DataErrorCode::ragged_row,
                      "row " + std::to_string(datarow) + " has " +
                          std::to_string(cells.size()) + " fields, expected " +
                          std::to_string(ncols),
                      datarow, 0);
    }
    for (std::size_t c = 0; c < ncols; ++c) {
      if (c == label_idx) {
        raw_labels.push_back(parse_label_cell(cells[c], datarow, c + 1));
      } else {
        values.push_back(parse_double_cell(cells[c], datarow, c + 1));
      }
    }
    ++nrows;
  }

  Dataset ds;
  ds.features.rows = nrows;
  ds.features.cols = nfeat;
  ds.features.data = std::move(values);
  if (label_column) {
    std::vector<long long> distinct = raw_labels;
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()),
                   distinct.end());
    ds.label_map = distinct;
    ds.class_counts.assign(distinct.size(), 0);
    std::vector<int> mapped(nrows);
    for (std::size_t i = 0; i < nrows; ++i) {
      const auto it =
          std::lower_bound(distinct.begin(), distinct.end(), raw_labels[i]);
      const int id = static_cast<int>(it - distinct.begin());
      mapped[i] = id;
      ++ds.class_counts[static_cast<std::size_t>(id)];
    }
    ds.labels = std::move(mapped);
  }
  return ds;
}

void save_similarity(const std::string& path, const SimilarityMatrix& S) {
  std::ofstream os(path, std::ios::binary);
  if (!os) {
    throw DataError(DataErrorCode::io_failure, "cannot open for writing: " + path);
  }
  os.write(kMagic, 4);
  const char version = static_cast<char>(kFormatVersion);
  os.write(&version, 1);
  put_u64_le(os, S.m());
  put_u64_le(os, S.n());
  for (double v : S.s.data) put_f64_le(os, v);
  put_f64_le(os, S.beta);
  const char metric = static_cast<char>(S.source_metric);
  os.write(&metric, 1);
  if (!os) {
    throw DataError(DataErrorCode::io_failure, "write failed: " + path);
  }
}

SimilarityMatrix load_similarity(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) {
    throw DataError(DataErrorCode::missing_file, "cannot open file: " + path);
  }
  char magic[4] = {};
  if (!is.read(magic, 4)) {
    throw DataError(DataErrorCode::truncated, "file ends before magic");
  }
  if (std::memcmp(magic, kMagic, 4) != 0) {
    throw DataError(DataErrorCode::bad_magic, "bad magic bytes");
  }
  char version = 0;
  if (!is.read(&version, 1)) {
    throw DataError(DataErrorCode::truncated, "file ends before version");
  }
  if (static_cast<std::uint8_t>(version) != kFormatVersion) {
    throw DataError(DataErrorCode::bad_version,
                    "unsupported format version " +
                        std::to_string(static_cast<int>(version)));
  }
  const std::uint64_t m = get_u64_le(is, "row count");
  const std::uint64_t n = get_u64_le(is, "column count");
  SimilarityMatrix S;
  S.s.rows = static_cast<std::size_t>(m);
  S.s.cols = static_cast<std::size_t>(n);
  S.s.data.resize(S.s.rows * S.s.cols);
  for (double& v : S.s.data) v = get_f64_le(is, "matrix entry");
  S.beta = get_f64_le(is, "shift constant");
  char metric = 0;
  if (!is.read(&metric, 1)) {
    throw DataError(DataErrorCode::truncated, "file ends before metric byte");
  }
  if (static_cast<unsigned char>(metric) > 4) {
    throw DataError(DataErrorCode::bad_version,
                    "unknown metric code " +
                        std::to_string(static_cast<int>(metric)));
  }
  S.source_metric = static_cast<Metric>(metric);
  return S;
}

}  // namespace uniprot
