#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "uniprot/types.hpp"

namespace uniprot {

// Sample table: one row per point. Labels, when present, are contiguous ids
// starting at 0; label_map[id] is the original label value they came from.
struct Dataset {
  Matrix features;
  std::optional<std::vector<int>> labels;
  std::vector<std::size_t> class_counts;
  std::vector<long long> label_map;

  std::size_t size() const { return features.rows; }
  std::size_t dim() const { return features.cols; }
  std::size_t num_classes() const { return class_counts.size(); }
};

// Target-side class imbalance: listed classes get a fixed fraction of the
// target; the remaining mass spreads evenly over the other classes.
struct SkewSpec {
  std::size_t num_classes = 0;
  std::vector<std::pair<std::size_t, double>> skew_classes;

  void validate() const;  // throws std::invalid_argument
};

// What went wrong while reading or writing files, with location data for
// parse problems.
enum class DataErrorCode : std::uint8_t {
  missing_file,
  bad_header,
  ragged_row,
  non_numeric,
  missing_column,
  bad_magic,
  bad_version,
  truncated,
  io_failure,
};

class DataError : public std::runtime_error {
 public:
  DataError(DataErrorCode code, std::string msg, std::size_t row = 0,
            std::size_t col = 0)
      : std::runtime_error(std::move(msg)), code(code), row(row), col(col) {}

  DataErrorCode code;
  std::size_t row;  // 1-based data row (0 when not applicable)
  std::size_t col;  // 1-based column (0 when not applicable)
};

// Draws one cluster per class (unit-variance Gaussian around means spread at
// least cluster_sep apart), a balanced source, and a target whose class
// counts follow the skew exactly (floor first, then the largest fractional
// parts win the leftovers). Same seed, same bytes.
std::pair<Dataset, Dataset> gen_gaussian_longtail(std::size_t num_classes,
                                                  std::size_t dim,
                                                  std::size_t per_class_source,
                                                  std::size_t target_total,
                                                  const SkewSpec& skew,
                                                  double cluster_sep,
                                                  std::uint64_t seed);

// Exact integer split of `total` proportional to `fractions` (which must sum
// to 1): floor everything, then hand the remainder to the largest fractional
// parts, lower index first on ties.
std::vector<std::size_t> apportion_counts(const std::vector<double>& fractions,
                                          std::size_t total);

// Comma-separated, header row, LF endings, '.' decimals. Features are written
// with 17 significant digits so a load reproduces them bit-for-bit.
void save_csv(const std::string& path, const Dataset& ds,
              const std::string& label_column = "label");

// Reads features (and optionally one integer label column by name). Labels
// are remapped to contiguous ids in ascending order of original value.
Dataset load_csv(const std::string& path,
                 const std::optional<std::string>& label_column = std::nullopt);

// Dense score-matrix container format: magic "UPSM", version byte 1, then
// row count u64, column count u64, row-major entries f64, shift constant f64,
// metric byte — all little-endian.
void save_similarity(const std::string& path, const SimilarityMatrix& S);
SimilarityMatrix load_similarity(const std::string& path);

}  // namespace uniprot
