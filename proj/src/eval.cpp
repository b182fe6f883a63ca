#include "uniprot/eval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace uniprot {

namespace {

double metric_cost(const double* a, const double* b, std::size_t d,
                   Metric metric) {
  switch (metric) {
    case Metric::neg_sq_euclidean: {
      double acc = 0.0;
      for (std::size_t t = 0; t < d; ++t) {
        const double diff = a[t] - b[t];
        acc += diff * diff;
      }
      return acc;
    }
    case Metric::neg_l1: {
      double acc = 0.0;
      for (std::size_t t = 0; t < d; ++t) acc += std::abs(a[t] - b[t]);
      return acc;
    }
    case Metric::cosine: {
      double dot = 0.0, na = 0.0, nb = 0.0;
      for (std::size_t t = 0; t < d; ++t) {
        dot += a[t] * b[t];
        na += a[t] * a[t];
        nb += b[t] * b[t];
      }
      if (na == 0.0 || nb == 0.0) {
        throw std::invalid_argument(
            "nn_classify: zero-norm vector under cosine metric");
      }
      return -dot / std::sqrt(na * nb);
    }
    case Metric::dot: {
      double dot = 0.0;
      for (std::size_t t = 0; t < d; ++t) dot += a[t] * b[t];
      return -dot;
    }
    case Metric::raw:
      break;
  }
  throw std::invalid_argument(
      "nn_classify: metric carries no feature-space cost");
}

}  // namespace

EvalReport nn_classify(const Dataset& source, const Selection& sel,
                       const Dataset& target, Metric metric) {
  if (!source.labels) {
    throw std::invalid_argument("nn_classify: source labels required");
  }
  if (!target.labels) {
    throw std::invalid_argument("nn_classify: target labels required");
  }
  if (sel.indices.empty()) {
    throw std::invalid_argument("nn_classify: selection is empty");
  }
  if (source.dim() != target.dim()) {
    throw std::invalid_argument("nn_classify: feature dimension mismatch");
  }
  for (int idx : sel.indices) {
    if (idx < 0 || static_cast<std::size_t>(idx) >= source.size()) {
      throw std::invalid_argument("nn_classify: prototype index out of range");
    }
  }

  // Visit prototypes in ascending source-index order so a strict-< scan
  // resolves cost ties toward the lowest index.
  std::vector<int> order = sel.indices;
  std::sort(order.begin(), order.end());

  int max_label = 0;
  for (int idx : order) {
    max_label = std::max(max_label, (*source.labels)[idx]);
  }
  for (int lab : *target.labels) {
    if (lab < 0) {
      throw std::invalid_argument("nn_classify: negative target label");
    }
    max_label = std::max(max_label, lab);
  }
  EvalReport rep;
  rep.num_classes = static_cast<std::size_t>(max_label) + 1;
  rep.num_classes = std::max({rep.num_classes, source.num_classes(),
                              target.num_classes()});
  const std::size_t C = rep.num_classes;
  rep.confusion.assign(C * C, 0);
  rep.prototype_class_histogram.assign(C, 0);
  for (int idx : sel.indices) {
    ++rep.prototype_class_histogram[static_cast<std::size_t>(
        (*source.labels)[idx])];
  }

  const std::size_t d = target.dim();
  std::size_t correct = 0;
  for (std::size_t j = 0; j < target.size(); ++j) {
    const double* point = target.features.row(j);
    double best = std::numeric_limits<double>::infinity();
    int winner = order.front();
    for (int idx : order) {
      const double c = metric_cost(source.features.row(idx), point, d, metric);
      if (c < best) {
        best = c;
        winner = idx;
      }
    }
    const auto pred = static_cast<std::size_t>((*source.labels)[winner]);
    const auto truth = static_cast<std::size_t>((*target.labels)[j]);
    ++rep.confusion[truth * C + pred];
    if (pred == truth) ++correct;
  }
  rep.overall_accuracy =
      static_cast<double>(correct) / static_cast<double>(target.size());

  std::vector<std::size_t> class_total(C, 0);
  for (int lab : *target.labels) ++class_total[static_cast<std::size_t>(lab)];
  rep.per_class_accuracy.assign(C, 0.0);
  for (std::size_t c = 0; c < C; ++c) {
    if (class_total[c] > 0) {
      rep.per_class_accuracy[c] =
          static_cast<double>(rep.confusion[c * C + c]) /
          static_cast<double>(class_total[c]);
    }
  }

  const double uniform_share = 1.0 / static_cast<double>(C);
  double minority_sum = 0.0;
  for (std::size_t c = 0; c < C; ++c) {
    if (class_total[c] == 0) continue;
    const double share = static_cast<double>(class_total[c]) /
                         static_cast<double>(target.size());
    if (share < uniform_share) {
      rep.minority_classes.push_back(c);
      minority_sum += rep.per_class_accuracy[c];
    }
  }
  if (!rep.minority_classes.empty()) {
    rep.minority_avg_accuracy =
        minority_sum / static_cast<double>(rep.minority_classes.size());
  }
  return rep;
}

WeightSkewReport weight_skew(const Selection& sel) {
  if (sel.weights.empty()) {
    throw std::invalid_argument("weight_skew: selection has no weights");
  }
  WeightSkewReport rep;
  rep.sorted_weights = sel.weights;
  std::sort(rep.sorted_weights.begin(), rep.sorted_weights.end(),
            std::greater<double>());

  const std::size_t k = rep.sorted_weights.size();
  const bool all_equal =
      std::all_of(rep.sorted_weights.begin(), rep.sorted_weights.end(),
                  [&](double w) { return w == rep.sorted_weights[0]; });
  if (all_equal) {
    // Identical values deviate by nothing; skip the arithmetic so rounding
    // in the mean cannot manufacture a phantom spread.
    rep.std_dev = 0.0;
  } else {
    const double mean =
        std::accumulate(rep.sorted_weights.begin(), rep.sorted_weights.end(),
                        0.0) /
        static_cast<double>(k);
    double acc = 0.0;
    for (double w : rep.sorted_weights) acc += (w - mean) * (w - mean);
    rep.std_dev = std::sqrt(acc / static_cast<double>(k));
  }

  const double wmax = rep.sorted_weights.front();
  const double wmin = rep.sorted_weights.back();
  if (wmin == 0.0) {
    rep.min_is_zero = true;
    rep.max_over_min = 0.0;
  } else {
    rep.max_over_min = wmax / wmin;
  }
  return rep;
}

}  // namespace uniprot
