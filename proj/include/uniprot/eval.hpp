#pragma once

#include <cstddef>
#include <vector>

#include "uniprot/data.hpp"
#include "uniprot/selection.hpp"
#include "uniprot/types.hpp"

namespace uniprot {

// Outcome of nearest-prototype classification on a labeled target set.
// confusion is num_classes x num_classes row-major: entry (true, predicted)
// counts target points; each row sums to that class's target count.
struct EvalReport {
  double overall_accuracy = 0.0;
  std::vector<double> per_class_accuracy;  // 0.0 for classes absent from target
  double minority_avg_accuracy = 0.0;      // 0.0 when no class is minority
  std::size_t num_classes = 0;
  std::vector<std::size_t> confusion;
  std::vector<std::size_t> prototype_class_histogram;
  std::vector<std::size_t> minority_classes;

  std::size_t confusion_at(std::size_t true_cls, std::size_t pred_cls) const {
    return confusion[true_cls * num_classes + pred_cls];
  }
};

// How uneven a selection's weights are. max_over_min is meaningless when the
// smallest weight is zero; min_is_zero flags that case (value reported as 0).
struct WeightSkewReport {
  std::vector<double> sorted_weights;  // descending, sums to 1 within 1e-9
  double std_dev = 0.0;                // population standard deviation
  double max_over_min = 0.0;
  bool min_is_zero = false;
};

// Labels every target point with the class of its cheapest prototype under
// the metric's cost (cost ties -> the prototype with the lowest source
// index). Selection weights play no part here: classification uses positions
// only. A class counts as minority when its share of the target is below the
// uniform share 1/num_classes (classes with no target presence are skipped).
// Throws std::invalid_argument when either dataset lacks labels, the
// selection is empty or out of range, or the metric has no feature-space
// cost (raw).
EvalReport nn_classify(const Dataset& source, const Selection& sel,
                       const Dataset& target, Metric metric);

WeightSkewReport weight_skew(const Selection& sel);

}  // namespace uniprot
