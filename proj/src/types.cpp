#include "uniprot/types.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "uniprot/kernels.hpp"

namespace uniprot {

namespace {

void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

bool all_finite(const std::vector<double>& v) {
  for (double x : v)
    if (!std::isfinite(x)) return false;
  return true;
}

}  // namespace

const char* metric_name(Metric m) {
  switch (m) {
    case Metric::neg_sq_euclidean: return "neg_sq_euclidean";
    case Metric::neg_l1: return "neg_l1";
    case Metric::cosine: return "cosine";
    case Metric::dot: return "dot";
    case Metric::raw: return "raw";
  }
  return "unknown";
}

Metric metric_from_name(std::string_view name) {
  if (name == "neg_sq_euclidean") return Metric::neg_sq_euclidean;
  if (name == "neg_l1") return Metric::neg_l1;
  if (name == "cosine") return Metric::cosine;
  if (name == "dot") return Metric::dot;
  if (name == "raw") return Metric::raw;
  throw std::invalid_argument("unknown metric: " + std::string(name));
}

SimilarityMatrix SimilarityMatrix::from_raw(Matrix scores) {
  require(scores.rows >= 1 && scores.cols >= 1, "similarity matrix must be non-empty");
  require(scores.data.size() == scores.rows * scores.cols,
          "similarity matrix storage does not match its shape");
  require(all_finite(scores.data), "similarity entries must be finite");
  for (double x : scores.data) require(x >= 0.0, "similarity entries must be >= 0");
  SimilarityMatrix out;
  out.s = std::move(scores);
  out.beta = 0.0;
  out.source_metric = Metric::raw;
  return out;
}

SimilarityMatrix build_similarity(const Matrix& features_source,
                                  const Matrix& features_target, Metric metric,
                                  BetaSpec beta) {
  const std::size_t m = features_source.rows;
  const std::size_t n = features_target.rows;
  const std::size_t d = features_source.cols;
  require(m >= 1 && n >= 1, "feature matrices must be non-empty");
  require(d >= 1, "feature dimension must be >= 1");
  require(features_target.cols == d, "source/target feature dimensions differ");
  require(all_finite(features_source.data) && all_finite(features_target.data),
          "features must be finite");

  const auto& k = kernels::active();
  SimilarityMatrix out;
  out.s = Matrix(m, n);
  out.source_metric = metric;

  switch (metric) {
    case Metric::neg_sq_euclidean:
    case Metric::neg_l1: {
      // Cost first, then shift: S = beta - cost with beta above every cost.
      for (std::size_t i = 0; i < m; ++i) {
        const double* a = features_source.row(i);
        double* srow = out.s.row(i);
        for (std::size_t j = 0; j < n; ++j) {
          const double* b = features_target.row(j);
          srow[j] = metric == Metric::neg_sq_euclidean ? k.sq_l2(a, b, d)
                                                       : k.l1_dist(a, b, d);
        }
      }
      const double max_cost = k.max_val(out.s.data.data(), out.s.data.size());
      double b = beta.mode == BetaMode::automatic ? max_cost + 1.0 : beta.value;
      require(b > max_cost, "beta must exceed the largest cost");
      for (double& x : out.s.data) x = b - x;
      out.beta = b;
      break;
    }
    case Metric::cosine: {
      std::vector<double> src_norm(m), tgt_norm(n);
      for (std::size_t i = 0; i < m; ++i) {
        src_norm[i] = std::sqrt(k.dot(features_source.row(i), features_source.row(i), d));
        require(src_norm[i] > 0.0, "cosine metric requires non-zero rows (source row " +
                                       std::to_string(i) + ")");
      }
      for (std::size_t j = 0; j < n; ++j) {
        tgt_norm[j] = std::sqrt(k.dot(features_target.row(j), features_target.row(j), d));
        require(tgt_norm[j] > 0.0, "cosine metric requires non-zero rows (target row " +
                                       std::to_string(j) + ")");
      }
      for (std::size_t i = 0; i < m; ++i) {
        const double* a = features_source.row(i);
        double* srow = out.s.row(i);
        for (std::size_t j = 0; j < n; ++j) {
          double c = k.dot(a, features_target.row(j), d) / (src_norm[i] * tgt_norm[j]);
          // Guard rounding outside [-1,1]; the +1 shift maps into [0,2].
          c = c > 1.0 ? 1.0 : (c < -1.0 ? -1.0 : c);
          srow[j] = 1.0 + c;
        }
      }
      out.beta = 0.0;
      break;
    }
    case Metric::dot: {
      double min_entry = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < m; ++i) {
        const double* a = features_source.row(i);
        double* srow = out.s.row(i);
        for (std::size_t j = 0; j < n; ++j) {
          srow[j] = k.dot(a, features_target.row(j), d);
          min_entry = srow[j] < min_entry ? srow[j] : min_entry;
        }
      }
      if (min_entry < 0.0) {
        const double shift = std::fabs(min_entry) + 1.0;
        for (double& x : out.s.data) x += shift;
        out.beta = shift;
      } else {
        out.beta = 0.0;
      }
      break;
    }
    case Metric::raw:
      throw std::invalid_argument("raw metric cannot be built from features");
  }

  for (double x : out.s.data) require(x >= 0.0, "similarity construction produced a negative entry");
  return out;
}

Marginal Marginal::from(std::vector<double> mass) {
  require(!mass.empty(), "marginal must be non-empty");
  require(all_finite(mass), "marginal entries must be finite");
  for (double x : mass) require(x >= 0.0, "marginal entries must be >= 0");
  Marginal out;
  out.total = kernels::active().sum(mass.data(), mass.size());
  out.mass = std::move(mass);
  return out;
}

Marginal uniform_marginal(std::size_t size, double total_mass) {
  require(size >= 1, "uniform marginal needs size >= 1");
  require(total_mass > 0.0 && std::isfinite(total_mass),
          "uniform marginal needs positive total mass");
  Marginal out;
  out.mass.assign(size, total_mass / static_cast<double>(size));
  out.total = kernels::active().sum(out.mass.data(), size);
  return out;
}

Coupling Coupling::from_plan(Matrix plan) {
  require(plan.rows >= 1 && plan.cols >= 1, "coupling must be non-empty");
  for (double x : plan.data) require(x >= 0.0 && std::isfinite(x), "coupling entries must be >= 0");
  Coupling out;
  const auto& k = kernels::active();
  out.row_sums.resize(plan.rows);
  out.col_sums.assign(plan.cols, 0.0);
  for (std::size_t i = 0; i < plan.rows; ++i) {
    out.row_sums[i] = k.sum(plan.row(i), plan.cols);
    k.axpy(out.col_sums.data(), plan.row(i), 1.0, plan.cols);
  }
  out.plan = std::move(plan);
  return out;
}

void SolverConfig::validate() const {
  require(tol > 0.0, "tol must be > 0");
  require(max_iter >= 0, "max_iter must be >= 0 (0 selects the default table)");
  if (mode == SolverMode::entropic)
    require(lambda > 0.0 && std::isfinite(lambda), "entropic mode needs lambda > 0");
}

void ProblemSpec::validate() const {
  require(k >= 1 && k <= m(), "budget k must satisfy 1 <= k <= m");
  require(target.size() == n(), "target marginal length must equal similarity cols");
  for (double x : target.mass) require(x > 0.0, "target marginal entries must be > 0");
}

}  // namespace uniprot
