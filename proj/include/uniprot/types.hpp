#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

namespace uniprot {

// Dense row-major matrix of 64-bit reals. Problem sizes here stay in the
// low thousands per side, so no sparsity anywhere.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c, double fill = 0.0)
      : rows(r), cols(c), data(r * c, fill) {}

  double& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }
  double* row(std::size_t i) { return data.data() + i * cols; }
  const double* row(std::size_t i) const { return data.data() + i * cols; }
};

enum class Metric : std::uint8_t {
  neg_sq_euclidean = 0,
  neg_l1 = 1,
  cosine = 2,
  dot = 3,
  raw = 4,
};

const char* metric_name(Metric m);
Metric metric_from_name(std::string_view name);  // throws std::invalid_argument

// Nonnegative scores, m sources x n targets. For shifted metrics the entries
// are beta - cost with beta strictly above the largest cost, which keeps every
// entry > 0; cosine is mapped to [0,2] and needs no data-dependent shift.
struct SimilarityMatrix {
  Matrix s;
  double beta = 0.0;  // 0 when scores were given directly
  Metric source_metric = Metric::raw;

  std::size_t m() const { return s.rows; }
  std::size_t n() const { return s.cols; }

  // Validates shape and nonnegativity; throws std::invalid_argument.
  static SimilarityMatrix from_raw(Matrix scores);
};

enum class BetaMode : std::uint8_t { automatic, given };

struct BetaSpec {
  BetaMode mode = BetaMode::automatic;
  double value = 0.0;  // used when mode == given

  static BetaSpec auto_shift() { return {}; }
  static BetaSpec fixed(double v) { return {BetaMode::given, v}; }
};

SimilarityMatrix build_similarity(const Matrix& features_source,
                                  const Matrix& features_target, Metric metric,
                                  BetaSpec beta = BetaSpec::auto_shift());

// Mass vector of a discrete distribution; total is cached at construction.
struct Marginal {
  std::vector<double> mass;
  double total = 0.0;

  static Marginal from(std::vector<double> mass);  // validates entries >= 0
  std::size_t size() const { return mass.size(); }
};

// Every entry = total_mass / size.
Marginal uniform_marginal(std::size_t size, double total_mass);

// Transport plan with cached marginals.
struct Coupling {
  Matrix plan;
  std::vector<double> row_sums;
  std::vector<double> col_sums;

  static Coupling from_plan(Matrix plan);
};

enum class SolverMode : std::uint8_t { exact, entropic };

struct SolverConfig {
  double lambda = 0.01;
  int max_iter = 0;  // 0: pick from the source-size default table at solve time
  double tol = 1e-6;
  SolverMode mode = SolverMode::exact;

  static SolverConfig exact_mode() { return {}; }
  static SolverConfig entropic(double lambda = 0.01, int max_iter = 0,
                               double tol = 1e-6) {
    return {lambda, max_iter, tol, SolverMode::entropic};
  }

  void validate() const;  // throws std::invalid_argument
};

// A full selection problem: scores, target marginal over n, budget k over m.
struct ProblemSpec {
  SimilarityMatrix S;
  Marginal target;
  std::size_t k = 0;

  std::size_t m() const { return S.m(); }
  std::size_t n() const { return S.n(); }

  void validate() const;  // throws std::invalid_argument
};

}  // namespace uniprot
