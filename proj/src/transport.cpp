#include "uniprot/transport.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <stdexcept>
#include <utility>

#include "uniprot/kernels.hpp"

namespace uniprot {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require(bool cond, const char* msg) {
  if (!cond) throw std::invalid_argument(msg);
}

// Successive shortest augmenting paths over the complete bipartite
// transportation graph, with node potentials keeping every residual reduced
// cost nonnegative so Dijkstra applies. Supplies and demands are reals; the
// loop stops when the unrouted supply falls below a mass-relative epsilon.
struct SspCore {
  std::size_t ns = 0, nt = 0;
  std::vector<double> cost;  // ns*nt row-major; cost = -similarity
  std::vector<double> flow;  // ns*nt
  std::vector<double> pi_src, pi_snk;
  std::vector<double> sup_rem, dem_rem;
  double total_rem = 0.0;
  double mass_ref = 1.0;
  double eps_unit = 0.0;  // "treat as zero" threshold for residual masses
  double eps_done = 0.0;  // termination threshold on total unrouted supply
  int augments = 0;

  void init(std::size_t s, std::size_t t, std::vector<double> cost_in,
            std::vector<double> supplies, std::vector<double> demands) {
    ns = s;
    nt = t;
    cost = std::move(cost_in);
    flow.assign(ns * nt, 0.0);
    sup_rem = std::move(supplies);
    dem_rem = std::move(demands);
    total_rem = kernels::active().sum(sup_rem.data(), ns);
    mass_ref = std::max(1.0, total_rem);
    eps_unit = mass_ref * 1e-13;
    eps_done = mass_ref * 1e-12;
    pi_src.assign(ns, 0.0);
    pi_snk.assign(nt, 0.0);
    for (std::size_t t2 = 0; t2 < nt; ++t2) {
      double m = kInf;
      for (std::size_t s2 = 0; s2 < ns; ++s2) m = std::min(m, cost[s2 * nt + t2]);
      pi_snk[t2] = m;
    }
  }

  // Appends a source row; its potential is initialized so all its arcs keep
  // nonnegative reduced cost.
  void add_source(const double* cost_row, double supply) {
    cost.insert(cost.end(), cost_row, cost_row + nt);
    flow.resize(flow.size() + nt, 0.0);
    double p = -kInf;
    for (std::size_t t = 0; t < nt; ++t) p = std::max(p, pi_snk[t] - cost_row[t]);
    pi_src.push_back(p);
    sup_rem.push_back(supply);
    total_rem += supply;
    ++ns;
  }

  // Removes `amount` of routed flow from one source row (lowest column index
  // first), handing the freed capacity back as sink demand. Complementary
  // slackness is preserved because flow only decreases.
  void unroute_from_row(std::size_t row, double amount) {
    double need = amount;
    for (std::size_t t = 0; t < nt && need > 0.0; ++t) {
      double& f = flow[row * nt + t];
      const double r = std::min(f, need);
      if (r <= 0.0) continue;
      f -= r;
      if (f < 0.0) f = 0.0;
      dem_rem[t] += r;
      need -= r;
    }
    require(need <= eps_unit + amount * 1e-12,
            "transport: not enough routed slack mass to displace");
  }

  double linear_cost() const {
    return kernels::active().dot(cost.data(), flow.data(), cost.size());
  }

  void run() {
    const std::size_t N = ns + nt;
    std::vector<double> dist(N);
    std::vector<int> parent(N);
    std::vector<char> popped(N);
    using QE = std::pair<double, int>;
    std::priority_queue<QE, std::vector<QE>, std::greater<QE>> heap;
    const int guard = static_cast<int>(100 * N + ns * nt + 10000);

    while (total_rem > eps_done) {
      if (++augments > guard)
        throw std::runtime_error("transport: augmentation guard exceeded");

      std::fill(dist.begin(), dist.end(), kInf);
      std::fill(popped.begin(), popped.end(), 0);
      while (!heap.empty()) heap.pop();
      for (std::size_t s = 0; s < ns; ++s)
        if (sup_rem[s] > eps_unit) {
          dist[s] = 0.0;
          parent[s] = -1;
          heap.emplace(0.0, static_cast<int>(s));
        }

      int target = -1;
      double D = 0.0;
      while (!heap.empty()) {
        const auto [d, u] = heap.top();
        heap.pop();
        if (popped[u]) continue;
        popped[u] = 1;
        if (u >= static_cast<int>(ns)) {
          const std::size_t t = static_cast<std::size_t>(u) - ns;
          if (dem_rem[t] > eps_unit) {
            target = u;
            D = d;
            break;
          }
          // Backward arcs t -> s exist where flow(s,t) > 0; their reduced cost
          // is 0 under exact complementary slackness, clamped for float drift.
          for (std::size_t s = 0; s < ns; ++s) {
            if (flow[s * nt + t] <= 0.0 || popped[s]) continue;
            double rc = -cost[s * nt + t] + pi_snk[t] - pi_src[s];
            if (rc < 0.0) rc = 0.0;
            const double nd = d + rc;
            if (nd < dist[s]) {
              dist[s] = nd;
              parent[s] = u;
              heap.emplace(nd, static_cast<int>(s));
            }
          }
        } else {
          const double* crow = &cost[static_cast<std::size_t>(u) * nt];
          const double base = d + pi_src[u];
          for (std::size_t t = 0; t < nt; ++t) {
            const int v = static_cast<int>(ns + t);
            if (popped[v]) continue;
            double nd = base + crow[t] - pi_snk[t];
            if (nd < d) nd = d;  // clamp negative reduced cost from rounding
            if (nd < dist[v]) {
              dist[v] = nd;
              parent[v] = static_cast<int>(u);
              heap.emplace(nd, v);
            }
          }
        }
      }
      if (target < 0)
        throw std::runtime_error("transport: no augmenting path to remaining demand");

      // Johnson-style potential update, capped at the target distance so the
      // early Dijkstra exit keeps all reduced costs nonnegative.
      for (std::size_t v = 0; v < N; ++v) {
        const double add = dist[v] < D ? dist[v] : D;
        if (v < ns)
          pi_src[v] += add;
        else
          pi_snk[v - ns] += add;
      }

      // Walk the parent chain to find the bottleneck, then apply it.
      double delta = dem_rem[static_cast<std::size_t>(target) - ns];
      int v = target;
      int root = -1;
      while (true) {
        const int p = parent[v];
        if (p == -1) {
          root = v;
          break;
        }
        if (v < static_cast<int>(ns))
          delta = std::min(delta, flow[static_cast<std::size_t>(v) * nt +
                                       (static_cast<std::size_t>(p) - ns)]);
        v = p;
      }
      delta = std::min(delta, sup_rem[root]);

      v = target;
      while (true) {
        const int p = parent[v];
        if (p == -1) break;
        if (v >= static_cast<int>(ns)) {
          flow[static_cast<std::size_t>(p) * nt + (static_cast<std::size_t>(v) - ns)] += delta;
        } else {
          double& f = flow[static_cast<std::size_t>(v) * nt +
                           (static_cast<std::size_t>(p) - ns)];
          f -= delta;
          if (f < 0.0) f = 0.0;
        }
        v = p;
      }

      sup_rem[root] -= delta;
      total_rem -= delta;
      if (sup_rem[root] < eps_unit) {
        total_rem -= sup_rem[root];
        sup_rem[root] = 0.0;
      }
      double& dr = dem_rem[static_cast<std::size_t>(target) - ns];
      dr -= delta;
      if (dr < eps_unit) dr = 0.0;
    }
  }
};

Matrix plan_from_rows(const std::vector<double>& flow, std::size_t rows, std::size_t nt) {
  Matrix plan(rows, nt);
  std::copy(flow.begin(), flow.begin() + static_cast<std::ptrdiff_t>(rows * nt),
            plan.data.begin());
  return plan;
}

double row_violation(const Coupling& c, const std::vector<double>& want_rows) {
  double v = 0.0;
  for (std::size_t i = 0; i < c.row_sums.size(); ++i)
    v = std::max(v, std::fabs(c.row_sums[i] - want_rows[i]));
  return v;
}

}  // namespace

int default_max_iter(std::size_t source_size) {
  if (source_size <= 200) return 100;
  if (source_size <= 1000) return 1000;
  if (source_size <= 4000) return 2000;
  return 4000;
}

TransportResult ot_exact(const Matrix& S_rows, const Marginal& mu, const Marginal& nu) {
  const std::size_t p = S_rows.rows, n = S_rows.cols;
  require(p >= 1, "ot_exact: empty active row set");
  require(n >= 1, "ot_exact: empty target");
  require(mu.size() == p, "ot_exact: mu length mismatch");
  require(nu.size() == n, "ot_exact: nu length mismatch");
  const double mass_tol = 1e-9 * std::max(1.0, std::fabs(mu.total));
  require(std::fabs(mu.total - nu.total) <= mass_tol,
          "ot_exact: source and target masses differ beyond tolerance");

  std::vector<double> cost(p * n);
  for (std::size_t i = 0; i < cost.size(); ++i) cost[i] = -S_rows.data[i];

  // Balance the aggregate masses exactly so the augmenting loop can drain the
  // supply; the adjustment is within the stated 1e-9 tolerance.
  std::vector<double> dem = nu.mass;
  if (mu.total != nu.total && nu.total > 0.0) {
    const double r = mu.total / nu.total;
    for (double& d : dem) d *= r;
  }

  SspCore core;
  core.init(p, n, std::move(cost), mu.mass, std::move(dem));
  core.run();

  TransportResult out;
  out.coupling = Coupling::from_plan(plan_from_rows(core.flow, p, n));
  out.objective = -core.linear_cost();
  out.iterations_used = core.augments;
  out.converged = true;
  double viol = row_violation(out.coupling, mu.mass);
  for (std::size_t j = 0; j < n; ++j)
    viol = std::max(viol, std::fabs(out.coupling.col_sums[j] - nu.mass[j]));
  out.marginal_violation = viol;
  return out;
}

namespace {

// Shared by pot_exact and the gain evaluator: balanced reduction with a slack
// source row of zero similarity absorbing the uncommitted capacity.
void init_pot_core(SspCore& core, const Matrix& S_rows, double row_mass,
                   const Marginal& nu_cap) {
  const std::size_t p = S_rows.rows, n = S_rows.cols;
  require(n >= 1 && nu_cap.size() == n, "pot: capacity length mismatch");
  require(row_mass > 0.0 && std::isfinite(row_mass), "pot: row mass must be positive");
  const double source_mass = static_cast<double>(p) * row_mass;
  require(source_mass <= nu_cap.total + 1e-9 * std::max(1.0, nu_cap.total),
          "pot: source mass exceeds target capacity");

  std::vector<double> cost((p + 1) * n, 0.0);
  for (std::size_t i = 0; i < p * n; ++i) cost[i] = -S_rows.data[i];
  std::vector<double> sup(p + 1, row_mass);
  sup[p] = std::max(0.0, nu_cap.total - source_mass);
  core.init(p + 1, n, std::move(cost), std::move(sup), nu_cap.mass);
}

TransportResult finish_pot(const SspCore& core, std::size_t p, double row_mass,
                           const Marginal& nu_cap) {
  const std::size_t n = core.nt;
  TransportResult out;
  out.coupling = Coupling::from_plan(plan_from_rows(core.flow, p, n));
  out.objective = -core.linear_cost();
  out.iterations_used = core.augments;
  out.converged = true;
  double viol = row_violation(out.coupling, std::vector<double>(p, row_mass));
  for (std::size_t j = 0; j < n; ++j)
    viol = std::max(viol, std::max(0.0, out.coupling.col_sums[j] - nu_cap.mass[j]));
  out.marginal_violation = viol;
  return out;
}

}  // namespace

TransportResult pot_exact(const Matrix& S_rows, double row_mass, const Marginal& nu_cap) {
  require(S_rows.rows >= 1, "pot_exact: empty active set");
  SspCore core;
  init_pot_core(core, S_rows, row_mass, nu_cap);
  core.run();
  return finish_pot(core, S_rows.rows, row_mass, nu_cap);
}

namespace {

struct EntropicState {
  Matrix plan;                       // working gamma
  double stabilization_shift = 0.0;  // max rowwise shift fed to the exp kernel
};

EntropicState entropic_kernel(const Matrix& S_rows, double lambda) {
  const std::size_t p = S_rows.rows, n = S_rows.cols;
  const auto& k = kernels::active();
  EntropicState st;
  st.plan = Matrix(p, n);
  for (std::size_t i = 0; i < p; ++i) {
    // Shifting each row by its max is a no-op after the row-normalization
    // step and keeps exp within range for any lambda.
    const double shift = k.max_val(S_rows.row(i), n);
    st.stabilization_shift = std::max(st.stabilization_shift, shift);
    k.exp_scale(st.plan.row(i), S_rows.row(i), 1.0 / lambda, shift, n);
  }
  return st;
}

}  // namespace

TransportResult pot_entropic(const Matrix& S_rows, double row_mass, const Marginal& nu_cap,
                             const SolverConfig& cfg) {
  cfg.validate();
  require(cfg.mode == SolverMode::entropic, "pot_entropic: cfg.mode must be entropic");
  const std::size_t p = S_rows.rows, n = S_rows.cols;
  require(p >= 1, "pot_entropic: empty active set");
  require(nu_cap.size() == n, "pot_entropic: capacity length mismatch");
  require(row_mass > 0.0, "pot_entropic: row mass must be positive");
  require(static_cast<double>(p) * row_mass <=
              nu_cap.total + 1e-9 * std::max(1.0, nu_cap.total),
          "pot_entropic: source mass exceeds target capacity");

  const int max_iter = cfg.max_iter > 0 ? cfg.max_iter : default_max_iter(p);
  const auto& k = kernels::active();
  EntropicState st = entropic_kernel(S_rows, cfg.lambda);
  Matrix& g = st.plan;

  std::vector<double> col(n), factors(n);
  double viol = kInf;
  int used = 0;
  bool converged = false;
  for (int it = 1; it <= max_iter; ++it) {
    used = it;
    // Row step: exact scaling onto row sums = row_mass.
    for (std::size_t i = 0; i < p; ++i) {
      const double rs = k.sum(g.row(i), n);
      if (!(rs > 0.0)) throw std::runtime_error("pot_entropic: degenerate zero row");
      k.scale(g.row(i), g.row(i), row_mass / rs, n);
    }
    // Column step: only ever scales down, onto col sums <= cap.
    std::fill(col.begin(), col.end(), 0.0);
    for (std::size_t i = 0; i < p; ++i) k.axpy(col.data(), g.row(i), 1.0, n);
    for (std::size_t j = 0; j < n; ++j) {
      const double c = col[j];
      factors[j] = c > nu_cap.mass[j] && c > 0.0 ? nu_cap.mass[j] / c : 1.0;
    }
    for (std::size_t i = 0; i < p; ++i) k.mul(g.row(i), factors.data(), n);

    // After the column step the caps hold exactly; the remaining violation is
    // on the rows.
    viol = 0.0;
    for (std::size_t i = 0; i < p; ++i)
      viol = std::max(viol, std::fabs(k.sum(g.row(i), n) - row_mass));
    if (viol < cfg.tol) {
      converged = true;
      break;
    }
  }

  TransportResult out;
  out.coupling = Coupling::from_plan(std::move(g));
  double obj = 0.0;
  for (std::size_t i = 0; i < p; ++i)
    obj += k.dot(S_rows.row(i), out.coupling.plan.row(i), n);
  out.objective = obj;
  out.iterations_used = used;
  out.converged = converged;
  out.marginal_violation = viol;
  out.stabilization_shift = st.stabilization_shift;
  return out;
}

TransportResult ot_entropic(const Matrix& S_rows, const Marginal& mu, const Marginal& nu,
                            const SolverConfig& cfg) {
  cfg.validate();
  require(cfg.mode == SolverMode::entropic, "ot_entropic: cfg.mode must be entropic");
  const std::size_t p = S_rows.rows, n = S_rows.cols;
  require(p >= 1, "ot_entropic: empty active set");
  require(mu.size() == p && nu.size() == n, "ot_entropic: marginal length mismatch");
  require(std::fabs(mu.total - nu.total) <= 1e-9 * std::max(1.0, std::fabs(mu.total)),
          "ot_entropic: source and target masses differ beyond tolerance");

  const int max_iter = cfg.max_iter > 0 ? cfg.max_iter : default_max_iter(p);
  const auto& k = kernels::active();
  EntropicState st = entropic_kernel(S_rows, cfg.lambda);
  Matrix& g = st.plan;

  std::vector<double> col(n), factors(n);
  double viol = kInf;
  int used = 0;
  bool converged = false;
  for (int it = 1; it <= max_iter; ++it) {
    used = it;
    for (std::size_t i = 0; i < p; ++i) {
      const double rs = k.sum(g.row(i), n);
      if (!(rs > 0.0)) throw std::runtime_error("ot_entropic: degenerate zero row");
      k.scale(g.row(i), g.row(i), mu.mass[i] / rs, n);
    }
    std::fill(col.begin(), col.end(), 0.0);
    for (std::size_t i = 0; i < p; ++i) k.axpy(col.data(), g.row(i), 1.0, n);
    for (std::size_t j = 0; j < n; ++j)
      factors[j] = col[j] > 0.0 ? nu.mass[j] / col[j] : 1.0;
    for (std::size_t i = 0; i < p; ++i) k.mul(g.row(i), factors.data(), n);

    viol = 0.0;
    for (std::size_t i = 0; i < p; ++i)
      viol = std::max(viol, std::fabs(k.sum(g.row(i), n) - mu.mass[i]));
    if (viol < cfg.tol) {
      converged = true;
      break;
    }
  }

  TransportResult out;
  out.coupling = Coupling::from_plan(std::move(g));
  double obj = 0.0;
  for (std::size_t i = 0; i < p; ++i)
    obj += k.dot(S_rows.row(i), out.coupling.plan.row(i), n);
  out.objective = obj;
  out.iterations_used = used;
  out.converged = converged;
  out.marginal_violation = viol;
  out.stabilization_shift = st.stabilization_shift;
  return out;
}

// ---------------------------------------------------------------------------
// PotRowGainEvaluator
// ---------------------------------------------------------------------------

struct PotRowGainEvaluator::Impl {
  const SimilarityMatrix* S = nullptr;
  double row_mass = 1.0;
  std::size_t dummy_row = 0;
  SspCore base_core;
  TransportResult base_result;
};

PotRowGainEvaluator::PotRowGainEvaluator(const SimilarityMatrix& S,
                                         const std::vector<int>& P, double row_mass,
                                         const Marginal& nu_cap)
    : impl_(std::make_unique<Impl>()) {
  impl_->S = &S;
  impl_->row_mass = row_mass;
  const std::size_t p = P.size();
  const std::size_t n = S.n();
  require(nu_cap.size() == n, "gain evaluator: capacity length mismatch");
  require(static_cast<double>(p + 1) * row_mass <=
              nu_cap.total + 1e-9 * std::max(1.0, nu_cap.total),
          "gain evaluator: adding a row would exceed target capacity");

  Matrix rows(p, n);
  for (std::size_t i = 0; i < p; ++i) {
    require(P[i] >= 0 && static_cast<std::size_t>(P[i]) < S.m(),
            "gain evaluator: base row index out of range");
    std::copy(S.s.row(P[i]), S.s.row(P[i]) + n, rows.row(i));
  }

  impl_->dummy_row = p;
  if (p == 0) {
    // Base is the slack row alone; it absorbs all capacity at zero cost.
    std::vector<double> cost(n, 0.0);
    impl_->base_core.init(1, n, std::move(cost), {nu_cap.total}, nu_cap.mass);
    impl_->base_core.run();
    impl_->base_result.objective = 0.0;
    impl_->base_result.converged = true;
  } else {
    init_pot_core(impl_->base_core, rows, row_mass, nu_cap);
    impl_->base_core.run();
    impl_->base_result = finish_pot(impl_->base_core, p, row_mass, nu_cap);
  }
}

PotRowGainEvaluator::~PotRowGainEvaluator() = default;
PotRowGainEvaluator::PotRowGainEvaluator(PotRowGainEvaluator&&) noexcept = default;
PotRowGainEvaluator& PotRowGainEvaluator::operator=(PotRowGainEvaluator&&) noexcept =
    default;

double PotRowGainEvaluator::base_objective() const { return impl_->base_result.objective; }

const TransportResult& PotRowGainEvaluator::base() const { return impl_->base_result; }

double PotRowGainEvaluator::objective_with_row(int source_row) const {
  const SimilarityMatrix& S = *impl_->S;
  require(source_row >= 0 && static_cast<std::size_t>(source_row) < S.m(),
          "gain evaluator: candidate row out of range");
  const std::size_t n = S.n();

  SspCore core = impl_->base_core;
  std::vector<double> crow(n);
  const double* srow = S.s.row(static_cast<std::size_t>(source_row));
  for (std::size_t t = 0; t < n; ++t) crow[t] = -srow[t];
  core.add_source(crow.data(), impl_->row_mass);
  core.unroute_from_row(impl_->dummy_row, impl_->row_mass);
  core.run();
  return -core.linear_cost();
}

}  // namespace uniprot
