// Command-line front end: dataset generation, prototype selection, 1-NN
// evaluation, property verification, and gain/solver benchmarking. Every run
// drops a manifest.json with the full configuration next to its outputs.
#include <algorithm>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "uniprot/data.hpp"
#include "uniprot/eval.hpp"
#include "uniprot/objective.hpp"
#include "uniprot/rng.hpp"
#include "uniprot/selection.hpp"
#include "uniprot/transport.hpp"
#include "uniprot/types.hpp"
#include "uniprot/verify.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace uniprot;

namespace {

constexpr const char* kVersion = "0.1.0";
constexpr const char* kManifestName = "manifest.json";

double now_seconds() {
  using clock = std::chrono::steady_clock;
  return std::chrono::duration<double>(clock::now().time_since_epoch()).count();
}

fs::path ensure_out_dir(const std::string& out) {
  fs::path dir = out.empty() ? fs::path(".") : fs::path(out);
  fs::create_directories(dir);
  return dir;
}

void write_json_file(const fs::path& path, const json& j) {
  std::ofstream os(path, std::ios::binary);
  if (!os) {
    throw DataError(DataErrorCode::io_failure,
                    "cannot open for writing: " + path.string());
  }
  os << j.dump(2) << '\n';
}

void write_manifest(const fs::path& dir, const std::string& command,
                    std::uint64_t seed, const json& config) {
  json m;
  m["version"] = kVersion;
  m["command"] = command;
  m["seed"] = seed;
  m["config"] = config;
  write_json_file(dir / kManifestName, m);
}

// Loads a dataset CSV, picking up the named label column when the header has
// it and falling back to pure features otherwise.
Dataset load_dataset(const std::string& path, const std::string& label_column) {
  try {
    return load_csv(path, label_column);
  } catch (const DataError& e) {
    if (e.code == DataErrorCode::missing_column) return load_csv(path);
    throw;
  }
}

std::vector<std::pair<std::size_t, double>> parse_skew_entries(
    const std::vector<std::string>& entries) {
  std::vector<std::pair<std::size_t, double>> out;
  for (const std::string& entry : entries) {
    const std::size_t colon = entry.find(':');
    if (colon == std::string::npos) {
      throw std::invalid_argument("skew entry '" + entry +
                                  "' must look like CLASS:FRACTION");
    }
    std::size_t cls = 0;
    double frac = 0.0;
    try {
      cls = std::stoul(entry.substr(0, colon));
      frac = std::stod(entry.substr(colon + 1));
    } catch (const std::exception&) {
      throw std::invalid_argument("skew entry '" + entry +
                                  "' must look like CLASS:FRACTION");
    }
    out.emplace_back(cls, frac);
  }
  return out;
}

json selection_to_json(const Selection& sel) {
  json j;
  j["method"] = method_name(sel.method);
  j["k"] = sel.indices.size();
  j["indices"] = sel.indices;
  j["weights"] = sel.weights;
  j["step_values"] = sel.step_values;
  j["step_seconds"] = sel.step_seconds;
  if (sel.seed) {
    j["seed"] = *sel.seed;
  } else {
    j["seed"] = nullptr;
  }
  j["manifest"] = kManifestName;
  return j;
}

Selection selection_from_json(const json& j) {
  Selection sel;
  sel.method = method_from_name(j.at("method").get<std::string>());
  sel.indices = j.at("indices").get<std::vector<int>>();
  if (j.contains("weights") && !j["weights"].empty()) {
    sel.weights = j["weights"].get<std::vector<double>>();
  } else {
    sel.weights.assign(sel.indices.size(),
                       1.0 / static_cast<double>(sel.indices.size()));
  }
  if (j.contains("step_values")) {
    sel.step_values = j["step_values"].get<std::vector<double>>();
  }
  if (j.contains("seed") && !j["seed"].is_null()) {
    sel.seed = j["seed"].get<std::uint64_t>();
  }
  return sel;
}

// ---------------------------------------------------------------------------
// gen
// ---------------------------------------------------------------------------

struct GenArgs {
  std::size_t classes = 10;
  std::size_t dim = 2;
  std::size_t per_class = 30;
  std::size_t target_total = 600;
  std::vector<std::string> skew_entries;
  double sep = 6.0;
  std::uint64_t seed = 0;
  std::string out = "gen_out";
};

int run_gen(const GenArgs& a) {
  SkewSpec skew;
  skew.num_classes = a.classes;
  skew.skew_classes = parse_skew_entries(a.skew_entries);
  const auto [source, target] = gen_gaussian_longtail(
      a.classes, a.dim, a.per_class, a.target_total, skew, a.sep, a.seed);

  const fs::path dir = ensure_out_dir(a.out);
  json cfg;
  cfg["classes"] = a.classes;
  cfg["dim"] = a.dim;
  cfg["per_class"] = a.per_class;
  cfg["target_total"] = a.target_total;
  cfg["skew"] = a.skew_entries;
  cfg["sep"] = a.sep;
  write_manifest(dir, "gen", a.seed, cfg);
  save_csv((dir / "source.csv").string(), source);
  save_csv((dir / "target.csv").string(), target);
  std::cout << "wrote " << (dir / "source.csv").string() << " ("
            << source.size() << " rows), " << (dir / "target.csv").string()
            << " (" << target.size() << " rows)\n";
  return 0;
}

// ---------------------------------------------------------------------------
// select
// ---------------------------------------------------------------------------

struct SelectArgs {
  std::string source_path;
  std::string target_path;
  std::string similarity_path;
  std::string label_column = "label";
  std::string metric = "neg_sq_euclidean";
  std::string method = "uniprot";
  std::size_t k = 0;
  std::string gain = "approx";
  std::string solver = "entropic";
  double lambda = 0.01;
  int max_iter = 0;
  double tol = 1e-6;
  bool stochastic = false;
  double epsilon = 0.01;
  bool per_source = false;
  std::vector<std::size_t> budgets;
  std::optional<std::uint64_t> seed;
  int threads = 1;
  std::string out = "select_out";
};

SolverConfig solver_config_from(const std::string& solver, double lambda,
                                int max_iter, double tol) {
  SolverConfig cfg;
  cfg.lambda = lambda;
  cfg.max_iter = max_iter;
  cfg.tol = tol;
  if (solver == "exact") {
    cfg.mode = SolverMode::exact;
  } else if (solver == "entropic") {
    cfg.mode = SolverMode::entropic;
  } else {
    throw std::invalid_argument("unknown solver '" + solver + "'");
  }
  return cfg;
}

json select_config_json(const SelectArgs& a) {
  json cfg;
  cfg["source"] = a.source_path;
  cfg["target"] = a.target_path;
  cfg["similarity"] = a.similarity_path;
  cfg["label_column"] = a.label_column;
  cfg["metric"] = a.metric;
  cfg["method"] = a.method;
  cfg["k"] = a.k;
  cfg["gain"] = a.gain;
  cfg["solver"] = a.solver;
  cfg["lambda"] = a.lambda;
  cfg["max_iter"] = a.max_iter;
  cfg["tol"] = a.tol;
  cfg["stochastic"] = a.stochastic;
  cfg["epsilon"] = a.epsilon;
  cfg["per_source"] = a.per_source;
  cfg["budgets"] = a.budgets;
  cfg["threads"] = a.threads;
  return cfg;
}

int run_select(const SelectArgs& a) {
  if (a.k == 0) throw std::invalid_argument("--k must be positive");
  const bool have_similarity = !a.similarity_path.empty();
  const bool have_features = !a.source_path.empty() && !a.target_path.empty();
  if (have_similarity == have_features) {
    throw std::invalid_argument(
        "provide either --similarity or both --source and --target");
  }

  const Metric metric = metric_from_name(a.metric);
  std::optional<Dataset> source;
  SimilarityMatrix S;
  if (have_similarity) {
    S = load_similarity(a.similarity_path);
  } else {
    source = load_dataset(a.source_path, a.label_column);
    const Dataset target = load_dataset(a.target_path, a.label_column);
    S = build_similarity(source->features, target.features, metric,
                         BetaSpec::auto_shift());
  }

  const SolverConfig cfg =
      solver_config_from(a.solver, a.lambda, a.max_iter, a.tol);
  UniprotOptions opt;
  if (a.gain == "exact") {
    opt.gain = GainMode::exact;
  } else if (a.gain == "approx") {
    opt.gain = GainMode::approx;
  } else {
    throw std::invalid_argument("unknown gain mode '" + a.gain + "'");
  }
  if (a.stochastic) {
    StochasticConfig sc;
    sc.epsilon = a.epsilon;
    opt.stochastic = sc;
  }
  opt.seed = a.seed;
  opt.threads = a.threads;

  const fs::path dir = ensure_out_dir(a.out);
  write_manifest(dir, "select", a.seed.value_or(0), select_config_json(a));

  json out_json;
  if (a.per_source) {
    if (a.method != "uniprot") {
      throw std::invalid_argument(
          "--per-source applies to the uniprot method only");
    }
    if (!source || !source->labels) {
      throw std::invalid_argument(
          "--per-source needs a labeled --source dataset");
    }
    const std::size_t classes = source->num_classes();
    if (a.budgets.size() != classes) {
      throw std::invalid_argument(
          "--budgets must list one entry per class (" +
          std::to_string(classes) + " classes)");
    }
    std::size_t budget_sum = 0;
    for (std::size_t b : a.budgets) budget_sum += b;
    if (budget_sum != a.k) {
      throw std::invalid_argument("--budgets must sum to --k");
    }

    const Dataset target = load_dataset(a.target_path, a.label_column);
    Selection merged;
    merged.method = opt.gain == GainMode::exact
                        ? SelectionMethod::uniprot_exact
                        : SelectionMethod::uniprot_approx;
    if (a.stochastic) merged.method = SelectionMethod::uniprot_stochastic;
    merged.seed = a.stochastic ? std::optional<std::uint64_t>(
                                     a.seed.value_or(0))
                               : a.seed;
    json slices = json::array();
    for (std::size_t c = 0; c < classes; ++c) {
      std::vector<int> rows;
      for (std::size_t i = 0; i < source->size(); ++i) {
        if ((*source->labels)[i] == static_cast<int>(c)) {
          rows.push_back(static_cast<int>(i));
        }
      }
      const std::size_t kq = a.budgets[c];
      if (kq == 0) continue;
      if (kq > rows.size()) {
        throw std::invalid_argument(
            "budget " + std::to_string(kq) + " for class " +
            std::to_string(c) + " exceeds its " +
            std::to_string(rows.size()) + " source rows");
      }
      Matrix slice(rows.size(), source->dim());
      for (std::size_t r = 0; r < rows.size(); ++r) {
        const double* src = source->features.row(
            static_cast<std::size_t>(rows[r]));
        std::copy(src, src + source->dim(), slice.row(r));
      }
      ProblemSpec spec;
      spec.S = build_similarity(slice, target.features, metric,
                                BetaSpec::auto_shift());
      spec.target = uniform_marginal(spec.S.n(), 1.0);
      spec.k = kq;
      const Selection part = select_uniprot(spec, cfg, opt);
      json slice_json;
      slice_json["label"] = c;
      slice_json["budget"] = kq;
      std::vector<int> original;
      for (int local : part.indices) {
        original.push_back(rows[static_cast<std::size_t>(local)]);
      }
      slice_json["indices"] = original;
      slice_json["step_values"] = part.step_values;
      slices.push_back(std::move(slice_json));
      merged.indices.insert(merged.indices.end(), original.begin(),
                            original.end());
    }
    merged.weights.assign(merged.indices.size(),
                          1.0 / static_cast<double>(merged.indices.size()));
    out_json = selection_to_json(merged);
    out_json["per_source"] = std::move(slices);
  } else {
    ProblemSpec spec;
    spec.S = std::move(S);
    spec.target = uniform_marginal(spec.S.n(), 1.0);
    spec.k = a.k;

    Selection sel;
    if (a.method == "uniprot") {
      sel = select_uniprot(spec, cfg, opt);
    } else if (a.method == "kmedoids") {
      sel = select_kmedoids(spec);
    } else if (a.method == "random") {
      sel = select_random(spec, a.seed.value_or(0));
    } else {
      throw std::invalid_argument("unknown method '" + a.method + "'");
    }
    out_json = selection_to_json(sel);
  }

  write_json_file(dir / "selection.json", out_json);
  std::cout << "wrote " << (dir / "selection.json").string() << " ("
            << out_json["indices"].size() << " prototypes)\n";
  return 0;
}

// ---------------------------------------------------------------------------
// eval
// ---------------------------------------------------------------------------

struct EvalArgs {
  std::string source_path;
  std::string target_path;
  std::string selection_path;
  std::string label_column = "label";
  std::string metric = "neg_sq_euclidean";
  std::string out = "eval_out";
};

int run_eval(const EvalArgs& a) {
  if (a.source_path.empty() || a.target_path.empty() ||
      a.selection_path.empty()) {
    throw std::invalid_argument(
        "--source, --target, and --selection are required");
  }
  const Dataset source = load_dataset(a.source_path, a.label_column);
  const Dataset target = load_dataset(a.target_path, a.label_column);

  std::ifstream sel_in(a.selection_path);
  if (!sel_in) {
    throw DataError(DataErrorCode::missing_file,
                    "cannot open file: " + a.selection_path);
  }
  json sel_json = json::parse(sel_in);
  const Selection sel = selection_from_json(sel_json);

  const Metric metric = metric_from_name(a.metric);
  const EvalReport rep = nn_classify(source, sel, target, metric);
  const WeightSkewReport skew = weight_skew(sel);

  const fs::path dir = ensure_out_dir(a.out);
  json cfg;
  cfg["source"] = a.source_path;
  cfg["target"] = a.target_path;
  cfg["selection"] = a.selection_path;
  cfg["label_column"] = a.label_column;
  cfg["metric"] = a.metric;
  write_manifest(dir, "eval", 0, cfg);

  json rj;
  rj["overall_accuracy"] = rep.overall_accuracy;
  rj["per_class_accuracy"] = rep.per_class_accuracy;
  rj["minority_avg_accuracy"] = rep.minority_avg_accuracy;
  rj["minority_classes"] = rep.minority_classes;
  rj["num_classes"] = rep.num_classes;
  json confusion = json::array();
  for (std::size_t c = 0; c < rep.num_classes; ++c) {
    json row = json::array();
    for (std::size_t p = 0; p < rep.num_classes; ++p) {
      row.push_back(rep.confusion_at(c, p));
    }
    confusion.push_back(std::move(row));
  }
  rj["confusion"] = std::move(confusion);
  rj["prototype_class_histogram"] = rep.prototype_class_histogram;
  json wj;
  wj["sorted_weights"] = skew.sorted_weights;
  wj["std_dev"] = skew.std_dev;
  wj["max_over_min"] = skew.max_over_min;
  wj["min_is_zero"] = skew.min_is_zero;
  rj["weight_skew"] = std::move(wj);
  rj["manifest"] = kManifestName;
  write_json_file(dir / "report.json", rj);

  // Table form: one row per class.
  std::ofstream table(dir / "report.csv", std::ios::binary);
  table << "# manifest: " << kManifestName << '\n';
  table << "class,target_count,accuracy,prototype_count,minority\n";
  for (std::size_t c = 0; c < rep.num_classes; ++c) {
    std::size_t count = 0;
    for (std::size_t p = 0; p < rep.num_classes; ++p) {
      count += rep.confusion_at(c, p);
    }
    const bool minority =
        std::find(rep.minority_classes.begin(), rep.minority_classes.end(),
                  c) != rep.minority_classes.end();
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", rep.per_class_accuracy[c]);
    table << c << ',' << count << ',' << buf << ','
          << rep.prototype_class_histogram[c] << ',' << (minority ? 1 : 0)
          << '\n';
  }
  table.close();

  std::cout << "overall_accuracy=" << rep.overall_accuracy
            << " minority_avg_accuracy=" << rep.minority_avg_accuracy << '\n';
  return 0;
}

// ---------------------------------------------------------------------------
// verify
// ---------------------------------------------------------------------------

struct VerifyArgs {
  std::string suite = "all";
  std::size_t trials = 100;
  std::size_t max_m = 10;
  std::size_t max_n = 6;
  std::size_t max_k = 3;
  std::string solver = "exact";
  std::uint64_t seed = 0;
  bool allow_failures = false;
  std::string out = "verify_out";
};

int run_verify(const VerifyArgs& a) {
  if (a.solver != "exact") {
    throw std::invalid_argument(
        "verification suites run on the exact solver only");
  }
  std::vector<VerifySuite> suites;
  if (a.suite == "all") {
    suites = {VerifySuite::lemma1,     VerifySuite::lemma2,
              VerifySuite::lemma3,     VerifySuite::lemma4,
              VerifySuite::lemma5,     VerifySuite::gain_ratio,
              VerifySuite::pot_ot_equality};
  } else {
    suites = {suite_from_name(a.suite)};
  }

  InstanceGenConfig gen;
  gen.max_m = a.max_m;
  gen.max_n = a.max_n;
  gen.max_k = a.max_k;

  const fs::path dir = ensure_out_dir(a.out);
  json cfg;
  cfg["suite"] = a.suite;
  cfg["trials"] = a.trials;
  cfg["max_m"] = a.max_m;
  cfg["max_n"] = a.max_n;
  cfg["max_k"] = a.max_k;
  cfg["solver"] = a.solver;
  cfg["allow_failures"] = a.allow_failures;
  write_manifest(dir, "verify", a.seed, cfg);

  std::size_t total_failures = 0;
  json results = json::array();
  for (VerifySuite suite : suites) {
    const VerificationReport rep = run_suite(suite, a.trials, gen, a.seed);
    total_failures += rep.failures;
    json r;
    r["suite"] = suite_name(rep.suite);
    r["trials"] = rep.trials;
    r["failures"] = rep.failures;
    r["worst_violation"] = rep.worst_violation;
    if (rep.counterexample) r["counterexample"] = *rep.counterexample;
    if (rep.ratio_count > 0) {
      r["ratio_mean"] = rep.ratio_mean;
      r["ratio_min"] = rep.ratio_min;
      r["ratio_count"] = rep.ratio_count;
    }
    results.push_back(std::move(r));
    std::cout << suite_name(rep.suite) << ": trials=" << rep.trials
              << " failures=" << rep.failures
              << " worst_violation=" << rep.worst_violation << '\n';
  }
  json vj;
  vj["results"] = std::move(results);
  vj["total_failures"] = total_failures;
  vj["manifest"] = kManifestName;
  write_json_file(dir / "verification.json", vj);

  if (total_failures > 0 && !a.allow_failures) {
    std::cerr << "error: " << total_failures << " verification failure(s)\n";
    return 1;
  }
  return 0;
}

// ---------------------------------------------------------------------------
// bench
// ---------------------------------------------------------------------------

struct BenchArgs {
  std::string similarity_path;
  std::string source_path;
  std::string target_path;
  std::string label_column = "label";
  std::string metric = "neg_sq_euclidean";
  std::size_t m = 0;
  std::size_t n = 0;
  std::size_t k = 0;
  std::string solver = "exact";
  std::uint64_t seed = 0;
  std::string out = "bench_out";
};

int run_bench(const BenchArgs& a) {
  if (a.k == 0) throw std::invalid_argument("--k must be positive");
  if (a.solver != "exact") {
    throw std::invalid_argument(
        "bench traces closed-form gains against the exact solver only");
  }

  SimilarityMatrix S;
  if (!a.similarity_path.empty()) {
    S = load_similarity(a.similarity_path);
  } else if (!a.source_path.empty() && !a.target_path.empty()) {
    const Dataset source = load_dataset(a.source_path, a.label_column);
    const Dataset target = load_dataset(a.target_path, a.label_column);
    S = build_similarity(source.features, target.features,
                         metric_from_name(a.metric), BetaSpec::auto_shift());
  } else if (a.m > 0 && a.n > 0) {
    Rng rng(a.seed);
    Matrix raw(a.m, a.n);
    for (double& v : raw.data) v = std::max(1e-3, rng.uniform());
    S = SimilarityMatrix::from_raw(std::move(raw));
  } else {
    throw std::invalid_argument(
        "provide --similarity, --source/--target, or --m/--n");
  }

  const std::size_t m = S.m();
  const std::size_t n = S.n();
  if (a.k > m) throw std::invalid_argument("--k exceeds the row count");

  const fs::path dir = ensure_out_dir(a.out);
  json cfg;
  cfg["similarity"] = a.similarity_path;
  cfg["source"] = a.source_path;
  cfg["target"] = a.target_path;
  cfg["metric"] = a.metric;
  cfg["m"] = m;
  cfg["n"] = n;
  cfg["k"] = a.k;
  cfg["solver"] = a.solver;
  write_manifest(dir, "bench", a.seed, cfg);

  const Marginal caps = uniform_marginal(n, static_cast<double>(a.k));
  const SortedRows sorted = SortedRows::build(S);
  std::vector<int> picked;
  std::vector<char> in_set(m, 0);

  std::ofstream trace(dir / "bench.csv", std::ios::binary);
  trace << "# manifest: " << kManifestName << '\n';
  trace << "iter,solver_seconds,gain_seconds,chosen_index,approx_gain,"
           "exact_gain,ratio\n";

  double total_solver = 0.0;
  double total_gain = 0.0;
  double ratio_sum = 0.0;
  double ratio_min = std::numeric_limits<double>::infinity();

  for (std::size_t iter = 0; iter < a.k; ++iter) {
    const double t0 = now_seconds();
    const PotRowGainEvaluator evaluator(S, picked, 1.0, caps);
    const double base_value = evaluator.base_objective();
    const CapacityVector b = remaining_capacity(
        a.k, n, picked.empty() ? nullptr : &evaluator.base().coupling);
    const double t1 = now_seconds();

    int best = -1;
    double best_gain = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < m; ++j) {
      if (in_set[j]) continue;
      const double g = approx_gain_sorted(S.s.row(j), sorted.order[j], b).value;
      if (g > best_gain) {
        best_gain = g;
        best = static_cast<int>(j);
      }
    }
    const double t2 = now_seconds();

    const double exact_gain = evaluator.objective_with_row(best) - base_value;
    const double ratio = exact_gain == 0.0 ? 1.0 : best_gain / exact_gain;
    ratio_sum += ratio;
    ratio_min = std::min(ratio_min, ratio);
    total_solver += t1 - t0;
    total_gain += t2 - t1;

    char row[256];
    std::snprintf(row, sizeof(row), "%zu,%.9f,%.9f,%d,%.17g,%.17g,%.17g\n",
                  iter, t1 - t0, t2 - t1, best, best_gain, exact_gain, ratio);
    trace << row;

    picked.push_back(best);
    in_set[static_cast<std::size_t>(best)] = 1;
  }
  trace.close();

  json bj;
  bj["m"] = m;
  bj["n"] = n;
  bj["k"] = a.k;
  bj["total_solver_seconds"] = total_solver;
  bj["total_gain_seconds"] = total_gain;
  bj["ratio_mean"] = ratio_sum / static_cast<double>(a.k);
  bj["ratio_min"] = ratio_min;
  bj["manifest"] = kManifestName;
  write_json_file(dir / "bench.json", bj);

  std::cout << "solver=" << total_solver << "s gain=" << total_gain
            << "s ratio_mean=" << ratio_sum / static_cast<double>(a.k) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"uniform-weight prototype selection toolkit"};
  app.require_subcommand(1);

  GenArgs gen_args;
  CLI::App* gen_cmd =
      app.add_subcommand("gen", "generate a long-tail Gaussian dataset pair");
  gen_cmd->add_option("--classes", gen_args.classes, "number of classes");
  gen_cmd->add_option("--dim", gen_args.dim, "feature dimension");
  gen_cmd->add_option("--per-class", gen_args.per_class,
                      "source rows per class");
  gen_cmd->add_option("--target-total", gen_args.target_total,
                      "total target rows");
  gen_cmd->add_option("--skew", gen_args.skew_entries,
                      "CLASS:FRACTION target share (repeatable)");
  gen_cmd->add_option("--sep", gen_args.sep, "minimum distance between class means");
  gen_cmd->add_option("--seed", gen_args.seed, "random seed");
  gen_cmd->add_option("--out", gen_args.out, "output directory");

  SelectArgs sel_args;
  CLI::App* sel_cmd = app.add_subcommand("select", "pick k prototype rows");
  sel_cmd->add_option("--source", sel_args.source_path, "source feature CSV");
  sel_cmd->add_option("--target", sel_args.target_path, "target feature CSV");
  sel_cmd->add_option("--similarity", sel_args.similarity_path,
                      "precomputed score-matrix file");
  sel_cmd->add_option("--label-column", sel_args.label_column,
                      "label column name");
  sel_cmd->add_option("--metric", sel_args.metric,
                      "neg_sq_euclidean|neg_l1|cosine|dot");
  sel_cmd->add_option("--method", sel_args.method,
                      "uniprot|kmedoids|random");
  sel_cmd->add_option("--k", sel_args.k, "prototype budget")->required();
  sel_cmd->add_option("--gain", sel_args.gain, "exact|approx");
  sel_cmd->add_option("--solver", sel_args.solver, "exact|entropic");
  sel_cmd->add_option("--lambda", sel_args.lambda,
                      "entropic regularization strength");
  sel_cmd->add_option("--max-iter", sel_args.max_iter,
                      "entropic sweep cap (0: size-based default)");
  sel_cmd->add_option("--tol", sel_args.tol, "entropic convergence tolerance");
  sel_cmd->add_flag("--stochastic", sel_args.stochastic,
                    "score a random candidate pool per round");
  sel_cmd->add_option("--epsilon", sel_args.epsilon,
                      "stochastic pool accuracy parameter");
  sel_cmd->add_flag("--per-source", sel_args.per_source,
                    "select independently inside each labeled class");
  sel_cmd->add_option("--budgets", sel_args.budgets,
                      "per-class budgets (with --per-source)")
      ->delimiter(',');
  sel_cmd->add_option("--seed", sel_args.seed, "random seed");
  sel_cmd->add_option("--threads", sel_args.threads,
                      "candidate scoring threads");
  sel_cmd->add_option("--out", sel_args.out, "output directory");

  EvalArgs eval_args;
  CLI::App* eval_cmd =
      app.add_subcommand("eval", "score a selection with a 1-NN classifier");
  eval_cmd->add_option("--source", eval_args.source_path, "source CSV")
      ->required();
  eval_cmd->add_option("--target", eval_args.target_path, "target CSV")
      ->required();
  eval_cmd->add_option("--selection", eval_args.selection_path,
                       "selection.json path")
      ->required();
  eval_cmd->add_option("--label-column", eval_args.label_column,
                       "label column name");
  eval_cmd->add_option("--metric", eval_args.metric,
                       "neg_sq_euclidean|neg_l1|cosine|dot");
  eval_cmd->add_option("--out", eval_args.out, "output directory");

  VerifyArgs ver_args;
  CLI::App* ver_cmd =
      app.add_subcommand("verify", "run randomized property suites");
  ver_cmd->add_option("--suite", ver_args.suite,
                      "lemma1|lemma2|lemma3|lemma4|lemma5|gain_ratio|"
                      "pot_ot_equality|all");
  ver_cmd->add_option("--trials", ver_args.trials, "trials per suite");
  ver_cmd->add_option("--max-m", ver_args.max_m, "max source rows per instance");
  ver_cmd->add_option("--max-n", ver_args.max_n, "max target columns");
  ver_cmd->add_option("--max-k", ver_args.max_k, "max budget");
  ver_cmd->add_option("--solver", ver_args.solver, "exact");
  ver_cmd->add_option("--seed", ver_args.seed, "random seed");
  ver_cmd->add_flag("--allow-failures", ver_args.allow_failures,
                    "exit 0 even when checks fail");
  ver_cmd->add_option("--out", ver_args.out, "output directory");

  BenchArgs bench_args;
  CLI::App* bench_cmd = app.add_subcommand(
      "bench", "trace per-iteration solver and gain-scoring cost");
  bench_cmd->add_option("--similarity", bench_args.similarity_path,
                        "precomputed score-matrix file");
  bench_cmd->add_option("--source", bench_args.source_path, "source CSV");
  bench_cmd->add_option("--target", bench_args.target_path, "target CSV");
  bench_cmd->add_option("--label-column", bench_args.label_column,
                        "label column name");
  bench_cmd->add_option("--metric", bench_args.metric,
                        "neg_sq_euclidean|neg_l1|cosine|dot");
  bench_cmd->add_option("--m", bench_args.m, "synthetic row count");
  bench_cmd->add_option("--n", bench_args.n, "synthetic column count");
  bench_cmd->add_option("--k", bench_args.k, "prototype budget")->required();
  bench_cmd->add_option("--solver", bench_args.solver, "exact");
  bench_cmd->add_option("--seed", bench_args.seed, "random seed");
  bench_cmd->add_option("--out", bench_args.out, "output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen_cmd->parsed()) return run_gen(gen_args);
    if (sel_cmd->parsed()) return run_select(sel_args);
    if (eval_cmd->parsed()) return run_eval(eval_args);
    if (ver_cmd->parsed()) return run_verify(ver_args);
    if (bench_cmd->parsed()) return run_bench(bench_args);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
