#include "surco/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <mutex>
#include <numbers>
#include <optional>
#include <atomic>
#include <set>
#include <sstream>
#include <thread>

#include "surco/csv.hpp"
#include "surco/errors.hpp"
#include "surco/objectives.hpp"
#include "surco/random.hpp"
#include "surco/solvers.hpp"
#include "surco/theory.hpp"

namespace surco {

namespace fs = std::filesystem;
using nlohmann::json;

// ---------------------------------------------------------------------------
// Names

Domain parse_domain(std::string_view name) {
  if (name == "route") return Domain::kRoute;
  if (name == "toy") return Domain::kToy;
  if (name == "assignment") return Domain::kAssignment;
  throw ParameterError("unknown domain '" + std::string(name) + "'");
}

std::string_view domain_name(Domain d) {
  switch (d) {
    case Domain::kRoute:
      return "route";
    case Domain::kToy:
      return "toy";
    case Domain::kAssignment:
      return "assignment";
  }
  return "route";
}

Method parse_method(std::string_view name) {
  if (name == "zero") return Method::kZero;
  if (name == "prior") return Method::kPrior;
  if (name == "hybrid") return Method::kHybrid;
  if (name == "heuristic") return Method::kHeuristic;
  if (name == "oracle") return Method::kOracle;
  if (name == "let") return Method::kLet;
  throw ParameterError("unknown method '" + std::string(name) + "'");
}

std::string_view method_name(Method m) {
  switch (m) {
    case Method::kZero:
      return "zero";
    case Method::kPrior:
      return "prior";
    case Method::kHybrid:
      return "hybrid";
    case Method::kHeuristic:
      return "heuristic";
    case Method::kOracle:
      return "oracle";
    case Method::kLet:
      return "let";
  }
  return "zero";
}

// ---------------------------------------------------------------------------
// Config

namespace {

void reject_unknown(const json& doc, const std::set<std::string>& allowed, const std::string& where) {
  if (!doc.is_object()) throw ParameterError(where + " must be a JSON object");
  for (const auto& [key, _] : doc.items()) {
    if (!allowed.count(key)) throw ParameterError("unknown key '" + key + "' in " + where);
  }
}

template <typename T>
void read_if(const json& doc, const char* key, T& out) {
  if (!doc.contains(key)) return;
  try {
    out = doc.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ParameterError(std::string("bad value for '") + key + "': " + e.what());
  }
}

json zero_to_json(const ZeroConfig& z) {
  return {{"alpha", z.alpha},
          {"max_steps", z.max_steps},
          {"patience", z.patience},
          {"init_mode", z.init_mode == InitMode::kRandom ? "random" : "let-warm-start"},
          {"seed", z.seed},
          {"init_lo", z.init_lo},
          {"init_hi", z.init_hi},
          {"lambda_bb", z.blackbox.lambda},
          {"normalize", z.blackbox.normalize}};
}

ZeroConfig zero_from_json(const json& doc) {
  reject_unknown(doc,
                 {"alpha", "max_steps", "patience", "init_mode", "seed", "init_lo", "init_hi",
                  "lambda_bb", "normalize"},
                 "zero");
  ZeroConfig z;
  read_if(doc, "alpha", z.alpha);
  read_if(doc, "max_steps", z.max_steps);
  read_if(doc, "patience", z.patience);
  read_if(doc, "seed", z.seed);
  read_if(doc, "init_lo", z.init_lo);
  read_if(doc, "init_hi", z.init_hi);
  read_if(doc, "lambda_bb", z.blackbox.lambda);
  read_if(doc, "normalize", z.blackbox.normalize);
  if (doc.contains("init_mode")) {
    const std::string mode = doc.at("init_mode").get<std::string>();
    if (mode == "random") {
      z.init_mode = InitMode::kRandom;
    } else if (mode == "let-warm-start" || mode == "warm") {
      z.init_mode = InitMode::kWarmStart;
    } else {
      throw ParameterError("unknown init_mode '" + mode + "'");
    }
  }
  return z;
}

json prior_to_json(const PriorTrainConfig& p) {
  return {{"epochs", p.epochs},
          {"lambda_reg", std::isinf(p.lambda_reg) ? json("inf") : json(p.lambda_reg)},
          {"lr_theta", p.lr_theta},
          {"lr_costs", p.lr_costs},
          {"batch_size", p.batch_size},
          {"seed", p.seed},
          {"lambda_bb", p.blackbox.lambda}};
}

PriorTrainConfig prior_from_config_json(const json& doc) {
  reject_unknown(doc, {"epochs", "lambda_reg", "lr_theta", "lr_costs", "batch_size", "seed", "lambda_bb"},
                 "prior");
  PriorTrainConfig p;
  read_if(doc, "epochs", p.epochs);
  read_if(doc, "lr_theta", p.lr_theta);
  read_if(doc, "lr_costs", p.lr_costs);
  read_if(doc, "batch_size", p.batch_size);
  read_if(doc, "seed", p.seed);
  read_if(doc, "lambda_bb", p.blackbox.lambda);
  if (doc.contains("lambda_reg")) {
    const json& v = doc.at("lambda_reg");
    if (v.is_string() && (v.get<std::string>() == "inf" || v.get<std::string>() == "infinity")) {
      p.lambda_reg = PriorTrainConfig::kDirect;
    } else if (v.is_number()) {
      p.lambda_reg = v.get<double>();
    } else {
      throw ParameterError("lambda_reg must be a number or \"inf\"");
    }
  }
  return p;
}

json theory_to_json(const TheoryConfig& t) {
  return {{"eps", t.eps},
          {"spacings", t.spacings},
          {"queries", t.queries},
          {"dataset_sizes", t.dataset_sizes},
          {"trials", t.trials}};
}

TheoryConfig theory_from_json(const json& doc) {
  reject_unknown(doc, {"eps", "spacings", "queries", "dataset_sizes", "trials"}, "theory");
  TheoryConfig t;
  read_if(doc, "eps", t.eps);
  read_if(doc, "spacings", t.spacings);
  read_if(doc, "queries", t.queries);
  read_if(doc, "dataset_sizes", t.dataset_sizes);
  read_if(doc, "trials", t.trials);
  return t;
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json(const json& doc) {
  reject_unknown(doc,
                 {"domain", "regime", "regimes", "methods", "method", "rows", "cols", "items",
                  "devices", "train_count", "test_count", "seed", "zero", "heuristic", "prior",
                  "theory", "out", "jobs"},
                 "experiment config");
  ExperimentConfig cfg;
  if (doc.contains("domain")) cfg.domain = parse_domain(doc.at("domain").get<std::string>());
  if (doc.contains("regime") && doc.contains("regimes")) {
    throw ParameterError("give either 'regime' or 'regimes', not both");
  }
  auto parse_regimes = [](const std::vector<std::string>& names) {
    std::vector<DeadlineRegime> out;
    for (const auto& n : names) {
      if (n == "all") {
        out = {DeadlineRegime::loose(), DeadlineRegime::normal(), DeadlineRegime::tight()};
        return out;
      }
      out.push_back(DeadlineRegime::parse(n));
    }
    return out;
  };
  try {
    if (doc.contains("regime")) cfg.regimes = parse_regimes({doc.at("regime").get<std::string>()});
    if (doc.contains("regimes")) {
      cfg.regimes = parse_regimes(doc.at("regimes").get<std::vector<std::string>>());
    }
    if (doc.contains("method") && doc.contains("methods")) {
      throw ParameterError("give either 'method' or 'methods', not both");
    }
    if (doc.contains("method")) cfg.methods = {parse_method(doc.at("method").get<std::string>())};
    if (doc.contains("methods")) {
      cfg.methods.clear();
      for (const auto& m : doc.at("methods").get<std::vector<std::string>>()) {
        cfg.methods.push_back(parse_method(m));
      }
    }
    if (doc.contains("heuristic")) {
      reject_unknown(doc.at("heuristic"), {"lambda_sweep"}, "heuristic");
      read_if(doc.at("heuristic"), "lambda_sweep", cfg.heuristic.lambda_sweep);
    }
  } catch (const json::exception& e) {
    throw ParameterError(std::string("malformed experiment config: ") + e.what());
  }
  read_if(doc, "rows", cfg.rows);
  read_if(doc, "cols", cfg.cols);
  read_if(doc, "items", cfg.items);
  read_if(doc, "devices", cfg.devices);
  read_if(doc, "train_count", cfg.train_count);
  read_if(doc, "test_count", cfg.test_count);
  read_if(doc, "seed", cfg.seed);
  read_if(doc, "out", cfg.out_dir);
  read_if(doc, "jobs", cfg.jobs);
  if (doc.contains("zero")) cfg.zero = zero_from_json(doc.at("zero"));
  if (doc.contains("prior")) cfg.prior = prior_from_config_json(doc.at("prior"));
  if (doc.contains("theory")) cfg.theory = theory_from_json(doc.at("theory"));
  cfg.validate();
  return cfg;
}

json ExperimentConfig::to_json() const {
  std::vector<std::string> regime_names;
  for (const auto& r : regimes) regime_names.emplace_back(r.name());
  std::vector<std::string> method_names;
  for (Method m : methods) method_names.emplace_back(method_name(m));
  return {{"domain", domain_name(domain)},
          {"regimes", regime_names},
          {"methods", method_names},
          {"rows", rows},
          {"cols", cols},
          {"items", items},
          {"devices", devices},
          {"train_count", train_count},
          {"test_count", test_count},
          {"seed", seed},
          {"zero", zero_to_json(zero)},
          {"heuristic", {{"lambda_sweep", heuristic.lambda_sweep}}},
          {"prior", prior_to_json(prior)},
          {"theory", theory_to_json(theory)},
          {"out", out_dir},
          {"jobs", jobs}};
}

std::string ExperimentConfig::hash() const {
  // The output directory and thread count do not change results.
  json doc = to_json();
  doc.erase("out");
  doc.erase("jobs");
  const std::string text = doc.dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void ExperimentConfig::validate() const {
  if (regimes.empty()) throw ParameterError("at least one regime is required");
  if (methods.empty()) throw ParameterError("at least one method is required");
  if (rows < 2 || cols < 2) throw ParameterError("route grid must be at least 2x2");
  if (devices < 1 || items < devices) throw ParameterError("need items >= devices >= 1");
  if (train_count < 1 || test_count < 1) throw ParameterError("instance counts must be positive");
  if (jobs < 1) throw ParameterError("jobs must be at least 1");
  zero.validate();
  heuristic.validate();
  prior.validate();
  if (!(theory.eps > 0.0) || theory.queries < 1 || theory.trials < 1) {
    throw ParameterError("theory eps, queries and trials must be positive");
  }
  for (Method m : methods) {
    const bool route_only = m == Method::kHeuristic || m == Method::kLet;
    if (domain != Domain::kRoute && route_only) {
      throw ParameterError("method '" + std::string(method_name(m)) + "' only applies to route");
    }
    if (domain == Domain::kToy && (m == Method::kPrior || m == Method::kHybrid)) {
      throw ParameterError("prior/hybrid are not available for the toy domain");
    }
  }
}

// ---------------------------------------------------------------------------
// Files

json read_json_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParameterError(path.string() + ": " + e.what());
  }
}

void write_json_file(const fs::path& path, const json& doc) {
  std::error_code ec;
  if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << doc.dump(2) << '\n';
  if (!out) throw IoError("write failed for " + path.string());
}

namespace {

// Regimes only distinguish route instances.
std::vector<DeadlineRegime> effective_regimes(const ExperimentConfig& cfg) {
  if (cfg.domain == Domain::kRoute) return cfg.regimes;
  return {DeadlineRegime::normal()};
}

std::string regime_label(const ExperimentConfig& cfg, DeadlineRegime r) {
  return cfg.domain == Domain::kRoute ? std::string(r.name()) : "n/a";
}

std::string index_name(int i) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%03d", i);
  return buf;
}

fs::path instance_path(const ExperimentConfig& cfg, std::string_view split, DeadlineRegime r,
                       int i) {
  const fs::path dir = fs::path(cfg.out_dir) / "instances" / std::string(split);
  if (cfg.domain == Domain::kRoute) {
    return dir / ("route_" + std::string(r.name()) + "_" + index_name(i) + ".json");
  }
  return dir / (std::string(domain_name(cfg.domain)) + "_" + index_name(i) + ".json");
}

std::uint64_t split_seed(const ExperimentConfig& cfg, std::string_view split) {
  return derive_seed(cfg.seed, split == "train" ? 1 : 2);
}

std::vector<double> toy_angles(int count) {
  std::vector<double> ys;
  for (int k = 0; k < count; ++k) {
    ys.push_back(count == 1 ? 0.0 : (std::numbers::pi / 2.0) * k / (count - 1));
  }
  return ys;
}

std::vector<json> make_split(const ExperimentConfig& cfg, std::string_view split, DeadlineRegime r) {
  const int count = split == "train" ? cfg.train_count : cfg.test_count;
  const std::uint64_t seed = split_seed(cfg, split);
  std::vector<json> docs;
  switch (cfg.domain) {
    case Domain::kRoute:
      for (const auto& inst : generate_route_instances(cfg.rows, cfg.cols, count, r, seed)) {
        docs.push_back(to_json(inst));
      }
      break;
    case Domain::kAssignment:
      for (const auto& inst : generate_assignment_instances(cfg.items, cfg.devices, count, seed)) {
        docs.push_back(to_json(inst));
      }
      break;
    case Domain::kToy:
      for (double y : toy_angles(count)) docs.push_back(to_json(ToyInstance(y)));
      break;
  }
  return docs;
}

template <typename Fn>
void parallel_for(int count, int jobs, Fn&& fn) {
  const int workers = std::max(1, std::min(jobs, count));
  if (workers == 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> threads;
  for (int w = 0; w < workers; ++w) {
    threads.emplace_back([&] {
      for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1)) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : threads) t.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace

fs::path prior_model_path(const ExperimentConfig& cfg, DeadlineRegime regime) {
  const std::string suffix =
      cfg.domain == Domain::kRoute ? "_" + std::string(regime.name()) : std::string();
  return fs::path(cfg.out_dir) / "models" /
         ("prior_" + std::string(domain_name(cfg.domain)) + suffix + ".json");
}

GenerateSummary cmd_generate(const ExperimentConfig& cfg) {
  cfg.validate();
  GenerateSummary summary;
  if (cfg.domain == Domain::kRoute && cfg.rows * cfg.cols > kMaxEnumerationNodes) {
    summary.warnings.push_back("grid has " + std::to_string(cfg.rows * cfg.cols) +
                               " nodes; the exact oracle (<= " +
                               std::to_string(kMaxEnumerationNodes) +
                               " nodes) will be unavailable for these instances");
  }
  if (cfg.domain == Domain::kAssignment) {
    summary.warnings.push_back(
        "assignment instances are synthetic (capacity = 1.2 x average load)");
    if (std::pow(cfg.devices, cfg.items) > kMaxAssignmentEnumeration) {
      summary.warnings.push_back("devices^items exceeds 1e6; the exact oracle will be unavailable");
    }
  }
  for (DeadlineRegime r : effective_regimes(cfg)) {
    for (std::string_view split : {"train", "test"}) {
      if (cfg.domain == Domain::kToy && split == "train") continue;
      const std::vector<json> docs = make_split(cfg, split, r);
      for (std::size_t i = 0; i < docs.size(); ++i) {
        const fs::path path = instance_path(cfg, split, r, static_cast<int>(i));
        write_json_file(path, docs[i]);
        summary.files.push_back(path);
      }
    }
  }
  std::vector<std::string> names;
  for (const auto& f : summary.files) names.push_back(f.filename().string());
  write_json_file(fs::path(cfg.out_dir) / "instances" / "manifest.json",
                  json{{"config", cfg.to_json()},
                       {"config_hash", cfg.hash()},
                       {"files", names},
                       {"warnings", summary.warnings}});
  return summary;
}

// ---------------------------------------------------------------------------
// Run

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

struct Evaluated {
  double f = 0.0;
  std::size_t solver_calls = 0;
  std::size_t objective_calls = 0;
  double wall_ms = 0.0;
};

struct InstanceContext {
  std::string name;
  std::uint64_t zero_seed = 0;
  const PriorModel* model = nullptr;
};

Evaluated run_surco_method(Method method, const SolverOracle& oracle, const Objective& objective,
                           const FeatureMatrix* features, const ExperimentConfig& cfg,
                           const InstanceContext& ctx, std::span<const double> warm_start) {
  const auto start = Clock::now();
  Evaluated out;
  ZeroConfig zero = cfg.zero;
  zero.seed = ctx.zero_seed;
  if (method == Method::kPrior) {
    const std::vector<double> x = surco_prior_infer(*ctx.model, oracle, *features);
    out.wall_ms = elapsed_ms(start);
    out.solver_calls = oracle.calls();
    out.objective_calls = objective.calls();
    out.f = objective(x).value;  // reporting only, outside the timed call
    return out;
  }
  const TrainRecord rec =
      method == Method::kHybrid
          ? surco_hybrid(*ctx.model, oracle, objective, *features, zero)
          : surco_zero(oracle, objective, zero, warm_start);
  out.wall_ms = elapsed_ms(start);
  out.f = rec.best_f;
  out.solver_calls = rec.solver_calls;
  out.objective_calls = rec.objective_calls;
  return out;
}

std::vector<ResultRow> evaluate_route(const RouteInstance& inst, const ExperimentConfig& cfg,
                                      const InstanceContext& ctx, const std::string& regime) {
  std::vector<ResultRow> rows;
  std::optional<double> oracle_f;
  if (inst.num_nodes() <= kMaxEnumerationNodes) oracle_f = exact_oracle(inst).value;

  for (Method m : cfg.methods) {
    Evaluated ev;
    const auto start = Clock::now();
    switch (m) {
      case Method::kLet: {
        const PathSolution p = let_path(inst);
        ev.f = ontime_objective(p.x, inst).value;
        ev.solver_calls = 1;
        ev.objective_calls = 1;
        ev.wall_ms = elapsed_ms(start);
        break;
      }
      case Method::kHeuristic: {
        ev.f = heuristic_mean_variance(inst, cfg.heuristic).value;
        ev.solver_calls = cfg.heuristic.lambda_sweep.size();
        ev.objective_calls = cfg.heuristic.lambda_sweep.size();
        ev.wall_ms = elapsed_ms(start);
        break;
      }
      case Method::kOracle: {
        if (!oracle_f) throw GuardError("exact oracle requested on a grid above the enumeration guard");
        const OracleResult res = exact_oracle(inst);
        ev.f = res.value;
        ev.objective_calls = res.sorted_values.size();
        ev.wall_ms = elapsed_ms(start);
        break;
      }
      case Method::kZero:
      case Method::kPrior:
      case Method::kHybrid: {
        const PathOracle oracle(inst);
        const Objective objective = make_ontime_objective(inst);
        const FeatureMatrix features = route_edge_features(inst);
        ev = run_surco_method(m, oracle, objective, &features, cfg, ctx, inst.mu());
        break;
      }
    }
    ResultRow row;
    row.instance = ctx.name;
    row.method = m;
    row.regime = regime;
    row.f = ev.f;
    row.wall_ms = ev.wall_ms;
    row.solver_calls = ev.solver_calls;
    row.objective_calls = ev.objective_calls;
    row.seed = m == Method::kZero || m == Method::kHybrid ? ctx.zero_seed : inst.seed();
    if (oracle_f) {
      row.has_gap = true;
      row.oracle_gap = *oracle_f - ev.f;
    }
    rows.push_back(row);
  }
  return rows;
}

double assignment_optimum(const AssignmentInstance& inst) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& sol : enumerate_assignments(inst)) {
    best = std::min(best, assignment_objective(sol.x, inst).value);
  }
  if (!std::isfinite(best)) throw InfeasibleError("assignment instance has no feasible solution");
  return best;
}

std::vector<ResultRow> evaluate_assignment(const AssignmentInstance& inst,
                                           const ExperimentConfig& cfg,
                                           const InstanceContext& ctx) {
  std::vector<ResultRow> rows;
  std::optional<double> optimum;
  if (std::pow(inst.num_devices, inst.num_items) <= kMaxAssignmentEnumeration) {
    optimum = assignment_optimum(inst);
  }
  for (Method m : cfg.methods) {
    Evaluated ev;
    if (m == Method::kOracle) {
      const auto start = Clock::now();
      if (!optimum) throw GuardError("assignment oracle requested above the enumeration guard");
      ev.f = assignment_optimum(inst);
      ev.objective_calls = enumerate_assignments(inst).size();
      ev.wall_ms = elapsed_ms(start);
    } else {
      const AssignmentOracle oracle(inst);
      const Objective objective = make_assignment_objective(inst);
      const FeatureMatrix features = assignment_pair_features(inst);
      // Warm start for assignment: each item's own weight on every device.
      std::vector<double> warm(static_cast<std::size_t>(inst.num_variables()));
      for (int t = 0; t < inst.num_items; ++t) {
        for (int d = 0; d < inst.num_devices; ++d) warm[inst.index(t, d)] = inst.weights[t];
      }
      ev = run_surco_method(m, oracle, objective, &features, cfg, ctx, warm);
    }
    ResultRow row;
    row.instance = ctx.name;
    row.method = m;
    row.regime = "n/a";
    row.f = ev.f;
    row.wall_ms = ev.wall_ms;
    row.solver_calls = ev.solver_calls;
    row.objective_calls = ev.objective_calls;
    row.seed = m == Method::kZero || m == Method::kHybrid ? ctx.zero_seed : inst.seed;
    if (optimum) {
      row.has_gap = true;
      row.oracle_gap = ev.f - *optimum;
    }
    rows.push_back(row);
  }
  return rows;
}

std::vector<ResultRow> evaluate_toy(const ToyInstance& inst, const ExperimentConfig& cfg,
                                    const InstanceContext& ctx) {
  std::vector<ResultRow> rows;
  const std::vector<double> best_vertex = toy_direct_map(inst.y);
  const double optimum = toy_objective(best_vertex, inst).value;
  for (Method m : cfg.methods) {
    Evaluated ev;
    if (m == Method::kOracle) {
      ev.f = optimum;
      ev.objective_calls = ToyInstance::kVertices.size();
    } else {
      const ToyOracle oracle(Sense::kMaximize);
      const Objective objective = make_toy_objective(inst);
      ev = run_surco_method(m, oracle, objective, nullptr, cfg, ctx, {});
    }
    ResultRow row;
    row.instance = ctx.name;
    row.method = m;
    row.regime = "n/a";
    row.f = ev.f;
    row.wall_ms = ev.wall_ms;
    row.solver_calls = ev.solver_calls;
    row.objective_calls = ev.objective_calls;
    row.seed = ctx.zero_seed;
    row.has_gap = true;
    row.oracle_gap = optimum - ev.f;
    rows.push_back(row);
  }
  return rows;
}

bool maximizing(Domain d) { return d != Domain::kAssignment; }

std::string note_for(const ExperimentConfig& cfg, Method m) {
  if (cfg.domain == Domain::kAssignment) return "synthetic assignment domain";
  if (cfg.domain == Domain::kRoute && (m == Method::kPrior || m == Method::kHybrid)) {
    return "prior-on-routing extension";
  }
  return "";
}

}  // namespace

RunSummary cmd_run(const ExperimentConfig& cfg) {
  cfg.validate();
  RunSummary summary;
  const bool needs_model = std::any_of(cfg.methods.begin(), cfg.methods.end(), [](Method m) {
    return m == Method::kPrior || m == Method::kHybrid;
  });

  for (DeadlineRegime r : effective_regimes(cfg)) {
    const std::string regime = regime_label(cfg, r);
    std::optional<PriorModel> model;
    if (needs_model) {
      const fs::path path = prior_model_path(cfg, r);
      if (!fs::exists(path)) {
        throw IoError("method prior/hybrid needs a trained model at " + path.string() +
                      " (run train-prior first)");
      }
      model = prior_from_json(read_json_file(path));
      if (model->features.domain != domain_name(cfg.domain)) {
        throw ParameterError("prior model was trained for domain '" + model->features.domain + "'");
      }
    }

    std::vector<fs::path> files;
    for (int i = 0; i < cfg.test_count; ++i) {
      const fs::path p = instance_path(cfg, "test", r, i);
      if (!fs::exists(p)) {
        throw IoError("missing instance file " + p.string() + " (run generate first)");
      }
      files.push_back(p);
    }

    std::vector<std::vector<ResultRow>> slots(files.size());
    parallel_for(static_cast<int>(files.size()), cfg.jobs, [&](int i) {
      const json doc = read_json_file(files[i]);
      InstanceContext ctx;
      ctx.name = files[i].stem().string();
      ctx.zero_seed = derive_seed(cfg.seed ^ cfg.zero.seed, static_cast<std::uint64_t>(i) + 1000);
      ctx.model = model ? &*model : nullptr;
      switch (cfg.domain) {
        case Domain::kRoute:
          slots[i] = evaluate_route(route_from_json(doc), cfg, ctx, regime);
          break;
        case Domain::kAssignment:
          slots[i] = evaluate_assignment(assignment_from_json(doc), cfg, ctx);
          break;
        case Domain::kToy:
          slots[i] = evaluate_toy(toy_from_json(doc), cfg, ctx);
          break;
      }
    });
    for (auto& s : slots) {
      for (auto& row : s) summary.rows.push_back(std::move(row));
    }

    // Head-to-head counts per ordered method pair, in configured order.
    const double sign = maximizing(cfg.domain) ? 1.0 : -1.0;
    for (std::size_t a = 0; a < cfg.methods.size(); ++a) {
      for (std::size_t b = a + 1; b < cfg.methods.size(); ++b) {
        HeadToHead h{regime, cfg.methods[a], cfg.methods[b]};
        for (const auto& s : slots) {
          const double fa = s[a].f;
          const double fb = s[b].f;
          const double diff = sign * (fa - fb);
          const double tol = 1e-12 * (1.0 + std::abs(fa) + std::abs(fb));
          if (diff > tol) {
            ++h.wins;
          } else if (diff < -tol) {
            ++h.losses;
          } else {
            ++h.ties;
          }
        }
        summary.head_to_head.push_back(h);
      }
    }
  }

  std::stable_sort(summary.rows.begin(), summary.rows.end(),
                   [&](const ResultRow& x, const ResultRow& y) {
                     if (x.regime != y.regime) return x.regime < y.regime;
                     if (x.instance != y.instance) return x.instance < y.instance;
                     return method_name(x.method) < method_name(y.method);
                   });

  const fs::path out_dir(cfg.out_dir);
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  write_json_file(out_dir / "config.resolved.json",
                  json{{"config", cfg.to_json()}, {"config_hash", cfg.hash()}});
  summary.csv_path = out_dir / "results.csv";
  std::ofstream out(summary.csv_path, std::ios::binary);
  if (!out) throw IoError("cannot write " + summary.csv_path.string());
  CsvWriter csv(out);
  const std::string hash = cfg.hash();
  const std::string domain =
      cfg.domain == Domain::kAssignment ? "assignment-synthetic" : std::string(domain_name(cfg.domain));
  csv.row({"kind", "domain", "regime", "instance", "method", "opponent", "f", "oracle_gap",
           "wall_ms", "solver_calls", "objective_calls", "seed", "wins", "losses", "ties", "note",
           "config_hash"});
  for (const auto& r : summary.rows) {
    csv.row({"instance", domain, r.regime, r.instance, std::string(method_name(r.method)), "",
             format_double(r.f), r.has_gap ? format_double(r.oracle_gap) : "",
             format_double(r.wall_ms), std::to_string(r.solver_calls),
             std::to_string(r.objective_calls), std::to_string(r.seed), "", "", "",
             note_for(cfg, r.method), hash});
  }
  // Means per (regime, method), in configured order.
  std::vector<std::string> regimes;
  for (DeadlineRegime r : effective_regimes(cfg)) regimes.push_back(regime_label(cfg, r));
  for (const auto& regime : regimes) {
    for (Method m : cfg.methods) {
      double f_sum = 0.0;
      double gap_sum = 0.0;
      int n = 0;
      int gaps = 0;
      for (const auto& r : summary.rows) {
        if (r.regime != regime || r.method != m) continue;
        f_sum += r.f;
        ++n;
        if (r.has_gap) {
          gap_sum += r.oracle_gap;
          ++gaps;
        }
      }
      if (n == 0) continue;
      csv.row({"mean", domain, regime, "", std::string(method_name(m)), "", format_double(f_sum / n),
               gaps ? format_double(gap_sum / gaps) : "", "", "", "", "", "", "", "",
               note_for(cfg, m), hash});
    }
  }
  for (const auto& h : summary.head_to_head) {
    csv.row({"head_to_head", domain, h.regime, "", std::string(method_name(h.method)),
             std::string(method_name(h.opponent)), "", "", "", "", "", "", std::to_string(h.wins),
             std::to_string(h.losses), std::to_string(h.ties), "", hash});
  }
  if (!out) throw IoError("write failed for " + summary.csv_path.string());
  return summary;
}

// ---------------------------------------------------------------------------
// Prior training

std::vector<fs::path> cmd_train_prior(const ExperimentConfig& cfg) {
  cfg.validate();
  if (cfg.domain == Domain::kToy) throw ParameterError("prior training is not available for toy");
  std::vector<fs::path> written;
  for (DeadlineRegime r : effective_regimes(cfg)) {
    std::vector<PriorSample> samples;
    for (int i = 0; i < cfg.train_count; ++i) {
      const fs::path p = instance_path(cfg, "train", r, i);
      if (!fs::exists(p)) throw IoError("missing training instance " + p.string());
      const json doc = read_json_file(p);
      samples.push_back(cfg.domain == Domain::kRoute
                            ? make_route_sample(route_from_json(doc))
                            : make_assignment_sample(assignment_from_json(doc)));
    }
    const std::uint64_t seed = derive_seed(cfg.seed ^ cfg.prior.seed, 0x7072696FULL);
    PriorModel init =
        cfg.domain == Domain::kRoute ? PriorModel::route(seed) : PriorModel::assignment(seed);
    const PriorTrainResult result = surco_prior_train(samples, std::move(init), cfg.prior);

    json doc = to_json(result.model);
    if (cfg.domain == Domain::kRoute) doc["note"] = "prior-on-routing extension";
    if (cfg.domain == Domain::kAssignment) doc["note"] = "synthetic assignment domain";
    const fs::path path = prior_model_path(cfg, r);
    write_json_file(path, doc);
    written.push_back(path);

    fs::path log = path;
    log.replace_extension(".train.csv");
    std::ofstream out(log, std::ios::binary);
    if (!out) throw IoError("cannot write " + log.string());
    CsvWriter csv(out);
    csv.row({"epoch", "mean_f", "best_epoch", "config_hash"});
    for (std::size_t e = 0; e < result.epoch_mean_f.size(); ++e) {
      csv.row({std::to_string(e), format_double(result.epoch_mean_f[e]),
               std::to_string(result.best_epoch), cfg.hash()});
    }
  }
  return written;
}

// ---------------------------------------------------------------------------
// Theory

fs::path cmd_theory(const ExperimentConfig& cfg) {
  cfg.validate();
  const TheoryConfig& t = cfg.theory;
  const Box domain{{0.0}, {std::numbers::pi / 2.0}};
  const double lipschitz = 1.0;
  const double delta = t.eps / lipschitz;
  const std::string hash = cfg.hash();

  const fs::path path = fs::path(cfg.out_dir) / "theory.csv";
  std::error_code ec;
  fs::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  CsvWriter csv(out);
  csv.row({"table", "map", "spacing", "max_ratio", "clusters", "d_min", "n", "delta", "trials",
           "covered", "n0", "nn_max_error", "config_hash"});

  const VectorMap direct = [](std::span<const double> y) { return toy_direct_map(y[0]); };
  const VectorMap surrogate = [](std::span<const double> y) { return toy_surrogate_map(y[0]); };
  for (const auto& [label, map] : {std::pair{"direct", direct}, std::pair{"surrogate", surrogate}}) {
    for (const auto& rep : lipschitz_scan(map, domain, t.spacings, {label})) {
      csv.row({"lipschitz", label, format_double(rep.spacing), format_double(rep.max_ratio),
               std::to_string(rep.clusters), format_double(rep.d_min), std::to_string(rep.samples),
               "", "", "", "", "", hash});
    }
  }

  const double n0 = cover_size_bound(domain.volume(), unit_ball_volume(1), lipschitz, t.eps, 1);
  for (int n : t.dataset_sizes) {
    int covered = 0;
    for (int trial = 0; trial < t.trials; ++trial) {
      Rng rng(derive_seed(cfg.seed, static_cast<std::uint64_t>(n) * 1000 + trial));
      std::vector<std::vector<double>> pts(static_cast<std::size_t>(n));
      for (auto& p : pts) p = {rng.uniform(domain.lo[0], domain.hi[0])};
      if (check_cover(pts, domain, delta).covered) ++covered;
    }
    csv.row({"cover_random", "", "", "", "", "", std::to_string(n), format_double(delta),
             std::to_string(t.trials), std::to_string(covered), format_double(n0), "", hash});
  }

  LabeledDataset data;
  data.domain = domain;
  data.points = grid_cover_points(domain, delta);
  for (const auto& p : data.points) data.labels.push_back(toy_surrogate_map(p[0]));
  const CoverAnalysis grid_cover = check_cover(data.points, domain, delta, lipschitz, t.eps);
  Rng rng(derive_seed(cfg.seed, 0x4E4EULL));
  double worst = 0.0;
  for (int q = 0; q < t.queries; ++q) {
    const double y = rng.uniform(domain.lo[0], domain.hi[0]);
    const std::vector<double> truth = toy_surrogate_map(y);
    const std::vector<double>& pred = nn1_predict(data, std::vector<double>{y});
    worst = std::max(worst, std::hypot(pred[0] - truth[0], pred[1] - truth[1]));
  }
  csv.row({"cover_grid", "surrogate", "", "", "", "", std::to_string(data.points.size()),
           format_double(delta), "1", grid_cover.covered ? "1" : "0", format_double(n0),
           format_double(worst), hash});
  if (!out) throw IoError("write failed for " + path.string());
  return path;
}

// ---------------------------------------------------------------------------
// Validation

std::vector<std::string> validate_document(const json& doc) {
  std::vector<std::string> issues;
  if (!doc.is_object()) throw ParameterError("document is not a JSON object");

  if (doc.contains("mu")) {
    const RouteInstance inst = route_from_json(doc);
    for (int e = 0; e < inst.num_edges(); ++e) {
      const double mu = inst.mu()[e];
      const double s2 = inst.sigma2()[e];
      if (mu < 0.1 || mu > 1.0) issues.push_back("edge " + std::to_string(e) + ": mu outside [0.1, 1]");
      if (s2 < 0.1 * (1.0 - mu) - 1e-15 || s2 > 0.3 * (1.0 - mu) + 1e-15) {
        issues.push_back("edge " + std::to_string(e) + ": sigma2 outside [0.1, 0.3] x (1 - mu)");
      }
    }
    const double ratio = inst.deadline() / let_length(inst);
    const bool known = std::abs(ratio - 1.1) < 1e-9 || std::abs(ratio - 1.0) < 1e-9 ||
                       std::abs(ratio - 0.9) < 1e-9;
    if (!known) issues.push_back("deadline is not 0.9, 1.0 or 1.1 x the LET length");
    return issues;
  }
  if (doc.contains("num_devices")) {
    AssignmentInstance inst;
    try {
      inst = assignment_from_json(doc);
    } catch (const InfeasibleError& e) {
      issues.push_back(e.what());
      return issues;
    }
    if (first_fit_decreasing(inst).empty()) {
      issues.push_back("first-fit-decreasing finds no feasible packing");
    }
    return issues;
  }
  if (doc.contains("arch")) {
    const PriorModel model = prior_from_json(doc);
    for (double w : model.net.parameters()) {
      if (!std::isfinite(w)) {
        issues.push_back("prior model has non-finite parameters");
        break;
      }
    }
    return issues;
  }
  if (doc.contains("y") && doc.size() == 1) {
    const ToyInstance inst = toy_from_json(doc);
    if (inst.y < 0.0 || inst.y > std::numbers::pi / 2.0) issues.push_back("toy angle outside [0, pi/2]");
    return issues;
  }
  if (doc.contains("config")) {
    ExperimentConfig::from_json(doc.at("config"));
    return issues;
  }
  ExperimentConfig::from_json(doc);
  return issues;
}

}  // namespace surco
