#include "surco/surco.hpp"

#include <chrono>
#include <cmath>
#include <numeric>
#include <set>

#include "surco/errors.hpp"
#include "surco/random.hpp"

namespace surco {

namespace {

double l2_norm(std::span<const double> v) {
  double s = 0.0;
  for (double e : v) s += e * e;
  return std::sqrt(s);
}

double natural_value(const Objective& objective, double loss) {
  return objective.sense() == Sense::kMaximize ? -loss : loss;
}

TrainRecord run_zero_loop(const SolverOracle& oracle, const Objective& objective,
                          const ZeroConfig& cfg, std::vector<double> c, int instance_id) {
  using Clock = std::chrono::steady_clock;
  const auto start = Clock::now();
  const std::size_t solver_before = oracle.calls();
  const std::size_t objective_before = objective.calls();

  TrainRecord record;
  Adam adam(cfg.alpha);
  int since_improvement = 0;
  for (int step = 0; step < cfg.max_steps; ++step) {
    const BlackboxCache cache = solve_and_cache(oracle, c);
    const ObjectiveValue loss = objective.loss(cache.x);

    if (record.best_step < 0 || loss.value < record.best_loss) {
      record.best_loss = loss.value;
      record.best_f = natural_value(objective, loss.value);
      record.best_x = cache.x;
      record.best_c = c;
      record.best_step = step;
      since_improvement = 0;
    } else {
      ++since_improvement;
    }

    StepRecord row;
    row.step = step;
    row.instance_id = instance_id;
    row.f = natural_value(objective, loss.value);
    row.best_loss = record.best_loss;
    row.cost_norm = l2_norm(c);
    row.wall_ms = std::chrono::duration<double, std::milli>(Clock::now() - start).count();
    record.steps.push_back(row);

    if (since_improvement >= cfg.patience || step + 1 == cfg.max_steps) break;

    const std::vector<double> grad_c = backward(cache, loss.grad, cfg.blackbox);
    adam.step(c, grad_c);
  }
  record.solver_calls = oracle.calls() - solver_before;
  record.objective_calls = objective.calls() - objective_before;
  return record;
}

}  // namespace

void ZeroConfig::validate() const {
  if (!(alpha > 0.0)) throw ParameterError("learning rate must be positive");
  if (max_steps < 1) throw ParameterError("max_steps must be at least 1");
  if (patience < 1 || patience > max_steps) {
    throw ParameterError("patience must lie in [1, max_steps]");
  }
  if (!(init_lo <= init_hi)) throw ParameterError("random init range is empty");
  blackbox.validate();
}

TrainRecord surco_zero(const SolverOracle& oracle, const Objective& objective,
                       const ZeroConfig& cfg, std::span<const double> warm_start,
                       int instance_id) {
  cfg.validate();
  const std::size_t n = oracle.num_variables();
  if (objective.dimension() != n) {
    throw ParameterError("oracle and objective dimensions differ");
  }
  std::vector<double> c(n);
  if (cfg.init_mode == InitMode::kWarmStart) {
    if (warm_start.size() != n) throw ParameterError("warm start needs one cost per variable");
    c.assign(warm_start.begin(), warm_start.end());
  } else {
    Rng rng(cfg.seed);
    for (double& v : c) v = rng.uniform(cfg.init_lo, cfg.init_hi);
  }
  return run_zero_loop(oracle, objective, cfg, std::move(c), instance_id);
}

// ---------------------------------------------------------------------------
// Prior

PriorModel PriorModel::route(std::uint64_t seed) {
  return {Mlp({3, 32, 32, 1}, seed), {"route", {"mu", "sigma2", "deadline_over_let"}}, seed};
}

PriorModel PriorModel::assignment(std::uint64_t seed) {
  return {Mlp({3, 32, 32, 1}, seed),
          {"assignment", {"mem_over_capacity", "weight", "device_fraction"}},
          seed};
}

std::vector<double> PriorModel::predict(const FeatureMatrix& features) const {
  return net.forward(features);
}

FeatureMatrix route_edge_features(const RouteInstance& inst) {
  const double ratio = inst.deadline() / let_length(inst);
  FeatureMatrix f(static_cast<std::size_t>(inst.num_edges()), 3);
  for (std::size_t e = 0; e < f.rows; ++e) {
    f(e, 0) = inst.mu()[e];
    f(e, 1) = inst.sigma2()[e];
    f(e, 2) = ratio;
  }
  return f;
}

FeatureMatrix assignment_pair_features(const AssignmentInstance& inst) {
  FeatureMatrix f(static_cast<std::size_t>(inst.num_variables()), 3);
  for (int t = 0; t < inst.num_items; ++t) {
    for (int d = 0; d < inst.num_devices; ++d) {
      const auto row = static_cast<std::size_t>(inst.index(t, d));
      f(row, 0) = inst.mem[t] / inst.capacity;
      f(row, 1) = inst.weights[t];
      f(row, 2) = static_cast<double>(d) / inst.num_devices;
    }
  }
  return f;
}

nlohmann::json to_json(const PriorModel& model) {
  return nlohmann::json{
      {"version", PriorModel::kVersion},
      {"arch", {{"layers", model.net.layer_sizes()}, {"activation", "tanh"}, {"output", "linear"}}},
      {"weights", model.net.parameters()},
      {"feature_spec", {{"domain", model.features.domain}, {"features", model.features.names}}},
      {"seed", model.seed},
  };
}

PriorModel prior_from_json(const nlohmann::json& doc) {
  const std::set<std::string> allowed{"version", "arch", "weights", "feature_spec", "seed", "note"};
  if (!doc.is_object()) throw ParameterError("prior model document must be an object");
  for (const auto& [key, _] : doc.items()) {
    if (!allowed.count(key)) throw ParameterError("unknown key '" + key + "' in prior model");
  }
  try {
    if (doc.at("version").get<int>() != PriorModel::kVersion) {
      throw ParameterError("unsupported prior model version");
    }
    const auto& arch = doc.at("arch");
    if (arch.at("activation").get<std::string>() != "tanh") {
      throw ParameterError("only tanh prior networks are supported");
    }
    PriorModel model;
    model.seed = doc.at("seed").get<std::uint64_t>();
    model.net = Mlp(arch.at("layers").get<std::vector<int>>(), model.seed);
    model.net.set_parameters(doc.at("weights").get<std::vector<double>>());
    model.features.domain = doc.at("feature_spec").at("domain").get<std::string>();
    model.features.names = doc.at("feature_spec").at("features").get<std::vector<std::string>>();
    if (model.features.names.size() != model.net.input_dim()) {
      throw ParameterError("feature spec does not match the network input size");
    }
    return model;
  } catch (const nlohmann::json::exception& e) {
    throw ParameterError(std::string("malformed prior model: ") + e.what());
  }
}

PriorSample make_route_sample(const RouteInstance& inst) {
  return {std::make_shared<PathOracle>(inst),
          std::make_shared<Objective>(make_ontime_objective(inst)), route_edge_features(inst)};
}

PriorSample make_assignment_sample(const AssignmentInstance& inst) {
  return {std::make_shared<AssignmentOracle>(inst),
          std::make_shared<Objective>(make_assignment_objective(inst)),
          assignment_pair_features(inst)};
}

void PriorTrainConfig::validate() const {
  if (epochs < 1) throw ParameterError("epochs must be positive");
  if (!(lambda_reg >= 0.0)) throw ParameterError("lambda_reg must be non-negative");
  if (!(lr_theta > 0.0) || !(lr_costs > 0.0)) throw ParameterError("learning rates must be positive");
  if (batch_size < 0) throw ParameterError("batch size must be non-negative");
  blackbox.validate();
}

PriorTrainResult surco_prior_train(std::span<const PriorSample> samples, PriorModel init,
                                   const PriorTrainConfig& cfg) {
  cfg.validate();
  if (samples.empty()) throw ParameterError("prior training needs at least one instance");
  for (const auto& s : samples) {
    if (!s.oracle || !s.objective) throw ParameterError("prior sample is incomplete");
    if (s.features.rows != s.oracle->num_variables() ||
        s.features.cols != init.net.input_dim()) {
      throw ParameterError("prior sample features do not match the model/oracle");
    }
  }

  const bool direct = std::isinf(cfg.lambda_reg);
  const std::size_t n = samples.size();
  const std::size_t batch =
      cfg.batch_size == 0 ? n : std::min<std::size_t>(n, static_cast<std::size_t>(cfg.batch_size));

  PriorTrainResult result;
  result.model = std::move(init);
  Mlp& net = result.model.net;
  Adam theta_opt(cfg.lr_theta);
  Rng rng(derive_seed(cfg.seed, 0x5052494FULL));

  std::vector<std::vector<double>> costs(direct ? 0 : n);
  std::vector<Adam> cost_opts;
  if (!direct) {
    cost_opts.assign(n, Adam(cfg.lr_costs));
    for (std::size_t i = 0; i < n; ++i) costs[i] = net.forward(samples[i].features);
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  double best_loss = std::numeric_limits<double>::infinity();
  std::vector<double> best_params = net.parameters();

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    if (batch < n) {
      for (std::size_t i = n - 1; i > 0; --i) std::swap(order[i], order[rng.below(i + 1)]);
    }
    std::vector<double> grad_theta(net.num_parameters(), 0.0);
    double loss_sum = 0.0;
    double value_sum = 0.0;

    for (std::size_t k = 0; k < batch; ++k) {
      const std::size_t i = order[k];
      const PriorSample& s = samples[i];
      Mlp::Trace trace;
      const std::vector<double> predicted = net.forward(s.features, &trace);

      if (direct) {
        const BlackboxCache cache = solve_and_cache(*s.oracle, predicted);
        const ObjectiveValue loss = s.objective->loss(cache.x);
        loss_sum += loss.value;
        value_sum += natural_value(*s.objective, loss.value);
        const std::vector<double> grad_c = backward(cache, loss.grad, cfg.blackbox);
        const std::vector<double> g = net.backward(trace, grad_c);
        for (std::size_t p = 0; p < g.size(); ++p) grad_theta[p] += g[p];
        continue;
      }

      // Proximal step on c_i: gradient step on f, then shrink toward the
      // prediction (the prox operator of lambda * ||c - c^||_2).
      std::vector<double>& c = costs[i];
      const BlackboxCache cache = solve_and_cache(*s.oracle, c);
      const ObjectiveValue loss = s.objective->loss(cache.x);
      loss_sum += loss.value;
      value_sum += natural_value(*s.objective, loss.value);
      cost_opts[i].step(c, backward(cache, loss.grad, cfg.blackbox));

      std::vector<double> diff(c.size());
      for (std::size_t e = 0; e < c.size(); ++e) diff[e] = c[e] - predicted[e];
      const double dist = l2_norm(diff);
      const double threshold = cfg.lr_costs * cfg.lambda_reg;
      if (dist <= threshold) {
        c = predicted;
        continue;
      }
      const double keep = 1.0 - threshold / dist;
      for (std::size_t e = 0; e < c.size(); ++e) c[e] = predicted[e] + keep * diff[e];

      // d/dtheta of lambda * ||c - c^||: -lambda * unit(c - c^) through the net.
      std::vector<double> grad_pred(c.size());
      const double new_dist = keep * dist;
      for (std::size_t e = 0; e < c.size(); ++e) {
        grad_pred[e] = -cfg.lambda_reg * keep * diff[e] / new_dist;
      }
      const std::vector<double> g = net.backward(trace, grad_pred);
      for (std::size_t p = 0; p < g.size(); ++p) grad_theta[p] += g[p];
    }

    const double mean_loss = loss_sum / static_cast<double>(batch);
    result.epoch_mean_f.push_back(value_sum / static_cast<double>(batch));
    if (direct && mean_loss < best_loss) {
      best_loss = mean_loss;
      best_params = net.parameters();
      result.best_epoch = epoch;
    }
    for (double& g : grad_theta) g /= static_cast<double>(batch);
    theta_opt.step(net.parameters(), grad_theta);
  }

  if (direct) {
    net.set_parameters(std::move(best_params));
  } else {
    result.best_epoch = cfg.epochs - 1;
    result.instance_costs = std::move(costs);
  }
  return result;
}

std::vector<double> surco_prior_infer(const PriorModel& model, const SolverOracle& oracle,
                                      const FeatureMatrix& features) {
  if (features.rows != oracle.num_variables()) {
    throw ParameterError("prior features do not match the oracle dimension");
  }
  const std::vector<double> costs = model.predict(features);
  return oracle.solve(costs);
}

TrainRecord surco_hybrid(const PriorModel& model, const SolverOracle& oracle,
                         const Objective& objective, const FeatureMatrix& features,
                         const ZeroConfig& cfg, int instance_id) {
  if (features.rows != oracle.num_variables()) {
    throw ParameterError("prior features do not match the oracle dimension");
  }
  const std::vector<double> start = model.predict(features);
  ZeroConfig warm = cfg;
  warm.init_mode = InitMode::kWarmStart;
  return surco_zero(oracle, objective, warm, start, instance_id);
}

}  // namespace surco
