#include "surropt/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "surropt/errors.hpp"
#include "surropt/parallel.hpp"

namespace surropt {

std::vector<LearnerSpec> default_learners() {
  std::vector<LearnerSpec> out;
  LearnerSpec ridge;
  ridge.name = "Ridge";
  ridge.kind = LearnerKind::kRidge;
  out.push_back(ridge);
  LearnerSpec svr;
  svr.name = "SVR";
  svr.kind = LearnerKind::kSvr;
  out.push_back(svr);
  for (auto [name, loss] : {std::pair{"GBDT-MSE", LossKind::kMse}, std::pair{"GBDT-MAE", LossKind::kMae},
                            std::pair{"GBDT-Huber", LossKind::kHuber}}) {
    LearnerSpec g;
    g.name = name;
    g.kind = LearnerKind::kGbdt;
    g.loss.kind = loss;
    out.push_back(g);
  }
  return out;
}

void ExperimentConfig::validate() const {
  shape.validate();
  if (horizon_days < 1) throw ConfigError("horizon_days must be >= 1");
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) throw ConfigError("train_fraction must lie in (0, 1)");
  if (demand.size() != static_cast<std::size_t>(shape.hospitals))
    throw ConfigError("demand must list one entry per hospital");
  for (std::size_t i = 0; i < demand.size(); ++i) {
    if (demand[i].hospital_id != static_cast<int>(i) + 1)
      throw ConfigError("demand hospital ids must be 1.." + std::to_string(demand.size()) + " in order");
    demand[i].params.validate();
  }
  costs.validate();
  saa.validate();
  if (!(initial.shape() == shape)) throw ConfigError("initial_inventory does not match the network shape");
  if (!initial.nonnegative()) throw ConfigError("initial_inventory must be nonnegative");
  if (cv_folds < 2) throw ConfigError("cv_folds must be >= 2");
  std::set<std::string> names;
  for (const auto& l : learners) {
    if (l.name.empty()) throw ConfigError("every learner needs a name");
    if (l.name == "Oracle") throw ConfigError("learner name 'Oracle' is reserved");
    if (!names.insert(l.name).second) throw ConfigError("duplicate learner name '" + l.name + "'");
    l.loss.validate();
    if (l.kind == LearnerKind::kGbdt) l.gbdt.validate();
    if (l.kind == LearnerKind::kSvr) l.svr.validate();
  }
}

std::vector<DemandScenario> training_demands(const ExperimentConfig& config) {
  Rng rng = make_rng(derive_seed(config.seed, Stream::kTrainingDemand));
  return DemandModel(config.demand).sample_days(rng, config.horizon_days);
}

std::vector<DemandScenario> rollout_demands(const ExperimentConfig& config, std::size_t days) {
  Rng rng = make_rng(derive_seed(config.seed, Stream::kRolloutDemand));
  return DemandModel(config.demand).sample_days(rng, days);
}

Policy oracle_policy(const ExperimentConfig& config, Stream scenario_stream) {
  auto model = std::make_shared<DemandModel>(config.demand);
  return [model, costs = config.costs, saa = config.saa, seed = config.seed, scenario_stream](
             std::size_t day, const InventoryState& state) {
    Rng rng = make_rng(derive_seed(seed, scenario_stream, day));
    return solve_stage_one(state, costs, *model, saa, rng).decision;
  };
}

Dataset dataset_from_trajectory(const HorizonResult& trajectory) {
  const auto days = static_cast<Eigen::Index>(trajectory.days());
  if (trajectory.states.empty()) throw InputError("empty trajectory");
  const auto& shape = trajectory.states.front().shape();
  Dataset d;
  d.x.resize(days, static_cast<Eigen::Index>(shape.input_size()));
  d.y.resize(days, static_cast<Eigen::Index>(shape.output_size()));
  for (Eigen::Index t = 0; t < days; ++t) {
    const auto in = trajectory.states[static_cast<std::size_t>(t)].to_features();
    const auto out = trajectory.applied[static_cast<std::size_t>(t)].to_features();
    d.x.row(t) = Eigen::Map<const Eigen::RowVectorXd>(in.data(), static_cast<Eigen::Index>(in.size()));
    d.y.row(t) = Eigen::Map<const Eigen::RowVectorXd>(out.data(), static_cast<Eigen::Index>(out.size()));
    d.day.push_back(t);
  }
  return d;
}

GeneratedData generate_dataset(const ExperimentConfig& config) {
  config.validate();
  GeneratedData out;
  out.demands = training_demands(config);
  out.trajectory = run_horizon(config.initial, oracle_policy(config, Stream::kTrainingScenarios), out.demands,
                               config.costs, config.issuing);
  if (!out.trajectory.violations.empty()) throw InternalError("oracle decisions violated slot stock");
  out.dataset = dataset_from_trajectory(out.trajectory);
  return out;
}

DecisionVector postprocess_prediction(const NetworkShape& shape, std::span<const double> raw) {
  if (raw.size() != shape.output_size()) {
    throw InputError("prediction has " + std::to_string(raw.size()) + " entries, expected " +
                     std::to_string(shape.output_size()));
  }
  // Clamp well below the Units range so absurd predictions cannot overflow.
  constexpr double kCap = 1e9;
  std::vector<Units> flat(raw.size());
  for (std::size_t k = 0; k < raw.size(); ++k) {
    if (!std::isfinite(raw[k])) throw InputError("prediction contains a non-finite value");
    flat[k] = static_cast<Units>(std::nearbyint(std::clamp(raw[k], 0.0, kCap)));
  }
  return DecisionVector::from_flat(shape, flat);
}

Policy model_policy(const SurrogateModel& model, const NetworkShape& shape) {
  if (model.input_size() != shape.input_size() || model.output_size() != shape.output_size()) {
    throw InputError("model schema " + std::to_string(model.input_size()) + "->" +
                     std::to_string(model.output_size()) + " does not match the network (" +
                     std::to_string(shape.input_size()) + "->" + std::to_string(shape.output_size()) + ")");
  }
  return [&model, shape](std::size_t, const InventoryState& state) {
    return postprocess_prediction(shape, model.predict(state.to_features()));
  };
}

Policy label_replay_policy(std::vector<DecisionVector> labels) {
  return [labels = std::move(labels)](std::size_t day, const InventoryState&) {
    if (day >= labels.size()) throw InputError("label replay ran past its labels");
    const auto raw = labels[day].to_features();
    return postprocess_prediction(labels[day].shape(), raw);
  };
}

double sorted_quantile(std::span<const double> sorted, double q) {
  if (sorted.empty()) return 0.0;
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

RolloutReport summarize_rollout(const std::string& policy, const HorizonResult& trajectory) {
  RolloutReport r;
  r.policy = policy;
  r.days = trajectory.days();
  for (const auto& c : trajectory.costs) r.total += c;
  r.total.recompute_total();
  if (r.days > 0) {
    const double n = static_cast<double>(r.days);
    r.average = {r.total.holding / n, r.total.transshipment / n, r.total.outdate / n,
                 r.total.ordering / n, r.total.shortage / n, 0.0};
    r.average.recompute_total();
  }
  r.violations = trajectory.violations.size();
  r.slots_checked = trajectory.slots_checked;
  r.violation_rate = r.slots_checked > 0 ? static_cast<double>(r.violations) / static_cast<double>(r.slots_checked) : 0.0;
  r.violation_log = trajectory.violations;

  if (trajectory.states.empty()) return r;
  const auto& shape = trajectory.states.front().shape();
  std::vector<double> values;
  for (int i = 0; i < shape.hospitals; ++i) {
    for (int m = 0; m < shape.max_age; ++m) {
      values.clear();
      for (std::size_t t = 1; t < trajectory.states.size(); ++t) {
        const auto u = trajectory.states[t].at(i, m);
        if (u < 0) r.any_negative_inventory = true;
        values.push_back(static_cast<double>(u));
      }
      std::sort(values.begin(), values.end());
      InventorySummary s;
      s.hospital = i;
      s.age = m;
      if (!values.empty()) {
        s.min = values.front();
        s.max = values.back();
        s.q1 = sorted_quantile(values, 0.25);
        s.median = sorted_quantile(values, 0.5);
        s.q3 = sorted_quantile(values, 0.75);
      }
      r.inventory.push_back(s);
    }
  }
  return r;
}

HorizonResult rollout_trajectory(const ExperimentConfig& config, const Policy& policy,
                                 std::span<const DemandScenario> demands) {
  return run_horizon(config.initial, policy, demands, config.costs, config.issuing);
}

RolloutReport rollout(const ExperimentConfig& config, const SurrogateModel& model,
                      std::span<const DemandScenario> demands) {
  const auto name = model.name().empty() ? std::string(to_string(model.kind())) : model.name();
  return summarize_rollout(name, rollout_trajectory(config, model_policy(model, config.shape), demands));
}

Comparison compare_models(const ExperimentConfig& config, std::span<const SurrogateModel* const> models,
                          std::span<const DemandScenario> demands) {
  std::vector<Policy> policies;
  std::vector<std::string> names;
  for (const auto* m : models) {
    policies.push_back(model_policy(*m, config.shape));
    names.push_back(m->name().empty() ? std::string(to_string(m->kind())) : m->name());
  }
  policies.push_back(oracle_policy(config, Stream::kRolloutScenarios));
  names.emplace_back("Oracle");

  Comparison out;
  out.trajectories.resize(policies.size());
  parallel_for(policies.size(), [&](std::size_t k) {
    out.trajectories[k] = rollout_trajectory(config, policies[k], demands);
  });
  for (std::size_t k = 0; k < policies.size(); ++k) out.rows.push_back(summarize_rollout(names[k], out.trajectories[k]));
  return out;
}

namespace {

std::vector<double> training_rmse(const SurrogateModel& model, const Dataset& data) {
  std::vector<double> sse(data.outputs(), 0.0);
  std::vector<double> row(data.inputs());
  for (std::size_t r = 0; r < data.rows(); ++r) {
    for (std::size_t c = 0; c < data.inputs(); ++c) row[c] = data.x(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
    const auto pred = model.predict(row);
    for (std::size_t o = 0; o < data.outputs(); ++o) {
      const double e = pred[o] - data.y(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(o));
      sse[o] += e * e;
    }
  }
  for (auto& v : sse) v = std::sqrt(v / static_cast<double>(std::max<std::size_t>(1, data.rows())));
  return sse;
}

}  // namespace

std::unique_ptr<SurrogateModel> train_learner(const ExperimentConfig& config, const LearnerSpec& spec,
                                              const Dataset& train, TrainDiagnostics* diagnostics) {
  const std::uint64_t fold_seed = derive_seed(config.seed, Stream::kFolds);
  std::unique_ptr<SurrogateModel> model;
  switch (spec.kind) {
    case LearnerKind::kRidge: {
      RidgeOptions opt = spec.ridge;
      opt.folds = config.cv_folds;
      opt.seed = fold_seed;
      auto fit = fit_ridge(train, opt);
      if (diagnostics) {
        diagnostics->ridge_cv_error = fit.cv.cv_error;
        diagnostics->ridge_lambda = fit.cv.selected_lambda;
      }
      model = std::make_unique<RidgeModel>(std::move(fit.model));
      break;
    }
    case LearnerKind::kGbdt: {
      GbdtHyper h = spec.gbdt;
      h.seed = derive_seed(config.seed, Stream::kGbdt, fnv1a64(spec.name));
      model = std::make_unique<GbdtModel>(fit_gbdt(train, h, spec.loss, diagnostics ? &diagnostics->gbdt : nullptr));
      break;
    }
    case LearnerKind::kSvr: {
      SvrOptions opt = spec.svr;
      opt.folds = config.cv_folds;
      opt.seed = fold_seed;
      auto fit = fit_svr(train, opt);
      if (diagnostics) diagnostics->svr_selected_c = fit.cv.selected_c;
      model = std::move(fit.model);
      break;
    }
  }
  model->set_name(spec.name);
  if (diagnostics) diagnostics->train_rmse = training_rmse(*model, train);
  return model;
}

}  // namespace surropt
