#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "surropt/chain_sim.hpp"
#include "surropt/dataset.hpp"
#include "surropt/demand_model.hpp"
#include "surropt/gbdt.hpp"
#include "surropt/losses.hpp"
#include "surropt/ridge.hpp"
#include "surropt/surrogate.hpp"
#include "surropt/svr.hpp"
#include "surropt/two_stage.hpp"

namespace surropt {

/// One learner to train: kind, display name and the hyperparameters that
/// apply to that kind.
struct LearnerSpec {
  std::string name;
  LearnerKind kind = LearnerKind::kRidge;
  LossSpec loss;
  RidgeOptions ridge;
  GbdtHyper gbdt;
  SvrOptions svr;
};

/// {Ridge, SVR, GBDT-MSE, GBDT-MAE, GBDT-Huber}.
std::vector<LearnerSpec> default_learners();

struct ExperimentConfig {
  std::uint64_t seed = 0;
  std::size_t horizon_days = 500;
  std::size_t rollout_days = 200;
  double train_fraction = 0.9;
  NetworkShape shape;
  std::vector<HospitalDemandConfig> demand = reference_demand_configs();
  CostParams costs;
  SaaConfig saa;
  IssuingPolicy issuing = IssuingPolicy::kFifo;
  InventoryState initial{NetworkShape{}};
  std::size_t cv_folds = 10;
  std::vector<LearnerSpec> learners = default_learners();

  /// Throws ConfigError on any inconsistency.
  void validate() const;
};

/// Demand for the offline trajectory (one scenario per day).
std::vector<DemandScenario> training_demands(const ExperimentConfig& config);
/// Fresh demand for closed-loop evaluation, from a stream disjoint from training.
std::vector<DemandScenario> rollout_demands(const ExperimentConfig& config, std::size_t days);

/// Two-stage solver policy. Day t draws its SAA scenarios from
/// derive_seed(config.seed, scenario_stream, t).
Policy oracle_policy(const ExperimentConfig& config, Stream scenario_stream);

struct GeneratedData {
  std::vector<DemandScenario> demands;
  HorizonResult trajectory;
  Dataset dataset;
};

/// Dataset rows: start-of-day state as input, applied decision as label.
Dataset dataset_from_trajectory(const HorizonResult& trajectory);

/// Runs the oracle over config.horizon_days of training demand.
GeneratedData generate_dataset(const ExperimentConfig& config);

/// Clamps negatives to 0, rounds to nearest (ties to even) and reshapes.
/// Throws InputError on a size mismatch or non-finite values.
DecisionVector postprocess_prediction(const NetworkShape& shape, std::span<const double> raw);

/// predict -> postprocess. The model must outlive the policy.
Policy model_policy(const SurrogateModel& model, const NetworkShape& shape);

/// Returns labels[day] pushed through postprocess_prediction.
Policy label_replay_policy(std::vector<DecisionVector> labels);

/// Five-number summary of one (hospital, age) inventory slot.
struct InventorySummary {
  int hospital = 0;  // 0-based
  int age = 0;       // 0-based
  double min = 0.0;
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
  double max = 0.0;
};

/// Linear-interpolation quantile of sorted values, q in [0, 1].
double sorted_quantile(std::span<const double> sorted, double q);

struct RolloutReport {
  std::string policy;
  std::size_t days = 0;
  CostBreakdown total;
  CostBreakdown average;
  std::size_t violations = 0;
  std::size_t slots_checked = 0;
  double violation_rate = 0.0;
  std::vector<ViolationLog> violation_log;
  /// H * M entries, hospital-major, over the end-of-day states.
  std::vector<InventorySummary> inventory;
  bool any_negative_inventory = false;
};

RolloutReport summarize_rollout(const std::string& policy, const HorizonResult& trajectory);

/// Closed-loop run of `policy` from config.initial over `demands`.
HorizonResult rollout_trajectory(const ExperimentConfig& config, const Policy& policy,
                                 std::span<const DemandScenario> demands);

RolloutReport rollout(const ExperimentConfig& config, const SurrogateModel& model,
                      std::span<const DemandScenario> demands);

struct Comparison {
  /// One row per model in input order, then the oracle row.
  std::vector<RolloutReport> rows;
  std::vector<HorizonResult> trajectories;
};

/// Every policy sees the same demand draws. The oracle row uses the rollout
/// scenario stream.
Comparison compare_models(const ExperimentConfig& config, std::span<const SurrogateModel* const> models,
                          std::span<const DemandScenario> demands);

struct TrainDiagnostics {
  std::vector<double> ridge_cv_error;
  double ridge_lambda = 0.0;
  GbdtDiagnostics gbdt;
  std::vector<double> svr_selected_c;
  /// Per output RMSE on the training rows.
  std::vector<double> train_rmse;
};

/// Fits `spec` on `train` with folds and seeds taken from the config.
std::unique_ptr<SurrogateModel> train_learner(const ExperimentConfig& config, const LearnerSpec& spec,
                                              const Dataset& train, TrainDiagnostics* diagnostics = nullptr);

}  // namespace surropt
