#pragma once

#include <cstdint>
#include <vector>

#include "surropt/dataset.hpp"
#include "surropt/losses.hpp"
#include "surropt/surrogate.hpp"

namespace surropt {

/// Boosting hyperparameters. The L1/L2 defaults are our own choice.
struct GbdtHyper {
  double eta = 0.01;
  int max_depth = 15;
  double min_child_weight = 5.0;
  double subsample = 0.7;
  double colsample_bytree = 1.0;
  int n_iterations = 1000;
  double l1 = 0.1;
  double l2 = 1.0;
  int max_bins = 64;
  std::uint64_t seed = 0;

  void validate() const;
};

struct GbdtNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  double value = 0.0;
  /// Hessian sum of the training rows that reached the node.
  double cover = 0.0;
};

struct GbdtTree {
  std::vector<GbdtNode> nodes;
  double predict(std::span<const double> x) const;
};

struct GbdtEnsemble {
  double base = 0.0;
  std::vector<GbdtTree> trees;
  double predict(std::span<const double> x) const;
};

/// Independent boosted ensemble per output.
class GbdtModel final : public SurrogateModel {
 public:
  GbdtModel(std::size_t inputs, GbdtHyper hyper, LossSpec loss, std::vector<GbdtEnsemble> ensembles);

  LearnerKind kind() const override { return LearnerKind::kGbdt; }
  std::size_t input_size() const override { return inputs_; }
  std::size_t output_size() const override { return ensembles_.size(); }
  std::vector<double> predict(std::span<const double> x) const override;
  nlohmann::json metadata() const override;
  void write_payload(BinaryWriter& out) const override;

  static std::unique_ptr<GbdtModel> read_payload(const nlohmann::json& meta, BinaryReader& in);

  const GbdtHyper& hyper() const { return hyper_; }
  const LossSpec& loss() const { return loss_; }
  const std::vector<GbdtEnsemble>& ensembles() const { return ensembles_; }

 private:
  std::size_t inputs_;
  GbdtHyper hyper_;
  LossSpec loss_;
  std::vector<GbdtEnsemble> ensembles_;
};

struct GbdtDiagnostics {
  /// Per output: mean training loss after the base score (entry 0) and after
  /// each executed round.
  std::vector<std::vector<double>> train_loss;
  /// Per output training RMSE of the final model.
  std::vector<double> train_rmse;
};

/// Per-feature histogram bin edges: a value x falls in the first bin whose
/// edge is >= x; values above every edge land in the last bin.
struct FeatureBins {
  std::vector<std::vector<double>> edges;
  static FeatureBins build(const Eigen::MatrixXd& x, int max_bins);
  int bin(std::size_t feature, double value) const;
};

/// Fits one ensemble per output. Each boosting round subsamples rows and
/// features, grows a depth-limited tree on histogram splits scored by the
/// L1/L2-regularized gradient gain, and sets each leaf to eta times the
/// loss-optimal constant (shrunk by H / (H + l2)).
///
/// Outputs train in parallel; per-output randomness derives from hyper.seed and
/// the output index, so results do not depend on thread scheduling.
GbdtModel fit_gbdt(const Dataset& data, const GbdtHyper& hyper, const LossSpec& loss,
                   GbdtDiagnostics* diagnostics = nullptr);

}  // namespace surropt
