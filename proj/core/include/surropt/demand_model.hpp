#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "surropt/rng.hpp"

namespace surropt {

/// Zero-inflated negative binomial parameters.
///
/// With probability `pi` the draw is a structural zero; otherwise it is a
/// negative binomial count. The negative binomial part counts failures before
/// the r-th success with per-trial success probability `p`, so its mean is
/// r(1-p)/p.
struct ZinbParams {
  double pi = 0.0;
  int r = 1;
  double p = 0.5;

  /// Throws ConfigError unless 0 <= pi <= 1, r >= 1, 0 < p <= 1.
  void validate() const;

  double mean() const;
  double variance() const;
};

/// Per-hospital demand configuration. Ids are 1-based and contiguous.
struct HospitalDemandConfig {
  int hospital_id = 1;
  ZinbParams params;
};

/// One sampled demand per hospital for a single day.
using DemandScenario = std::vector<int>;

/// Inverse-CDF sampler over a precomputed cumulative table.
///
/// The table is truncated once cumulative probability reaches 1 - 1e-12; a
/// uniform falling beyond it maps to the last tabulated value. Immutable after
/// construction, so one sampler may be shared across threads as long as each
/// thread owns its Rng.
class ZinbSampler {
 public:
  static constexpr double kTailCutoff = 1e-12;

  explicit ZinbSampler(const ZinbParams& params);

  int operator()(Rng& rng) const;

  const ZinbParams& params() const { return params_; }
  /// Probability mass of the zero-inflated distribution at k (0 beyond the table).
  double pmf(int k) const;
  std::size_t support_size() const { return cdf_.size(); }

 private:
  ZinbParams params_;
  std::vector<double> cdf_;
};

/// Draws one ZINB variate. Builds a throwaway sampler; prefer ZinbSampler in loops.
int zinb_sample(const ZinbParams& params, Rng& rng);

/// Network demand model: one sampler per hospital.
class DemandModel {
 public:
  explicit DemandModel(std::vector<HospitalDemandConfig> configs);

  /// One independent draw per hospital, in hospital order.
  DemandScenario sample_day(Rng& rng) const;

  /// `days` consecutive scenarios from a single stream.
  std::vector<DemandScenario> sample_days(Rng& rng, std::size_t days) const;

  std::size_t hospitals() const { return samplers_.size(); }
  const std::vector<HospitalDemandConfig>& configs() const { return configs_; }

 private:
  std::vector<HospitalDemandConfig> configs_;
  std::vector<ZinbSampler> samplers_;
};

DemandScenario sample_day(std::span<const HospitalDemandConfig> configs, Rng& rng);

/// The four hospital parameter sets of the reference case study.
std::vector<HospitalDemandConfig> reference_demand_configs();

}  // namespace surropt
