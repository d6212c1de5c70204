#include "surropt/demand_model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include "surropt/errors.hpp"

namespace surropt {

void ZinbParams::validate() const {
  const bool ok = std::isfinite(pi) && std::isfinite(p) && pi >= 0.0 && pi <= 1.0 && r >= 1 &&
                  p > 0.0 && p <= 1.0;
  if (!ok) {
    std::ostringstream msg;
    msg << "invalid ZINB parameters (pi=" << pi << ", r=" << r << ", p=" << p
        << "): need 0 <= pi <= 1, r >= 1, 0 < p <= 1";
    throw ConfigError(msg.str());
  }
}

double ZinbParams::mean() const { return (1.0 - pi) * r * (1.0 - p) / p; }

double ZinbParams::variance() const {
  const double nb_mean = r * (1.0 - p) / p;
  const double nb_var = r * (1.0 - p) / (p * p);
  const double second_moment = (1.0 - pi) * (nb_var + nb_mean * nb_mean);
  const double m = mean();
  return second_moment - m * m;
}

ZinbSampler::ZinbSampler(const ZinbParams& params) : params_(params) {
  params_.validate();
  const double q = 1.0 - params_.p;
  // NB(0) = p^r by repeated multiplication; r is a small integer.
  double nb = 1.0;
  for (int i = 0; i < params_.r; ++i) nb *= params_.p;

  double cumulative = params_.pi + (1.0 - params_.pi) * nb;
  cdf_.push_back(std::min(cumulative, 1.0));
  for (int k = 1; cumulative < 1.0 - kTailCutoff; ++k) {
    nb *= q * static_cast<double>(k + params_.r - 1) / static_cast<double>(k);
    cumulative += (1.0 - params_.pi) * nb;
    cdf_.push_back(std::min(cumulative, 1.0));
    if (nb == 0.0) break;  // underflow; remaining mass is below double resolution
  }
}

int ZinbSampler::operator()(Rng& rng) const {
  const double u = uniform01(rng);
  const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
  if (it == cdf_.end()) return static_cast<int>(cdf_.size()) - 1;
  return static_cast<int>(it - cdf_.begin());
}

double ZinbSampler::pmf(int k) const {
  if (k < 0 || static_cast<std::size_t>(k) >= cdf_.size()) return 0.0;
  return k == 0 ? cdf_[0] : cdf_[k] - cdf_[k - 1];
}

int zinb_sample(const ZinbParams& params, Rng& rng) { return ZinbSampler(params)(rng); }

DemandModel::DemandModel(std::vector<HospitalDemandConfig> configs) : configs_(std::move(configs)) {
  if (configs_.empty()) throw ConfigError("demand model needs at least one hospital");
  for (std::size_t i = 0; i < configs_.size(); ++i) {
    if (configs_[i].hospital_id != static_cast<int>(i) + 1) {
      throw ConfigError("demand configs must have contiguous 1-based hospital ids; entry " +
                        std::to_string(i) + " has id " +
                        std::to_string(configs_[i].hospital_id));
    }
    samplers_.emplace_back(configs_[i].params);
  }
}

DemandScenario DemandModel::sample_day(Rng& rng) const {
  DemandScenario out;
  out.reserve(samplers_.size());
  for (const auto& s : samplers_) out.push_back(s(rng));
  return out;
}

std::vector<DemandScenario> DemandModel::sample_days(Rng& rng, std::size_t days) const {
  std::vector<DemandScenario> out;
  out.reserve(days);
  for (std::size_t d = 0; d < days; ++d) out.push_back(sample_day(rng));
  return out;
}

DemandScenario sample_day(std::span<const HospitalDemandConfig> configs, Rng& rng) {
  return DemandModel({configs.begin(), configs.end()}).sample_day(rng);
}

std::vector<HospitalDemandConfig> reference_demand_configs() {
  return {
      {1, {0.6, 4, 0.6}},
      {2, {0.6, 3, 0.57}},
      {3, {0.25, 15, 0.57}},
      {4, {0.25, 15, 0.48}},
  };
}

}  // namespace surropt
