#pragma once

#include <filesystem>
#include <iosfwd>
#include <nlohmann/json.hpp>
#include <string>
#include <vector>

#include "surropt/pipeline.hpp"

namespace surropt::cli {

/// Policy, five cost columns, Total, Violations, ViolationRate, Days (averages per day).
void write_comparison_csv(std::ostream& out, const std::vector<RolloutReport>& rows);
/// Fixed-width table with two decimals.
void write_comparison_text(std::ostream& out, const std::vector<RolloutReport>& rows);
/// One row per logged violation; hospital and age are 1-based.
void write_violation_csv(std::ostream& out, const std::vector<RolloutReport>& rows);
/// H * M rows per policy; hospital and age are 1-based.
void write_inventory_csv(std::ostream& out, const std::vector<RolloutReport>& rows);
nlohmann::json report_json(const std::vector<RolloutReport>& rows);

void write_demand_csv(std::ostream& out, const std::vector<DemandScenario>& demands);

/// Tracks files written into one output directory and emits manifest.json.
class RunManifest {
 public:
  RunManifest(std::filesystem::path dir, std::string command, const ExperimentConfig& config);

  /// Writes `content` to dir/name and records it.
  void write_file(const std::string& name, const std::string& content);
  /// Records a file produced by other means.
  void add_file(const std::string& name);
  void finish();

  const std::filesystem::path& dir() const { return dir_; }

 private:
  std::filesystem::path dir_;
  nlohmann::json doc_;
  std::vector<std::string> files_;
};

std::string utc_timestamp();

}  // namespace surropt::cli
