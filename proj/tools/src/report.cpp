#include "report.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "config.hpp"
#include "surropt/csv.hpp"
#include "surropt/errors.hpp"

namespace surropt::cli {

namespace {

std::vector<double> cost_columns(const CostBreakdown& c) {
  return {c.holding, c.transshipment, c.outdate, c.ordering, c.shortage, c.total};
}

nlohmann::json costs_json(const CostBreakdown& c) {
  return {{"holding", c.holding},   {"transshipment", c.transshipment}, {"outdate", c.outdate},
          {"ordering", c.ordering}, {"shortage", c.shortage},           {"total", c.total}};
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read back " + path.string());
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

void write_comparison_csv(std::ostream& out, const std::vector<RolloutReport>& rows) {
  const std::vector<std::string> header{"policy",   "holding",  "transshipment", "outdate",        "ordering",
                                        "shortage", "total",    "violations",    "violation_rate", "days"};
  write_csv_row(out, header);
  for (const auto& r : rows) {
    std::vector<std::string> f{r.policy};
    for (double v : cost_columns(r.average)) f.push_back(format_double(v));
    f.push_back(std::to_string(r.violations));
    f.push_back(format_double(r.violation_rate));
    f.push_back(std::to_string(r.days));
    write_csv_row(out, f);
  }
}

void write_comparison_text(std::ostream& out, const std::vector<RolloutReport>& rows) {
  std::size_t name_width = 6;
  for (const auto& r : rows) name_width = std::max(name_width, r.policy.size());
  out << std::left << std::setw(static_cast<int>(name_width)) << "Policy" << std::right;
  for (const char* h : {"Holding", "Transshipment", "Outdate", "Ordering", "Shortage", "Total", "Violations"})
    out << "  " << std::setw(13) << h;
  out << '\n';
  for (const auto& r : rows) {
    out << std::left << std::setw(static_cast<int>(name_width)) << r.policy << std::right << std::fixed
        << std::setprecision(2);
    for (double v : cost_columns(r.average)) out << "  " << std::setw(13) << v;
    out << "  " << std::setw(13) << r.violations << '\n';
  }
  out << std::defaultfloat;
}

void write_violation_csv(std::ostream& out, const std::vector<RolloutReport>& rows) {
  write_csv_row(out, std::vector<std::string>{"policy", "day", "hospital", "age", "requested", "available"});
  for (const auto& r : rows) {
    for (const auto& v : r.violation_log) {
      write_csv_row(out, std::vector<std::string>{r.policy, std::to_string(v.day), std::to_string(v.hospital + 1),
                                                  std::to_string(v.age + 1), std::to_string(v.requested),
                                                  std::to_string(v.available)});
    }
  }
}

void write_inventory_csv(std::ostream& out, const std::vector<RolloutReport>& rows) {
  write_csv_row(out, std::vector<std::string>{"policy", "hospital", "age", "min", "q1", "median", "q3", "max"});
  for (const auto& r : rows) {
    for (const auto& s : r.inventory) {
      write_csv_row(out, std::vector<std::string>{r.policy, std::to_string(s.hospital + 1), std::to_string(s.age + 1),
                                                  format_double(s.min), format_double(s.q1), format_double(s.median),
                                                  format_double(s.q3), format_double(s.max)});
    }
  }
}

nlohmann::json report_json(const std::vector<RolloutReport>& rows) {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& r : rows) {
    j.push_back({{"policy", r.policy},
                 {"days", r.days},
                 {"average", costs_json(r.average)},
                 {"total", costs_json(r.total)},
                 {"violations", r.violations},
                 {"slots_checked", r.slots_checked},
                 {"violation_rate", r.violation_rate},
                 {"negative_inventory", r.any_negative_inventory}});
  }
  return j;
}

void write_demand_csv(std::ostream& out, const std::vector<DemandScenario>& demands) {
  std::vector<std::string> header{"day"};
  const std::size_t h = demands.empty() ? 0 : demands.front().size();
  for (std::size_t i = 0; i < h; ++i) header.push_back("demand_" + std::to_string(i + 1));
  write_csv_row(out, header);
  for (std::size_t t = 0; t < demands.size(); ++t) {
    std::vector<std::string> row{std::to_string(t)};
    for (int d : demands[t]) row.push_back(std::to_string(d));
    write_csv_row(out, row);
  }
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

RunManifest::RunManifest(std::filesystem::path dir, std::string command, const ExperimentConfig& config)
    : dir_(std::move(dir)) {
  std::error_code ec;
  std::filesystem::create_directories(dir_, ec);
  if (ec) throw IoError("cannot create output directory " + dir_.string() + ": " + ec.message());
  doc_ = {{"tool", "surropt"},
          {"command", std::move(command)},
          {"config_hash", config_hash(config)},
          {"seed", config.seed},
          {"versions",
           {{"surropt", "1.0.0"},
            {"config_schema", kConfigSchemaVersion},
            {"model_format", kModelFormatVersion}}},
          {"started_at", utc_timestamp()}};
}

void RunManifest::write_file(const std::string& name, const std::string& content) {
  const auto path = dir_ / name;
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << content;
  out.flush();
  if (!out) throw IoError("failed to write " + path.string());
  files_.push_back(name);
}

void RunManifest::add_file(const std::string& name) { files_.push_back(name); }

void RunManifest::finish() {
  nlohmann::json files = nlohmann::json::array();
  for (const auto& name : files_) {
    const auto content = read_file(dir_ / name);
    char hash[17];
    std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(fnv1a64(content)));
    files.push_back({{"path", name}, {"bytes", content.size()}, {"fnv1a64", hash}});
  }
  doc_["files"] = files;
  doc_["finished_at"] = utc_timestamp();
  const auto path = dir_ / "manifest.json";
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << doc_.dump(2) << '\n';
  if (!out) throw IoError("failed to write " + path.string());
}

}  // namespace surropt::cli
