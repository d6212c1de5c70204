#include "config.hpp"

#include <cctype>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <set>
#include <sstream>

#include "surropt/errors.hpp"

namespace surropt::cli {

namespace {

std::string escape_pointer_token(const std::string& key) {
  std::string out;
  for (char c : key) {
    if (c == '~') out += "~0";
    else if (c == '/') out += "~1";
    else out += c;
  }
  return out;
}

// Walks a JSON text recording the line where each value starts. Assumes the
// text already parsed cleanly; malformed input simply yields fewer entries.
class LineScanner {
 public:
  explicit LineScanner(std::string_view text) : text_(text) {}

  std::map<std::string, int> run() {
    skip_ws();
    value("");
    return std::move(lines_);
  }

 private:
  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) {
      if (text_[pos_] == '\n') ++line_;
      ++pos_;
    }
  }

  std::string string() {
    std::string out;
    ++pos_;  // opening quote
    while (pos_ < text_.size() && text_[pos_] != '"') {
      if (text_[pos_] == '\\' && pos_ + 1 < text_.size()) ++pos_;
      out += text_[pos_++];
    }
    ++pos_;
    return out;
  }

  void value(const std::string& pointer) {
    if (pos_ >= text_.size()) return;
    lines_[pointer] = line_;
    const char c = text_[pos_];
    if (c == '{') {
      ++pos_;
      skip_ws();
      while (pos_ < text_.size() && text_[pos_] != '}') {
        if (text_[pos_] != '"') return;
        const std::string key = string();
        skip_ws();
        ++pos_;  // colon
        skip_ws();
        value(pointer + "/" + escape_pointer_token(key));
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == ',') {
          ++pos_;
          skip_ws();
        }
      }
      ++pos_;
    } else if (c == '[') {
      ++pos_;
      skip_ws();
      for (int k = 0; pos_ < text_.size() && text_[pos_] != ']'; ++k) {
        value(pointer + "/" + std::to_string(k));
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == ',') {
          ++pos_;
          skip_ws();
        }
      }
      ++pos_;
    } else if (c == '"') {
      string();
    } else {
      while (pos_ < text_.size() && !std::strchr(",]} \t\r\n", text_[pos_])) ++pos_;
    }
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  int line_ = 1;
  std::map<std::string, int> lines_;
};

// Reads typed fields out of one JSON object, reporting the offending field
// with its line, and rejects keys nobody asked for.
class ObjectReader {
 public:
  ObjectReader(const nlohmann::json& obj, std::string pointer, const std::map<std::string, int>& lines,
               const std::string& source)
      : obj_(obj), pointer_(std::move(pointer)), lines_(lines), source_(source) {
    if (!obj_.is_object()) fail(pointer_, "expected an object");
  }

  [[noreturn]] void fail(const std::string& pointer, const std::string& message) const {
    std::string where = source_;
    auto it = lines_.find(pointer);
    if (it == lines_.end()) it = lines_.find(pointer_);
    if (it != lines_.end()) where += ":" + std::to_string(it->second);
    const std::string field = pointer.empty() ? "(root)" : pointer.substr(1);
    throw ConfigError(where + ": field '" + field + "': " + message);
  }

  std::string child(const std::string& key) const { return pointer_ + "/" + escape_pointer_token(key); }

  bool has(const std::string& key) {
    seen_.insert(key);
    return obj_.contains(key);
  }

  const nlohmann::json& at(const std::string& key) {
    if (!has(key)) fail(child(key), "is required");
    return obj_.at(key);
  }

  template <class T>
  void read(const std::string& key, T& out, bool required = false) {
    if (!has(key)) {
      if (required) fail(child(key), "is required");
      return;
    }
    const auto& v = obj_.at(key);
    if constexpr (std::is_same_v<T, bool>) {
      if (!v.is_boolean()) fail(child(key), "expected true or false");
      out = v.get<bool>();
    } else if constexpr (std::is_integral_v<T>) {
      if (!v.is_number_integer()) fail(child(key), "expected an integer");
      if (std::is_unsigned_v<T> && v.is_number_integer() && !v.is_number_unsigned() && v.get<std::int64_t>() < 0)
        fail(child(key), "must be >= 0");
      out = v.get<T>();
    } else if constexpr (std::is_floating_point_v<T>) {
      if (!v.is_number()) fail(child(key), "expected a number");
      out = v.get<T>();
    } else if constexpr (std::is_same_v<T, std::string>) {
      if (!v.is_string()) fail(child(key), "expected a string");
      out = v.get<std::string>();
    } else {
      if (!v.is_array()) fail(child(key), "expected an array of numbers");
      out.clear();
      for (const auto& e : v) {
        if (!e.is_number()) fail(child(key), "expected an array of numbers");
        out.push_back(e.get<double>());
      }
    }
  }

  void reject_unknown() const {
    for (const auto& [key, _] : obj_.items())
      if (!seen_.count(key)) fail(child(key), "unknown key");
  }

  const std::string& pointer() const { return pointer_; }

 private:
  const nlohmann::json& obj_;
  std::string pointer_;
  const std::map<std::string, int>& lines_;
  const std::string& source_;
  std::set<std::string> seen_;
};

void read_learner(ObjectReader& r, LearnerSpec& spec) {
  r.read("name", spec.name, true);
  std::string kind;
  r.read("kind", kind, true);
  const auto k = parse_learner_kind(kind);
  if (!k) r.fail(r.child("kind"), "unknown learner kind '" + kind + "' (valid: ridge, gbdt, svr)");
  spec.kind = *k;
  if (r.has("loss")) {
    std::string loss;
    r.read("loss", loss);
    const auto lk = parse_loss_kind(loss);
    if (!lk) r.fail(r.child("loss"), "unknown loss '" + loss + "' (valid: " + valid_loss_kinds() + ")");
    spec.loss.kind = *lk;
  }
  r.read("huber_delta", spec.loss.delta);
  switch (spec.kind) {
    case LearnerKind::kRidge:
      r.read("lambdas", spec.ridge.lambdas);
      break;
    case LearnerKind::kGbdt:
      r.read("eta", spec.gbdt.eta);
      r.read("max_depth", spec.gbdt.max_depth);
      r.read("min_child_weight", spec.gbdt.min_child_weight);
      r.read("subsample", spec.gbdt.subsample);
      r.read("colsample_bytree", spec.gbdt.colsample_bytree);
      r.read("n_iterations", spec.gbdt.n_iterations);
      r.read("l1", spec.gbdt.l1);
      r.read("l2", spec.gbdt.l2);
      r.read("max_bins", spec.gbdt.max_bins);
      break;
    case LearnerKind::kSvr:
      r.read("c_grid", spec.svr.c_grid);
      r.read("gamma", spec.svr.gamma);
      r.read("epsilon", spec.svr.epsilon);
      r.read("tolerance", spec.svr.tolerance);
      break;
  }
  r.reject_unknown();
  try {
    spec.loss.validate();
    if (spec.kind == LearnerKind::kGbdt) spec.gbdt.validate();
    if (spec.kind == LearnerKind::kSvr) spec.svr.validate();
  } catch (const ConfigError& e) {
    r.fail(r.pointer(), e.what());
  }
}

}  // namespace

std::map<std::string, int> json_value_lines(std::string_view text) { return LineScanner(text).run(); }

ExperimentConfig parse_config(std::string_view text, const std::string& source) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    // Byte offset -> line number.
    int line = 1;
    for (std::size_t k = 0; k < std::min<std::size_t>(e.byte, text.size()); ++k)
      if (text[k] == '\n') ++line;
    throw ConfigError(source + ":" + std::to_string(line) + ": invalid JSON: " + e.what());
  }
  const auto lines = json_value_lines(text);
  ObjectReader root(doc, "", lines, source);

  int version = 0;
  root.read("schema_version", version, true);
  if (version != kConfigSchemaVersion)
    root.fail("/schema_version", "unsupported version " + std::to_string(version) + " (expected " +
                                     std::to_string(kConfigSchemaVersion) + ")");

  ExperimentConfig c;
  root.read("seed", c.seed);
  root.read("horizon_days", c.horizon_days);
  root.read("rollout_days", c.rollout_days);
  root.read("train_fraction", c.train_fraction);
  root.read("cv_folds", c.cv_folds);

  if (root.has("network")) {
    ObjectReader n(root.at("network"), "/network", lines, source);
    n.read("hospitals", c.shape.hospitals);
    n.read("max_age", c.shape.max_age);
    n.reject_unknown();
    try {
      c.shape.validate();
    } catch (const ConfigError& e) {
      n.fail("/network", e.what());
    }
  }

  const auto& demand = root.at("demand");
  if (!demand.is_array()) root.fail("/demand", "expected an array with one entry per hospital");
  c.demand.clear();
  for (std::size_t k = 0; k < demand.size(); ++k) {
    ObjectReader d(demand[k], "/demand/" + std::to_string(k), lines, source);
    HospitalDemandConfig h;
    h.hospital_id = static_cast<int>(k) + 1;
    d.read("hospital", h.hospital_id);
    d.read("pi", h.params.pi, true);
    d.read("r", h.params.r, true);
    d.read("p", h.params.p, true);
    d.reject_unknown();
    try {
      h.params.validate();
    } catch (const ConfigError& e) {
      d.fail(d.pointer(), e.what());
    }
    c.demand.push_back(h);
  }
  if (c.demand.size() != static_cast<std::size_t>(c.shape.hospitals))
    root.fail("/demand", "has " + std::to_string(c.demand.size()) + " entries but the network has " +
                             std::to_string(c.shape.hospitals) + " hospitals");

  if (root.has("costs")) {
    ObjectReader r(root.at("costs"), "/costs", lines, source);
    r.read("holding", c.costs.holding);
    r.read("ordering", c.costs.ordering);
    r.read("transship", c.costs.transship_unit);
    r.read("shortage", c.costs.shortage);
    r.read("outdate", c.costs.outdate);
    r.reject_unknown();
    try {
      c.costs.validate();
    } catch (const ConfigError& e) {
      r.fail("/costs", e.what());
    }
  }

  if (root.has("saa")) {
    ObjectReader r(root.at("saa"), "/saa", lines, source);
    r.read("scenario_count", c.saa.scenario_count);
    std::string rounding = "nearest";
    r.read("rounding", rounding);
    if (rounding == "nearest") c.saa.rounding = RoundingMode::kNearest;
    else if (rounding == "floor") c.saa.rounding = RoundingMode::kFloor;
    else r.fail("/saa/rounding", "unknown rounding '" + rounding + "' (valid: nearest, floor)");
    r.read("aggregate_scenarios", c.saa.aggregate_scenarios);
    r.reject_unknown();
  }

  if (root.has("issuing")) {
    std::string issuing;
    root.read("issuing", issuing);
    if (issuing == "fifo") c.issuing = IssuingPolicy::kFifo;
    else if (issuing == "lifo") c.issuing = IssuingPolicy::kLifo;
    else root.fail("/issuing", "unknown issuing policy '" + issuing + "' (valid: fifo, lifo)");
  }

  c.initial = InventoryState(c.shape);
  if (root.has("initial_inventory")) {
    const auto& inv = root.at("initial_inventory");
    if (!inv.is_array() || inv.size() != static_cast<std::size_t>(c.shape.hospitals))
      root.fail("/initial_inventory", "expected one array per hospital");
    for (int i = 0; i < c.shape.hospitals; ++i) {
      const auto& row = inv[static_cast<std::size_t>(i)];
      const std::string p = "/initial_inventory/" + std::to_string(i);
      if (!row.is_array() || row.size() != static_cast<std::size_t>(c.shape.max_age))
        root.fail(p, "expected " + std::to_string(c.shape.max_age) + " age classes");
      for (int m = 0; m < c.shape.max_age; ++m) {
        const auto& v = row[static_cast<std::size_t>(m)];
        if (!v.is_number_integer() || v.get<std::int64_t>() < 0)
          root.fail(p + "/" + std::to_string(m), "expected a nonnegative integer");
        c.initial.at(i, m) = v.get<Units>();
      }
    }
  }

  if (root.has("learners")) {
    const auto& learners = root.at("learners");
    if (!learners.is_array()) root.fail("/learners", "expected an array");
    c.learners.clear();
    for (std::size_t k = 0; k < learners.size(); ++k) {
      ObjectReader r(learners[k], "/learners/" + std::to_string(k), lines, source);
      LearnerSpec spec;
      read_learner(r, spec);
      c.learners.push_back(spec);
    }
  }
  root.reject_unknown();

  try {
    c.validate();
  } catch (const ConfigError& e) {
    throw ConfigError(source + ": " + e.what());
  }
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str(), path.string());
}

nlohmann::json config_to_json(const ExperimentConfig& c) {
  nlohmann::json j;
  j["schema_version"] = kConfigSchemaVersion;
  j["seed"] = c.seed;
  j["horizon_days"] = c.horizon_days;
  j["rollout_days"] = c.rollout_days;
  j["train_fraction"] = c.train_fraction;
  j["cv_folds"] = c.cv_folds;
  j["network"] = {{"hospitals", c.shape.hospitals}, {"max_age", c.shape.max_age}};
  for (const auto& d : c.demand)
    j["demand"].push_back({{"hospital", d.hospital_id}, {"pi", d.params.pi}, {"r", d.params.r}, {"p", d.params.p}});
  j["costs"] = {{"holding", c.costs.holding},
                {"ordering", c.costs.ordering},
                {"transship", c.costs.transship_unit},
                {"shortage", c.costs.shortage},
                {"outdate", c.costs.outdate}};
  j["saa"] = {{"scenario_count", c.saa.scenario_count},
              {"rounding", c.saa.rounding == RoundingMode::kNearest ? "nearest" : "floor"},
              {"aggregate_scenarios", c.saa.aggregate_scenarios}};
  j["issuing"] = c.issuing == IssuingPolicy::kFifo ? "fifo" : "lifo";
  nlohmann::json inv = nlohmann::json::array();
  for (int i = 0; i < c.shape.hospitals; ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (int m = 0; m < c.shape.max_age; ++m) row.push_back(c.initial.at(i, m));
    inv.push_back(row);
  }
  j["initial_inventory"] = inv;
  j["learners"] = nlohmann::json::array();
  for (const auto& l : c.learners) {
    nlohmann::json e = {{"name", l.name},
                        {"kind", std::string(to_string(l.kind))},
                        {"loss", std::string(to_string(l.loss.kind))},
                        {"huber_delta", l.loss.delta}};
    switch (l.kind) {
      case LearnerKind::kRidge:
        e["lambdas"] = l.ridge.lambdas;
        break;
      case LearnerKind::kGbdt:
        e.update({{"eta", l.gbdt.eta},
                  {"max_depth", l.gbdt.max_depth},
                  {"min_child_weight", l.gbdt.min_child_weight},
                  {"subsample", l.gbdt.subsample},
                  {"colsample_bytree", l.gbdt.colsample_bytree},
                  {"n_iterations", l.gbdt.n_iterations},
                  {"l1", l.gbdt.l1},
                  {"l2", l.gbdt.l2},
                  {"max_bins", l.gbdt.max_bins}});
        break;
      case LearnerKind::kSvr:
        e.update({{"c_grid", l.svr.c_grid},
                  {"gamma", l.svr.gamma},
                  {"epsilon", l.svr.epsilon},
                  {"tolerance", l.svr.tolerance}});
        break;
    }
    j["learners"].push_back(e);
  }
  return j;
}

std::string config_hash(const ExperimentConfig& config) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(fnv1a64(config_to_json(config).dump())));
  return buf;
}

}  // namespace surropt::cli
