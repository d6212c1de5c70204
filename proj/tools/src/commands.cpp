#include "commands.hpp"

#include <CLI11.hpp>
#include <cctype>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

#include "config.hpp"
#include "report.hpp"
#include "surropt/csv.hpp"
#include "surropt/errors.hpp"

namespace surropt::cli {

namespace {

struct Options {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> days;
  std::string out_dir;
  std::string dataset;
  std::vector<std::string> models;
  std::vector<std::string> learners;
};

std::string slug(const std::string& name) {
  std::string s;
  for (char c : name) s += std::isalnum(static_cast<unsigned char>(c)) ? static_cast<char>(std::tolower(c)) : '-';
  return s;
}

ExperimentConfig effective_config(const Options& o) {
  ExperimentConfig c = load_config(o.config);
  if (o.seed) c.seed = *o.seed;
  return c;
}

int cmd_generate(const Options& o, std::ostream& out) {
  ExperimentConfig c = effective_config(o);
  if (o.days) c.horizon_days = *o.days;
  c.validate();
  const auto data = generate_dataset(c);

  RunManifest manifest(o.out_dir, "generate", c);
  std::ostringstream csv, demand;
  write_trajectory_csv(csv, data.trajectory);
  write_demand_csv(demand, data.demands);
  manifest.write_file("dataset.csv", csv.str());
  manifest.write_file("demand.csv", demand.str());
  manifest.write_file("effective_config.json", config_to_json(c).dump(2) + "\n");
  manifest.finish();
  out << "wrote " << data.dataset.rows() << " rows to " << (manifest.dir() / "dataset.csv").string() << '\n';
  return kExitOk;
}

Dataset load_dataset(const std::string& path, const NetworkShape& shape) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read dataset " + path);
  return read_dataset_csv(in, shape);
}

nlohmann::json train_diagnostics_json(const LearnerSpec& spec, const TrainDiagnostics& d,
                                      const std::vector<double>& test_rmse, std::size_t train_rows,
                                      std::size_t test_rows) {
  nlohmann::json j = {{"learner", spec.name},
                      {"kind", std::string(to_string(spec.kind))},
                      {"loss", std::string(to_string(spec.loss.kind))},
                      {"train_rows", train_rows},
                      {"test_rows", test_rows},
                      {"train_rmse", d.train_rmse},
                      {"test_rmse", test_rmse}};
  switch (spec.kind) {
    case LearnerKind::kRidge:
      j["lambda"] = d.ridge_lambda;
      j["lambdas"] = spec.ridge.lambdas;
      j["cv_mse"] = d.ridge_cv_error;
      break;
    case LearnerKind::kGbdt: {
      // Final training loss under the model's own loss, per output.
      std::vector<double> final_loss;
      for (const auto& trace : d.gbdt.train_loss) final_loss.push_back(trace.empty() ? 0.0 : trace.back());
      j["train_loss"] = final_loss;
      break;
    }
    case LearnerKind::kSvr:
      j["selected_c"] = d.svr_selected_c;
      break;
  }
  return j;
}

int cmd_train(const Options& o, std::ostream& out) {
  const ExperimentConfig c = effective_config(o);
  const Dataset all = load_dataset(o.dataset, c.shape);
  const std::size_t n_train = training_rows(all.rows(), c.train_fraction);
  const Dataset train = all.head(n_train);
  const Dataset test = all.tail_from(n_train);
  train.validate_decision_labels();

  std::vector<const LearnerSpec*> selected;
  for (const auto& name : o.learners) {
    const LearnerSpec* hit = nullptr;
    for (const auto& l : c.learners)
      if (l.name == name) hit = &l;
    if (!hit) throw ConfigError("--learner '" + name + "' is not defined in the config");
    selected.push_back(hit);
  }
  if (selected.empty())
    for (const auto& l : c.learners) selected.push_back(&l);
  if (selected.empty()) throw ConfigError("the config defines no learners");

  RunManifest manifest(o.out_dir, "train", c);
  for (const auto* spec : selected) {
    TrainDiagnostics diag;
    const auto model = train_learner(c, *spec, train, &diag);
    const std::string base = slug(spec->name);
    save_model(*model, manifest.dir() / (base + ".model"));
    manifest.add_file(base + ".model");

    // Held-out predictions, one row per test day.
    std::ostringstream pred;
    std::vector<std::string> header{"day"};
    for (auto& h : decision_column_names(c.shape)) header.push_back(h);
    write_csv_row(pred, header);
    std::vector<double> sse(test.outputs(), 0.0), x(test.inputs());
    for (std::size_t r = 0; r < test.rows(); ++r) {
      for (std::size_t k = 0; k < x.size(); ++k) x[k] = test.x(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(k));
      const auto y = model->predict(x);
      std::vector<std::string> row{std::to_string(test.day[r])};
      for (std::size_t k = 0; k < y.size(); ++k) {
        row.push_back(format_double(y[k]));
        const double e = y[k] - test.y(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(k));
        sse[k] += e * e;
      }
      write_csv_row(pred, row);
    }
    for (auto& v : sse) v = test.rows() ? std::sqrt(v / static_cast<double>(test.rows())) : 0.0;
    manifest.write_file(base + ".predictions.csv", pred.str());
    manifest.write_file(base + ".diagnostics.json",
                        train_diagnostics_json(*spec, diag, sse, train.rows(), test.rows()).dump(2) + "\n");
    out << "trained " << spec->name << " -> " << (manifest.dir() / (base + ".model")).string() << '\n';
  }
  manifest.finish();
  return kExitOk;
}

int cmd_compare(const Options& o, const std::string& command, std::ostream& out) {
  ExperimentConfig c = effective_config(o);
  if (o.days) c.rollout_days = *o.days;
  if (c.rollout_days < 1) throw ConfigError("rollout_days must be >= 1");
  std::vector<std::unique_ptr<SurrogateModel>> models;
  std::vector<const SurrogateModel*> ptrs;
  std::map<std::string, int> seen;
  for (const auto& path : o.models) {
    auto m = load_model(std::filesystem::path(path));
    if (m->name().empty()) m->set_name(std::filesystem::path(path).stem().string());
    if (m->name() == "Oracle" || seen[m->name()]++ > 0) m->set_name(m->name() + "#" + std::to_string(seen[m->name()]));
    ptrs.push_back(m.get());
    models.push_back(std::move(m));
  }
  const auto demands = rollout_demands(c, c.rollout_days);
  const Comparison cmp = compare_models(c, ptrs, demands);

  RunManifest manifest(o.out_dir, command, c);
  std::ostringstream csv, text, viol, inv, dem;
  write_comparison_csv(csv, cmp.rows);
  write_comparison_text(text, cmp.rows);
  write_violation_csv(viol, cmp.rows);
  write_inventory_csv(inv, cmp.rows);
  write_demand_csv(dem, demands);
  nlohmann::json report = {{"config_hash", config_hash(c)},
                           {"seed", c.seed},
                           {"days", c.rollout_days},
                           {"demand_fnv1a64", fnv1a64(dem.str())},
                           {"policies", report_json(cmp.rows)}};
  manifest.write_file("comparison.csv", csv.str());
  manifest.write_file("comparison.txt", text.str());
  manifest.write_file("violations.csv", viol.str());
  manifest.write_file("inventory.csv", inv.str());
  manifest.write_file("rollout_demand.csv", dem.str());
  manifest.write_file("report.json", report.dump(2) + "\n");
  manifest.finish();
  out << text.str();
  return kExitOk;
}

int cmd_selftest(std::ostream& out) {
  int failures = 0;
  auto check = [&](const char* what, bool ok) {
    out << (ok ? "PASS " : "FAIL ") << what << '\n';
    failures += ok ? 0 : 1;
  };

  // One hospital, two age classes, demand 0 or 2: ordering 2 costs 2.1.
  const NetworkShape tiny{1, 2};
  CostParams costs;
  costs.holding = 0.1;
  costs.ordering = 1.0;
  costs.shortage = 10.0;
  costs.outdate = 0.0;
  costs.transship_unit = 0.0;
  const std::vector<DemandScenario> scenarios{{0}, {2}};
  const auto sol = solve_stage_one(InventoryState(tiny), costs, scenarios);
  check("newsvendor order", sol.decision.order(0) == 2);
  check("newsvendor cost", std::abs(sol.expected_cost - 2.1) < 1e-9);

  ExperimentConfig c;
  c.horizon_days = 60;
  c.seed = 11;
  c.saa.scenario_count = 10;
  const auto data = generate_dataset(c);
  bool conserved = true;
  for (std::size_t t = 0; t < data.trajectory.days(); ++t) {
    const auto& f = data.trajectory.flows[t];
    for (int i = 0; i < c.shape.hospitals; ++i) {
      const Units before = data.trajectory.states[t].hospital_total(i);
      const Units after = data.trajectory.states[t + 1].hospital_total(i);
      conserved = conserved && before + f.ordered[i] + f.shipped_in[i] - f.shipped_out[i] - f.issued[i] -
                                         f.outdated[i] == after;
    }
  }
  check("unit conservation", conserved);
  check("oracle feasibility", data.trajectory.violations.empty());

  const Dataset train = data.dataset.head(training_rows(data.dataset.rows(), c.train_fraction));
  const auto ridge = train_learner(c, c.learners.front(), train);
  std::stringstream buf;
  save_model(*ridge, buf);
  const auto back = load_model(buf);
  const auto x = data.trajectory.states.back().to_features();
  check("model round trip", back->predict(x) == ridge->predict(x));
  return failures == 0 ? kExitOk : kExitInternal;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Surrogate decision models for a perishable blood transshipment network"};
  app.require_subcommand(1);
  Options o;

  auto add_common = [&](CLI::App* sub, bool needs_out) {
    sub->add_option("--config", o.config, "Experiment config (JSON)")->required()->check(CLI::ExistingFile);
    sub->add_option("--seed", o.seed, "Override the config seed");
    auto* opt = sub->add_option("--out", o.out_dir, "Output directory");
    if (needs_out) opt->required();
  };
  auto* gen = app.add_subcommand("generate", "Simulate the oracle policy and write the dataset");
  add_common(gen, true);
  gen->add_option("--days", o.days, "Override horizon_days")->check(CLI::PositiveNumber);

  auto* train = app.add_subcommand("train", "Train the configured learners on the dataset");
  add_common(train, true);
  train->add_option("--dataset", o.dataset, "Dataset CSV from generate")->required()->check(CLI::ExistingFile);
  train->add_option("--learner", o.learners, "Train only the named learner (repeatable)");

  auto* roll = app.add_subcommand("rollout", "Closed-loop rollout of one model against the oracle");
  add_common(roll, true);
  roll->add_option("--model", o.models, "Model file")->required()->expected(1)->check(CLI::ExistingFile);
  roll->add_option("--days", o.days, "Override rollout_days")->check(CLI::PositiveNumber);

  auto* cmp = app.add_subcommand("compare", "Closed-loop rollout of several models against the oracle");
  add_common(cmp, true);
  cmp->add_option("--model", o.models, "Model file (repeatable)")->required()->check(CLI::ExistingFile);
  cmp->add_option("--days", o.days, "Override rollout_days")->check(CLI::PositiveNumber);

  auto* self = app.add_subcommand("selftest", "Run built-in consistency checks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (gen->parsed()) return cmd_generate(o, out);
    if (train->parsed()) return cmd_train(o, out);
    if (roll->parsed()) return cmd_compare(o, "rollout", out);
    if (cmp->parsed()) return cmd_compare(o, "compare", out);
    if (self->parsed()) return cmd_selftest(out);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const InputError& e) {
    err << "input error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const IoError& e) {
    err << "io error: " << e.what() << '\n';
    return kExitEnvironment;
  } catch (const ResourceError& e) {
    err << "resource limit: " << e.what() << '\n';
    return kExitEnvironment;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kExitInternal;
  }
  return kExitInternal;
}

}  // namespace surropt::cli
