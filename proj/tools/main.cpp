// Command-line front end: train, cv, predict, evaluate, explain, simulate.
#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <limits>
#include <set>

#include "fgnam/checkpoint.hpp"
#include "fgnam/config.hpp"
#include "fgnam/csv.hpp"
#include "fgnam/error.hpp"
#include "fgnam/interpret.hpp"
#include "fgnam/metrics.hpp"
#include "fgnam/preprocess.hpp"
#include "fgnam/rng.hpp"
#include "fgnam/splits.hpp"
#include "fgnam/survival.hpp"
#include "fgnam/svg.hpp"
#include "fgnam/synth.hpp"
#include "fgnam/table.hpp"
#include "fgnam/trainer.hpp"

namespace {

using namespace fgnam;

struct CommonArgs {
  std::string config_path;
  std::string data_path;
  std::string schema_path;
  std::string checkpoint_path;
  std::string out_dir = ".";
  std::string times_arg;
  int seed = -1;       // -1: not set on the command line
  int folds = -1;
  int jobs = 1;
  int grid_size = -1;
};

KvConfig load_config(const CommonArgs& args) {
  if (args.config_path.empty()) return {};
  return KvConfig::from_file(args.config_path);
}

TrainConfig train_config_for(const CommonArgs& args, const KvConfig& cfg,
                             const std::string& section) {
  TrainConfig tc = TrainConfig::from_kv(cfg.section(section));
  if (args.seed >= 0) tc.seed = static_cast<std::uint64_t>(args.seed);
  return tc;
}

std::string out_path(const CommonArgs& args, const std::string& name) {
  std::filesystem::create_directories(args.out_dir);
  return (std::filesystem::path(args.out_dir) / name).string();
}

void print_warnings(const std::vector<std::string>& warnings) {
  for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
}

SurvivalDataset load_labeled(const CommonArgs& args, const PreprocessPlan& plan) {
  if (args.schema_path.empty()) throw UsageError("missing --schema");
  TableSchema schema = TableSchema::from_file(args.schema_path);
  if (schema.num_risks != plan.num_risks)
    throw UsageError("schema num_risks does not match the checkpoint's preprocessing plan");
  RawTable table = load_csv(args.data_path, schema);
  ApplyResult applied = apply_preprocess(plan, table);
  print_warnings(applied.warnings);
  return std::move(applied.data);
}

/// Covariates-only load: roles are ignored, the plan picks its columns.
SurvivalDataset load_unlabeled(const CommonArgs& args, const PreprocessPlan& plan) {
  CsvDoc doc = read_csv(args.data_path);
  TableSchema schema;
  schema.num_risks = plan.num_risks;
  // synthesize role columns so the loader's validation has something to chew on
  RawTable table;
  table.columns = doc.header;
  table.num_risks = plan.num_risks;
  std::set<std::string> seen;
  for (const auto& name : table.columns)
    if (!seen.insert(name).second) throw Error("table: duplicate column name '" + name + "'");
  for (std::size_t r = 0; r < doc.rows.size(); ++r) {
    if (doc.rows[r].size() != table.columns.size())
      throw Error("table: row " + std::to_string(r) + " has inconsistent width");
    std::vector<Cell> cells;
    for (const auto& f : doc.rows[r]) {
      Cell c;
      if (f.empty()) {
        c.missing = true;
      } else {
        c.text = f;
        if (auto v = parse_double(f)) {
          c.is_number = true;
          c.number = *v;
        }
      }
      cells.push_back(std::move(c));
    }
    table.rows.push_back(std::move(cells));
  }
  ApplyResult applied = apply_preprocess(plan, table);
  print_warnings(applied.warnings);
  return std::move(applied.data);
}

int cmd_train(const CommonArgs& args) {
  KvConfig cfg = load_config(args);
  TrainConfig tc = train_config_for(args, cfg, "train");
  if (args.data_path.empty()) throw UsageError("train: missing --data");
  if (args.schema_path.empty()) throw UsageError("train: missing --schema");

  TableSchema schema = TableSchema::from_file(args.schema_path);
  RawTable table = load_csv(args.data_path, schema);
  PreprocessPlan plan = fit_preprocess(table, schema.strategies);
  print_warnings(plan.warnings);
  ApplyResult applied = apply_preprocess(plan, table);
  print_warnings(applied.warnings);
  SurvivalDataset& full = applied.data;
  full.require_all_causes("train");

  HoldoutSplit carve = stratified_holdout(full.E, 0.10, Rng::stream(tc.seed, 3500).next_u64());
  SurvivalDataset kept = full.subset(carve.kept);
  SurvivalDataset held = full.subset(carve.held);

  TrainResult fit;
  auto sweep_lists = cfg.section("sweep");
  if (!sweep_lists.empty()) {
    // grid sweep: every candidate trains on the same split, the best
    // validation objective wins (ties go to the earliest candidate)
    std::vector<SweepCandidate> grid = enumerate_sweep(tc, sweep_lists);
    CsvDoc results;
    results.header = {"candidate"};
    for (const auto& [key, _] : grid.front().values) results.header.push_back(key);
    results.header.insert(results.header.end(),
                          {"best_val_loss", "best_epoch", "epochs_run", "stop_reason"});
    int best = -1;
    double best_val = std::numeric_limits<double>::infinity();
    for (std::size_t g = 0; g < grid.size(); ++g) {
      TrainResult run = train(kept, held, grid[g].config);
      const double val = run.report.val_loss[static_cast<std::size_t>(run.report.best_epoch - 1)];
      std::vector<std::string> row = {std::to_string(g)};
      for (const auto& [_, value] : grid[g].values) row.push_back(value);
      row.push_back(fmt_double(val));
      row.push_back(std::to_string(run.report.best_epoch));
      row.push_back(std::to_string(run.report.val_loss.size()));
      row.push_back(run.report.stop_reason);
      results.rows.push_back(std::move(row));
      if (val < best_val) {
        best_val = val;
        best = static_cast<int>(g);
        fit = std::move(run);
      }
    }
    write_csv(out_path(args, "sweep_results.csv"), results);
    std::cout << "sweep: " << grid.size() << " candidates, best " << best << "\n";
  } else {
    fit = train(kept, held, tc);
  }

  Checkpoint ck;
  ck.params = fit.params;
  ck.plan = plan;
  ck.baseline = fit.baseline;
  ck.feature_names = full.feature_names;
  ck.save(out_path(args, "checkpoint.json"));
  fit.baseline.to_csv(out_path(args, "baseline.csv"));
  fit.report.to_json_file(out_path(args, "train_report.json"));
  std::cout << "trained " << fit.report.train_loss.size() << " epochs (best "
            << fit.report.best_epoch << ", " << fit.report.stop_reason << ")\n";
  return 0;
}

int cmd_cv(const CommonArgs& args) {
  KvConfig cfg = load_config(args);
  TrainConfig tc = train_config_for(args, cfg, "cv");
  if (args.data_path.empty()) throw UsageError("cv: missing --data");
  if (args.schema_path.empty()) throw UsageError("cv: missing --schema");
  int folds = args.folds > 0 ? args.folds : config_int(cfg.section("cv"), "folds", 5);

  TableSchema schema = TableSchema::from_file(args.schema_path);
  RawTable table = load_csv(args.data_path, schema);
  PreprocessPlan plan = fit_preprocess(table, schema.strategies);
  print_warnings(plan.warnings);
  ApplyResult applied = apply_preprocess(plan, table);
  print_warnings(applied.warnings);

  CvResult cv = cross_validate(applied.data, folds, tc, args.jobs);
  print_warnings(cv.warnings);
  cv.folds_to_csv(out_path(args, "cv_folds.csv"));
  cv.aggregate_to_csv(out_path(args, "cv_aggregate.csv"));
  KFoldResult split = kfold_split(applied.data, folds, tc.seed, true);
  folds_to_csv(out_path(args, "cv_fold_assignments.csv"), split, applied.data.n());
  std::cout << "cross-validated " << folds << " folds\n";
  return 0;
}

int cmd_predict(const CommonArgs& args) {
  if (args.checkpoint_path.empty()) throw UsageError("predict: missing --checkpoint");
  if (args.data_path.empty()) throw UsageError("predict: missing --data");
  if (args.times_arg.empty()) throw UsageError("predict: missing --times");
  Checkpoint ck = Checkpoint::load(args.checkpoint_path);
  if (!ck.plan) throw UsageError("predict: checkpoint has no preprocessing plan");
  if (!ck.baseline) throw UsageError("predict: checkpoint has no baseline");

  std::vector<double> times = parse_double_list(args.times_arg);
  std::sort(times.begin(), times.end());
  SurvivalDataset data = args.schema_path.empty() ? load_unlabeled(args, *ck.plan)
                                                  : load_labeled(args, *ck.plan);
  CifPrediction pred = predict_cif(*ck.baseline, eval_eta(ck.params, data.X), times);
  pred.to_csv(out_path(args, "cif.csv"));
  std::cout << "predicted " << data.n() << " subjects at " << times.size() << " times\n";
  return 0;
}

int cmd_evaluate(const CommonArgs& args) {
  if (args.checkpoint_path.empty()) throw UsageError("evaluate: missing --checkpoint");
  if (args.data_path.empty()) throw UsageError("evaluate: missing --data");
  Checkpoint ck = Checkpoint::load(args.checkpoint_path);
  if (!ck.plan) throw UsageError("evaluate: checkpoint has no preprocessing plan");
  if (!ck.baseline) throw UsageError("evaluate: checkpoint has no baseline");

  SurvivalDataset data = load_labeled(args, *ck.plan);
  const CensoringModel G = fit_censoring_km(data.T, data.E);
  std::vector<double> horizons = time_quantile_grid(data.T, data.E, {0.25, 0.5, 0.75});
  std::vector<double> grid = evaluation_grid(data, horizons);
  CifPrediction pred = predict_cif(*ck.baseline, eval_eta(ck.params, data.X), grid);
  MetricsReport report = evaluate(pred, data, G, {0.25, 0.5, 0.75}, &horizons);
  report.to_csv(out_path(args, "metrics.csv"));
  std::cout << "evaluated " << data.n() << " subjects\n";
  return 0;
}

int cmd_explain(const CommonArgs& args) {
  if (args.checkpoint_path.empty()) throw UsageError("explain: missing --checkpoint");
  if (args.data_path.empty()) throw UsageError("explain: missing --data");
  Checkpoint ck = Checkpoint::load(args.checkpoint_path);
  if (!ck.plan) throw UsageError("explain: checkpoint has no preprocessing plan");

  SurvivalDataset data = args.schema_path.empty() ? load_unlabeled(args, *ck.plan)
                                                  : load_labeled(args, *ck.plan);
  const int grid_size = args.grid_size > 0 ? args.grid_size : 100;
  const std::uint64_t seed = args.seed >= 0 ? static_cast<std::uint64_t>(args.seed) : 42;

  std::vector<ShapeCurve> curves = shape_curves(ck.params, &*ck.plan, data, grid_size);
  ImportanceTable table = importance(ck.params, data);
  shape_curves_to_csv(out_path(args, "shape.csv"), curves);
  table.to_csv(out_path(args, "importance.csv"));

  const int K = ck.params.hyper.num_risks;
  const int p = ck.params.hyper.num_features;
  for (int k = 1; k <= K; ++k) {
    // plot panels: a seeded sample of 10 from the 20 most important features
    const auto& rank = table.ranking[static_cast<std::size_t>(k - 1)];
    std::vector<int> pool(rank.begin(), rank.begin() + std::min<std::size_t>(20, rank.size()));
    Rng rng = Rng::stream(seed, 600 + static_cast<std::uint64_t>(k));
    rng.shuffle(pool);
    pool.resize(std::min<std::size_t>(10, pool.size()));
    std::set<int> chosen(pool.begin(), pool.end());

    std::vector<ShapeCurve> selected;
    for (const auto& c : curves)
      if (c.risk == k && chosen.count(c.feature)) selected.push_back(c);
    render_shape_svg(selected, out_path(args, "shapes_risk" + std::to_string(k) + ".svg"));
    render_importance_svg(table, k, out_path(args, "importance_risk" + std::to_string(k) + ".svg"));
  }
  std::cout << "explained " << p << " features over " << K << " risks\n";
  return 0;
}

int cmd_simulate(const CommonArgs& args) {
  KvConfig cfg = load_config(args);
  auto kv = cfg.section("simulate");
  SynthSpec spec = SynthSpec::defaults();
  spec.n = config_int(kv, "n", spec.n);
  int p = config_int(kv, "p", spec.p);
  if (p != spec.p) {
    for (auto& row : spec.effects) row.resize(static_cast<std::size_t>(p));
    spec.p = p;
  }
  spec.plateau = config_double(kv, "plateau", spec.plateau);
  spec.cause2_rate = config_double(kv, "cause2_rate", spec.cause2_rate);
  spec.censoring_rate = config_double(kv, "censoring_rate", spec.censoring_rate);
  spec.seed = static_cast<std::uint64_t>(config_int(kv, "seed", static_cast<int>(spec.seed)));
  if (args.seed >= 0) spec.seed = static_cast<std::uint64_t>(args.seed);

  SynthResult synth = generate(spec);
  print_warnings(synth.warnings);
  synth.data.to_csv(out_path(args, "synth_data.csv"));
  synth.truth_to_csv(out_path(args, "synth_truth.csv"));
  std::cout << "simulated " << spec.n << " subjects, censoring rate "
            << fmt_double(synth.achieved_censoring) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Interpretable competing-risks survival modeling (Fine-Gray neural additive model)"};
  app.require_subcommand(1);

  CommonArgs args;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", args.config_path, "key-value config file");
    sub->add_option("--data", args.data_path, "input CSV");
    sub->add_option("--schema", args.schema_path, "schema config (time_col/event_col/num_risks)");
    sub->add_option("--checkpoint", args.checkpoint_path, "model checkpoint JSON");
    sub->add_option("--out", args.out_dir, "output directory");
    sub->add_option("--seed", args.seed, "random seed (overrides config)");
    sub->add_option("--folds", args.folds, "cross-validation folds");
    sub->add_option("--jobs", args.jobs, "fold-level worker threads");
    sub->add_option("--times", args.times_arg, "comma-separated evaluation times");
    sub->add_option("--grid-size", args.grid_size, "shape-curve grid points");
  };

  CLI::App* train_cmd = app.add_subcommand("train", "fit a model and write checkpoint artifacts");
  CLI::App* cv_cmd = app.add_subcommand("cv", "k-fold cross-validated metrics");
  CLI::App* predict_cmd = app.add_subcommand("predict", "CIF predictions at given times");
  CLI::App* evaluate_cmd = app.add_subcommand("evaluate", "metrics of a checkpoint on labeled data");
  CLI::App* explain_cmd = app.add_subcommand("explain", "shape functions and importances");
  CLI::App* simulate_cmd = app.add_subcommand("simulate", "synthetic competing-risks data");
  for (CLI::App* sub : {train_cmd, cv_cmd, predict_cmd, evaluate_cmd, explain_cmd, simulate_cmd})
    add_common(sub);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (app.got_subcommand(train_cmd)) return cmd_train(args);
    if (app.got_subcommand(cv_cmd)) return cmd_cv(args);
    if (app.got_subcommand(predict_cmd)) return cmd_predict(args);
    if (app.got_subcommand(evaluate_cmd)) return cmd_evaluate(args);
    if (app.got_subcommand(explain_cmd)) return cmd_explain(args);
    if (app.got_subcommand(simulate_cmd)) return cmd_simulate(args);
  } catch (const fgnam::UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
