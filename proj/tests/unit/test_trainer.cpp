#include <doctest.h>

#include <cmath>

#include "fgnam/checkpoint.hpp"
#include "fgnam/error.hpp"
#include "fgnam/splits.hpp"
#include "fgnam/synth.hpp"
#include "fgnam/trainer.hpp"
#include "oracles/oracles.hpp"

using namespace fgnam;

namespace {

SurvivalDataset two_subject_set(double x_early, double x_late) {
  // the subject with covariate x_early fails first
  SurvivalDataset d;
  d.num_risks = 1;
  d.X = Eigen::MatrixXd(2, 1);
  d.X(0, 0) = x_early;
  d.X(1, 0) = x_late;
  d.T = {1.0, 2.0};
  d.E = {1, 1};
  d.feature_names = {"x1"};
  d.feature_binary = {false};
  return d;
}

TrainConfig small_config() {
  TrainConfig cfg;
  cfg.widths = {4, 4};
  cfg.batch_size = 64;
  cfg.max_epochs = 40;
  cfg.patience = 10;
  cfg.weight_decay = 1e-4;
  cfg.learning_rate = 0.02;
  cfg.seed = 7;
  return cfg;
}

}  // namespace

TEST_CASE("objective gradient matches finite differences end to end") {
  SynthSpec spec = SynthSpec::defaults();
  spec.n = 12;
  spec.seed = 3;
  SynthResult synth = generate(spec);
  const CensoringModel G = fit_censoring_km(synth.data.T, synth.data.E);
  const RiskWeights omega = class_weights(synth.data.E, 2);
  FgLossConfig cfg;
  cfg.gamma = 0.01;

  ModelParams params = init_params(3, 2, {4, 3}, 17);
  std::vector<double> analytic = model_objective_gradient(params, synth.data, G, cfg, omega);
  std::vector<double> theta;
  flatten_params(params, theta);
  auto fd = oracles::central_diff(theta, [&](const std::vector<double>& th) {
    ModelParams probe = params;
    unflatten_params(probe, th);
    return model_objective(probe, synth.data, G, cfg, omega);
  });
  double worst = 0.0;
  for (std::size_t i = 0; i < fd.size(); ++i)
    worst = std::max(worst, oracles::rel_err(analytic[i], fd[i]));
  CHECK(worst < 1e-4);
}

TEST_CASE("early stopping halts after patience non-improving epochs and restores the best") {
  // training data rewards increasing eta in x, validation data the opposite:
  // the validation loss worsens every epoch from the start
  SurvivalDataset train_set = two_subject_set(+1.0, -1.0);
  SurvivalDataset val_set = two_subject_set(-1.0, +1.0);

  TrainConfig cfg;
  cfg.widths = {4};
  cfg.batch_size = 2;
  cfg.learning_rate = 0.05;
  cfg.weight_decay = 0.0;
  cfg.patience = 4;
  cfg.max_epochs = 50;
  cfg.seed = 5;

  TrainResult res = train(train_set, val_set, cfg);
  // validation loss strictly worsens, so epoch 1 is the best and training
  // runs exactly patience+1 epochs
  for (std::size_t e = 1; e < res.report.val_loss.size(); ++e)
    CHECK(res.report.val_loss[e] > res.report.val_loss[e - 1]);
  CHECK(res.report.val_loss.size() == 5);
  CHECK(res.report.best_epoch == 1);
  CHECK(res.report.stop_reason == "early_stop");

  // restored parameters reproduce the best epoch's validation objective
  const CensoringModel G = fit_censoring_km(train_set.T, train_set.E);
  const RiskWeights omega = class_weights(train_set.E, 1);
  const double restored =
      model_objective(res.params, val_set, G, cfg.loss_config(), omega);
  CHECK(restored == doctest::Approx(res.report.val_loss[0]).epsilon(1e-12));
  CHECK(res.report.val_loss[0] ==
        *std::min_element(res.report.val_loss.begin(), res.report.val_loss.end()));
}

TEST_CASE("training runs to max_epochs when validation keeps improving") {
  SynthSpec spec = SynthSpec::defaults();
  spec.n = 200;
  spec.seed = 11;
  SynthResult synth = generate(spec);
  HoldoutSplit carve = stratified_holdout(synth.data.E, 0.2, 1);
  TrainConfig cfg = small_config();
  cfg.max_epochs = 3;
  cfg.patience = 10;
  TrainResult res = train(synth.data.subset(carve.kept), synth.data.subset(carve.held), cfg);
  CHECK(res.report.stop_reason == "max_epochs");
  CHECK(res.report.train_loss.size() == 3);
}

TEST_CASE("identical config and seed give identical reports and checkpoint bytes") {
  SynthSpec spec = SynthSpec::defaults();
  spec.n = 150;
  spec.seed = 23;
  SynthResult synth = generate(spec);
  HoldoutSplit carve = stratified_holdout(synth.data.E, 0.15, 2);
  SurvivalDataset tr = synth.data.subset(carve.kept);
  SurvivalDataset va = synth.data.subset(carve.held);

  TrainConfig cfg = small_config();
  cfg.max_epochs = 5;
  TrainResult a = train(tr, va, cfg);
  TrainResult b = train(tr, va, cfg);
  CHECK(a.report.train_loss == b.report.train_loss);
  CHECK(a.report.val_loss == b.report.val_loss);
  CHECK(a.report.best_epoch == b.report.best_epoch);

  Checkpoint ca, cb;
  ca.params = a.params;
  cb.params = b.params;
  ca.save("ck_a_tmp.json");
  cb.save("ck_b_tmp.json");
  auto slurp = [](const char* p) {
    FILE* f = fopen(p, "rb");
    REQUIRE(f);
    std::string s;
    char buf[4096];
    size_t got;
    while ((got = fread(buf, 1, sizeof(buf), f)) > 0) s.append(buf, got);
    fclose(f);
    return s;
  };
  CHECK(slurp("ck_a_tmp.json") == slurp("ck_b_tmp.json"));
  remove("ck_a_tmp.json");
  remove("ck_b_tmp.json");
}

TEST_CASE("training requires every cause in the training split") {
  SurvivalDataset d = two_subject_set(1.0, -1.0);
  d.num_risks = 2;  // but no cause-2 subjects
  TrainConfig cfg = small_config();
  CHECK_THROWS_AS(train(d, d, cfg), Error);
}

TEST_CASE("cross validation produces per-fold reports and sane aggregates") {
  SynthSpec spec = SynthSpec::defaults();
  spec.n = 360;
  spec.seed = 31;
  SynthResult synth = generate(spec);
  TrainConfig cfg = small_config();
  cfg.max_epochs = 12;
  cfg.patience = 4;

  CvResult cv = cross_validate(synth.data, 3, cfg, 1);
  REQUIRE(cv.folds.size() == 3);
  for (const auto& fo : cv.folds) CHECK(!fo.skipped);
  REQUIRE(cv.horizons.size() == 3);
  // aggregate rows: K * horizons * metrics
  CHECK(cv.aggregate.size() == 2 * 3 * 3);

  // recompute one aggregate cell by hand
  for (const auto& row : cv.aggregate) {
    if (row.cause != 1 || row.metric != "td_ci" || row.quantile != "q50") continue;
    std::vector<double> vals;
    for (const auto& fo : cv.folds) {
      const auto& cell = fo.metrics.cells[0][1];
      if (cell.td_ci) vals.push_back(*cell.td_ci);
    }
    REQUIRE(static_cast<int>(vals.size()) == row.n_folds);
    double mean = 0.0;
    for (double v : vals) mean += v;
    mean /= double(vals.size());
    CHECK(row.mean == doctest::Approx(mean).epsilon(1e-12));
  }

  // parallel fold execution reproduces the sequential results
  CvResult cv2 = cross_validate(synth.data, 3, cfg, 3);
  for (std::size_t f = 0; f < cv.folds.size(); ++f) {
    const auto& a = cv.folds[f].metrics.cells;
    const auto& b = cv2.folds[f].metrics.cells;
    for (std::size_t k = 0; k < a.size(); ++k)
      for (std::size_t h = 0; h < a[k].size(); ++h) {
        REQUIRE(a[k][h].td_ci.has_value() == b[k][h].td_ci.has_value());
        if (a[k][h].td_ci) CHECK(std::abs(*a[k][h].td_ci - *b[k][h].td_ci) < 1e-9);
      }
  }
}

TEST_CASE("a fold whose training part misses a cause is skipped with a warning") {
  SynthSpec spec = SynthSpec::defaults();
  spec.n = 40;
  spec.seed = 37;
  spec.censoring_rate = 0.0;
  SynthResult synth = generate(spec);
  // collapse all but one cause-2 subject into cause 1
  int kept2 = -1;
  for (int i = 0; i < synth.data.n(); ++i) {
    if (synth.data.E[static_cast<std::size_t>(i)] == 2) {
      if (kept2 < 0) kept2 = i;
      else synth.data.E[static_cast<std::size_t>(i)] = 1;
    }
  }
  REQUIRE(kept2 >= 0);
  TrainConfig cfg = small_config();
  cfg.max_epochs = 2;
  CvResult cv = cross_validate(synth.data, 2, cfg, 1);
  int skipped = 0;
  for (const auto& fo : cv.folds) skipped += fo.skipped ? 1 : 0;
  CHECK(skipped == 1);  // the fold whose test side holds the lone cause-2 subject trains fine
  bool warned = false;
  for (const auto& w : cv.warnings) warned = warned || w.find("skipped") != std::string::npos;
  CHECK(warned);
}

TEST_CASE("sweep enumeration builds the full grid deterministically") {
  TrainConfig base;
  base.max_epochs = 7;
  std::map<std::string, std::string> lists = {
      {"learning_rate", "0.01,0.001"},
      {"widths", "8,8|16"},
      {"batch_norm", "false|true"},
  };
  auto grid = enumerate_sweep(base, lists);
  REQUIRE(grid.size() == 8);
  std::set<std::string> seen;
  for (const auto& cand : grid) {
    CHECK(cand.config.max_epochs == 7);  // base values survive
    std::string key;
    for (const auto& [k, v] : cand.values) key += k + "=" + v + ";";
    CHECK(seen.insert(key).second);
    CHECK((cand.config.widths == std::vector<int>{8, 8} ||
           cand.config.widths == std::vector<int>{16}));
    CHECK((cand.config.learning_rate == 0.01 || cand.config.learning_rate == 0.001));
  }
  CHECK_THROWS_AS(enumerate_sweep(base, {{"seed", "1,2"}}), UsageError);
  CHECK_THROWS_AS(enumerate_sweep(base, {{"learning_rate", "0|-1"}}), UsageError);
}

TEST_CASE("train config parses from key-value maps") {
  std::map<std::string, std::string> kv = {
      {"learning_rate", "0.005"}, {"batch_size", "128"}, {"widths", "8,8"},
      {"batch_norm", "true"},     {"patience", "3"},     {"seed", "99"}};
  TrainConfig cfg = TrainConfig::from_kv(kv);
  CHECK(cfg.learning_rate == 0.005);
  CHECK(cfg.batch_size == 128);
  CHECK(cfg.widths == std::vector<int>{8, 8});
  CHECK(cfg.batch_norm);
  CHECK(cfg.patience == 3);
  CHECK(cfg.seed == 99);

  CHECK_THROWS_AS(TrainConfig::from_kv({{"batch_size", "1"}}), UsageError);
  CHECK_THROWS_AS(TrainConfig::from_kv({{"learning_rate", "0"}}), UsageError);
  CHECK_THROWS_AS(TrainConfig::from_kv({{"p_dropout", "1.0"}}), UsageError);
}
