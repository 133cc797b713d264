#include "fgnam/trainer.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <mutex>
#include <nlohmann/json.hpp>
#include <numeric>
#include <set>
#include <thread>

#include "fgnam/config.hpp"
#include "fgnam/csv.hpp"
#include "fgnam/error.hpp"
#include "fgnam/optim.hpp"
#include "fgnam/splits.hpp"

namespace fgnam {

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0)) throw UsageError("train: learning_rate must be > 0");
  if (weight_decay < 0.0) throw UsageError("train: weight_decay must be >= 0");
  if (batch_size < 2) throw UsageError("train: batch_size must be >= 2");
  if (max_epochs < 1) throw UsageError("train: max_epochs must be >= 1");
  if (patience < 1) throw UsageError("train: patience must be >= 1");
  if (widths.empty()) throw UsageError("train: widths must be nonempty");
  if (!(p_dropout >= 0.0 && p_dropout < 1.0) || !(p_feature >= 0.0 && p_feature < 1.0))
    throw UsageError("train: dropout rates must lie in [0,1)");
}

void TrainConfig::apply_kv(const std::map<std::string, std::string>& kv) {
  learning_rate = config_double(kv, "learning_rate", learning_rate);
  weight_decay = config_double(kv, "weight_decay", weight_decay);
  batch_size = config_int(kv, "batch_size", batch_size);
  max_epochs = config_int(kv, "max_epochs", max_epochs);
  patience = config_int(kv, "patience", patience);
  p_dropout = config_double(kv, "p_dropout", p_dropout);
  p_feature = config_double(kv, "p_feature", p_feature);
  widths = config_int_list(kv, "widths", widths);
  batch_norm = config_bool(kv, "batch_norm", batch_norm);
  use_class_weights = config_bool(kv, "class_weights", use_class_weights);
  g_min = config_double(kv, "g_min", g_min);
  seed = static_cast<std::uint64_t>(config_int(kv, "seed", static_cast<int>(seed)));
}

TrainConfig TrainConfig::from_kv(const std::map<std::string, std::string>& kv) {
  TrainConfig cfg;
  cfg.apply_kv(kv);
  cfg.validate();
  return cfg;
}

std::vector<SweepCandidate> enumerate_sweep(const TrainConfig& base,
                                            const std::map<std::string, std::string>& lists) {
  static const std::set<std::string> kSweepable = {
      "learning_rate", "weight_decay", "p_dropout", "p_feature", "batch_size",
      "widths",        "batch_norm",   "max_epochs", "patience"};

  std::vector<std::pair<std::string, std::vector<std::string>>> axes;
  for (const auto& [key, raw] : lists) {
    if (!kSweepable.count(key))
      throw UsageError("sweep: key '" + key + "' is not sweepable");
    std::vector<std::string> candidates;
    const char sep = raw.find('|') != std::string::npos ? '|'
                     : key == "widths"                  ? '\0'
                                                        : ',';
    if (sep == '\0') {
      candidates.push_back(raw);
    } else {
      std::string cur;
      for (char ch : raw) {
        if (ch == sep) {
          candidates.push_back(cur);
          cur.clear();
        } else {
          cur.push_back(ch);
        }
      }
      candidates.push_back(cur);
    }
    if (candidates.empty()) throw UsageError("sweep: key '" + key + "' has no candidates");
    axes.emplace_back(key, std::move(candidates));
  }

  std::vector<SweepCandidate> out;
  std::vector<std::size_t> idx(axes.size(), 0);
  for (;;) {
    SweepCandidate cand;
    cand.config = base;
    std::map<std::string, std::string> kv;
    for (std::size_t a = 0; a < axes.size(); ++a) {
      kv[axes[a].first] = axes[a].second[idx[a]];
      cand.values[axes[a].first] = axes[a].second[idx[a]];
    }
    cand.config.apply_kv(kv);
    cand.config.validate();
    out.push_back(std::move(cand));
    // odometer increment
    std::size_t a = 0;
    for (; a < axes.size(); ++a) {
      if (++idx[a] < axes[a].second.size()) break;
      idx[a] = 0;
    }
    if (a == axes.size()) break;
  }
  return out;
}

FgLossConfig TrainConfig::loss_config() const {
  FgLossConfig cfg;
  cfg.gamma = weight_decay;
  cfg.use_class_weights = use_class_weights;
  cfg.g_min = g_min;
  return cfg;
}

double model_objective(const ModelParams& params, const SurvivalDataset& data,
                       const CensoringModel& G, const FgLossConfig& cfg, const RiskWeights& omega,
                       long long* clamps) {
  Eigen::MatrixXd eta = eval_eta(params, data.X);
  FgLossResult res = fg_loss(eta, data.T, data.E, G, cfg, omega, params_sq_norm(params));
  if (clamps) *clamps += res.ipcw_clamps;
  return res.total;
}

std::vector<double> model_objective_gradient(const ModelParams& params,
                                             const SurvivalDataset& data, const CensoringModel& G,
                                             const FgLossConfig& cfg, const RiskWeights& omega) {
  BatchTrace trace = forward_batch(params, data.X, Mode::Eval);
  Eigen::MatrixXd dEta = fg_loss_grad(trace.eta, data.T, data.E, G, cfg, omega);
  ModelGrad grad = ModelGrad::zeros_like(params);
  backward_batch(params, trace, dEta, grad);

  std::vector<double> gvec;
  flatten_grad(grad, gvec);
  std::vector<double> theta;
  flatten_params(params, theta);
  for (std::size_t i = 0; i < gvec.size(); ++i) gvec[i] += 2.0 * cfg.gamma * theta[i];
  return gvec;
}

TrainResult train(const SurvivalDataset& train_set, const SurvivalDataset& val_set,
                  const TrainConfig& cfg) {
  cfg.validate();
  train_set.require_all_causes("train");
  const auto t_start = std::chrono::steady_clock::now();

  const int K = train_set.num_risks;
  const int p = train_set.p();
  const FgLossConfig loss_cfg = cfg.loss_config();
  const CensoringModel G = fit_censoring_km(train_set.T, train_set.E);
  const RiskWeights omega = class_weights(train_set.E, K);

  ModelParams params = init_params(p, K, cfg.widths, cfg.seed, cfg.p_dropout, cfg.p_feature,
                                   cfg.batch_norm);
  std::vector<double> theta;
  flatten_params(params, theta);
  AdamW opt(theta.size(), cfg.learning_rate, cfg.weight_decay);
  Rng shuffle_rng = Rng::stream(cfg.seed, 20);
  Rng mask_rng = Rng::stream(cfg.seed, 21);

  TrainResult out;
  TrainReport& report = out.report;
  ModelParams best = params;
  double best_val = std::numeric_limits<double>::infinity();
  int bad_epochs = 0;

  std::vector<int> order(static_cast<std::size_t>(train_set.n()));
  std::iota(order.begin(), order.end(), 0);
  ModelGrad grad = ModelGrad::zeros_like(params);
  std::vector<double> gvec;

  int epoch = 0;
  for (epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    shuffle_rng.shuffle(order);
    const int n = train_set.n();
    for (int start = 0, batch_id = 0; start < n; start += cfg.batch_size, ++batch_id) {
      const int stop = std::min(start + cfg.batch_size, n);
      const int bsz = stop - start;
      Eigen::MatrixXd Xb(bsz, p);
      std::vector<double> Tb(static_cast<std::size_t>(bsz));
      std::vector<int> Eb(static_cast<std::size_t>(bsz));
      bool any_event = false;
      for (int r = 0; r < bsz; ++r) {
        const int src = order[static_cast<std::size_t>(start + r)];
        Xb.row(r) = train_set.X.row(src);
        Tb[static_cast<std::size_t>(r)] = train_set.T[static_cast<std::size_t>(src)];
        Eb[static_cast<std::size_t>(r)] = train_set.E[static_cast<std::size_t>(src)];
        any_event = any_event || Eb[static_cast<std::size_t>(r)] > 0;
      }
      if (!any_event) continue;

      BatchTrace trace = forward_batch(params, Xb, Mode::Train, &mask_rng);
      Eigen::MatrixXd dEta =
          fg_loss_grad(trace.eta, Tb, Eb, G, loss_cfg, omega, &report.ipcw_clamps);
      if (!dEta.allFinite())
        throw Error("train: non-finite batch gradient at epoch " + std::to_string(epoch) +
                    ", batch " + std::to_string(batch_id));
      grad.set_zero();
      backward_batch(params, trace, dEta, grad);
      flatten_grad(grad, gvec);
      opt.step(theta, gvec);
      unflatten_params(params, theta);
      if (cfg.batch_norm) update_bn_running(params, trace);
    }

    const double train_loss = model_objective(params, train_set, G, loss_cfg, omega);
    const double val_loss = model_objective(params, val_set, G, loss_cfg, omega);
    if (!std::isfinite(train_loss) || !std::isfinite(val_loss))
      throw Error("train: non-finite loss at epoch " + std::to_string(epoch));
    report.train_loss.push_back(train_loss);
    report.val_loss.push_back(val_loss);

    if (val_loss < best_val) {
      best_val = val_loss;
      best = params;
      report.best_epoch = epoch;
      bad_epochs = 0;
    } else {
      ++bad_epochs;
    }
    if (bad_epochs >= cfg.patience) {
      report.stop_reason = "early_stop";
      break;
    }
  }
  if (report.stop_reason.empty()) report.stop_reason = "max_epochs";

  out.params = std::move(best);
  out.baseline = fit_baseline(eval_eta(out.params, train_set.X), train_set.T, train_set.E, G,
                              cfg.g_min);
  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  return out;
}

namespace {

void run_fold(const SurvivalDataset& data, const FoldSplit& split, const TrainConfig& cfg,
              int fold, const std::vector<double>& horizons, FoldOutcome& outcome) {
  outcome.fold = fold;
  SurvivalDataset train_part = data.subset(split.train);
  for (int k = 1; k <= data.num_risks; ++k) {
    if (!train_part.has_cause(k)) {
      outcome.skipped = true;
      outcome.skip_reason = "no subjects with event " + std::to_string(k) + " in training part";
      return;
    }
  }

  HoldoutSplit carve =
      stratified_holdout(train_part.E, 0.10, Rng::stream(cfg.seed, 3000 + static_cast<std::uint64_t>(fold)).next_u64());
  TrainConfig fold_cfg = cfg;
  fold_cfg.seed = Rng::stream(cfg.seed, 4000 + static_cast<std::uint64_t>(fold)).next_u64();

  TrainResult fit =
      train(train_part.subset(carve.kept), train_part.subset(carve.held), fold_cfg);

  SurvivalDataset test_part = data.subset(split.test);
  const CensoringModel G = fit_censoring_km(train_part.T, train_part.E);
  std::vector<double> grid = evaluation_grid(test_part, horizons);
  CifPrediction pred =
      predict_cif(fit.baseline, eval_eta(fit.params, test_part.X), grid);
  outcome.metrics = evaluate(pred, test_part, G, {0.25, 0.5, 0.75}, &horizons, cfg.g_min);
}

}  // namespace

CvResult cross_validate(const SurvivalDataset& data, int folds, const TrainConfig& cfg,
                        int jobs) {
  cfg.validate();
  data.require_all_causes("cross-validate");
  if (jobs < 1) throw UsageError("cross-validate: jobs must be >= 1");

  CvResult result;
  result.horizons = time_quantile_grid(data.T, data.E, {0.25, 0.5, 0.75});
  KFoldResult split = kfold_split(data, folds, cfg.seed, true);
  result.warnings = split.warnings;
  result.folds.resize(static_cast<std::size_t>(folds));

  std::atomic<int> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  auto worker = [&]() {
    for (;;) {
      const int f = next.fetch_add(1);
      if (f >= folds) return;
      try {
        run_fold(data, split.folds[static_cast<std::size_t>(f)], cfg, f, result.horizons,
                 result.folds[static_cast<std::size_t>(f)]);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> threads;
    const int nthreads = std::min(jobs, folds);
    threads.reserve(static_cast<std::size_t>(nthreads));
    for (int i = 0; i < nthreads; ++i) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
  }
  if (first_error) std::rethrow_exception(first_error);

  for (const auto& fo : result.folds)
    if (fo.skipped)
      result.warnings.push_back("fold " + std::to_string(fo.fold) + " skipped: " + fo.skip_reason);

  // aggregate mean and sample stddev per (cause, quantile, metric)
  const std::vector<std::string> metric_names = {"td_auc", "td_ci", "brier"};
  for (int k = 1; k <= data.num_risks; ++k) {
    for (std::size_t h = 0; h < result.horizons.size(); ++h) {
      for (const auto& metric : metric_names) {
        std::vector<double> values;
        std::string qlabel;
        for (const auto& fo : result.folds) {
          if (fo.skipped) continue;
          const auto& cell = fo.metrics.cells[static_cast<std::size_t>(k - 1)][h];
          qlabel = fo.metrics.quantile_labels[h];
          std::optional<double> v;
          if (metric == "td_auc") v = cell.td_auc;
          else if (metric == "td_ci") v = cell.td_ci;
          else v = cell.brier;
          if (v) values.push_back(*v);
        }
        CvAggregateRow row;
        row.cause = k;
        row.quantile = qlabel.empty() ? "q" : qlabel;
        row.metric = metric;
        row.n_folds = static_cast<int>(values.size());
        if (!values.empty()) {
          double mean = std::accumulate(values.begin(), values.end(), 0.0) /
                        double(values.size());
          double ss = 0.0;
          for (double v : values) ss += (v - mean) * (v - mean);
          row.mean = mean;
          row.stddev = values.size() > 1 ? std::sqrt(ss / double(values.size() - 1)) : 0.0;
        }
        result.aggregate.push_back(row);
      }
    }
  }
  return result;
}

void CvResult::folds_to_csv(const std::string& path) const {
  CsvDoc doc;
  doc.header = {"fold", "cause", "horizon", "horizon_time", "metric", "value", "n"};
  for (const auto& fo : folds) {
    if (fo.skipped) {
      doc.rows.push_back({std::to_string(fo.fold), "", "", "", "status", "skipped", "0"});
      continue;
    }
    for (std::size_t k = 0; k < fo.metrics.cells.size(); ++k) {
      for (std::size_t h = 0; h < fo.metrics.horizons.size(); ++h) {
        const auto& cell = fo.metrics.cells[k][h];
        auto push = [&](const std::string& name, const std::optional<double>& v) {
          doc.rows.push_back({std::to_string(fo.fold), std::to_string(k + 1),
                              fo.metrics.quantile_labels[h], fmt_double(fo.metrics.horizons[h]),
                              name, v ? fmt_double(*v) : "NA", std::to_string(cell.n)});
        };
        push("td_auc", cell.td_auc);
        push("td_ci", cell.td_ci);
        push("brier", cell.brier);
      }
    }
  }
  write_csv(path, doc);
}

void CvResult::aggregate_to_csv(const std::string& path) const {
  CsvDoc doc;
  doc.header = {"cause", "horizon", "metric", "mean", "std", "n_folds"};
  for (const auto& row : aggregate)
    doc.rows.push_back({std::to_string(row.cause), row.quantile, row.metric,
                        row.n_folds > 0 ? fmt_double(row.mean) : "NA",
                        row.n_folds > 0 ? fmt_double(row.stddev) : "NA",
                        std::to_string(row.n_folds)});
  write_csv(path, doc);
}

nlohmann::json TrainReport::to_json() const {
  nlohmann::json j;
  j["train_loss"] = train_loss;
  j["val_loss"] = val_loss;
  j["epochs_run"] = train_loss.size();
  j["best_epoch"] = best_epoch;
  j["stop_reason"] = stop_reason;
  j["wall_seconds"] = wall_seconds;
  j["ipcw_clamps"] = ipcw_clamps;
  return j;
}

void TrainReport::to_json_file(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("report: cannot write " + path);
  out << to_json().dump(2) << '\n';
}

}  // namespace fgnam
