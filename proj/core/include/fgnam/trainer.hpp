#pragma once
#include <cstdint>
#include <map>
#include <nlohmann/json_fwd.hpp>
#include <optional>
#include <string>
#include <vector>

#include "fgnam/dataset.hpp"
#include "fgnam/finegray.hpp"
#include "fgnam/metrics.hpp"
#include "fgnam/model.hpp"

namespace fgnam {

struct TrainConfig {
  double learning_rate = 1e-2;
  double weight_decay = 1e-4;  // gamma: L2 in the objective, decoupled decay in the update
  int batch_size = 256;
  int max_epochs = 200;
  int patience = 10;
  double p_dropout = 0.0;
  double p_feature = 0.0;
  std::vector<int> widths = {16, 16};
  bool batch_norm = false;
  bool use_class_weights = true;
  double g_min = kGMinDefault;
  std::uint64_t seed = 42;

  void validate() const;
  /// Overlays recognized keys onto this config (unknown keys are ignored).
  void apply_kv(const std::map<std::string, std::string>& kv);
  static TrainConfig from_kv(const std::map<std::string, std::string>& kv);
  FgLossConfig loss_config() const;
};

/// One point of a hyperparameter grid sweep.
struct SweepCandidate {
  TrainConfig config;
  std::map<std::string, std::string> values;  // swept key -> literal value
};

/// Cross product of list-valued keys over a base config. Candidates are
/// separated by '|'; scalar keys also accept ',' as a separator. Keys:
/// learning_rate, weight_decay, p_dropout, p_feature, batch_size, widths,
/// batch_norm, max_epochs, patience.
std::vector<SweepCandidate> enumerate_sweep(const TrainConfig& base,
                                            const std::map<std::string, std::string>& lists);

struct TrainReport {
  std::vector<double> train_loss;  // full-sample objective per epoch
  std::vector<double> val_loss;
  int best_epoch = 0;  // 1-based
  std::string stop_reason;
  double wall_seconds = 0.0;
  long long ipcw_clamps = 0;

  nlohmann::json to_json() const;
  void to_json_file(const std::string& path) const;
};

struct TrainResult {
  ModelParams params;
  BaselineCif baseline;
  TrainReport report;
};

/// Full objective (loss + gamma * ||theta||^2) of a model on a dataset,
/// eval-mode forward, full-sample risk sets.
double model_objective(const ModelParams& params, const SurvivalDataset& data,
                       const CensoringModel& G, const FgLossConfig& cfg, const RiskWeights& omega,
                       long long* clamps = nullptr);

/// Analytic gradient of the same objective w.r.t. the flat parameter
/// vector; pairs with model_objective for end-to-end gradient checks.
std::vector<double> model_objective_gradient(const ModelParams& params,
                                             const SurvivalDataset& data, const CensoringModel& G,
                                             const FgLossConfig& cfg, const RiskWeights& omega);

/// Mini-batch training with early stopping on the validation objective.
/// The censoring model and class weights are fitted on the training split
/// and held fixed.
TrainResult train(const SurvivalDataset& train_set, const SurvivalDataset& val_set,
                  const TrainConfig& cfg);

struct FoldOutcome {
  int fold = 0;
  bool skipped = false;
  std::string skip_reason;
  MetricsReport metrics;
};

struct CvAggregateRow {
  int cause = 0;
  std::string quantile;
  std::string metric;
  double mean = 0.0;
  double stddev = 0.0;
  int n_folds = 0;
};

struct CvResult {
  std::vector<FoldOutcome> folds;
  std::vector<CvAggregateRow> aggregate;
  std::vector<double> horizons;
  std::vector<std::string> warnings;

  void folds_to_csv(const std::string& path) const;
  void aggregate_to_csv(const std::string& path) const;
};

/// K-fold cross-validation: per fold, fit on the training portion (with a
/// stratified 10% early-stopping carve-out) and score the held-out fold at
/// the q.25/.50/.75 event-time horizons of the full dataset.
CvResult cross_validate(const SurvivalDataset& data, int folds, const TrainConfig& cfg,
                        int jobs = 1);

}  // namespace fgnam
