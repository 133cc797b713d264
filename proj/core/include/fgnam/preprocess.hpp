#pragma once
#include <map>
#include <nlohmann/json_fwd.hpp>
#include <string>
#include <vector>

#include "fgnam/dataset.hpp"
#include "fgnam/table.hpp"

namespace fgnam {

enum class Strategy {
  Standardize,       // (x - mean) / stddev, missing forbidden
  MeanImpute,        // fill mean, then standardize (stats of the filled column)
  OneHot,            // one output column per training category, missing forbidden
  ModeImpute,        // fill mode, then one-hot
  MissingIndicator,  // standardize observed values, sentinel -1 for missing,
                     // plus a paired 0/1 indicator column
};

Strategy strategy_from_name(const std::string& name);
std::string strategy_name(Strategy s);

/// Fitted transform for one input column.
struct ColumnRule {
  std::string input_col;
  Strategy strategy = Strategy::Standardize;
  double mean = 0.0;
  double stddev = 1.0;
  double fill_value = 0.0;                // mean-impute fill, raw scale
  std::vector<std::string> categories;    // one-hot / mode-impute
  std::string mode_value;

  int output_width() const;
  std::vector<std::string> output_names() const;
  std::vector<bool> output_binary() const;
};

inline constexpr double kMimSentinel = -1.0;

/// Column statistics fitted on a training table; applying the plan is a
/// pure function of the raw row.
struct PreprocessPlan {
  std::vector<ColumnRule> rules;  // in output order
  int num_risks = 0;
  std::string fitted_on = "train";
  std::vector<std::string> warnings;  // fit-time warnings

  int output_width() const;
  std::vector<std::string> feature_names() const;
  std::vector<bool> feature_binary() const;

  /// Raw-space value of a preprocessed coordinate of output column j
  /// (identity for categorical / indicator columns and the MIM sentinel).
  double inverse_value(int output_col, double scaled) const;
  bool output_is_binary(int output_col) const;

  nlohmann::json to_json() const;
  static PreprocessPlan from_json(const nlohmann::json& j);
};

struct ApplyResult {
  SurvivalDataset data;
  std::vector<std::string> warnings;  // unseen categories etc.
};

/// Fits per-column statistics on the training rows only. Columns without a
/// configured strategy get one inferred from their content: numeric columns
/// standardize (mean-impute when values are missing), text columns one-hot
/// (mode-impute when values are missing).
PreprocessPlan fit_preprocess(const RawTable& train,
                              const std::map<std::string, std::string>& strategies);

ApplyResult apply_preprocess(const PreprocessPlan& plan, const RawTable& table);

}  // namespace fgnam
