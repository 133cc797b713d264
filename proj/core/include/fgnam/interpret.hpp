#pragma once
#include <Eigen/Core>
#include <string>
#include <vector>

#include "fgnam/dataset.hpp"
#include "fgnam/model.hpp"
#include "fgnam/preprocess.hpp"

namespace fgnam {

/// Sampled shape function of one (feature, risk) pair. Continuous features
/// are sampled on an even grid over the observed range; binary features at
/// {0, 1}. `raw` carries inverse-transformed labels when a plan is known.
struct ShapeCurve {
  int feature = 0;  // 0-based column
  int risk = 1;     // 1-based cause
  std::string feature_name;
  std::vector<double> grid;   // preprocessed space
  std::vector<double> raw;    // raw-space labels
  std::vector<double> values; // s_{i,k} at grid points
};

/// Mean absolute contribution per (feature, risk), with per-risk rankings.
struct ImportanceTable {
  Eigen::MatrixXd scores;                 // p x K, nonnegative
  std::vector<std::string> feature_names;
  std::vector<std::vector<int>> ranking;  // per risk: features sorted by descending score

  void to_csv(const std::string& path) const;
};

std::vector<ShapeCurve> shape_curves(const ModelParams& params, const PreprocessPlan* plan,
                                     const SurvivalDataset& data, int grid_size = 100);

/// Average of per-fold curves in curve space: all inputs must share grids.
ShapeCurve average_curves(const std::vector<ShapeCurve>& curves);

ImportanceTable importance(const ModelParams& params, const SurvivalDataset& data);

void shape_curves_to_csv(const std::string& path, const std::vector<ShapeCurve>& curves);

}  // namespace fgnam
