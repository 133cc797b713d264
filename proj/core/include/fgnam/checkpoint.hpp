#pragma once
#include <optional>
#include <string>

#include "fgnam/finegray.hpp"
#include "fgnam/model.hpp"
#include "fgnam/preprocess.hpp"

namespace fgnam {

/// Everything needed to predict on new raw data: model weights, the fitted
/// preprocessing plan and the baseline CIF. Text format (JSON), versioned;
/// doubles round-trip bitwise.
struct Checkpoint {
  ModelParams params;
  std::optional<PreprocessPlan> plan;
  std::optional<BaselineCif> baseline;
  std::vector<std::string> feature_names;

  void save(const std::string& path) const;
  static Checkpoint load(const std::string& path);
};

}  // namespace fgnam
