#pragma once
#include <Eigen/Core>
#include <string>
#include <vector>

namespace fgnam {

/// Fully numeric design matrix with observed times and event labels.
/// E == 0 means censored; 1..num_risks are the competing causes.
struct SurvivalDataset {
  Eigen::MatrixXd X;  // n x p
  std::vector<double> T;
  std::vector<int> E;
  int num_risks = 0;
  std::vector<std::string> feature_names;
  std::vector<bool> feature_binary;  // one-hot / indicator columns

  int n() const { return static_cast<int>(T.size()); }
  int p() const { return static_cast<int>(X.cols()); }

  SurvivalDataset subset(const std::vector<int>& idx) const;
  bool has_cause(int k) const;
  /// Throws unless every cause 1..K has at least one subject.
  void require_all_causes(const std::string& context) const;

  void to_csv(const std::string& path) const;
};

}  // namespace fgnam
