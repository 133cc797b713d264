#pragma once
#include <cstdint>
#include <string>
#include <vector>

#include "fgnam/dataset.hpp"

namespace fgnam {

struct FoldSplit {
  std::vector<int> train;
  std::vector<int> test;
};

struct KFoldResult {
  std::vector<FoldSplit> folds;
  std::vector<std::string> warnings;
};

/// Deterministic k-fold partition of 0..n-1. Stratified mode deals each
/// event-type class round-robin after a seeded shuffle, so per-class test
/// counts differ by at most one across folds. Test sets are disjoint and
/// cover every index.
KFoldResult kfold_split(const SurvivalDataset& data, int folds, std::uint64_t seed,
                        bool stratified = true);

/// Stratified holdout of roughly `frac` of the indices (used for the
/// early-stopping carve-out). Keeps at least one member of every class on
/// the kept side.
struct HoldoutSplit {
  std::vector<int> kept;
  std::vector<int> held;
};
HoldoutSplit stratified_holdout(const std::vector<int>& E, double frac, std::uint64_t seed);

/// row_index,fold CSV export.
void folds_to_csv(const std::string& path, const KFoldResult& split, int n);

}  // namespace fgnam
