#include "fgnam/splits.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "fgnam/csv.hpp"
#include "fgnam/error.hpp"
#include "fgnam/rng.hpp"

namespace fgnam {

KFoldResult kfold_split(const SurvivalDataset& data, int folds, std::uint64_t seed,
                        bool stratified) {
  const int n = data.n();
  if (folds < 2) throw UsageError("kfold: folds must be >= 2");
  if (folds > n) throw UsageError("kfold: folds exceeds sample size");

  KFoldResult result;
  std::vector<int> fold_of(static_cast<std::size_t>(n), -1);

  if (stratified) {
    std::map<int, std::vector<int>> by_class;
    for (int i = 0; i < n; ++i) by_class[data.E[static_cast<std::size_t>(i)]].push_back(i);
    int class_pos = 0;
    for (auto& [label, members] : by_class) {
      if (static_cast<int>(members.size()) < folds)
        result.warnings.push_back("kfold: event type " + std::to_string(label) + " has only " +
                                  std::to_string(members.size()) + " members for " +
                                  std::to_string(folds) + " folds");
      Rng rng = Rng::stream(seed, static_cast<std::uint64_t>(1000 + label));
      rng.shuffle(members);
      for (std::size_t i = 0; i < members.size(); ++i)
        fold_of[static_cast<std::size_t>(members[i])] =
            static_cast<int>((i + static_cast<std::size_t>(class_pos)) % static_cast<std::size_t>(folds));
      ++class_pos;
    }
  } else {
    std::vector<int> order(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
    Rng rng = Rng::stream(seed, 0);
    rng.shuffle(order);
    for (std::size_t i = 0; i < order.size(); ++i)
      fold_of[static_cast<std::size_t>(order[i])] = static_cast<int>(i % static_cast<std::size_t>(folds));
  }

  result.folds.resize(static_cast<std::size_t>(folds));
  for (int i = 0; i < n; ++i) {
    const int f = fold_of[static_cast<std::size_t>(i)];
    for (int g = 0; g < folds; ++g) {
      if (g == f)
        result.folds[static_cast<std::size_t>(g)].test.push_back(i);
      else
        result.folds[static_cast<std::size_t>(g)].train.push_back(i);
    }
  }
  return result;
}

HoldoutSplit stratified_holdout(const std::vector<int>& E, double frac, std::uint64_t seed) {
  if (!(frac > 0.0 && frac < 1.0)) throw UsageError("holdout: frac must lie in (0,1)");
  std::map<int, std::vector<int>> by_class;
  for (std::size_t i = 0; i < E.size(); ++i) by_class[E[i]].push_back(static_cast<int>(i));

  HoldoutSplit out;
  for (auto& [label, members] : by_class) {
    Rng rng = Rng::stream(seed, static_cast<std::uint64_t>(2000 + label));
    rng.shuffle(members);
    const std::size_t m = members.size();
    std::size_t take = m >= 2 ? std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(
                                       frac * static_cast<double>(m))))
                              : 0;
    if (take >= m && m >= 1) take = m - 1;  // keep at least one member per class
    for (std::size_t i = 0; i < m; ++i)
      (i < take ? out.held : out.kept).push_back(members[i]);
  }
  std::sort(out.kept.begin(), out.kept.end());
  std::sort(out.held.begin(), out.held.end());
  return out;
}

void folds_to_csv(const std::string& path, const KFoldResult& split, int n) {
  std::vector<int> fold_of(static_cast<std::size_t>(n), -1);
  for (std::size_t f = 0; f < split.folds.size(); ++f)
    for (int i : split.folds[f].test) fold_of[static_cast<std::size_t>(i)] = static_cast<int>(f);
  CsvDoc doc;
  doc.header = {"row_index", "fold"};
  for (int i = 0; i < n; ++i)
    doc.rows.push_back({std::to_string(i), std::to_string(fold_of[static_cast<std::size_t>(i)])});
  write_csv(path, doc);
}

}  // namespace fgnam
