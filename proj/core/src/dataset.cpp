#include "fgnam/dataset.hpp"

#include <algorithm>

#include "fgnam/csv.hpp"
#include "fgnam/error.hpp"

namespace fgnam {

SurvivalDataset SurvivalDataset::subset(const std::vector<int>& idx) const {
  SurvivalDataset out;
  out.num_risks = num_risks;
  out.feature_names = feature_names;
  out.feature_binary = feature_binary;
  out.X.resize(static_cast<Eigen::Index>(idx.size()), X.cols());
  out.T.resize(idx.size());
  out.E.resize(idx.size());
  for (std::size_t i = 0; i < idx.size(); ++i) {
    const int r = idx[i];
    if (r < 0 || r >= n()) throw Error("dataset: subset index out of range");
    out.X.row(static_cast<Eigen::Index>(i)) = X.row(r);
    out.T[i] = T[static_cast<std::size_t>(r)];
    out.E[i] = E[static_cast<std::size_t>(r)];
  }
  return out;
}

bool SurvivalDataset::has_cause(int k) const {
  return std::find(E.begin(), E.end(), k) != E.end();
}

void SurvivalDataset::require_all_causes(const std::string& context) const {
  for (int k = 1; k <= num_risks; ++k)
    if (!has_cause(k))
      throw Error(context + ": no subjects with event " + std::to_string(k));
}

void SurvivalDataset::to_csv(const std::string& path) const {
  CsvDoc doc;
  doc.header = feature_names;
  doc.header.push_back("time");
  doc.header.push_back("event");
  for (int r = 0; r < n(); ++r) {
    std::vector<std::string> row;
    row.reserve(static_cast<std::size_t>(p()) + 2);
    for (int c = 0; c < p(); ++c) row.push_back(fmt_double(X(r, c)));
    row.push_back(fmt_double(T[static_cast<std::size_t>(r)]));
    row.push_back(std::to_string(E[static_cast<std::size_t>(r)]));
    doc.rows.push_back(std::move(row));
  }
  write_csv(path, doc);
}

}  // namespace fgnam
