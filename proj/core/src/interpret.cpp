#include "fgnam/interpret.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "fgnam/csv.hpp"
#include "fgnam/error.hpp"

namespace fgnam {

std::vector<ShapeCurve> shape_curves(const ModelParams& params, const PreprocessPlan* plan,
                                     const SurvivalDataset& data, int grid_size) {
  if (grid_size < 2) throw Error("shape curves: grid size must be >= 2");
  if (data.n() == 0) throw Error("shape curves: empty dataset");
  const int p = params.hyper.num_features;
  const int K = params.hyper.num_risks;
  if (data.p() != p) throw Error("shape curves: dataset width does not match model");

  std::vector<ShapeCurve> out;
  out.reserve(static_cast<std::size_t>(p * K));
  for (int i = 0; i < p; ++i) {
    const bool binary =
        i < static_cast<int>(data.feature_binary.size()) && data.feature_binary[static_cast<std::size_t>(i)];
    std::vector<double> grid;
    if (binary) {
      grid = {0.0, 1.0};
    } else {
      const double lo = data.X.col(i).minCoeff();
      const double hi = data.X.col(i).maxCoeff();
      grid.reserve(static_cast<std::size_t>(grid_size));
      for (int g = 0; g < grid_size; ++g)
        grid.push_back(lo + (hi - lo) * double(g) / double(grid_size - 1));
    }
    for (int k = 1; k <= K; ++k) {
      ShapeCurve curve;
      curve.feature = i;
      curve.risk = k;
      curve.feature_name = i < static_cast<int>(data.feature_names.size())
                               ? data.feature_names[static_cast<std::size_t>(i)]
                               : "x" + std::to_string(i + 1);
      curve.grid = grid;
      curve.raw.reserve(grid.size());
      curve.values.reserve(grid.size());
      for (double x : grid) {
        curve.raw.push_back(plan ? plan->inverse_value(i, x) : x);
        curve.values.push_back(shape_value(params, i, k, x));
      }
      out.push_back(std::move(curve));
    }
  }
  return out;
}

ShapeCurve average_curves(const std::vector<ShapeCurve>& curves) {
  if (curves.empty()) throw Error("average curves: empty input");
  ShapeCurve avg = curves.front();
  for (std::size_t c = 1; c < curves.size(); ++c) {
    const ShapeCurve& cur = curves[c];
    if (cur.grid != avg.grid || cur.feature != avg.feature || cur.risk != avg.risk)
      throw Error("average curves: mismatched curves");
    for (std::size_t g = 0; g < avg.values.size(); ++g) avg.values[g] += cur.values[g];
  }
  for (double& v : avg.values) v /= double(curves.size());
  return avg;
}

ImportanceTable importance(const ModelParams& params, const SurvivalDataset& data) {
  if (data.n() == 0) throw Error("importance: empty dataset");
  const int p = params.hyper.num_features;
  const int K = params.hyper.num_risks;
  ImportanceTable table;
  table.scores = Eigen::MatrixXd::Zero(p, K);
  table.feature_names = data.feature_names;

  for (int i = 0; i < p; ++i) {
    for (int r = 0; r < data.n(); ++r) {
      const Eigen::VectorXd h = featurenet_eval(params, i, data.X(r, i));
      for (int k = 1; k <= K; ++k)
        table.scores(i, k - 1) += std::abs(project(params, i, k, h));
    }
  }
  table.scores /= double(data.n());

  table.ranking.resize(static_cast<std::size_t>(K));
  for (int k = 0; k < K; ++k) {
    auto& rank = table.ranking[static_cast<std::size_t>(k)];
    rank.resize(static_cast<std::size_t>(p));
    std::iota(rank.begin(), rank.end(), 0);
    std::stable_sort(rank.begin(), rank.end(), [&](int a, int b) {
      return table.scores(a, k) > table.scores(b, k);
    });
  }
  return table;
}

void ImportanceTable::to_csv(const std::string& path) const {
  CsvDoc doc;
  doc.header = {"feature", "risk", "importance", "rank"};
  const int p = static_cast<int>(scores.rows());
  const int K = static_cast<int>(scores.cols());
  for (int k = 0; k < K; ++k) {
    std::vector<int> rank_of(static_cast<std::size_t>(p));
    for (int pos = 0; pos < p; ++pos)
      rank_of[static_cast<std::size_t>(ranking[static_cast<std::size_t>(k)][static_cast<std::size_t>(pos)])] = pos + 1;
    for (int i = 0; i < p; ++i) {
      const std::string name = i < static_cast<int>(feature_names.size())
                                   ? feature_names[static_cast<std::size_t>(i)]
                                   : "x" + std::to_string(i + 1);
      doc.rows.push_back({name, std::to_string(k + 1), fmt_double(scores(i, k)),
                          std::to_string(rank_of[static_cast<std::size_t>(i)])});
    }
  }
  write_csv(path, doc);
}

void shape_curves_to_csv(const std::string& path, const std::vector<ShapeCurve>& curves) {
  CsvDoc doc;
  doc.header = {"feature", "risk", "x_raw", "x_scaled", "s_value"};
  for (const auto& c : curves)
    for (std::size_t g = 0; g < c.grid.size(); ++g)
      doc.rows.push_back({c.feature_name, std::to_string(c.risk), fmt_double(c.raw[g]),
                          fmt_double(c.grid[g]), fmt_double(c.values[g])});
  write_csv(path, doc);
}

}  // namespace fgnam
