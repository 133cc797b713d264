#include "fgnam/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "fgnam/csv.hpp"
#include "fgnam/error.hpp"

namespace fgnam {

namespace {

double floored(double g, double g_min, long long* clamps) {
  if (g < g_min) {
    if (clamps) ++(*clamps);
    return g_min;
  }
  return g;
}

double concordance_credit(double a, double b) {
  if (a > b) return 1.0;
  if (a == b) return 0.5;
  return 0.0;
}

}  // namespace

std::optional<double> td_auc(const std::vector<double>& scores, const std::vector<double>& T,
                             const std::vector<int>& E, int cause, const CensoringModel& G,
                             double t, double g_min, long long* clamps) {
  const std::size_t n = T.size();
  std::vector<std::size_t> cases, controls;
  std::vector<double> wc, wk;
  for (std::size_t i = 0; i < n; ++i) {
    if (E[i] == cause && T[i] <= t) {
      cases.push_back(i);
      wc.push_back(1.0 / floored(G.at_left(T[i]), g_min, clamps));
    } else if (T[i] > t) {
      controls.push_back(i);
      wk.push_back(1.0 / floored(G.at(t), g_min, clamps));
    } else if (E[i] != 0 && E[i] != cause) {
      controls.push_back(i);
      wk.push_back(1.0 / floored(G.at_left(T[i]), g_min, clamps));
    }
  }
  if (cases.empty() || controls.empty()) return std::nullopt;

  double num = 0.0, case_w = 0.0, ctrl_w = 0.0;
  for (double w : wc) case_w += w;
  for (double w : wk) ctrl_w += w;
  for (std::size_t a = 0; a < cases.size(); ++a)
    for (std::size_t b = 0; b < controls.size(); ++b)
      num += wc[a] * wk[b] * concordance_credit(scores[cases[a]], scores[controls[b]]);
  return num / (case_w * ctrl_w);
}

std::optional<double> td_ci(const std::vector<double>& grid_times, const Eigen::MatrixXd& cif,
                            const std::vector<double>& T, const std::vector<int>& E, int cause,
                            const CensoringModel& G, double horizon, double g_min,
                            long long* clamps) {
  const std::size_t n = T.size();
  auto cif_at = [&](std::size_t subject, double t) -> double {
    auto it = std::upper_bound(grid_times.begin(), grid_times.end(), t);
    if (it == grid_times.begin()) return 0.0;
    return cif(static_cast<Eigen::Index>(subject),
               static_cast<Eigen::Index>(it - grid_times.begin() - 1));
  };

  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (E[i] != cause || T[i] > horizon) continue;
    const double w_i = 1.0 / floored(G.at_left(T[i]), g_min, clamps);
    const double f_i = cif_at(i, T[i]);
    for (std::size_t j = 0; j < n; ++j) {
      const bool comparable =
          (T[i] < T[j]) || (T[i] <= T[j] && E[j] != 0 && E[j] != cause);
      if (!comparable) continue;
      const double w = w_i * w_i;
      num += w * concordance_credit(f_i, cif_at(j, T[i]));
      den += w;
    }
  }
  if (den == 0.0) return std::nullopt;
  return num / den;
}

double brier(const std::vector<double>& cif_at_t, const std::vector<double>& T,
             const std::vector<int>& E, int cause, const CensoringModel& G, double t,
             double g_min, long long* clamps) {
  const std::size_t n = T.size();
  if (cif_at_t.size() != n) throw Error("brier: prediction length mismatch");
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double w = 0.0;
    if (T[i] <= t && E[i] > 0)
      w = 1.0 / floored(G.at_left(T[i]), g_min, clamps);
    else if (T[i] > t)
      w = 1.0 / floored(G.at(t), g_min, clamps);
    const double outcome = (E[i] == cause && T[i] <= t) ? 1.0 : 0.0;
    const double d = outcome - cif_at_t[i];
    total += w * d * d;
  }
  return total / double(n);
}

std::vector<double> evaluation_grid(const SurvivalDataset& data,
                                    const std::vector<double>& horizons) {
  std::set<double> grid(horizons.begin(), horizons.end());
  const double t_max = *std::max_element(horizons.begin(), horizons.end());
  for (int i = 0; i < data.n(); ++i)
    if (data.E[static_cast<std::size_t>(i)] > 0 && data.T[static_cast<std::size_t>(i)] <= t_max)
      grid.insert(data.T[static_cast<std::size_t>(i)]);
  return {grid.begin(), grid.end()};
}

MetricsReport evaluate(const CifPrediction& pred, const SurvivalDataset& data,
                       const CensoringModel& G, const std::vector<double>& quantiles,
                       const std::vector<double>* horizons, double g_min) {
  MetricsReport report;
  report.horizons =
      horizons ? *horizons : time_quantile_grid(data.T, data.E, quantiles);
  for (double q : quantiles) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "q%02d", int(std::lround(q * 100)));
    report.quantile_labels.emplace_back(buf);
  }
  if (report.quantile_labels.size() != report.horizons.size())
    report.quantile_labels.assign(report.horizons.size(), "t");

  if (pred.times.empty() || pred.times.back() < report.horizons.back())
    throw Error("evaluate: prediction grid does not cover the horizons");

  const int K = static_cast<int>(pred.cif_by_cause.size());
  report.cells.assign(static_cast<std::size_t>(K),
                      std::vector<MetricsReport::Cell>(report.horizons.size()));

  for (int k = 1; k <= K; ++k) {
    const Eigen::MatrixXd& cif = pred.cif_by_cause[static_cast<std::size_t>(k - 1)];
    for (std::size_t h = 0; h < report.horizons.size(); ++h) {
      const double t = report.horizons[h];
      auto it = std::upper_bound(pred.times.begin(), pred.times.end(), t);
      const Eigen::Index col = it == pred.times.begin()
                                   ? 0
                                   : static_cast<Eigen::Index>(it - pred.times.begin() - 1);
      std::vector<double> scores(static_cast<std::size_t>(data.n()));
      for (int i = 0; i < data.n(); ++i)
        scores[static_cast<std::size_t>(i)] =
            it == pred.times.begin() ? 0.0 : cif(i, col);

      auto& cell = report.cells[static_cast<std::size_t>(k - 1)][h];
      cell.td_auc = td_auc(scores, data.T, data.E, k, G, t, g_min, &report.ipcw_clamps);
      cell.td_ci =
          td_ci(pred.times, cif, data.T, data.E, k, G, t, g_min, &report.ipcw_clamps);
      cell.brier = brier(scores, data.T, data.E, k, G, t, g_min, &report.ipcw_clamps);
      int n_cases = 0, n_controls = 0;
      for (int i = 0; i < data.n(); ++i) {
        const auto idx = static_cast<std::size_t>(i);
        if (data.E[idx] == k && data.T[idx] <= t) ++n_cases;
        else if (data.T[idx] > t || (data.E[idx] != 0 && data.E[idx] != k)) ++n_controls;
      }
      cell.n = n_cases + n_controls;
    }
  }
  return report;
}

void MetricsReport::to_csv(const std::string& path) const {
  CsvDoc doc;
  doc.header = {"cause", "horizon", "horizon_time", "metric", "value", "n"};
  auto cell_value = [](const std::optional<double>& v) {
    return v ? fmt_double(*v) : std::string("NA");
  };
  for (std::size_t k = 0; k < cells.size(); ++k) {
    for (std::size_t h = 0; h < horizons.size(); ++h) {
      const Cell& c = cells[k][h];
      const std::string cause = std::to_string(k + 1);
      const std::string label = quantile_labels[h];
      const std::string time = fmt_double(horizons[h]);
      const std::string n = std::to_string(c.n);
      doc.rows.push_back({cause, label, time, "td_auc", cell_value(c.td_auc), n});
      doc.rows.push_back({cause, label, time, "td_ci", cell_value(c.td_ci), n});
      doc.rows.push_back({cause, label, time, "brier", cell_value(c.brier), n});
    }
  }
  write_csv(path, doc);
}

}  // namespace fgnam
