#include "fgnam/survival.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "fgnam/csv.hpp"
#include "fgnam/error.hpp"

namespace fgnam {

EventIndex EventIndex::build(const std::vector<double>& T, const std::vector<int>& E,
                             int num_risks) {
  const std::size_t n = T.size();
  if (E.size() != n) throw Error("event index: T and E length mismatch");
  EventIndex idx;
  idx.num_risks = num_risks;
  idx.order.resize(n);
  std::iota(idx.order.begin(), idx.order.end(), 0);
  std::stable_sort(idx.order.begin(), idx.order.end(), [&](int a, int b) {
    if (T[a] != T[b]) return T[a] < T[b];
    return (E[a] > 0) && (E[b] == 0);  // events before censorings at ties
  });
  idx.causes.resize(static_cast<std::size_t>(num_risks));
  for (int k = 1; k <= num_risks; ++k) {
    auto& ct = idx.causes[static_cast<std::size_t>(k - 1)];
    for (int i : idx.order) {
      if (E[static_cast<std::size_t>(i)] != k) continue;
      double t = T[static_cast<std::size_t>(i)];
      if (!ct.times.empty() && ct.times.back() == t) {
        ++ct.counts.back();
      } else {
        ct.times.push_back(t);
        ct.counts.push_back(1);
      }
    }
  }
  return idx;
}

std::vector<int> subdist_risk_set(const std::vector<double>& T, const std::vector<int>& E,
                                  int cause, double t) {
  std::vector<int> out;
  for (std::size_t j = 0; j < T.size(); ++j) {
    if (T[j] >= t || (E[j] != 0 && E[j] != cause)) out.push_back(static_cast<int>(j));
  }
  return out;
}

CensoringModel fit_censoring_km(const std::vector<double>& T, const std::vector<int>& E) {
  const std::size_t n = T.size();
  if (n == 0) throw Error("censoring km: empty sample");
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return T[static_cast<std::size_t>(a)] < T[static_cast<std::size_t>(b)]; });

  CensoringModel model;
  double g = 1.0;
  std::size_t i = 0;
  while (i < n) {
    const double t = T[static_cast<std::size_t>(order[i])];
    const std::size_t at_risk = n - i;  // #{j : T_j >= t}
    int censored_here = 0;
    std::size_t j = i;
    while (j < n && T[static_cast<std::size_t>(order[j])] == t) {
      if (E[static_cast<std::size_t>(order[j])] == 0) ++censored_here;
      ++j;
    }
    if (censored_here > 0) {
      g *= 1.0 - double(censored_here) / double(at_risk);
      model.step_times.push_back(t);
      model.values.push_back(g);
    }
    i = j;
  }
  if (!model.step_times.empty() && model.step_times.front() == 0.0 &&
      model.values.front() == 0.0) {
    model.degenerate = true;
  }
  return model;
}

double CensoringModel::at(double t) const {
  // last step time <= t
  auto it = std::upper_bound(step_times.begin(), step_times.end(), t);
  if (it == step_times.begin()) return 1.0;
  return values[static_cast<std::size_t>(it - step_times.begin() - 1)];
}

double CensoringModel::at_left(double t) const {
  // last step time strictly < t
  auto it = std::lower_bound(step_times.begin(), step_times.end(), t);
  if (it == step_times.begin()) return 1.0;
  return values[static_cast<std::size_t>(it - step_times.begin() - 1)];
}

void CensoringModel::to_csv(const std::string& path) const {
  CsvDoc doc;
  doc.header = {"time", "G"};
  doc.rows.push_back({"0", "1"});
  for (std::size_t i = 0; i < step_times.size(); ++i)
    doc.rows.push_back({fmt_double(step_times[i]), fmt_double(values[i])});
  write_csv(path, doc);
}

double ipcw_weight(const CensoringModel& G, double T_j, int E_j, double t, double g_min,
                   ClampStats* stats) {
  if (E_j == 0 && T_j < t) return 0.0;
  if (T_j >= t) return 1.0;  // G(t-)/G(t-): the ratio is identically one
  const double num = G.at_left(t);
  double den = G.at_left(T_j);
  if (den < g_min) {
    den = g_min;
    if (stats) ++stats->clamps;
  }
  return num / den;
}

RiskWeights class_weights(const std::vector<int>& E, int num_risks) {
  const double n = static_cast<double>(E.size());
  RiskWeights w;
  w.omega.resize(static_cast<std::size_t>(num_risks));
  for (int k = 1; k <= num_risks; ++k) {
    long long nk = std::count(E.begin(), E.end(), k);
    if (nk == 0) throw Error("class weights: no subjects with event " + std::to_string(k));
    w.omega[static_cast<std::size_t>(k - 1)] = n / (double(num_risks) * double(nk));
  }
  return w;
}

std::vector<double> time_quantile_grid(const std::vector<double>& T, const std::vector<int>& E,
                                       const std::vector<double>& quantiles) {
  std::vector<double> event_times;
  for (std::size_t i = 0; i < T.size(); ++i)
    if (E[i] > 0) event_times.push_back(T[i]);
  if (event_times.empty()) throw Error("time quantiles: no observed events");
  std::sort(event_times.begin(), event_times.end());
  const std::size_t n = event_times.size();

  std::vector<double> out;
  out.reserve(quantiles.size());
  for (double q : quantiles) {
    if (!(q > 0.0 && q < 1.0)) throw Error("time quantiles: q must lie in (0,1)");
    const double h = q * double(n - 1);
    const std::size_t lo = static_cast<std::size_t>(std::floor(h));
    const double frac = h - double(lo);
    double v = event_times[lo];
    if (frac > 0.0 && lo + 1 < n) v += frac * (event_times[lo + 1] - event_times[lo]);
    out.push_back(v);
  }
  return out;
}

}  // namespace fgnam
