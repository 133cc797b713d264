#include "fgnam/finegray.hpp"

#include <algorithm>
#include <cmath>
#include <nlohmann/json.hpp>
#include <numeric>

#include "fgnam/csv.hpp"
#include "fgnam/error.hpp"

namespace fgnam {

namespace {

struct EventGroup {
  double time;
  std::vector<int> subjects;  // tied cause-k events
};

struct CauseSweep {
  std::vector<EventGroup> groups;  // ascending time
  std::vector<double> denom;       // D(t) on the exp(eta - m) scale
  std::vector<double> g_left;      // G(t-) per group
  double eta_max = 0.0;
  long long clamps = 0;
};

// Denominators of the cause-k partial likelihood at each distinct event
// time: D(t) = sum_{T_j >= t} e^{eta_j - m}
//            + G(t-) * sum_{T_j < t, competing} e^{eta_j - m} / G(T_j-).
CauseSweep sweep_cause(const Eigen::MatrixXd& eta, const std::vector<double>& T,
                       const std::vector<int>& E, const CensoringModel& G, int cause,
                       double g_min) {
  const int n = static_cast<int>(T.size());
  CauseSweep sw;

  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return T[static_cast<std::size_t>(a)] < T[static_cast<std::size_t>(b)];
  });

  for (int j : order) {
    if (E[static_cast<std::size_t>(j)] != cause) continue;
    const double t = T[static_cast<std::size_t>(j)];
    if (sw.groups.empty() || sw.groups.back().time != t) sw.groups.push_back({t, {}});
    sw.groups.back().subjects.push_back(j);
  }
  if (sw.groups.empty()) return sw;

  sw.eta_max = eta.col(cause - 1).maxCoeff();
  std::vector<double> exp_eta(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j)
    exp_eta[static_cast<std::size_t>(j)] = std::exp(eta(j, cause - 1) - sw.eta_max);

  const std::size_t m = sw.groups.size();
  sw.denom.assign(m, 0.0);
  sw.g_left.resize(m);

  // at-risk part, descending over event times
  {
    double acc = 0.0;
    int ptr = n - 1;  // over order, largest T first
    for (std::size_t gi = m; gi-- > 0;) {
      const double t = sw.groups[gi].time;
      while (ptr >= 0 && T[static_cast<std::size_t>(order[static_cast<std::size_t>(ptr)])] >= t) {
        acc += exp_eta[static_cast<std::size_t>(order[static_cast<std::size_t>(ptr)])];
        --ptr;
      }
      sw.denom[gi] = acc;
    }
  }

  // retained competing-event part, ascending
  {
    double acc = 0.0;
    int ptr = 0;
    for (std::size_t gi = 0; gi < m; ++gi) {
      const double t = sw.groups[gi].time;
      while (ptr < n && T[static_cast<std::size_t>(order[static_cast<std::size_t>(ptr)])] < t) {
        const int j = order[static_cast<std::size_t>(ptr)];
        const int ej = E[static_cast<std::size_t>(j)];
        if (ej != 0 && ej != cause) {
          double g = G.at_left(T[static_cast<std::size_t>(j)]);
          if (g < g_min) {
            g = g_min;
            ++sw.clamps;
          }
          acc += exp_eta[static_cast<std::size_t>(j)] / g;
        }
        ++ptr;
      }
      sw.g_left[gi] = G.at_left(t);
      sw.denom[gi] += sw.g_left[gi] * acc;
    }
  }

  for (std::size_t gi = 0; gi < m; ++gi)
    if (!(sw.denom[gi] > 0.0))
      throw Error("fine-gray: empty weighted risk set at time " + fmt_double(sw.groups[gi].time));
  return sw;
}

}  // namespace

FgLossResult fg_loss(const Eigen::MatrixXd& eta, const std::vector<double>& T,
                     const std::vector<int>& E, const CensoringModel& G, const FgLossConfig& cfg,
                     const RiskWeights& omega, double params_sq_norm) {
  const int K = static_cast<int>(eta.cols());
  if (eta.rows() != static_cast<Eigen::Index>(T.size()))
    throw Error("fine-gray: eta rows do not match subjects");

  FgLossResult res;
  res.per_cause.assign(static_cast<std::size_t>(K), 0.0);
  for (int k = 1; k <= K; ++k) {
    CauseSweep sw = sweep_cause(eta, T, E, G, k, cfg.g_min);
    res.ipcw_clamps += sw.clamps;
    double lk = 0.0;
    for (std::size_t gi = 0; gi < sw.groups.size(); ++gi) {
      const auto& grp = sw.groups[gi];
      for (int j : grp.subjects) lk -= eta(j, k - 1);
      lk += double(grp.subjects.size()) * (sw.eta_max + std::log(sw.denom[gi]));
    }
    res.per_cause[static_cast<std::size_t>(k - 1)] = lk;
    const double w = cfg.use_class_weights ? omega.at(k) : 1.0;
    res.total += w * lk;
  }
  res.total += cfg.gamma * params_sq_norm;
  return res;
}

Eigen::MatrixXd fg_loss_grad(const Eigen::MatrixXd& eta, const std::vector<double>& T,
                             const std::vector<int>& E, const CensoringModel& G,
                             const FgLossConfig& cfg, const RiskWeights& omega,
                             long long* clamps) {
  const int n = static_cast<int>(T.size());
  const int K = static_cast<int>(eta.cols());
  Eigen::MatrixXd grad = Eigen::MatrixXd::Zero(n, K);

  for (int k = 1; k <= K; ++k) {
    CauseSweep sw = sweep_cause(eta, T, E, G, k, cfg.g_min);
    if (clamps) *clamps += sw.clamps;
    if (sw.groups.empty()) continue;
    const std::size_t m = sw.groups.size();

    // prefix[gi] = sum_{g <= gi} d_g / D_g        (at-risk phase)
    // suffix[gi] = sum_{g >= gi} d_g G(t_g-) / D_g (retained phase)
    std::vector<double> prefix(m), suffix(m + 1, 0.0);
    double acc = 0.0;
    for (std::size_t gi = 0; gi < m; ++gi) {
      acc += double(sw.groups[gi].subjects.size()) / sw.denom[gi];
      prefix[gi] = acc;
    }
    for (std::size_t gi = m; gi-- > 0;)
      suffix[gi] = suffix[gi + 1] +
                   double(sw.groups[gi].subjects.size()) * sw.g_left[gi] / sw.denom[gi];

    std::vector<double> times;
    times.reserve(m);
    for (const auto& g : sw.groups) times.push_back(g.time);

    const double w = cfg.use_class_weights ? omega.at(k) : 1.0;
    for (int j = 0; j < n; ++j) {
      const double tj = T[static_cast<std::size_t>(j)];
      const double ej_exp = std::exp(eta(j, k - 1) - sw.eta_max);
      double soft = 0.0;

      // event times t <= T_j: subject at risk with weight 1
      auto up = std::upper_bound(times.begin(), times.end(), tj);
      if (up != times.begin())
        soft += ej_exp * prefix[static_cast<std::size_t>(up - times.begin() - 1)];

      // event times t > T_j: retained after a competing event
      const int ej = E[static_cast<std::size_t>(j)];
      if (ej != 0 && ej != k) {
        double g = G.at_left(tj);
        if (g < cfg.g_min) g = cfg.g_min;
        soft += (ej_exp / g) * suffix[static_cast<std::size_t>(up - times.begin())];
      }

      grad(j, k - 1) = w * (soft - (ej == k ? 1.0 : 0.0));
    }
  }
  return grad;
}

double BaselineCif::cumhaz_at(int cause, double t) const {
  const auto& c = causes[static_cast<std::size_t>(cause - 1)];
  auto it = std::upper_bound(c.times.begin(), c.times.end(), t);
  if (it == c.times.begin()) return 0.0;
  return c.cumhaz[static_cast<std::size_t>(it - c.times.begin() - 1)];
}

double BaselineCif::cif_at(int cause, double t) const {
  const auto& c = causes[static_cast<std::size_t>(cause - 1)];
  auto it = std::upper_bound(c.times.begin(), c.times.end(), t);
  if (it == c.times.begin()) return 0.0;
  return c.cif[static_cast<std::size_t>(it - c.times.begin() - 1)];
}

BaselineCif fit_baseline(const Eigen::MatrixXd& eta, const std::vector<double>& T,
                         const std::vector<int>& E, const CensoringModel& G, double g_min) {
  const int K = static_cast<int>(eta.cols());
  BaselineCif base;
  base.causes.resize(static_cast<std::size_t>(K));
  base.max_time = T.empty() ? 0.0 : *std::max_element(T.begin(), T.end());

  for (int k = 1; k <= K; ++k) {
    CauseSweep sw = sweep_cause(eta, T, E, G, k, g_min);
    auto& c = base.causes[static_cast<std::size_t>(k - 1)];
    double cum = 0.0;
    for (std::size_t gi = 0; gi < sw.groups.size(); ++gi) {
      // real-scale denominator is exp(eta_max) * D
      cum += double(sw.groups[gi].subjects.size()) /
             (std::exp(sw.eta_max) * sw.denom[gi]);
      c.times.push_back(sw.groups[gi].time);
      c.cumhaz.push_back(cum);
      c.cif.push_back(1.0 - std::exp(-cum));
    }
  }
  return base;
}

CifPrediction predict_cif(const BaselineCif& baseline, const Eigen::MatrixXd& eta_new,
                          const std::vector<double>& times) {
  for (std::size_t i = 1; i < times.size(); ++i)
    if (times[i] < times[i - 1]) throw Error("predict: times must be ascending");

  const int m = static_cast<int>(eta_new.rows());
  const int K = static_cast<int>(eta_new.cols());
  if (static_cast<int>(baseline.causes.size()) != K)
    throw Error("predict: baseline causes do not match eta columns");

  CifPrediction pred;
  pred.times = times;
  pred.extrapolated.reserve(times.size());
  for (double t : times) pred.extrapolated.push_back(t > baseline.max_time);

  for (int k = 1; k <= K; ++k) {
    Eigen::MatrixXd cif(m, static_cast<Eigen::Index>(times.size()));
    for (std::size_t ti = 0; ti < times.size(); ++ti) {
      const double f0 = baseline.cif_at(k, times[ti]);
      const double base = 1.0 - f0;
      for (int s = 0; s < m; ++s) {
        const double e = std::exp(eta_new(s, k - 1));
        double f;
        if (f0 == 0.0) {
          f = 0.0;
        } else if (e == 1.0) {
          f = f0;  // reproduce the baseline bit for bit
        } else {
          f = 1.0 - std::pow(base, e);
        }
        cif(s, static_cast<Eigen::Index>(ti)) = f;
      }
    }
    pred.cif_by_cause.push_back(std::move(cif));
  }
  return pred;
}

void BaselineCif::to_csv(const std::string& path) const {
  CsvDoc doc;
  doc.header = {"cause", "time", "cum_hazard", "baseline_cif"};
  for (std::size_t k = 0; k < causes.size(); ++k) {
    const auto& c = causes[k];
    for (std::size_t i = 0; i < c.times.size(); ++i)
      doc.rows.push_back({std::to_string(k + 1), fmt_double(c.times[i]),
                          fmt_double(c.cumhaz[i]), fmt_double(c.cif[i])});
  }
  write_csv(path, doc);
}

nlohmann::json BaselineCif::to_json() const {
  nlohmann::json j;
  j["max_time"] = max_time;
  j["causes"] = nlohmann::json::array();
  for (const auto& c : causes) {
    nlohmann::json cj;
    cj["times"] = c.times;
    cj["cumhaz"] = c.cumhaz;
    j["causes"].push_back(cj);
  }
  return j;
}

BaselineCif BaselineCif::from_json(const nlohmann::json& j) {
  BaselineCif base;
  base.max_time = j.at("max_time").get<double>();
  for (const auto& cj : j.at("causes")) {
    BaselineCif::Cause c;
    c.times = cj.at("times").get<std::vector<double>>();
    c.cumhaz = cj.at("cumhaz").get<std::vector<double>>();
    c.cif.reserve(c.cumhaz.size());
    for (double h : c.cumhaz) c.cif.push_back(1.0 - std::exp(-h));
    base.causes.push_back(std::move(c));
  }
  return base;
}

void CifPrediction::to_csv(const std::string& path) const {
  CsvDoc doc;
  doc.header = {"subject_id", "cause", "time", "cif", "extrapolated"};
  const int m = cif_by_cause.empty() ? 0 : static_cast<int>(cif_by_cause[0].rows());
  for (int s = 0; s < m; ++s)
    for (std::size_t k = 0; k < cif_by_cause.size(); ++k)
      for (std::size_t ti = 0; ti < times.size(); ++ti)
        doc.rows.push_back({std::to_string(s), std::to_string(k + 1), fmt_double(times[ti]),
                            fmt_double(cif_by_cause[k](s, static_cast<Eigen::Index>(ti))),
                            extrapolated[ti] ? "1" : "0"});
  write_csv(path, doc);
}

}  // namespace fgnam
