#pragma once
#include <cstdint>
#include <string>
#include <vector>

namespace fgnam {

/// Subjects ordered by ascending observed time; at tied times subjects with
/// events (E > 0) come before censorings. Also stores the distinct event
/// times of each cause with their tie counts.
struct EventIndex {
  struct CauseTimes {
    std::vector<double> times;  // distinct, ascending
    std::vector<int> counts;    // d_i >= 1 per time
  };
  std::vector<int> order;          // permutation of 0..n-1
  std::vector<CauseTimes> causes;  // index k-1 for cause k
  int num_risks = 0;

  static EventIndex build(const std::vector<double>& T, const std::vector<int>& E,
                          int num_risks);
};

/// Kaplan-Meier estimate of the censoring survival function G(t):
/// a right-continuous, non-increasing step function with G(0) = 1.
struct CensoringModel {
  std::vector<double> step_times;  // ascending censoring times with mass
  std::vector<double> values;      // G just after each step time
  bool degenerate = false;         // all mass censored at time 0

  /// G(t): right-continuous evaluation.
  double at(double t) const;
  /// G(t-): left limit, value just before t.
  double at_left(double t) const;

  void to_csv(const std::string& path) const;
};

/// Cause weights omega_k = n / (K * n_k).
struct RiskWeights {
  std::vector<double> omega;
  double at(int cause) const { return omega[static_cast<std::size_t>(cause - 1)]; }
};

/// Counter for G-floor clamps in IPCW denominators.
struct ClampStats {
  long long clamps = 0;
};

inline constexpr double kGMinDefault = 1e-4;

/// Subdistribution risk set for cause k at time t:
/// {j : T_j >= t} plus subjects with a competing event strictly before t.
/// Returned ascending by subject id.
std::vector<int> subdist_risk_set(const std::vector<double>& T, const std::vector<int>& E,
                                  int cause, double t);

/// Product-limit estimate of the censoring survival function; E == 0 is the
/// "event" here. The at-risk count at a censoring time u is #{j : T_j >= u}.
CensoringModel fit_censoring_km(const std::vector<double>& T, const std::vector<int>& E);

/// IPCW weight of subject j at evaluation time t:
///   0 if j was censored strictly before t,
///   G(t-) / G(min(T_j, t)-) otherwise (identically 1 while T_j >= t).
/// Denominator values below g_min are clamped (counted in stats).
double ipcw_weight(const CensoringModel& G, double T_j, int E_j, double t,
                   double g_min = kGMinDefault, ClampStats* stats = nullptr);

RiskWeights class_weights(const std::vector<int>& E, int num_risks);

/// Empirical quantiles of observed event times (any cause), linear
/// interpolation between order statistics (type-7 rule).
std::vector<double> time_quantile_grid(const std::vector<double>& T, const std::vector<int>& E,
                                       const std::vector<double>& quantiles);

}  // namespace fgnam
