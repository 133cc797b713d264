#pragma once
#include <Eigen/Core>
#include <nlohmann/json_fwd.hpp>
#include <string>
#include <vector>

#include "fgnam/survival.hpp"

namespace fgnam {

struct FgLossConfig {
  double gamma = 0.0;            // L2 coefficient on the parameter vector
  bool use_class_weights = true;
  double g_min = kGMinDefault;   // floor on G values in IPCW denominators
};

struct FgLossResult {
  double total = 0.0;               // sum_k omega_k L_k + gamma * ||theta||^2
  std::vector<double> per_cause;    // unweighted L_k
  long long ipcw_clamps = 0;
};

/// IPCW-weighted negative log partial likelihood over subdistribution risk
/// sets, Breslow handling for tied event times, log-sum-exp stabilized.
/// `params_sq_norm` lets the caller supply ||theta||^2 for the gamma term.
FgLossResult fg_loss(const Eigen::MatrixXd& eta, const std::vector<double>& T,
                     const std::vector<int>& E, const CensoringModel& G, const FgLossConfig& cfg,
                     const RiskWeights& omega, double params_sq_norm = 0.0);

/// d(loss)/d(eta): n x K. Column sums vanish per cause (shift invariance).
Eigen::MatrixXd fg_loss_grad(const Eigen::MatrixXd& eta, const std::vector<double>& T,
                             const std::vector<int>& E, const CensoringModel& G,
                             const FgLossConfig& cfg, const RiskWeights& omega,
                             long long* clamps = nullptr);

/// Per-cause cumulative baseline subdistribution hazard (Breslow) with the
/// derived baseline CIF F0 = 1 - exp(-Lambda0).
struct BaselineCif {
  struct Cause {
    std::vector<double> times;    // ascending event times of this cause
    std::vector<double> cumhaz;   // non-decreasing, starting after time 0
    std::vector<double> cif;      // 1 - exp(-cumhaz)
  };
  std::vector<Cause> causes;
  double max_time = 0.0;  // largest observed time in the fitting data

  double cumhaz_at(int cause, double t) const;
  double cif_at(int cause, double t) const;

  void to_csv(const std::string& path) const;
  nlohmann::json to_json() const;
  static BaselineCif from_json(const nlohmann::json& j);
};

BaselineCif fit_baseline(const Eigen::MatrixXd& eta, const std::vector<double>& T,
                         const std::vector<int>& E, const CensoringModel& G,
                         double g_min = kGMinDefault);

/// CIF predictions on a time grid for new subjects.
struct CifPrediction {
  std::vector<double> times;                  // ascending
  std::vector<Eigen::MatrixXd> cif_by_cause;  // per cause: m x |times|
  std::vector<bool> extrapolated;             // per time: beyond training range

  void to_csv(const std::string& path) const;
};

/// F_k(t|x) = 1 - (1 - F0_k(t))^{exp(eta_k)}, step lookup on the baseline;
/// times beyond the training range carry the last value forward and are
/// flagged.
CifPrediction predict_cif(const BaselineCif& baseline, const Eigen::MatrixXd& eta_new,
                          const std::vector<double>& times);

}  // namespace fgnam
