#pragma once
#include <Eigen/Core>
#include <optional>
#include <string>
#include <vector>

#include "fgnam/dataset.hpp"
#include "fgnam/finegray.hpp"
#include "fgnam/survival.hpp"

namespace fgnam {

/// Cumulative/dynamic AUC for cause k at horizon t, IPCW-weighted, 0.5
/// credit for score ties. Cases are subjects with a cause-k event by t;
/// controls are subjects still event-free at t or with a competing event by
/// t. Returns nullopt when either group is empty.
std::optional<double> td_auc(const std::vector<double>& scores, const std::vector<double>& T,
                             const std::vector<int>& E, int cause, const CensoringModel& G,
                             double t, double g_min = kGMinDefault,
                             long long* clamps = nullptr);

/// Time-dependent concordance for cause k up to `horizon`: over pairs (i,j)
/// with E_i = k, T_i <= horizon and (T_i < T_j, or T_i <= T_j with E_j a
/// competing event), credit when F_k(T_i|x_i) > F_k(T_i|x_j); 0.5 for ties.
/// Pairs are weighted by 1/G(T_i-)^2. `cif` holds F_k on `grid_times`
/// (step lookup; values before the first grid time are 0).
std::optional<double> td_ci(const std::vector<double>& grid_times, const Eigen::MatrixXd& cif,
                            const std::vector<double>& T, const std::vector<int>& E, int cause,
                            const CensoringModel& G, double horizon,
                            double g_min = kGMinDefault, long long* clamps = nullptr);

/// IPCW Brier score for cause k at horizon t: subjects with any event by t
/// weigh 1/G(T-), subjects beyond t weigh 1/G(t), censored-by-t subjects
/// drop out; the mean is over all n subjects.
double brier(const std::vector<double>& cif_at_t, const std::vector<double>& T,
             const std::vector<int>& E, int cause, const CensoringModel& G, double t,
             double g_min = kGMinDefault, long long* clamps = nullptr);

struct MetricsReport {
  struct Cell {
    std::optional<double> td_auc;
    std::optional<double> td_ci;
    std::optional<double> brier;
    int n = 0;  // cases + controls at the horizon
  };
  std::vector<double> horizons;
  std::vector<std::string> quantile_labels;
  std::vector<std::vector<Cell>> cells;  // [cause-1][horizon]
  long long ipcw_clamps = 0;

  void to_csv(const std::string& path) const;
};

/// Grid for CIF predictions feeding evaluate(): all event times up to the
/// last horizon, plus the horizons themselves.
std::vector<double> evaluation_grid(const SurvivalDataset& data,
                                    const std::vector<double>& horizons);

/// Full Table-style report at the given quantile horizons (defaults to the
/// q.25/.50/.75 event-time quantiles of `data`).
MetricsReport evaluate(const CifPrediction& pred, const SurvivalDataset& data,
                       const CensoringModel& G,
                       const std::vector<double>& quantiles = {0.25, 0.5, 0.75},
                       const std::vector<double>* horizons = nullptr,
                       double g_min = kGMinDefault);

}  // namespace fgnam
