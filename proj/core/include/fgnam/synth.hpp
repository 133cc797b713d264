#pragma once
#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

#include "fgnam/dataset.hpp"

namespace fgnam {

/// Competing-risks generator with proportional subdistribution hazards for
/// cause 1, so a model trained on its output has a well-specified target.
/// Cause-1 times are drawn by inverting
///   F_1(t|x) = 1 - (1 - F01(t))^{exp(eta_1(x))},  F01(t) = pi * (1 - e^{-t}),
/// the leftover mass goes to cause 2 with exponential conditional times, and
/// censoring is independent uniform calibrated to a target rate.
struct SynthSpec {
  enum class Fn { Zero, Linear, Quadratic, Sine };
  struct Effect {
    Fn kind = Fn::Zero;
    double coef = 0.0;
    double freq = 1.0;  // sine only
  };

  int n = 4000;
  int p = 3;
  std::vector<std::vector<Effect>> effects;  // [cause][feature], 2 causes
  double plateau = 0.6;                      // pi, cause-1 mass at eta = 0
  double cause2_rate = 1.0;
  double censoring_rate = 0.2;
  double x_lo = -2.0, x_hi = 2.0;
  std::uint64_t seed = 1;

  /// eta_1 linear in features 1-2 with coefficients (1, -1), zero in
  /// feature 3; eta_2 quadratic in feature 1.
  static SynthSpec defaults();
  void validate() const;
};

struct SynthResult {
  SurvivalDataset data;
  Eigen::MatrixXd true_eta;  // n x 2
  double plateau = 0.0;
  double achieved_censoring = 0.0;
  std::vector<std::string> warnings;

  void truth_to_csv(const std::string& path) const;
};

double synth_effect_value(const SynthSpec::Effect& e, double x);

/// True cause-1 CIF under the generator.
double synth_true_cif1(double t, double eta1, double plateau);

SynthResult generate(const SynthSpec& spec);

}  // namespace fgnam
