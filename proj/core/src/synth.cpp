#include "fgnam/synth.hpp"

#include <algorithm>
#include <cmath>

#include "fgnam/csv.hpp"
#include "fgnam/error.hpp"
#include "fgnam/rng.hpp"

namespace fgnam {

SynthSpec SynthSpec::defaults() {
  SynthSpec s;
  s.effects.assign(2, std::vector<Effect>(3));
  s.effects[0][0] = {Fn::Linear, 1.0, 1.0};
  s.effects[0][1] = {Fn::Linear, -1.0, 1.0};
  s.effects[1][0] = {Fn::Quadratic, 0.5, 1.0};
  return s;
}

void SynthSpec::validate() const {
  if (n < 1) throw UsageError("synth: n must be >= 1");
  if (p < 1) throw UsageError("synth: p must be >= 1");
  if (!(plateau > 0.0 && plateau < 1.0)) throw UsageError("synth: plateau must lie in (0,1)");
  if (!(cause2_rate > 0.0)) throw UsageError("synth: cause2_rate must be > 0");
  if (!(censoring_rate >= 0.0 && censoring_rate < 1.0))
    throw UsageError("synth: censoring_rate must lie in [0,1)");
  if (!(x_lo < x_hi)) throw UsageError("synth: empty covariate range");
  if (effects.size() != 2) throw UsageError("synth: effects must cover 2 causes");
  for (const auto& row : effects)
    if (static_cast<int>(row.size()) != p)
      throw UsageError("synth: effects row width must equal p");
}

double synth_effect_value(const SynthSpec::Effect& e, double x) {
  switch (e.kind) {
    case SynthSpec::Fn::Zero: return 0.0;
    case SynthSpec::Fn::Linear: return e.coef * x;
    case SynthSpec::Fn::Quadratic: return e.coef * x * x;
    case SynthSpec::Fn::Sine: return e.coef * std::sin(e.freq * x);
  }
  return 0.0;
}

double synth_true_cif1(double t, double eta1, double plateau) {
  if (t <= 0.0) return 0.0;
  const double f0 = plateau * (1.0 - std::exp(-t));
  return 1.0 - std::pow(1.0 - f0, std::exp(eta1));
}

namespace {

// inverse of F_1(t|x) = u * p1(x) for u in (0,1)
double invert_cause1_time(double u, double exp_eta1, double p1, double plateau) {
  const double inner = std::pow(1.0 - u * p1, 1.0 / exp_eta1);  // in (1-plateau, 1)
  const double arg = 1.0 - (1.0 - inner) / plateau;             // in (0, 1)
  return -std::log(arg);
}

}  // namespace

SynthResult generate(const SynthSpec& spec) {
  spec.validate();
  Rng rng = Rng::stream(spec.seed, 70);

  SynthResult out;
  out.plateau = spec.plateau;
  const int n = spec.n;
  const int p = spec.p;

  out.data.num_risks = 2;
  out.data.X.resize(n, p);
  out.data.T.resize(static_cast<std::size_t>(n));
  out.data.E.resize(static_cast<std::size_t>(n));
  out.data.feature_binary.assign(static_cast<std::size_t>(p), false);
  for (int j = 0; j < p; ++j) out.data.feature_names.push_back("x" + std::to_string(j + 1));
  out.true_eta.resize(n, 2);

  std::vector<double> event_time(static_cast<std::size_t>(n));
  std::vector<int> event_type(static_cast<std::size_t>(n));

  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < p; ++j) out.data.X(i, j) = rng.uniform(spec.x_lo, spec.x_hi);
    for (int k = 0; k < 2; ++k) {
      double eta = 0.0;
      for (int j = 0; j < p; ++j)
        eta += synth_effect_value(spec.effects[static_cast<std::size_t>(k)][static_cast<std::size_t>(j)],
                                  out.data.X(i, j));
      out.true_eta(i, k) = eta;
    }
    const double exp_eta1 = std::exp(out.true_eta(i, 0));
    const double p1 = 1.0 - std::pow(1.0 - spec.plateau, exp_eta1);
    if (rng.uniform01() < p1) {
      double u;
      do {
        u = rng.uniform01();
      } while (u <= 0.0);
      event_time[static_cast<std::size_t>(i)] = invert_cause1_time(u, exp_eta1, p1, spec.plateau);
      event_type[static_cast<std::size_t>(i)] = 1;
    } else {
      event_time[static_cast<std::size_t>(i)] =
          rng.exponential(spec.cause2_rate * std::exp(out.true_eta(i, 1)));
      event_type[static_cast<std::size_t>(i)] = 2;
    }
  }

  if (spec.censoring_rate <= 0.0) {
    for (int i = 0; i < n; ++i) {
      out.data.T[static_cast<std::size_t>(i)] = event_time[static_cast<std::size_t>(i)];
      out.data.E[static_cast<std::size_t>(i)] = event_type[static_cast<std::size_t>(i)];
    }
    out.achieved_censoring = 0.0;
    return out;
  }

  // P(C < T) with C ~ U(0, c) equals mean(min(T_i, c) / c); bisect on c.
  auto censor_prob = [&](double c) {
    double acc = 0.0;
    for (double t : event_time) acc += std::min(t, c) / c;
    return acc / double(n);
  };
  double lo = 1e-12, hi = 1.0;
  while (censor_prob(hi) > spec.censoring_rate && hi < 1e12) hi *= 2.0;
  if (censor_prob(hi) > spec.censoring_rate) {
    out.warnings.push_back("synth: censoring target " + fmt_double(spec.censoring_rate) +
                           " unattainable, using upper bound");
  }
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (censor_prob(mid) > spec.censoring_rate)
      lo = mid;
    else
      hi = mid;
  }
  const double c_max = 0.5 * (lo + hi);

  int censored = 0;
  for (int i = 0; i < n; ++i) {
    const double c = rng.uniform(0.0, c_max);
    if (c < event_time[static_cast<std::size_t>(i)]) {
      out.data.T[static_cast<std::size_t>(i)] = c;
      out.data.E[static_cast<std::size_t>(i)] = 0;
      ++censored;
    } else {
      out.data.T[static_cast<std::size_t>(i)] = event_time[static_cast<std::size_t>(i)];
      out.data.E[static_cast<std::size_t>(i)] = event_type[static_cast<std::size_t>(i)];
    }
  }
  out.achieved_censoring = double(censored) / double(n);
  const double se = std::sqrt(spec.censoring_rate * (1.0 - spec.censoring_rate) / double(n));
  if (std::abs(out.achieved_censoring - spec.censoring_rate) > 0.02 + 4.0 * se)
    out.warnings.push_back("synth: achieved censoring rate " + fmt_double(out.achieved_censoring) +
                           " differs from target " + fmt_double(spec.censoring_rate));
  return out;
}

void SynthResult::truth_to_csv(const std::string& path) const {
  CsvDoc doc;
  doc.header = {"subject", "true_eta1", "true_eta2"};
  for (Eigen::Index i = 0; i < true_eta.rows(); ++i)
    doc.rows.push_back({std::to_string(i), fmt_double(true_eta(i, 0)), fmt_double(true_eta(i, 1))});
  write_csv(path, doc);
}

}  // namespace fgnam
