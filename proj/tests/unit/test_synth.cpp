#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "fgnam/synth.hpp"

using namespace fgnam;

TEST_CASE("zero effects: empirical cause-1 incidence converges to the baseline CIF") {
  SynthSpec spec;
  spec.n = 10000;
  spec.p = 3;
  spec.effects.assign(2, std::vector<SynthSpec::Effect>(3));  // all zero
  spec.censoring_rate = 0.0;
  spec.seed = 5;
  SynthResult res = generate(spec);

  // empirical CIF of cause 1 vs F01(t) = plateau * (1 - e^-t)
  double worst = 0.0;
  for (double t = 0.1; t <= 6.0; t += 0.1) {
    int count = 0;
    for (int i = 0; i < spec.n; ++i)
      if (res.data.E[static_cast<std::size_t>(i)] == 1 && res.data.T[static_cast<std::size_t>(i)] <= t)
        ++count;
    const double empirical = double(count) / double(spec.n);
    const double truth = spec.plateau * (1.0 - std::exp(-t));
    worst = std::max(worst, std::abs(empirical - truth));
  }
  CHECK(worst < 0.03);

  // cause-1 fraction within 3 standard errors of the plateau
  int n1 = static_cast<int>(std::count(res.data.E.begin(), res.data.E.end(), 1));
  const double se = std::sqrt(spec.plateau * (1.0 - spec.plateau) / spec.n);
  CHECK(std::abs(double(n1) / spec.n - spec.plateau) < 3.0 * se);
}

TEST_CASE("zero censoring target yields no censored rows") {
  SynthSpec spec = SynthSpec::defaults();
  spec.n = 500;
  spec.censoring_rate = 0.0;
  SynthResult res = generate(spec);
  CHECK(std::count(res.data.E.begin(), res.data.E.end(), 0) == 0);
  CHECK(res.achieved_censoring == 0.0);
}

TEST_CASE("censoring calibration lands near the target") {
  SynthSpec spec = SynthSpec::defaults();
  spec.n = 4000;
  spec.censoring_rate = 0.3;
  spec.seed = 9;
  SynthResult res = generate(spec);
  CHECK(std::abs(res.achieved_censoring - 0.3) < 0.05);
  CHECK(res.warnings.empty());
}

TEST_CASE("true CIF is monotone in t and in eta") {
  double prev = -1.0;
  for (double t = 0.0; t < 8.0; t += 0.25) {
    const double v = synth_true_cif1(t, 0.3, 0.6);
    CHECK(v >= prev);
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
    prev = v;
  }
  for (double t : {0.5, 1.0, 3.0})
    CHECK(synth_true_cif1(t, std::log(2.0), 0.6) > synth_true_cif1(t, 0.0, 0.6));
  // plateau bounds the cause-1 mass at eta = 0
  CHECK(synth_true_cif1(1e9, 0.0, 0.6) == doctest::Approx(0.6));
}

TEST_CASE("generation is deterministic for a fixed seed") {
  SynthSpec spec = SynthSpec::defaults();
  spec.n = 50;
  SynthResult a = generate(spec);
  SynthResult b = generate(spec);
  CHECK(a.data.X == b.data.X);
  CHECK(a.data.T == b.data.T);
  CHECK(a.data.E == b.data.E);
  spec.seed = 2;
  SynthResult c = generate(spec);
  CHECK(a.data.T != c.data.T);
}

TEST_CASE("ground truth eta follows the configured effects") {
  SynthSpec spec = SynthSpec::defaults();
  spec.n = 20;
  SynthResult res = generate(spec);
  for (int i = 0; i < spec.n; ++i) {
    const double x1 = res.data.X(i, 0), x2 = res.data.X(i, 1);
    CHECK(res.true_eta(i, 0) == doctest::Approx(x1 - x2).epsilon(1e-12));
    CHECK(res.true_eta(i, 1) == doctest::Approx(0.5 * x1 * x1).epsilon(1e-12));
  }
}

TEST_CASE("spec validation") {
  SynthSpec spec = SynthSpec::defaults();
  spec.plateau = 1.5;
  CHECK_THROWS(generate(spec));
  spec = SynthSpec::defaults();
  spec.censoring_rate = 1.0;
  CHECK_THROWS(generate(spec));
  spec = SynthSpec::defaults();
  spec.effects.pop_back();
  CHECK_THROWS(generate(spec));
}
