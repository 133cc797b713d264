#include <doctest.h>

#include <cmath>

#include "fgnam/error.hpp"
#include "fgnam/rng.hpp"
#include "fgnam/survival.hpp"

using namespace fgnam;

// Fixture D5, zero-based ids: T=(2,3,3,5,7), E=(1,2,0,1,0).
static const std::vector<double> kT5 = {2, 3, 3, 5, 7};
static const std::vector<int> kE5 = {1, 2, 0, 1, 0};

TEST_CASE("subdistribution risk sets on the five-subject fixture") {
  CHECK(subdist_risk_set(kT5, kE5, 1, 5.0) == std::vector<int>{1, 3, 4});
  CHECK(subdist_risk_set(kT5, kE5, 1, 2.0) == std::vector<int>{0, 1, 2, 3, 4});
  CHECK(subdist_risk_set(kT5, kE5, 2, 7.0) == std::vector<int>{0, 3, 4});
}

TEST_CASE("at-risk subjects always belong to every subdistribution risk set") {
  Rng rng(7);
  for (int rep = 0; rep < 50; ++rep) {
    const int n = 2 + static_cast<int>(rng.below(10));
    std::vector<double> T;
    std::vector<int> E;
    for (int i = 0; i < n; ++i) {
      T.push_back(1.0 + double(rng.below(6)));
      E.push_back(static_cast<int>(rng.below(3)));
    }
    const double t = 1.0 + double(rng.below(6));
    for (int k = 1; k <= 2; ++k) {
      auto set = subdist_risk_set(T, E, k, t);
      for (int j = 0; j < n; ++j) {
        const bool in = std::find(set.begin(), set.end(), j) != set.end();
        if (T[static_cast<std::size_t>(j)] >= t) CHECK(in);
        if (E[static_cast<std::size_t>(j)] == k)
          CHECK(in == (T[static_cast<std::size_t>(j)] >= t));  // leaves after its own event
        if (E[static_cast<std::size_t>(j)] == 0)
          CHECK(in == (T[static_cast<std::size_t>(j)] >= t));  // censored never retained
      }
    }
  }
}

TEST_CASE("censoring KM on the fixture steps 1 -> 0.75 -> 0") {
  CensoringModel G = fit_censoring_km(kT5, kE5);
  CHECK(G.at(2.9) == 1.0);
  CHECK(G.at(3.0) == 0.75);
  CHECK(G.at(6.9) == 0.75);
  CHECK(G.at(7.0) == 0.0);
  // left limits
  CHECK(G.at_left(3.0) == 1.0);
  CHECK(G.at_left(5.0) == 0.75);
  CHECK(G.at_left(7.0) == 0.75);
  CHECK(G.at_left(8.0) == 0.0);
}

TEST_CASE("censoring KM degenerate cases") {
  CensoringModel none = fit_censoring_km({1, 2, 3}, {1, 1, 1});
  CHECK(none.step_times.empty());
  CHECK(none.at(100.0) == 1.0);

  CensoringModel two = fit_censoring_km({1, 2}, {0, 0});
  CHECK(two.at(0.5) == 1.0);
  CHECK(two.at(1.0) == 0.5);
  CHECK(two.at(2.0) == 0.0);

  CensoringModel zero = fit_censoring_km({0, 0}, {0, 0});
  CHECK(zero.degenerate);
  CHECK(zero.at(0.0) == 0.0);

  CHECK_THROWS_AS(fit_censoring_km({}, {}), Error);
}

TEST_CASE("ipcw weights on the fixture") {
  CensoringModel G = fit_censoring_km(kT5, kE5);
  // event-free at t
  CHECK(ipcw_weight(G, 5.0, 1, 5.0) == 1.0);
  CHECK(ipcw_weight(G, 7.0, 0, 5.0) == 1.0);
  // competing event at T=3 evaluated at t=5: G(5-)/G(3-) = 0.75
  CHECK(ipcw_weight(G, 3.0, 2, 5.0) == doctest::Approx(0.75).epsilon(1e-12));
  // censored before t
  CHECK(ipcw_weight(G, 3.0, 0, 5.0) == 0.0);
  // censored exactly at t still counts as at risk
  CHECK(ipcw_weight(G, 3.0, 0, 3.0) == 1.0);
}

TEST_CASE("ipcw clamping counts diagnostics") {
  CensoringModel tiny;
  tiny.step_times = {1.0};
  tiny.values = {1e-6};
  ClampStats stats;
  const double w = ipcw_weight(tiny, 2.0, 2, 3.0, 1e-4, &stats);
  CHECK(w == doctest::Approx(1e-6 / 1e-4));
  CHECK(stats.clamps == 1);
}

TEST_CASE("class weights") {
  {
    std::vector<int> E(100, 1);
    for (int i = 0; i < 50; ++i) E[static_cast<std::size_t>(i)] = 2;
    RiskWeights w = class_weights(E, 2);
    CHECK(w.at(1) == doctest::Approx(1.0));
    CHECK(w.at(2) == doctest::Approx(1.0));
  }
  {
    std::vector<int> E;
    for (int i = 0; i < 80; ++i) E.push_back(1);
    for (int i = 0; i < 20; ++i) E.push_back(2);
    RiskWeights w = class_weights(E, 2);
    CHECK(w.at(1) == doctest::Approx(0.625));
    CHECK(w.at(2) == doctest::Approx(2.5));
  }
  {
    RiskWeights w = class_weights(kE5, 2);
    CHECK(w.at(1) == doctest::Approx(1.25));
    CHECK(w.at(2) == doctest::Approx(2.5));
    // sum_k omega_k n_k = n
    CHECK(w.at(1) * 2 + w.at(2) * 1 == doctest::Approx(5.0));
  }
  CHECK_THROWS_AS(class_weights({1, 1, 0}, 2), Error);
}

TEST_CASE("time quantile grid uses linear interpolation between order statistics") {
  std::vector<double> T;
  std::vector<int> E;
  for (int i = 1; i <= 100; ++i) {
    T.push_back(i);
    E.push_back(1);
  }
  auto q = time_quantile_grid(T, E, {0.25, 0.5, 0.75});
  REQUIRE(q.size() == 3);
  CHECK(q[0] == doctest::Approx(25.75));
  CHECK(q[1] == doctest::Approx(50.5));
  CHECK(q[2] == doctest::Approx(75.25));

  CHECK(time_quantile_grid({5, 9}, {1, 0}, {0.1})[0] == 5.0);
  CHECK(time_quantile_grid(kT5, kE5, {0.5})[0] == 3.0);
  CHECK_THROWS_AS(time_quantile_grid({1, 2}, {0, 0}, {0.5}), Error);
  CHECK_THROWS_AS(time_quantile_grid({1}, {1}, {1.5}), Error);
}

TEST_CASE("event index orders events before censorings at ties") {
  EventIndex idx = EventIndex::build(kT5, kE5, 2);
  REQUIRE(idx.order.size() == 5);
  CHECK(idx.order[0] == 0);
  CHECK(idx.order[1] == 1);  // event at t=3 before the censoring at t=3
  CHECK(idx.order[2] == 2);
  const auto& cause1 = idx.causes[0];
  CHECK(cause1.times == std::vector<double>{2, 5});
  CHECK(cause1.counts == std::vector<int>{1, 1});
  EventIndex tied = EventIndex::build({1, 1, 1}, {2, 1, 1}, 2);
  CHECK(tied.causes[0].counts == std::vector<int>{2});
}

TEST_CASE("censoring model csv export") {
  CensoringModel G = fit_censoring_km(kT5, kE5);
  const std::string path = "test_censoring_tmp.csv";
  G.to_csv(path);
  FILE* f = fopen(path.c_str(), "rb");
  REQUIRE(f);
  char buf[256];
  std::string content;
  size_t got;
  while ((got = fread(buf, 1, sizeof(buf), f)) > 0) content.append(buf, got);
  fclose(f);
  CHECK(content == "time,G\n0,1\n3,0.75\n7,0\n");
  remove(path.c_str());
}
