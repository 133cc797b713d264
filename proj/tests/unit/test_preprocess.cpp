#include <doctest.h>

#include <cmath>
#include <nlohmann/json.hpp>

#include "fgnam/error.hpp"
#include "fgnam/preprocess.hpp"

using namespace fgnam;

namespace {

TableSchema schema_k(int k) {
  TableSchema s;
  s.num_risks = k;
  return s;
}

}  // namespace

TEST_CASE("standardize uses sample stddev (n-1)") {
  RawTable t = table_from_csv_text("v,time,event\n2,1,1\n4,2,0\n", schema_k(1));
  PreprocessPlan plan = fit_preprocess(t, {});
  REQUIRE(plan.rules.size() == 1);
  CHECK(plan.rules[0].mean == doctest::Approx(3.0));
  CHECK(plan.rules[0].stddev == doctest::Approx(std::sqrt(2.0)));
  ApplyResult res = apply_preprocess(plan, t);
  CHECK(res.data.X(0, 0) == doctest::Approx(-1.0 / std::sqrt(2.0)));
  CHECK(res.data.X(1, 0) == doctest::Approx(1.0 / std::sqrt(2.0)));
}

TEST_CASE("one-hot over sorted training categories") {
  RawTable t = table_from_csv_text("c,time,event\nA,1,1\nB,2,0\nA,3,1\n", schema_k(1));
  PreprocessPlan plan = fit_preprocess(t, {{"c", "onehot"}});
  CHECK(plan.output_width() == 2);
  ApplyResult res = apply_preprocess(plan, t);
  CHECK(res.data.X(0, 0) == 1.0);
  CHECK(res.data.X(0, 1) == 0.0);
  CHECK(res.data.X(1, 0) == 0.0);
  CHECK(res.data.X(1, 1) == 1.0);
  CHECK(res.data.feature_names == std::vector<std::string>{"c=A", "c=B"});
  CHECK(res.data.feature_binary == std::vector<bool>{true, true});
}

TEST_CASE("unseen category maps to all-zeros with a warning") {
  RawTable train = table_from_csv_text("c,time,event\nA,1,1\nB,2,0\n", schema_k(1));
  PreprocessPlan plan = fit_preprocess(train, {{"c", "onehot"}});
  RawTable test = table_from_csv_text("c,time,event\nC,1,1\n", schema_k(1));
  ApplyResult res = apply_preprocess(plan, test);
  CHECK(res.data.X(0, 0) == 0.0);
  CHECK(res.data.X(0, 1) == 0.0);
  REQUIRE(res.warnings.size() == 1);
}

TEST_CASE("missing indicator standardizes observed values and leaves the raw sentinel") {
  // lab column in the 7.4 / 6.4 / 9.4 range with one missing cell
  RawTable t = table_from_csv_text("hba1c,time,event\n7.4,1,1\n6.4,2,0\n9.4,3,1\n,4,0\n",
                                   schema_k(1));
  PreprocessPlan plan = fit_preprocess(t, {{"hba1c", "mim"}});
  REQUIRE(plan.rules[0].strategy == Strategy::MissingIndicator);
  CHECK(plan.output_width() == 2);
  ApplyResult res = apply_preprocess(plan, t);

  const double mean = plan.rules[0].mean;
  const double sd = plan.rules[0].stddev;
  CHECK(mean == doctest::Approx((7.4 + 6.4 + 9.4) / 3.0));
  CHECK(res.data.X(0, 0) == doctest::Approx((7.4 - mean) / sd));
  CHECK(res.data.X(0, 1) == 0.0);
  CHECK(res.data.X(3, 0) == kMimSentinel);
  CHECK(res.data.X(3, 1) == 1.0);
  // indicator is 1 exactly when the raw cell was missing
  for (int r = 0; r < 4; ++r)
    CHECK(res.data.X(r, 1) == (r == 3 ? 1.0 : 0.0));
}

TEST_CASE("mim does not perturb observed values relative to plain standardization") {
  RawTable t = table_from_csv_text("v,time,event\n1,1,1\n2,2,0\n3,3,1\n", schema_k(1));
  PreprocessPlan std_plan = fit_preprocess(t, {{"v", "standardize"}});
  PreprocessPlan mim_plan = fit_preprocess(t, {{"v", "mim"}});
  ApplyResult a = apply_preprocess(std_plan, t);
  ApplyResult b = apply_preprocess(mim_plan, t);
  for (int r = 0; r < 3; ++r) {
    CHECK(a.data.X(r, 0) == b.data.X(r, 0));
    CHECK(b.data.X(r, 1) == 0.0);
  }
}

TEST_CASE("mean-impute fills the training mean and standardizes the filled column") {
  RawTable t = table_from_csv_text("v,time,event\n1,1,1\n,2,0\n5,3,1\n", schema_k(1));
  PreprocessPlan plan = fit_preprocess(t, {});  // inferred: numeric with missing
  REQUIRE(plan.rules[0].strategy == Strategy::MeanImpute);
  ApplyResult res = apply_preprocess(plan, t);
  CHECK(res.data.X(1, 0) == doctest::Approx(0.0));  // filled with the mean, scales to 0
  double mean = res.data.X.col(0).mean();
  double var = (res.data.X.col(0).array() - mean).square().sum() / 2.0;
  CHECK(std::abs(mean) < 1e-9);
  CHECK(std::abs(std::sqrt(var) - 1.0) < 1e-9);
}

TEST_CASE("mode-impute fills the most frequent category, smallest on ties") {
  RawTable t = table_from_csv_text("c,time,event\nB,1,1\n,2,0\nA,3,1\n", schema_k(1));
  PreprocessPlan plan = fit_preprocess(t, {});  // inferred: text with missing
  REQUIRE(plan.rules[0].strategy == Strategy::ModeImpute);
  CHECK(plan.rules[0].mode_value == "A");  // tie between A and B
  ApplyResult res = apply_preprocess(plan, t);
  CHECK(res.data.X(1, 0) == 1.0);  // c=A
}

TEST_CASE("round trip: fit split standardizes exactly, no missing survives") {
  RawTable t = table_from_csv_text(
      "a,b,time,event\n1.5,7.4,1,1\n2.5,,2,0\n0.5,6.4,3,2\n4.5,9.4,4,1\n", schema_k(2));
  PreprocessPlan plan = fit_preprocess(t, {{"b", "mim"}});
  ApplyResult res = apply_preprocess(plan, t);
  for (int r = 0; r < res.data.n(); ++r)
    for (int c = 0; c < res.data.p(); ++c) CHECK(std::isfinite(res.data.X(r, c)));

  // column a: plain standardize
  double mean_a = res.data.X.col(0).mean();
  double sd_a = std::sqrt((res.data.X.col(0).array() - mean_a).square().sum() / 3.0);
  CHECK(std::abs(mean_a) < 1e-9);
  CHECK(std::abs(sd_a - 1.0) < 1e-9);

  // column b: observed entries only (sentinel excluded)
  std::vector<double> obs;
  for (int r = 0; r < res.data.n(); ++r)
    if (res.data.X(r, 2) == 0.0) obs.push_back(res.data.X(r, 1));
  double mean_b = 0.0;
  for (double v : obs) mean_b += v;
  mean_b /= double(obs.size());
  double ss = 0.0;
  for (double v : obs) ss += (v - mean_b) * (v - mean_b);
  CHECK(std::abs(mean_b) < 1e-9);
  CHECK(std::abs(std::sqrt(ss / double(obs.size() - 1)) - 1.0) < 1e-9);
}

TEST_CASE("applying a plan is deterministic (idempotent per row)") {
  RawTable t = table_from_csv_text("a,c,time,event\n1,A,1,1\n2,B,2,0\n3,A,3,1\n", schema_k(1));
  PreprocessPlan plan = fit_preprocess(t, {});
  ApplyResult first = apply_preprocess(plan, t);
  ApplyResult second = apply_preprocess(plan, t);
  CHECK(first.data.X == second.data.X);
}

TEST_CASE("zero-variance column standardizes with stddev 1 and warns") {
  RawTable t = table_from_csv_text("v,time,event\n5,1,1\n5,2,0\n", schema_k(1));
  PreprocessPlan plan = fit_preprocess(t, {});
  CHECK(plan.rules[0].stddev == 1.0);
  REQUIRE(plan.warnings.size() == 1);
  ApplyResult res = apply_preprocess(plan, t);
  CHECK(res.data.X(0, 0) == 0.0);
}

TEST_CASE("missing value with no rule is a hard error") {
  RawTable train = table_from_csv_text("v,time,event\n1,1,1\n2,2,0\n", schema_k(1));
  PreprocessPlan plan = fit_preprocess(train, {{"v", "standardize"}});
  RawTable bad = table_from_csv_text("v,time,event\n,1,1\n", schema_k(1));
  CHECK_THROWS_AS(apply_preprocess(plan, bad), Error);
  RawTable train_missing = table_from_csv_text("v,time,event\n1,1,1\n,2,0\n", schema_k(1));
  CHECK_THROWS_AS(fit_preprocess(train_missing, {{"v", "standardize"}}), Error);
}

TEST_CASE("table missing a plan column is a usage error") {
  RawTable train = table_from_csv_text("v,time,event\n1,1,1\n2,2,0\n", schema_k(1));
  PreprocessPlan plan = fit_preprocess(train, {});
  RawTable other = table_from_csv_text("w,time,event\n1,1,1\n", schema_k(1));
  CHECK_THROWS_AS(apply_preprocess(plan, other), UsageError);
}

TEST_CASE("inverse transform maps scaled values back to raw space") {
  RawTable t = table_from_csv_text("v,time,event\n2,1,1\n4,2,0\n", schema_k(1));
  PreprocessPlan plan = fit_preprocess(t, {});
  ApplyResult res = apply_preprocess(plan, t);
  CHECK(plan.inverse_value(0, res.data.X(0, 0)) == doctest::Approx(2.0));
  CHECK(plan.inverse_value(0, res.data.X(1, 0)) == doctest::Approx(4.0));
}

TEST_CASE("plan serializes through json") {
  RawTable t = table_from_csv_text("a,c,time,event\n1,A,1,1\n2,B,2,0\n,A,3,1\n", schema_k(1));
  PreprocessPlan plan = fit_preprocess(t, {{"a", "mim"}});
  PreprocessPlan back = PreprocessPlan::from_json(plan.to_json());
  CHECK(back.rules.size() == plan.rules.size());
  ApplyResult a = apply_preprocess(plan, t);
  ApplyResult b = apply_preprocess(back, t);
  CHECK(a.data.X == b.data.X);
}
