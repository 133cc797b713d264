#include <benchmark/benchmark.h>

#include "fgnam/finegray.hpp"
#include "fgnam/metrics.hpp"
#include "fgnam/model.hpp"
#include "fgnam/survival.hpp"
#include "fgnam/synth.hpp"

using namespace fgnam;

namespace {

SynthResult make_data(int n) {
  SynthSpec spec = SynthSpec::defaults();
  spec.n = n;
  spec.seed = 12;
  return generate(spec);
}

void BM_FgLoss(benchmark::State& state) {
  SynthResult synth = make_data(static_cast<int>(state.range(0)));
  ModelParams params = init_params(3, 2, {16, 16}, 1);
  Eigen::MatrixXd eta = eval_eta(params, synth.data.X);
  CensoringModel G = fit_censoring_km(synth.data.T, synth.data.E);
  RiskWeights omega = class_weights(synth.data.E, 2);
  FgLossConfig cfg;
  for (auto _ : state) {
    benchmark::DoNotOptimize(fg_loss(eta, synth.data.T, synth.data.E, G, cfg, omega).total);
  }
}
BENCHMARK(BM_FgLoss)->Arg(1000)->Arg(10000);

void BM_FgLossGrad(benchmark::State& state) {
  SynthResult synth = make_data(static_cast<int>(state.range(0)));
  ModelParams params = init_params(3, 2, {16, 16}, 1);
  Eigen::MatrixXd eta = eval_eta(params, synth.data.X);
  CensoringModel G = fit_censoring_km(synth.data.T, synth.data.E);
  RiskWeights omega = class_weights(synth.data.E, 2);
  FgLossConfig cfg;
  for (auto _ : state) {
    benchmark::DoNotOptimize(fg_loss_grad(eta, synth.data.T, synth.data.E, G, cfg, omega).sum());
  }
}
BENCHMARK(BM_FgLossGrad)->Arg(1000)->Arg(10000);

void BM_ForwardBackward(benchmark::State& state) {
  const int B = static_cast<int>(state.range(0));
  SynthResult synth = make_data(B);
  ModelParams params = init_params(3, 2, {16, 16}, 1);
  ModelGrad grad = ModelGrad::zeros_like(params);
  Eigen::MatrixXd dEta = Eigen::MatrixXd::Constant(B, 2, 0.5);
  for (auto _ : state) {
    BatchTrace trace = forward_batch(params, synth.data.X, Mode::Train);
    grad.set_zero();
    backward_batch(params, trace, dEta, grad);
    benchmark::DoNotOptimize(grad.projections[0](0));
  }
}
BENCHMARK(BM_ForwardBackward)->Arg(256)->Arg(1024);

void BM_CensoringKm(benchmark::State& state) {
  SynthResult synth = make_data(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(fit_censoring_km(synth.data.T, synth.data.E).step_times.size());
  }
}
BENCHMARK(BM_CensoringKm)->Arg(10000);

void BM_TdAuc(benchmark::State& state) {
  SynthResult synth = make_data(static_cast<int>(state.range(0)));
  CensoringModel G = fit_censoring_km(synth.data.T, synth.data.E);
  std::vector<double> scores(synth.data.T.size());
  for (std::size_t i = 0; i < scores.size(); ++i) scores[i] = synth.true_eta(static_cast<Eigen::Index>(i), 0);
  const double t = time_quantile_grid(synth.data.T, synth.data.E, {0.5})[0];
  for (auto _ : state) {
    benchmark::DoNotOptimize(td_auc(scores, synth.data.T, synth.data.E, 1, G, t));
  }
}
BENCHMARK(BM_TdAuc)->Arg(1000)->Arg(4000);

}  // namespace

BENCHMARK_MAIN();
