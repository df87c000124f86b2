#include <benchmark/benchmark.h>

#include "dcw/binary_welfare.hpp"
#include "dcw/fixtures.hpp"
#include "dcw/simulate.hpp"
#include "dcw/spline.hpp"
#include "dcw/welfare.hpp"

namespace {

void BM_ChoiceProb(benchmark::State& state) {
  const auto m = dcw::fixture_model("income-effect");
  const dcw::BudgetPoint pt(1.2, 8.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(m.choice_prob(1, pt));
  }
}
BENCHMARK(BM_ChoiceProb);

void BM_WelfareCdf(benchmark::State& state) {
  const auto m = dcw::fixture_model("multinomial-j2");
  const dcw::WelfareCdf cdf(m, dcw::BudgetPoint({0.6, 1.1}, 8.0));
  double c = 8.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(cdf(c));
    c = c < 16.0 ? c + 0.01 : 8.0;
  }
}
BENCHMARK(BM_WelfareCdf);

void BM_Asw(benchmark::State& state) {
  const auto m = dcw::fixture_model("quasilinear-logit");
  const dcw::BudgetPoint pt(1.0, 10.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(dcw::asw(m, pt, {0.5}));
  }
}
BENCHMARK(BM_Asw);

void BM_DeltaAsw(benchmark::State& state) {
  const auto m = dcw::fixture_model("income-effect");
  const dcw::SubsidyScenario s{1.5, 1.0, 6.0, 0.0};
  for (auto _ : state) {
    benchmark::DoNotOptimize(dcw::delta_asw(m, s));
  }
}
BENCHMARK(BM_DeltaAsw);

void BM_SimulateWelfare(benchmark::State& state) {
  const auto m = dcw::fixture_model("income-effect");
  const dcw::BudgetPoint pt(1.2, 6.0);
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(dcw::simulate_welfare(m, pt, n, 7));
  }
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_SimulateWelfare)->Arg(1000)->Arg(10000);

void BM_SplineEval(benchmark::State& state) {
  const dcw::SplineBasis basis(1.0, 20.0, 8, 3);
  const std::vector<double> coeffs = {0.0, 0.5, 0.9, 1.0, 0.6, 0.1, 0.0, 0.0};
  double y = 1.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(basis.value(coeffs, y));
    y = y < 20.0 ? y + 0.001 : 1.0;
  }
}
BENCHMARK(BM_SplineEval);

}  // namespace

BENCHMARK_MAIN();
