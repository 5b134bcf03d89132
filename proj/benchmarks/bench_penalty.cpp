#include <benchmark/benchmark.h>

#include "pairglm/penalty.hpp"
#include "pairglm/rng.hpp"

namespace {

arma::vec make_input(std::int64_t dim) {
  pairglm::RngStream rng(42, "bench-penalty", static_cast<std::uint64_t>(dim));
  arma::vec y(static_cast<arma::uword>(dim));
  for (auto& v : y) v = rng.normal();
  return y;
}

void BM_ProxSoftThreshold(benchmark::State& state) {
  const arma::vec y = make_input(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(pairglm::prox_soft_threshold(y, 0.3));
  }
}
BENCHMARK(BM_ProxSoftThreshold)->Arg(16)->Arg(128)->Arg(1024);

void BM_ProxGroupL2(benchmark::State& state) {
  const arma::vec y = make_input(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(pairglm::prox_group_l2(y, 0.3));
  }
}
BENCHMARK(BM_ProxGroupL2)->Arg(16)->Arg(128)->Arg(1024);

void BM_ProxLinf(benchmark::State& state) {
  const arma::vec y = make_input(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(pairglm::prox_linf(y, 0.3));
  }
}
BENCHMARK(BM_ProxLinf)->Arg(16)->Arg(128)->Arg(1024);

void BM_ProxHybrid(benchmark::State& state) {
  const arma::vec y = make_input(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(pairglm::prox_hybrid(y, 0.3));
  }
}
BENCHMARK(BM_ProxHybrid)->Arg(16)->Arg(128)->Arg(1024);

void BM_ProjectL1Ball(benchmark::State& state) {
  const arma::vec y = make_input(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(pairglm::project_l1_ball(y, 1.0));
  }
}
BENCHMARK(BM_ProjectL1Ball)->Arg(16)->Arg(128)->Arg(1024);

}  // namespace
