#include <benchmark/benchmark.h>

#include "pairglm/rng.hpp"
#include "pairglm/simulate.hpp"
#include "pairglm/solver.hpp"

namespace {

using namespace pairglm;

struct Problem {
  Dataset data;
  DesignTensor design;
};

Problem make_problem(arma::uword n, arma::uword p) {
  RngStream rng(7, "bench-solver", n, p);
  Dataset data;
  data.X.set_size(n, p);
  data.Z.set_size(n, p);
  for (auto& v : data.X) v = rng.normal();
  for (auto& v : data.Z) v = rng.normal();
  arma::vec beta(2 * p);
  for (auto& v : beta) v = rng.normal();
  data.y = data.X * beta.head(p) + data.Z * beta.tail(p);
  for (auto& v : data.y) v += 0.5 * rng.normal();
  auto [std_data, scaler] = standardize(data);
  std_data.y = data.y;
  Problem out{std_data, build_design(std_data)};
  return out;
}

void BM_BuildDesign(benchmark::State& state) {
  const Problem problem = make_problem(static_cast<arma::uword>(state.range(0)),
                                       static_cast<arma::uword>(state.range(1)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(build_design(problem.data));
  }
}
BENCHMARK(BM_BuildDesign)->Args({200, 20})->Args({200, 50});

void BM_FactorCache(benchmark::State& state) {
  const Problem problem = make_problem(static_cast<arma::uword>(state.range(0)),
                                       static_cast<arma::uword>(state.range(1)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(FactorCache(problem.design));
  }
}
BENCHMARK(BM_FactorCache)->Args({200, 20})->Args({200, 50});

void BM_AdmmFit(benchmark::State& state) {
  const Problem problem = make_problem(static_cast<arma::uword>(state.range(0)),
                                       static_cast<arma::uword>(state.range(1)));
  const FactorCache cache(problem.design);
  const double scale =
      arma::abs(problem.design.data().t() * problem.data.y).max() /
      static_cast<double>(problem.design.n());
  PenaltySpec spec;
  spec.row_kind = spec.col_kind = PenaltyKind::GroupL2;
  spec.lambda1 = spec.lambda2 = 0.1 * scale;
  spec.lambda3 = 0.05 * scale;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        admm_fit(problem.design, problem.data.y, spec, AdmmOptions{}, &cache));
  }
}
BENCHMARK(BM_AdmmFit)->Args({200, 20})->Args({200, 50})->Unit(benchmark::kMillisecond);

void BM_WarmPath(benchmark::State& state) {
  const Problem problem = make_problem(200, static_cast<arma::uword>(state.range(0)));
  std::vector<PenaltySpec> grid;
  const double lam_max = lambda_max(problem.design, problem.data.y, PenaltyKind::GroupL2,
                                    PenaltyKind::GroupL2, 0.5);
  for (int l = 0; l < 10; ++l) {
    grid.push_back(PenaltySpec::from_alpha_lambda(
        PenaltyKind::GroupL2, PenaltyKind::GroupL2, 0.5,
        lam_max * std::pow(1e-3, l / 9.0), static_cast<arma::uword>(state.range(0))));
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(fit_path(problem.design, problem.data.y, grid, AdmmOptions{}, 1));
  }
}
BENCHMARK(BM_WarmPath)->Arg(20)->Arg(50)->Unit(benchmark::kMillisecond);

}  // namespace
