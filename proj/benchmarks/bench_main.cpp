#include "stbem/assembly.hpp"
#include "stbem/estimator.hpp"
#include "stbem/kernel.hpp"
#include "stbem/problems.hpp"
#include "stbem/solver.hpp"

#include <benchmark/benchmark.h>

using namespace stbem;

namespace {

void BM_ExpintEi(benchmark::State& state) {
  const double x = -static_cast<double>(state.range(0)) / 8.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(expint_ei(x));
  }
}
BENCHMARK(BM_ExpintEi)->Arg(1)->Arg(8)->Arg(64)->Arg(2048);

void BM_FrakG(benchmark::State& state) {
  double t = 0.125;
  for (auto _ : state) {
    benchmark::DoNotOptimize(frak_G(t, 0.01));
  }
}
BENCHMARK(BM_FrakG);

SpaceTimeMesh refined(const ProblemSpec& p, int levels) {
  SpaceTimeMesh m = initial_mesh(p.domain);
  for (int k = 0; k < levels; ++k) {
    m = uniform_refine(m);
  }
  return m;
}

// Diagonal entry (identical elements) and a touching neighbour.
void BM_MatrixEntry(benchmark::State& state) {
  const ProblemSpec p = problem_catalog("smooth");
  const SpaceTimeMesh m = refined(p, 2);
  const auto& curve = m.domain().curve();
  const std::size_t j = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(matrix_entry(curve, m[j], m[0]));
  }
}
BENCHMARK(BM_MatrixEntry)->Arg(0)->Arg(1)->Arg(40);

void BM_AssembleMatrix(benchmark::State& state) {
  const ProblemSpec p = problem_catalog("smooth");
  const SpaceTimeMesh m = refined(p, static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(assemble_matrix(m));
  }
  state.counters["N"] = static_cast<double>(m.size());
}
BENCHMARK(BM_AssembleMatrix)->Arg(1)->Arg(2)->Arg(3)->Unit(benchmark::kMillisecond);

void BM_AssembleRhs(benchmark::State& state) {
  const ProblemSpec p = problem_catalog("singular");
  const SpaceTimeMesh m = refined(p, static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(assemble_rhs(m, p));
  }
}
BENCHMARK(BM_AssembleRhs)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);

void BM_Estimate(benchmark::State& state) {
  const ProblemSpec p = problem_catalog("smooth");
  const SpaceTimeMesh m = refined(p, static_cast<int>(state.range(0)));
  const Density d = solve_galerkin(assemble_system(m, p));
  for (auto _ : state) {
    benchmark::DoNotOptimize(compute_indicators(m, d.coefficients, p));
  }
}
BENCHMARK(BM_Estimate)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);

} // namespace
BENCHMARK_MAIN();
