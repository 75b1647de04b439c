#include <benchmark/benchmark.h>

#include "primelab/metrics.hpp"
#include "primelab/prime_end.hpp"
#include "primelab/sobolev_capacity.hpp"
#include "primelab/solver.hpp"

using namespace primelab;

namespace {

GridDomain make(DomainKind kind, int n, int teeth = 4) {
  DomainSpec spec;
  spec.kind = kind;
  spec.h = 1.0 / n;
  spec.teeth = teeth;
  return generate(spec).domain;
}

void BM_Generate(benchmark::State& state) {
  DomainSpec spec;
  spec.kind = DomainKind::comb;
  spec.h = 1.0 / static_cast<double>(state.range(0));
  spec.teeth = 16;
  for (auto _ : state) benchmark::DoNotOptimize(generate(spec));
}
BENCHMARK(BM_Generate)->Arg(64)->Arg(256);

void BM_InnerDistanceField(benchmark::State& state) {
  const auto dom = make(DomainKind::slit, static_cast<int>(state.range(0)));
  const GridId src = dom.nearest_cell({0.75, 0.6});
  for (auto _ : state) benchmark::DoNotOptimize(inner_distance_field(dom, src));
}
BENCHMARK(BM_InnerDistanceField)->Arg(64)->Arg(256);

void BM_MazurkiewiczBracket(benchmark::State& state) {
  const auto dom = make(DomainKind::slit, static_cast<int>(state.range(0)));
  const GridId x = dom.nearest_cell({0.75, 0.53});
  const GridId y = dom.nearest_cell({0.75, 0.47});
  for (auto _ : state) benchmark::DoNotOptimize(mazurkiewicz_distance(dom, x, y, dom.h()));
}
BENCHMARK(BM_MazurkiewiczBracket)->Arg(32)->Arg(64);

void BM_BoundaryNodes(benchmark::State& state) {
  const auto dom = make(DomainKind::comb, static_cast<int>(state.range(0)), 8);
  for (auto _ : state) benchmark::DoNotOptimize(build_boundary_nodes(dom));
}
BENCHMARK(BM_BoundaryNodes)->Arg(64)->Arg(128);

// range(0) = 1/h, range(1) = 10 * p
void BM_SolveDirichlet(benchmark::State& state) {
  const auto dom = make(DomainKind::comb, static_cast<int>(state.range(0)), 8);
  DirichletProblem prob;
  prob.nodes = build_boundary_nodes(dom);
  prob.p = static_cast<double>(state.range(1)) / 10.0;
  for (const auto& n : prob.nodes) prob.data.push_back(n.anchor_point.x);
  for (auto _ : state) benchmark::DoNotOptimize(solve_dirichlet(dom, prob));
}
BENCHMARK(BM_SolveDirichlet)->Args({64, 20})->Args({64, 15})->Args({64, 30})->Args({128, 20})->Unit(benchmark::kMillisecond);

void BM_AmbientCapacity(benchmark::State& state) {
  DomainSpec spec;
  spec.kind = DomainKind::annulus;
  spec.h = 1.0 / static_cast<double>(state.range(0));
  const auto dom = generate(spec).domain;
  CellSet target;
  for (GridId id = 0; id < static_cast<GridId>(dom.point_count()); ++id) {
    if (distance(dom.center(id), spec.center) <= spec.r_inner) target.push_back(id);
  }
  for (auto _ : state) benchmark::DoNotOptimize(ambient_capacity(dom, target, 2.0));
}
BENCHMARK(BM_AmbientCapacity)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
