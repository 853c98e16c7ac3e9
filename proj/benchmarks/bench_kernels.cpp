// Microbenchmarks for the hot kernels: assembly, spmv and the cg solve.

#include <benchmark/benchmark.h>

#include <cmath>
#include <random>

#include "pifem/assembly.hpp"
#include "pifem/mesh.hpp"
#include "pifem/sparse.hpp"

using namespace pifem;

namespace {

Mesh& level_mesh(int level) {
  static InterfaceCurve curve = InterfaceCurve::circle({0, 0}, 0.5);
  static std::vector<Mesh> meshes = [] {
    std::vector<Mesh> out;
    out.push_back(build_interface_mesh({-1, -1, 1, 1}, curve, 0.25));
    for (int l = 1; l <= 4; ++l) out.push_back(refine(out.back(), curve));
    return out;
  }();
  return meshes[level];
}

ProblemSpec jump_spec() {
  ProblemSpec spec;
  spec.beta1 = 1.0;
  spec.beta2 = 10.0;
  return spec;
}

}  // namespace

static void BM_AssembleStiffness(benchmark::State& state) {
  Mesh& mesh = level_mesh(static_cast<int>(state.range(0)));
  ProblemSpec spec = jump_spec();
  set_assembly_threads(static_cast<int>(state.range(1)));
  for (auto _ : state) {
    CsrMatrix A = assemble_stiffness(mesh, spec);
    benchmark::DoNotOptimize(A.values.data());
  }
  set_assembly_threads(1);
  state.SetItemsProcessed(state.iterations() * mesh.n_triangles());
}
BENCHMARK(BM_AssembleStiffness)
    ->ArgsProduct({{2, 3, 4}, {1, 2, 4}})
    ->ArgNames({"level", "threads"});

static void BM_AssembleLoad(benchmark::State& state) {
  Mesh& mesh = level_mesh(static_cast<int>(state.range(0)));
  auto g = [](Point p) { return std::sin(p.x) * std::cos(p.y); };
  for (auto _ : state) {
    Vector b = assemble_load(mesh, g);
    benchmark::DoNotOptimize(b.data());
  }
  state.SetItemsProcessed(state.iterations() * mesh.n_triangles());
}
BENCHMARK(BM_AssembleLoad)->Arg(2)->Arg(3)->Arg(4)->ArgName("level");

static void BM_Spmv(benchmark::State& state) {
  Mesh& mesh = level_mesh(static_cast<int>(state.range(0)));
  CsrMatrix A = assemble_stiffness(mesh, jump_spec());
  std::mt19937 rng(1);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Vector x(A.n_cols);
  for (double& v : x) v = u(rng);
  for (auto _ : state) {
    Vector y = spmv(A, x);
    benchmark::DoNotOptimize(y.data());
  }
  state.SetItemsProcessed(state.iterations() * A.values.size());
}
BENCHMARK(BM_Spmv)->Arg(2)->Arg(3)->Arg(4)->ArgName("level");

static void BM_CgSolve(benchmark::State& state) {
  Mesh& mesh = level_mesh(static_cast<int>(state.range(0)));
  DofMap dofs = make_dof_map(mesh);
  CsrMatrix A = assemble_stiffness(mesh, jump_spec());
  Vector b = assemble_load(mesh, [](Point p) { return p.x + 2.0; });
  auto [Ar, br] = apply_dirichlet(A, b, mesh, dofs, [](Point) { return 0.0; });
  for (auto _ : state) {
    auto [x, report] = cg_solve(Ar, br, 1e-10);
    benchmark::DoNotOptimize(x.data());
    if (!report.converged) state.SkipWithError("cg did not converge");
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_CgSolve)->Arg(2)->Arg(3)->ArgName("level");

BENCHMARK_MAIN();
