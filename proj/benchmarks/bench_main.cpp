#include <anivem/anivem.hpp>

#include <benchmark/benchmark.h>

using namespace anivem;

namespace {

const Vec3 kCenter(0.5, 0.5, 0.5);

PolyMesh mesh_for(int which, int n) {
  switch (which) {
    case 0: return cube_mesh(n);
    case 1: return notch_mesh(n);
    default: return cut_by_levelset(tet_mesh(n), sphere_levelset(kCenter, 0.4));
  }
}

// Local operators of every cell in one sweep, single threaded.
void BM_LocalOperators(benchmark::State& state) {
  const PolyMesh mesh = mesh_for(static_cast<int>(state.range(0)), 4);
  LocalParams params{10.0, 1.0, {}, Stabilization::face};
  for (auto _ : state)
    for (std::size_t c = 0; c < mesh.num_cells(); ++c)
      benchmark::DoNotOptimize(local_operators(mesh, static_cast<CellId>(c), params).stiffness.data());
  state.SetItemsProcessed(static_cast<int64_t>(state.iterations() * mesh.num_cells()));
  state.SetLabel(state.range(0) == 0 ? "cube" : state.range(0) == 1 ? "notch" : "sphere-interface");
}
BENCHMARK(BM_LocalOperators)->Arg(0)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);

void BM_AssembleSolve(benchmark::State& state) {
  const PolyMesh mesh = cut_by_plane(cube_mesh(static_cast<int>(state.range(0))),
                                     Plane::from_coefficients(Vec3(1, 1, 1), 1.5));
  const Problem p = smooth_problem();
  for (auto _ : state) benchmark::DoNotOptimize(solve(mesh, p).iterations);
  state.counters["dofs"] = static_cast<double>(mesh.num_dofs());
}
BENCHMARK(BM_AssembleSolve)->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond);

void BM_CutByLevelset(benchmark::State& state) {
  const PolyMesh tets = tet_mesh(static_cast<int>(state.range(0)));
  const LevelSet phi = sphere_levelset(kCenter, 0.4);
  for (auto _ : state) benchmark::DoNotOptimize(cut_by_levelset(tets, phi).num_cells());
  state.SetItemsProcessed(static_cast<int64_t>(state.iterations() * tets.num_cells()));
}
BENCHMARK(BM_CutByLevelset)->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond);

void BM_CutByPlane(benchmark::State& state) {
  const PolyMesh cubes = cube_mesh(static_cast<int>(state.range(0)));
  const Plane plane = Plane::from_coefficients(Vec3(1, 1, 1), 1.5);
  for (auto _ : state) benchmark::DoNotOptimize(cut_by_plane(cubes, plane).num_cells());
}
BENCHMARK(BM_CutByPlane)->Arg(16)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
