#include <benchmark/benchmark.h>

#include <memory>

#include <mpw/eigensolver.hpp>
#include <mpw/model.hpp>
#include <mpw/witness.hpp>

namespace {

mpw::SystemParams paper_params(int n) {
  mpw::SystemParams p;
  p.n_f = p.n_b = n;
  p.eps_f = 5.0;
  p.eps_b = 5.0;
  p.v_f = -0.4;
  p.v_b = -2.0;
  p.mu = 0.5;
  return p;
}

std::unique_ptr<mpw::BoundHamiltonian> bound(const mpw::SystemParams& p,
                                             std::shared_ptr<mpw::CompositeBasis>& keep) {
  keep = std::make_shared<mpw::CompositeBasis>(
      mpw::SectorBasis::enumerate(2 * p.n_f, p.n_f, mpw::Restriction::Column),
      mpw::SectorBasis::enumerate(2 * p.n_b, p.n_b, mpw::Restriction::Column));
  const mpw::ModelInstance model = mpw::build_model(p);
  return std::make_unique<mpw::BoundHamiltonian>(model.all_terms(), keep.get());
}

void bench_matvec(benchmark::State& state) {
  const mpw::SystemParams p = paper_params(static_cast<int>(state.range(0)));
  std::shared_ptr<mpw::CompositeBasis> basis;
  const auto h = bound(p, basis);
  Eigen::VectorXd x = Eigen::VectorXd::Random(static_cast<Eigen::Index>(h->dimension()));
  x.normalize();
  Eigen::VectorXd y(x.size());
  for (auto _ : state) {
    h->apply(x.data(), y.data());
    benchmark::DoNotOptimize(y.data());
    benchmark::ClobberMemory();
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long long>(h->dimension()));
}
BENCHMARK(bench_matvec)->Arg(4)->Arg(6)->Arg(8);

void bench_solve_ground(benchmark::State& state) {
  const mpw::SystemParams p = paper_params(static_cast<int>(state.range(0)));
  std::shared_ptr<mpw::CompositeBasis> basis;
  const auto h = bound(p, basis);
  for (auto _ : state) {
    const mpw::GroundState g = mpw::solve_ground(*h, mpw::SolveOptions{});
    benchmark::DoNotOptimize(g.energy);
  }
}
BENCHMARK(bench_solve_ground)->Arg(4)->Arg(6)->Unit(benchmark::kMillisecond);

void bench_particle_hole_rdm(benchmark::State& state) {
  const mpw::SystemParams p = paper_params(static_cast<int>(state.range(0)));
  const mpw::SolvedSystem sys =
      mpw::solve_system(p, mpw::SolverPath::Column, mpw::SolveOptions{});
  const mpw::StateVector psi = sys.state();
  const mpw::OneParticleRDM d = mpw::one_particle_rdm(psi, mpw::SectorTag::Fermion);
  for (auto _ : state) {
    const mpw::ParticleHoleRDM g = mpw::particle_hole_rdm(psi, mpw::SectorTag::Fermion, d);
    benchmark::DoNotOptimize(g.matrix.data());
  }
}
BENCHMARK(bench_particle_hole_rdm)->Arg(4)->Arg(6)->Unit(benchmark::kMillisecond);

void bench_full_witness(benchmark::State& state) {
  const mpw::SystemParams p = paper_params(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    const mpw::WitnessResult w = mpw::compute_witness(p, mpw::SolveOptions{});
    benchmark::DoNotOptimize(w.energy);
  }
}
BENCHMARK(bench_full_witness)->Arg(6)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
