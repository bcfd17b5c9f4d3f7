#include <doctest.h>

#include <cmath>

#include <Eigen/Eigenvalues>

#include <mpw/witness.hpp>

using namespace mpw;

TEST_CASE("uncorrelated ground state gives the particle-hole plateau at 1") {
  SystemParams p;
  p.n_f = p.n_b = 3;
  p.eps_f = 1.0;
  p.eps_b = 0.4;

  const SolvedSystem sys = solve_system(p, SolverPath::Column, SolveOptions{});
  const StateVector psi = sys.state();

  for (SectorTag tag : {SectorTag::Fermion, SectorTag::Boson}) {
    const OneParticleRDM d = one_particle_rdm(psi, tag);
    const int r = 2 * p.n_f;
    REQUIRE(d.matrix.rows() == r);
    CHECK(std::abs(d.matrix.trace() - p.n_f) <= 1e-12);
    for (int m = 0; m < r; ++m) {
      CHECK(d.matrix(m, m) == doctest::Approx(m < p.n_f ? 1.0 : 0.0));
    }

    const ParticleHoleRDM g = particle_hole_rdm(psi, tag, d);
    REQUIRE(g.matrix.rows() == r * r);
    // G = n_j (1 - n_i) on the diagonal, zero elsewhere
    for (int i = 0; i < r; ++i) {
      for (int j = 0; j < r; ++j) {
        const double expect = (j < p.n_f && i >= p.n_f) ? 1.0 : 0.0;
        CHECK(std::abs(g.matrix(i * r + j, i * r + j) - expect) <= 1e-12);
      }
    }
    CHECK(largest_eigenvalue(g) == doctest::Approx(1.0).epsilon(1e-12));
  }

  const WitnessResult w = compute_witness(p, SolveOptions{});
  REQUIRE(w.fermion.has_value());
  REQUIRE(w.boson.has_value());
  CHECK(w.fermion->lambda_g == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(w.boson->lambda_g == doctest::Approx(1.0).epsilon(1e-10));
  CHECK_FALSE(w.fermion->above_uncorrelated_baseline);
  CHECK(w.fermion->bound == doctest::Approx(1.5));
  CHECK_FALSE(w.diagnostics.fast_path_unvalidated);
}

TEST_CASE("theoretical bound values") {
  CHECK(theoretical_bound(6, 12) == doctest::Approx(3.0));
  CHECK(theoretical_bound(4, 8) == doctest::Approx(2.0));
  CHECK(theoretical_bound(2, 4) == doctest::Approx(1.0));
  CHECK(theoretical_bound(1, 2) == doctest::Approx(0.5));
  CHECK(theoretical_bound(3, 12) == doctest::Approx(2.25));
}

TEST_CASE("strong pairing saturates the witness") {
  SystemParams p;
  p.n_f = 2;
  p.eps_f = 1.0;
  p.v_f = -50.0;

  const SolvedSystem sys = solve_system(p, SolverPath::Column, SolveOptions{});
  const OneParticleRDM d = one_particle_rdm(sys.state(), SectorTag::Fermion);
  // near-equal mixture of the all-lower and all-upper configurations
  for (int m = 0; m < 4; ++m) CHECK(d.matrix(m, m) == doctest::Approx(0.5).epsilon(0.02));

  const WitnessResult w2 = compute_witness(p, SolveOptions{});
  CHECK(w2.fermion->lambda_g == doctest::Approx(1.0).epsilon(0.01));
  CHECK_FALSE(w2.boson.has_value());

  // The strong-coupling plateau sits strictly below the n/2 bound at
  // finite n: the ground state is a squeezed superposition of the two
  // deformed branches, not an ideal coherent one.  Reference values from
  // an independent dense diagonalization (saturated already at v = -50).
  p.n_f = 4;
  const WitnessResult w4 = compute_witness(p, SolveOptions{});
  CHECK(w4.fermion->lambda_g == doctest::Approx(1.865920).epsilon(1e-3));

  p.n_f = 6;
  const WitnessResult w6 = compute_witness(p, SolveOptions{});
  CHECK(w6.fermion->lambda_g == doctest::Approx(2.891341).epsilon(1e-3));
  CHECK(w6.fermion->lambda_g <= w6.fermion->bound + 1e-9);
  CHECK(w6.fermion->above_uncorrelated_baseline);
  CHECK(w6.diagnostics.fast_path_unvalidated);  // n = 6 runs restricted only
}

TEST_CASE("centered and subtract-after constructions agree") {
  SystemParams p;
  p.n_f = p.n_b = 2;
  p.eps_f = 1.0;
  p.eps_b = 0.5;
  p.v_f = -0.7;
  p.v_b = -0.9;
  p.mu = 0.6;
  const SolvedSystem sys = solve_system(p, SolverPath::Column, SolveOptions{});
  const StateVector psi = sys.state();

  for (SectorTag tag : {SectorTag::Fermion, SectorTag::Boson}) {
    const OneParticleRDM d = one_particle_rdm(psi, tag);
    const ParticleHoleRDM g = particle_hole_rdm(psi, tag, d);
    const Eigen::MatrixXd raw = particle_hole_rdm_uncentered(psi, tag, d);
    CHECK((g.matrix - raw).cwiseAbs().maxCoeff() <= 1e-10);
    CHECK((g.matrix - g.matrix.transpose()).cwiseAbs().maxCoeff() <= 1e-12);

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g.matrix, Eigen::EigenvaluesOnly);
    CHECK(es.eigenvalues()(0) >= -1e-10);
  }
}

TEST_CASE("streamed assembly reproduces the in-memory result") {
  SystemParams p;
  p.n_f = p.n_b = 3;
  p.eps_f = 3.0;
  p.eps_b = 0.3;
  p.v_f = -0.4;
  p.v_b = -0.1;
  p.mu = 0.7;
  const SolvedSystem sys = solve_system(p, SolverPath::Column, SolveOptions{});
  const StateVector psi = sys.state();

  const OneParticleRDM d = one_particle_rdm(psi, SectorTag::Fermion);
  const ParticleHoleRDM plenty = particle_hole_rdm(psi, SectorTag::Fermion, d);
  // a budget of a few kilobytes forces block streaming with recomputation
  const ParticleHoleRDM tight = particle_hole_rdm(psi, SectorTag::Fermion, d, 4096);
  CHECK((plenty.matrix - tight.matrix).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("all three solver paths tell the same story") {
  SystemParams p;
  p.n_f = p.n_b = 3;
  p.eps_f = 1.0;
  p.eps_b = 0.6;
  p.v_f = -0.5;
  p.v_b = -0.8;
  p.mu = 0.5;

  const WitnessResult full = compute_witness(p, SolveOptions{}, SolverPath::Full);
  const WitnessResult column = compute_witness(p, SolveOptions{}, SolverPath::Column);
  const WitnessResult coll = compute_witness(p, SolveOptions{}, SolverPath::Collective);

  CHECK(std::abs(full.energy - column.energy) <= 1e-10);
  CHECK(std::abs(coll.energy - column.energy) <= 1e-10);
  CHECK(std::abs(full.fermion->lambda_g - column.fermion->lambda_g) <= 1e-8);
  CHECK(std::abs(coll.fermion->lambda_g - column.fermion->lambda_g) <= 1e-8);
  CHECK(std::abs(full.boson->lambda_g - column.boson->lambda_g) <= 1e-8);
  CHECK(std::abs(coll.boson->lambda_g - column.boson->lambda_g) <= 1e-8);

  const SolvedSystem expanded = solve_system(p, SolverPath::Collective, SolveOptions{});
  CHECK(expanded.expansion_residual <= 1e-8);
  CHECK(expanded.ground.method == "collective_dense");
}

TEST_CASE("rdm construction demands a normalized state") {
  SystemParams p;
  p.n_f = 2;
  p.eps_f = 1.0;
  const SolvedSystem sys = solve_system(p, SolverPath::Column, SolveOptions{});
  StateVector bad = sys.state();
  bad.amplitudes *= 1.5;
  CHECK_THROWS_AS(one_particle_rdm(bad, SectorTag::Fermion), NormalizationError);
}

TEST_CASE("a non-positive G is refused") {
  ParticleHoleRDM g;
  g.sector = SectorTag::Fermion;
  g.matrix = Eigen::MatrixXd::Identity(4, 4);
  g.matrix(2, 2) = -0.5;
  CHECK_THROWS_AS(largest_eigenvalue(g), IntegrityError);
}

TEST_CASE("witness result carries the solver diagnostics") {
  SystemParams p;
  p.n_f = 2;
  p.eps_f = 2.0;
  p.v_f = -0.3;
  const WitnessResult w = compute_witness(p, SolveOptions{});
  CHECK(w.diagnostics.converged);
  CHECK(w.diagnostics.method == "dense");
  CHECK(w.diagnostics.dimension == 4);
  CHECK(w.diagnostics.path == SolverPath::Column);
  CHECK(w.diagnostics.total_seconds >= 0.0);
  CHECK(w.energy == doctest::Approx(-std::sqrt(4.0 + 0.09)));
}
