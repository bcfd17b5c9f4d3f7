#include <doctest.h>

#include <random>

#include <mpw/model.hpp>
#include <mpw/operators.hpp>

using namespace mpw;

TEST_CASE("fermionic excitation carries the mode-ordering sign") {
  // c+_2 c_0 on |{0,1}>: annihilating mode 0 crosses nothing, creating mode
  // 2 crosses the particle left in mode 1.
  const auto [bits, sign] = apply_excitation({2, 0, Statistics::Fermion}, 0b011);
  CHECK(bits == 0b110);
  CHECK(sign == -1);
}

TEST_CASE("hard-core boson excitation reaches the same pattern with sign +1") {
  const auto [bits, sign] = apply_excitation({2, 0, Statistics::HardcoreBoson}, 0b011);
  CHECK(bits == 0b110);
  CHECK(sign == 1);
}

TEST_CASE("excitation annihilates on empty source or occupied target") {
  CHECK(apply_excitation({2, 1, Statistics::Fermion}, 0b100).second == 0);
  CHECK(apply_excitation({2, 0, Statistics::Fermion}, 0b101).second == 0);
  // Number operator: i == j keeps the state.
  const auto [bits, sign] = apply_excitation({1, 1, Statistics::Fermion}, 0b011);
  CHECK(bits == 0b011);
  CHECK(sign == 1);
}

TEST_CASE("excitation round trip restores the state with sign +1") {
  std::mt19937_64 rng(7);
  int applied = 0;
  for (int trial = 0; trial < 500; ++trial) {
    const int modes = 2 + static_cast<int>(rng() % 7);
    const OccBits state = static_cast<OccBits>(rng()) & ((OccBits{1} << modes) - 1);
    const int i = static_cast<int>(rng() % modes);
    const int j = static_cast<int>(rng() % modes);
    for (auto st : {Statistics::Fermion, Statistics::HardcoreBoson}) {
      const auto fwd = apply_excitation({i, j, st}, state);
      if (fwd.second == 0) continue;
      const auto back = apply_excitation({j, i, st}, fwd.first);
      CHECK(back.first == state);
      CHECK(back.second * fwd.second == 1);
      ++applied;
    }
  }
  CHECK(applied > 100);
}

TEST_CASE("pair-hop factor strings reproduce the two-site matrix element") {
  // Both orderings of the pair hop map |upper upper> to |lower lower> with
  // sign +1, so the off-diagonal element of the pairing block is +V.
  const std::vector<OpFactor> pq = {{0, true}, {1, true}, {3, false}, {2, false}};
  const std::vector<OpFactor> qp = {{1, true}, {0, true}, {2, false}, {3, false}};
  for (const auto& factors : {pq, qp}) {
    const auto [bits, sign] = apply_factor_string(factors, Statistics::Fermion, 0b1100);
    CHECK(bits == 0b0011);
    CHECK(sign == 1);
  }
  // p == q would doubly create one mode and must vanish.
  const std::vector<OpFactor> pp = {{0, true}, {0, true}, {2, false}, {2, false}};
  CHECK(apply_factor_string(pp, Statistics::Fermion, 0b1100).second == 0);
}

TEST_CASE("apply_term routes sector factors and respects linearity") {
  const CompositeBasis basis(SectorBasis::enumerate(4, 2, Restriction::Column),
                             SectorBasis::enumerate(4, 2, Restriction::Column));
  HamiltonianTerm term;
  term.coefficient = 0.7;
  term.fermion_factors = {{2, true}, {0, false}};  // raise fermion column 0
  term.boson_factors = {{0, true}, {2, false}};    // lower boson column 0

  StateVector psi{&basis, Eigen::VectorXd::Zero(16)};
  // fermion all-lower (rank 0), boson column 0 excited (rank 1)
  psi.amplitudes[basis.index(0, 1)] = 1.0;

  const StateVector out = apply_term(term, psi);
  // fermion column 0 excited has rank 1; boson back to all-lower rank 0.
  // The fermionic hop crosses the column-1 lower particle once.
  CHECK(out.amplitudes[basis.index(1, 0)] == doctest::Approx(-0.7));
  CHECK(out.amplitudes.cwiseAbs().sum() == doctest::Approx(0.7));

  StateVector scaled = psi;
  scaled.amplitudes *= -2.5;
  const StateVector out2 = apply_term(term, scaled);
  CHECK((out2.amplitudes + 2.5 * out.amplitudes).norm() == doctest::Approx(0.0));
}

TEST_CASE("matvec agrees with the bound Hamiltonian on a random model") {
  SystemParams p;
  p.n_f = p.n_b = 2;
  p.eps_f = 1.3;
  p.eps_b = 0.8;
  p.v_f = -0.7;
  p.v_b = -1.1;
  p.mu = 0.6;
  const ModelInstance model = build_model(p);

  const CompositeBasis basis(SectorBasis::enumerate(4, 2, Restriction::Column),
                             SectorBasis::enumerate(4, 2, Restriction::Column));
  const BoundHamiltonian h(model.all_terms(), &basis);

  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  StateVector psi{&basis, Eigen::VectorXd(16)};
  for (int k = 0; k < 16; ++k) psi.amplitudes[k] = dist(rng);

  const StateVector slow = matvec(model.all_terms(), psi);
  const Eigen::VectorXd fast = h.apply(psi.amplitudes);
  CHECK((slow.amplitudes - fast).norm() <= 1e-13 * slow.amplitudes.norm());
}

TEST_CASE("bound Hamiltonian is symmetric and conserves the column subspace") {
  SystemParams p;
  p.n_f = p.n_b = 3;
  p.eps_f = 2.0;
  p.eps_b = 0.5;
  p.v_f = -0.9;
  p.v_b = -0.4;
  p.mu = 0.8;
  const ModelInstance model = build_model(p);
  const CompositeBasis basis(SectorBasis::enumerate(6, 3, Restriction::Column),
                             SectorBasis::enumerate(6, 3, Restriction::Column));
  const BoundHamiltonian h(model.all_terms(), &basis);
  const Eigen::MatrixXd m = materialize_dense(h);
  CHECK((m - m.transpose()).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("a term that leaves the restricted basis is reported") {
  const CompositeBasis basis(SectorBasis::enumerate(4, 2, Restriction::Column),
                             SectorBasis());
  HamiltonianTerm hop;  // lower-level hop between columns breaks the pattern
  hop.coefficient = 1.0;
  hop.fermion_factors = {{1, true}, {0, false}};
  CHECK_THROWS_AS(BoundHamiltonian({hop}, &basis), IntegrityError);
}

TEST_CASE("materialize_dense enforces its dimension limit") {
  const CompositeBasis basis(SectorBasis::enumerate(8, 4, Restriction::Column),
                             SectorBasis::enumerate(8, 4, Restriction::Column));
  HamiltonianTerm idle;
  idle.coefficient = 1.0;
  idle.fermion_factors = {{0, true}, {0, false}};
  const BoundHamiltonian h({idle}, &basis);
  CHECK_THROWS_AS(materialize_dense(h, 100), ResourceError);
  CHECK(materialize_dense(h, 256).rows() == 256);
}

TEST_CASE("number operators applied twice equal themselves applied once") {
  const CompositeBasis basis(SectorBasis::enumerate(4, 2, Restriction::Column), SectorBasis());
  HamiltonianTerm n0;
  n0.coefficient = 1.0;
  n0.fermion_factors = {{0, true}, {0, false}};

  StateVector psi{&basis, Eigen::VectorXd(4)};
  psi.amplitudes << 0.5, -0.5, 0.5, -0.5;
  const StateVector once = apply_term(n0, psi);
  const StateVector twice = apply_term(n0, once);
  CHECK((once.amplitudes - twice.amplitudes).norm() == doctest::Approx(0.0));
}
