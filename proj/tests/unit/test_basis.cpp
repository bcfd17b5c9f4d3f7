#include <doctest.h>

#include <bit>
#include <cmath>

#include <mpw/basis.hpp>

using namespace mpw;

TEST_CASE("binomial coefficients") {
  CHECK(binomial(0, 0) == 1);
  CHECK(binomial(4, 2) == 6);
  CHECK(binomial(6, 3) == 20);
  CHECK(binomial(12, 6) == 924);
  CHECK(binomial(5, 7) == 0);
  CHECK(binomial(5, -1) == 0);
  CHECK_THROWS_AS(binomial(65, 1), ParameterError);
}

TEST_CASE("full basis enumerates ascending bit patterns") {
  const auto basis = SectorBasis::enumerate(4, 2, Restriction::Full);
  REQUIRE(basis.size() == 6);
  const OccBits expected[] = {0b0011, 0b0101, 0b0110, 0b1001, 0b1010, 0b1100};
  for (std::size_t k = 0; k < 6; ++k) CHECK(basis.state(k) == expected[k]);
  for (std::size_t k = 1; k < basis.size(); ++k) CHECK(basis.state(k) > basis.state(k - 1));
}

TEST_CASE("full basis ranking is the inverse of enumeration") {
  for (int n : {1, 2, 3}) {
    const auto basis = SectorBasis::enumerate(2 * n, n, Restriction::Full);
    CHECK(basis.size() == binomial(2 * n, n));
    for (std::size_t k = 0; k < basis.size(); ++k) {
      CHECK(basis.rank(basis.state(k)) == static_cast<std::ptrdiff_t>(k));
    }
  }
  const auto basis = SectorBasis::enumerate(12, 6, Restriction::Full);
  CHECK(basis.size() == 924);
  CHECK(basis.rank(basis.state(923)) == 923);
  CHECK(basis.rank(0b1) == -1);          // wrong particle number
  CHECK(basis.rank(OccBits{1} << 63) == -1);  // outside the mode range
}

TEST_CASE("column basis holds one particle per column") {
  const auto basis = SectorBasis::enumerate(6, 3, Restriction::Column);
  REQUIRE(basis.size() == 8);
  CHECK(basis.state(0) == 0b000111);  // all lower
  CHECK(basis.state(7) == 0b111000);  // all upper
  for (std::size_t k = 0; k < basis.size(); ++k) {
    CHECK(basis.rank(basis.state(k)) == static_cast<std::ptrdiff_t>(k));
    CHECK(basis.excitation_count(basis.state(k)) == std::popcount(static_cast<OccBits>(k)));
  }
  CHECK(basis.rank(0b011011) == -1);  // column 0 doubly occupied
  CHECK(basis.rank(0b000111 >> 1) == -1);
  for (std::size_t k = 1; k < basis.size(); ++k) CHECK(basis.state(k) > basis.state(k - 1));
}

TEST_CASE("column restriction rejects bad shapes") {
  CHECK_THROWS_AS(SectorBasis::enumerate(5, 2, Restriction::Column), ParameterError);
  CHECK_THROWS_AS(SectorBasis::enumerate(6, 2, Restriction::Column), ParameterError);
  CHECK_THROWS_AS(SectorBasis::enumerate(52, 26, Restriction::Full), ResourceError);
}

TEST_CASE("degenerate sectors hold a single vacuum state") {
  const SectorBasis empty;
  CHECK(empty.size() == 1);
  CHECK(empty.state(0) == 0);
  CHECK(empty.rank(0) == 0);
  const auto zero = SectorBasis::enumerate(0, 0, Restriction::Full);
  CHECK(zero.size() == 1);
  const auto none = SectorBasis::enumerate(4, 0, Restriction::Full);
  CHECK(none.size() == 1);
  CHECK(none.state(0) == 0);
}

TEST_CASE("composite basis index arithmetic") {
  const CompositeBasis basis(SectorBasis::enumerate(4, 2, Restriction::Column),
                             SectorBasis::enumerate(6, 3, Restriction::Column));
  CHECK(basis.dimension() == 4 * 8);
  for (std::size_t f = 0; f < 4; ++f) {
    for (std::size_t b = 0; b < 8; ++b) {
      const auto [f2, b2] = basis.split(basis.index(f, b));
      CHECK(f2 == f);
      CHECK(b2 == b);
    }
  }
  // Boson rank is the fast index.
  CHECK(basis.index(1, 0) == 8);
}

TEST_CASE("dicke_expand spreads weight evenly over each excitation shell") {
  const auto basis = SectorBasis::enumerate(4, 2, Restriction::Column);
  Eigen::VectorXd w(3);
  w << 1.0, 0.0, 0.0;
  const Eigen::VectorXd ground = dicke_expand(w, basis);
  CHECK(ground[0] == doctest::Approx(1.0));
  CHECK(ground.tail(3).norm() == doctest::Approx(0.0));

  w << 0.0, 1.0, 0.0;
  const Eigen::VectorXd shell = dicke_expand(w, basis);
  CHECK(shell[0] == doctest::Approx(0.0));
  CHECK(shell[1] == doctest::Approx(1.0 / std::sqrt(2.0)));
  CHECK(shell[2] == doctest::Approx(1.0 / std::sqrt(2.0)));
  CHECK(shell.norm() == doctest::Approx(1.0));

  Eigen::VectorXd all(3);
  all << 0.5, std::sqrt(0.5), 0.5;
  CHECK(dicke_expand(all, basis).norm() == doctest::Approx(1.0));
}

TEST_CASE("dicke_expand validates its input") {
  const auto basis = SectorBasis::enumerate(4, 2, Restriction::Column);
  Eigen::VectorXd bad = Eigen::VectorXd::Ones(3);
  CHECK_THROWS_AS(dicke_expand(bad, basis), NormalizationError);
  Eigen::VectorXd short_w = Eigen::VectorXd::Ones(2).normalized();
  CHECK_THROWS_AS(dicke_expand(short_w, basis), ParameterError);
  const auto full = SectorBasis::enumerate(4, 2, Restriction::Full);
  Eigen::VectorXd ok(3);
  ok << 1.0, 0.0, 0.0;
  CHECK_THROWS_AS(dicke_expand(ok, full), ParameterError);
}

TEST_CASE("fermion column gauge signs at two sites") {
  // Raising the reference determinant once gives -|column 0> + |column 1| in
  // the mode-ordered convention, so the gauge is -1 exactly on the word 01.
  const auto basis = SectorBasis::enumerate(4, 2, Restriction::Column);
  const Eigen::VectorXd gauge = fermion_column_gauge(basis);
  REQUIRE(gauge.size() == 4);
  CHECK(gauge[0] == 1.0);
  CHECK(gauge[1] == -1.0);
  CHECK(gauge[2] == 1.0);
  CHECK(gauge[3] == 1.0);
}

TEST_CASE("fermion column gauge signs at three sites") {
  // J_+ |all lower> = +|col 0> + ... with two lower-mode crossings for
  // column 0, so that entry stays +1; column 1 has one crossing.
  const auto basis = SectorBasis::enumerate(6, 3, Restriction::Column);
  const Eigen::VectorXd gauge = fermion_column_gauge(basis);
  CHECK(gauge[0b001] == 1.0);   // two zeros above column 0
  CHECK(gauge[0b010] == -1.0);  // one zero above column 1
  CHECK(gauge[0b100] == 1.0);   // none above column 2
  CHECK(gauge[0b111] == 1.0);
}
