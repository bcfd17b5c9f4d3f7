#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include <mpw/basis.hpp>
#include <mpw/errors.hpp>

namespace mpw {

enum class Statistics {
  Fermion,       // exchange antisymmetry, signs from mode ordering
  HardcoreBoson, // at most one particle per mode, no exchange signs
};

enum class SectorTag { Fermion, Boson };

// Normal-ordered one-body excitation c^dag_create c_annihilate acting inside
// one sector. Mode indices are sector-local and zero-based.
struct ExcitationOp {
  int create;
  int annihilate;
  Statistics statistics;
};

// Applies the excitation to a single occupation pattern. Returns the
// resulting pattern and a sign of +1 or -1; a sign of 0 means the operator
// annihilates the state (empty source mode or occupied target mode). The
// fermionic sign of each elementary factor is the parity of the number of
// occupied modes strictly below the factor's mode, evaluated on the pattern
// the factor acts on; factors apply right to left, annihilation first.
std::pair<OccBits, int> apply_excitation(const ExcitationOp& op, OccBits state);

// One creation or annihilation factor inside a product term.
struct OpFactor {
  std::uint8_t mode;  // sector-local, zero-based
  bool dagger;
};

// Applies a factor product (written left to right, applied right to left) to
// one occupation pattern under the given statistics.
std::pair<OccBits, int> apply_factor_string(const std::vector<OpFactor>& factors,
                                            Statistics statistics, OccBits state);

// coefficient * (fermion factor product) * (boson factor product). Either
// factor list may be empty, meaning the identity on that sector.
struct HamiltonianTerm {
  double coefficient = 0.0;
  std::vector<OpFactor> fermion_factors;
  std::vector<OpFactor> boson_factors;
};

// Amplitudes over a composite basis. The basis is owned by the caller and
// must outlive the vector.
struct StateVector {
  const CompositeBasis* basis = nullptr;
  Eigen::VectorXd amplitudes;

  double norm() const { return amplitudes.norm(); }
};

// Reference implementations that walk every basis state per term. They are
// the oracle the precomputed fast path is tested against. A term that maps
// some basis state onto a pattern outside the (restricted) basis raises an
// integrity error: the basis is not closed under that term.
StateVector apply_term(const HamiltonianTerm& term, const StateVector& in);
StateVector matvec(const std::vector<HamiltonianTerm>& terms, const StateVector& in);

// Hamiltonian bound to a fixed composite basis. Construction resolves every
// term into sparse per-sector transition lists (source rank, target rank,
// sign); apply() then runs pure gather-scatter with no bit manipulation.
// Construction performs the same closure check as apply_term.
class BoundHamiltonian {
 public:
  BoundHamiltonian(std::vector<HamiltonianTerm> terms, const CompositeBasis* basis);

  const CompositeBasis& basis() const { return *basis_; }
  const std::vector<HamiltonianTerm>& terms() const { return terms_; }
  std::size_t dimension() const { return basis_->dimension(); }

  // y = H x, both of length dimension(). y is overwritten.
  void apply(const double* x, double* y) const;
  Eigen::VectorXd apply(const Eigen::VectorXd& x) const;

 private:
  struct Move {
    std::uint32_t src;
    std::uint32_t dst;
    double sign;
  };
  struct Action {
    double coefficient;
    bool fermion_identity;
    bool boson_identity;
    std::vector<Move> fermion;
    std::vector<Move> boson;
  };

  std::vector<HamiltonianTerm> terms_;
  const CompositeBasis* basis_;
  std::vector<Action> actions_;
};

// Dense matrix of the bound Hamiltonian, for direct diagonalization and for
// oracle comparisons. Refuses dimensions above max_dimension.
Eigen::MatrixXd materialize_dense(const BoundHamiltonian& h, std::size_t max_dimension = 20000);

}  // namespace mpw
