#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>

#include <Eigen/Core>

#include <mpw/eigensolver.hpp>
#include <mpw/errors.hpp>
#include <mpw/model.hpp>
#include <mpw/operators.hpp>

namespace mpw {

// How the ground state is represented before diagonalization.
enum class SolverPath {
  Full,        // every particle-conserving configuration of each sector
  Column,      // one particle per column; exact for this Hamiltonian
  Collective,  // dense solve in the symmetric |k_f, k_b> ladder, then
               // expansion into the column basis (with the fermionic gauge)
};

const char* to_string(SolverPath path);

// r x r matrix D[i][j] = <psi| c+_i c_j |psi> over the modes of one sector.
// psi must be normalized to 1e-8.
struct OneParticleRDM {
  SectorTag sector;
  Eigen::MatrixXd matrix;
};

OneParticleRDM one_particle_rdm(const StateVector& psi, SectorTag sector);

// Particle-hole RDM with the mean-field part removed at the operator level:
//
//   G[(i,j),(l,k)] = <phi_ij | phi_lk>,  phi_ij = (c+_i c_j - D[i][j]) |psi>
//
// which makes G a Gram matrix and hence positive semidefinite by
// construction. Pair (i,j) is flattened to row i*r + j. The intermediate
// vectors live in the sector's full particle-conserving space (the
// excitations leave the column subspace); when the intermediates would not
// fit in memory_budget_bytes they are streamed in column blocks and
// recomputed per block pair.
struct ParticleHoleRDM {
  SectorTag sector;
  Eigen::MatrixXd matrix;
};

inline constexpr std::size_t kDefaultRdmBudget = std::size_t{1} << 30;

ParticleHoleRDM particle_hole_rdm(const StateVector& psi, SectorTag sector,
                                  const OneParticleRDM& d,
                                  std::size_t memory_budget_bytes = kDefaultRdmBudget);

// Identity-route variant: the raw Gram matrix <psi| c+_j c_i c+_l c_k |psi>
// with the dyad D[j][i] * D[l][k] subtracted after the fact. Algebraically
// identical to the centered construction; kept as an independent check.
Eigen::MatrixXd particle_hole_rdm_uncentered(const StateVector& psi, SectorTag sector,
                                             const OneParticleRDM& d);

// Largest eigenvalue of G. Raises IntegrityError when the smallest
// eigenvalue is below -1e-6, which a Gram matrix cannot produce by roundoff.
double largest_eigenvalue(const ParticleHoleRDM& g);

// Upper bound N(r - N)/r on the largest eigenvalue of G for N particles in
// r modes; equals N/2 at half filling.
double theoretical_bound(int n_particles, int n_modes);

// A solved ground state together with everything needed to evaluate
// observables on it. The basis is owned here so the state stays valid.
struct SolvedSystem {
  std::shared_ptr<const CompositeBasis> basis;
  ModelInstance model;
  SolverPath path = SolverPath::Column;
  GroundState ground;
  // Collective path only: residual of the expanded state under the
  // column-basis Hamiltonian. A wrong expansion would make this O(1).
  double expansion_residual = 0.0;

  StateVector state() const { return {basis.get(), ground.vector}; }
};

SolvedSystem solve_system(const SystemParams& params, SolverPath path,
                          const SolveOptions& options);

struct WitnessDiagnostics {
  SolverPath path = SolverPath::Column;
  std::string method;
  std::size_t dimension = 0;
  int iterations = 0;
  double residual = 0.0;
  bool converged = false;
  std::uint64_t seed = 0;
  // True when a restricted representation ran at a size where it has not
  // been cross-checked against the full configuration space.
  bool fast_path_unvalidated = false;
  double solve_seconds = 0.0;
  double total_seconds = 0.0;
};

struct SectorWitness {
  double lambda_g = 0.0;
  double bound = 0.0;
  // lambda_g above 1 exceeds anything an uncorrelated product state gives.
  bool above_uncorrelated_baseline = false;
};

struct WitnessResult {
  SystemParams params;
  double energy = 0.0;
  std::optional<SectorWitness> fermion;
  std::optional<SectorWitness> boson;
  WitnessDiagnostics diagnostics;
};

// Solves the ground state along the requested path and evaluates the
// witness for every sector that is present. Cheap integrity checks run on
// every call: normalization, the trace and eigenvalue range of D, and
// positivity of G.
WitnessResult compute_witness(const SystemParams& params, const SolveOptions& options,
                              SolverPath path = SolverPath::Column,
                              std::size_t memory_budget_bytes = kDefaultRdmBudget);

}  // namespace mpw
