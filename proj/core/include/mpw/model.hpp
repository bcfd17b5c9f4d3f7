#pragma once

#include <vector>

#include <Eigen/Core>

#include <mpw/errors.hpp>
#include <mpw/operators.hpp>

namespace mpw {

// Two-level pairing model for a fermion species and a hard-core boson
// species with a particle-hole bridge coupling:
//
//   H   = H_f + H_b + H_i
//   H_s = (eps_s/2) (N_upper - N_lower)
//         + (V_s/2) sum_{p != q} (c+_p c+_q c_{q+N} c_{p+N} + h.c.)
//   H_i = (mu/2) sum_{p,q} (f+_{p+N} f_p b+_q b_{q+N_b} + h.c.)
//
// with N sites per species, lower modes 0..N-1 and upper modes N..2N-1
// inside each sector. The p == q pairing terms vanish identically for both
// statistics (double creation on one mode) and are not generated.
struct SystemParams {
  int n_f = 0;
  int n_b = 0;
  double eps_f = 1.0;
  double eps_b = 1.0;
  double v_f = 0.0;
  double v_b = 0.0;
  double mu = 0.0;
};

// Throws ParameterError for negative or oversized particle counts, an empty
// system, non-finite couplings, or mu != 0 with mismatched species sizes
// (the bridge coupling pairs site p of one species with site q of the other
// and is only defined for equal site counts).
void validate_params(const SystemParams& params);

// Sector-local mode numbering shared by every builder. Also records where
// each sector's modes land in the flat whole-system numbering used in
// reports (fermion modes first, then boson modes).
struct ModeLayout {
  int n_f = 0;
  int n_b = 0;

  int fermion_modes() const { return 2 * n_f; }
  int boson_modes() const { return 2 * n_b; }

  int fermion_lower(int site) const { return site; }
  int fermion_upper(int site) const { return site + n_f; }
  int boson_lower(int site) const { return site; }
  int boson_upper(int site) const { return site + n_b; }

  int global_fermion_mode(int local) const { return local; }
  int global_boson_mode(int local) const { return fermion_modes() + local; }
};

std::vector<HamiltonianTerm> build_fermion_terms(const SystemParams& params);
std::vector<HamiltonianTerm> build_boson_terms(const SystemParams& params);
std::vector<HamiltonianTerm> build_interaction_terms(const SystemParams& params);

struct ModelInstance {
  SystemParams params;
  ModeLayout layout;
  std::vector<HamiltonianTerm> fermion_terms;
  std::vector<HamiltonianTerm> boson_terms;
  std::vector<HamiltonianTerm> interaction_terms;

  std::vector<HamiltonianTerm> all_terms() const;
};

ModelInstance build_model(const SystemParams& params);

// Dense Hamiltonian in the collective-spin product basis |k_f, k_b> with
// k_s the number of excited columns of species s, dimension
// (n_f + 1) * (n_b + 1), boson index fast. Every term of H conserves the
// permutation-symmetric subspace, where the species map onto spins
// j = N/2 with
//   J_z |k> = (k - N/2) |k>
//   J_+ |k> = sqrt((N - k)(k + 1)) |k + 1>
// and H = eps J_z + (V/2)(J_+^2 + J_-^2) per species plus
// (mu/2)(J_+^f J_-^b + J_-^f J_+^b).
Eigen::MatrixXd build_collective_hamiltonian(const SystemParams& params);

}  // namespace mpw
