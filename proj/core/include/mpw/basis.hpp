#pragma once

#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include <mpw/errors.hpp>

namespace mpw {

// Occupation bit string for one particle sector. Bit m (value 1 << m) is the
// m-th mode of that sector, counted from zero, so the numerically lowest mode
// sits in the least significant bit. For a two-level system with N sites the
// lower level occupies bits 0..N-1 and the upper level bits N..2N-1; column p
// is the mode pair (p, p+N).
using OccBits = std::uint64_t;

enum class Restriction {
  Full,    // every n_particles-subset of the modes
  Column,  // exactly one particle per (lower, upper) column pair
};

// Exact binomial coefficient, valid for 0 <= n <= 64.
std::uint64_t binomial(int n, int k);

// Enumerated occupation basis of a single sector with a fixed particle
// number. States are stored in ascending numeric value of their bit
// patterns, which fixes the rank of every state once and for all.
class SectorBasis {
 public:
  // Zero-mode sector holding a single vacuum state. Used as the boson slot
  // of purely fermionic runs (and vice versa).
  SectorBasis() : states_{0} {}

  static SectorBasis enumerate(int n_modes, int n_particles, Restriction restriction);

  int n_modes() const { return n_modes_; }
  int n_particles() const { return n_particles_; }
  // Number of (lower, upper) site pairs; meaningful when n_modes is even.
  int n_sites() const { return n_modes_ / 2; }
  Restriction restriction() const { return restriction_; }

  std::size_t size() const { return states_.size(); }
  OccBits state(std::size_t rank) const { return states_[rank]; }

  // Rank of a bit pattern in this basis, or -1 when the pattern does not
  // belong to it. O(popcount) for the full basis, O(1) for the column basis.
  std::ptrdiff_t rank(OccBits bits) const;
  bool contains(OccBits bits) const { return rank(bits) >= 0; }

  // Number of occupied upper-level modes. Valid for two-level sectors.
  int excitation_count(OccBits bits) const;

 private:
  int n_modes_ = 0;
  int n_particles_ = 0;
  Restriction restriction_ = Restriction::Full;
  std::vector<OccBits> states_;
};

// Tensor product indexing of a fermion sector basis with a boson sector
// basis. The boson rank is the fast (contiguous) index.
class CompositeBasis {
 public:
  CompositeBasis(SectorBasis fermion, SectorBasis boson)
      : fermion_(std::move(fermion)), boson_(std::move(boson)) {}

  const SectorBasis& fermion() const { return fermion_; }
  const SectorBasis& boson() const { return boson_; }

  std::size_t dimension() const { return fermion_.size() * boson_.size(); }

  std::size_t index(std::size_t fermion_rank, std::size_t boson_rank) const {
    return fermion_rank * boson_.size() + boson_rank;
  }
  std::pair<std::size_t, std::size_t> split(std::size_t index) const {
    return {index / boson_.size(), index % boson_.size()};
  }

 private:
  SectorBasis fermion_;
  SectorBasis boson_;
};

// Expands collective-spin weights into the column basis. weights[k] is the
// amplitude of the normalized symmetric state with k excited columns, so the
// amplitude of each individual bit pattern with k excitations is
// weights[k] / sqrt(C(N, k)). The weights must be normalized to 1e-8.
//
// The expansion is symmetric under site permutations and carries no exchange
// signs; it is the exact embedding for hard-core bosons. For fermions in the
// mode-ordered bit convention above, multiply by fermion_column_gauge.
Eigen::VectorXd dicke_expand(const Eigen::VectorXd& weights, const SectorBasis& basis);

// Diagonal +/-1 gauge relating the sign-free symmetric expansion to the
// fermionic states produced by collective raising operators acting on the
// all-lower reference determinant. For the pattern with excited column set S,
// the sign is (-1)^sum_{p in S} |{q > p : q not in S}|: de-exciting column p
// must hop the fermion past every occupied lower mode above p.
Eigen::VectorXd fermion_column_gauge(const SectorBasis& basis);

}  // namespace mpw
