#include <mpw/basis.hpp>

#include <array>
#include <bit>
#include <cmath>
#include <string>

namespace mpw {

namespace {

constexpr int kMaxModes = 62;

const std::array<std::array<std::uint64_t, 65>, 65>& binomial_table() {
  static const auto table = [] {
    std::array<std::array<std::uint64_t, 65>, 65> t{};
    for (int n = 0; n <= 64; ++n) {
      t[n][0] = 1;
      for (int k = 1; k <= n; ++k) {
        t[n][k] = t[n - 1][k - 1] + (k <= n - 1 ? t[n - 1][k] : 0);
      }
    }
    return t;
  }();
  return table;
}

// Next bit pattern with the same popcount in ascending numeric order.
OccBits next_same_popcount(OccBits v) {
  OccBits c = v & (~v + 1);
  OccBits r = v + c;
  return (((r ^ v) >> 2) / c) | r;
}

}  // namespace

std::uint64_t binomial(int n, int k) {
  if (n < 0 || n > 64) throw ParameterError("binomial: n out of range [0, 64]");
  if (k < 0 || k > n) return 0;
  return binomial_table()[n][k];
}

SectorBasis SectorBasis::enumerate(int n_modes, int n_particles, Restriction restriction) {
  if (n_modes < 0 || n_modes > kMaxModes) {
    throw ParameterError("SectorBasis: n_modes out of range [0, " + std::to_string(kMaxModes) + "]");
  }
  if (n_particles < 0 || n_particles > n_modes) {
    throw ParameterError("SectorBasis: n_particles out of range [0, n_modes]");
  }

  SectorBasis basis;
  basis.n_modes_ = n_modes;
  basis.n_particles_ = n_particles;
  basis.restriction_ = restriction;
  basis.states_.clear();

  if (restriction == Restriction::Column) {
    if (n_modes % 2 != 0 || n_particles != n_modes / 2) {
      throw ParameterError("SectorBasis: column restriction needs n_modes even and half filling");
    }
    const int sites = n_modes / 2;
    if (sites > 26) throw ResourceError("SectorBasis: column basis too large to enumerate");
    const OccBits lower_mask = sites == 0 ? 0 : ((OccBits{1} << sites) - 1);
    basis.states_.reserve(std::size_t{1} << sites);
    for (OccBits word = 0; word < (OccBits{1} << sites); ++word) {
      // Excitation word w maps to (w << sites) | (~w & mask), which is
      // strictly increasing in w, so ranks coincide with the word value.
      basis.states_.push_back((word << sites) | (~word & lower_mask));
    }
    return basis;
  }

  const std::uint64_t count = binomial(n_modes, n_particles);
  if (count > 100'000'000ULL) throw ResourceError("SectorBasis: full basis too large to enumerate");
  basis.states_.reserve(count);
  if (n_particles == 0) {
    basis.states_.push_back(0);
    return basis;
  }
  const OccBits limit = n_modes == 64 ? ~OccBits{0} : ((OccBits{1} << n_modes) - 1);
  OccBits v = (OccBits{1} << n_particles) - 1;
  while (true) {
    basis.states_.push_back(v);
    if (basis.states_.size() == count) break;
    v = next_same_popcount(v);
    if (v > limit) break;
  }
  if (basis.states_.size() != count) {
    throw IntegrityError("SectorBasis: enumeration produced the wrong state count");
  }
  return basis;
}

std::ptrdiff_t SectorBasis::rank(OccBits bits) const {
  const OccBits mask = n_modes_ >= 64 ? ~OccBits{0} : ((OccBits{1} << n_modes_) - 1);
  if ((bits & ~mask) != 0) return -1;
  if (std::popcount(bits) != n_particles_) return -1;

  if (restriction_ == Restriction::Column) {
    const int sites = n_modes_ / 2;
    const OccBits lower_mask = sites == 0 ? 0 : ((OccBits{1} << sites) - 1);
    const OccBits upper = bits >> sites;
    if ((bits & lower_mask) != ((~upper) & lower_mask)) return -1;
    return static_cast<std::ptrdiff_t>(upper);
  }

  // Combinadic rank of the set of occupied positions in ascending order.
  std::uint64_t r = 0;
  int i = 1;
  OccBits v = bits;
  while (v != 0) {
    const int pos = std::countr_zero(v);
    r += binomial(pos, i);
    v &= v - 1;
    ++i;
  }
  return static_cast<std::ptrdiff_t>(r);
}

int SectorBasis::excitation_count(OccBits bits) const {
  return std::popcount(bits >> (n_modes_ / 2));
}

Eigen::VectorXd dicke_expand(const Eigen::VectorXd& weights, const SectorBasis& basis) {
  if (basis.restriction() != Restriction::Column) {
    throw ParameterError("dicke_expand: basis must carry the column restriction");
  }
  const int sites = basis.n_sites();
  if (weights.size() != sites + 1) {
    throw ParameterError("dicke_expand: need one weight per excitation count");
  }
  const double norm2 = weights.squaredNorm();
  if (std::abs(norm2 - 1.0) > 1e-8) {
    throw NormalizationError("dicke_expand: weights are not normalized");
  }

  Eigen::VectorXd out(static_cast<Eigen::Index>(basis.size()));
  for (std::size_t r = 0; r < basis.size(); ++r) {
    const int k = basis.excitation_count(basis.state(r));
    out[static_cast<Eigen::Index>(r)] =
        weights[k] / std::sqrt(static_cast<double>(binomial(sites, k)));
  }
  return out;
}

Eigen::VectorXd fermion_column_gauge(const SectorBasis& basis) {
  if (basis.restriction() != Restriction::Column) {
    throw ParameterError("fermion_column_gauge: basis must carry the column restriction");
  }
  const int sites = basis.n_sites();
  Eigen::VectorXd gauge(static_cast<Eigen::Index>(basis.size()));
  for (std::size_t r = 0; r < basis.size(); ++r) {
    const OccBits word = basis.state(r) >> sites;
    int crossings = 0;
    OccBits v = word;
    while (v != 0) {
      const int p = std::countr_zero(v);
      crossings += (sites - 1 - p) - std::popcount(word >> (p + 1));
      v &= v - 1;
    }
    gauge[static_cast<Eigen::Index>(r)] = (crossings % 2 == 0) ? 1.0 : -1.0;
  }
  return gauge;
}

}  // namespace mpw
