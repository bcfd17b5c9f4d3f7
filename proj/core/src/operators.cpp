#include <mpw/operators.hpp>

#include <bit>

namespace mpw {

namespace {

inline std::pair<OccBits, int> apply_one_factor(const OpFactor& factor, Statistics statistics,
                                                OccBits state) {
  const OccBits bit = OccBits{1} << factor.mode;
  if (factor.dagger) {
    if (state & bit) return {0, 0};
  } else {
    if (!(state & bit)) return {0, 0};
  }
  int sign = 1;
  if (statistics == Statistics::Fermion && (std::popcount(state & (bit - 1)) & 1)) {
    sign = -1;
  }
  return {state ^ bit, sign};
}

}  // namespace

std::pair<OccBits, int> apply_factor_string(const std::vector<OpFactor>& factors,
                                            Statistics statistics, OccBits state) {
  int sign = 1;
  for (auto it = factors.rbegin(); it != factors.rend(); ++it) {
    auto [next, s] = apply_one_factor(*it, statistics, state);
    if (s == 0) return {0, 0};
    state = next;
    sign *= s;
  }
  return {state, sign};
}

std::pair<OccBits, int> apply_excitation(const ExcitationOp& op, OccBits state) {
  const std::vector<OpFactor> factors = {
      {static_cast<std::uint8_t>(op.create), true},
      {static_cast<std::uint8_t>(op.annihilate), false},
  };
  return apply_factor_string(factors, op.statistics, state);
}

StateVector apply_term(const HamiltonianTerm& term, const StateVector& in) {
  const CompositeBasis& basis = *in.basis;
  const SectorBasis& fb = basis.fermion();
  const SectorBasis& bb = basis.boson();

  StateVector out;
  out.basis = in.basis;
  out.amplitudes = Eigen::VectorXd::Zero(in.amplitudes.size());

  for (std::size_t idx = 0; idx < basis.dimension(); ++idx) {
    const double amp = in.amplitudes[static_cast<Eigen::Index>(idx)];
    if (amp == 0.0) continue;
    const auto [fr, br] = basis.split(idx);

    OccBits fbits = fb.state(fr);
    int fsign = 1;
    if (!term.fermion_factors.empty()) {
      auto [next, s] = apply_factor_string(term.fermion_factors, Statistics::Fermion, fbits);
      if (s == 0) continue;
      fbits = next;
      fsign = s;
    }
    OccBits bbits = bb.state(br);
    int bsign = 1;
    if (!term.boson_factors.empty()) {
      auto [next, s] = apply_factor_string(term.boson_factors, Statistics::HardcoreBoson, bbits);
      if (s == 0) continue;
      bbits = next;
      bsign = s;
    }

    const std::ptrdiff_t fr2 = term.fermion_factors.empty() ? static_cast<std::ptrdiff_t>(fr)
                                                            : fb.rank(fbits);
    const std::ptrdiff_t br2 = term.boson_factors.empty() ? static_cast<std::ptrdiff_t>(br)
                                                          : bb.rank(bbits);
    if (fr2 < 0 || br2 < 0) {
      throw IntegrityError("apply_term: term maps a state outside the restricted basis");
    }
    const std::size_t tgt = basis.index(static_cast<std::size_t>(fr2), static_cast<std::size_t>(br2));
    out.amplitudes[static_cast<Eigen::Index>(tgt)] += term.coefficient * fsign * bsign * amp;
  }
  return out;
}

StateVector matvec(const std::vector<HamiltonianTerm>& terms, const StateVector& in) {
  StateVector out;
  out.basis = in.basis;
  out.amplitudes = Eigen::VectorXd::Zero(in.amplitudes.size());
  for (const auto& term : terms) {
    out.amplitudes += apply_term(term, in).amplitudes;
  }
  return out;
}

BoundHamiltonian::BoundHamiltonian(std::vector<HamiltonianTerm> terms, const CompositeBasis* basis)
    : terms_(std::move(terms)), basis_(basis) {
  const SectorBasis& fb = basis_->fermion();
  const SectorBasis& bb = basis_->boson();

  auto resolve = [](const std::vector<OpFactor>& factors, Statistics statistics,
                    const SectorBasis& sector) {
    std::vector<Move> moves;
    for (std::size_t src = 0; src < sector.size(); ++src) {
      auto [bits, sign] = apply_factor_string(factors, statistics, sector.state(src));
      if (sign == 0) continue;
      const std::ptrdiff_t dst = sector.rank(bits);
      if (dst < 0) {
        throw IntegrityError("BoundHamiltonian: term maps a state outside the restricted basis");
      }
      moves.push_back({static_cast<std::uint32_t>(src), static_cast<std::uint32_t>(dst),
                       static_cast<double>(sign)});
    }
    return moves;
  };

  actions_.reserve(terms_.size());
  for (const auto& term : terms_) {
    Action action;
    action.coefficient = term.coefficient;
    action.fermion_identity = term.fermion_factors.empty();
    action.boson_identity = term.boson_factors.empty();
    if (!action.fermion_identity) {
      action.fermion = resolve(term.fermion_factors, Statistics::Fermion, fb);
    }
    if (!action.boson_identity) {
      action.boson = resolve(term.boson_factors, Statistics::HardcoreBoson, bb);
    }
    actions_.push_back(std::move(action));
  }
}

void BoundHamiltonian::apply(const double* x, double* y) const {
  const std::size_t dim = dimension();
  const std::size_t nb = basis_->boson().size();
  const std::size_t nf = basis_->fermion().size();
  std::fill(y, y + dim, 0.0);

  for (const auto& action : actions_) {
    const double c = action.coefficient;
    if (action.fermion_identity && action.boson_identity) {
      for (std::size_t i = 0; i < dim; ++i) y[i] += c * x[i];
    } else if (action.boson_identity) {
      // Fermion-only term: whole boson blocks move contiguously.
      for (const auto& fm : action.fermion) {
        const double w = c * fm.sign;
        const double* src = x + static_cast<std::size_t>(fm.src) * nb;
        double* dst = y + static_cast<std::size_t>(fm.dst) * nb;
        for (std::size_t b = 0; b < nb; ++b) dst[b] += w * src[b];
      }
    } else if (action.fermion_identity) {
      for (std::size_t f = 0; f < nf; ++f) {
        const double* src = x + f * nb;
        double* dst = y + f * nb;
        for (const auto& bm : action.boson) {
          dst[bm.dst] += c * bm.sign * src[bm.src];
        }
      }
    } else {
      for (const auto& fm : action.fermion) {
        const double w = c * fm.sign;
        const double* src = x + static_cast<std::size_t>(fm.src) * nb;
        double* dst = y + static_cast<std::size_t>(fm.dst) * nb;
        for (const auto& bm : action.boson) {
          dst[bm.dst] += w * bm.sign * src[bm.src];
        }
      }
    }
  }
}

Eigen::VectorXd BoundHamiltonian::apply(const Eigen::VectorXd& x) const {
  Eigen::VectorXd y(x.size());
  apply(x.data(), y.data());
  return y;
}

Eigen::MatrixXd materialize_dense(const BoundHamiltonian& h, std::size_t max_dimension) {
  const std::size_t dim = h.dimension();
  if (dim > max_dimension) {
    throw ResourceError("materialize_dense: dimension exceeds the dense limit");
  }
  Eigen::MatrixXd m(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  Eigen::VectorXd unit = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dim));
  for (std::size_t j = 0; j < dim; ++j) {
    unit[static_cast<Eigen::Index>(j)] = 1.0;
    Eigen::VectorXd col(static_cast<Eigen::Index>(dim));
    h.apply(unit.data(), col.data());
    m.col(static_cast<Eigen::Index>(j)) = col;
    unit[static_cast<Eigen::Index>(j)] = 0.0;
  }
  return m;
}

}  // namespace mpw
