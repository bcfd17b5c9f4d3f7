#include <mpw/witness.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <vector>

#include <Eigen/Dense>

namespace mpw {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

void check_normalized(const StateVector& psi) {
  if (psi.basis == nullptr) throw ParameterError("state has no basis attached");
  if (psi.amplitudes.size() != static_cast<Eigen::Index>(psi.basis->dimension())) {
    throw ParameterError("state length does not match its basis");
  }
  if (std::abs(psi.norm() - 1.0) > 1e-8) {
    throw NormalizationError("state is not normalized");
  }
}

Statistics sector_statistics(SectorTag sector) {
  return sector == SectorTag::Fermion ? Statistics::Fermion : Statistics::HardcoreBoson;
}

// View of one sector of a composite state: the sector's own basis, the size
// of the spectator sector, and the strides that locate amplitude
// (active_rank, spectator_rank) inside the flat composite vector.
struct SectorView {
  const SectorBasis* active;
  std::size_t spectators;
  std::size_t stride_active;
  std::size_t stride_spectator;
};

SectorView sector_view(const StateVector& psi, SectorTag sector) {
  const CompositeBasis& basis = *psi.basis;
  if (sector == SectorTag::Fermion) {
    return {&basis.fermion(), basis.boson().size(), basis.boson().size(), 1};
  }
  return {&basis.boson(), basis.fermion().size(), 1, basis.boson().size()};
}

struct Move {
  std::uint32_t src;
  std::uint32_t dst;
  double sign;
};

// Transition list of c+_i c_j from the state's own sector basis into the
// given target basis. With allow_misses the targets outside the target
// basis are dropped: when projecting back onto the state's own restricted
// basis those components have zero overlap with the bra, so dropping them
// is exact. When embedding into the full particle-conserving basis a miss
// cannot happen and is reported as corruption.
std::vector<Move> excitation_moves(const SectorBasis& from, const SectorBasis& to, int i, int j,
                                   Statistics statistics, bool allow_misses) {
  std::vector<Move> moves;
  const ExcitationOp op{i, j, statistics};
  for (std::size_t src = 0; src < from.size(); ++src) {
    auto [bits, sign] = apply_excitation(op, from.state(src));
    if (sign == 0) continue;
    const std::ptrdiff_t dst = to.rank(bits);
    if (dst < 0) {
      if (allow_misses) continue;
      throw IntegrityError("excitation leaves the embedding space");
    }
    moves.push_back({static_cast<std::uint32_t>(src), static_cast<std::uint32_t>(dst),
                     static_cast<double>(sign)});
  }
  return moves;
}

}  // namespace

const char* to_string(SolverPath path) {
  switch (path) {
    case SolverPath::Full: return "full";
    case SolverPath::Column: return "column";
    case SolverPath::Collective: return "collective";
  }
  return "?";
}

OneParticleRDM one_particle_rdm(const StateVector& psi, SectorTag sector) {
  check_normalized(psi);
  const SectorView view = sector_view(psi, sector);
  const int r = view.active->n_modes();
  const Statistics statistics = sector_statistics(sector);

  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(r, r);
  const auto& amps = psi.amplitudes;
  for (int i = 0; i < r; ++i) {
    for (int j = 0; j < r; ++j) {
      const auto moves = excitation_moves(*view.active, *view.active, i, j, statistics,
                                          /*allow_misses=*/true);
      double acc = 0.0;
      for (const auto& m : moves) {
        for (std::size_t s = 0; s < view.spectators; ++s) {
          const double a_src = amps[static_cast<Eigen::Index>(m.src * view.stride_active +
                                                              s * view.stride_spectator)];
          const double a_dst = amps[static_cast<Eigen::Index>(m.dst * view.stride_active +
                                                              s * view.stride_spectator)];
          acc += m.sign * a_dst * a_src;
        }
      }
      d(i, j) = acc;
    }
  }
  return {sector, std::move(d)};
}

namespace {

// Shared machinery of the centered and the subtract-after construction.
// Intermediate vectors are indexed (active_full_rank * spectators +
// spectator_rank); pair columns are built on demand in blocks that fit the
// memory budget, and each column remembers which active-rank blocks it
// touches so the Gram accumulation can skip guaranteed zeros.
class GramBuilder {
 public:
  GramBuilder(const StateVector& psi, SectorTag sector, const Eigen::MatrixXd& center,
              std::size_t memory_budget_bytes)
      : view_(sector_view(psi, sector)),
        amps_(psi.amplitudes),
        center_(center),
        r_(view_.active->n_modes()) {
    const SectorBasis& active = *view_.active;
    if (active.restriction() == Restriction::Full) {
      full_ = active;
    } else {
      full_ = SectorBasis::enumerate(active.n_modes(), active.n_particles(), Restriction::Full);
    }
    iota_.resize(active.size());
    for (std::size_t k = 0; k < active.size(); ++k) {
      const std::ptrdiff_t fr = full_.rank(active.state(k));
      if (fr < 0) throw IntegrityError("restricted basis state missing from the full basis");
      iota_[k] = static_cast<std::uint32_t>(fr);
    }
    sorted_iota_ = iota_;
    std::sort(sorted_iota_.begin(), sorted_iota_.end());

    const Statistics statistics = sector_statistics(sector);
    moves_.reserve(static_cast<std::size_t>(r_) * r_);
    for (int i = 0; i < r_; ++i) {
      for (int j = 0; j < r_; ++j) {
        moves_.push_back(excitation_moves(active, full_, i, j, statistics,
                                          /*allow_misses=*/false));
      }
    }

    embedded_dim_ = full_.size() * view_.spectators;
    const std::size_t pairs = static_cast<std::size_t>(r_) * r_;
    const std::size_t per_column = embedded_dim_ * sizeof(double);
    std::size_t fit = memory_budget_bytes / (2 * std::max<std::size_t>(per_column, 1));
    block_columns_ = std::clamp<std::size_t>(fit, 1, pairs);
  }

  Eigen::MatrixXd gram() {
    const std::size_t pairs = static_cast<std::size_t>(r_) * r_;
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(pairs),
                                              static_cast<Eigen::Index>(pairs));
    Block a, b;
    for (std::size_t a0 = 0; a0 < pairs; a0 += block_columns_) {
      build_block(a0, a);
      accumulate(g, a, a);
      for (std::size_t b0 = a0 + block_columns_; b0 < pairs; b0 += block_columns_) {
        build_block(b0, b);
        accumulate(g, a, b);
      }
    }
    // Mirror the computed upper triangle.
    for (Eigen::Index i = 0; i < g.rows(); ++i) {
      for (Eigen::Index j = 0; j < i; ++j) g(i, j) = g(j, i);
    }
    return g;
  }

 private:
  struct Block {
    std::size_t first = 0;
    std::size_t count = 0;
    Eigen::MatrixXd columns;                          // embedded_dim x count
    std::vector<std::vector<std::uint32_t>> blocks;   // touched active ranks
  };

  void build_block(std::size_t first, Block& out) {
    const std::size_t pairs = static_cast<std::size_t>(r_) * r_;
    out.first = first;
    out.count = std::min(block_columns_, pairs - first);
    out.columns.setZero(static_cast<Eigen::Index>(embedded_dim_),
                        static_cast<Eigen::Index>(out.count));
    out.blocks.assign(out.count, {});
    for (std::size_t c = 0; c < out.count; ++c) {
      build_column(first + c, out.columns.col(static_cast<Eigen::Index>(c)).data(),
                   out.blocks[c]);
    }
  }

  void build_column(std::size_t pair, double* col, std::vector<std::uint32_t>& touched) {
    const std::size_t s_count = view_.spectators;
    const std::size_t sa = view_.stride_active;
    const std::size_t ss = view_.stride_spectator;

    touched.clear();
    for (const auto& m : moves_[pair]) {
      touched.push_back(m.dst);
      double* dst = col + static_cast<std::size_t>(m.dst) * s_count;
      const double* src = amps_.data() + static_cast<std::size_t>(m.src) * sa;
      for (std::size_t s = 0; s < s_count; ++s) dst[s] += m.sign * src[s * ss];
    }

    const double shift = center_.size() == 0
                             ? 0.0
                             : center_(static_cast<Eigen::Index>(pair / r_),
                                       static_cast<Eigen::Index>(pair % r_));
    if (shift != 0.0) {
      for (std::size_t k = 0; k < iota_.size(); ++k) {
        double* dst = col + static_cast<std::size_t>(iota_[k]) * s_count;
        const double* src = amps_.data() + k * sa;
        for (std::size_t s = 0; s < s_count; ++s) dst[s] -= shift * src[s * ss];
      }
      touched.insert(touched.end(), sorted_iota_.begin(), sorted_iota_.end());
    }
    std::sort(touched.begin(), touched.end());
    touched.erase(std::unique(touched.begin(), touched.end()), touched.end());
  }

  void accumulate(Eigen::MatrixXd& g, const Block& a, const Block& b) {
    const std::size_t s_count = view_.spectators;
    const bool same = a.first == b.first;
    for (std::size_t ca = 0; ca < a.count; ++ca) {
      const std::size_t start = same ? ca : 0;
      for (std::size_t cb = start; cb < b.count; ++cb) {
        const auto& blocks =
            a.blocks[ca].size() <= b.blocks[cb].size() ? a.blocks[ca] : b.blocks[cb];
        const double* pa = a.columns.col(static_cast<Eigen::Index>(ca)).data();
        const double* pb = b.columns.col(static_cast<Eigen::Index>(cb)).data();
        double acc = 0.0;
        for (const std::uint32_t blk : blocks) {
          const double* xa = pa + static_cast<std::size_t>(blk) * s_count;
          const double* xb = pb + static_cast<std::size_t>(blk) * s_count;
          for (std::size_t s = 0; s < s_count; ++s) acc += xa[s] * xb[s];
        }
        g(static_cast<Eigen::Index>(a.first + ca), static_cast<Eigen::Index>(b.first + cb)) = acc;
      }
    }
  }

  SectorView view_;
  const Eigen::VectorXd& amps_;
  Eigen::MatrixXd center_;  // empty for the uncentered route
  int r_;
  SectorBasis full_;
  std::vector<std::uint32_t> iota_;
  std::vector<std::uint32_t> sorted_iota_;
  std::vector<std::vector<Move>> moves_;
  std::size_t embedded_dim_ = 0;
  std::size_t block_columns_ = 0;
};

}  // namespace

ParticleHoleRDM particle_hole_rdm(const StateVector& psi, SectorTag sector,
                                  const OneParticleRDM& d, std::size_t memory_budget_bytes) {
  check_normalized(psi);
  const SectorView view = sector_view(psi, sector);
  if (d.sector != sector || d.matrix.rows() != view.active->n_modes()) {
    throw ParameterError("particle_hole_rdm: one-particle RDM does not match the sector");
  }
  GramBuilder builder(psi, sector, d.matrix, memory_budget_bytes);
  return {sector, builder.gram()};
}

Eigen::MatrixXd particle_hole_rdm_uncentered(const StateVector& psi, SectorTag sector,
                                             const OneParticleRDM& d) {
  check_normalized(psi);
  const SectorView view = sector_view(psi, sector);
  const int r = view.active->n_modes();
  if (d.sector != sector || d.matrix.rows() != r) {
    throw ParameterError("particle_hole_rdm_uncentered: one-particle RDM does not match");
  }
  GramBuilder builder(psi, sector, Eigen::MatrixXd(), kDefaultRdmBudget);
  Eigen::MatrixXd g = builder.gram();
  Eigen::VectorXd dyad(static_cast<Eigen::Index>(r) * r);
  for (int i = 0; i < r; ++i) {
    for (int j = 0; j < r; ++j) dyad[static_cast<Eigen::Index>(i) * r + j] = d.matrix(j, i);
  }
  g.noalias() -= dyad * dyad.transpose();
  return g;
}

double largest_eigenvalue(const ParticleHoleRDM& g) {
  if (g.matrix.rows() != g.matrix.cols()) throw ParameterError("largest_eigenvalue: not square");
  if (g.matrix.rows() == 0) throw ParameterError("largest_eigenvalue: empty matrix");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(g.matrix, Eigen::EigenvaluesOnly);
  const auto& ev = solver.eigenvalues();
  if (ev[0] < -1e-6) {
    throw IntegrityError("particle-hole RDM has a negative eigenvalue beyond roundoff");
  }
  return ev[ev.size() - 1];
}

double theoretical_bound(int n_particles, int n_modes) {
  if (n_particles < 1 || n_modes < n_particles) {
    throw ParameterError("theoretical_bound: need 1 <= n_particles <= n_modes");
  }
  return static_cast<double>(n_particles) * (n_modes - n_particles) / n_modes;
}

namespace {

SectorBasis make_sector_basis(int n, Restriction restriction) {
  if (n == 0) return SectorBasis();
  return SectorBasis::enumerate(2 * n, n, restriction);
}

// |k_f, k_b> weights to column-basis amplitudes. The boson factor is the
// plain symmetric expansion; the fermion factor additionally carries the
// column-ordering gauge of the mode basis.
Eigen::VectorXd expand_collective(const Eigen::VectorXd& weights, const CompositeBasis& basis,
                                  int n_f, int n_b) {
  const SectorBasis& fb = basis.fermion();
  const SectorBasis& bb = basis.boson();
  const Eigen::VectorXd gauge =
      n_f > 0 ? fermion_column_gauge(fb) : Eigen::VectorXd::Ones(1);

  std::vector<double> fnorm(n_f + 1), bnorm(n_b + 1);
  for (int k = 0; k <= n_f; ++k) fnorm[k] = std::sqrt(static_cast<double>(binomial(n_f, k)));
  for (int k = 0; k <= n_b; ++k) bnorm[k] = std::sqrt(static_cast<double>(binomial(n_b, k)));

  Eigen::VectorXd out(static_cast<Eigen::Index>(basis.dimension()));
  for (std::size_t fr = 0; fr < fb.size(); ++fr) {
    const int kf = n_f > 0 ? fb.excitation_count(fb.state(fr)) : 0;
    const double ffac = gauge[static_cast<Eigen::Index>(fr)] / fnorm[kf];
    for (std::size_t br = 0; br < bb.size(); ++br) {
      const int kb = n_b > 0 ? bb.excitation_count(bb.state(br)) : 0;
      const double w = weights[static_cast<Eigen::Index>(kf) * (n_b + 1) + kb];
      out[static_cast<Eigen::Index>(basis.index(fr, br))] = w * ffac / bnorm[kb];
    }
  }
  return out;
}

void normalize_sign(Eigen::VectorXd& v) {
  const double scale = v.cwiseAbs().maxCoeff();
  const double cut = scale * 1e-10;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::abs(v[i]) > cut) {
      if (v[i] < 0) v = -v;
      return;
    }
  }
}

}  // namespace

SolvedSystem solve_system(const SystemParams& params, SolverPath path,
                          const SolveOptions& options) {
  validate_params(params);

  SolvedSystem out;
  out.model = build_model(params);
  out.path = path;

  const Restriction restriction =
      path == SolverPath::Full ? Restriction::Full : Restriction::Column;
  out.basis = std::make_shared<CompositeBasis>(make_sector_basis(params.n_f, restriction),
                                               make_sector_basis(params.n_b, restriction));

  if (path == SolverPath::Collective) {
    const Eigen::MatrixXd hc = build_collective_hamiltonian(params);
    auto [energy, weights] = lowest_eigenpair_dense(hc);
    Eigen::VectorXd psi = expand_collective(weights, *out.basis, params.n_f, params.n_b);
    if (std::abs(psi.norm() - 1.0) > 1e-8) {
      throw IntegrityError("collective expansion lost normalization");
    }
    normalize_sign(psi);

    const BoundHamiltonian h(out.model.all_terms(), out.basis.get());
    const Eigen::VectorXd hpsi = h.apply(psi);
    const double residual = (hpsi - energy * psi).norm();
    if (residual > 1e-6 * std::max(1.0, std::abs(energy))) {
      throw IntegrityError("collective expansion does not satisfy the column-basis Hamiltonian");
    }

    out.ground.energy = energy;
    out.ground.vector = std::move(psi);
    out.ground.residual = residual;
    out.ground.iterations = 0;
    out.ground.converged = true;
    out.ground.method = "collective_dense";
    out.expansion_residual = residual;
    return out;
  }

  const BoundHamiltonian h(out.model.all_terms(), out.basis.get());
  out.ground = solve_ground(h, options);
  return out;
}

WitnessResult compute_witness(const SystemParams& params, const SolveOptions& options,
                              SolverPath path, std::size_t memory_budget_bytes) {
  const auto t0 = Clock::now();
  SolvedSystem solved = solve_system(params, path, options);
  const double solve_seconds = seconds_since(t0);

  WitnessResult result;
  result.params = params;
  result.energy = solved.ground.energy;
  result.diagnostics.path = path;
  result.diagnostics.method = solved.ground.method;
  result.diagnostics.dimension = solved.basis->dimension();
  result.diagnostics.iterations = solved.ground.iterations;
  result.diagnostics.residual = solved.ground.residual;
  result.diagnostics.converged = solved.ground.converged;
  result.diagnostics.seed = options.seed;
  result.diagnostics.fast_path_unvalidated =
      path != SolverPath::Full && std::max(params.n_f, params.n_b) > 4;
  result.diagnostics.solve_seconds = solve_seconds;

  const StateVector psi = solved.state();
  auto evaluate = [&](SectorTag sector, int n) -> std::optional<SectorWitness> {
    if (n == 0) return std::nullopt;
    const OneParticleRDM d = one_particle_rdm(psi, sector);

    if (std::abs(d.matrix.trace() - n) > 1e-6) {
      throw IntegrityError("one-particle RDM trace does not match the particle number");
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> occ(d.matrix, Eigen::EigenvaluesOnly);
    if (occ.eigenvalues()[0] < -1e-6 ||
        occ.eigenvalues()[occ.eigenvalues().size() - 1] > 1.0 + 1e-6) {
      throw IntegrityError("one-particle RDM eigenvalues leave [0, 1]");
    }

    const ParticleHoleRDM g = particle_hole_rdm(psi, sector, d, memory_budget_bytes);
    SectorWitness w;
    w.lambda_g = largest_eigenvalue(g);
    w.bound = theoretical_bound(n, 2 * n);
    w.above_uncorrelated_baseline = w.lambda_g > 1.0 + 1e-9;
    return w;
  };

  result.fermion = evaluate(SectorTag::Fermion, params.n_f);
  result.boson = evaluate(SectorTag::Boson, params.n_b);
  result.diagnostics.total_seconds = seconds_since(t0);
  return result;
}

}  // namespace mpw
