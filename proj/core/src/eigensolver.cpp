#include <mpw/eigensolver.hpp>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace mpw {

namespace {

void fix_sign(Eigen::VectorXd& v) {
  const double scale = v.cwiseAbs().maxCoeff();
  const double cut = scale * 1e-10;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::abs(v[i]) > cut) {
      if (v[i] < 0) v = -v;
      return;
    }
  }
}

Eigen::VectorXd seeded_start(std::size_t dimension, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Eigen::VectorXd v(static_cast<Eigen::Index>(dimension));
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = dist(rng);
  v.normalize();
  return v;
}

// Smallest eigenpair of the tridiagonal matrix with the given diagonal and
// subdiagonal entries.
std::pair<double, Eigen::VectorXd> tridiag_ground(const std::vector<double>& alpha,
                                                  const std::vector<double>& beta) {
  const Eigen::Index m = static_cast<Eigen::Index>(alpha.size());
  Eigen::VectorXd diag(m), sub(std::max<Eigen::Index>(m - 1, 0));
  for (Eigen::Index i = 0; i < m; ++i) diag[i] = alpha[static_cast<std::size_t>(i)];
  for (Eigen::Index i = 0; i + 1 < m; ++i) sub[i] = beta[static_cast<std::size_t>(i)];
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(diag, sub);
  return {solver.eigenvalues()[0], solver.eigenvectors().col(0)};
}

}  // namespace

std::pair<double, Eigen::VectorXd> lowest_eigenpair_dense(const Eigen::MatrixXd& h) {
  if (h.rows() != h.cols() || h.rows() == 0) {
    throw ParameterError("lowest_eigenpair_dense: matrix must be square and non-empty");
  }
  const double asym = (h - h.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-10) {
    throw ParameterError("lowest_eigenpair_dense: matrix is not symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(h);
  Eigen::VectorXd v = solver.eigenvectors().col(0);
  fix_sign(v);
  return {solver.eigenvalues()[0], v};
}

GroundState lanczos_ground(const ApplyFn& apply, std::size_t dimension,
                           const SolveOptions& options) {
  if (dimension == 0) throw ParameterError("lanczos_ground: empty operator");
  if (options.max_iterations < 1) throw ParameterError("lanczos_ground: max_iterations < 1");
  if (!(options.tolerance > 0)) throw ParameterError("lanczos_ground: tolerance must be positive");

  GroundState out;
  out.method = "lanczos";

  const Eigen::Index n = static_cast<Eigen::Index>(dimension);
  if (dimension == 1) {
    double x = 1.0, y = 0.0;
    apply(&x, &y);
    out.energy = y;
    out.vector = Eigen::VectorXd::Ones(1);
    out.residual = 0.0;
    out.iterations = 1;
    out.converged = true;
    return out;
  }

  // Cap the stored Krylov window so full reorthogonalization cannot grow
  // past roughly 1 GiB of basis vectors; past the window we restart from the
  // current Ritz vector.
  int window = options.max_iterations;
  const std::size_t per_vector = dimension * sizeof(double);
  const std::size_t budget = std::size_t{1} << 30;
  if (per_vector * static_cast<std::size_t>(window + 2) > budget) {
    window = static_cast<int>(budget / per_vector) - 2;
    if (window < 8) throw ResourceError("lanczos_ground: dimension too large for the basis store");
  }

  int matvecs = 0;
  auto apply_counted = [&](const Eigen::VectorXd& x) {
    Eigen::VectorXd y(n);
    apply(x.data(), y.data());
    ++matvecs;
    return y;
  };

  Eigen::VectorXd v = seeded_start(dimension, options.seed);
  double best_energy = 0.0;
  Eigen::VectorXd best_vector = v;
  double best_residual = std::numeric_limits<double>::infinity();
  bool have_ritz = false;

  while (matvecs < options.max_iterations) {
    std::vector<Eigen::VectorXd> basis;
    basis.push_back(v);
    std::vector<double> alphas, betas;
    Eigen::VectorXd ritz_weights;
    double theta = 0.0;

    bool restart = false;
    while (!restart && matvecs < options.max_iterations) {
      const std::size_t j = alphas.size();
      Eigen::VectorXd w = apply_counted(basis[j]);
      const double alpha = basis[j].dot(w);
      w -= alpha * basis[j];
      if (j > 0) w -= betas[j - 1] * basis[j - 1];
      if (options.reorthogonalization == Reorthogonalization::Full) {
        for (int pass = 0; pass < 2; ++pass) {
          for (const auto& b : basis) w -= b.dot(w) * b;
        }
      }
      const double beta = w.norm();
      alphas.push_back(alpha);

      const bool check_now = alphas.size() <= 32 || alphas.size() % 4 == 0 ||
                             static_cast<int>(alphas.size()) >= window ||
                             matvecs >= options.max_iterations - 1 || beta < 1e-13;
      if (check_now) {
        auto [th, y] = tridiag_ground(alphas, betas);
        theta = th;
        ritz_weights = y;
        have_ritz = true;

        const double estimate = beta * std::abs(y[y.size() - 1]);
        const double scale = std::max(1.0, std::abs(theta));
        const bool last_chance = matvecs >= options.max_iterations - 1;
        if (estimate <= options.tolerance || beta < 1e-13 * scale || last_chance) {
          Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
          for (std::size_t i = 0; i < alphas.size(); ++i) {
            x += y[static_cast<Eigen::Index>(i)] * basis[i];
          }
          x.normalize();
          const Eigen::VectorXd hx = apply_counted(x);
          const double energy = x.dot(hx);
          const double residual = (hx - energy * x).norm();
          if (residual < best_residual) {
            best_residual = residual;
            best_energy = energy;
            best_vector = x;
          }
          if (residual <= options.tolerance) {
            out.energy = energy;
            out.vector = x;
            fix_sign(out.vector);
            out.residual = residual;
            out.iterations = matvecs;
            out.converged = true;
            return out;
          }
          if (beta < 1e-13 * scale) {
            // Krylov space closed on a non-converged vector; restart from it
            // with a fresh perturbation mixed in.
            v = x;
            std::mt19937_64 rng(options.seed ^ (0x9e3779b97f4a7c15ULL * (matvecs + 1)));
            std::uniform_real_distribution<double> dist(-1.0, 1.0);
            for (Eigen::Index i = 0; i < n; ++i) v[i] += 1e-8 * dist(rng);
            v.normalize();
            restart = true;
            continue;
          }
        }
      }

      if (static_cast<int>(alphas.size()) >= window) {
        if (!have_ritz) {
          auto [th, y] = tridiag_ground(alphas, betas);
          theta = th;
          ritz_weights = y;
        }
        Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
        for (std::size_t i = 0; i < alphas.size() && i < static_cast<std::size_t>(ritz_weights.size()); ++i) {
          x += ritz_weights[static_cast<Eigen::Index>(i)] * basis[i];
        }
        x.normalize();
        v = x;
        restart = true;
        continue;
      }

      if (beta < 1e-13) {
        restart = true;
        continue;
      }
      betas.push_back(beta);
      basis.push_back(w / beta);
    }
  }

  out.energy = best_energy;
  out.vector = best_vector;
  fix_sign(out.vector);
  out.residual = best_residual;
  out.iterations = matvecs;
  out.converged = best_residual <= options.tolerance;
  return out;
}

GroundState solve_ground(const BoundHamiltonian& h, const SolveOptions& options) {
  const std::size_t dim = h.dimension();
  if (dim == 0) throw ParameterError("solve_ground: empty basis");

  if (dim <= kDenseDirectLimit) {
    const Eigen::MatrixXd m = materialize_dense(h, kDenseDirectLimit);
    auto [energy, vector] = lowest_eigenpair_dense(m);
    GroundState out;
    out.energy = energy;
    out.vector = std::move(vector);
    out.residual = (m * out.vector - energy * out.vector).norm();
    out.iterations = 0;
    out.converged = true;
    out.method = "dense";
    return out;
  }

  ApplyFn apply = [&h](const double* x, double* y) { h.apply(x, y); };
  GroundState out = lanczos_ground(apply, dim, options);
  if (out.converged || dim > kDenseFallbackLimit) return out;

  const Eigen::MatrixXd m = materialize_dense(h, kDenseFallbackLimit);
  auto [energy, vector] = lowest_eigenpair_dense(m);
  GroundState dense;
  dense.energy = energy;
  dense.vector = std::move(vector);
  dense.residual = (m * dense.vector - energy * dense.vector).norm();
  dense.iterations = out.iterations;
  dense.converged = true;
  dense.method = "dense_fallback";
  return dense;
}

}  // namespace mpw
