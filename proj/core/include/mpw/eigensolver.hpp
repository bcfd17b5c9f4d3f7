#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>

#include <Eigen/Core>

#include <mpw/errors.hpp>
#include <mpw/operators.hpp>
#include <mpw/version.hpp>

namespace mpw {

enum class Reorthogonalization {
  Full,  // reorthogonalize against every stored Lanczos vector (default)
  None,  // plain three-term recurrence, for experiments only
};

struct SolveOptions {
  double tolerance = 1e-10;  // bound on the true residual |H x - E x|
  int max_iterations = 500;  // total matrix applications allowed
  Reorthogonalization reorthogonalization = Reorthogonalization::Full;
  std::uint64_t seed = kDefaultSeed;  // start-vector seed, recorded in outputs
};

struct GroundState {
  double energy = 0.0;
  Eigen::VectorXd vector;
  double residual = 0.0;
  int iterations = 0;      // matrix applications spent (0 for direct dense)
  bool converged = false;
  std::string method;      // "dense", "lanczos", or "dense_fallback"
};

// Lowest eigenpair of a dense symmetric matrix. The matrix must be symmetric
// to 1e-10 elementwise or a ParameterError is raised. The returned vector is
// normalized with its first nonzero component positive.
std::pair<double, Eigen::VectorXd> lowest_eigenpair_dense(const Eigen::MatrixXd& h);

using ApplyFn = std::function<void(const double* x, double* y)>;

// Matrix-free Lanczos for the lowest eigenpair of a symmetric operator.
// The start vector is drawn deterministically from options.seed, so a run is
// reproducible from (dimension, seed). Convergence is decided on the true
// residual, never on the tridiagonal estimate alone. When the iteration
// budget ends without convergence the best Ritz pair is returned with
// converged = false.
GroundState lanczos_ground(const ApplyFn& apply, std::size_t dimension,
                           const SolveOptions& options);

// Ground state of a bound Hamiltonian. Small problems are solved densely;
// larger ones run Lanczos, and a Lanczos failure falls back to dense
// diagonalization when the dimension permits it (at most
// kDenseFallbackLimit). The sign convention of lowest_eigenpair_dense
// applies to every path.
inline constexpr std::size_t kDenseDirectLimit = 400;
inline constexpr std::size_t kDenseFallbackLimit = 20000;

GroundState solve_ground(const BoundHamiltonian& h, const SolveOptions& options);

}  // namespace mpw
