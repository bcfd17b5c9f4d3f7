#include <mpw/model.hpp>

#include <cmath>
#include <string>

namespace mpw {

namespace {

constexpr int kMaxSites = 16;

std::uint8_t mode8(int m) { return static_cast<std::uint8_t>(m); }

// eps/2 (N_upper - N_lower) + V/2 sum_{p != q} pair hops, on one sector.
void append_sector_terms(std::vector<HamiltonianTerm>& out, int n, double eps, double v,
                         bool fermion_sector) {
  auto factors_of = [&](std::vector<OpFactor> f) {
    HamiltonianTerm t;
    if (fermion_sector) {
      t.fermion_factors = std::move(f);
    } else {
      t.boson_factors = std::move(f);
    }
    return t;
  };

  for (int p = 0; p < n; ++p) {
    HamiltonianTerm lower = factors_of({{mode8(p), true}, {mode8(p), false}});
    lower.coefficient = -eps / 2.0;
    out.push_back(std::move(lower));

    HamiltonianTerm upper = factors_of({{mode8(p + n), true}, {mode8(p + n), false}});
    upper.coefficient = eps / 2.0;
    out.push_back(std::move(upper));
  }

  if (v == 0.0) return;
  for (int p = 0; p < n; ++p) {
    for (int q = 0; q < n; ++q) {
      if (p == q) continue;  // double creation on one mode, identically zero
      HamiltonianTerm down = factors_of(
          {{mode8(p), true}, {mode8(q), true}, {mode8(q + n), false}, {mode8(p + n), false}});
      down.coefficient = v / 2.0;
      out.push_back(std::move(down));

      HamiltonianTerm up = factors_of(
          {{mode8(p + n), true}, {mode8(q + n), true}, {mode8(q), false}, {mode8(p), false}});
      up.coefficient = v / 2.0;
      out.push_back(std::move(up));
    }
  }
}

Eigen::MatrixXd kron(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  Eigen::MatrixXd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

// eps J_z + (V/2)(J_+^2 + J_-^2) on one spin-N/2 ladder.
Eigen::MatrixXd collective_sector(int n, double eps, double v) {
  const Eigen::Index d = n + 1;
  Eigen::MatrixXd jp = Eigen::MatrixXd::Zero(d, d);
  Eigen::MatrixXd jz = Eigen::MatrixXd::Zero(d, d);
  for (int k = 0; k <= n; ++k) {
    jz(k, k) = k - n / 2.0;
    if (k < n) jp(k + 1, k) = std::sqrt(static_cast<double>((n - k) * (k + 1)));
  }
  const Eigen::MatrixXd jm = jp.transpose();
  return eps * jz + (v / 2.0) * (jp * jp + jm * jm);
}

}  // namespace

void validate_params(const SystemParams& params) {
  if (params.n_f < 0 || params.n_b < 0) {
    throw ParameterError("params: particle counts must be non-negative");
  }
  if (params.n_f == 0 && params.n_b == 0) {
    throw ParameterError("params: at least one species must be present");
  }
  if (params.n_f > kMaxSites || params.n_b > kMaxSites) {
    throw ParameterError("params: at most " + std::to_string(kMaxSites) + " sites per species");
  }
  for (double x : {params.eps_f, params.eps_b, params.v_f, params.v_b, params.mu}) {
    if (!std::isfinite(x)) throw ParameterError("params: couplings must be finite");
  }
  if (params.mu != 0.0 && params.n_f != params.n_b) {
    throw ParameterError("params: the bridge coupling requires equal species sizes (n_f == n_b)");
  }
}

std::vector<HamiltonianTerm> build_fermion_terms(const SystemParams& params) {
  std::vector<HamiltonianTerm> out;
  append_sector_terms(out, params.n_f, params.eps_f, params.v_f, true);
  return out;
}

std::vector<HamiltonianTerm> build_boson_terms(const SystemParams& params) {
  std::vector<HamiltonianTerm> out;
  append_sector_terms(out, params.n_b, params.eps_b, params.v_b, false);
  return out;
}

std::vector<HamiltonianTerm> build_interaction_terms(const SystemParams& params) {
  std::vector<HamiltonianTerm> out;
  if (params.mu == 0.0) return out;
  const int n = params.n_f;
  for (int p = 0; p < n; ++p) {
    for (int q = 0; q < n; ++q) {
      HamiltonianTerm raise_f;  // fermion up, boson down
      raise_f.coefficient = params.mu / 2.0;
      raise_f.fermion_factors = {{mode8(p + n), true}, {mode8(p), false}};
      raise_f.boson_factors = {{mode8(q), true}, {mode8(q + n), false}};
      out.push_back(std::move(raise_f));

      HamiltonianTerm lower_f;  // hermitian partner
      lower_f.coefficient = params.mu / 2.0;
      lower_f.fermion_factors = {{mode8(p), true}, {mode8(p + n), false}};
      lower_f.boson_factors = {{mode8(q + n), true}, {mode8(q), false}};
      out.push_back(std::move(lower_f));
    }
  }
  return out;
}

std::vector<HamiltonianTerm> ModelInstance::all_terms() const {
  std::vector<HamiltonianTerm> out;
  out.reserve(fermion_terms.size() + boson_terms.size() + interaction_terms.size());
  out.insert(out.end(), fermion_terms.begin(), fermion_terms.end());
  out.insert(out.end(), boson_terms.begin(), boson_terms.end());
  out.insert(out.end(), interaction_terms.begin(), interaction_terms.end());
  return out;
}

ModelInstance build_model(const SystemParams& params) {
  validate_params(params);
  ModelInstance model;
  model.params = params;
  model.layout = ModeLayout{params.n_f, params.n_b};
  model.fermion_terms = build_fermion_terms(params);
  model.boson_terms = build_boson_terms(params);
  model.interaction_terms = build_interaction_terms(params);
  return model;
}

Eigen::MatrixXd build_collective_hamiltonian(const SystemParams& params) {
  validate_params(params);
  const Eigen::Index df = params.n_f + 1;
  const Eigen::Index db = params.n_b + 1;

  const Eigen::MatrixXd hf = collective_sector(params.n_f, params.eps_f, params.v_f);
  const Eigen::MatrixXd hb = collective_sector(params.n_b, params.eps_b, params.v_b);

  Eigen::MatrixXd h = kron(hf, Eigen::MatrixXd::Identity(db, db)) +
                      kron(Eigen::MatrixXd::Identity(df, df), hb);

  if (params.mu != 0.0) {
    const int n = params.n_f;
    Eigen::MatrixXd jp = Eigen::MatrixXd::Zero(n + 1, n + 1);
    for (int k = 0; k < n; ++k) jp(k + 1, k) = std::sqrt(static_cast<double>((n - k) * (k + 1)));
    const Eigen::MatrixXd jm = jp.transpose();
    h += (params.mu / 2.0) * (kron(jp, jm) + kron(jm, jp));
  }
  return h;
}

}  // namespace mpw
