// mpw: ground-state pairing witness for mixed fermion / hard-core boson
// two-level systems.
//
//   mpw witness --nf 6 --nb 6 --eps-f 3.0 --eps-b 0.3 --vf -0.08 --mu 0.4
//   mpw sweep --nf 6 --nb 6 --vb -2 --eps-f 5 --eps-b 5
//             --axis vf=-1:0:0.05 --axis mu=0:1:0.05 --out heat.csv
//   mpw validate --max-n 3
//   mpw bound 6 12

#include <unistd.h>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include <mpw/errors.hpp>
#include <mpw/run_config.hpp>
#include <mpw/sweep.hpp>
#include <mpw/validation.hpp>
#include <mpw/version.hpp>
#include <mpw/witness.hpp>

namespace {

std::string g12(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", x);
  return buf;
}

std::string g6(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6g", x);
  return buf;
}

struct RunFlags {
  int nf = 0, nb = 0;
  double epsf = 0, epsb = 0, vf = 0, vb = 0, mu = 0;
  std::string solver;
  double tol = 0;
  int maxiter = 0;
  std::uint64_t seed = 0;
  std::string config_path;
  std::string out;
  std::vector<std::string> axes;
  bool retry_failed = false;
  bool json = false;
  bool print_config = false;

  CLI::Option* o_nf = nullptr;
  CLI::Option* o_nb = nullptr;
  CLI::Option* o_epsf = nullptr;
  CLI::Option* o_epsb = nullptr;
  CLI::Option* o_vf = nullptr;
  CLI::Option* o_vb = nullptr;
  CLI::Option* o_mu = nullptr;
  CLI::Option* o_solver = nullptr;
  CLI::Option* o_tol = nullptr;
  CLI::Option* o_maxiter = nullptr;
  CLI::Option* o_seed = nullptr;
  CLI::Option* o_out = nullptr;
  CLI::Option* o_retry = nullptr;
};

void add_run_options(CLI::App* cmd, RunFlags& f, bool sweep_mode) {
  f.o_nf = cmd->add_option("--nf,--n-f", f.nf, "Fermions (= fermion sites)");
  f.o_nb = cmd->add_option("--nb,--n-b", f.nb, "Hard-core bosons (= boson sites)");
  f.o_epsf = cmd->add_option("--eps-f,--epsf", f.epsf, "Fermion level splitting [default 1]");
  f.o_epsb = cmd->add_option("--eps-b,--epsb", f.epsb, "Boson level splitting [default 1]");
  f.o_vf = cmd->add_option("--vf,--v-f", f.vf, "Fermion pairing strength [default 0]");
  f.o_vb = cmd->add_option("--vb,--v-b", f.vb, "Boson pairing strength [default 0]");
  f.o_mu = cmd->add_option("--mu", f.mu, "Fermion-boson bridge coupling [default 0]");
  f.o_solver = cmd->add_option("--solver", f.solver, "full | column | collective [default column]");
  f.o_tol = cmd->add_option("--tol", f.tol, "Residual tolerance [default 1e-10]");
  f.o_maxiter = cmd->add_option("--max-iter", f.maxiter, "Iteration budget [default 500]");
  f.o_seed = cmd->add_option("--seed", f.seed, "Start-vector seed");
  cmd->add_option("--config", f.config_path, "Config file (key = value; flags win)");
  cmd->add_flag("--json", f.json, "Machine-readable output");
  cmd->add_flag("--print-config", f.print_config, "Print the effective configuration and exit");
  if (sweep_mode) {
    f.o_out = cmd->add_option("--out", f.out, "Output file, .csv or .jsonl [default sweep.csv]");
    cmd->add_option("--axis", f.axes, "Sweep axis NAME=START:STOP:STEP (repeat for a 2-D grid)")
        ->expected(1);
    f.o_retry = cmd->add_flag("--retry-failed", f.retry_failed,
                              "Recompute rows that previously failed to converge");
  } else {
    f.o_out = cmd->add_option("--out", f.out, "Write the report to a file instead of stdout");
  }
}

mpw::RunConfig config_from_flags(const RunFlags& f) {
  mpw::RunConfig c;
  if (f.o_nf->count()) c.n_f = f.nf;
  if (f.o_nb->count()) c.n_b = f.nb;
  if (f.o_epsf->count()) c.eps_f = f.epsf;
  if (f.o_epsb->count()) c.eps_b = f.epsb;
  if (f.o_vf->count()) c.v_f = f.vf;
  if (f.o_vb->count()) c.v_b = f.vb;
  if (f.o_mu->count()) c.mu = f.mu;
  if (f.o_solver->count()) c.solver = f.solver;
  if (f.o_tol->count()) c.tol = f.tol;
  if (f.o_maxiter->count()) c.max_iter = f.maxiter;
  if (f.o_seed->count()) c.seed = f.seed;
  if (f.o_out != nullptr && f.o_out->count()) c.out = f.out;
  if (!f.axes.empty()) c.axes = f.axes;
  if (f.o_retry != nullptr && f.o_retry->count()) c.retry_failed = f.retry_failed;
  return c;
}

mpw::RunConfig effective_config(const RunFlags& f, bool sweep_mode) {
  mpw::RunConfig cfg = config_from_flags(f);
  if (!f.config_path.empty()) {
    cfg = mpw::merge_configs(mpw::parse_config_file(f.config_path), cfg);
  }
  // Fill the documented defaults so --print-config shows the whole truth.
  if (!cfg.n_f) cfg.n_f = 0;
  if (!cfg.n_b) cfg.n_b = 0;
  if (!cfg.eps_f) cfg.eps_f = 1.0;
  if (!cfg.eps_b) cfg.eps_b = 1.0;
  if (!cfg.v_f) cfg.v_f = 0.0;
  if (!cfg.v_b) cfg.v_b = 0.0;
  if (!cfg.mu) cfg.mu = 0.0;
  if (!cfg.solver) cfg.solver = "column";
  if (!cfg.tol) cfg.tol = mpw::SolveOptions{}.tolerance;
  if (!cfg.max_iter) cfg.max_iter = mpw::SolveOptions{}.max_iterations;
  if (!cfg.seed) cfg.seed = mpw::kDefaultSeed;
  if (sweep_mode) {
    if (!cfg.out) cfg.out = "sweep.csv";
    if (!cfg.retry_failed) cfg.retry_failed = false;
  }
  return cfg;
}

nlohmann::json params_json(const mpw::SystemParams& p) {
  return {{"n_f", p.n_f},   {"n_b", p.n_b}, {"eps_f", p.eps_f}, {"eps_b", p.eps_b},
          {"v_f", p.v_f},   {"v_b", p.v_b}, {"mu", p.mu}};
}

nlohmann::json witness_json(const mpw::WitnessResult& w) {
  auto sector = [](const std::optional<mpw::SectorWitness>& s) -> nlohmann::json {
    if (!s) return nullptr;
    return {{"lambda_g", s->lambda_g},
            {"bound", s->bound},
            {"above_uncorrelated_baseline", s->above_uncorrelated_baseline}};
  };
  return {{"tool", "mpw"},
          {"version", mpw::kVersion},
          {"params", params_json(w.params)},
          {"energy", w.energy},
          {"fermion", sector(w.fermion)},
          {"boson", sector(w.boson)},
          {"diagnostics",
           {{"path", mpw::to_string(w.diagnostics.path)},
            {"method", w.diagnostics.method},
            {"dimension", w.diagnostics.dimension},
            {"iterations", w.diagnostics.iterations},
            {"residual", w.diagnostics.residual},
            {"converged", w.diagnostics.converged},
            {"seed", w.diagnostics.seed},
            {"fast_path_unvalidated", w.diagnostics.fast_path_unvalidated},
            {"solve_seconds", w.diagnostics.solve_seconds},
            {"total_seconds", w.diagnostics.total_seconds}}}};
}

std::string witness_text(const mpw::WitnessResult& w) {
  std::ostringstream out;
  const auto& p = w.params;
  out << "mpw " << mpw::kVersion << " witness\n";
  out << "params: n_f=" << p.n_f << " n_b=" << p.n_b << " eps_f=" << g12(p.eps_f)
      << " eps_b=" << g12(p.eps_b) << " v_f=" << g12(p.v_f) << " v_b=" << g12(p.v_b)
      << " mu=" << g12(p.mu) << "\n";
  out << "solver: " << mpw::to_string(w.diagnostics.path) << " (" << w.diagnostics.method
      << "), dimension " << w.diagnostics.dimension << ", seed " << w.diagnostics.seed << "\n";
  out << "energy: " << g12(w.energy) << "\n";
  out << "converged: " << (w.diagnostics.converged ? "yes" : "NO") << " ("
      << w.diagnostics.iterations << " iterations, residual " << g6(w.diagnostics.residual)
      << ")\n";
  auto sector_line = [&](const char* name, const std::optional<mpw::SectorWitness>& s, int n) {
    if (!s) return;
    out << name << ": lambda_g = " << g12(s->lambda_g) << "  bound = " << g12(s->bound);
    if (s->above_uncorrelated_baseline) out << "  [above uncorrelated baseline]";
    if (n < 3) out << "  [bound not asserted below n = 3]";
    out << "\n";
  };
  sector_line("fermion", w.fermion, p.n_f);
  sector_line("boson  ", w.boson, p.n_b);
  if (w.diagnostics.fast_path_unvalidated) {
    out << "note: restricted representation beyond the size cross-checked against the full "
           "space (n > 4)\n";
  }
  return out.str();
}

void deliver(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw mpw::ResourceError("cannot open '" + out_path + "' for writing");
  out << text;
  if (!out.good()) throw mpw::ResourceError("write to '" + out_path + "' failed");
  std::cout << "wrote report to " << out_path << "\n";
}

int run_witness(const RunFlags& flags) {
  const mpw::RunConfig cfg = effective_config(flags, false);
  if (flags.print_config) {
    std::cout << mpw::render_config(cfg);
    return 0;
  }
  const mpw::SystemParams params = mpw::params_from(cfg);
  const mpw::SolveOptions opts = mpw::solve_options_from(cfg);
  const mpw::SolverPath path = mpw::solver_path_from(cfg);

  const mpw::WitnessResult w = mpw::compute_witness(params, opts, path);

  const std::string out_path = cfg.out.value_or("");
  if (flags.json) {
    deliver(witness_json(w).dump(2) + "\n", out_path);
  } else {
    deliver(witness_text(w), out_path);
  }
  return w.diagnostics.converged ? 0 : 2;
}

int run_sweep_cmd(const RunFlags& flags) {
  const mpw::RunConfig cfg = effective_config(flags, true);
  if (flags.print_config) {
    std::cout << mpw::render_config(cfg);
    return 0;
  }

  mpw::SweepSpec spec;
  spec.base = mpw::params_from(cfg);
  spec.solve = mpw::solve_options_from(cfg);
  spec.path = mpw::solver_path_from(cfg);
  for (const auto& axis : cfg.axes) spec.axes.push_back(mpw::parse_axis(axis));
  if (spec.axes.empty()) {
    throw mpw::ParameterError("sweep needs at least one --axis NAME=START:STOP:STEP");
  }

  const std::string out_path = *cfg.out;
  mpw::SweepOptions options;
  options.retry_failed = cfg.retry_failed.value_or(false);

  std::vector<mpw::SweepRow> previous;
  if (std::ifstream(out_path).good()) {
    previous = mpw::read_rows(out_path);
    options.existing = &previous;
  }

  const bool progress = ::isatty(2) != 0;
  options.on_progress = [progress](std::size_t done, std::size_t total) {
    if (progress) {
      std::fprintf(stderr, "\r%zu/%zu", done, total);
      if (done == total) std::fprintf(stderr, "\n");
      std::fflush(stderr);
    }
  };

  mpw::SweepRunStats stats;
  const std::vector<mpw::SweepRow> rows = mpw::run_sweep(spec, options, &stats);
  mpw::write_rows(out_path, rows);
  mpw::write_sidecar(out_path, spec, stats);

  if (flags.json) {
    const nlohmann::json summary = {{"out", out_path},
                                    {"rows", stats.total},
                                    {"computed", stats.computed},
                                    {"reused", stats.reused},
                                    {"failed", stats.failed},
                                    {"workers", stats.workers},
                                    {"wall_seconds", stats.wall_seconds}};
    std::cout << summary.dump(2) << "\n";
  } else {
    std::cout << "wrote " << stats.total << " rows to " << out_path << " (computed "
              << stats.computed << ", reused " << stats.reused << ", failed " << stats.failed
              << ") in " << g6(stats.wall_seconds) << " s with " << stats.workers
              << " worker(s)\n";
  }
  return stats.failed == 0 ? 0 : 2;
}

int run_validate(int max_sites, int points, bool json) {
  const mpw::ValidationReport report = mpw::run_validation(max_sites, points);
  if (json) {
    nlohmann::json checks = nlohmann::json::array();
    for (const auto& c : report.checks) {
      checks.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
    }
    const nlohmann::json doc = {{"tool", "mpw"},
                                {"version", mpw::kVersion},
                                {"max_sites", max_sites},
                                {"all_passed", report.all_passed()},
                                {"checks", checks}};
    std::cout << doc.dump(2) << "\n";
  } else {
    std::cout << mpw::format_report(report);
    std::cout << (report.all_passed() ? "all checks passed\n" : "SOME CHECKS FAILED\n");
  }
  return report.all_passed() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pairing-condensate entanglement witness for mixed fermion/boson systems"};
  app.set_version_flag("--version", std::string(mpw::kVersion));
  app.require_subcommand(1);

  RunFlags witness_flags;
  CLI::App* witness_cmd =
      app.add_subcommand("witness", "Ground state and witness at a single parameter point");
  add_run_options(witness_cmd, witness_flags, false);

  RunFlags sweep_flags;
  CLI::App* sweep_cmd = app.add_subcommand("sweep", "Witness over a 1-D or 2-D parameter grid");
  add_run_options(sweep_cmd, sweep_flags, true);

  int validate_sites = 3;
  int validate_points = 20;
  bool validate_json = false;
  CLI::App* validate_cmd =
      app.add_subcommand("validate", "Cross-check the independent computation routes");
  validate_cmd->add_option("--max-n", validate_sites,
                           "Largest size checked against the full space (2..4) [default 3]");
  validate_cmd->add_option("--points", validate_points, "Battery size [default 20]");
  validate_cmd->add_flag("--json", validate_json, "Machine-readable output");

  int bound_n = 0, bound_r = 0;
  bool bound_json = false;
  CLI::App* bound_cmd =
      app.add_subcommand("bound", "Print the witness bound N(r-N)/r for N particles in r modes");
  bound_cmd->add_option("N", bound_n, "Particle count")->required();
  bound_cmd->add_option("r", bound_r, "Mode count")->required();
  bound_cmd->add_flag("--json", bound_json, "Machine-readable output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    std::cerr << "run 'mpw --help' for usage\n";
    return 1;
  }

  try {
    if (*witness_cmd) return run_witness(witness_flags);
    if (*sweep_cmd) return run_sweep_cmd(sweep_flags);
    if (*validate_cmd) return run_validate(validate_sites, validate_points, validate_json);
    if (*bound_cmd) {
      const double b = mpw::theoretical_bound(bound_n, bound_r);
      if (bound_json) {
        const nlohmann::json doc = {
            {"tool", "mpw"}, {"version", mpw::kVersion}, {"n", bound_n}, {"r", bound_r},
            {"bound", b}};
        std::cout << doc.dump(2) << "\n";
      } else {
        std::cout << g12(b) << "\n";
      }
      return 0;
    }
  } catch (const mpw::ParameterError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const mpw::NormalizationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
