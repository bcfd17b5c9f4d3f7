#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <mpw/errors.hpp>
#include <mpw/model.hpp>
#include <mpw/witness.hpp>

namespace mpw {

// One swept parameter. Values are start + k * step for k = 0 .. count-1 with
// count = floor((stop - start) / step + 1e-9) + 1, so the endpoint is
// included whenever it lies on the step lattice. start == stop means a
// single point regardless of step.
struct AxisSpec {
  std::string name;  // canonical: v_f, v_b, mu, eps_f, eps_b
  double start = 0.0;
  double stop = 0.0;
  double step = 0.0;

  std::size_t count() const;
  double value(std::size_t k) const { return start + static_cast<double>(k) * step; }
};

// Accepts common spellings (vf, v-f, V_F, ...) and returns the canonical
// axis name; unknown names raise ParameterError.
std::string normalize_axis_name(const std::string& name);

// Writes the axis value into the parameter set.
void apply_axis(SystemParams& params, const std::string& canonical_name, double value);

struct SweepSpec {
  SystemParams base;
  std::vector<AxisSpec> axes;  // one or two; the first axis is the outer (slow) one
  SolveOptions solve;
  SolverPath path = SolverPath::Column;
};

// One grid point of a sweep. Absent sectors and failed solves carry NaN.
// wall_time_ms is a reserved column and always written as 0: row timing
// varies run to run and worker count to worker count, and the output files
// are specified to be byte-identical across both; measured timings live in
// the sidecar metadata instead.
struct SweepRow {
  SystemParams params;
  double energy = 0.0;
  double lambda_g_f = 0.0;
  double lambda_g_b = 0.0;
  double bound_f = 0.0;
  double bound_b = 0.0;
  bool converged = false;
  int iterations = 0;
  long long wall_time_ms = 0;
};

// Key used to match a grid point against rows loaded from an earlier run;
// built from the same %.12g formatting the writers use.
std::string row_key(const SystemParams& params);

struct SweepRunStats {
  std::size_t total = 0;
  std::size_t computed = 0;
  std::size_t reused = 0;
  std::size_t failed = 0;
  int workers = 1;
  double wall_seconds = 0.0;
};

struct SweepOptions {
  // 0 means automatic (hardware concurrency, capped at 8). The MPW_WORKERS
  // environment variable caps the final value either way.
  int workers = 0;
  // Rows from an earlier run of the same spec; matching grid points are
  // reused instead of recomputed. With retry_failed, rows that did not
  // converge are recomputed anyway.
  const std::vector<SweepRow>* existing = nullptr;
  bool retry_failed = false;
  std::function<void(std::size_t done, std::size_t total)> on_progress;
  std::size_t rdm_memory_budget = kDefaultRdmBudget;
};

// Evaluates the witness on the full grid. Rows come back in grid order
// (outer axis slowest), each computed independently from its parameters and
// the spec's fixed seed, so the result is identical for any worker count. A
// row whose evaluation throws is recorded with converged = 0 and NaN values
// rather than aborting the sweep.
std::vector<SweepRow> run_sweep(const SweepSpec& spec, const SweepOptions& options = {},
                                SweepRunStats* stats = nullptr);

// First mu at which the chosen sector's witness reaches the level. The rows
// must form a single ascending mu sweep (everything else fixed); anything
// else raises ParameterError. Rows with NaN witness values are skipped.
std::optional<double> onset_threshold(const std::vector<SweepRow>& rows, SectorTag sector,
                                      double level);

// CSV column order, frozen:
//   n_f,n_b,eps_f,eps_b,v_f,v_b,mu,energy,lambda_g_f,lambda_g_b,
//   bound_f,bound_b,converged,iterations,wall_time_ms
// Numbers use %.12g, converged is 1/0. A path ending in .jsonl switches to
// one JSON object per row with the same keys (NaN becomes null).
extern const char* const kCsvHeader;

void write_rows(const std::string& path, const std::vector<SweepRow>& rows);
std::vector<SweepRow> read_rows(const std::string& path);

// Sidecar written next to every sweep output as <path>.meta.json: tool and
// version, seed, solver path and options, axes, base parameters, row
// counters, worker count, and measured wall time.
void write_sidecar(const std::string& out_path, const SweepSpec& spec,
                   const SweepRunStats& stats);

}  // namespace mpw
