#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <mpw/errors.hpp>
#include <mpw/model.hpp>
#include <mpw/sweep.hpp>
#include <mpw/witness.hpp>

namespace mpw {

// Everything a run can be told, with absent fields meaning "not specified".
// A config file fills one of these, command-line flags fill another, and
// merge_configs layers the flags over the file.
struct RunConfig {
  std::optional<int> n_f;
  std::optional<int> n_b;
  std::optional<double> eps_f;
  std::optional<double> eps_b;
  std::optional<double> v_f;
  std::optional<double> v_b;
  std::optional<double> mu;
  std::optional<std::string> solver;  // full | column | collective
  std::optional<double> tol;
  std::optional<int> max_iter;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::vector<std::string> axes;  // raw NAME=START:STOP:STEP strings
  std::optional<bool> retry_failed;
};

// Plain key = value lines; '#' starts a comment, blank lines are skipped,
// 'axis' may repeat. Key spelling is forgiving about case and separators
// (nf, n_f and N-F all mean n_f), but a key that matches nothing is an
// error: a typo must not silently fall back to a default.
RunConfig parse_config_file(const std::string& path);
RunConfig parse_config_text(const std::string& text, const std::string& origin);

// Field-wise overlay: any field set in overrides replaces the base value;
// axes in overrides replace the base axes wholesale.
RunConfig merge_configs(const RunConfig& base, const RunConfig& overrides);

// Canonical key = value rendering of the given config, suitable for
// --print-config and for feeding back in as a config file.
std::string render_config(const RunConfig& config);

// NAME=START:STOP:STEP with the axis-name spellings of normalize_axis_name;
// NAME=VALUE pins a single point.
AxisSpec parse_axis(const std::string& text);

// Resolution to engine inputs. Unset fields take the documented defaults
// (single fermion species defaults shown in the CLI help); solver names are
// validated here.
SystemParams params_from(const RunConfig& config);
SolveOptions solve_options_from(const RunConfig& config);
SolverPath solver_path_from(const RunConfig& config);

}  // namespace mpw
