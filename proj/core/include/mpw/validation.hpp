#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include <mpw/operators.hpp>

namespace mpw {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct ValidationReport {
  std::vector<CheckResult> checks;
  bool all_passed() const;
};

// Injection points for the self-test battery. The default-constructed hooks
// run the production code; a test can substitute a corrupted implementation
// and watch the named check fail, which proves the check has teeth.
struct ValidationHooks {
  std::function<std::pair<OccBits, int>(const ExcitationOp&, OccBits)> excitation;
};

// Cross-validates the independent computation routes against each other on
// deterministic random parameter batteries:
//
//   - basis ranking is bijective,
//   - exchange signs follow the mode-ordering rule and differ between the
//     statistics,
//   - restricted bases are closed under every Hamiltonian term,
//   - dense Hamiltonians are symmetric,
//   - full, column and collective representations give the same energy and
//     the same witness,
//   - the centered and the subtract-after particle-hole RDM agree,
//   - reduced density matrices satisfy their trace and spectral ranges,
//   - mu = 0 factorizes into independent sectors,
//   - species exchange is a symmetry of the composite problem,
//   - strong pairing saturates the witness at N/2 and no run exceeds the
//     bound (asserted for N >= 3; for fewer particles the bound drops to
//     the uncorrelated value and is reported only).
//
// max_sites bounds the systems that are checked against the full
// configuration space and must stay within [2, 4]; the full space grows too
// fast past that for a routine self-test.
ValidationReport run_validation(int max_sites = 3, int battery_points = 20,
                                const ValidationHooks& hooks = {});

std::string format_report(const ValidationReport& report);

}  // namespace mpw
