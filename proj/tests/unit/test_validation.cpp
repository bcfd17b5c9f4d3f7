#include <doctest.h>

#include <cstdlib>
#include <string>

#include <mpw/validation.hpp>

using namespace mpw;

namespace {

const CheckResult* find_check(const ValidationReport& report, const std::string& name) {
  for (const auto& c : report.checks) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

}  // namespace

TEST_CASE("the full battery passes on the production code") {
  const ValidationReport report = run_validation(3, 8);
  for (const auto& c : report.checks) {
    INFO(c.name, ": ", c.detail);
    CHECK(c.passed);
  }
  CHECK(report.all_passed());
  CHECK(report.checks.size() >= 12);

  const std::string text = format_report(report);
  CHECK(text.find("PASS  basis-bijectivity") != std::string::npos);
  CHECK(text.find("FAIL") == std::string::npos);
}

TEST_CASE("a corrupted sign rule is caught by name") {
  ValidationHooks hooks;
  hooks.excitation = [](const ExcitationOp& op, OccBits s) {
    auto r = apply_excitation(op, s);
    r.second = std::abs(r.second);  // erase every exchange sign
    return r;
  };
  const ValidationReport report = run_validation(2, 4, hooks);
  CHECK_FALSE(report.all_passed());

  const CheckResult* bad = find_check(report, "statistics-discrimination");
  REQUIRE(bad != nullptr);
  CHECK_FALSE(bad->passed);

  // The corruption was injected only into that check's probe; the production
  // pipeline keeps passing everything else.
  for (const auto& c : report.checks) {
    if (c.name == "statistics-discrimination") continue;
    INFO(c.name, ": ", c.detail);
    CHECK(c.passed);
  }
  CHECK(format_report(report).find("FAIL  statistics-discrimination") != std::string::npos);
}

TEST_CASE("small batteries skip what they cannot assert") {
  const ValidationReport report = run_validation(2, 4);
  const CheckResult* bound = find_check(report, "bound-compliance");
  REQUIRE(bound != nullptr);
  CHECK(bound->passed);
  CHECK(bound->detail.find("skipped") != std::string::npos);
}

TEST_CASE("battery parameters are validated") {
  CHECK_THROWS_AS(run_validation(1, 4), ParameterError);
  CHECK_THROWS_AS(run_validation(5, 4), ParameterError);
  CHECK_THROWS_AS(run_validation(3, 0), ParameterError);
}
