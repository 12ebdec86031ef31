#pragma once

#include <cstdint>
#include <string>
#include <vector>

// Monte-Carlo-vs-formula verification suites. Every closed form in the
// library is checked against an independent oracle (simulation through the
// sampler, quadrature, or a second closed-form route); each check carries
// its statistic and the threshold it must meet.

namespace brownray::verify {

struct CheckResult {
  std::string name;
  bool passed;
  double statistic;
  double threshold;
  std::string note;
  bool informational = false;  // reported, not counted toward pass/fail
};

struct VerifyOptions {
  std::size_t paths = 100000;
  std::uint64_t seed = 20240817;
  int threads = 2;
  std::string cli_path;    // binary exercised by the determinism check
  std::string seed_origin;  // echoed in reports ("default", "flag", env var)
};

// Suites: core (parameter algebra, sampling law, embedded generators,
// determinism), queue (transient law vs simulation, reductions, boundaries),
// pinned (pinned law, Bayes consistency, endpoint mean), options (pricing,
// hedging), all.
std::vector<std::string> suite_names();
bool known_suite(const std::string& suite);
std::vector<CheckResult> run_suite(const std::string& suite,
                                   const VerifyOptions& options);

}  // namespace brownray::verify
