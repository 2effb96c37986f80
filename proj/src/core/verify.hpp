#pragma once

// Residual verification harness: every analytic identity the library
// implements is restated as a measured residual over seeded random samples
// and aggregated into a deterministic JSON report.
//
// Claims whose name starts with "control_" are falsification guards: a
// deliberately broken variant (wrong output weight, dropped factor, one-sided
// mixed term) that is EXPECTED to fail.  The suite as a whole succeeds only
// when every claim matches its expectation, so a vacuous harness cannot go
// unnoticed.
//
// Determinism: with a fixed seed the whole report is byte-identical from run
// to run (and independent of the worker count) because every sample draws
// from a seed derived by hashing (suite seed, claim name, sample index), and
// aggregation reduces residuals in sample order.  Wall-clock is the only
// nondeterministic field; `timing = false` pins it to zero for byte-stable
// output.

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace sj {

struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

struct VerificationReport {
  std::string claim;
  std::string anchor;  // stable identity descriptor (family/what-is-checked)
  int n = 0, m = 0;    // degrees; 0 means the claim sweeps a size grid
  int samples = 0;
  double max_residual = 0.0;
  double mean_residual = 0.0;
  double tolerance = 0.0;
  bool pass = false;  // max_residual < tolerance
  std::uint64_t seed = 0;
  std::int64_t elapsed_ms = 0;

  // Bookkeeping outside the JSON schema:
  int resampled = 0;        // degenerate draws replaced during sampling
  std::string worst;        // serialized worst-offender sample
  bool expect_pass = true;  // false for control claims

  std::string json() const;  // one object, exact schema key order
};

struct ClaimInfo {
  std::string name;
  std::string anchor;
  int n = 0, m = 0;
  int samples = 0;
  double tolerance = 0.0;
  bool expect_pass = true;
  bool quick = false;  // member of the fast smoke subset
};

const std::vector<ClaimInfo>& claim_registry();
const ClaimInfo* find_claim(const std::string& name);

struct SuiteConfig {
  std::string suite = "default";  // "default" (all) or "quick" (smoke subset)
  std::uint64_t seed = 7;
  int threads = 0;   // 0: hardware concurrency; SJO_THREADS caps the count
  bool timing = true;  // false: elapsed_ms reported as 0 (byte-stable output)
  std::vector<std::string> claims;  // explicit claim selection (overrides suite)
  std::map<std::string, double> tol_override;
};

VerificationReport run_claim(const std::string& name, const SuiteConfig& cfg);

struct SuiteResult {
  std::vector<VerificationReport> reports;
  bool ok = false;  // every claim matched its expectation
  std::string json() const;  // array of report objects
};
SuiteResult run_suite(const SuiteConfig& cfg);

// Tolerance registry file: {"version": <int>, "tolerances": {claim: tol}}.
// Returns the override map; throws ConfigError on malformed content or an
// unreadable file.  Entries for unknown claims are rejected.
std::map<std::string, double> load_tolerances(const std::string& path);

}  // namespace sj
