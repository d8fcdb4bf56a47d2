#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rankone/descendants.hpp"
#include "rankone/numeric.hpp"

// Configuration-driven experiment runner. A config is a single JSON document
// naming a construction, a list of experiments to run against it, and an
// output location. Every run is deterministic: data files carry no
// timestamps, so re-running a config reproduces its outputs byte for byte.
namespace rankone::experiment {

struct RunOptions {
  Limits limits;
  std::uint32_t threads = 1;
  // Replaces the config's output path when set.
  std::optional<std::string> output_override;
};

struct ExperimentResult {
  std::size_t index = 0;  // position in the config, 1-based
  std::string type;
  std::string label;
  // ok: ran and every stored expectation held. falsified: an expectation was
  // contradicted by an exact computation. budget: the run could not certify
  // the expectation within the resource limits. error: invalid request.
  std::string status;
  std::string detail;
  std::string file;  // data file written for this experiment, if any
};

struct RunOutcome {
  // 0: all experiments ok. 2: at least one falsified expectation.
  // 1: no falsification, but at least one budget/error result.
  int exit_code = 0;
  std::string config_name;
  std::string output_dir;
  std::vector<ExperimentResult> results;
  std::vector<std::string> files;  // paths written, in config order
};

// Parses, schema-validates, runs every experiment, writes data files plus a
// manifest.json. Throws ArgumentError with a schema message on malformed
// configs (unknown keys are rejected); runtime failures inside individual
// experiments are recorded per-experiment instead of thrown.
RunOutcome run_config_text(const std::string& json_text, const RunOptions& opts = {});
RunOutcome run_config_file(const std::string& path, const RunOptions& opts = {});

// Parse and schema-check only; throws ArgumentError on any violation.
void validate_config_text(const std::string& json_text);

// A ready-made reproduction shipped with the binary. The expected verdicts
// live inside the config text as per-experiment "expect" clauses and are
// asserted on every run; `expected` summarizes them for the manifest listing.
struct BundledConfig {
  std::string name;
  std::string description;
  std::string expected;
  std::string text;
};

const std::vector<BundledConfig>& bundled_configs();
const BundledConfig& bundled_config(const std::string& name);  // ArgumentError if unknown
RunOutcome run_bundled(const std::string& name, const RunOptions& opts = {});

// Cross-check of the sumset path against the interval-geometry path over a
// fixed battery of constructions, levels, shifts, and depths. Any mismatch is
// a bug in one of the two, never acceptable.
struct AuditReport {
  std::size_t cases = 0;
  std::size_t skipped = 0;  // budget-limited combinations, not compared
  std::vector<std::string> mismatches;
};

AuditReport standard_audit_battery(const Limits& limits = {});

}  // namespace rankone::experiment
