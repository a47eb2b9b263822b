#pragma once

// Batch experiment driver. Artifacts (CSV and JSON) are rendered into strings
// before anything touches the filesystem, so a replay can recompute and
// byte-compare them; nothing in an artifact depends on wall clock, paths or
// worker count.

#include <map>
#include <optional>
#include <string>

#include "invlearn/config.hpp"

namespace invlearn {

inline constexpr int kExitGateFailure = 1;
inline constexpr int kExitConfigError = 2;
inline constexpr int kExitReplayMismatch = 3;

struct RunOverrides {
  std::optional<std::uint64_t> master_seed;
  std::optional<std::string> output_dir;
  std::optional<int> workers;
};

using ArtifactMap = std::map<std::string, std::string>;

struct RunOutcome {
  int exit_code = 0;
  std::string output_dir;
  ArtifactMap artifacts;  // name -> content, manifest included
};

/// Recomputes the artifact set for a validated config; pure apart from the
/// Monte Carlo seeded by config.master_seed.
ArtifactMap compute_artifacts(const RunConfig& config, int workers);

/// Runs one experiment: computes artifacts, writes them (plus the manifest)
/// under the output directory and prints one line per gate. Exit code 0 when
/// every gate passes, 1 otherwise.
RunOutcome run(RunConfig config, const RunOverrides& overrides = {});

/// Convenience wrapper: parse, apply overrides, run. Config problems yield
/// exit code 2.
int run_from_file(const std::string& config_path, const RunOverrides& overrides = {});

/// Re-executes the run recorded in a manifest and byte-compares every
/// artifact against the files next to the manifest. Exit code 0 on a perfect
/// match, 3 on any version or content mismatch.
int replay(const std::string& manifest_path, std::optional<int> workers_override = {});

}
