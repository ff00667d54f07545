#pragma once

// Command-line front end. Exit codes: 0 success, 1 I/O or parse failure,
// 2 semantic failure (invalid machine, bad flag combination, incompatible
// policy).

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "gaitrm/learn.hpp"

namespace gaitrm::cli {

inline constexpr const char* kToolkitVersion = "0.1.0";

inline constexpr int kExitOk = 0;
inline constexpr int kExitIo = 1;
inline constexpr int kExitSemantic = 2;

/// Environment, learner and reward settings, loadable from a --config JSON
/// document of the form {"env": {...}, "learner": {...}, "reward": {...}}.
struct RunConfig {
  ToyEnvConfig env;
  LearnerConfig learner;
  RewardParams reward;
};

/// Throws std::runtime_error on malformed JSON or unknown keys and
/// std::invalid_argument on out-of-range values.
RunConfig load_run_config(const std::string& path);

/// args excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace gaitrm::cli
