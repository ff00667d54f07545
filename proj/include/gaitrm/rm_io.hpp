#pragma once

// Reward-machine documents. A document is a JSON object:
//
//   {
//     "version": 1,
//     "states": ["q0", "q1"],
//     "initial": "q0",
//     "accepting": [],
//     "transitions": [
//       {"from": "q0", "to": "q1", "guard": "FL & !FR & !BL & BR",
//        "reward": {"type": "switch_pose_bonus", "b": 10000.0}},
//       {"from": "q0", "to": "q0", "guard": "!(FL & !FR & !BL & BR)",
//        "reward": {"type": "walk"}},
//       ...
//     ],
//     "params": {"w_e": 0.001, "gamma": 0.99, "bonus_b": 10000.0}
//   }
//
// Unknown keys are rejected at every level. params may additionally carry
// "energy_reduction" (abs_inner_product | sum_abs | elementwise_norm); it is
// only written when it differs from the default.

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>

#include "gaitrm/reward_machine.hpp"

namespace gaitrm {

inline constexpr int kRmFormatVersion = 1;

/// Parse or schema failure. location() is a JSON pointer into the document
/// ("/transitions/2/guard") or "byte N" for syntax errors.
class RmFormatError : public std::runtime_error {
 public:
  RmFormatError(std::string location, const std::string& message);
  const std::string& location() const { return location_; }

 private:
  std::string location_;
};

struct LoadedRm {
  RewardMachine machine;
  RewardParams params;
  /// Validation is advisory at load: an invalid machine still loads and the
  /// problems are reported here.
  ValidationReport report;
};

/// Throws std::invalid_argument if rm does not validate.
std::string save_rm(const RewardMachine& rm, const RewardParams& params = {});
void save_rm_file(const RewardMachine& rm, const RewardParams& params,
                  const std::filesystem::path& path);

LoadedRm load_rm(std::string_view document);
/// I/O failures throw std::runtime_error naming the path.
LoadedRm load_rm_file(const std::filesystem::path& path);

}  // namespace gaitrm
