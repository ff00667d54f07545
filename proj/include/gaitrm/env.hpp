#pragma once

// Desk-scale quadruped stand-in. Each action commands which feet should be
// airborne; feet settle in one step. The base moves forward by stride_gain
// whenever the airborne set changes into a balanced support pattern, which is
// all the reward functions need (delta x, power, foot heights).

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "gaitrm/props.hpp"
#include "gaitrm/step_info.hpp"

namespace gaitrm {

enum class FootPhase : std::uint8_t { Planted, Lifting };

struct FootState {
  double height = 0.0;  // m above ground
  FootPhase phase = FootPhase::Planted;

  friend bool operator==(const FootState&, const FootState&) = default;
};

struct ToyEnvConfig {
  double clearance = 0.05;       // m, labeling threshold
  double lift_height = 0.10;     // m
  double stride_gain = 0.05;     // m per balanced change of the airborne set
  double lift_power_cost = 5.0;  // power units per airborne foot per step
  int episode_length = 100;      // actions
  bool stumble_terminates = true;
  /// When false, support on only the two left or only the two right feet
  /// (the pace stances) counts as unbalanced and earns no progress.
  bool lateral_support_balanced = true;
  std::uint64_t rng_seed = 0;

  /// Throws std::invalid_argument, e.g. when lift_height < clearance.
  void validate() const;

  friend bool operator==(const ToyEnvConfig&, const ToyEnvConfig&) = default;
};

struct ToyEnvState {
  std::array<FootState, 4> feet{};  // indexed by Prop
  double base_x = 0.0;
  double prev_base_x = 0.0;
  bool fallen = false;
  int step_count = 0;
  bool terminated = false;
  bool truncated = false;

  /// Feet whose commanded phase is Lifting.
  LabelSet airborne() const;
  std::array<double, 4> foot_heights() const;
  bool finished() const { return terminated || truncated; }

  friend bool operator==(const ToyEnvState&, const ToyEnvState&) = default;
};

/// Target contact pattern: a set bit means "this foot should be in the air".
struct Action {
  LabelSet lift;

  static constexpr unsigned kCount = 16;
  static Action from_code(unsigned code) { return Action{LabelSet::from_code(code)}; }
  unsigned code() const { return lift.code(); }

  friend bool operator==(Action, Action) = default;
};

/// Base observation. The tabular key is the 4-bit contact code; heights and
/// the last delta x are there for learners that want more.
struct Observation {
  LabelSet contact_pattern;  // airborne feet
  std::array<double, 4> foot_heights{};
  double last_delta_x = 0.0;

  unsigned code() const { return contact_pattern.code(); }

  /// [code, h_FL, h_FR, h_BL, h_BR, last_delta_x]
  std::vector<double> features() const;
  static constexpr std::size_t kFeatureSize = 6;

  friend bool operator==(const Observation&, const Observation&) = default;
};

class EpisodeFinishedError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Prop f is in the result iff heights[f] >= clearance.
LabelSet label(const std::array<double, 4>& foot_heights, double clearance);
LabelSet label(const StepInfo& info, double clearance);
LabelSet label(const ToyEnvState& state, double clearance);

/// Balanced: at least two feet planted; with lateral_support_balanced off,
/// additionally not only {FL, BL} or only {FR, BR} planted.
bool balanced_support(LabelSet airborne, bool lateral_support_balanced = true);

struct ResetResult {
  ToyEnvState state;
  Observation observation;
};

struct StepResult {
  ToyEnvState state;
  StepInfo info;
};

/// The toy dynamics draw no randomness, so every seed yields the same rest
/// pose; the seed is part of the signature for parity with stochastic
/// environments.
ResetResult reset(const ToyEnvConfig& config, std::uint64_t seed);

/// Throws EpisodeFinishedError when state is already terminated/truncated.
StepResult step(const ToyEnvState& state, Action action, const ToyEnvConfig& config);

Observation observe(const ToyEnvState& state, const ToyEnvConfig& config);

/// Owning wrapper around reset/step for sequential use.
class ToyQuadrupedEnv {
 public:
  explicit ToyQuadrupedEnv(ToyEnvConfig config = {});

  Observation reset(std::uint64_t seed);
  Observation reset() { return reset(config_.rng_seed); }
  StepInfo step(Action action);
  Observation observe() const;

  const ToyEnvConfig& config() const { return config_; }
  const ToyEnvState& state() const { return state_; }

 private:
  ToyEnvConfig config_;
  ToyEnvState state_;
};

}  // namespace gaitrm
