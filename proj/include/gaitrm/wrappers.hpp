#pragma once

// Environment wrappers that attach a reward machine (or its history-based
// equivalent) to the toy environment.
//
//   cross_product  observation = (base, RM state); reward from rm_step
//   no_gait        observation = base;             reward = walk every step
//   naive          observation = base;             reward from the latch oracle
//   stack3         observation = last 3 base obs;  reward from the latch oracle
//   augmented      observation = base + 4 labels;  reward from the latch oracle
//
// The naive observation process is deliberately non-Markovian with respect
// to its reward: the latch that decides the bonus is hidden.

#include <memory>
#include <optional>
#include <string_view>
#include <vector>

#include "gaitrm/env.hpp"
#include "gaitrm/reward_machine.hpp"

namespace gaitrm {

enum class WrapperKind { CrossProduct, NoGait, GaitNaive, Gait3T, GaitAugmented };

inline constexpr std::array<WrapperKind, 5> kAllWrapperKinds{
    WrapperKind::CrossProduct, WrapperKind::NoGait, WrapperKind::GaitNaive, WrapperKind::Gait3T,
    WrapperKind::GaitAugmented};

/// cross_product | no_gait | naive | stack3 | augmented
std::string_view to_string(WrapperKind k);
std::optional<WrapperKind> wrapper_kind_from_string(std::string_view name);
bool uses_reward_machine(WrapperKind k);

struct WrappedObservation {
  WrapperKind kind = WrapperKind::NoGait;
  /// One frame, or three (oldest first) for stack3.
  std::vector<Observation> frames;
  /// cross_product only.
  std::optional<RmStateId> rm_state;
  /// augmented only: labeling-function output appended to the base frame.
  std::optional<LabelSet> label_bits;

  const Observation& latest() const { return frames.back(); }
  std::vector<double> features() const;
};

struct WrappedStep {
  WrappedObservation observation;
  double reward = 0.0;
  StepInfo info;
  LabelSet label;
  bool terminated = false;
  bool truncated = false;

  bool done() const { return terminated || truncated; }
};

class WrappedEnv {
 public:
  virtual ~WrappedEnv() = default;

  virtual WrapperKind kind() const = 0;
  virtual WrappedObservation reset(std::uint64_t seed) = 0;
  virtual WrappedStep step(Action action) = 0;
  virtual std::unique_ptr<WrappedEnv> clone() const = 0;

  const ToyQuadrupedEnv& base() const { return env_; }
  const ToyEnvConfig& env_config() const { return env_.config(); }

 protected:
  explicit WrappedEnv(ToyEnvConfig config) : env_(config) {}
  ToyQuadrupedEnv env_;
};

/// Latest milestone pose seen by the history-based reward.
enum class MilestoneLatch { None, PoseA, PoseB };

/// The bonus-carrying edges of a two-state gait machine.
struct GaitMilestones {
  Guard pose_a;  // q0 -> q1
  Guard pose_b;  // q1 -> q0
  RewardSpec bonus_a;
  RewardSpec bonus_b;
};

/// Throws std::invalid_argument unless rm has exactly two states with the
/// initial one first, and each state has exactly one edge to the other state
/// (plus any self-loops).
GaitMilestones gait_milestones(const RewardMachine& rm);

struct OracleStep {
  double reward;
  MilestoneLatch latch;
};

/// History-based reward that needs no automaton state: pose A pays the bonus
/// when the latch is None or PoseB, pose B pays it only after PoseA, and
/// everything else pays the walk reward.
OracleStep oracle_reward_step(MilestoneLatch latch, LabelSet l, const StepInfo& info,
                              const GaitMilestones& milestones, const RewardParams& params);
OracleStep oracle_reward_step(MilestoneLatch latch, LabelSet l, const StepInfo& info,
                              const RewardMachine& rm, const RewardParams& params);

class CrossProductEnv final : public WrappedEnv {
 public:
  /// Throws std::invalid_argument if rm does not validate.
  CrossProductEnv(ToyEnvConfig config, std::shared_ptr<const RewardMachine> rm, RewardParams params);

  WrapperKind kind() const override { return WrapperKind::CrossProduct; }
  WrappedObservation reset(std::uint64_t seed) override;
  WrappedStep step(Action action) override;
  std::unique_ptr<WrappedEnv> clone() const override;

  RmStateId rm_state() const { return u_; }
  const RewardMachine& machine() const { return *rm_; }

 private:
  std::shared_ptr<const RewardMachine> rm_;
  RewardParams params_;
  RmStateId u_;
};

class NoGaitEnv final : public WrappedEnv {
 public:
  NoGaitEnv(ToyEnvConfig config, RewardParams params);

  WrapperKind kind() const override { return WrapperKind::NoGait; }
  WrappedObservation reset(std::uint64_t seed) override;
  WrappedStep step(Action action) override;
  std::unique_ptr<WrappedEnv> clone() const override;

 private:
  RewardParams params_;
};

/// naive, stack3 and augmented: same latch-based reward, different
/// observations.
class HistoryRewardEnv final : public WrappedEnv {
 public:
  /// kind must be GaitNaive, Gait3T or GaitAugmented; rm must be a valid
  /// two-state gait machine.
  HistoryRewardEnv(WrapperKind kind, ToyEnvConfig config, std::shared_ptr<const RewardMachine> rm,
                   RewardParams params);

  WrapperKind kind() const override { return kind_; }
  WrappedObservation reset(std::uint64_t seed) override;
  WrappedStep step(Action action) override;
  std::unique_ptr<WrappedEnv> clone() const override;

  MilestoneLatch latch() const { return latch_; }

 private:
  WrappedObservation make_observation(LabelSet l) const;

  WrapperKind kind_;
  std::shared_ptr<const RewardMachine> rm_;
  GaitMilestones milestones_;
  RewardParams params_;
  MilestoneLatch latch_ = MilestoneLatch::None;
  std::vector<Observation> history_;  // most recent last, at most 3
};

std::unique_ptr<WrappedEnv> wrap_cross_product(const ToyEnvConfig& config, const RewardMachine& rm,
                                               const RewardParams& params);
std::unique_ptr<WrappedEnv> wrap_naive(const ToyEnvConfig& config, const RewardMachine& rm,
                                       const RewardParams& params);
std::unique_ptr<WrappedEnv> wrap_stack3(const ToyEnvConfig& config, const RewardMachine& rm,
                                        const RewardParams& params);
std::unique_ptr<WrappedEnv> wrap_augmented(const ToyEnvConfig& config, const RewardMachine& rm,
                                           const RewardParams& params);
std::unique_ptr<WrappedEnv> wrap_nogait(const ToyEnvConfig& config, const RewardParams& params);

/// Dispatch on kind. rm may be null only for NoGait.
std::unique_ptr<WrappedEnv> make_wrapper(WrapperKind kind, const ToyEnvConfig& config,
                                         const RewardMachine* rm, const RewardParams& params);

}  // namespace gaitrm
