#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "gaitrm/props.hpp"
#include "gaitrm/step_info.hpp"

namespace gaitrm {

/// Index of a state inside its owning RewardMachine. Names live on the
/// machine (RewardMachine::name).
struct RmStateId {
  std::size_t index = 0;

  friend constexpr bool operator==(RmStateId, RmStateId) = default;
  friend constexpr auto operator<=>(RmStateId, RmStateId) = default;
};

/// Delta x minus the energy penalty, parameterised by RewardParams.
struct WalkReward {
  friend constexpr bool operator==(WalkReward, WalkReward) = default;
};

/// b * tanh(delta x).
struct SwitchPoseBonus {
  double b = 10000.0;
  friend constexpr bool operator==(SwitchPoseBonus, SwitchPoseBonus) = default;
};

using RewardSpec = std::variant<WalkReward, SwitchPoseBonus>;

std::string describe(const RewardSpec& spec);

/// How the per-joint torque/velocity products are reduced to one energy
/// figure before weighting.
enum class EnergyReduction {
  AbsInnerProduct,  // |sum_i tau_i v_i|
  SumAbs,           // sum_i |tau_i v_i|
  ElementwiseNorm,  // ||tau (.) v||_2
};

std::string_view to_string(EnergyReduction r);
std::optional<EnergyReduction> energy_reduction_from_string(std::string_view name);

struct RewardParams {
  double energy_weight = 0.001;  // w_e
  double gamma = 0.99;
  double bonus_b = 10000.0;
  EnergyReduction energy_reduction = EnergyReduction::AbsInnerProduct;

  /// Throws std::invalid_argument unless 0 < gamma < 1, energy_weight >= 0
  /// and bonus_b is finite.
  void validate() const;

  friend bool operator==(const RewardParams&, const RewardParams&) = default;
};

struct Transition {
  RmStateId from;
  Guard guard;
  RmStateId to;
  RewardSpec reward;
};

/// (U, u0, F, delta_u, delta_r) with delta_u and delta_r folded into one
/// guarded transition list. Immutable once constructed.
class RewardMachine {
 public:
  /// Throws std::invalid_argument on an empty or duplicate state list, or on
  /// any state reference out of range.
  RewardMachine(std::vector<std::string> state_names, RmStateId initial,
                std::vector<RmStateId> accepting, std::vector<Transition> transitions);

  std::size_t num_states() const { return names_.size(); }
  const std::vector<std::string>& state_names() const { return names_; }
  const std::string& name(RmStateId u) const;
  std::optional<RmStateId> find_state(std::string_view name) const;

  RmStateId initial() const { return initial_; }
  const std::vector<RmStateId>& accepting() const { return accepting_; }
  bool is_accepting(RmStateId u) const;

  std::span<const Transition> transitions() const { return transitions_; }
  /// Indices into transitions() of the edges leaving u, in declaration order.
  std::vector<std::size_t> outgoing(RmStateId u) const;

 private:
  std::vector<std::string> names_;
  RmStateId initial_;
  std::vector<RmStateId> accepting_;
  std::vector<Transition> transitions_;
};

enum class Gait { Trot, Pace, Bound };

std::string_view to_string(Gait g);
std::optional<Gait> gait_from_string(std::string_view name);

/// The two milestone poses of a gait: A is rewarded from q0, B from q1.
struct GaitPoses {
  LabelSet pose_a;
  LabelSet pose_b;
};

GaitPoses gait_poses(Gait g);

/// Two-state machine: q0 -> q1 on pose A, q1 -> q0 on pose B, each with
/// SwitchPoseBonus(params.bonus_b), and a Walk self-loop on each negation.
RewardMachine build_gait_rm(Gait gait, const RewardParams& params = {});

struct ValidationReport {
  struct Gap {
    RmStateId state;
    LabelSet label;
  };
  struct Ambiguity {
    RmStateId state;
    LabelSet label;
    std::vector<std::size_t> transitions;
  };

  std::vector<Gap> gaps;
  std::vector<Ambiguity> ambiguities;
  std::vector<RmStateId> unreachable;

  bool total() const { return gaps.empty(); }
  bool deterministic() const { return ambiguities.empty(); }
  bool valid() const { return gaps.empty() && ambiguities.empty() && unreachable.empty(); }
};

/// Exhaustive check over every (state, LabelSet) pair.
ValidationReport validate(const RewardMachine& rm);

/// Human-readable multi-line report, as printed by `gaitrm validate`.
std::string format_report(const RewardMachine& rm, const ValidationReport& report);

class RmStepError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RmStep {
  RmStateId next;
  RewardSpec reward;
};

/// Fires the unique transition of u enabled by l. Throws RmStepError when
/// zero or several transitions apply.
RmStep rm_step(const RewardMachine& rm, RmStateId u, LabelSet l);

double energy_penalty(const StepInfo& info, const RewardParams& params);
double compute_reward(const RewardSpec& spec, const StepInfo& info, const RewardParams& params);

/// Equal up to state names: states are matched by position, guards by truth
/// table, and transitions must appear in the same order.
bool equivalent_up_to_renaming(const RewardMachine& a, const RewardMachine& b);

}  // namespace gaitrm
