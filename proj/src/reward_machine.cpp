#include "gaitrm/reward_machine.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <sstream>

namespace gaitrm {

std::string describe(const RewardSpec& spec) {
  if (const auto* bonus = std::get_if<SwitchPoseBonus>(&spec)) {
    std::ostringstream os;
    os << "switch_pose_bonus(b=" << bonus->b << ")";
    return os.str();
  }
  return "walk";
}

std::string_view to_string(EnergyReduction r) {
  switch (r) {
    case EnergyReduction::AbsInnerProduct: return "abs_inner_product";
    case EnergyReduction::SumAbs: return "sum_abs";
    case EnergyReduction::ElementwiseNorm: return "elementwise_norm";
  }
  return "?";
}

std::optional<EnergyReduction> energy_reduction_from_string(std::string_view name) {
  for (auto r : {EnergyReduction::AbsInnerProduct, EnergyReduction::SumAbs,
                 EnergyReduction::ElementwiseNorm}) {
    if (to_string(r) == name) return r;
  }
  return std::nullopt;
}

void RewardParams::validate() const {
  if (!(gamma > 0.0 && gamma < 1.0)) throw std::invalid_argument("gamma must lie in (0, 1)");
  if (!(energy_weight >= 0.0) || !std::isfinite(energy_weight)) {
    throw std::invalid_argument("w_e must be finite and non-negative");
  }
  if (!std::isfinite(bonus_b)) throw std::invalid_argument("bonus_b must be finite");
}

// ---------------------------------------------------------------------------
// RewardMachine

RewardMachine::RewardMachine(std::vector<std::string> state_names, RmStateId initial,
                             std::vector<RmStateId> accepting, std::vector<Transition> transitions)
    : names_(std::move(state_names)),
      initial_(initial),
      accepting_(std::move(accepting)),
      transitions_(std::move(transitions)) {
  if (names_.empty()) throw std::invalid_argument("reward machine needs at least one state");
  for (std::size_t i = 0; i < names_.size(); ++i) {
    if (names_[i].empty()) throw std::invalid_argument("state names must be non-empty");
    for (std::size_t j = 0; j < i; ++j) {
      if (names_[i] == names_[j]) throw std::invalid_argument("duplicate state name '" + names_[i] + "'");
    }
  }
  auto check = [&](RmStateId u, const char* what) {
    if (u.index >= names_.size()) {
      throw std::invalid_argument(std::string(what) + " state index " + std::to_string(u.index) +
                                  " out of range");
    }
  };
  check(initial_, "initial");
  for (RmStateId u : accepting_) check(u, "accepting");
  std::sort(accepting_.begin(), accepting_.end());
  accepting_.erase(std::unique(accepting_.begin(), accepting_.end()), accepting_.end());
  for (const Transition& t : transitions_) {
    check(t.from, "transition source");
    check(t.to, "transition target");
    if (const auto* bonus = std::get_if<SwitchPoseBonus>(&t.reward); bonus && !std::isfinite(bonus->b)) {
      throw std::invalid_argument("switch_pose_bonus b must be finite");
    }
  }
}

const std::string& RewardMachine::name(RmStateId u) const { return names_.at(u.index); }

std::optional<RmStateId> RewardMachine::find_state(std::string_view name) const {
  for (std::size_t i = 0; i < names_.size(); ++i) {
    if (names_[i] == name) return RmStateId{i};
  }
  return std::nullopt;
}

bool RewardMachine::is_accepting(RmStateId u) const {
  return std::binary_search(accepting_.begin(), accepting_.end(), u);
}

std::vector<std::size_t> RewardMachine::outgoing(RmStateId u) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < transitions_.size(); ++i) {
    if (transitions_[i].from == u) out.push_back(i);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Gait machines

std::string_view to_string(Gait g) {
  switch (g) {
    case Gait::Trot: return "trot";
    case Gait::Pace: return "pace";
    case Gait::Bound: return "bound";
  }
  return "?";
}

std::optional<Gait> gait_from_string(std::string_view name) {
  for (Gait g : {Gait::Trot, Gait::Pace, Gait::Bound}) {
    if (to_string(g) == name) return g;
  }
  return std::nullopt;
}

GaitPoses gait_poses(Gait g) {
  switch (g) {
    case Gait::Trot: return {{Prop::FL, Prop::BR}, {Prop::FR, Prop::BL}};
    case Gait::Pace: return {{Prop::FL, Prop::BL}, {Prop::FR, Prop::BR}};
    case Gait::Bound: return {{Prop::FL, Prop::FR}, {Prop::BL, Prop::BR}};
  }
  throw std::invalid_argument("unknown gait");
}

RewardMachine build_gait_rm(Gait gait, const RewardParams& params) {
  params.validate();
  const GaitPoses poses = gait_poses(gait);
  const Guard a = Guard::exact_pose(poses.pose_a);
  const Guard b = Guard::exact_pose(poses.pose_b);
  const RmStateId q0{0}, q1{1};
  const SwitchPoseBonus bonus{params.bonus_b};
  return RewardMachine({"q0", "q1"}, q0, {},
                       {
                           Transition{q0, !a, q0, WalkReward{}},
                           Transition{q0, a, q1, bonus},
                           Transition{q1, !b, q1, WalkReward{}},
                           Transition{q1, b, q0, bonus},
                       });
}

// ---------------------------------------------------------------------------
// Validation

ValidationReport validate(const RewardMachine& rm) {
  ValidationReport report;
  const auto transitions = rm.transitions();
  std::vector<std::uint16_t> tables;
  tables.reserve(transitions.size());
  for (const Transition& t : transitions) tables.push_back(t.guard.truth_table());

  for (std::size_t s = 0; s < rm.num_states(); ++s) {
    const RmStateId u{s};
    const auto out = rm.outgoing(u);
    for (LabelSet l : LabelSet::all()) {
      std::vector<std::size_t> enabled;
      for (std::size_t i : out) {
        if (tables[i] & (1u << l.code())) enabled.push_back(i);
      }
      if (enabled.empty()) {
        report.gaps.push_back({u, l});
      } else if (enabled.size() > 1) {
        report.ambiguities.push_back({u, l, std::move(enabled)});
      }
    }
  }

  // Breadth-first over edges whose guard is satisfiable by some label.
  std::vector<bool> seen(rm.num_states(), false);
  std::deque<RmStateId> frontier{rm.initial()};
  seen[rm.initial().index] = true;
  while (!frontier.empty()) {
    const RmStateId u = frontier.front();
    frontier.pop_front();
    for (std::size_t i : rm.outgoing(u)) {
      const RmStateId v = transitions[i].to;
      if (tables[i] != 0 && !seen[v.index]) {
        seen[v.index] = true;
        frontier.push_back(v);
      }
    }
  }
  for (std::size_t s = 0; s < rm.num_states(); ++s) {
    if (!seen[s]) report.unreachable.push_back(RmStateId{s});
  }
  return report;
}

std::string format_report(const RewardMachine& rm, const ValidationReport& report) {
  std::ostringstream os;
  os << "states: " << rm.num_states() << " (";
  for (std::size_t i = 0; i < rm.num_states(); ++i) os << (i ? ", " : "") << rm.state_names()[i];
  os << "), initial: " << rm.name(rm.initial()) << ", transitions: " << rm.transitions().size()
     << "\n";
  os << "deterministic: " << (report.deterministic() ? "yes" : "no") << "\n";
  os << "total: " << (report.total() ? "yes" : "no") << "\n";
  os << "reachable: " << (report.unreachable.empty() ? "yes" : "no") << "\n";
  for (const auto& a : report.ambiguities) {
    os << "  ambiguous: state " << rm.name(a.state) << " label " << a.label.to_string()
       << " enables transitions";
    for (std::size_t i : a.transitions) os << " #" << i;
    os << "\n";
  }
  for (const auto& g : report.gaps) {
    os << "  gap: state " << rm.name(g.state) << " label " << g.label.to_string()
       << " enables no transition\n";
  }
  for (RmStateId u : report.unreachable) os << "  unreachable: state " << rm.name(u) << "\n";
  os << "valid: " << (report.valid() ? "yes" : "no") << "\n";
  return os.str();
}

// ---------------------------------------------------------------------------
// Stepping and rewards

RmStep rm_step(const RewardMachine& rm, RmStateId u, LabelSet l) {
  const Transition* fired = nullptr;
  for (const Transition& t : rm.transitions()) {
    if (t.from != u || !t.guard.eval(l)) continue;
    if (fired) {
      throw RmStepError("ambiguous reward machine: state " + rm.name(u) + " has several transitions for " +
                        l.to_string());
    }
    fired = &t;
  }
  if (!fired) {
    throw RmStepError("incomplete reward machine: state " + rm.name(u) + " has no transition for " +
                      l.to_string());
  }
  return {fired->to, fired->reward};
}

double energy_penalty(const StepInfo& info, const RewardParams& params) {
  double energy = 0.0;
  if (info.has_joint_vectors()) {
    if (info.torques.size() != info.joint_velocities.size()) {
      throw std::invalid_argument("torque and joint velocity vectors differ in length");
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < info.torques.size(); ++i) {
      const double p = info.torques[i] * info.joint_velocities[i];
      switch (params.energy_reduction) {
        case EnergyReduction::AbsInnerProduct: acc += p; break;
        case EnergyReduction::SumAbs: acc += std::abs(p); break;
        case EnergyReduction::ElementwiseNorm: acc += p * p; break;
      }
    }
    energy = params.energy_reduction == EnergyReduction::ElementwiseNorm ? std::sqrt(acc)
                                                                         : std::abs(acc);
  } else if (info.power) {
    energy = std::abs(*info.power);
  }
  return params.energy_weight * energy;
}

double compute_reward(const RewardSpec& spec, const StepInfo& info, const RewardParams& params) {
  if (const auto* bonus = std::get_if<SwitchPoseBonus>(&spec)) {
    const double r = bonus->b * std::tanh(info.delta_x);
    // tanh rounds to +-1 for |delta x| above about 19; keep the bound strict.
    const double cap = std::nextafter(std::abs(bonus->b), 0.0);
    return std::abs(r) > cap ? std::copysign(cap, r) : r;
  }
  return info.delta_x - energy_penalty(info, params);
}

bool equivalent_up_to_renaming(const RewardMachine& a, const RewardMachine& b) {
  if (a.num_states() != b.num_states() || a.initial() != b.initial() ||
      a.accepting() != b.accepting() || a.transitions().size() != b.transitions().size()) {
    return false;
  }
  for (std::size_t i = 0; i < a.transitions().size(); ++i) {
    const Transition& x = a.transitions()[i];
    const Transition& y = b.transitions()[i];
    if (x.from != y.from || x.to != y.to || x.reward != y.reward ||
        !semantically_equal(x.guard, y.guard)) {
      return false;
    }
  }
  return true;
}

}  // namespace gaitrm
