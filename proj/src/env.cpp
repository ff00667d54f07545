#include "gaitrm/env.hpp"

#include <cmath>

namespace gaitrm {

void ToyEnvConfig::validate() const {
  auto finite_nonneg = [](double v) { return std::isfinite(v) && v >= 0.0; };
  if (!finite_nonneg(clearance) || !finite_nonneg(lift_height) || !finite_nonneg(stride_gain) ||
      !finite_nonneg(lift_power_cost)) {
    throw std::invalid_argument("toy env lengths and costs must be finite and non-negative");
  }
  if (clearance <= 0.0) throw std::invalid_argument("clearance must be positive");
  if (lift_height < clearance) {
    throw std::invalid_argument("lift_height (" + std::to_string(lift_height) +
                                ") is below clearance (" + std::to_string(clearance) +
                                "); no foot could ever be labelled airborne");
  }
  if (episode_length <= 0) throw std::invalid_argument("episode_length must be positive");
}

LabelSet ToyEnvState::airborne() const {
  LabelSet l;
  for (Prop p : kAllProps) {
    if (feet[static_cast<std::size_t>(p)].phase == FootPhase::Lifting) l = l.with(p);
  }
  return l;
}

std::array<double, 4> ToyEnvState::foot_heights() const {
  return {feet[0].height, feet[1].height, feet[2].height, feet[3].height};
}

std::vector<double> Observation::features() const {
  return {static_cast<double>(code()), foot_heights[0], foot_heights[1], foot_heights[2],
          foot_heights[3], last_delta_x};
}

LabelSet label(const std::array<double, 4>& foot_heights, double clearance) {
  LabelSet l;
  for (Prop p : kAllProps) {
    if (foot_heights[static_cast<std::size_t>(p)] >= clearance) l = l.with(p);
  }
  return l;
}

LabelSet label(const StepInfo& info, double clearance) { return label(info.foot_heights, clearance); }

LabelSet label(const ToyEnvState& state, double clearance) {
  return label(state.foot_heights(), clearance);
}

bool balanced_support(LabelSet airborne, bool lateral_support_balanced) {
  if (4 - airborne.size() < 2) return false;
  if (lateral_support_balanced) return true;
  const LabelSet left_only{Prop::FR, Prop::BR};   // airborne set leaving FL, BL planted
  const LabelSet right_only{Prop::FL, Prop::BL};  // airborne set leaving FR, BR planted
  return airborne != left_only && airborne != right_only;
}

ResetResult reset(const ToyEnvConfig& config, std::uint64_t /*seed*/) {
  config.validate();
  ToyEnvState state;
  return {state, observe(state, config)};
}

StepResult step(const ToyEnvState& state, Action action, const ToyEnvConfig& config) {
  if (state.finished()) {
    throw EpisodeFinishedError("step() called on a finished episode (step " +
                               std::to_string(state.step_count) + ")");
  }
  ToyEnvState next = state;
  const LabelSet before = state.airborne();
  const LabelSet after = action.lift;

  for (Prop p : kAllProps) {
    FootState& foot = next.feet[static_cast<std::size_t>(p)];
    if (after.contains(p)) {
      foot = {config.lift_height, FootPhase::Lifting};
    } else {
      foot = {0.0, FootPhase::Planted};
    }
  }

  const std::size_t planted = 4 - after.size();
  next.fallen = planted < 2;
  const double delta_x =
      !next.fallen && balanced_support(after, config.lateral_support_balanced) && after != before ? config.stride_gain : 0.0;
  next.prev_base_x = state.base_x;
  next.base_x = state.base_x + delta_x;
  next.step_count = state.step_count + 1;
  next.terminated = next.fallen && config.stumble_terminates;
  next.truncated = !next.terminated && next.step_count >= config.episode_length;

  StepInfo info;
  info.delta_x = delta_x;
  info.power = config.lift_power_cost * static_cast<double>(after.size());
  info.foot_heights = next.foot_heights();
  info.terminated = next.terminated;
  info.truncated = next.truncated;
  return {next, info};
}

Observation observe(const ToyEnvState& state, const ToyEnvConfig& /*config*/) {
  return Observation{state.airborne(), state.foot_heights(), state.base_x - state.prev_base_x};
}

ToyQuadrupedEnv::ToyQuadrupedEnv(ToyEnvConfig config) : config_(config) {
  config_.validate();
  state_.terminated = true;  // must reset before stepping
}

Observation ToyQuadrupedEnv::reset(std::uint64_t seed) {
  auto r = gaitrm::reset(config_, seed);
  state_ = r.state;
  return r.observation;
}

StepInfo ToyQuadrupedEnv::step(Action action) {
  auto r = gaitrm::step(state_, action, config_);
  state_ = r.state;
  return r.info;
}

Observation ToyQuadrupedEnv::observe() const { return gaitrm::observe(state_, config_); }

}  // namespace gaitrm
