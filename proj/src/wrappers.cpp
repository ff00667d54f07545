#include "gaitrm/wrappers.hpp"

namespace gaitrm {

std::string_view to_string(WrapperKind k) {
  switch (k) {
    case WrapperKind::CrossProduct: return "cross_product";
    case WrapperKind::NoGait: return "no_gait";
    case WrapperKind::GaitNaive: return "naive";
    case WrapperKind::Gait3T: return "stack3";
    case WrapperKind::GaitAugmented: return "augmented";
  }
  return "?";
}

std::optional<WrapperKind> wrapper_kind_from_string(std::string_view name) {
  for (WrapperKind k : kAllWrapperKinds) {
    if (to_string(k) == name) return k;
  }
  return std::nullopt;
}

bool uses_reward_machine(WrapperKind k) { return k != WrapperKind::NoGait; }

std::vector<double> WrappedObservation::features() const {
  std::vector<double> out;
  for (const Observation& o : frames) {
    const auto f = o.features();
    out.insert(out.end(), f.begin(), f.end());
  }
  if (rm_state) out.push_back(static_cast<double>(rm_state->index));
  if (label_bits) {
    for (Prop p : kAllProps) out.push_back(label_bits->contains(p) ? 1.0 : 0.0);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Latch oracle

GaitMilestones gait_milestones(const RewardMachine& rm) {
  if (rm.num_states() != 2 || rm.initial() != RmStateId{0}) {
    throw std::invalid_argument("not a two-state gait machine with initial state first");
  }
  const RmStateId q0{0};
  const Transition* a = nullptr;
  const Transition* b = nullptr;
  for (const Transition& t : rm.transitions()) {
    if (t.from == t.to) continue;
    const Transition*& slot = t.from == q0 ? a : b;
    if (slot) throw std::invalid_argument("gait machine has more than one edge between its states");
    slot = &t;
  }
  if (!a || !b) throw std::invalid_argument("gait machine needs edges q0 -> q1 and q1 -> q0");
  return GaitMilestones{a->guard, b->guard, a->reward, b->reward};
}

OracleStep oracle_reward_step(MilestoneLatch latch, LabelSet l, const StepInfo& info,
                              const GaitMilestones& milestones, const RewardParams& params) {
  if (milestones.pose_a.eval(l) && latch != MilestoneLatch::PoseA) {
    return {compute_reward(milestones.bonus_a, info, params), MilestoneLatch::PoseA};
  }
  if (milestones.pose_b.eval(l) && latch == MilestoneLatch::PoseA) {
    return {compute_reward(milestones.bonus_b, info, params), MilestoneLatch::PoseB};
  }
  return {compute_reward(WalkReward{}, info, params), latch};
}

OracleStep oracle_reward_step(MilestoneLatch latch, LabelSet l, const StepInfo& info,
                              const RewardMachine& rm, const RewardParams& params) {
  return oracle_reward_step(latch, l, info, gait_milestones(rm), params);
}

// ---------------------------------------------------------------------------
// Cross product

namespace {

std::shared_ptr<const RewardMachine> require_valid(std::shared_ptr<const RewardMachine> rm) {
  if (!rm) throw std::invalid_argument("reward machine required");
  const ValidationReport report = validate(*rm);
  if (!report.deterministic() || !report.total()) {
    throw std::invalid_argument("reward machine must be deterministic and total:\n" +
                                format_report(*rm, report));
  }
  return rm;
}

}  // namespace

CrossProductEnv::CrossProductEnv(ToyEnvConfig config, std::shared_ptr<const RewardMachine> rm,
                                 RewardParams params)
    : WrappedEnv(config), rm_(require_valid(std::move(rm))), params_(params), u_(rm_->initial()) {
  params_.validate();
}

WrappedObservation CrossProductEnv::reset(std::uint64_t seed) {
  u_ = rm_->initial();
  WrappedObservation obs{WrapperKind::CrossProduct, {env_.reset(seed)}, u_, std::nullopt};
  return obs;
}

WrappedStep CrossProductEnv::step(Action action) {
  if (rm_->is_accepting(u_)) throw EpisodeFinishedError("reward machine already accepted");
  WrappedStep out;
  out.info = env_.step(action);
  out.label = label(out.info, env_.config().clearance);
  const RmStep fired = rm_step(*rm_, u_, out.label);
  u_ = fired.next;
  out.reward = compute_reward(fired.reward, out.info, params_);
  out.terminated = out.info.terminated || rm_->is_accepting(u_);
  out.truncated = !out.terminated && out.info.truncated;
  out.observation = {WrapperKind::CrossProduct, {env_.observe()}, u_, std::nullopt};
  return out;
}

std::unique_ptr<WrappedEnv> CrossProductEnv::clone() const {
  return std::make_unique<CrossProductEnv>(*this);
}

// ---------------------------------------------------------------------------
// No gait

NoGaitEnv::NoGaitEnv(ToyEnvConfig config, RewardParams params) : WrappedEnv(config), params_(params) {
  params_.validate();
}

WrappedObservation NoGaitEnv::reset(std::uint64_t seed) {
  return {WrapperKind::NoGait, {env_.reset(seed)}, std::nullopt, std::nullopt};
}

WrappedStep NoGaitEnv::step(Action action) {
  WrappedStep out;
  out.info = env_.step(action);
  out.label = label(out.info, env_.config().clearance);
  out.reward = compute_reward(WalkReward{}, out.info, params_);
  out.terminated = out.info.terminated;
  out.truncated = out.info.truncated;
  out.observation = {WrapperKind::NoGait, {env_.observe()}, std::nullopt, std::nullopt};
  return out;
}

std::unique_ptr<WrappedEnv> NoGaitEnv::clone() const { return std::make_unique<NoGaitEnv>(*this); }

// ---------------------------------------------------------------------------
// History-based reward wrappers

HistoryRewardEnv::HistoryRewardEnv(WrapperKind kind, ToyEnvConfig config,
                                   std::shared_ptr<const RewardMachine> rm, RewardParams params)
    : WrappedEnv(config),
      kind_(kind),
      rm_(require_valid(std::move(rm))),
      milestones_(gait_milestones(*rm_)),
      params_(params) {
  if (kind != WrapperKind::GaitNaive && kind != WrapperKind::Gait3T &&
      kind != WrapperKind::GaitAugmented) {
    throw std::invalid_argument("HistoryRewardEnv supports naive, stack3 and augmented only");
  }
  params_.validate();
}

WrappedObservation HistoryRewardEnv::make_observation(LabelSet l) const {
  WrappedObservation obs;
  obs.kind = kind_;
  switch (kind_) {
    case WrapperKind::Gait3T:
      obs.frames = history_;
      break;
    case WrapperKind::GaitAugmented:
      obs.frames = {history_.back()};
      obs.label_bits = l;
      break;
    default:
      obs.frames = {history_.back()};
      break;
  }
  return obs;
}

WrappedObservation HistoryRewardEnv::reset(std::uint64_t seed) {
  latch_ = MilestoneLatch::None;
  const Observation o = env_.reset(seed);
  history_.assign(3, o);
  return make_observation(label(env_.state(), env_.config().clearance));
}

WrappedStep HistoryRewardEnv::step(Action action) {
  WrappedStep out;
  out.info = env_.step(action);
  out.label = label(out.info, env_.config().clearance);
  const OracleStep r = oracle_reward_step(latch_, out.label, out.info, milestones_, params_);
  latch_ = r.latch;
  out.reward = r.reward;
  out.terminated = out.info.terminated;
  out.truncated = out.info.truncated;
  history_.erase(history_.begin());
  history_.push_back(env_.observe());
  out.observation = make_observation(out.label);
  return out;
}

std::unique_ptr<WrappedEnv> HistoryRewardEnv::clone() const {
  return std::make_unique<HistoryRewardEnv>(*this);
}

// ---------------------------------------------------------------------------
// Factories

std::unique_ptr<WrappedEnv> wrap_cross_product(const ToyEnvConfig& config, const RewardMachine& rm,
                                               const RewardParams& params) {
  return std::make_unique<CrossProductEnv>(config, std::make_shared<const RewardMachine>(rm), params);
}

std::unique_ptr<WrappedEnv> wrap_naive(const ToyEnvConfig& config, const RewardMachine& rm,
                                       const RewardParams& params) {
  return std::make_unique<HistoryRewardEnv>(WrapperKind::GaitNaive, config,
                                            std::make_shared<const RewardMachine>(rm), params);
}

std::unique_ptr<WrappedEnv> wrap_stack3(const ToyEnvConfig& config, const RewardMachine& rm,
                                        const RewardParams& params) {
  return std::make_unique<HistoryRewardEnv>(WrapperKind::Gait3T, config,
                                            std::make_shared<const RewardMachine>(rm), params);
}

std::unique_ptr<WrappedEnv> wrap_augmented(const ToyEnvConfig& config, const RewardMachine& rm,
                                           const RewardParams& params) {
  return std::make_unique<HistoryRewardEnv>(WrapperKind::GaitAugmented, config,
                                            std::make_shared<const RewardMachine>(rm), params);
}

std::unique_ptr<WrappedEnv> wrap_nogait(const ToyEnvConfig& config, const RewardParams& params) {
  return std::make_unique<NoGaitEnv>(config, params);
}

std::unique_ptr<WrappedEnv> make_wrapper(WrapperKind kind, const ToyEnvConfig& config,
                                         const RewardMachine* rm, const RewardParams& params) {
  if (kind == WrapperKind::NoGait) return wrap_nogait(config, params);
  if (!rm) throw std::invalid_argument(std::string(to_string(kind)) + " wrapper needs a reward machine");
  switch (kind) {
    case WrapperKind::CrossProduct: return wrap_cross_product(config, *rm, params);
    case WrapperKind::GaitNaive: return wrap_naive(config, *rm, params);
    case WrapperKind::Gait3T: return wrap_stack3(config, *rm, params);
    case WrapperKind::GaitAugmented: return wrap_augmented(config, *rm, params);
    case WrapperKind::NoGait: break;
  }
  throw std::invalid_argument("unknown wrapper kind");
}

}  // namespace gaitrm
