#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "gaitrm/learn.hpp"

namespace gaitrm {
namespace {

constexpr RmStateId q0{0}, q1{1};

TEST(QUpdate, FreshTableTerminalReward) {
  QTable q;
  LearnerConfig c;
  q_update(q, 3, 5, 1.0, 4, true, c);
  EXPECT_DOUBLE_EQ(q.value(3, 5), 0.1);
  EXPECT_EQ(q.value(3, 4), 0.0);
}

TEST(QUpdate, ZeroRewardLeavesZero) {
  QTable q;
  q_update(q, 0, 0, 0.0, 1, false, LearnerConfig{});
  EXPECT_EQ(q.value(0, 0), 0.0);
  EXPECT_TRUE(q.contains(0));
}

TEST(QUpdate, TruncationBootstrapsTerminationDoesNot) {
  LearnerConfig c;
  c.alpha = 1.0;
  QTable q;
  q.row(9)[2] = 10.0;
  q_update(q, 1, 0, 0.0, 9, false, c);
  EXPECT_DOUBLE_EQ(q.value(1, 0), c.gamma * 10.0);
  q_update(q, 1, 0, 0.0, 9, true, c);
  EXPECT_EQ(q.value(1, 0), 0.0);
}

// Chain 0 -> 1 -> 2 (terminal). Action 0 advances, every other action stays
// put; entering state 2 pays 1.
TEST(QUpdate, ChainMatchesValueIteration) {
  constexpr int kStates = 3;
  const double gamma = 0.9;
  auto next_of = [](int s, unsigned a) { return a == 0 ? s + 1 : s; };
  auto reward_of = [](int s, unsigned a) { return (a == 0 && s + 1 == 2) ? 1.0 : 0.0; };

  std::array<std::array<double, Action::kCount>, kStates> vi{};
  for (int sweep = 0; sweep < 2000; ++sweep) {
    auto next_vi = vi;
    for (int s = 0; s < 2; ++s) {
      for (unsigned a = 0; a < Action::kCount; ++a) {
        const int n = next_of(s, a);
        const double v = n == 2 ? 0.0 : *std::max_element(vi[n].begin(), vi[n].end());
        next_vi[s][a] = reward_of(s, a) + gamma * v;
      }
    }
    vi = next_vi;
  }
  EXPECT_NEAR(vi[0][0], gamma, 1e-12);

  LearnerConfig c;
  c.alpha = 0.5;
  c.gamma = gamma;
  QTable q;
  for (int sweep = 0; sweep < 2000; ++sweep) {
    for (int s = 0; s < 2; ++s) {
      for (unsigned a = 0; a < Action::kCount; ++a) {
        const int n = next_of(s, a);
        q_update(q, s, a, reward_of(s, a), n, n == 2, c);
      }
    }
  }
  for (int s = 0; s < 2; ++s) {
    for (unsigned a = 0; a < Action::kCount; ++a) EXPECT_NEAR(q.value(s, a), vi[s][a], 1e-6);
  }
}

TEST(QTable, GreedyTieBreakAndUnseenFallback) {
  QTable q;
  EXPECT_EQ(q.greedy_action(42), 0u);
  q.row(1)[3] = 2.0;
  q.row(1)[7] = 2.0;
  EXPECT_EQ(q.greedy_action(1), 3u);
  EXPECT_EQ(q.max_value(1), 2.0);
  EXPECT_EQ(q.max_value(2), 0.0);
}

TEST(Epsilon, LinearDecayThenConstant) {
  const EpsilonSchedule e;
  EXPECT_DOUBLE_EQ(e.at(0, 1000), 1.0);
  EXPECT_DOUBLE_EQ(e.at(250, 1000), 0.525);
  EXPECT_DOUBLE_EQ(e.at(500, 1000), 0.05);
  EXPECT_DOUBLE_EQ(e.at(999, 1000), 0.05);
}

TEST(LearnerConfig, Validation) {
  LearnerConfig c;
  EXPECT_NO_THROW(c.validate());
  c.alpha = 0.0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = {};
  c.eval_every = 0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
}

WrappedObservation with_state(WrapperKind kind, LabelSet pattern, std::optional<RmStateId> u) {
  WrappedObservation o;
  o.kind = kind;
  o.frames = {Observation{pattern, {}, 0.0}};
  o.rm_state = u;
  return o;
}

TEST(Discretize, KeysPerWrapper) {
  const LabelSet a{Prop::FL, Prop::BR};
  const auto k0 = discretize(with_state(WrapperKind::CrossProduct, a, q0), WrapperKind::CrossProduct);
  const auto k1 = discretize(with_state(WrapperKind::CrossProduct, a, q1), WrapperKind::CrossProduct);
  EXPECT_NE(k0, k1);
  EXPECT_EQ(k1, 9u + 16u);
  EXPECT_EQ(discretize(with_state(WrapperKind::GaitNaive, a, {}), WrapperKind::GaitNaive),
            discretize(with_state(WrapperKind::GaitNaive, a, {}), WrapperKind::GaitNaive));
  EXPECT_THROW(discretize(with_state(WrapperKind::GaitNaive, a, {}), WrapperKind::CrossProduct),
               std::invalid_argument);
  EXPECT_EQ(key_space_size(WrapperKind::CrossProduct, 2), 32u);
  EXPECT_EQ(key_space_size(WrapperKind::GaitAugmented), 256u);
}

TEST(Discretize, Stack3KeysStayInRange) {
  auto env = wrap_stack3({}, build_gait_rm(Gait::Trot), {});
  std::mt19937_64 rng(1);
  std::set<std::uint64_t> keys;
  for (int ep = 0; ep < 200; ++ep) {
    WrappedObservation o = env->reset(ep);
    for (;;) {
      keys.insert(discretize(o, WrapperKind::Gait3T));
      const WrappedStep s = env->step(Action::from_code(static_cast<unsigned>(rng() % 16)));
      o = s.observation;
      if (s.done()) break;
    }
  }
  EXPECT_LE(keys.size(), 4096u);
  EXPECT_LT(*keys.rbegin(), 4096u);
}

TEST(Evaluate, BuiltInPolicies) {
  const RewardMachine trot = build_gait_rm(Gait::Trot);
  auto env = wrap_cross_product({}, trot, {});

  const EvalMetrics still = evaluate(stand_still_policy(), *env, trot);
  EXPECT_EQ(still.episodes, 10);
  EXPECT_EQ(still.total_steps, 1000);
  EXPECT_EQ(still.mean_pose_transitions, 0.0);
  EXPECT_EQ(still.mean_distance, 0.0);

  auto nogait = wrap_nogait({}, {});
  EXPECT_EQ(evaluate(perfect_gait_policy(Gait::Pace), *nogait, trot).mean_pose_transitions, 0.0);

  // Each step of the perfect cycle is a milestone pose and a stride.
  const EvalMetrics perfect = evaluate(perfect_gait_policy(Gait::Trot), *env, trot);
  EXPECT_EQ(perfect.mean_pose_transitions, 100.0);
  EXPECT_NEAR(perfect.mean_distance, perfect.mean_pose_transitions * 0.05, 1e-9);
}

TEST(Evaluate, TrackerIgnoresWrapper) {
  const RewardMachine trot = build_gait_rm(Gait::Trot);
  const auto policy = perfect_gait_policy(Gait::Trot);
  std::optional<double> reference;
  for (WrapperKind k : kAllWrapperKinds) {
    auto env = make_wrapper(k, {}, &trot, {});
    const double t = evaluate(policy, *env, trot).mean_pose_transitions;
    if (!reference) reference = t;
    EXPECT_EQ(t, *reference) << to_string(k);
  }
}

TEST(Train, ZeroStepsGivesEmptyCurveAndStandStill) {
  const RewardMachine trot = build_gait_rm(Gait::Trot);
  auto env = wrap_cross_product({}, trot, {});
  LearnerConfig c;
  c.total_steps = 0;
  const TrainResult r = train(*env, trot, c);
  EXPECT_TRUE(r.curve.empty());
  EXPECT_EQ(r.q.size(), 0u);
  const GreedyPolicy p(r.q, WrapperKind::CrossProduct);
  EXPECT_EQ(p.act(env->reset(0)).code(), 0u);
  EXPECT_FALSE(p.knows(env->reset(0)));
}

TEST(Train, ReproducibleGivenSeed) {
  const RewardMachine trot = build_gait_rm(Gait::Trot);
  LearnerConfig c;
  c.total_steps = 20'000;
  c.seed = 4;
  auto a = wrap_naive({}, trot, {});
  auto b = wrap_naive({}, trot, {});
  const TrainResult ra = train(*a, trot, c);
  const TrainResult rb = train(*b, trot, c);
  EXPECT_EQ(ra.q, rb.q);
  ASSERT_EQ(ra.curve.size(), 4u);
  for (std::size_t i = 0; i < ra.curve.size(); ++i) {
    EXPECT_EQ(ra.curve[i].step, rb.curve[i].step);
    EXPECT_EQ(ra.curve[i].metrics.mean_return, rb.curve[i].metrics.mean_return);
  }
  c.seed = 5;
  auto d = wrap_naive({}, trot, {});
  EXPECT_NE(train(*d, trot, c).q, ra.q);
}

TEST(Train, CrossProductTrotNearPerfectInMostSeeds) {
  const RewardMachine trot = build_gait_rm(Gait::Trot);
  int good = 0;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    LearnerConfig c;
    c.seed = seed;
    auto env = wrap_cross_product({}, trot, {});
    const TrainResult r = train(*env, trot, c);
    ASSERT_EQ(r.curve.size(), 40u);
    if (std::abs(r.curve.back().metrics.mean_pose_transitions - 99.0) <= 9.9) ++good;
  }
  EXPECT_GE(good, 4);
}

TEST(Train, NoGaitLearnsForwardProgress) {
  const RewardMachine trot = build_gait_rm(Gait::Trot);
  LearnerConfig c;
  c.total_steps = 50'000;
  auto env = wrap_nogait({}, {});
  EXPECT_GT(train(*env, trot, c).curve.back().metrics.mean_distance, 0.0);
}

TEST(PolicyDocument, RoundTrip) {
  QTable q;
  q.row(5)[1] = 0.125;
  q.row(21)[15] = -3.5;
  const std::string doc = save_policy(q, WrapperKind::CrossProduct, Gait::Bound, "manifest.json");
  const LoadedPolicy back = load_policy(doc);
  EXPECT_EQ(back.q, q);
  EXPECT_EQ(back.kind, WrapperKind::CrossProduct);
  EXPECT_EQ(back.gait, Gait::Bound);
  EXPECT_EQ(save_policy(back.q, back.kind, back.gait, "manifest.json"), doc);
  EXPECT_FALSE(load_policy(save_policy(q, WrapperKind::NoGait, std::nullopt)).gait.has_value());
  EXPECT_THROW(load_policy("{}"), std::runtime_error);
  EXPECT_THROW(load_policy("[1, 2"), std::runtime_error);
}

}  // namespace
}  // namespace gaitrm
