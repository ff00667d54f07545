#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "gaitrm/reward_machine.hpp"
#include "gaitrm/rm_io.hpp"

namespace gaitrm {
namespace {

constexpr RmStateId q0{0}, q1{1};

bool is_bonus(const RewardSpec& r) { return std::holds_alternative<SwitchPoseBonus>(r); }

const Transition& edge(const RewardMachine& rm, RmStateId from, RmStateId to) {
  for (const Transition& t : rm.transitions()) {
    if (t.from == from && t.to == to) return t;
  }
  throw std::logic_error("no such edge");
}

TEST(BuildGaitRm, PoseGuardsSatisfyExactlyTheirPose) {
  EXPECT_EQ(satisfying_sets(edge(build_gait_rm(Gait::Trot), q0, q1).guard),
            (std::vector<LabelSet>{{Prop::FL, Prop::BR}}));
  EXPECT_EQ(satisfying_sets(edge(build_gait_rm(Gait::Pace), q0, q1).guard),
            (std::vector<LabelSet>{{Prop::FL, Prop::BL}}));
  EXPECT_EQ(satisfying_sets(edge(build_gait_rm(Gait::Bound), q1, q0).guard),
            (std::vector<LabelSet>{{Prop::BL, Prop::BR}}));
}

TEST(BuildGaitRm, GraphIsIsomorphicAcrossGaits) {
  const RewardMachine trot = build_gait_rm(Gait::Trot);
  for (Gait g : {Gait::Pace, Gait::Bound}) {
    const RewardMachine m = build_gait_rm(g);
    ASSERT_EQ(m.num_states(), 2u);
    ASSERT_EQ(m.transitions().size(), trot.transitions().size());
    for (std::size_t i = 0; i < m.transitions().size(); ++i) {
      EXPECT_EQ(m.transitions()[i].from, trot.transitions()[i].from);
      EXPECT_EQ(m.transitions()[i].to, trot.transitions()[i].to);
      EXPECT_EQ(m.transitions()[i].reward, trot.transitions()[i].reward);
    }
  }
}

TEST(BuildGaitRm, BonusFollowsParams) {
  RewardParams p;
  p.bonus_b = 250.0;
  EXPECT_EQ(edge(build_gait_rm(Gait::Trot, p), q0, q1).reward, RewardSpec{SwitchPoseBonus{250.0}});
}

TEST(Validate, BuiltInMachinesAreValid) {
  for (Gait g : {Gait::Trot, Gait::Pace, Gait::Bound}) {
    const ValidationReport r = validate(build_gait_rm(g));
    EXPECT_TRUE(r.valid()) << to_string(g);
    EXPECT_TRUE(r.gaps.empty());
    EXPECT_TRUE(r.ambiguities.empty());
  }
}

TEST(Validate, MissingSelfLoopLeavesFifteenGaps) {
  const RewardMachine trot = build_gait_rm(Gait::Trot);
  std::vector<Transition> ts;
  for (const Transition& t : trot.transitions()) {
    if (!(t.from == q0 && t.to == q0)) ts.push_back(t);
  }
  const RewardMachine m({"q0", "q1"}, q0, {}, ts);
  const ValidationReport r = validate(m);
  EXPECT_FALSE(r.total());
  EXPECT_EQ(r.gaps.size(), 15u);
  for (const auto& gap : r.gaps) {
    EXPECT_EQ(gap.state, q0);
    EXPECT_NE(gap.label, (LabelSet{Prop::FL, Prop::BR}));
  }
}

TEST(Validate, DuplicatedPoseEdgeIsAmbiguous) {
  const RewardMachine trot = build_gait_rm(Gait::Trot);
  std::vector<Transition> ts(trot.transitions().begin(), trot.transitions().end());
  ts.push_back(edge(trot, q0, q1));
  const RewardMachine m({"q0", "q1"}, q0, {}, ts);
  const ValidationReport r = validate(m);
  EXPECT_TRUE(r.total());
  ASSERT_EQ(r.ambiguities.size(), 1u);
  EXPECT_EQ(r.ambiguities[0].state, q0);
  EXPECT_EQ(r.ambiguities[0].label, (LabelSet{Prop::FL, Prop::BR}));
  EXPECT_NE(format_report(m, r).find("{FL, BR}"), std::string::npos);
  EXPECT_THROW(rm_step(m, q0, {Prop::FL, Prop::BR}), RmStepError);
}

TEST(Validate, UnreachableStateIsReported) {
  const Guard top = parse_guard("FL | !FL");
  const RewardMachine m({"a", "b"}, q0, {},
                        {{q0, top, q0, WalkReward{}}, {q1, top, q0, WalkReward{}}});
  const ValidationReport r = validate(m);
  EXPECT_TRUE(r.total());
  EXPECT_TRUE(r.deterministic());
  ASSERT_EQ(r.unreachable.size(), 1u);
  EXPECT_EQ(r.unreachable[0], q1);
  EXPECT_FALSE(r.valid());
}

TEST(RewardMachine, RejectsBadConstruction) {
  const Guard top = parse_guard("FL | !FL");
  EXPECT_THROW(RewardMachine({}, q0, {}, {}), std::invalid_argument);
  EXPECT_THROW(RewardMachine({"a", "a"}, q0, {}, {}), std::invalid_argument);
  EXPECT_THROW(RewardMachine({"a"}, q1, {}, {}), std::invalid_argument);
  EXPECT_THROW(RewardMachine({"a"}, q0, {}, {{q0, top, q1, WalkReward{}}}), std::invalid_argument);
}

TEST(RmStep, TrotExamples) {
  const RewardMachine trot = build_gait_rm(Gait::Trot);
  RmStep s = rm_step(trot, q0, {Prop::FL, Prop::BR});
  EXPECT_EQ(s.next, q1);
  EXPECT_EQ(s.reward, RewardSpec{SwitchPoseBonus{10000.0}});
  s = rm_step(trot, q0, {});
  EXPECT_EQ(s.next, q0);
  EXPECT_EQ(s.reward, RewardSpec{WalkReward{}});
  s = rm_step(trot, q1, {Prop::FL, Prop::BR});
  EXPECT_EQ(s.next, q1);
  EXPECT_FALSE(is_bonus(s.reward));
}

TEST(RmStep, FullCycleReturnsToInitialState) {
  for (Gait g : {Gait::Trot, Gait::Pace, Gait::Bound}) {
    const RewardMachine rm = build_gait_rm(g);
    const GaitPoses poses = gait_poses(g);
    const RmStep a = rm_step(rm, rm.initial(), poses.pose_a);
    const RmStep b = rm_step(rm, a.next, poses.pose_b);
    EXPECT_EQ(a.next, q1);
    EXPECT_EQ(b.next, rm.initial());
    EXPECT_TRUE(is_bonus(a.reward));
    EXPECT_TRUE(is_bonus(b.reward));
  }
}

TEST(ComputeReward, Examples) {
  const RewardParams p;
  StepInfo info;
  info.torques = {0.0, 0.0};
  info.joint_velocities = {1.0, 2.0};
  EXPECT_EQ(compute_reward(WalkReward{}, info, p), 0.0);
  EXPECT_EQ(compute_reward(SwitchPoseBonus{10000.0}, info, p), 0.0);

  info.delta_x = 0.1;
  info.torques = {4.0, 2.0};
  info.joint_velocities = {3.0, 4.0};  // inner product 20
  EXPECT_NEAR(compute_reward(WalkReward{}, info, p), 0.08, 1e-15);

  StepInfo scalar;
  scalar.delta_x = 0.05;
  scalar.power = 10.0;
  EXPECT_NEAR(compute_reward(WalkReward{}, scalar, p), 0.04, 1e-15);
  EXPECT_NEAR(compute_reward(SwitchPoseBonus{10000.0}, scalar, p), 499.583749578799, 1e-9);
}

TEST(ComputeReward, EnergyReductions) {
  StepInfo info;
  info.torques = {1.0, -2.0, 3.0};
  info.joint_velocities = {1.0, 1.0, 1.0};  // products 1, -2, 3
  RewardParams p;
  p.energy_weight = 1.0;
  EXPECT_DOUBLE_EQ(energy_penalty(info, p), 2.0);
  p.energy_reduction = EnergyReduction::SumAbs;
  EXPECT_DOUBLE_EQ(energy_penalty(info, p), 6.0);
  p.energy_reduction = EnergyReduction::ElementwiseNorm;
  EXPECT_DOUBLE_EQ(energy_penalty(info, p), std::sqrt(14.0));
  for (auto r : {EnergyReduction::AbsInnerProduct, EnergyReduction::SumAbs, EnergyReduction::ElementwiseNorm}) {
    EXPECT_EQ(energy_reduction_from_string(to_string(r)), r);
  }
}

TEST(ComputeReward, BonusIsBoundedSignedAndMonotone) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> dx(-5.0, 5.0);
  const RewardParams p;
  const SwitchPoseBonus bonus{10000.0};
  for (int i = 0; i < 1000; ++i) {
    StepInfo a, b;
    a.delta_x = dx(rng);
    b.delta_x = dx(rng);
    if (a.delta_x > b.delta_x) std::swap(a, b);
    const double ra = compute_reward(bonus, a, p), rb = compute_reward(bonus, b, p);
    EXPECT_LT(std::abs(ra), bonus.b);
    EXPECT_EQ(std::signbit(ra), std::signbit(a.delta_x));
    EXPECT_LE(ra, rb);
  }
}

TEST(ComputeReward, BonusStaysBelowBWhereTanhSaturates) {
  const RewardParams p;
  for (double dx : {19.0, 20.0, 40.0, 1e300}) {
    StepInfo info;
    info.delta_x = dx;
    EXPECT_LT(compute_reward(SwitchPoseBonus{10000.0}, info, p), 10000.0);
    info.delta_x = -dx;
    EXPECT_GT(compute_reward(SwitchPoseBonus{10000.0}, info, p), -10000.0);
  }
}

TEST(ComputeReward, WalkDecreasesWithEnergy) {
  const RewardParams p;
  StepInfo info;
  info.delta_x = 0.05;
  double previous = compute_reward(WalkReward{}, info, p);
  for (double power : {1.0, 2.0, 10.0, 100.0}) {
    info.power = power;
    const double r = compute_reward(WalkReward{}, info, p);
    EXPECT_LT(r, previous);
    previous = r;
  }
}

TEST(RewardParams, Validation) {
  RewardParams p;
  EXPECT_NO_THROW(p.validate());
  p.gamma = 1.0;
  EXPECT_THROW(p.validate(), std::invalid_argument);
  p = {};
  p.energy_weight = -1.0;
  EXPECT_THROW(p.validate(), std::invalid_argument);
}

TEST(Equivalence, RenamingAndGuardRewriting) {
  const RewardMachine trot = build_gait_rm(Gait::Trot);
  std::vector<Transition> ts(trot.transitions().begin(), trot.transitions().end());
  ts[0].guard = parse_guard("!FL | FR | BL | !BR");  // De Morgan form of the self-loop guard
  const RewardMachine renamed({"rest", "lifted"}, q0, {}, ts);
  EXPECT_TRUE(equivalent_up_to_renaming(trot, renamed));
  EXPECT_FALSE(equivalent_up_to_renaming(trot, build_gait_rm(Gait::Pace)));
}

// ---------------------------------------------------------------------------
// Documents

TEST(RmIo, RoundTripPreservesMachine) {
  for (Gait g : {Gait::Trot, Gait::Pace, Gait::Bound}) {
    const RewardMachine rm = build_gait_rm(g);
    const LoadedRm back = load_rm(save_rm(rm));
    EXPECT_TRUE(equivalent_up_to_renaming(rm, back.machine));
    EXPECT_EQ(back.machine.state_names(), rm.state_names());
    EXPECT_EQ(back.params, RewardParams{});
    EXPECT_TRUE(back.report.valid());
    for (std::size_t i = 0; i < rm.transitions().size(); ++i) {
      EXPECT_EQ(back.machine.transitions()[i].guard.truth_table(), rm.transitions()[i].guard.truth_table());
      EXPECT_EQ(back.machine.transitions()[i].reward, rm.transitions()[i].reward);
    }
  }
}

TEST(RmIo, NonDefaultParamsSurvive) {
  RewardParams p;
  p.energy_weight = 0.25;
  p.energy_reduction = EnergyReduction::SumAbs;
  const std::string doc = save_rm(build_gait_rm(Gait::Bound, p), p);
  EXPECT_NE(doc.find("sum_abs"), std::string::npos);
  EXPECT_EQ(load_rm(doc).params, p);
}

std::string trot_document() { return save_rm(build_gait_rm(Gait::Trot)); }

void expect_format_error(const std::string& doc, const std::string& location) {
  try {
    load_rm(doc);
    FAIL() << "expected RmFormatError at " << location;
  } catch (const RmFormatError& e) {
    EXPECT_EQ(e.location(), location) << e.what();
  }
}

void replace_once(std::string& s, const std::string& from, const std::string& to) {
  const auto pos = s.find(from);
  ASSERT_NE(pos, std::string::npos) << from;
  s.replace(pos, from.size(), to);
}

TEST(RmIo, MissingInitialIsSchemaError) {
  std::string doc = trot_document();
  replace_once(doc, "\"initial\": \"q0\",", "");
  try {
    load_rm(doc);
    FAIL();
  } catch (const RmFormatError& e) {
    EXPECT_EQ(e.location(), "/");
    EXPECT_NE(std::string(e.what()).find("initial"), std::string::npos);
  }
}

TEST(RmIo, SchemaErrorsCarryLocation) {
  std::string doc = trot_document();
  replace_once(doc, "\"guard\": \"FL & !FR & !BL & BR\"", "\"guard\": \"FL & & BR\"");
  expect_format_error(doc, "/transitions/1/guard");

  doc = trot_document();
  replace_once(doc, "\"version\": 1", "\"version\": 1, \"extra\": true");
  expect_format_error(doc, "/extra");

  doc = trot_document();
  replace_once(doc, "\"to\": \"q1\"", "\"to\": \"q7\"");
  expect_format_error(doc, "/transitions/1/to");

  doc = trot_document();
  replace_once(doc, "\"type\": \"walk\"", "\"type\": \"sprint\"");
  expect_format_error(doc, "/transitions/0/reward/type");

  EXPECT_THROW(load_rm("{ not json"), RmFormatError);
}

TEST(RmIo, InvalidMachineLoadsWithReport) {
  std::string doc = trot_document();
  // Drop the q0 self-loop: the document still parses but has 15 gaps.
  const auto start = doc.find("    {\n      \"from\": \"q0\",\n      \"to\": \"q0\"");
  const auto end = doc.find("    {", start + 1);
  doc.erase(start, end - start);
  const LoadedRm loaded = load_rm(doc);
  EXPECT_FALSE(loaded.report.valid());
  EXPECT_EQ(loaded.report.gaps.size(), 15u);
  EXPECT_THROW(save_rm(loaded.machine), std::invalid_argument);
}

TEST(RmIo, MissingFileNamesPath) {
  try {
    load_rm_file("/nonexistent/dir/machine.json");
    FAIL();
  } catch (const std::runtime_error& e) {
    EXPECT_NE(std::string(e.what()).find("/nonexistent/dir/machine.json"), std::string::npos);
  }
}

}  // namespace
}  // namespace gaitrm
