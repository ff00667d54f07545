#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gaitrm/wrappers.hpp"

namespace gaitrm {

/// Linear decay from start to end over the first decay_fraction of training,
/// then constant.
struct EpsilonSchedule {
  double start = 1.0;
  double end = 0.05;
  double decay_fraction = 0.5;

  double at(std::int64_t step, std::int64_t total_steps) const;

  friend bool operator==(const EpsilonSchedule&, const EpsilonSchedule&) = default;
};

struct LearnerConfig {
  double alpha = 0.1;
  double gamma = 0.99;
  EpsilonSchedule epsilon;
  std::int64_t total_steps = 200'000;
  std::int64_t eval_every = 5'000;
  int eval_episodes = 10;
  std::uint64_t seed = 0;

  void validate() const;

  friend bool operator==(const LearnerConfig&, const LearnerConfig&) = default;
};

using ActionValues = std::array<double, Action::kCount>;

/// Sparse table of action values, zero for anything never written. Ordered
/// so that iteration (and serialisation) is deterministic.
class QTable {
 public:
  const ActionValues* find(std::uint64_t key) const;
  ActionValues& row(std::uint64_t key);
  bool contains(std::uint64_t key) const { return rows_.count(key) != 0; }

  double value(std::uint64_t key, unsigned action) const;
  double max_value(std::uint64_t key) const;
  /// Highest-valued action, lowest index on ties; action 0 for unseen keys.
  unsigned greedy_action(std::uint64_t key) const;

  std::size_t size() const { return rows_.size(); }
  const std::map<std::uint64_t, ActionValues>& rows() const { return rows_; }

  friend bool operator==(const QTable&, const QTable&) = default;

 private:
  std::map<std::uint64_t, ActionValues> rows_;
};

/// One-step Q-learning backup. `done` means a true terminal (no bootstrap);
/// time-limit truncation should pass false.
void q_update(QTable& q, std::uint64_t key, unsigned action, double reward, std::uint64_t next_key,
              bool done, const LearnerConfig& config);

/// Injective table key for a wrapper's observation:
///   cross_product  code + 16 * rm_state        (16 * |U| keys)
///   stack3         c0 + 16 * c1 + 256 * c2      (16^3 keys, oldest frame c0)
///   augmented      code + 16 * label            (16 * 16 keys)
///   naive/no_gait  code                         (16 keys)
/// Throws std::invalid_argument if the observation does not have the shape
/// of `kind`.
std::uint64_t discretize(const WrappedObservation& obs, WrapperKind kind);
std::uint64_t key_space_size(WrapperKind kind, std::size_t rm_states = 2);

class Policy {
 public:
  virtual ~Policy() = default;
  virtual Action act(const WrappedObservation& obs) const = 0;
  /// False when the policy has no learned entry for obs and falls back to
  /// its default action.
  virtual bool knows(const WrappedObservation&) const { return true; }
};

/// Greedy policy over a Q-table. Unseen keys act as an all-zero row, so the
/// fallback is action 0 (stand still) under lowest-index tie-breaking.
class GreedyPolicy final : public Policy {
 public:
  GreedyPolicy(QTable q, WrapperKind kind) : q_(std::move(q)), kind_(kind) {}

  Action act(const WrappedObservation& obs) const override;
  bool knows(const WrappedObservation& obs) const override;

  const QTable& table() const { return q_; }
  WrapperKind kind() const { return kind_; }

 private:
  QTable q_;
  WrapperKind kind_;
};

/// Hand-written policy keyed on the latest contact pattern only, so it runs
/// under any wrapper.
class ContactPatternPolicy final : public Policy {
 public:
  explicit ContactPatternPolicy(std::array<Action, LabelSet::kCount> table) : table_(table) {}
  Action act(const WrappedObservation& obs) const override;

 private:
  std::array<Action, LabelSet::kCount> table_;
};

/// Lifts pose A from rest, then alternates A and B every step.
ContactPatternPolicy perfect_gait_policy(Gait gait);
ContactPatternPolicy stand_still_policy();

struct EvalMetrics {
  double mean_return = 0.0;
  double mean_pose_transitions = 0.0;
  double mean_distance = 0.0;  // m, final base_x
  int episodes = 0;
  std::int64_t total_steps = 0;
  std::int64_t unseen_lookups = 0;
};

/// Greedy rollouts of `episodes` episodes. Pose transitions are counted by a
/// passive tracker running `tracker` on the labels, independent of whatever
/// the wrapper itself uses, so every wrapper is scored the same way.
EvalMetrics evaluate(const Policy& policy, WrappedEnv& env, const RewardMachine& tracker,
                     int episodes = 10, std::uint64_t seed = 0);

struct CurvePoint {
  std::int64_t step = 0;
  EvalMetrics metrics;
};

struct TrainResult {
  QTable q;
  std::vector<CurvePoint> curve;
};

/// Epsilon-greedy Q-learning for config.total_steps environment steps, with
/// a greedy evaluation every eval_every steps on a clone of env.
TrainResult train(WrappedEnv& env, const RewardMachine& tracker, const LearnerConfig& config);

/// Policy documents: JSON with the wrapper kind, optional gait and the table.
std::string save_policy(const QTable& q, WrapperKind kind, std::optional<Gait> gait,
                        std::string_view manifest = {});

struct LoadedPolicy {
  QTable q;
  WrapperKind kind;
  std::optional<Gait> gait;
};

/// Throws std::runtime_error on malformed documents.
LoadedPolicy load_policy(std::string_view document);

}  // namespace gaitrm
