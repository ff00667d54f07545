#include "gaitrm/learn.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "json.hpp"

namespace gaitrm {

double EpsilonSchedule::at(std::int64_t step, std::int64_t total_steps) const {
  const double horizon = decay_fraction * static_cast<double>(total_steps);
  if (horizon <= 0.0) return end;
  const double frac = static_cast<double>(step) / horizon;
  if (frac >= 1.0) return end;
  return start + (end - start) * frac;
}

void LearnerConfig::validate() const {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw std::invalid_argument("alpha must lie in (0, 1]");
  if (!(gamma >= 0.0 && gamma < 1.0)) throw std::invalid_argument("gamma must lie in [0, 1)");
  for (double e : {epsilon.start, epsilon.end}) {
    if (!(e >= 0.0 && e <= 1.0)) throw std::invalid_argument("epsilon must lie in [0, 1]");
  }
  if (!(epsilon.decay_fraction >= 0.0 && epsilon.decay_fraction <= 1.0)) {
    throw std::invalid_argument("epsilon decay fraction must lie in [0, 1]");
  }
  if (total_steps < 0) throw std::invalid_argument("total_steps must be non-negative");
  if (eval_every <= 0) throw std::invalid_argument("eval_every must be positive");
  if (eval_episodes <= 0) throw std::invalid_argument("eval_episodes must be positive");
}

// ---------------------------------------------------------------------------
// QTable

const ActionValues* QTable::find(std::uint64_t key) const {
  auto it = rows_.find(key);
  return it == rows_.end() ? nullptr : &it->second;
}

ActionValues& QTable::row(std::uint64_t key) {
  auto [it, inserted] = rows_.try_emplace(key);
  if (inserted) it->second.fill(0.0);
  return it->second;
}

double QTable::value(std::uint64_t key, unsigned action) const {
  const ActionValues* r = find(key);
  return r ? (*r)[action] : 0.0;
}

double QTable::max_value(std::uint64_t key) const {
  const ActionValues* r = find(key);
  return r ? *std::max_element(r->begin(), r->end()) : 0.0;
}

unsigned QTable::greedy_action(std::uint64_t key) const {
  const ActionValues* r = find(key);
  if (!r) return 0;
  // max_element returns the first maximum: lowest index wins ties.
  return static_cast<unsigned>(std::max_element(r->begin(), r->end()) - r->begin());
}

void q_update(QTable& q, std::uint64_t key, unsigned action, double reward, std::uint64_t next_key,
              bool done, const LearnerConfig& config) {
  const double bootstrap = done ? 0.0 : config.gamma * q.max_value(next_key);
  double& v = q.row(key)[action];
  v += config.alpha * (reward + bootstrap - v);
}

// ---------------------------------------------------------------------------
// Keys

std::uint64_t discretize(const WrappedObservation& obs, WrapperKind kind) {
  auto mismatch = [&] {
    return std::invalid_argument("observation of kind '" + std::string(to_string(obs.kind)) +
                                 "' cannot be keyed as '" + std::string(to_string(kind)) + "'");
  };
  if (obs.kind != kind || obs.frames.empty()) throw mismatch();
  const std::uint64_t code = obs.latest().code();
  switch (kind) {
    case WrapperKind::CrossProduct:
      if (!obs.rm_state) throw mismatch();
      return code + 16u * obs.rm_state->index;
    case WrapperKind::Gait3T:
      if (obs.frames.size() != 3) throw mismatch();
      return obs.frames[0].code() + 16u * obs.frames[1].code() + 256u * obs.frames[2].code();
    case WrapperKind::GaitAugmented:
      if (!obs.label_bits) throw mismatch();
      return code + 16u * obs.label_bits->code();
    case WrapperKind::GaitNaive:
    case WrapperKind::NoGait:
      return code;
  }
  throw std::invalid_argument("unknown wrapper kind");
}

std::uint64_t key_space_size(WrapperKind kind, std::size_t rm_states) {
  switch (kind) {
    case WrapperKind::CrossProduct: return 16u * rm_states;
    case WrapperKind::Gait3T: return 16u * 16u * 16u;
    case WrapperKind::GaitAugmented: return 16u * 16u;
    case WrapperKind::GaitNaive:
    case WrapperKind::NoGait: return 16u;
  }
  return 0;
}

// ---------------------------------------------------------------------------
// Policies

Action GreedyPolicy::act(const WrappedObservation& obs) const {
  return Action::from_code(q_.greedy_action(discretize(obs, kind_)));
}

bool GreedyPolicy::knows(const WrappedObservation& obs) const {
  return q_.contains(discretize(obs, kind_));
}

Action ContactPatternPolicy::act(const WrappedObservation& obs) const {
  return table_[obs.latest().code()];
}

ContactPatternPolicy perfect_gait_policy(Gait gait) {
  const GaitPoses poses = gait_poses(gait);
  std::array<Action, LabelSet::kCount> table;
  table.fill(Action{poses.pose_a});
  table[poses.pose_a.code()] = Action{poses.pose_b};
  return ContactPatternPolicy(table);
}

ContactPatternPolicy stand_still_policy() {
  std::array<Action, LabelSet::kCount> table;
  table.fill(Action{});
  return ContactPatternPolicy(table);
}

// ---------------------------------------------------------------------------
// Evaluation and training

EvalMetrics evaluate(const Policy& policy, WrappedEnv& env, const RewardMachine& tracker,
                     int episodes, std::uint64_t seed) {
  if (episodes <= 0) throw std::invalid_argument("evaluate needs at least one episode");
  const double clearance = env.env_config().clearance;
  double total_return = 0.0, total_transitions = 0.0, total_distance = 0.0;
  EvalMetrics m;
  for (int ep = 0; ep < episodes; ++ep) {
    WrappedObservation obs = env.reset(seed + static_cast<std::uint64_t>(ep));
    RmStateId u = tracker.initial();
    double ret = 0.0;
    int transitions = 0;
    for (;;) {
      if (!policy.knows(obs)) ++m.unseen_lookups;
      WrappedStep s = env.step(policy.act(obs));
      ++m.total_steps;
      ret += s.reward;
      const RmStateId next = rm_step(tracker, u, label(s.info, clearance)).next;
      if (next != u) ++transitions;
      u = next;
      obs = std::move(s.observation);
      if (s.done()) break;
    }
    total_return += ret;
    total_transitions += transitions;
    total_distance += env.base().state().base_x;
  }
  m.episodes = episodes;
  m.mean_return = total_return / episodes;
  m.mean_pose_transitions = total_transitions / episodes;
  m.mean_distance = total_distance / episodes;
  return m;
}

namespace {

// Bit-level conversions keep runs reproducible across standard libraries,
// whose distribution classes are implementation-defined.
double unit_interval(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

}  // namespace

TrainResult train(WrappedEnv& env, const RewardMachine& tracker, const LearnerConfig& config) {
  config.validate();
  TrainResult result;
  if (config.total_steps == 0) return result;

  std::mt19937_64 rng(config.seed);
  const WrapperKind kind = env.kind();
  auto eval_env = env.clone();
  std::uint64_t episode = 0;
  auto episode_seed = [&] { return config.seed * 1'000'003u + episode; };

  std::uint64_t key = discretize(env.reset(episode_seed()), kind);
  for (std::int64_t t = 0; t < config.total_steps; ++t) {
    const double eps = config.epsilon.at(t, config.total_steps);
    unsigned action;
    if (unit_interval(rng) < eps) {
      action = static_cast<unsigned>(rng() % Action::kCount);
    } else {
      action = result.q.greedy_action(key);
    }
    const WrappedStep s = env.step(Action::from_code(action));
    const std::uint64_t next_key = discretize(s.observation, kind);
    q_update(result.q, key, action, s.reward, next_key, s.terminated, config);
    key = next_key;
    if (s.done()) {
      ++episode;
      key = discretize(env.reset(episode_seed()), kind);
    }
    if ((t + 1) % config.eval_every == 0 || t + 1 == config.total_steps) {
      const GreedyPolicy policy(result.q, kind);
      result.curve.push_back(
          {t + 1, evaluate(policy, *eval_env, tracker, config.eval_episodes, config.seed)});
    }
  }
  return result;
}

// ---------------------------------------------------------------------------
// Policy documents

using Json = nlohmann::ordered_json;

std::string save_policy(const QTable& q, WrapperKind kind, std::optional<Gait> gait,
                        std::string_view manifest) {
  Json doc;
  doc["format"] = "gaitrm-qtable";
  doc["version"] = 1;
  if (!manifest.empty()) doc["manifest"] = std::string(manifest);
  doc["wrapper"] = std::string(to_string(kind));
  doc["gait"] = gait ? Json(std::string(to_string(*gait))) : Json(nullptr);
  doc["rows"] = Json::array();
  for (const auto& [key, values] : q.rows()) {
    Json row;
    row["key"] = key;
    row["values"] = values;
    doc["rows"].push_back(std::move(row));
  }
  return doc.dump(1) + "\n";
}

LoadedPolicy load_policy(std::string_view document) {
  try {
    const Json doc = Json::parse(document.begin(), document.end());
    if (doc.at("format") != "gaitrm-qtable" || doc.at("version") != 1) {
      throw std::runtime_error("not a gaitrm q-table document");
    }
    const auto kind = wrapper_kind_from_string(doc.at("wrapper").get<std::string>());
    if (!kind) throw std::runtime_error("unknown wrapper in policy document");
    std::optional<Gait> gait;
    if (!doc.at("gait").is_null()) {
      gait = gait_from_string(doc.at("gait").get<std::string>());
      if (!gait) throw std::runtime_error("unknown gait in policy document");
    }
    QTable q;
    for (const Json& row : doc.at("rows")) {
      const auto values = row.at("values").get<std::vector<double>>();
      if (values.size() != Action::kCount) throw std::runtime_error("policy row needs 16 values");
      std::copy(values.begin(), values.end(), q.row(row.at("key").get<std::uint64_t>()).begin());
    }
    return LoadedPolicy{std::move(q), *kind, gait};
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(std::string("malformed policy document: ") + e.what());
  }
}

}  // namespace gaitrm
