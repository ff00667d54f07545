#include "cli.hpp"

#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <memory>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "gaitrm/rm_io.hpp"
#include "gaitrm/trajectory.hpp"
#include "json.hpp"

namespace gaitrm::cli {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

namespace {

/// Flag combinations or inputs that parse but make no sense together.
class SemanticError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

// ---------------------------------------------------------------------------
// Config documents

template <typename T>
void read_field(const Json& obj, const char* key, T& target, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) return;
  try {
    target = it->get<T>();
  } catch (const nlohmann::json::exception&) {
    throw std::runtime_error(where + "/" + key + ": wrong type");
  }
}

void reject_unknown(const Json& obj, const std::string& where,
                    std::initializer_list<std::string_view> allowed) {
  if (!obj.is_object()) throw std::runtime_error(where + ": expected an object");
  for (const auto& [key, value] : obj.items()) {
    bool ok = false;
    for (auto a : allowed) ok = ok || key == a;
    if (!ok) throw std::runtime_error(where + ": unknown field '" + key + "'");
  }
}

Json env_to_json(const ToyEnvConfig& c) {
  Json j;
  j["clearance"] = c.clearance;
  j["lift_height"] = c.lift_height;
  j["stride_gain"] = c.stride_gain;
  j["lift_power_cost"] = c.lift_power_cost;
  j["episode_length"] = c.episode_length;
  j["stumble_terminates"] = c.stumble_terminates;
  j["lateral_support_balanced"] = c.lateral_support_balanced;
  j["rng_seed"] = c.rng_seed;
  return j;
}

Json learner_to_json(const LearnerConfig& c) {
  Json j;
  j["alpha"] = c.alpha;
  j["gamma"] = c.gamma;
  j["epsilon_start"] = c.epsilon.start;
  j["epsilon_end"] = c.epsilon.end;
  j["epsilon_decay_fraction"] = c.epsilon.decay_fraction;
  j["total_steps"] = c.total_steps;
  j["eval_every"] = c.eval_every;
  j["eval_episodes"] = c.eval_episodes;
  return j;
}

Json reward_to_json(const RewardParams& p) {
  Json j;
  j["w_e"] = p.energy_weight;
  j["gamma"] = p.gamma;
  j["bonus_b"] = p.bonus_b;
  j["energy_reduction"] = std::string(to_string(p.energy_reduction));
  return j;
}

// ---------------------------------------------------------------------------
// Shared option handling

Gait parse_gait(const std::string& name) {
  auto g = gait_from_string(name);
  if (!g) throw SemanticError("unknown gait '" + name + "' (expected trot, pace or bound)");
  return *g;
}

WrapperKind parse_wrapper(const std::string& name) {
  auto k = wrapper_kind_from_string(name);
  if (!k) {
    throw SemanticError("unknown wrapper '" + name +
                        "' (expected cross_product, no_gait, naive, stack3 or augmented)");
  }
  return *k;
}

struct CommonOptions {
  std::string config_path;
  std::string gait;
  std::string wrapper;

  RunConfig run_config() const { return config_path.empty() ? RunConfig{} : load_run_config(config_path); }
  std::optional<Gait> gait_opt() const {
    return gait.empty() ? std::nullopt : std::optional<Gait>(parse_gait(gait));
  }
  std::optional<WrapperKind> wrapper_opt() const {
    return wrapper.empty() ? std::nullopt : std::optional<WrapperKind>(parse_wrapper(wrapper));
  }
};

void add_common(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("--config", o.config_path, "JSON document with env/learner/reward settings");
  cmd->add_option("--gait", o.gait, "trot | pace | bound");
  cmd->add_option("--wrapper", o.wrapper, "cross_product | no_gait | naive | stack3 | augmented");
}

/// A learned Q-table or one of the hand-written contact-pattern policies.
struct ResolvedPolicy {
  std::unique_ptr<Policy> policy;
  WrapperKind kind;
  std::optional<Gait> gait;
};

ResolvedPolicy resolve_policy(const std::string& spec, const CommonOptions& o) {
  const std::string prefix = "builtin:";
  if (spec.rfind(prefix, 0) == 0) {
    const std::string name = spec.substr(prefix.size());
    ResolvedPolicy r;
    r.gait = o.gait_opt();
    if (name == "stand") {
      r.policy = std::make_unique<ContactPatternPolicy>(stand_still_policy());
    } else {
      r.policy = std::make_unique<ContactPatternPolicy>(perfect_gait_policy(parse_gait(name)));
      if (!r.gait) r.gait = parse_gait(name);
    }
    r.kind = o.wrapper_opt().value_or(r.gait ? WrapperKind::CrossProduct : WrapperKind::NoGait);
    return r;
  }
  LoadedPolicy loaded = load_policy(read_file(spec));
  if (auto w = o.wrapper_opt(); w && *w != loaded.kind) {
    throw SemanticError("policy " + spec + " was trained on the '" +
                        std::string(to_string(loaded.kind)) + "' key space and cannot drive the '" +
                        std::string(to_string(*w)) + "' wrapper");
  }
  ResolvedPolicy r;
  r.kind = loaded.kind;
  r.gait = o.gait_opt() ? o.gait_opt() : loaded.gait;
  r.policy = std::make_unique<GreedyPolicy>(std::move(loaded.q), loaded.kind);
  return r;
}

void require_gait_for(WrapperKind kind, const std::optional<Gait>& gait) {
  if (uses_reward_machine(kind) && !gait) {
    throw SemanticError("--wrapper " + std::string(to_string(kind)) + " requires --gait");
  }
}

// ---------------------------------------------------------------------------
// validate / rm

int cmd_validate(const std::string& path, std::ostream& out) {
  if (!fs::exists(path)) throw std::runtime_error("no such file: " + path);
  const LoadedRm loaded = load_rm_file(path);
  out << path << "\n" << format_report(loaded.machine, loaded.report);
  return loaded.report.valid() ? kExitOk : kExitSemantic;
}

int cmd_rm(const CommonOptions& o, const std::string& out_path, std::ostream& out) {
  const auto gait = o.gait_opt();
  if (!gait) throw SemanticError("rm requires --gait");
  const RunConfig cfg = o.run_config();
  const std::string text = save_rm(build_gait_rm(*gait, cfg.reward), cfg.reward);
  if (out_path.empty()) {
    out << text;
  } else {
    write_file(out_path, text);
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// train

struct TrainOptions {
  CommonOptions common;
  std::string out_dir;
  int seeds = 5;
  std::uint64_t base_seed = 0;
  std::int64_t steps = -1;
  std::int64_t eval_every = -1;
  int jobs = 1;
};

std::string curve_csv(const std::vector<CurvePoint>& curve, const std::string& manifest, std::uint64_t seed) {
  std::ostringstream os;
  os << "# manifest: " << manifest << ", seed: " << seed << "\n";
  os << "step,mean_return,mean_pose_transitions,mean_distance,unseen_lookups\n";
  for (const CurvePoint& p : curve) {
    os << p.step << ',' << format_number(p.metrics.mean_return) << ','
       << format_number(p.metrics.mean_pose_transitions) << ','
       << format_number(p.metrics.mean_distance) << ',' << p.metrics.unseen_lookups << "\n";
  }
  return os.str();
}

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;
};

// Sample standard deviation; zero for a single value.
MeanStd mean_std(const std::vector<double>& v) {
  MeanStd r;
  if (v.empty()) return r;
  for (double x : v) r.mean += x;
  r.mean /= static_cast<double>(v.size());
  if (v.size() > 1) {
    double ss = 0.0;
    for (double x : v) ss += (x - r.mean) * (x - r.mean);
    r.std = std::sqrt(ss / static_cast<double>(v.size() - 1));
  }
  return r;
}

std::string aggregate_csv(const std::vector<TrainResult>& results, const std::string& manifest) {
  std::ostringstream os;
  os << "# manifest: " << manifest << ", aggregate over " << results.size() << " seeds\n";
  os << "step,mean_return_mean,mean_return_std,mean_pose_transitions_mean,"
        "mean_pose_transitions_std,mean_distance_mean,mean_distance_std,seeds\n";
  const std::size_t n = results.empty() ? 0 : results.front().curve.size();
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> ret, tr, dist;
    for (const TrainResult& r : results) {
      ret.push_back(r.curve[i].metrics.mean_return);
      tr.push_back(r.curve[i].metrics.mean_pose_transitions);
      dist.push_back(r.curve[i].metrics.mean_distance);
    }
    const MeanStd a = mean_std(ret), b = mean_std(tr), c = mean_std(dist);
    os << results.front().curve[i].step << ',' << format_number(a.mean) << ','
       << format_number(a.std) << ',' << format_number(b.mean) << ',' << format_number(b.std)
       << ',' << format_number(c.mean) << ',' << format_number(c.std) << ',' << results.size()
       << "\n";
  }
  return os.str();
}

int cmd_train(const TrainOptions& o, std::ostream& out) {
  const auto wrapper = o.common.wrapper_opt();
  if (!wrapper) throw SemanticError("train requires --wrapper");
  const auto gait = o.common.gait_opt();
  require_gait_for(*wrapper, gait);
  if (o.seeds <= 0) throw SemanticError("--seeds must be positive");
  if (o.jobs <= 0) throw SemanticError("--jobs must be positive");

  RunConfig cfg = o.common.run_config();
  if (o.steps >= 0) cfg.learner.total_steps = o.steps;
  if (o.eval_every > 0) cfg.learner.eval_every = o.eval_every;
  cfg.learner.validate();
  cfg.env.validate();
  cfg.reward.validate();

  const Gait tracker_gait = gait.value_or(Gait::Trot);
  const RewardMachine tracker = build_gait_rm(tracker_gait, cfg.reward);
  const std::string run_id =
      std::string(gait ? to_string(*gait) : "none") + "_" + std::string(to_string(*wrapper));
  const fs::path dir = fs::path(o.out_dir) / run_id;
  fs::create_directories(dir);

  std::vector<std::uint64_t> seeds;
  for (int i = 0; i < o.seeds; ++i) seeds.push_back(o.base_seed + static_cast<std::uint64_t>(i));

  const std::string manifest_name = "manifest.json";
  Json manifest;
  manifest["toolkit"] = "gaitrm";
  manifest["toolkit_version"] = kToolkitVersion;
  manifest["run_id"] = run_id;
  manifest["gait"] = gait ? Json(std::string(to_string(*gait))) : Json(nullptr);
  manifest["tracker_gait"] = std::string(to_string(tracker_gait));
  manifest["wrapper"] = std::string(to_string(*wrapper));
  manifest["seeds"] = seeds;
  manifest["learner"] = learner_to_json(cfg.learner);
  manifest["env"] = env_to_json(cfg.env);
  manifest["reward"] = reward_to_json(cfg.reward);
  manifest["output_dir"] = o.out_dir;
  manifest["unseen_state_fallback"] = "all-zero row, greedy tie-break to action 0 (stand still)";
  Json outputs;
  outputs["curves"] = Json::array();
  outputs["policies"] = Json::array();
  for (auto s : seeds) {
    outputs["curves"].push_back("curve_seed" + std::to_string(s) + ".csv");
    outputs["policies"].push_back("policy_seed" + std::to_string(s) + ".json");
  }
  outputs["aggregate"] = "curve_aggregate.csv";
  manifest["outputs"] = outputs;
  write_file(dir / manifest_name, manifest.dump(2) + "\n");

  const RewardMachine* rm_ptr = uses_reward_machine(*wrapper) ? &tracker : nullptr;
  std::vector<TrainResult> results(seeds.size());
  std::vector<std::exception_ptr> errors(seeds.size());
  auto run_seed = [&](std::size_t i) {
    try {
      LearnerConfig lc = cfg.learner;
      lc.seed = seeds[i];
      auto env = make_wrapper(*wrapper, cfg.env, rm_ptr, cfg.reward);
      results[i] = train(*env, tracker, lc);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  };
  for (std::size_t start = 0; start < seeds.size(); start += static_cast<std::size_t>(o.jobs)) {
    std::vector<std::thread> pool;
    const std::size_t stop = std::min(seeds.size(), start + static_cast<std::size_t>(o.jobs));
    for (std::size_t i = start; i < stop; ++i) pool.emplace_back(run_seed, i);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  for (std::size_t i = 0; i < seeds.size(); ++i) {
    const std::string s = std::to_string(seeds[i]);
    write_file(dir / ("curve_seed" + s + ".csv"), curve_csv(results[i].curve, manifest_name, seeds[i]));
    write_file(dir / ("policy_seed" + s + ".json"),
               save_policy(results[i].q, *wrapper, gait, manifest_name));
  }
  write_file(dir / "curve_aggregate.csv", aggregate_csv(results, manifest_name));

  out << "run " << run_id << " -> " << dir.string() << "\n";
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    if (results[i].curve.empty()) {
      out << "  seed " << seeds[i] << ": no evaluations (zero steps)\n";
      continue;
    }
    const EvalMetrics& m = results[i].curve.back().metrics;
    out << "  seed " << seeds[i] << ": pose transitions " << format_number(m.mean_pose_transitions)
        << ", distance " << format_number(m.mean_distance) << " m, return "
        << format_number(m.mean_return) << "\n";
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// eval / diagram

struct RolloutOptions {
  CommonOptions common;
  std::string policy;
  std::string out_path;
  std::string trajectory;
  int episodes = 10;
  int steps = 100;
  std::uint64_t seed = 0;
};

int cmd_eval(const RolloutOptions& o, std::ostream& out) {
  const ResolvedPolicy p = resolve_policy(o.policy, o.common);
  require_gait_for(p.kind, p.gait);
  const RunConfig cfg = o.common.run_config();
  const Gait tracker_gait = p.gait.value_or(Gait::Trot);
  const RewardMachine tracker = build_gait_rm(tracker_gait, cfg.reward);
  auto env = make_wrapper(p.kind, cfg.env, &tracker, cfg.reward);

  if (!o.trajectory.empty()) {
    // One logged episode, with the passive tracker's state per step.
    TrajectoryLog log;
    WrappedObservation obs = env->reset(o.seed);
    RmStateId u = tracker.initial();
    for (std::int64_t t = 1;; ++t) {
      const Action a = p.policy->act(obs);
      WrappedStep s = env->step(a);
      u = rm_step(tracker, u, s.label).next;
      log.add({t, a, s.info.foot_heights, s.label, s.info.delta_x, s.info.power.value_or(0.0),
               s.reward, tracker.name(u), s.terminated, s.truncated});
      obs = std::move(s.observation);
      if (s.done()) break;
    }
    std::ofstream f(o.trajectory, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + o.trajectory + " for writing");
    log.write_csv(f);
  }

  const EvalMetrics m = evaluate(*p.policy, *env, tracker, o.episodes, o.seed);
  out << "wrapper: " << to_string(p.kind) << "\n"
      << "tracker_gait: " << to_string(tracker_gait) << "\n"
      << "episodes: " << m.episodes << "\n"
      << "steps: " << m.total_steps << "\n"
      << "mean_return: " << format_number(m.mean_return) << "\n"
      << "mean_pose_transitions: " << format_number(m.mean_pose_transitions) << "\n"
      << "mean_distance: " << format_number(m.mean_distance) << "\n"
      << "unseen_lookups: " << m.unseen_lookups << "\n";
  return kExitOk;
}

int cmd_diagram(const RolloutOptions& o, std::ostream& out) {
  const ResolvedPolicy p = resolve_policy(o.policy, o.common);
  if (!p.gait) throw SemanticError("diagram requires --gait (or a policy trained with one)");
  if (o.steps <= 0) throw SemanticError("--steps must be positive");
  RunConfig cfg = o.common.run_config();
  cfg.env.episode_length = o.steps;
  const RewardMachine tracker = build_gait_rm(*p.gait, cfg.reward);
  auto env = make_wrapper(p.kind, cfg.env, &tracker, cfg.reward);

  std::ostringstream csv;
  csv << "step,FL,FR,BL,BR,rm_state,transition,terminated\n";
  WrappedObservation obs = env->reset(o.seed);
  RmStateId u = tracker.initial();
  int rows = 0;
  bool early = false;
  for (int t = 1; t <= o.steps; ++t) {
    WrappedStep s = env->step(p.policy->act(obs));
    const RmStateId next = rm_step(tracker, u, s.label).next;
    csv << t;
    // Contact bits: 1 = foot on the ground.
    for (Prop f : kAllProps) csv << ',' << (s.label.contains(f) ? 0 : 1);
    csv << ',' << tracker.name(next) << ',' << (next != u ? 1 : 0) << ',' << (s.terminated ? 1 : 0)
        << "\n";
    u = next;
    ++rows;
    obs = std::move(s.observation);
    if (s.terminated) {
      early = true;
      break;
    }
  }
  write_file(o.out_path, csv.str());
  out << "wrote " << rows << " rows to " << o.out_path;
  if (early) out << " (episode terminated early)";
  out << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------
// compare

struct FinalRow {
  double transitions;
  double distance;
};

std::optional<FinalRow> final_curve_row(const fs::path& path) {
  std::ifstream in(path);
  if (!in) return std::nullopt;
  std::string line, last;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      header_seen = true;
      continue;
    }
    last = line;
  }
  if (last.empty()) return std::nullopt;
  std::vector<std::string> cells;
  std::stringstream ss(last);
  for (std::string cell; std::getline(ss, cell, ',');) cells.push_back(cell);
  if (cells.size() < 4) throw std::runtime_error("malformed curve file " + path.string());
  return FinalRow{std::stod(cells[2]), std::stod(cells[3])};
}

int cmd_compare(const std::string& dir, std::ostream& out) {
  if (!fs::is_directory(dir)) throw std::runtime_error("no such directory: " + dir);
  std::vector<fs::path> manifests;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_directory() && fs::exists(entry.path() / "manifest.json")) {
      manifests.push_back(entry.path() / "manifest.json");
    }
  }
  if (manifests.empty()) throw SemanticError("no training manifests found under " + dir);
  std::sort(manifests.begin(), manifests.end());

  std::ostringstream csv;
  csv << "gait,wrapper,seeds_expected,seeds_found,pose_transitions_mean,pose_transitions_std,"
         "distance_mean,distance_std,status\n";
  out << std::left << std::setw(8) << "gait" << std::setw(15) << "wrapper" << std::setw(8)
      << "seeds" << std::setw(24) << "pose transitions" << std::setw(22) << "distance (m)"
      << "status\n";
  for (const fs::path& mpath : manifests) {
    Json m;
    try {
      m = Json::parse(read_file(mpath));
    } catch (const nlohmann::json::exception& e) {
      throw std::runtime_error("malformed manifest " + mpath.string() + ": " + e.what());
    }
    const std::string gait = m.at("gait").is_null() ? "none" : m.at("gait").get<std::string>();
    const std::string wrapper = m.at("wrapper").get<std::string>();
    const auto& curves = m.at("outputs").at("curves");
    std::vector<double> tr, dist;
    for (const auto& c : curves) {
      if (auto row = final_curve_row(mpath.parent_path() / c.get<std::string>())) {
        tr.push_back(row->transitions);
        dist.push_back(row->distance);
      }
    }
    const bool complete = tr.size() == curves.size();
    const MeanStd a = mean_std(tr), b = mean_std(dist);
    const std::string status = complete ? "complete" : "incomplete";
    csv << gait << ',' << wrapper << ',' << curves.size() << ',' << tr.size() << ','
        << format_number(a.mean) << ',' << format_number(a.std) << ',' << format_number(b.mean)
        << ',' << format_number(b.std) << ',' << status << "\n";
    std::ostringstream t, d, s;
    t << std::fixed << std::setprecision(2) << a.mean << " +/- " << a.std;
    d << std::fixed << std::setprecision(3) << b.mean << " +/- " << b.std;
    s << tr.size() << "/" << curves.size();
    out << std::setw(8) << gait << std::setw(15) << wrapper << std::setw(8) << s.str()
        << std::setw(24) << t.str() << std::setw(22) << d.str() << status << "\n";
  }
  write_file(fs::path(dir) / "comparison.csv", csv.str());
  return kExitOk;
}

}  // namespace

// ---------------------------------------------------------------------------

RunConfig load_run_config(const std::string& path) {
  Json doc;
  try {
    doc = Json::parse(read_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw std::runtime_error("config " + path + ": " + e.what());
  }
  reject_unknown(doc, path, {"env", "learner", "reward"});
  RunConfig c;
  if (auto it = doc.find("env"); it != doc.end()) {
    const std::string w = path + ":/env";
    reject_unknown(*it, w,
                   {"clearance", "lift_height", "stride_gain", "lift_power_cost", "episode_length",
                    "stumble_terminates", "lateral_support_balanced", "rng_seed"});
    read_field(*it, "clearance", c.env.clearance, w);
    read_field(*it, "lift_height", c.env.lift_height, w);
    read_field(*it, "stride_gain", c.env.stride_gain, w);
    read_field(*it, "lift_power_cost", c.env.lift_power_cost, w);
    read_field(*it, "episode_length", c.env.episode_length, w);
    read_field(*it, "stumble_terminates", c.env.stumble_terminates, w);
    read_field(*it, "lateral_support_balanced", c.env.lateral_support_balanced, w);
    read_field(*it, "rng_seed", c.env.rng_seed, w);
  }
  if (auto it = doc.find("learner"); it != doc.end()) {
    const std::string w = path + ":/learner";
    reject_unknown(*it, w,
                   {"alpha", "gamma", "epsilon_start", "epsilon_end", "epsilon_decay_fraction",
                    "total_steps", "eval_every", "eval_episodes"});
    read_field(*it, "alpha", c.learner.alpha, w);
    read_field(*it, "gamma", c.learner.gamma, w);
    read_field(*it, "epsilon_start", c.learner.epsilon.start, w);
    read_field(*it, "epsilon_end", c.learner.epsilon.end, w);
    read_field(*it, "epsilon_decay_fraction", c.learner.epsilon.decay_fraction, w);
    read_field(*it, "total_steps", c.learner.total_steps, w);
    read_field(*it, "eval_every", c.learner.eval_every, w);
    read_field(*it, "eval_episodes", c.learner.eval_episodes, w);
  }
  if (auto it = doc.find("reward"); it != doc.end()) {
    const std::string w = path + ":/reward";
    reject_unknown(*it, w, {"w_e", "gamma", "bonus_b", "energy_reduction"});
    read_field(*it, "w_e", c.reward.energy_weight, w);
    read_field(*it, "gamma", c.reward.gamma, w);
    read_field(*it, "bonus_b", c.reward.bonus_b, w);
    std::string reduction;
    read_field(*it, "energy_reduction", reduction, w);
    if (!reduction.empty()) {
      auto r = energy_reduction_from_string(reduction);
      if (!r) throw std::runtime_error(w + "/energy_reduction: unknown value '" + reduction + "'");
      c.reward.energy_reduction = *r;
    }
  }
  c.env.validate();
  c.learner.validate();
  c.reward.validate();
  return c;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Reward-machine gait toolkit", "gaitrm"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kToolkitVersion));

  std::string validate_path;
  auto* validate_cmd = app.add_subcommand("validate", "Check a reward-machine file");
  validate_cmd->add_option("rm_file", validate_path, "Reward-machine document")->required();

  CommonOptions rm_opts;
  std::string rm_out;
  auto* rm_cmd = app.add_subcommand("rm", "Write a built-in gait reward machine");
  add_common(rm_cmd, rm_opts);
  rm_cmd->add_option("--out", rm_out, "Output path (stdout when omitted)");

  TrainOptions train_opts;
  auto* train_cmd = app.add_subcommand("train", "Train tabular Q-learning over a wrapper");
  add_common(train_cmd, train_opts.common);
  train_cmd->add_option("--out", train_opts.out_dir, "Output directory")->required();
  train_cmd->add_option("--seeds", train_opts.seeds, "Number of seeds");
  train_cmd->add_option("--seed", train_opts.base_seed, "First seed");
  train_cmd->add_option("--steps", train_opts.steps, "Environment steps per seed");
  train_cmd->add_option("--eval-every", train_opts.eval_every, "Steps between evaluations");
  train_cmd->add_option("--jobs", train_opts.jobs, "Seeds trained in parallel");

  RolloutOptions eval_opts;
  auto* eval_cmd = app.add_subcommand("eval", "Evaluate a policy (10 episodes by default)");
  add_common(eval_cmd, eval_opts.common);
  eval_cmd->add_option("--policy", eval_opts.policy,
                       "Policy file, or builtin:trot|pace|bound|stand")->required();
  eval_cmd->add_option("--episodes", eval_opts.episodes, "Evaluation episodes");
  eval_cmd->add_option("--seed", eval_opts.seed, "Episode seed");
  eval_cmd->add_option("--trajectory", eval_opts.trajectory, "Write one episode's trajectory CSV");

  RolloutOptions diagram_opts;
  auto* diagram_cmd = app.add_subcommand("diagram", "Write a foot-contact diagram");
  add_common(diagram_cmd, diagram_opts.common);
  diagram_cmd->add_option("--policy", diagram_opts.policy,
                          "Policy file, or builtin:trot|pace|bound|stand")->required();
  diagram_cmd->add_option("--steps", diagram_opts.steps, "Rollout length");
  diagram_cmd->add_option("--seed", diagram_opts.seed, "Episode seed");
  diagram_cmd->add_option("--out", diagram_opts.out_path, "Output CSV")->required();

  std::string compare_dir;
  auto* compare_cmd = app.add_subcommand("compare", "Summarise training runs in a directory");
  compare_cmd->add_option("dir", compare_dir, "Directory holding run subdirectories");
  compare_cmd->add_option("--out", compare_dir, "Same as the positional directory");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << kToolkitVersion << "\n";
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << app.help();
    return kExitIo;
  }

  try {
    if (*validate_cmd) return cmd_validate(validate_path, out);
    if (*rm_cmd) return cmd_rm(rm_opts, rm_out, out);
    if (*train_cmd) return cmd_train(train_opts, out);
    if (*eval_cmd) return cmd_eval(eval_opts, out);
    if (*diagram_cmd) return cmd_diagram(diagram_opts, out);
    if (*compare_cmd) {
      if (compare_dir.empty()) throw SemanticError("compare needs a directory");
      return cmd_compare(compare_dir, out);
    }
  } catch (const SemanticError& e) {
    err << "error: " << e.what() << "\n";
    return kExitSemantic;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kExitSemantic;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitIo;
  }
  return kExitSemantic;
}

}  // namespace gaitrm::cli
