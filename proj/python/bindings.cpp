#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "cli.hpp"
#include "gaitrm/learn.hpp"
#include "gaitrm/rm_io.hpp"

namespace py = pybind11;
using namespace gaitrm;

namespace {

py::dict info_dict(const StepInfo& info) {
  py::dict d;
  d["delta_x"] = info.delta_x;
  d["power"] = info.power ? py::cast(*info.power) : py::none();
  d["foot_heights"] = info.foot_heights;
  d["terminated"] = info.terminated;
  d["truncated"] = info.truncated;
  return d;
}

py::dict report_dict(const RewardMachine& rm, const ValidationReport& r) {
  py::list gaps, ambiguities, unreachable;
  for (const auto& g : r.gaps) gaps.append(py::make_tuple(rm.name(g.state), g.label.code()));
  for (const auto& a : r.ambiguities) ambiguities.append(py::make_tuple(rm.name(a.state), a.label.code()));
  for (RmStateId u : r.unreachable) unreachable.append(rm.name(u));
  py::dict d;
  d["deterministic"] = r.deterministic();
  d["total"] = r.total();
  d["valid"] = r.valid();
  d["gaps"] = gaps;
  d["ambiguities"] = ambiguities;
  d["unreachable"] = unreachable;
  return d;
}

py::dict metrics_dict(const EvalMetrics& m) {
  py::dict d;
  d["mean_return"] = m.mean_return;
  d["mean_pose_transitions"] = m.mean_pose_transitions;
  d["mean_distance"] = m.mean_distance;
  d["episodes"] = m.episodes;
  d["total_steps"] = m.total_steps;
  d["unseen_lookups"] = m.unseen_lookups;
  return d;
}

WrapperKind wrapper_kind(const std::string& name) {
  auto k = wrapper_kind_from_string(name);
  if (!k) throw py::value_error("unknown wrapper '" + name + "'");
  return *k;
}

Gait gait_named(const std::string& name) {
  auto g = gait_from_string(name);
  if (!g) throw py::value_error("unknown gait '" + name + "'");
  return *g;
}

/// A wrapped environment owning its reward machine.
class PyWrappedEnv {
 public:
  PyWrappedEnv(const std::string& wrapper, std::optional<std::string> gait, const ToyEnvConfig& config,
               const RewardParams& params)
      : kind_(wrapper_kind(wrapper)) {
    if (gait) rm_ = std::make_shared<RewardMachine>(build_gait_rm(gait_named(*gait), params));
    env_ = make_wrapper(kind_, config, rm_.get(), params);
  }

  std::vector<double> reset(std::uint64_t seed) { return env_->reset(seed).features(); }

  py::tuple step(unsigned action) {
    const WrappedStep s = env_->step(Action::from_code(action));
    return py::make_tuple(s.observation.features(), s.reward, s.terminated, s.truncated, info_dict(s.info),
                          s.label.code());
  }

  std::string kind() const { return std::string(to_string(kind_)); }

 private:
  WrapperKind kind_;
  std::shared_ptr<RewardMachine> rm_;
  std::unique_ptr<WrappedEnv> env_;
};

}  // namespace

PYBIND11_MODULE(_gaitrm, m) {
  m.doc() = "Reward machines for quadruped gait learning on a toy contact-pattern environment";
  m.attr("__version__") = cli::kToolkitVersion;

  py::enum_<Prop>(m, "Prop")
      .value("FL", Prop::FL)
      .value("FR", Prop::FR)
      .value("BL", Prop::BL)
      .value("BR", Prop::BR);

  py::class_<LabelSet>(m, "LabelSet")
      .def(py::init<>())
      .def(py::init([](const std::vector<Prop>& props) {
        LabelSet l;
        for (Prop p : props) l = l.with(p);
        return l;
      }))
      .def_static("from_code", &LabelSet::from_code)
      .def_property_readonly("code", [](LabelSet l) { return static_cast<unsigned>(l.code()); })
      .def("__contains__", &LabelSet::contains)
      .def("__len__", &LabelSet::size)
      .def("__eq__", [](LabelSet a, LabelSet b) { return a == b; })
      .def("__hash__", [](LabelSet l) { return l.code(); })
      .def("__repr__", &LabelSet::to_string);

  py::register_exception<GuardParseError>(m, "GuardParseError", PyExc_ValueError);
  py::register_exception<RmFormatError>(m, "RmFormatError", PyExc_ValueError);

  py::class_<Guard>(m, "Guard")
      .def("eval", &Guard::eval)
      .def_property_readonly("truth_table", &Guard::truth_table)
      .def_property_readonly("depth", &Guard::depth)
      .def("__str__", &render_guard)
      .def("__repr__", [](const Guard& g) { return "Guard('" + render_guard(g) + "')"; });
  m.def("parse_guard", [](const std::string& text) { return parse_guard(text); });
  m.def("render_guard", &render_guard);
  m.def("satisfying_sets", &satisfying_sets);

  py::class_<RewardParams>(m, "RewardParams")
      .def(py::init<>())
      .def_readwrite("energy_weight", &RewardParams::energy_weight)
      .def_readwrite("gamma", &RewardParams::gamma)
      .def_readwrite("bonus_b", &RewardParams::bonus_b);

  py::class_<RewardMachine>(m, "RewardMachine")
      .def_property_readonly("states", &RewardMachine::state_names)
      .def_property_readonly("initial", [](const RewardMachine& rm) { return rm.name(rm.initial()); })
      .def_property_readonly("num_transitions", [](const RewardMachine& rm) { return rm.transitions().size(); })
      .def("step",
           [](const RewardMachine& rm, const std::string& state, LabelSet l) {
             auto u = rm.find_state(state);
             if (!u) throw py::key_error(state);
             const RmStep s = rm_step(rm, *u, l);
             return py::make_tuple(rm.name(s.next), describe(s.reward));
           })
      .def("validate", [](const RewardMachine& rm) { return report_dict(rm, validate(rm)); });

  m.def(
      "build_gait_rm",
      [](const std::string& gait, const RewardParams& params) { return build_gait_rm(gait_named(gait), params); },
      py::arg("gait"), py::arg("params") = RewardParams{});
  m.def("save_rm", &save_rm, py::arg("rm"), py::arg("params") = RewardParams{});
  m.def("load_rm", [](const std::string& doc) {
    LoadedRm loaded = load_rm(doc);
    py::dict report = report_dict(loaded.machine, loaded.report);
    return py::make_tuple(std::move(loaded.machine), loaded.params, report);
  });
  m.def(
      "compute_reward",
      [](const std::string& kind, double delta_x, std::optional<double> power, const RewardParams& params) {
        StepInfo info;
        info.delta_x = delta_x;
        info.power = power;
        if (kind == "walk") return compute_reward(WalkReward{}, info, params);
        if (kind == "switch_pose_bonus") return compute_reward(SwitchPoseBonus{params.bonus_b}, info, params);
        throw py::value_error("reward kind must be 'walk' or 'switch_pose_bonus'");
      },
      py::arg("kind"), py::arg("delta_x"), py::arg("power") = py::none(), py::arg("params") = RewardParams{});

  py::class_<ToyEnvConfig>(m, "ToyEnvConfig")
      .def(py::init<>())
      .def_readwrite("clearance", &ToyEnvConfig::clearance)
      .def_readwrite("lift_height", &ToyEnvConfig::lift_height)
      .def_readwrite("stride_gain", &ToyEnvConfig::stride_gain)
      .def_readwrite("lift_power_cost", &ToyEnvConfig::lift_power_cost)
      .def_readwrite("episode_length", &ToyEnvConfig::episode_length)
      .def_readwrite("stumble_terminates", &ToyEnvConfig::stumble_terminates)
      .def_readwrite("lateral_support_balanced", &ToyEnvConfig::lateral_support_balanced)
      .def("validate", &ToyEnvConfig::validate);

  py::class_<ToyQuadrupedEnv>(m, "ToyQuadrupedEnv")
      .def(py::init<ToyEnvConfig>(), py::arg("config") = ToyEnvConfig{})
      .def("reset", [](ToyQuadrupedEnv& e, std::uint64_t seed) { return e.reset(seed).code(); },
           py::arg("seed") = 0)
      .def("step", [](ToyQuadrupedEnv& e, unsigned action) { return info_dict(e.step(Action::from_code(action))); })
      .def_property_readonly("base_x", [](const ToyQuadrupedEnv& e) { return e.state().base_x; })
      .def_property_readonly("airborne", [](const ToyQuadrupedEnv& e) { return e.state().airborne(); });

  py::class_<PyWrappedEnv>(m, "WrappedEnv")
      .def(py::init<const std::string&, std::optional<std::string>, const ToyEnvConfig&, const RewardParams&>(),
           py::arg("wrapper"), py::arg("gait") = py::none(), py::arg("config") = ToyEnvConfig{},
           py::arg("params") = RewardParams{})
      .def_property_readonly("kind", &PyWrappedEnv::kind)
      .def("reset", &PyWrappedEnv::reset, py::arg("seed") = 0)
      .def("step", &PyWrappedEnv::step,
           "Returns (features, reward, terminated, truncated, info, label_code).");

  py::class_<LearnerConfig>(m, "LearnerConfig")
      .def(py::init<>())
      .def_readwrite("alpha", &LearnerConfig::alpha)
      .def_readwrite("gamma", &LearnerConfig::gamma)
      .def_readwrite("total_steps", &LearnerConfig::total_steps)
      .def_readwrite("eval_every", &LearnerConfig::eval_every)
      .def_readwrite("eval_episodes", &LearnerConfig::eval_episodes)
      .def_readwrite("seed", &LearnerConfig::seed);

  m.def(
      "train",
      [](const std::string& wrapper, std::optional<std::string> gait, const LearnerConfig& config) {
        const WrapperKind kind = wrapper_kind(wrapper);
        const RewardMachine tracker = build_gait_rm(gait ? gait_named(*gait) : Gait::Trot);
        auto env = make_wrapper(kind, ToyEnvConfig{}, &tracker, RewardParams{});
        TrainResult r;
        {
          py::gil_scoped_release release;
          r = train(*env, tracker, config);
        }
        py::list curve;
        for (const CurvePoint& p : r.curve) curve.append(py::make_tuple(p.step, metrics_dict(p.metrics)));
        py::dict out;
        out["curve"] = curve;
        out["policy"] = save_policy(r.q, kind, gait ? std::optional<Gait>(gait_named(*gait)) : std::nullopt);
        return out;
      },
      py::arg("wrapper"), py::arg("gait") = py::none(), py::arg("config") = LearnerConfig{});

  m.def(
      "evaluate_builtin",
      [](const std::string& policy, const std::string& tracker_gait, const std::string& wrapper, int episodes) {
        const RewardMachine tracker = build_gait_rm(gait_named(tracker_gait));
        auto env = make_wrapper(wrapper_kind(wrapper), ToyEnvConfig{}, &tracker, RewardParams{});
        const ContactPatternPolicy p = policy == "stand" ? stand_still_policy() : perfect_gait_policy(gait_named(policy));
        return metrics_dict(evaluate(p, *env, tracker, episodes));
      },
      py::arg("policy"), py::arg("tracker_gait") = "trot", py::arg("wrapper") = "cross_product",
      py::arg("episodes") = 10);

  m.def("run_cli", [](const std::vector<std::string>& args) {
    std::ostringstream out, err;
    int code;
    {
      py::gil_scoped_release release;
      code = cli::run_cli(args, out, err);
    }
    return py::make_tuple(code, out.str(), err.str());
  });
}
