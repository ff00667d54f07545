#include "gaitrm/rm_io.hpp"

#include <fstream>
#include <initializer_list>
#include <sstream>

#include "json.hpp"

namespace gaitrm {

using Json = nlohmann::ordered_json;

RmFormatError::RmFormatError(std::string location, const std::string& message)
    : std::runtime_error("RM document error at " + location + ": " + message),
      location_(std::move(location)) {}

namespace {

Json reward_to_json(const RewardSpec& spec) {
  Json j;
  if (const auto* bonus = std::get_if<SwitchPoseBonus>(&spec)) {
    j["type"] = "switch_pose_bonus";
    j["b"] = bonus->b;
  } else {
    j["type"] = "walk";
  }
  return j;
}

// Schema helpers. Every accessor names the pointer of the offending value.

void reject_unknown(const Json& obj, const std::string& where,
                    std::initializer_list<std::string_view> allowed) {
  for (const auto& [key, value] : obj.items()) {
    bool ok = false;
    for (auto a : allowed) ok = ok || key == a;
    if (!ok) throw RmFormatError(where + "/" + key, "unknown field '" + key + "'");
  }
}

const Json& require(const Json& obj, const std::string& where, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end()) throw RmFormatError(where, std::string("missing field '") + key + "'");
  return *it;
}

const Json& require_object(const Json& j, const std::string& where) {
  if (!j.is_object()) throw RmFormatError(where, "expected an object");
  return j;
}

const Json& require_array(const Json& j, const std::string& where) {
  if (!j.is_array()) throw RmFormatError(where, "expected an array");
  return j;
}

std::string require_string(const Json& j, const std::string& where) {
  if (!j.is_string()) throw RmFormatError(where, "expected a string");
  return j.get<std::string>();
}

double require_number(const Json& j, const std::string& where) {
  if (!j.is_number()) throw RmFormatError(where, "expected a number");
  return j.get<double>();
}

RmStateId state_ref(const std::vector<std::string>& names, const Json& j, const std::string& where) {
  const std::string name = require_string(j, where);
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (names[i] == name) return RmStateId{i};
  }
  throw RmFormatError(where, "unknown state '" + name + "'");
}

RewardSpec reward_from_json(const Json& j, const std::string& where) {
  require_object(j, where);
  const std::string type = require_string(require(j, where, "type"), where + "/type");
  if (type == "walk") {
    reject_unknown(j, where, {"type"});
    return WalkReward{};
  }
  if (type == "switch_pose_bonus") {
    reject_unknown(j, where, {"type", "b"});
    return SwitchPoseBonus{require_number(require(j, where, "b"), where + "/b")};
  }
  throw RmFormatError(where + "/type", "unknown reward type '" + type + "'");
}

RewardParams params_from_json(const Json& j, const std::string& where) {
  require_object(j, where);
  reject_unknown(j, where, {"w_e", "gamma", "bonus_b", "energy_reduction"});
  RewardParams p;
  p.energy_weight = require_number(require(j, where, "w_e"), where + "/w_e");
  p.gamma = require_number(require(j, where, "gamma"), where + "/gamma");
  p.bonus_b = require_number(require(j, where, "bonus_b"), where + "/bonus_b");
  if (auto it = j.find("energy_reduction"); it != j.end()) {
    const std::string name = require_string(*it, where + "/energy_reduction");
    auto r = energy_reduction_from_string(name);
    if (!r) throw RmFormatError(where + "/energy_reduction", "unknown reduction '" + name + "'");
    p.energy_reduction = *r;
  }
  try {
    p.validate();
  } catch (const std::invalid_argument& e) {
    throw RmFormatError(where, e.what());
  }
  return p;
}

}  // namespace

std::string save_rm(const RewardMachine& rm, const RewardParams& params) {
  const ValidationReport report = validate(rm);
  if (!report.valid()) {
    throw std::invalid_argument("refusing to save an invalid reward machine:\n" +
                                format_report(rm, report));
  }
  params.validate();

  Json doc;
  doc["version"] = kRmFormatVersion;
  doc["states"] = rm.state_names();
  doc["initial"] = rm.name(rm.initial());
  doc["accepting"] = Json::array();
  for (RmStateId u : rm.accepting()) doc["accepting"].push_back(rm.name(u));
  doc["transitions"] = Json::array();
  for (const Transition& t : rm.transitions()) {
    Json jt;
    jt["from"] = rm.name(t.from);
    jt["to"] = rm.name(t.to);
    jt["guard"] = render_guard(t.guard);
    jt["reward"] = reward_to_json(t.reward);
    doc["transitions"].push_back(std::move(jt));
  }
  Json jp;
  jp["w_e"] = params.energy_weight;
  jp["gamma"] = params.gamma;
  jp["bonus_b"] = params.bonus_b;
  if (params.energy_reduction != EnergyReduction::AbsInnerProduct) {
    jp["energy_reduction"] = std::string(to_string(params.energy_reduction));
  }
  doc["params"] = std::move(jp);
  return doc.dump(2) + "\n";
}

void save_rm_file(const RewardMachine& rm, const RewardParams& params,
                  const std::filesystem::path& path) {
  const std::string text = save_rm(rm, params);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

LoadedRm load_rm(std::string_view document) {
  Json doc;
  try {
    doc = Json::parse(document.begin(), document.end());
  } catch (const nlohmann::json::parse_error& e) {
    throw RmFormatError("byte " + std::to_string(e.byte), e.what());
  }
  require_object(doc, "/");
  reject_unknown(doc, "", {"version", "states", "initial", "accepting", "transitions", "params"});

  const Json& version = require(doc, "/", "version");
  if (!version.is_number_integer() || version.get<int>() != kRmFormatVersion) {
    throw RmFormatError("/version", "unsupported version (expected " +
                                        std::to_string(kRmFormatVersion) + ")");
  }

  std::vector<std::string> names;
  const Json& states = require_array(require(doc, "/", "states"), "/states");
  for (std::size_t i = 0; i < states.size(); ++i) {
    names.push_back(require_string(states[i], "/states/" + std::to_string(i)));
  }
  if (names.empty()) throw RmFormatError("/states", "at least one state required");

  const RmStateId initial = state_ref(names, require(doc, "/", "initial"), "/initial");

  std::vector<RmStateId> accepting;
  const Json& acc = require_array(require(doc, "/", "accepting"), "/accepting");
  for (std::size_t i = 0; i < acc.size(); ++i) {
    accepting.push_back(state_ref(names, acc[i], "/accepting/" + std::to_string(i)));
  }

  std::vector<Transition> transitions;
  const Json& jts = require_array(require(doc, "/", "transitions"), "/transitions");
  for (std::size_t i = 0; i < jts.size(); ++i) {
    const std::string where = "/transitions/" + std::to_string(i);
    const Json& jt = require_object(jts[i], where);
    reject_unknown(jt, where, {"from", "to", "guard", "reward"});
    const RmStateId from = state_ref(names, require(jt, where, "from"), where + "/from");
    const RmStateId to = state_ref(names, require(jt, where, "to"), where + "/to");
    const std::string guard_text = require_string(require(jt, where, "guard"), where + "/guard");
    std::optional<Guard> guard;
    try {
      guard = parse_guard(guard_text);
    } catch (const GuardParseError& e) {
      throw RmFormatError(where + "/guard", e.what());
    }
    RewardSpec reward = reward_from_json(require(jt, where, "reward"), where + "/reward");
    transitions.push_back(Transition{from, *guard, to, reward});
  }

  RewardParams params = params_from_json(require(doc, "/", "params"), "/params");

  try {
    RewardMachine machine(std::move(names), initial, std::move(accepting), std::move(transitions));
    ValidationReport report = validate(machine);
    return LoadedRm{std::move(machine), params, std::move(report)};
  } catch (const std::invalid_argument& e) {
    throw RmFormatError("/", e.what());
  }
}

LoadedRm load_rm_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open reward machine file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return load_rm(buf.str());
}

}  // namespace gaitrm
