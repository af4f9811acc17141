// SPDX-License-Identifier: Apache-2.0
#include "failgen/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "failgen/error.hpp"

namespace failgen {

namespace {

std::string where(const YAML::Mark& mark) {
  if (mark.line < 0) return "";
  return "line " + std::to_string(mark.line + 1) + ": ";
}

[[noreturn]] void schema_error(const YAML::Node& node, const std::string& message) {
  throw Error(ErrorCode::SchemaError, where(node.Mark()) + message);
}

YAML::Node load_yaml(std::string_view text) {
  try {
    return YAML::Load(std::string(text));
  } catch (const YAML::Exception& e) {
    throw Error(ErrorCode::SchemaError, where(e.mark) + e.msg);
  }
}

void require_known_keys(const YAML::Node& map, const std::set<std::string>& allowed) {
  for (auto it = map.begin(); it != map.end(); ++it) {
    const std::string key = it->first.as<std::string>();
    if (!allowed.contains(key)) schema_error(it->first, "unknown key '" + key + "'");
  }
}

template <class T>
T scalar(const YAML::Node& node, const std::string& field) {
  if (!node.IsScalar()) schema_error(node, "'" + field + "' must be a scalar");
  try {
    return node.as<T>();
  } catch (const YAML::Exception&) {
    schema_error(node, "'" + field + "' has the wrong type");
  }
}

// Accepts a scalar or a sequence of scalars.
std::vector<std::string> string_list(const YAML::Node& node, const std::string& field) {
  std::vector<std::string> out;
  if (node.IsScalar()) {
    out.push_back(node.as<std::string>());
  } else if (node.IsSequence()) {
    for (const auto& item : node) out.push_back(scalar<std::string>(item, field));
  } else {
    schema_error(node, "'" + field + "' must be a list");
  }
  return out;
}

template <class T>
std::vector<T> number_list(const YAML::Node& node, const std::string& field) {
  if (!node.IsSequence()) schema_error(node, "'" + field + "' must be a list");
  std::vector<T> out;
  for (const auto& item : node) out.push_back(scalar<T>(item, field));
  return out;
}

const Json& require_param(const Json& params, const char* key) {
  auto it = params.find(key);
  if (it == params.end()) {
    throw Error(ErrorCode::ParamMismatch, std::string("missing parameter '") + key + "'");
  }
  return *it;
}

int int_param(const Json& params, const char* key) {
  const Json& v = require_param(params, key);
  if (!v.is_number_integer()) throw Error(ErrorCode::ParamMismatch, std::string("'") + key + "' must be an integer");
  return v.get<int>();
}

double number_param(const Json& params, const char* key) {
  const Json& v = require_param(params, key);
  if (!v.is_number()) throw Error(ErrorCode::ParamMismatch, std::string("'") + key + "' must be a number");
  return v.get<double>();
}

std::string string_param(const Json& params, const char* key) {
  const Json& v = require_param(params, key);
  if (!v.is_string()) throw Error(ErrorCode::ParamMismatch, std::string("'") + key + "' must be a string");
  return v.get<std::string>();
}

std::vector<std::string> allowed_params(FailureMode mode) {
  switch (mode) {
    case FailureMode::NoGrasp: return {"keyframe"};
    case FailureMode::Slip: return {"keyframe", "release_fraction"};
    case FailureMode::Translation: return {"keyframe", "axis", "offset_m"};
    case FailureMode::Rotation: return {"keyframe", "axis", "angle_rad"};
    case FailureMode::NoRotation: return {"keyframe", "axis"};
    case FailureMode::WrongAction: return {"groups"};
    case FailureMode::WrongObject: return {"objects"};
  }
  return {};
}

}  // namespace

SweepGrids SweepSpec::default_grids() {
  return {{-0.10, -0.05, 0.05, 0.10}, {-1.571, -1.047, -0.524, 0.524, 1.047, 1.571}, {0.2, 0.5, 0.8}};
}

SweepSpec SweepSpec::defaults() {
  SweepSpec s;
  s.tasks = task_names();
  s.modes.assign(kAllFailureModes.begin(), kAllFailureModes.end());
  for (std::uint64_t i = 0; i < 10; ++i) s.seeds.push_back(i);
  s.grids = default_grids();
  return s;
}

void SweepSpec::validate() const {
  auto enabled = [&](FailureMode m) { return std::find(modes.begin(), modes.end(), m) != modes.end(); };
  if (enabled(FailureMode::Translation) && grids.translation_offsets_m.empty()) {
    throw Error(ErrorCode::EmptyGrid, "translation enabled but translation_offsets_m is empty");
  }
  if ((enabled(FailureMode::Rotation)) && grids.rotation_angles_rad.empty()) {
    throw Error(ErrorCode::EmptyGrid, "rotation enabled but rotation_angles_rad is empty");
  }
  if (enabled(FailureMode::Slip) && grids.slip_fractions.empty()) {
    throw Error(ErrorCode::EmptyGrid, "slip enabled but slip_fractions is empty");
  }
  for (double f : grids.slip_fractions) {
    if (!(f > 0.0 && f < 1.0)) throw Error(ErrorCode::SchemaError, "slip fractions must lie strictly inside (0, 1)");
  }
  for (double v : grids.translation_offsets_m) {
    if (!std::isfinite(v)) throw Error(ErrorCode::SchemaError, "translation offsets must be finite");
  }
  for (double v : grids.rotation_angles_rad) {
    if (!std::isfinite(v)) throw Error(ErrorCode::SchemaError, "rotation angles must be finite");
  }
  if (!(success_sample_ratio >= 0.0 && success_sample_ratio <= 1.0)) {
    throw Error(ErrorCode::SchemaError, "success_sample_ratio must lie in [0, 1]");
  }
  if (seeds.empty()) throw Error(ErrorCode::SchemaError, "seeds must not be empty");
}

SweepSpec parse_sweep_spec(std::string_view text) {
  const YAML::Node root = load_yaml(text);
  if (!root.IsMap()) throw Error(ErrorCode::SchemaError, "sweep document must be a mapping");
  require_known_keys(root, {"tasks", "modes", "seeds", "success_sample_ratio", "grids"});

  SweepSpec spec = SweepSpec::defaults();
  if (!root["tasks"]) throw Error(ErrorCode::SchemaError, "missing required key 'tasks'");
  if (!root["modes"]) throw Error(ErrorCode::SchemaError, "missing required key 'modes'");

  const auto tasks = string_list(root["tasks"], "tasks");
  if (std::find(tasks.begin(), tasks.end(), "all") != tasks.end()) {
    if (tasks.size() != 1) schema_error(root["tasks"], "'all' cannot be combined with task names");
  } else {
    spec.tasks = tasks;
  }
  if (spec.tasks.empty()) schema_error(root["tasks"], "'tasks' must not be empty");

  const auto modes = string_list(root["modes"], "modes");
  if (std::find(modes.begin(), modes.end(), "all") != modes.end()) {
    if (modes.size() != 1) schema_error(root["modes"], "'all' cannot be combined with mode names");
  } else {
    spec.modes.clear();
    for (const auto& m : modes) {
      auto mode = parse_failure_mode(m);
      if (!mode) schema_error(root["modes"], "unknown failure mode '" + m + "'");
      if (std::find(spec.modes.begin(), spec.modes.end(), *mode) != spec.modes.end()) {
        schema_error(root["modes"], "duplicate failure mode '" + m + "'");
      }
      spec.modes.push_back(*mode);
    }
  }
  if (spec.modes.empty()) schema_error(root["modes"], "'modes' must not be empty");

  if (root["seeds"]) {
    spec.seeds = number_list<std::uint64_t>(root["seeds"], "seeds");
    std::set<std::uint64_t> unique(spec.seeds.begin(), spec.seeds.end());
    if (unique.size() != spec.seeds.size()) schema_error(root["seeds"], "duplicate seeds");
  }
  if (root["success_sample_ratio"]) {
    spec.success_sample_ratio = scalar<double>(root["success_sample_ratio"], "success_sample_ratio");
  }
  if (const YAML::Node grids = root["grids"]) {
    if (!grids.IsMap()) schema_error(grids, "'grids' must be a mapping");
    require_known_keys(grids, {"translation_offsets_m", "rotation_angles_rad", "slip_fractions"});
    if (grids["translation_offsets_m"]) {
      spec.grids.translation_offsets_m = number_list<double>(grids["translation_offsets_m"], "translation_offsets_m");
    }
    if (grids["rotation_angles_rad"]) {
      spec.grids.rotation_angles_rad = number_list<double>(grids["rotation_angles_rad"], "rotation_angles_rad");
    }
    if (grids["slip_fractions"]) {
      spec.grids.slip_fractions = number_list<double>(grids["slip_fractions"], "slip_fractions");
    }
  }
  spec.validate();
  return spec;
}

namespace {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot read '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

SweepSpec load_sweep_spec(const std::filesystem::path& path) {
  try {
    return parse_sweep_spec(read_file(path));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::IoError) throw;
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

PerturbationDocument parse_perturbation_config(std::string_view text) {
  const YAML::Node root = load_yaml(text);
  if (!root.IsMap()) throw Error(ErrorCode::SchemaError, "perturbation document must be a mapping");
  require_known_keys(root, {"task", "seed", "mode", "keyframe", "groups", "objects", "axis", "offset_m",
                            "angle_rad", "release_fraction"});
  PerturbationDocument doc;
  if (root["task"]) doc.task = scalar<std::string>(root["task"], "task");
  if (root["seed"]) doc.seed = scalar<std::uint64_t>(root["seed"], "seed");
  if (!root["mode"]) throw Error(ErrorCode::SchemaError, "missing required key 'mode'");
  const auto mode_text = scalar<std::string>(root["mode"], "mode");
  const auto mode = parse_failure_mode(mode_text);
  if (!mode) schema_error(root["mode"], "unknown failure mode '" + mode_text + "'");

  Json params = Json::object();
  for (auto it = root.begin(); it != root.end(); ++it) {
    const std::string key = it->first.as<std::string>();
    const YAML::Node& v = it->second;
    if (key == "task" || key == "seed" || key == "mode") continue;
    if (key == "keyframe") {
      params[key] = scalar<int>(v, key);
    } else if (key == "groups") {
      params[key] = number_list<int>(v, key);
    } else if (key == "objects") {
      params[key] = string_list(v, key);
    } else if (key == "axis") {
      params[key] = scalar<std::string>(v, key);
    } else {
      params[key] = scalar<double>(v, key);
    }
  }
  try {
    doc.config = config_from_params(*mode, params);
  } catch (const Error& e) {
    throw Error(ErrorCode::SchemaError, where(root.Mark()) + e.what());
  }
  return doc;
}

PerturbationDocument load_perturbation_config(const std::filesystem::path& path) {
  try {
    return parse_perturbation_config(read_file(path));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::IoError) throw;
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

Json to_json(const SweepSpec& spec) {
  Json modes = Json::array();
  for (auto m : spec.modes) modes.push_back(std::string(to_string(m)));
  return Json{{"tasks", spec.tasks},
              {"modes", modes},
              {"seeds", spec.seeds},
              {"success_sample_ratio", spec.success_sample_ratio},
              {"grids",
               {{"translation_offsets_m", spec.grids.translation_offsets_m},
                {"rotation_angles_rad", spec.grids.rotation_angles_rad},
                {"slip_fractions", spec.grids.slip_fractions}}}};
}

Json params_to_json(const PerturbationConfig& config) {
  return std::visit(
      [](const auto& p) -> Json {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, NoGraspParams>) {
          return {{"keyframe", p.keyframe}};
        } else if constexpr (std::is_same_v<P, SlipParams>) {
          return {{"keyframe", p.keyframe}, {"release_fraction", p.release_fraction}};
        } else if constexpr (std::is_same_v<P, TranslationParams>) {
          return {{"keyframe", p.keyframe}, {"axis", std::string(to_string(p.axis))}, {"offset_m", p.offset_m}};
        } else if constexpr (std::is_same_v<P, RotationParams>) {
          return {{"keyframe", p.keyframe}, {"axis", std::string(to_string(p.axis))}, {"angle_rad", p.angle_rad}};
        } else if constexpr (std::is_same_v<P, NoRotationParams>) {
          return {{"keyframe", p.keyframe}, {"axis", std::string(to_string(p.axis))}};
        } else if constexpr (std::is_same_v<P, WrongActionParams>) {
          return {{"groups", {p.group_i, p.group_j}}};
        } else {
          return {{"objects", {p.target_id, p.distractor_id}}};
        }
      },
      config.params);
}

PerturbationConfig config_from_params(FailureMode mode, const Json& params) {
  if (!params.is_object()) throw Error(ErrorCode::ParamMismatch, "parameters must be an object");
  const auto allowed = allowed_params(mode);
  for (const auto& [key, value] : params.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw Error(ErrorCode::ParamMismatch,
                  "parameter '" + key + "' does not apply to mode " + std::string(to_string(mode)));
    }
  }
  auto rotation_axis = [&]() {
    const auto text = string_param(params, "axis");
    auto axis = parse_rotation_axis(text);
    if (!axis) throw Error(ErrorCode::ParamMismatch, "rotation axis must be roll, pitch or yaw, got '" + text + "'");
    return *axis;
  };
  switch (mode) {
    case FailureMode::NoGrasp: return {NoGraspParams{int_param(params, "keyframe")}};
    case FailureMode::Slip:
      return {SlipParams{int_param(params, "keyframe"), number_param(params, "release_fraction")}};
    case FailureMode::Translation: {
      const auto text = string_param(params, "axis");
      auto axis = parse_axis(text);
      if (!axis) throw Error(ErrorCode::ParamMismatch, "translation axis must be x, y or z, got '" + text + "'");
      return {TranslationParams{int_param(params, "keyframe"), *axis, number_param(params, "offset_m")}};
    }
    case FailureMode::Rotation:
      return {RotationParams{int_param(params, "keyframe"), rotation_axis(), number_param(params, "angle_rad")}};
    case FailureMode::NoRotation: return {NoRotationParams{int_param(params, "keyframe"), rotation_axis()}};
    case FailureMode::WrongAction: {
      const Json& g = require_param(params, "groups");
      if (!g.is_array() || g.size() != 2 || !g[0].is_number_integer() || !g[1].is_number_integer()) {
        throw Error(ErrorCode::ParamMismatch, "'groups' must be a pair of integers");
      }
      return {WrongActionParams{g[0].get<int>(), g[1].get<int>()}};
    }
    case FailureMode::WrongObject: {
      const Json& o = require_param(params, "objects");
      if (!o.is_array() || o.size() != 2 || !o[0].is_string() || !o[1].is_string()) {
        throw Error(ErrorCode::ParamMismatch, "'objects' must be a [target, distractor] pair of ids");
      }
      return {WrongObjectParams{o[0].get<std::string>(), o[1].get<std::string>()}};
    }
  }
  throw Error(ErrorCode::ParamMismatch, "unknown failure mode");
}

std::string canonical_key(const PerturbationConfig& config) {
  return std::string(to_string(config.mode())) + "|" + params_to_json(config).dump();
}

}  // namespace failgen
