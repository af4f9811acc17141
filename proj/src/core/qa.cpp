// SPDX-License-Identifier: Apache-2.0
#include "failgen/qa.hpp"

#include <algorithm>

#include "failgen/config.hpp"
#include "failgen/digest.hpp"
#include "failgen/error.hpp"

namespace failgen {

namespace {

constexpr std::array<std::string_view, 12> kRecordKeys = {
    "id",     "task",   "subtask_index", "subtask_text", "failure_mode",    "params",
    "query",  "answer", "image",         "viewpoints",   "keyframes_total", "seed"};

template <typename... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};

[[noreturn]] void malformed(const std::string& what) { throw Error(ErrorCode::MalformedLine, what); }

}  // namespace

std::string make_query(std::string_view subtask_text) {
  if (subtask_text.empty()) throw Error(ErrorCode::EmptySubtask, "sub-task text is empty");
  std::string q = "The robot is currently ";
  q += subtask_text;
  q += ". For the given sub-tasks, first determine it has succeed by choosing from [\"yes\", \"no\"] and then "
       "explain the reason why the current sub-tasks has failed.";
  return q;
}

std::string make_success_answer() { return "Yes."; }

std::string make_answer(const PerturbationConfig& config) {
  return std::visit(
      Overloaded{
          [](const NoGraspParams&) -> std::string { return "No, the gripper failed to close and did not grasp the object."; },
          [](const SlipParams&) -> std::string { return "No, the object slipped from the gripper after grasping."; },
          [](const TranslationParams& p) {
            return "No, the gripper moved to a position offset along the " + std::string(to_string(p.axis)) + " axis.";
          },
          [](const RotationParams& p) {
            return "No, the robot gripper rotated with an incorrect " + std::string(to_string(p.axis)) + " angle.";
          },
          [](const NoRotationParams& p) {
            return "No, the gripper failed to rotate to the required " + std::string(to_string(p.axis)) + " angle.";
          },
          [](const WrongActionParams&) -> std::string { return "No, the robot performed the actions in the wrong order."; },
          [](const WrongObjectParams&) -> std::string { return "No, the robot acted on the wrong target object."; },
      },
      config.params);
}

std::string make_answer(std::string_view mode, const Json& params) {
  if (mode == kSuccessLabel) {
    if (!params.is_object() || !params.empty()) {
      throw Error(ErrorCode::ParamMismatch, "success records take no parameters");
    }
    return make_success_answer();
  }
  auto parsed = parse_failure_mode(mode);
  if (!parsed) throw Error(ErrorCode::ParamMismatch, "unknown failure mode '" + std::string(mode) + "'");
  return make_answer(config_from_params(*parsed, params));
}

std::string failure_record_id(std::string_view task, std::uint64_t seed, const PerturbationConfig& config,
                              int subtask_index) {
  const std::string key = std::string(task) + "|" + std::to_string(seed) + "|" + canonical_key(config) + "|" +
                          std::to_string(subtask_index);
  return sha256_hex(key).substr(0, 16);
}

std::string success_record_id(std::string_view task, std::uint64_t seed, int subtask_index,
                              std::string_view paired_failure_id) {
  const std::string key = std::string(task) + "|" + std::to_string(seed) + "|" + std::string(kSuccessLabel) + "|" +
                          std::string(paired_failure_id) + "|" + std::to_string(subtask_index);
  return sha256_hex(key).substr(0, 16);
}

Json to_json(const FailureRecord& r) {
  Json j = Json::object();
  j["id"] = r.id;
  j["task"] = r.task;
  j["subtask_index"] = r.subtask_index;
  j["subtask_text"] = r.subtask_text;
  j["failure_mode"] = r.failure_mode;
  j["params"] = r.params;
  j["query"] = r.query;
  j["answer"] = r.answer;
  j["image"] = r.image;
  j["viewpoints"] = r.viewpoints;
  j["keyframes_total"] = r.keyframes_total;
  j["seed"] = r.seed;
  return j;
}

FailureRecord record_from_json(const Json& j) {
  if (!j.is_object()) malformed("record is not a JSON object");
  for (const auto& [key, value] : j.items()) {
    (void)value;
    if (std::find(kRecordKeys.begin(), kRecordKeys.end(), key) == kRecordKeys.end()) {
      malformed("unexpected key '" + key + "'");
    }
  }
  for (auto key : kRecordKeys) {
    if (!j.contains(std::string(key))) malformed("missing key '" + std::string(key) + "'");
  }
  auto str = [&](const char* key) {
    const Json& v = j.at(key);
    if (!v.is_string()) malformed(std::string("'") + key + "' must be a string");
    return v.get<std::string>();
  };
  auto integer = [&](const char* key) {
    const Json& v = j.at(key);
    if (!v.is_number_integer()) malformed(std::string("'") + key + "' must be an integer");
    return v;
  };
  FailureRecord r;
  r.id = str("id");
  r.task = str("task");
  r.subtask_index = integer("subtask_index").get<int>();
  r.subtask_text = str("subtask_text");
  r.failure_mode = str("failure_mode");
  if (!j.at("params").is_object()) malformed("'params' must be an object");
  r.params = j.at("params");
  r.query = str("query");
  r.answer = str("answer");
  r.image = str("image");
  const Json& views = j.at("viewpoints");
  if (!views.is_array()) malformed("'viewpoints' must be an array");
  for (const auto& v : views) {
    if (!v.is_string()) malformed("'viewpoints' entries must be strings");
    r.viewpoints.push_back(v.get<std::string>());
  }
  r.keyframes_total = integer("keyframes_total").get<int>();
  const Json& seed = integer("seed");
  if (!seed.is_number_unsigned() && seed.get<std::int64_t>() < 0) malformed("'seed' must be non-negative");
  r.seed = seed.get<std::uint64_t>();
  return r;
}

bool header_consistent(const FailureRecord& r) {
  if (r.is_success()) return r.answer.starts_with("Yes");
  return r.answer.starts_with("No,");
}

}  // namespace failgen
