// SPDX-License-Identifier: Apache-2.0
//
// Query/answer records built from failure candidates and success samples.
#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "failgen/json.hpp"
#include "failgen/perturb.hpp"

namespace failgen {

inline constexpr std::string_view kSuccessLabel = "success";

struct FailureRecord {
  std::string id;
  std::string task;
  int subtask_index = 0;
  std::string subtask_text;
  std::string failure_mode;  // snake_case mode name or "success"
  Json params = Json::object();
  std::string query;
  std::string answer;
  std::string image;  // relative to the dataset directory
  std::vector<std::string> viewpoints;
  int keyframes_total = 0;
  std::uint64_t seed = 0;

  bool is_success() const { return failure_mode == kSuccessLabel; }
  bool operator==(const FailureRecord&) const = default;
};

// Throws Error(EmptySubtask).
std::string make_query(std::string_view subtask_text);

std::string make_answer(const PerturbationConfig& config);
std::string make_success_answer();
// `mode` is a snake_case mode or "success"; success takes no parameters.
// Throws Error(ParamMismatch).
std::string make_answer(std::string_view mode, const Json& params);

// First 16 hex digits of SHA-256 over the canonical record key.
std::string failure_record_id(std::string_view task, std::uint64_t seed, const PerturbationConfig& config,
                              int subtask_index);
std::string success_record_id(std::string_view task, std::uint64_t seed, int subtask_index,
                              std::string_view paired_failure_id);

// Keys in the fixed order id, task, subtask_index, subtask_text, failure_mode,
// params, query, answer, image, viewpoints, keyframes_total, seed.
Json to_json(const FailureRecord& record);
// Strict: exactly the twelve keys with the right types. Throws
// Error(MalformedLine) with a description.
FailureRecord record_from_json(const Json& json);

// "Yes" iff success, "No," otherwise.
bool header_consistent(const FailureRecord& record);

}  // namespace failgen
