// SPDX-License-Identifier: Apache-2.0
//
// Dataset-level scoring of model predictions against record answers.
#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "failgen/judge.hpp"
#include "failgen/json.hpp"
#include "failgen/qa.hpp"

namespace failgen {

struct MetricSet {
  bool rouge = false;
  bool cosine = false;
  bool binary = false;
  bool fuzzy = false;
  bool operator==(const MetricSet&) const = default;
};

// Comma-separated subset of rouge,cosine,binary,fuzzy. Throws
// Error(InvalidArgument).
MetricSet parse_metric_list(std::string_view text);

using Predictions = std::map<std::string, std::string>;

// JSONL of {"id", "response"}. Throws Error(MalformedLine), Error(DuplicateId).
Predictions parse_predictions(std::string_view text);
Predictions read_predictions(const std::filesystem::path& path);

struct SampleScore {
  std::string id;
  std::string failure_mode;
  bool missing = false;
  std::optional<double> rouge_l_f1;
  std::optional<double> cosine;
  std::optional<bool> binary_correct;
  std::optional<double> fuzzy;
  bool fuzzy_skipped = false;
};

struct Aggregate {
  std::size_t count = 0;
  std::optional<double> rouge_l_f1;
  std::optional<double> cosine;
  std::optional<double> binary_success_rate;
  std::optional<double> fuzzy;
  std::size_t fuzzy_scored = 0;
  std::size_t fuzzy_skipped = 0;
  std::size_t missing = 0;
};

struct MetricReport {
  MetricSet metrics;
  std::vector<SampleScore> samples;  // record order
  Aggregate overall;
  std::map<std::string, Aggregate> per_mode;
};

struct EvaluateOptions {
  MetricSet metrics;
  const JudgeClient* judge = nullptr;  // required when metrics.fuzzy
  Embedder* embedder = nullptr;        // count-vector cosine when null
  unsigned jobs = 1;
};

// Missing predictions score zero and are flagged. Throws
// Error(UnknownRecordId) for predictions that match no record and
// Error(JudgeUnavailable) when fuzzy is requested without a judge.
MetricReport evaluate_dataset(const std::vector<FailureRecord>& records, const Predictions& predictions,
                              const EvaluateOptions& options);

Json to_json(const MetricReport& report);

}  // namespace failgen
