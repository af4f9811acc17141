// SPDX-License-Identifier: Apache-2.0
//
// End-to-end operations: dataset generation, validation and single demos.
#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "failgen/config.hpp"
#include "failgen/executor.hpp"
#include "failgen/qa.hpp"
#include "failgen/render.hpp"
#include "failgen/sweep.hpp"

namespace failgen {

struct GenerateOptions {
  unsigned jobs = 1;
  bool png = false;  // also write a .png next to every .ppm
  std::string command;  // echoed in the manifest
};

struct GenerateSummary {
  std::size_t failure_count = 0;
  std::size_t success_count = 0;
  std::size_t image_count = 0;
  std::string dataset_digest;
  std::string images_digest;
};

// Number of success samples paired with `failures` failure records so that
// successes make up `ratio` of the dataset.
std::size_t success_quota(std::size_t failures, double ratio);

// Failure records for the candidates plus the success samples, sorted by id.
std::vector<FailureRecord> build_records(const SweepSpec& spec, const std::vector<FailureCandidate>& candidates);

GenerateSummary generate(const SweepSpec& spec, const std::filesystem::path& out_dir,
                         const GenerateOptions& options = {});

// Digest over the sorted (relative path, SHA-256) list of files in images/.
std::string images_digest(const std::filesystem::path& dataset_dir, std::size_t* count = nullptr);

struct RecordProblem {
  std::string id;
  int line = 0;
  std::vector<std::string> problems;
};

struct ValidationReport {
  std::size_t checked = 0;
  std::vector<RecordProblem> failures;
  bool ok() const { return failures.empty(); }
};

// Re-executes every record and checks failure, attribution, header, text,
// image geometry and pixels. Throws Error(MalformedDataset) when the dataset
// cannot be read at all.
ValidationReport validate_dataset(const std::filesystem::path& dir, unsigned jobs = 1);

struct DemoResult {
  std::string task;
  std::uint64_t seed = 0;
  std::optional<PerturbationConfig> config;
  Trajectory trajectory;
  ExecutionTrace trace;
  bool success = false;
  std::optional<int> first_failing;
  std::optional<int> intended_subtask;
  std::string answer;

  // Sub-task shown by the image grid: the first failing one, else the last.
  int focus_subtask() const;
  // "SUCCESS: ..." or "FAIL at sub-task k: <answer>".
  std::string summary() const;
};

DemoResult run_demo(const std::string& task, std::uint64_t seed, const std::optional<PerturbationConfig>& config);
Image demo_grid(const DemoResult& result);

}  // namespace failgen
