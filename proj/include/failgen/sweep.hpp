// SPDX-License-Identifier: Apache-2.0
//
// Enumerates (task x seed x mode x keyframe x parameter) perturbations,
// executes each one and keeps the candidates that fail for the intended reason.
#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "failgen/config.hpp"
#include "failgen/executor.hpp"
#include "failgen/perturb.hpp"

namespace failgen {

struct SweepItem {
  std::string task;
  std::uint64_t seed = 0;
  PerturbationConfig config;
  bool operator==(const SweepItem&) const = default;
};

struct FailureCandidate {
  std::string task;
  std::uint64_t seed = 0;
  PerturbationConfig config;
  Trajectory trajectory;
  PerturbationEvents events;
  int attributed_subtask = 0;
  ExecutionTrace trace;  // keyframe snapshots and terminal world only
};

struct SweepOptions {
  unsigned jobs = 1;
  int steps_per_segment = kDefaultStepsPerSegment;
};

// Result of executing one perturbation.
struct PerturbationOutcome {
  PerturbedDemo perturbed;
  ExecutionTrace trace;
  bool task_succeeded = false;
  std::optional<int> first_failing;
  int intended_subtask = 0;

  bool kept() const { return !task_succeeded && first_failing == intended_subtask; }
};

PerturbationOutcome run_perturbation(const TaskSpec& task, const Demo& demo, const PerturbationConfig& config,
                                     int steps_per_segment = kDefaultStepsPerSegment);

// Every applicable combination in canonical order (task name, seed, mode,
// keyframe, parameter index). Parameters that violate an operator
// precondition (zero offsets or angles) are skipped. Throws UnknownTask /
// EmptyGrid.
std::vector<SweepItem> enumerate_sweep(const SweepSpec& spec);

std::vector<FailureCandidate> sweep(const SweepSpec& spec, const SweepOptions& options = {});

// Runs fn(i) for i in [0, count) on up to `jobs` threads.
void parallel_for(std::size_t count, unsigned jobs, const std::function<void(std::size_t)>& fn);

}  // namespace failgen
