// SPDX-License-Identifier: Apache-2.0
#include "failgen/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <map>
#include <mutex>
#include <thread>

#include "failgen/error.hpp"

namespace failgen {

void parallel_for(std::size_t count, unsigned jobs, const std::function<void(std::size_t)>& fn) {
  const std::size_t workers = std::min<std::size_t>(std::max(1U, jobs), count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> threads;
  threads.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    threads.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
          next = count;
        }
      }
    });
  }
  for (auto& t : threads) t.join();
  if (failure) std::rethrow_exception(failure);
}

PerturbationOutcome run_perturbation(const TaskSpec& task, const Demo& demo, const PerturbationConfig& config,
                                     int steps_per_segment) {
  PerturbationOutcome out;
  out.intended_subtask = perturbed_subtask(demo.trajectory, task, config);
  out.perturbed = apply_perturbation(demo, task, config);
  out.trace = execute(demo.world, out.perturbed.trajectory, out.perturbed.events,
                      {.steps_per_segment = steps_per_segment, .record_steps = false});
  out.task_succeeded = eval_predicate(out.trace.terminal, task.success);
  out.first_failing = first_failing_subtask(out.trace, task.checkpoints);
  return out;
}

std::vector<SweepItem> enumerate_sweep(const SweepSpec& spec) {
  spec.validate();
  std::vector<std::string> tasks = spec.tasks;
  std::sort(tasks.begin(), tasks.end());
  tasks.erase(std::unique(tasks.begin(), tasks.end()), tasks.end());
  std::vector<std::uint64_t> seeds = spec.seeds;
  std::sort(seeds.begin(), seeds.end());
  std::vector<FailureMode> modes = spec.modes;
  std::sort(modes.begin(), modes.end());

  std::vector<SweepItem> items;
  for (const auto& name : tasks) {
    const TaskSpec& task = build_task(name);
    for (std::uint64_t seed : seeds) {
      const Demo demo = nominal_demo(task, seed);
      const auto& kfs = demo.trajectory.keyframes;
      const int n = static_cast<int>(kfs.size());
      auto push = [&](PerturbationParams p) { items.push_back({name, seed, {std::move(p)}}); };
      for (FailureMode mode : modes) {
        switch (mode) {
          case FailureMode::NoGrasp:
            for (int k = 1; k < n; ++k) {
              if (kfs[k].gripper_command == GripperCommand::Close) push(NoGraspParams{k});
            }
            break;
          case FailureMode::Slip:
            for (int k = 1; k + 1 < n; ++k) {
              if (kfs[k].gripper_command != GripperCommand::Close) continue;
              for (double f : spec.grids.slip_fractions) push(SlipParams{k, f});
            }
            break;
          case FailureMode::Translation:
            for (int k = 1; k < n; ++k) {
              for (Axis a : {Axis::X, Axis::Y, Axis::Z}) {
                for (double off : spec.grids.translation_offsets_m) {
                  if (off != 0.0) push(TranslationParams{k, a, off});
                }
              }
            }
            break;
          case FailureMode::Rotation:
            for (int k = 1; k < n; ++k) {
              for (RotationAxis a : {RotationAxis::Roll, RotationAxis::Pitch, RotationAxis::Yaw}) {
                for (double ang : spec.grids.rotation_angles_rad) {
                  if (ang != 0.0) push(RotationParams{k, a, ang});
                }
              }
            }
            break;
          case FailureMode::NoRotation:
            for (int k = 1; k < n; ++k) {
              for (RotationAxis a : {RotationAxis::Roll, RotationAxis::Pitch, RotationAxis::Yaw}) {
                push(NoRotationParams{k, a});
              }
            }
            break;
          case FailureMode::WrongAction: {
            const int groups = static_cast<int>(task.ordered_groups.size());
            for (int i = 0; i < groups; ++i) {
              for (int j = i + 1; j < groups; ++j) push(WrongActionParams{i, j});
            }
            break;
          }
          case FailureMode::WrongObject:
            for (const auto& [target, distractors] : task.distractor_map) {
              const bool anchored = std::any_of(kfs.begin(), kfs.end(), [&](const Keyframe& kf) {
                return kf.anchor && kf.anchor->object_id == target;
              });
              if (!anchored) continue;
              for (const auto& d : distractors) push(WrongObjectParams{target, d});
            }
            break;
        }
      }
    }
  }
  return items;
}

std::vector<FailureCandidate> sweep(const SweepSpec& spec, const SweepOptions& options) {
  const std::vector<SweepItem> items = enumerate_sweep(spec);

  std::map<std::pair<std::string, std::uint64_t>, Demo> demos;
  for (const auto& item : items) {
    auto key = std::make_pair(item.task, item.seed);
    if (!demos.contains(key)) demos.emplace(key, nominal_demo(build_task(item.task), item.seed));
  }

  std::vector<std::optional<FailureCandidate>> results(items.size());
  parallel_for(items.size(), options.jobs, [&](std::size_t i) {
    const SweepItem& item = items[i];
    const TaskSpec& task = build_task(item.task);
    const Demo& demo = demos.at({item.task, item.seed});
    PerturbationOutcome outcome = run_perturbation(task, demo, item.config, options.steps_per_segment);
    if (!outcome.kept()) return;
    results[i] = FailureCandidate{item.task,
                                  item.seed,
                                  item.config,
                                  std::move(outcome.perturbed.trajectory),
                                  std::move(outcome.perturbed.events),
                                  outcome.intended_subtask,
                                  std::move(outcome.trace)};
  });

  std::vector<FailureCandidate> out;
  for (auto& r : results) {
    if (r) out.push_back(std::move(*r));
  }
  return out;
}

}  // namespace failgen
