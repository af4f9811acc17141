// SPDX-License-Identifier: Apache-2.0
//
// Sweep and single-perturbation configuration documents (YAML), plus the JSON
// form of perturbation parameters stored in dataset records.
#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "failgen/json.hpp"
#include "failgen/perturb.hpp"

namespace failgen {

struct SweepGrids {
  std::vector<double> translation_offsets_m;
  std::vector<double> rotation_angles_rad;
  std::vector<double> slip_fractions;
  bool operator==(const SweepGrids&) const = default;
};

struct SweepSpec {
  std::vector<std::string> tasks;
  std::vector<FailureMode> modes;
  std::vector<std::uint64_t> seeds;
  SweepGrids grids;
  double success_sample_ratio = 0.125;

  // All six tasks, all seven modes, seeds 0..9, default grids.
  static SweepSpec defaults();
  static SweepGrids default_grids();

  // Throws Error(EmptyGrid) for an empty grid of an enabled mode and
  // Error(SchemaError) for out-of-range values.
  void validate() const;
  bool operator==(const SweepSpec&) const = default;
};

// Strict parse: unknown keys are rejected with their line number. Omitted
// grids, seeds and ratio take the defaults; `all` expands to every task/mode.
SweepSpec parse_sweep_spec(std::string_view text);
SweepSpec load_sweep_spec(const std::filesystem::path& path);

struct PerturbationDocument {
  std::optional<std::string> task;
  std::optional<std::uint64_t> seed;
  PerturbationConfig config;
};

PerturbationDocument parse_perturbation_config(std::string_view text);
PerturbationDocument load_perturbation_config(const std::filesystem::path& path);

Json to_json(const SweepSpec& spec);

// Mode-specific parameters, e.g. {"keyframe": 2, "axis": "roll", "angle_rad": 1.047}.
Json params_to_json(const PerturbationConfig& config);
// Throws Error(ParamMismatch) when keys are missing, extra or ill-typed.
PerturbationConfig config_from_params(FailureMode mode, const Json& params);

// Stable text key used for ids and ordering.
std::string canonical_key(const PerturbationConfig& config);

}  // namespace failgen
