// SPDX-License-Identifier: Apache-2.0
#include "failgen/error.hpp"

#include <array>

namespace failgen {

namespace {

constexpr std::array<std::string_view, 29> kNames = {
    "Ok",
    "InvalidArgument",
    "TrajectoryTooShort",
    "InvalidSegmentIndex",
    "UnknownObjectId",
    "PlanMismatch",
    "UnknownTask",
    "NotAGraspKeyframe",
    "NoFollowingSegment",
    "ZeroOffset",
    "ZeroAngle",
    "FirstKeyframe",
    "GroupsOverlap",
    "UnorderedTask",
    "NoAnchoredKeyframes",
    "InvalidDistractor",
    "EmptyGrid",
    "SchemaError",
    "EmptySubtask",
    "ParamMismatch",
    "DuplicateId",
    "IoError",
    "MalformedLine",
    "MalformedDataset",
    "SubtaskOutOfRange",
    "UnknownRecordId",
    "JudgeUnavailable",
    "MalformedJudgeReply",
    "Internal",
};

}  // namespace

std::string_view error_code_name(ErrorCode code) noexcept {
  const auto i = static_cast<std::size_t>(code);
  return i < kNames.size() ? kNames[i] : std::string_view("Unknown");
}

}  // namespace failgen
