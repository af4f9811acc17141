// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace failgen {

// Numeric values are part of the C ABI (see failgen.h); append only.
enum class ErrorCode : int {
  Ok = 0,
  InvalidArgument = 1,
  TrajectoryTooShort = 2,
  InvalidSegmentIndex = 3,
  UnknownObjectId = 4,
  PlanMismatch = 5,
  UnknownTask = 6,
  NotAGraspKeyframe = 7,
  NoFollowingSegment = 8,
  ZeroOffset = 9,
  ZeroAngle = 10,
  FirstKeyframe = 11,
  GroupsOverlap = 12,
  UnorderedTask = 13,
  NoAnchoredKeyframes = 14,
  InvalidDistractor = 15,
  EmptyGrid = 16,
  SchemaError = 17,
  EmptySubtask = 18,
  ParamMismatch = 19,
  DuplicateId = 20,
  IoError = 21,
  MalformedLine = 22,
  MalformedDataset = 23,
  SubtaskOutOfRange = 24,
  UnknownRecordId = 25,
  JudgeUnavailable = 26,
  MalformedJudgeReply = 27,
  Internal = 28,
};

std::string_view error_code_name(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace failgen
