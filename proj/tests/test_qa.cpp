// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <set>

#include "failgen/config.hpp"
#include "failgen/digest.hpp"
#include "failgen/error.hpp"
#include "failgen/qa.hpp"

using namespace failgen;

namespace {

FailureRecord sample_record() {
  FailureRecord r;
  r.id = "0123456789abcdef";
  r.task = "pick_up_cube";
  r.subtask_index = 1;
  r.subtask_text = "closing the gripper to grasp the red cube";
  r.failure_mode = "no_grasp";
  r.params = params_to_json({NoGraspParams{2}});
  r.query = make_query(r.subtask_text);
  r.answer = make_answer({NoGraspParams{2}});
  r.image = "images/x.ppm";
  r.viewpoints = {"front", "overhead", "left"};
  r.keyframes_total = 4;
  r.seed = 7;
  return r;
}

}  // namespace

TEST(Digest, KnownSha256Vectors) {
  EXPECT_EQ(sha256_hex(""), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(Query, ExactTemplate) {
  EXPECT_EQ(make_query("lifting the red cube"),
            "The robot is currently lifting the red cube. For the given sub-tasks, first determine it has "
            "succeed by choosing from [\"yes\", \"no\"] and then explain the reason why the current sub-tasks "
            "has failed.");
  try {
    make_query("");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::EmptySubtask);
  }
}

TEST(Query, InjectiveOverSubtaskTexts) {
  std::set<std::string> queries;
  const std::vector<std::string> texts = {"a", "b", "a b", "ab", "lifting", "lifting the cube"};
  for (const auto& t : texts) queries.insert(make_query(t));
  EXPECT_EQ(queries.size(), texts.size());
}

TEST(Answer, FixedSentencesPerMode) {
  EXPECT_EQ(make_answer({NoGraspParams{2}}), "No, the gripper failed to close and did not grasp the object.");
  EXPECT_EQ(make_answer({SlipParams{2, 0.5}}), "No, the object slipped from the gripper after grasping.");
  EXPECT_EQ(make_answer({TranslationParams{2, Axis::Y, 0.05}}),
            "No, the gripper moved to a position offset along the y axis.");
  EXPECT_EQ(make_answer({RotationParams{2, RotationAxis::Roll, 1.0}}),
            "No, the robot gripper rotated with an incorrect roll angle.");
  EXPECT_EQ(make_answer({NoRotationParams{2, RotationAxis::Pitch}}),
            "No, the gripper failed to rotate to the required pitch angle.");
  EXPECT_EQ(make_answer({WrongActionParams{0, 1}}), "No, the robot performed the actions in the wrong order.");
  EXPECT_EQ(make_answer({WrongObjectParams{"a", "b"}}), "No, the robot acted on the wrong target object.");
  EXPECT_EQ(make_success_answer(), "Yes.");
}

TEST(Answer, FromModeAndParams) {
  EXPECT_EQ(make_answer("translation", Json::parse(R"({"keyframe":1,"axis":"z","offset_m":0.1})")),
            "No, the gripper moved to a position offset along the z axis.");
  EXPECT_EQ(make_answer("success", Json::object()), "Yes.");
  for (const char* bad : {R"({"keyframe":1})", "[]"}) {
    try {
      make_answer("success", Json::parse(bad));
      FAIL() << bad;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::ParamMismatch);
    }
  }
  EXPECT_THROW(make_answer("no_grasp", Json::parse(R"({"offset_m":1})")), Error);
}

TEST(Ids, HashOfCanonicalKey) {
  const PerturbationConfig c{RotationParams{2, RotationAxis::Roll, 1.047}};
  const std::string expected =
      sha256_hex(std::string("pick_up_cube|3|rotation|") + R"({"keyframe":2,"axis":"roll","angle_rad":1.047})" + "|1")
          .substr(0, 16);
  EXPECT_EQ(failure_record_id("pick_up_cube", 3, c, 1), expected);
  EXPECT_EQ(failure_record_id("pick_up_cube", 3, c, 1).size(), 16U);
  EXPECT_NE(failure_record_id("pick_up_cube", 3, c, 1), failure_record_id("pick_up_cube", 4, c, 1));
  EXPECT_NE(failure_record_id("pick_up_cube", 3, c, 1), failure_record_id("pick_up_cube", 3, c, 0));
  const std::string s = success_record_id("pick_up_cube", 3, 1, expected);
  EXPECT_EQ(s, sha256_hex("pick_up_cube|3|success|" + expected + "|1").substr(0, 16));
  EXPECT_NE(s, success_record_id("pick_up_cube", 3, 1, "ffffffffffffffff"));
}

TEST(Record, JsonKeyOrderAndRoundTrip) {
  const FailureRecord r = sample_record();
  const Json j = to_json(r);
  std::vector<std::string> keys;
  for (auto it = j.begin(); it != j.end(); ++it) keys.push_back(it.key());
  EXPECT_EQ(keys, (std::vector<std::string>{"id", "task", "subtask_index", "subtask_text", "failure_mode", "params",
                                            "query", "answer", "image", "viewpoints", "keyframes_total", "seed"}));
  EXPECT_EQ(record_from_json(Json::parse(j.dump())), r);
}

TEST(Record, StrictParsing) {
  const Json good = to_json(sample_record());
  auto expect_malformed = [](const Json& j) {
    try {
      record_from_json(j);
      FAIL() << j.dump();
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::MalformedLine);
    }
  };
  Json extra = good;
  extra["note"] = "x";
  expect_malformed(extra);
  Json missing = good;
  missing.erase("seed");
  expect_malformed(missing);
  Json wrong_type = good;
  wrong_type["subtask_index"] = "1";
  expect_malformed(wrong_type);
  expect_malformed(Json::array());
}

TEST(Record, HeaderConsistency) {
  FailureRecord r = sample_record();
  EXPECT_TRUE(header_consistent(r));
  r.answer = "Yes.";
  EXPECT_FALSE(header_consistent(r));
  r.failure_mode = "success";
  EXPECT_TRUE(header_consistent(r));
  r.answer = "No, nothing.";
  EXPECT_FALSE(header_consistent(r));
}
