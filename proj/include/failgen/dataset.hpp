// SPDX-License-Identifier: Apache-2.0
//
// On-disk dataset: dataset.jsonl, images/ and manifest.json.
#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "failgen/json.hpp"
#include "failgen/qa.hpp"

namespace failgen {

inline constexpr const char* kRecordsFile = "dataset.jsonl";
inline constexpr const char* kManifestFile = "manifest.json";
inline constexpr const char* kImagesDir = "images";

std::string serialize_records(const std::vector<FailureRecord>& records);
// Throws Error(MalformedLine) naming the 1-based line, Error(DuplicateId).
std::vector<FailureRecord> parse_records(std::string_view text);

// Writes records in the given order plus a manifest with counts per
// (task, mode); `extra` members are merged into the manifest. Returns the
// manifest. Throws Error(DuplicateId), Error(IoError).
Json write_records(const std::vector<FailureRecord>& records, const std::filesystem::path& out_dir,
                   const Json& extra = Json::object());
std::vector<FailureRecord> read_records(const std::filesystem::path& dir);

Json count_records(const std::vector<FailureRecord>& records);

struct DatasetStats {
  std::size_t total = 0;
  std::map<std::string, std::size_t> per_task;
  std::map<std::string, std::size_t> per_mode;
  std::size_t success_count = 0;
  double success_ratio = 0.0;
  std::vector<std::string> viewpoints;
};

// Throws Error(MalformedDataset) for a missing or empty dataset.
DatasetStats dataset_stats(const std::filesystem::path& dir);
Json to_json(const DatasetStats& stats);

}  // namespace failgen
