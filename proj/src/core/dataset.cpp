// SPDX-License-Identifier: Apache-2.0
#include "failgen/dataset.hpp"

#include <set>

#include "failgen/digest.hpp"
#include "failgen/error.hpp"

namespace fs = std::filesystem;

namespace failgen {

namespace {

void check_unique(const std::vector<FailureRecord>& records) {
  std::set<std::string_view> seen;
  for (const auto& r : records) {
    if (!seen.insert(r.id).second) throw Error(ErrorCode::DuplicateId, "duplicate record id '" + r.id + "'");
  }
}

}  // namespace

std::string serialize_records(const std::vector<FailureRecord>& records) {
  check_unique(records);
  std::string out;
  for (const auto& r : records) {
    out += to_json(r).dump();
    out += '\n';
  }
  return out;
}

std::vector<FailureRecord> parse_records(std::string_view text) {
  std::vector<FailureRecord> out;
  std::set<std::string> seen;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (line.empty()) continue;
    try {
      Json j = Json::parse(line);
      FailureRecord r = record_from_json(j);
      if (!seen.insert(r.id).second) {
        throw Error(ErrorCode::DuplicateId, "line " + std::to_string(line_no) + ": duplicate id '" + r.id + "'");
      }
      out.push_back(std::move(r));
    } catch (const Json::exception& e) {
      throw Error(ErrorCode::MalformedLine, "line " + std::to_string(line_no) + ": " + e.what());
    } catch (const Error& e) {
      if (e.code() != ErrorCode::MalformedLine) throw;
      throw Error(ErrorCode::MalformedLine, "line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

Json count_records(const std::vector<FailureRecord>& records) {
  std::map<std::string, std::map<std::string, std::size_t>> counts;
  for (const auto& r : records) ++counts[r.task][r.failure_mode];
  Json j = Json::object();
  for (const auto& [task, modes] : counts) {
    Json m = Json::object();
    for (const auto& [mode, n] : modes) m[mode] = n;
    j[task] = std::move(m);
  }
  return j;
}

Json write_records(const std::vector<FailureRecord>& records, const fs::path& out_dir, const Json& extra) {
  const std::string body = serialize_records(records);
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot create " + out_dir.string() + ": " + ec.message());
  write_file_atomic(out_dir / kRecordsFile, body);

  Json manifest = Json::object();
  manifest["generator"] = "failgen";
  manifest["generator_version"] = FAILGEN_VERSION;
  manifest["record_count"] = records.size();
  manifest["counts"] = count_records(records);
  manifest["dataset_digest"] = sha256_hex(body);
  for (const auto& [key, value] : extra.items()) manifest[key] = value;
  write_file_atomic(out_dir / kManifestFile, manifest.dump(2) + "\n");
  return manifest;
}

std::vector<FailureRecord> read_records(const fs::path& dir) {
  const fs::path file = dir / kRecordsFile;
  if (!fs::exists(file)) throw Error(ErrorCode::IoError, "missing " + file.string());
  return parse_records(read_file(file));
}

DatasetStats dataset_stats(const fs::path& dir) {
  const fs::path file = dir / kRecordsFile;
  if (!fs::is_regular_file(file)) throw Error(ErrorCode::MalformedDataset, "no " + std::string(kRecordsFile) + " in " + dir.string());
  std::vector<FailureRecord> records;
  try {
    records = parse_records(read_file(file));
  } catch (const Error& e) {
    throw Error(ErrorCode::MalformedDataset, e.what());
  }
  if (records.empty()) throw Error(ErrorCode::MalformedDataset, "dataset in " + dir.string() + " is empty");
  DatasetStats s;
  s.total = records.size();
  std::set<std::string> views;
  for (const auto& r : records) {
    ++s.per_task[r.task];
    ++s.per_mode[r.failure_mode];
    if (r.is_success()) ++s.success_count;
    for (const auto& v : r.viewpoints) {
      if (views.insert(v).second) s.viewpoints.push_back(v);
    }
  }
  s.success_ratio = static_cast<double>(s.success_count) / static_cast<double>(s.total);
  return s;
}

Json to_json(const DatasetStats& s) {
  Json j = Json::object();
  j["total"] = s.total;
  j["per_task"] = Json(s.per_task);
  j["per_mode"] = Json(s.per_mode);
  j["success_count"] = s.success_count;
  j["success_ratio"] = s.success_ratio;
  j["viewpoints"] = s.viewpoints;
  return j;
}

}  // namespace failgen
