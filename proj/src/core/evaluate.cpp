// SPDX-License-Identifier: Apache-2.0
#include "failgen/evaluate.hpp"

#include <cctype>
#include <mutex>
#include <set>

#include "failgen/digest.hpp"
#include "failgen/error.hpp"
#include "failgen/metrics.hpp"
#include "failgen/sweep.hpp"

namespace failgen {

namespace {

struct Accumulator {
  std::size_t count = 0;
  double rouge = 0.0;
  double cosine = 0.0;
  std::size_t binary_correct = 0;
  double fuzzy = 0.0;
  std::size_t fuzzy_scored = 0;
  std::size_t fuzzy_skipped = 0;
  std::size_t missing = 0;

  void add(const SampleScore& s) {
    ++count;
    if (s.missing) ++missing;
    if (s.rouge_l_f1) rouge += *s.rouge_l_f1;
    if (s.cosine) cosine += *s.cosine;
    if (s.binary_correct && *s.binary_correct) ++binary_correct;
    if (s.fuzzy) {
      fuzzy += *s.fuzzy;
      ++fuzzy_scored;
    }
    if (s.fuzzy_skipped) ++fuzzy_skipped;
  }

  Aggregate finish(const MetricSet& m) const {
    Aggregate a;
    a.count = count;
    a.missing = missing;
    a.fuzzy_scored = fuzzy_scored;
    a.fuzzy_skipped = fuzzy_skipped;
    if (count == 0) return a;
    const double n = static_cast<double>(count);
    if (m.rouge) a.rouge_l_f1 = rouge / n;
    if (m.cosine) a.cosine = cosine / n;
    if (m.binary) a.binary_success_rate = static_cast<double>(binary_correct) / n;
    if (m.fuzzy && fuzzy_scored > 0) a.fuzzy = fuzzy / static_cast<double>(fuzzy_scored);
    return a;
  }
};

Json optional_json(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

Json aggregate_json(const Aggregate& a) {
  Json j = Json::object();
  j["count"] = a.count;
  j["missing"] = a.missing;
  j["rouge_l_f1"] = optional_json(a.rouge_l_f1);
  j["cosine"] = optional_json(a.cosine);
  j["binary_success_rate"] = optional_json(a.binary_success_rate);
  j["fuzzy"] = optional_json(a.fuzzy);
  j["fuzzy_scored"] = a.fuzzy_scored;
  j["fuzzy_skipped"] = a.fuzzy_skipped;
  return j;
}

}  // namespace

MetricSet parse_metric_list(std::string_view text) {
  MetricSet m;
  std::size_t pos = 0;
  bool any = false;
  while (pos <= text.size()) {
    std::size_t end = text.find(',', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view name = text.substr(pos, end - pos);
    while (!name.empty() && std::isspace(static_cast<unsigned char>(name.front()))) name.remove_prefix(1);
    while (!name.empty() && std::isspace(static_cast<unsigned char>(name.back()))) name.remove_suffix(1);
    if (name == "rouge") {
      m.rouge = true;
    } else if (name == "cosine") {
      m.cosine = true;
    } else if (name == "binary") {
      m.binary = true;
    } else if (name == "fuzzy") {
      m.fuzzy = true;
    } else {
      throw Error(ErrorCode::InvalidArgument, "unknown metric '" + std::string(name) + "'");
    }
    any = true;
    pos = end + 1;
  }
  if (!any) throw Error(ErrorCode::InvalidArgument, "no metrics selected");
  return m;
}

Predictions parse_predictions(std::string_view text) {
  Predictions out;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (line.empty()) continue;
    const std::string where = "predictions line " + std::to_string(line_no) + ": ";
    Json j;
    try {
      j = Json::parse(line);
    } catch (const Json::exception& e) {
      throw Error(ErrorCode::MalformedLine, where + e.what());
    }
    if (!j.is_object() || j.size() != 2 || !j.contains("id") || !j.contains("response") || !j["id"].is_string() ||
        !j["response"].is_string()) {
      throw Error(ErrorCode::MalformedLine, where + "expected {\"id\": string, \"response\": string}");
    }
    auto id = j["id"].get<std::string>();
    if (!out.emplace(id, j["response"].get<std::string>()).second) {
      throw Error(ErrorCode::DuplicateId, where + "duplicate id '" + id + "'");
    }
  }
  return out;
}

Predictions read_predictions(const std::filesystem::path& path) { return parse_predictions(read_file(path)); }

MetricReport evaluate_dataset(const std::vector<FailureRecord>& records, const Predictions& predictions,
                              const EvaluateOptions& options) {
  std::set<std::string_view> ids;
  for (const auto& r : records) ids.insert(r.id);
  for (const auto& [id, response] : predictions) {
    (void)response;
    if (!ids.contains(id)) throw Error(ErrorCode::UnknownRecordId, "prediction for unknown record id '" + id + "'");
  }
  const MetricSet& m = options.metrics;
  if (m.fuzzy && options.judge == nullptr) throw Error(ErrorCode::JudgeUnavailable, "fuzzy metric needs a judge");

  MetricReport report;
  report.metrics = m;
  report.samples.resize(records.size());
  std::mutex embed_mutex;
  const unsigned workers = m.fuzzy ? options.judge->options().concurrency : options.jobs;

  parallel_for(records.size(), workers, [&](std::size_t i) {
    const FailureRecord& r = records[i];
    SampleScore& s = report.samples[i];
    s.id = r.id;
    s.failure_mode = r.failure_mode;
    auto it = predictions.find(r.id);
    if (it == predictions.end()) {
      s.missing = true;
      if (m.rouge) s.rouge_l_f1 = 0.0;
      if (m.cosine) s.cosine = 0.0;
      if (m.binary) s.binary_correct = false;
      if (m.fuzzy) s.fuzzy = 0.0;
      return;
    }
    const std::string& prediction = it->second;
    if (m.rouge) s.rouge_l_f1 = rouge_l(prediction, r.answer).f1;
    if (m.cosine) {
      if (options.embedder != nullptr) {
        std::lock_guard lock(embed_mutex);
        s.cosine = cosine_similarity(prediction, r.answer, *options.embedder);
      } else {
        s.cosine = cosine_similarity(std::string_view(prediction), std::string_view(r.answer));
      }
    }
    if (m.binary) {
      const BinaryAnswer truth = r.is_success() ? BinaryAnswer::Yes : BinaryAnswer::No;
      s.binary_correct = parse_binary(prediction) == truth;
    }
    if (m.fuzzy) {
      try {
        s.fuzzy = options.judge->score(prediction, r.answer);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::MalformedJudgeReply && e.code() != ErrorCode::JudgeUnavailable) throw;
        s.fuzzy_skipped = true;
      }
    }
  });

  Accumulator all;
  std::map<std::string, Accumulator> modes;
  for (const auto& s : report.samples) {
    all.add(s);
    modes[s.failure_mode].add(s);
  }
  report.overall = all.finish(m);
  for (const auto& [mode, acc] : modes) report.per_mode[mode] = acc.finish(m);
  return report;
}

Json to_json(const MetricReport& report) {
  Json j = Json::object();
  Json metrics = Json::array();
  if (report.metrics.rouge) metrics.push_back("rouge");
  if (report.metrics.cosine) metrics.push_back("cosine");
  if (report.metrics.binary) metrics.push_back("binary");
  if (report.metrics.fuzzy) metrics.push_back("fuzzy");
  j["metrics"] = metrics;
  j["aggregate"] = aggregate_json(report.overall);
  Json per_mode = Json::object();
  for (const auto& [mode, a] : report.per_mode) per_mode[mode] = aggregate_json(a);
  j["per_mode"] = per_mode;
  Json samples = Json::array();
  for (const auto& s : report.samples) {
    Json o = Json::object();
    o["id"] = s.id;
    o["failure_mode"] = s.failure_mode;
    o["missing"] = s.missing;
    o["rouge_l_f1"] = optional_json(s.rouge_l_f1);
    o["cosine"] = optional_json(s.cosine);
    o["binary_correct"] = s.binary_correct ? Json(*s.binary_correct) : Json(nullptr);
    o["fuzzy"] = optional_json(s.fuzzy);
    o["fuzzy_skipped"] = s.fuzzy_skipped;
    samples.push_back(std::move(o));
  }
  j["samples"] = samples;
  return j;
}

}  // namespace failgen
