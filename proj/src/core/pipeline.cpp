// SPDX-License-Identifier: Apache-2.0
#include "failgen/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <map>
#include <mutex>
#include <set>

#include "failgen/checkers.hpp"
#include "failgen/dataset.hpp"
#include "failgen/digest.hpp"
#include "failgen/error.hpp"
#include "failgen/tasks.hpp"

namespace fs = std::filesystem;

namespace failgen {

namespace {

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string success_image_path(const std::string& task, std::uint64_t seed, int subtask) {
  return std::string(kImagesDir) + "/success-" + task + "-s" + std::to_string(seed) + "-t" + std::to_string(subtask) +
         ".ppm";
}

using DemoKey = std::pair<std::string, std::uint64_t>;

struct NominalRun {
  Demo demo;
  ExecutionTrace trace;
};

NominalRun run_nominal(const std::string& task, std::uint64_t seed) {
  const TaskSpec& spec = build_task(task);
  NominalRun n{nominal_demo(spec, seed), {}};
  n.trace = execute(n.demo.world, n.demo.trajectory, {}, {.record_steps = false});
  return n;
}

// Pixel-exact re-render comparison plus the white-column geometry rules.
void check_image(const fs::path& dir, const FailureRecord& r, const std::vector<World>& snapshots, int total,
                 std::vector<std::string>& problems) {
  const fs::path path = dir / r.image;
  if (r.image.empty() || fs::path(r.image).is_absolute() || r.image.find("..") != std::string::npos) {
    problems.push_back("image path '" + r.image + "' is not inside the dataset");
    return;
  }
  Image img;
  try {
    img = read_ppm(path);
  } catch (const Error& e) {
    problems.push_back(std::string("image unreadable: ") + e.what());
    return;
  }
  const auto& cams = default_cameras();
  const int rows = static_cast<int>(cams.size());
  if (img.width != total * kTileSize || img.height != rows * kTileSize) {
    problems.push_back("image is " + std::to_string(img.width) + "x" + std::to_string(img.height) + ", expected " +
                       std::to_string(total * kTileSize) + "x" + std::to_string(rows * kTileSize));
    return;
  }
  for (int c = r.subtask_index + 1; c < total; ++c) {
    if (!tile_is_uniform(img, c * kTileSize, 0, kTileSize, img.height, kWhite)) {
      problems.push_back("column " + std::to_string(c) + " beyond the sub-task is not white");
    }
  }
  for (int c = 0; c <= r.subtask_index; ++c) {
    for (int row = 0; row < rows; ++row) {
      if (tile_is_uniform(img, c * kTileSize, row * kTileSize, kTileSize, kTileSize, kWhite)) {
        problems.push_back("tile (" + std::to_string(row) + ", " + std::to_string(c) + ") is blank");
      }
    }
  }
  if (problems.empty() && compose_grid(snapshots, r.subtask_index, cams, total) != img) {
    problems.push_back("image pixels differ from a re-render of the trace");
  }
}

}  // namespace

std::size_t success_quota(std::size_t failures, double ratio) {
  if (!(ratio > 0.0) || failures == 0) return 0;
  if (ratio >= 1.0) return failures;
  const double s = std::round(ratio / (1.0 - ratio) * static_cast<double>(failures));
  return std::min(failures, static_cast<std::size_t>(s));
}

std::vector<FailureRecord> build_records(const SweepSpec& spec, const std::vector<FailureCandidate>& candidates) {
  const std::vector<std::string> views = camera_names(default_cameras());
  std::vector<FailureRecord> records;
  records.reserve(candidates.size());
  for (const auto& c : candidates) {
    FailureRecord r;
    const int t = c.attributed_subtask;
    r.id = failure_record_id(c.task, c.seed, c.config, t);
    r.task = c.task;
    r.subtask_index = t;
    r.subtask_text = c.trajectory.subtask_texts.at(static_cast<std::size_t>(t));
    r.failure_mode = std::string(to_string(c.config.mode()));
    r.params = params_to_json(c.config);
    r.query = make_query(r.subtask_text);
    r.answer = make_answer(c.config);
    r.image = std::string(kImagesDir) + "/" + r.id + ".ppm";
    r.viewpoints = views;
    r.keyframes_total = static_cast<int>(c.trajectory.keyframes.size());
    r.seed = c.seed;
    records.push_back(std::move(r));
  }

  // Success samples: the highest-ranked failures (by a keyed hash) each get a
  // paired record for the unperturbed demo at the same sub-task.
  const std::size_t quota = success_quota(records.size(), spec.success_sample_ratio);
  std::vector<std::pair<std::string, std::size_t>> ranked;
  for (std::size_t i = 0; i < records.size(); ++i) {
    ranked.emplace_back(sha256_hex("success-sample|" + records[i].id), i);
  }
  std::sort(ranked.begin(), ranked.end());
  std::map<DemoKey, Demo> demos;
  for (std::size_t k = 0; k < quota; ++k) {
    const FailureRecord& f = records[ranked[k].second];
    const DemoKey key{f.task, f.seed};
    if (!demos.contains(key)) demos.emplace(key, nominal_demo(build_task(f.task), f.seed));
    const Trajectory& nominal = demos.at(key).trajectory;
    FailureRecord s;
    s.id = success_record_id(f.task, f.seed, f.subtask_index, f.id);
    s.task = f.task;
    s.subtask_index = f.subtask_index;
    s.subtask_text = nominal.subtask_texts.at(static_cast<std::size_t>(f.subtask_index));
    s.failure_mode = std::string(kSuccessLabel);
    s.params = Json::object();
    s.query = make_query(s.subtask_text);
    s.answer = make_success_answer();
    s.image = success_image_path(f.task, f.seed, f.subtask_index);
    s.viewpoints = views;
    s.keyframes_total = static_cast<int>(nominal.keyframes.size());
    s.seed = f.seed;
    records.push_back(std::move(s));
  }
  std::sort(records.begin(), records.end(), [](const FailureRecord& a, const FailureRecord& b) { return a.id < b.id; });
  return records;
}

GenerateSummary generate(const SweepSpec& spec, const fs::path& out_dir, const GenerateOptions& options) {
  const std::string started = utc_now();
  const std::vector<FailureCandidate> candidates = sweep(spec, {.jobs = options.jobs});
  const std::vector<FailureRecord> records = build_records(spec, candidates);

  std::error_code ec;
  fs::create_directories(out_dir / kImagesDir, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot create " + (out_dir / kImagesDir).string() + ": " + ec.message());

  // One render job per distinct image.
  struct ImageJob {
    std::string path;
    const FailureCandidate* candidate = nullptr;
    DemoKey nominal;
    int subtask = 0;
  };
  std::map<std::string, std::size_t> by_id;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    by_id[failure_record_id(candidates[i].task, candidates[i].seed, candidates[i].config,
                            candidates[i].attributed_subtask)] = i;
  }
  std::vector<ImageJob> jobs;
  std::set<std::string> seen;
  std::map<DemoKey, NominalRun> nominal;
  for (const auto& r : records) {
    if (!seen.insert(r.image).second) continue;
    if (r.is_success()) {
      const DemoKey key{r.task, r.seed};
      if (!nominal.contains(key)) nominal.emplace(key, run_nominal(r.task, r.seed));
      jobs.push_back({r.image, nullptr, key, r.subtask_index});
    } else {
      jobs.push_back({r.image, &candidates[by_id.at(r.id)], {}, r.subtask_index});
    }
  }

  const auto& cams = default_cameras();
  parallel_for(jobs.size(), options.jobs, [&](std::size_t i) {
    const ImageJob& job = jobs[i];
    const ExecutionTrace& trace = job.candidate ? job.candidate->trace : nominal.at(job.nominal).trace;
    const int total = static_cast<int>(trace.keyframe_snapshots.size()) - 1;
    const Image grid = compose_grid(trace.keyframe_snapshots, job.subtask, cams, total);
    write_image(out_dir / job.path, grid);
    if (options.png && png_supported()) {
      fs::path png = out_dir / job.path;
      png.replace_extension(".png");
      write_image(png, grid);
    }
  });

  GenerateSummary summary;
  summary.failure_count = candidates.size();
  summary.success_count = records.size() - candidates.size();
  summary.images_digest = images_digest(out_dir, &summary.image_count);

  Json run = Json::object();
  run["command"] = options.command;
  run["seeds"] = spec.seeds;
  run["started_at"] = started;
  run["finished_at"] = utc_now();
  run["image_count"] = summary.image_count;
  run["images_digest"] = summary.images_digest;
  Json extra = Json::object();
  extra["failure_count"] = summary.failure_count;
  extra["success_count"] = summary.success_count;
  extra["spec"] = to_json(spec);
  extra["run"] = run;
  const Json manifest = write_records(records, out_dir, extra);
  summary.dataset_digest = manifest.at("dataset_digest").get<std::string>();
  return summary;
}

std::string images_digest(const fs::path& dataset_dir, std::size_t* count) {
  const fs::path images = dataset_dir / kImagesDir;
  std::vector<fs::path> files;
  if (fs::is_directory(images)) {
    for (const auto& entry : fs::directory_iterator(images)) {
      if (entry.is_regular_file()) files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  std::string listing;
  for (const auto& f : files) {
    listing += std::string(kImagesDir) + "/" + f.filename().string() + " " + sha256_file(f) + "\n";
  }
  if (count) *count = files.size();
  return sha256_hex(listing);
}

ValidationReport validate_dataset(const fs::path& dir, unsigned jobs) {
  std::vector<FailureRecord> records;
  try {
    records = read_records(dir);
  } catch (const Error& e) {
    throw Error(ErrorCode::MalformedDataset, e.what());
  }
  if (records.empty()) throw Error(ErrorCode::MalformedDataset, "dataset in " + dir.string() + " is empty");

  std::map<DemoKey, NominalRun> nominal;
  for (const auto& r : records) {
    const DemoKey key{r.task, r.seed};
    if (nominal.contains(key)) continue;
    try {
      nominal.emplace(key, run_nominal(r.task, r.seed));
    } catch (const Error&) {
      // Reported per record below.
    }
  }
  const std::vector<std::string> views = camera_names(default_cameras());

  std::vector<std::vector<std::string>> problems(records.size());
  parallel_for(records.size(), jobs, [&](std::size_t i) {
    const FailureRecord& r = records[i];
    auto& p = problems[i];
    if (!header_consistent(r)) p.push_back("answer header does not match failure_mode '" + r.failure_mode + "'");
    try {
      if (r.query != make_query(r.subtask_text)) p.push_back("query does not match the sub-task template");
    } catch (const Error& e) {
      p.push_back(e.what());
    }
    try {
      if (r.answer != make_answer(r.failure_mode, r.params)) p.push_back("answer does not match the mode template");
    } catch (const Error& e) {
      p.push_back(e.what());
    }
    if (r.viewpoints != views) p.push_back("viewpoints differ from the camera rig");
    if (r.subtask_index < 0 || r.subtask_index >= r.keyframes_total - 1) {
      p.push_back("subtask_index " + std::to_string(r.subtask_index) + " outside [0, keyframes_total - 1)");
      return;
    }
    auto it = nominal.find({r.task, r.seed});
    if (it == nominal.end()) {
      p.push_back("unknown task '" + r.task + "'");
      return;
    }
    const NominalRun& base = it->second;
    const TaskSpec& task = build_task(r.task);
    const Trajectory* trajectory = nullptr;
    const ExecutionTrace* trace = nullptr;
    PerturbationOutcome outcome;
    if (r.is_success()) {
      trajectory = &base.demo.trajectory;
      trace = &base.trace;
      if (!eval_predicate(trace->terminal, task.success)) p.push_back("unperturbed demo does not succeed");
      if (auto f = first_failing_subtask(*trace, task.checkpoints); f && *f <= r.subtask_index) {
        p.push_back("unperturbed demo fails sub-task " + std::to_string(*f));
      }
    } else {
      auto mode = parse_failure_mode(r.failure_mode);
      if (!mode) {
        p.push_back("unknown failure mode '" + r.failure_mode + "'");
        return;
      }
      try {
        const PerturbationConfig config = config_from_params(*mode, r.params);
        if (r.id != failure_record_id(r.task, r.seed, config, r.subtask_index)) {
          p.push_back("id does not match the record key");
        }
        outcome = run_perturbation(task, base.demo, config);
      } catch (const Error& e) {
        p.push_back(std::string("cannot re-execute: ") + e.what());
        return;
      }
      trajectory = &outcome.perturbed.trajectory;
      trace = &outcome.trace;
      if (outcome.task_succeeded) p.push_back("re-executed trajectory succeeds");
      if (outcome.first_failing != r.subtask_index) {
        p.push_back("first failing sub-task is " +
                    (outcome.first_failing ? std::to_string(*outcome.first_failing) : std::string("none")) +
                    ", record says " + std::to_string(r.subtask_index));
      }
      if (outcome.intended_subtask != r.subtask_index) {
        p.push_back("perturbed sub-task is " + std::to_string(outcome.intended_subtask));
      }
    }
    if (static_cast<int>(trajectory->keyframes.size()) != r.keyframes_total) {
      p.push_back("keyframes_total differs from the trajectory");
      return;
    }
    if (trajectory->subtask_texts.at(static_cast<std::size_t>(r.subtask_index)) != r.subtask_text) {
      p.push_back("subtask_text differs from the trajectory");
    }
    check_image(dir, r, trace->keyframe_snapshots, r.keyframes_total - 1, p);
  });

  ValidationReport report;
  report.checked = records.size();
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (!problems[i].empty()) report.failures.push_back({records[i].id, static_cast<int>(i) + 1, problems[i]});
  }
  return report;
}

int DemoResult::focus_subtask() const {
  if (first_failing) return *first_failing;
  return static_cast<int>(trajectory.subtask_count()) - 1;
}

std::string DemoResult::summary() const {
  if (success && !first_failing) {
    return "SUCCESS: all " + std::to_string(trajectory.subtask_count()) + " sub-tasks completed";
  }
  return "FAIL at sub-task " + std::to_string(focus_subtask()) + ": " + answer;
}

DemoResult run_demo(const std::string& task_name, std::uint64_t seed, const std::optional<PerturbationConfig>& config) {
  const TaskSpec& task = build_task(task_name);
  const Demo demo = nominal_demo(task, seed);
  DemoResult r;
  r.task = task_name;
  r.seed = seed;
  r.config = config;
  if (config) {
    PerturbationOutcome o = run_perturbation(task, demo, *config);
    r.trajectory = std::move(o.perturbed.trajectory);
    r.trace = std::move(o.trace);
    r.success = o.task_succeeded;
    r.first_failing = o.first_failing;
    r.intended_subtask = o.intended_subtask;
    r.answer = make_answer(*config);
  } else {
    r.trajectory = demo.trajectory;
    r.trace = execute(demo.world, demo.trajectory, {}, {.record_steps = false});
    r.success = eval_predicate(r.trace.terminal, task.success);
    r.first_failing = first_failing_subtask(r.trace, task.checkpoints);
    r.answer = make_success_answer();
  }
  if (!r.success && !config) r.answer = "No, the demonstration failed.";
  return r;
}

Image demo_grid(const DemoResult& result) {
  return compose_grid(result.trace.keyframe_snapshots, result.focus_subtask(), default_cameras(),
                      static_cast<int>(result.trajectory.subtask_count()));
}

}  // namespace failgen
