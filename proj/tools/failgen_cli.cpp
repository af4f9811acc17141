// SPDX-License-Identifier: Apache-2.0
//
// failgen command-line tool. Talks to the library exclusively through the C
// interface in failgen/failgen.h.
#include <CLI11.hpp>

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "failgen/failgen.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitContent = 1;
constexpr int kExitUsage = 2;

int exit_code_for(failgen_status status) {
  switch (status) {
    case FAILGEN_OK:
      return kExitOk;
    case FAILGEN_E_MALFORMED_LINE:
    case FAILGEN_E_MALFORMED_DATASET:
    case FAILGEN_E_DUPLICATE_ID:
    case FAILGEN_E_UNKNOWN_RECORD_ID:
    case FAILGEN_E_JUDGE_UNAVAILABLE:
    case FAILGEN_E_MALFORMED_JUDGE_REPLY:
      return kExitContent;
    default:
      return kExitUsage;
  }
}

int report(failgen_status status, const char* context) {
  std::cerr << "failgen " << context << ": " << failgen_status_name(status) << ": " << failgen_last_error() << "\n";
  return exit_code_for(status);
}

struct OwnedString {
  char* p = nullptr;
  ~OwnedString() { failgen_string_free(p); }
};

bool write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
  return static_cast<bool>(out);
}

std::string joined_command(int argc, char** argv) {
  std::ostringstream ss;
  for (int i = 0; i < argc; ++i) ss << (i ? " " : "") << argv[i];
  return ss.str();
}

int cmd_generate(const std::string& config_path, const std::string& out_dir, unsigned jobs, bool png,
                 const std::string& command) {
  failgen_config* config = nullptr;
  if (auto s = failgen_config_load(config_path.c_str(), &config); s != FAILGEN_OK) return report(s, "generate");
  failgen_generate_summary summary{};
  const failgen_status s = failgen_generate(config, out_dir.c_str(), jobs, png ? 1 : 0, command.c_str(), &summary);
  failgen_config_free(config);
  if (s != FAILGEN_OK) return report(s, "generate");
  std::cout << "records: " << summary.failure_count + summary.success_count << " (" << summary.failure_count
            << " failures, " << summary.success_count << " successes)\n"
            << "images: " << summary.image_count << "\n"
            << "dataset digest: " << summary.dataset_digest << "\n"
            << "images digest: " << summary.images_digest << "\n";
  return kExitOk;
}

int cmd_validate(const std::string& dir, unsigned jobs) {
  int ok = 0;
  OwnedString json;
  if (auto s = failgen_validate(dir.c_str(), jobs, &ok, &json.p); s != FAILGEN_OK) return report(s, "validate");
  if (ok) {
    std::cout << "validate: all records passed\n";
    return kExitOk;
  }
  std::cout << json.p << "\n";
  std::cerr << "validate: some records failed\n";
  return kExitContent;
}

int cmd_eval(const std::string& dir, const std::string& predictions, const std::string& metrics,
             const std::string& report_path, unsigned jobs) {
  failgen_evaluator* ev = nullptr;
  if (auto s = failgen_evaluator_create(metrics.c_str(), &ev); s != FAILGEN_OK) return report(s, "eval");
  struct Guard {
    failgen_evaluator* ev;
    ~Guard() { failgen_evaluator_free(ev); }
  } guard{ev};
  failgen_evaluator_set_jobs(ev, jobs);
  int embed = 0;
  if (auto s = failgen_evaluator_use_env_embedder(ev, &embed); s != FAILGEN_OK) return report(s, "eval");
  if (metrics.find("fuzzy") != std::string::npos) {
    if (auto s = failgen_evaluator_use_env_judge(ev); s != FAILGEN_OK) return report(s, "eval");
  }
  OwnedString json;
  if (auto s = failgen_evaluator_run(ev, dir.c_str(), predictions.c_str(), &json.p); s != FAILGEN_OK) {
    return report(s, "eval");
  }
  if (!report_path.empty()) {
    if (!write_text(report_path, std::string(json.p) + "\n")) {
      std::cerr << "failgen eval: cannot write " << report_path << "\n";
      return kExitUsage;
    }
  } else {
    std::cout << json.p << "\n";
  }
  return kExitOk;
}

int cmd_demo(const std::string& task, const std::string& perturb, std::optional<std::uint64_t> seed,
             const std::string& image) {
  failgen_perturbation* p = nullptr;
  if (!perturb.empty()) {
    if (auto s = failgen_perturbation_load(perturb.c_str(), &p); s != FAILGEN_OK) return report(s, "demo");
    const char* doc_task = failgen_perturbation_task(p);
    if (doc_task && task != doc_task) {
      std::cerr << "failgen demo: perturbation file is for task '" << doc_task << "', not '" << task << "'\n";
      failgen_perturbation_free(p);
      return kExitUsage;
    }
    std::uint64_t doc_seed = 0;
    if (!seed && failgen_perturbation_seed(p, &doc_seed)) seed = doc_seed;
  }
  failgen_demo* demo = nullptr;
  const failgen_status s = failgen_demo_run(task.c_str(), seed.value_or(0), p, &demo);
  failgen_perturbation_free(p);
  if (s != FAILGEN_OK) return report(s, "demo");
  std::cout << "task: " << task << " (seed " << seed.value_or(0) << ")\n"
            << "success: " << (failgen_demo_success(demo) ? "true" : "false") << "\n";
  const int first = failgen_demo_first_failing(demo);
  std::cout << "first failing sub-task: " << (first < 0 ? std::string("none") : std::to_string(first)) << "\n"
            << failgen_demo_summary(demo) << "\n";
  int code = kExitOk;
  if (!image.empty()) {
    if (auto w = failgen_demo_write_image(demo, image.c_str()); w != FAILGEN_OK) {
      code = report(w, "demo");
    } else {
      std::cout << "image: " << image << "\n";
    }
  }
  failgen_demo_free(demo);
  return code;
}

int cmd_stats(const std::string& dir) {
  OwnedString json;
  if (auto s = failgen_stats(dir.c_str(), &json.p); s != FAILGEN_OK) return report(s, "stats");
  std::cout << json.p << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Procedural robot-manipulation failure dataset generator"};
  app.set_version_flag("--version", std::string(failgen_version()));
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::string dataset;
  std::string predictions;
  std::string metrics = "rouge,cosine,binary";
  std::string report_path;
  std::string task;
  std::string perturb;
  std::string image;
  std::optional<std::uint64_t> seed;
  unsigned jobs = 1;
  bool png = false;

  auto* gen = app.add_subcommand("generate", "Run the perturbation sweep and write a dataset");
  gen->add_option("--config", config_path, "Sweep configuration (YAML)")->required()->check(CLI::ExistingFile);
  gen->add_option("--out", out_dir, "Output directory")->required();
  gen->add_option("--jobs", jobs, "Worker threads")->check(CLI::Range(1U, 256U));
  gen->add_flag("--png", png, "Also write PNG copies of the images");

  auto* val = app.add_subcommand("validate", "Re-execute and check every record of a dataset");
  val->add_option("--dataset", dataset, "Dataset directory")->required();
  val->add_option("--jobs", jobs, "Worker threads")->check(CLI::Range(1U, 256U));

  auto* ev = app.add_subcommand("eval", "Score predictions against a dataset");
  ev->add_option("--dataset", dataset, "Dataset directory")->required();
  ev->add_option("--predictions", predictions, "Predictions JSONL ({id, response})")->required();
  ev->add_option("--metrics", metrics, "Comma-separated: rouge,cosine,binary,fuzzy")->capture_default_str();
  ev->add_option("--report", report_path, "Write the JSON report here instead of stdout");
  ev->add_option("--jobs", jobs, "Worker threads")->check(CLI::Range(1U, 256U));

  auto* demo = app.add_subcommand("demo", "Execute one task, optionally perturbed");
  demo->add_option("--task", task, "Task name")->required();
  demo->add_option("--perturb", perturb, "Perturbation document (YAML)")->check(CLI::ExistingFile);
  demo->add_option("--seed", seed, "Scene seed (default: from the perturbation file, else 0)");
  demo->add_option("--image", image, "Write the image grid (.ppm or .png)");

  auto* stats = app.add_subcommand("stats", "Summarise a dataset");
  stats->add_option("--dataset", dataset, "Dataset directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  if (*gen) return cmd_generate(config_path, out_dir, jobs, png, joined_command(argc, argv));
  if (*val) return cmd_validate(dataset, jobs);
  if (*ev) return cmd_eval(dataset, predictions, metrics, report_path, jobs);
  if (*demo) return cmd_demo(task, perturb, seed, image);
  if (*stats) return cmd_stats(dataset);
  return kExitUsage;
}
