// SPDX-License-Identifier: Apache-2.0
#include "failgen/failgen.h"

#include <cstring>
#include <memory>
#include <new>
#include <optional>
#include <string>

#include "failgen/config.hpp"
#include "failgen/dataset.hpp"
#include "failgen/error.hpp"
#include "failgen/evaluate.hpp"
#include "failgen/judge.hpp"
#include "failgen/metrics.hpp"
#include "failgen/pipeline.hpp"
#include "failgen/tasks.hpp"

using namespace failgen;

struct failgen_config {
  SweepSpec spec;
};

struct failgen_perturbation {
  PerturbationDocument doc;
};

struct failgen_demo {
  DemoResult result;
  std::string summary;
};

struct failgen_evaluator {
  MetricSet metrics;
  JudgeOptions judge_options;
  std::chrono::milliseconds timeout{30000};
  std::shared_ptr<JudgeTransport> transport;
  std::optional<HttpEndpoint> judge_endpoint;
  std::unique_ptr<Embedder> embedder;
  unsigned jobs = 1;
};

namespace {

thread_local std::string g_last_error;

failgen_status fail(ErrorCode code, const std::string& message) {
  g_last_error = message;
  return static_cast<failgen_status>(code);
}

template <typename Fn>
failgen_status guarded(Fn&& fn) {
  try {
    g_last_error.clear();
    fn();
    return FAILGEN_OK;
  } catch (const Error& e) {
    return fail(e.code(), e.what());
  } catch (const std::bad_alloc&) {
    return fail(ErrorCode::Internal, "out of memory");
  } catch (const std::exception& e) {
    return fail(ErrorCode::Internal, e.what());
  } catch (...) {
    return fail(ErrorCode::Internal, "unknown exception");
  }
}

void require(const void* p, const char* what) {
  if (p == nullptr) throw Error(ErrorCode::InvalidArgument, std::string(what) + " must not be NULL");
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

void copy_digest(char (&dst)[65], const std::string& src) {
  std::memset(dst, 0, sizeof dst);
  std::memcpy(dst, src.data(), std::min(src.size(), sizeof dst - 1));
}

class CJudgeTransport final : public JudgeTransport {
 public:
  CJudgeTransport(failgen_judge_fn fn, void* user) : fn_(fn), user_(user) {}
  std::string send(const std::string& prompt) override {
    std::string reply(4096, '\0');
    if (fn_(user_, prompt.c_str(), reply.data(), reply.size()) != 0) {
      throw Error(ErrorCode::JudgeUnavailable, "judge callback reported a failure");
    }
    reply.resize(std::strlen(reply.c_str()));
    return reply;
  }

 private:
  failgen_judge_fn fn_;
  void* user_;
};

}  // namespace

extern "C" {

const char* failgen_version(void) { return FAILGEN_VERSION; }

const char* failgen_status_name(failgen_status status) {
  return error_code_name(static_cast<ErrorCode>(status)).data();
}

const char* failgen_last_error(void) { return g_last_error.c_str(); }

void failgen_string_free(char* str) { std::free(str); }

size_t failgen_task_count(void) {
  try {
    return task_names().size();
  } catch (...) {
    return 0;
  }
}

const char* failgen_task_name(size_t index) {
  try {
    const auto& names = task_names();
    return index < names.size() ? names[index].c_str() : nullptr;
  } catch (...) {
    return nullptr;
  }
}

failgen_status failgen_config_default(failgen_config** out) {
  return guarded([&] {
    require(out, "out");
    *out = new failgen_config{SweepSpec::defaults()};
  });
}

failgen_status failgen_config_parse(const char* yaml_text, failgen_config** out) {
  return guarded([&] {
    require(yaml_text, "yaml_text");
    require(out, "out");
    *out = new failgen_config{parse_sweep_spec(yaml_text)};
  });
}

failgen_status failgen_config_load(const char* path, failgen_config** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = new failgen_config{load_sweep_spec(path)};
  });
}

failgen_status failgen_config_to_json(const failgen_config* config, char** out_json) {
  return guarded([&] {
    require(config, "config");
    require(out_json, "out_json");
    *out_json = dup_string(to_json(config->spec).dump(2));
  });
}

void failgen_config_free(failgen_config* config) { delete config; }

failgen_status failgen_generate(const failgen_config* config, const char* out_dir, unsigned jobs, int write_png,
                                const char* command, failgen_generate_summary* out) {
  return guarded([&] {
    require(config, "config");
    require(out_dir, "out_dir");
    GenerateOptions options;
    options.jobs = jobs == 0 ? 1 : jobs;
    options.png = write_png != 0;
    options.command = command ? command : "";
    const GenerateSummary s = generate(config->spec, out_dir, options);
    if (out) {
      out->failure_count = s.failure_count;
      out->success_count = s.success_count;
      out->image_count = s.image_count;
      copy_digest(out->dataset_digest, s.dataset_digest);
      copy_digest(out->images_digest, s.images_digest);
    }
  });
}

failgen_status failgen_validate(const char* dataset_dir, unsigned jobs, int* out_ok, char** out_report_json) {
  return guarded([&] {
    require(dataset_dir, "dataset_dir");
    require(out_ok, "out_ok");
    const ValidationReport report = validate_dataset(dataset_dir, jobs == 0 ? 1 : jobs);
    *out_ok = report.ok() ? 1 : 0;
    if (out_report_json) {
      Json j = Json::object();
      j["checked"] = report.checked;
      j["failed"] = report.failures.size();
      Json list = Json::array();
      for (const auto& f : report.failures) {
        list.push_back(Json{{"id", f.id}, {"line", f.line}, {"problems", f.problems}});
      }
      j["failures"] = list;
      *out_report_json = dup_string(j.dump(2));
    }
  });
}

failgen_status failgen_stats(const char* dataset_dir, char** out_json) {
  return guarded([&] {
    require(dataset_dir, "dataset_dir");
    require(out_json, "out_json");
    *out_json = dup_string(to_json(dataset_stats(dataset_dir)).dump(2));
  });
}

failgen_status failgen_perturbation_load(const char* path, failgen_perturbation** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = new failgen_perturbation{load_perturbation_config(path)};
  });
}

failgen_status failgen_perturbation_parse(const char* yaml_text, failgen_perturbation** out) {
  return guarded([&] {
    require(yaml_text, "yaml_text");
    require(out, "out");
    *out = new failgen_perturbation{parse_perturbation_config(yaml_text)};
  });
}

const char* failgen_perturbation_task(const failgen_perturbation* p) {
  return p && p->doc.task ? p->doc.task->c_str() : nullptr;
}

int failgen_perturbation_seed(const failgen_perturbation* p, uint64_t* out_seed) {
  if (!p || !p->doc.seed) return 0;
  if (out_seed) *out_seed = *p->doc.seed;
  return 1;
}

void failgen_perturbation_free(failgen_perturbation* p) { delete p; }

failgen_status failgen_demo_run(const char* task, uint64_t seed, const failgen_perturbation* perturbation,
                                failgen_demo** out) {
  return guarded([&] {
    require(task, "task");
    require(out, "out");
    std::optional<PerturbationConfig> config;
    if (perturbation) config = perturbation->doc.config;
    auto demo = std::make_unique<failgen_demo>();
    demo->result = run_demo(task, seed, config);
    demo->summary = demo->result.summary();
    *out = demo.release();
  });
}

int failgen_demo_success(const failgen_demo* demo) { return demo && demo->result.success ? 1 : 0; }

int failgen_demo_first_failing(const failgen_demo* demo) {
  return demo && demo->result.first_failing ? *demo->result.first_failing : -1;
}

size_t failgen_demo_subtask_count(const failgen_demo* demo) {
  return demo ? demo->result.trajectory.subtask_count() : 0;
}

const char* failgen_demo_summary(const failgen_demo* demo) { return demo ? demo->summary.c_str() : ""; }

failgen_status failgen_demo_write_image(const failgen_demo* demo, const char* path) {
  return guarded([&] {
    require(demo, "demo");
    require(path, "path");
    write_image(path, demo_grid(demo->result));
  });
}

void failgen_demo_free(failgen_demo* demo) { delete demo; }

failgen_status failgen_rouge_l(const char* candidate, const char* reference, double* out_precision,
                               double* out_recall, double* out_f1) {
  return guarded([&] {
    require(candidate, "candidate");
    require(reference, "reference");
    const RougeScore s = rouge_l(candidate, reference);
    if (out_precision) *out_precision = s.precision;
    if (out_recall) *out_recall = s.recall;
    if (out_f1) *out_f1 = s.f1;
  });
}

failgen_status failgen_cosine(const char* candidate, const char* reference, double* out_score) {
  return guarded([&] {
    require(candidate, "candidate");
    require(reference, "reference");
    require(out_score, "out_score");
    *out_score = cosine_similarity(std::string_view(candidate), std::string_view(reference));
  });
}

failgen_binary failgen_parse_binary(const char* response) {
  if (response == nullptr) return FAILGEN_BINARY_UNPARSEABLE;
  switch (parse_binary(response)) {
    case BinaryAnswer::Yes:
      return FAILGEN_BINARY_YES;
    case BinaryAnswer::No:
      return FAILGEN_BINARY_NO;
    case BinaryAnswer::Unparseable:
      break;
  }
  return FAILGEN_BINARY_UNPARSEABLE;
}

failgen_status failgen_evaluator_create(const char* metrics, failgen_evaluator** out) {
  return guarded([&] {
    require(metrics, "metrics");
    require(out, "out");
    auto ev = std::make_unique<failgen_evaluator>();
    ev->metrics = parse_metric_list(metrics);
    *out = ev.release();
  });
}

failgen_status failgen_evaluator_set_judge(failgen_evaluator* ev, failgen_judge_fn fn, void* user) {
  return guarded([&] {
    require(ev, "evaluator");
    require(reinterpret_cast<const void*>(fn), "judge callback");
    ev->transport = std::make_shared<CJudgeTransport>(fn, user);
    ev->judge_endpoint.reset();
  });
}

failgen_status failgen_evaluator_use_env_judge(failgen_evaluator* ev) {
  return guarded([&] {
    require(ev, "evaluator");
    auto endpoint = judge_endpoint_from_env();
    if (!endpoint) throw Error(ErrorCode::JudgeUnavailable, "FAILGEN_JUDGE_ENDPOINT is not set");
    ev->judge_endpoint = std::move(endpoint);
    ev->transport.reset();
  });
}

failgen_status failgen_evaluator_use_env_embedder(failgen_evaluator* ev, int* out_enabled) {
  return guarded([&] {
    require(ev, "evaluator");
    auto endpoint = embed_endpoint_from_env();
    if (endpoint) {
      endpoint->timeout = ev->timeout;
      ev->embedder = std::make_unique<HttpEmbedder>(*endpoint);
    }
    if (out_enabled) *out_enabled = endpoint ? 1 : 0;
  });
}

failgen_status failgen_evaluator_set_judge_options(failgen_evaluator* ev, int max_retries, unsigned initial_backoff_ms,
                                                   unsigned concurrency, unsigned timeout_ms) {
  return guarded([&] {
    require(ev, "evaluator");
    if (max_retries < 0 || concurrency == 0 || timeout_ms == 0) {
      throw Error(ErrorCode::InvalidArgument, "retries must be >= 0, concurrency and timeout >= 1");
    }
    ev->judge_options.max_retries = max_retries;
    ev->judge_options.initial_backoff = std::chrono::milliseconds(initial_backoff_ms);
    ev->judge_options.concurrency = concurrency;
    ev->timeout = std::chrono::milliseconds(timeout_ms);
  });
}

failgen_status failgen_evaluator_set_jobs(failgen_evaluator* ev, unsigned jobs) {
  return guarded([&] {
    require(ev, "evaluator");
    ev->jobs = jobs == 0 ? 1 : jobs;
  });
}

failgen_status failgen_evaluator_run(failgen_evaluator* ev, const char* dataset_dir, const char* predictions_path,
                                     char** out_report_json) {
  return guarded([&] {
    require(ev, "evaluator");
    require(dataset_dir, "dataset_dir");
    require(predictions_path, "predictions_path");
    require(out_report_json, "out_report_json");
    const auto records = read_records(dataset_dir);
    const auto predictions = read_predictions(predictions_path);
    std::optional<JudgeClient> judge;
    if (ev->metrics.fuzzy) {
      std::shared_ptr<JudgeTransport> transport = ev->transport;
      if (!transport && ev->judge_endpoint) {
        HttpEndpoint endpoint = *ev->judge_endpoint;
        endpoint.timeout = ev->timeout;
        transport = std::make_shared<HttpJudgeTransport>(endpoint);
      }
      if (!transport) throw Error(ErrorCode::JudgeUnavailable, "fuzzy metric requested but no judge is configured");
      judge.emplace(transport, ev->judge_options);
    }
    EvaluateOptions options;
    options.metrics = ev->metrics;
    options.judge = judge ? &*judge : nullptr;
    options.embedder = ev->embedder.get();
    options.jobs = ev->jobs;
    *out_report_json = dup_string(to_json(evaluate_dataset(records, predictions, options)).dump(2));
  });
}

void failgen_evaluator_free(failgen_evaluator* ev) { delete ev; }

}  // extern "C"
