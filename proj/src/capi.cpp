// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The tracelab Authors

#include "tracelab/tracelab.h"

#include <exception>
#include <memory>
#include <string>
#include <vector>

#include "tracelab/config.hpp"
#include "tracelab/corpus.hpp"
#include "tracelab/error.hpp"
#include "tracelab/tlr.hpp"
#include "tracelab/workflows.hpp"

struct tl_config {
  tracelab::RunConfig config;
  std::string text;
  std::string summary;
};

struct tl_dataset {
  tracelab::Dataset dataset;
};

struct tl_matrix {
  tracelab::TraceMatrix matrix;
  std::vector<const tracelab::TraceLink*> order;

  void index() {
    order.clear();
    for (const auto& [key, link] : matrix) order.push_back(&link);
  }
};

namespace {

thread_local std::string last_error;

tl_status status_of(tracelab::ErrorCode code) {
  switch (code) {
    case tracelab::ErrorCode::invalid_argument: return TL_ERR_INVALID_ARGUMENT;
    case tracelab::ErrorCode::load: return TL_ERR_LOAD;
    case tracelab::ErrorCode::validation: return TL_ERR_VALIDATION;
    case tracelab::ErrorCode::not_found: return TL_ERR_NOT_FOUND;
    case tracelab::ErrorCode::io: return TL_ERR_IO;
    case tracelab::ErrorCode::version_mismatch: return TL_ERR_VERSION_MISMATCH;
    case tracelab::ErrorCode::incompatible: return TL_ERR_INCOMPATIBLE;
  }
  return TL_ERR_INTERNAL;
}

template <typename F>
tl_status guard(F&& f) {
  try {
    f();
    last_error.clear();
    return TL_OK;
  } catch (const tracelab::Error& e) {
    last_error = e.what();
    return status_of(e.code());
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
    return TL_ERR_INTERNAL;
  } catch (const std::exception& e) {
    last_error = e.what();
    return TL_ERR_INTERNAL;
  } catch (...) {
    last_error = "unknown error";
    return TL_ERR_INTERNAL;
  }
}

void need(const void* p, const char* what) {
  if (p == nullptr)
    throw tracelab::Error(tracelab::ErrorCode::invalid_argument, std::string(what) + " is NULL");
}

template <typename Workflow>
tl_status run(tl_config* config, const char** summary, Workflow w) {
  return guard([&] {
    need(config, "config");
    config->summary = w(config->config);
    if (summary) *summary = config->summary.c_str();
  });
}

}  // namespace

extern "C" {

const char* tl_version(void) { return "1.0.0"; }

const char* tl_last_error(void) { return last_error.c_str(); }

const char* tl_status_name(tl_status status) {
  switch (status) {
    case TL_OK: return "ok";
    case TL_ERR_INVALID_ARGUMENT: return "invalid_argument";
    case TL_ERR_LOAD: return "load";
    case TL_ERR_VALIDATION: return "validation";
    case TL_ERR_NOT_FOUND: return "not_found";
    case TL_ERR_IO: return "io";
    case TL_ERR_VERSION_MISMATCH: return "version_mismatch";
    case TL_ERR_INCOMPATIBLE: return "incompatible";
    case TL_ERR_INTERNAL: return "internal";
  }
  return "internal";
}

tl_status tl_config_new(tl_config** out) {
  return guard([&] {
    need(out, "out");
    *out = new tl_config();
  });
}

void tl_config_free(tl_config* config) { delete config; }

tl_status tl_config_load(tl_config* config, const char* path) {
  return guard([&] {
    need(config, "config");
    need(path, "path");
    auto loaded = tracelab::RunConfig::load(path);
    for (const auto& [k, v] : loaded.values()) config->config.set(k, v);
  });
}

tl_status tl_config_set(tl_config* config, const char* key, const char* value) {
  return guard([&] {
    need(config, "config");
    need(key, "key");
    need(value, "value");
    config->config.set(key, value);
  });
}

tl_status tl_config_get(const tl_config* config, const char* key, const char** value) {
  return guard([&] {
    need(config, "config");
    need(key, "key");
    need(value, "value");
    auto it = config->config.values().find(key);
    *value = it == config->config.values().end() ? nullptr : it->second.c_str();
  });
}

tl_status tl_config_text(const tl_config* config, const char** text) {
  return guard([&] {
    need(config, "config");
    need(text, "text");
    auto* c = const_cast<tl_config*>(config);
    c->text = config->config.to_text();
    *text = c->text.c_str();
  });
}

tl_status tl_dataset_load(const char* root, const char* format, tl_dataset** out) {
  return guard([&] {
    need(root, "root");
    need(format, "format");
    need(out, "out");
    auto d = std::make_unique<tl_dataset>();
    d->dataset = tracelab::load_dataset(root, tracelab::dataset_format_from_string(format));
    d->dataset.validate();
    *out = d.release();
  });
}

void tl_dataset_free(tl_dataset* dataset) { delete dataset; }

tl_status tl_dataset_counts(const tl_dataset* dataset, size_t* sources, size_t* targets,
                            size_t* answers) {
  return guard([&] {
    need(dataset, "dataset");
    if (sources) *sources = dataset->dataset.sources.size();
    if (targets) *targets = dataset->dataset.targets.size();
    if (answers) *answers = dataset->dataset.answers.size();
  });
}

tl_status tl_recover(const tl_dataset* dataset, const tl_config* config, tl_matrix** out) {
  return guard([&] {
    need(dataset, "dataset");
    need(config, "config");
    need(out, "out");
    auto m = std::make_unique<tl_matrix>();
    m->matrix = tracelab::tlr::recover(dataset->dataset, tracelab::recovery_config(config->config));
    m->index();
    *out = m.release();
  });
}

tl_status tl_matrix_load(const char* path, tl_matrix** out) {
  return guard([&] {
    need(path, "path");
    need(out, "out");
    auto m = std::make_unique<tl_matrix>();
    m->matrix = tracelab::load_matrix_csv(path);
    m->index();
    *out = m.release();
  });
}

void tl_matrix_free(tl_matrix* matrix) { delete matrix; }

tl_status tl_matrix_size(const tl_matrix* matrix, size_t* size) {
  return guard([&] {
    need(matrix, "matrix");
    need(size, "size");
    *size = matrix->order.size();
  });
}

tl_status tl_matrix_link(const tl_matrix* matrix, size_t i, const char** source_id,
                         const char** target_id, double* score) {
  return guard([&] {
    need(matrix, "matrix");
    if (i >= matrix->order.size())
      throw tracelab::Error(tracelab::ErrorCode::not_found,
                            "link index " + std::to_string(i) + " out of range");
    const auto* link = matrix->order[i];
    if (source_id) *source_id = link->source_id.c_str();
    if (target_id) *target_id = link->target_id.c_str();
    if (score) *score = link->score.value_or(-1.0);
  });
}

tl_status tl_matrix_save(const tl_matrix* matrix, const char* path) {
  return guard([&] {
    need(matrix, "matrix");
    need(path, "path");
    tracelab::save_matrix_csv(matrix->matrix, path);
  });
}

tl_status tl_run_recover(tl_config* config, const char** summary) {
  return run(config, summary, tracelab::workflows::recover);
}

tl_status tl_run_eval(tl_config* config, const char** summary) {
  return run(config, summary, tracelab::workflows::eval);
}

tl_status tl_run_maintain(tl_config* config, const char** summary) {
  return run(config, summary, tracelab::workflows::maintain);
}

tl_status tl_run_classify_types(tl_config* config, const char** summary) {
  return run(config, summary, tracelab::workflows::classify_types);
}

tl_status tl_run_explain(tl_config* config, const char** summary) {
  return run(config, summary, tracelab::workflows::explain);
}

tl_status tl_serve(const tl_config* config) {
  return guard([&] {
    need(config, "config");
    tracelab::workflows::serve(config->config);
  });
}

}  // extern "C"
