#include "psmkit/psmkit.h"

#include <string>

#include "errors.hpp"
#include "json_util.hpp"
#include "pipeline.hpp"
#include "synth.hpp"

using namespace psmkit;

struct psmkit_ctx {
  PipelineParams params;
  std::string last_error;
};

namespace {

int status_of(Stage s) {
  switch (s) {
    case Stage::Config: return PSMKIT_ERR_CONFIG;
    case Stage::Ingest: return PSMKIT_ERR_INGEST;
    case Stage::Mining: return PSMKIT_ERR_MINING;
    case Stage::FormatCluster: return PSMKIT_ERR_FORMAT_CLUSTER;
    case Stage::SessionCluster: return PSMKIT_ERR_SESSION_CLUSTER;
    case Stage::PsmInfer: return PSMKIT_ERR_PSM;
    case Stage::Metrics: return PSMKIT_ERR_METRICS;
    case Stage::Synth: return PSMKIT_ERR_SYNTH;
    case Stage::Io: return PSMKIT_ERR_IO;
  }
  return PSMKIT_ERR_INTERNAL;
}

template <typename Fn>
int guarded(psmkit_ctx *ctx, Fn &&fn) {
  if (!ctx)
    return PSMKIT_ERR_USAGE;
  ctx->last_error.clear();
  try {
    fn();
    return PSMKIT_OK;
  } catch (const Error &e) {
    ctx->last_error = e.what();
    return status_of(e.stage());
  } catch (const std::exception &e) {
    ctx->last_error = e.what();
    return PSMKIT_ERR_INTERNAL;
  }
}

TraceFormat parse_format(const char *s) {
  if (!s || std::string(s) == "auto")
    return TraceFormat::Auto;
  std::string v(s);
  if (v == "pcap")
    return TraceFormat::Pcap;
  if (v == "jsonl")
    return TraceFormat::JsonlTrace;
  throw Error(Stage::Config, "unknown trace format '" + v + "'");
}

}  // namespace

extern "C" {

psmkit_ctx *psmkit_ctx_new(void) {
  try {
    return new psmkit_ctx();
  } catch (...) {
    return nullptr;
  }
}

void psmkit_ctx_free(psmkit_ctx *ctx) { delete ctx; }

const char *psmkit_version(void) { return "0.1.0"; }

const char *psmkit_status_name(int status) {
  switch (status) {
    case PSMKIT_OK: return "ok";
    case PSMKIT_ERR_CONFIG: return "config";
    case PSMKIT_ERR_INGEST: return "ingest";
    case PSMKIT_ERR_MINING: return "mining";
    case PSMKIT_ERR_FORMAT_CLUSTER: return "format-cluster";
    case PSMKIT_ERR_SESSION_CLUSTER: return "session-cluster";
    case PSMKIT_ERR_PSM: return "psm";
    case PSMKIT_ERR_METRICS: return "metrics";
    case PSMKIT_ERR_SYNTH: return "synth";
    case PSMKIT_ERR_IO: return "io";
    case PSMKIT_ERR_USAGE: return "usage";
    case PSMKIT_ERR_INTERNAL: return "internal";
  }
  return "unknown";
}

const char *psmkit_last_error(const psmkit_ctx *ctx) {
  return ctx ? ctx->last_error.c_str() : "";
}

int psmkit_load_config(psmkit_ctx *ctx, const char *path) {
  return guarded(ctx, [&] {
    if (!path)
      throw Error(Stage::Config, "null config path");
    ctx->params = params_from_json(load_json_file(path));
  });
}

int psmkit_set_param(psmkit_ctx *ctx, const char *key, const char *value) {
  return guarded(ctx, [&] {
    if (!key || !value)
      throw Error(Stage::Config, "null parameter name or value");
    apply_param(ctx->params, key, value);
  });
}

int psmkit_gen(psmkit_ctx *ctx, const char *const *specs, size_t spec_count,
               int sessions_per_spec, double noise_rate, uint64_t seed, const char *out_dir) {
  return guarded(ctx, [&] {
    if (!specs || spec_count == 0 || !out_dir)
      throw Error(Stage::Synth, "null spec list or output directory");
    std::vector<ProtocolSpec> parsed;
    for (size_t i = 0; i < spec_count; ++i) {
      std::string s = specs[i] ? specs[i] : "";
      bool builtin = false;
      for (const std::string &name : builtin_spec_names())
        if (name == s)
          builtin = true;
      parsed.push_back(builtin ? builtin_spec(s) : load_protocol_spec(s));
    }
    generate_corpus(parsed, sessions_per_spec, noise_rate, seed, out_dir);
  });
}

int psmkit_infer(psmkit_ctx *ctx, const char *trace_path, const char *trace_format,
                 const char *known_models, const char *truth, const char *out_dir) {
  return guarded(ctx, [&] {
    if (!trace_path || !out_dir)
      throw Error(Stage::Config, "null trace path or output directory");
    InferRequest req;
    req.trace_path = trace_path;
    req.trace_format = parse_format(trace_format);
    req.known_models_path = known_models ? known_models : "";
    req.truth_path = truth ? truth : "";
    req.out_dir = out_dir;
    req.params = ctx->params;
    run_infer(req);
  });
}

int psmkit_eval(psmkit_ctx *ctx, const char *artifacts_dir, const char *truth,
                const char *report_path) {
  return guarded(ctx, [&] {
    if (!artifacts_dir || !truth)
      throw Error(Stage::Config, "null artifacts directory or truth path");
    run_eval(artifacts_dir, truth, report_path ? report_path : "");
  });
}

int psmkit_export_dot(psmkit_ctx *ctx, const char *psm_json, const char *dot_path) {
  return guarded(ctx, [&] {
    if (!psm_json || !dot_path)
      throw Error(Stage::Config, "null input or output path");
    export_dot_file(psm_json, dot_path);
  });
}

}  // extern "C"
