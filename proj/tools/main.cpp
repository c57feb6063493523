// Command line front end; all work happens behind the C API.

#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "psmkit/psmkit.h"

namespace {

int fail(psmkit_ctx *ctx, int status) {
  std::fprintf(stderr, "error (%s): %s\n", psmkit_status_name(status), psmkit_last_error(ctx));
  return status;
}

nlohmann::json read_json(const std::string &path) {
  std::ifstream in(path);
  nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
  return j;
}

void print_infer_summary(const std::string &out_dir) {
  nlohmann::json pfc = read_json(out_dir + "/pfc.json");
  nlohmann::json sessions = read_json(out_dir + "/sessions.json");
  nlohmann::json mfi = read_json(out_dir + "/mfi.json");
  if (mfi.is_array())
    std::printf("frequent items: %zu\n", mfi.size());
  if (pfc.is_object())
    std::printf("format clusters: %d (eps=%.3f minpts=%d sc=%.3f)\n",
                pfc.value("cluster_count", 0), pfc.value("eps", 0.0), pfc.value("minpts", 0),
                pfc.value("sc", 0.0));
  if (sessions.is_object()) {
    std::printf("session clusters: %d", sessions.value("k", 0));
    if (sessions.contains("sc") && sessions["sc"].is_number())
      std::printf(" (sc=%.3f)", sessions["sc"].get<double>());
    std::printf("\n");
  }
  nlohmann::json report = read_json(out_dir + "/report.json");
  if (report.is_object()) {
    std::printf("format rand index: %.4f\n", report.value("format_ri", 0.0));
    std::printf("session rand index: %.4f\n", report.value("session_ri", 0.0));
    for (const auto &p : report.value("per_protocol", nlohmann::json::array()))
      std::printf("%s: smc=%.4f tmc=%.4f\n", p.value("protocol", std::string("?")).c_str(),
                  p.value("smc", 0.0), p.value("tmc", 0.0));
  }
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"protocol format and state machine inference from traffic traces"};
  app.require_subcommand(1);

  // gen
  auto *gen = app.add_subcommand("gen", "generate a labeled synthetic corpus");
  std::vector<std::string> specs;
  int sessions_per_spec = 60;
  double noise = 0.02;
  std::uint64_t seed = 1;
  std::string gen_out;
  gen->add_option("--spec", specs, "built-in spec name or spec JSON path")->required();
  gen->add_option("--sessions", sessions_per_spec, "sessions per spec");
  gen->add_option("--noise", noise, "share of messages to corrupt");
  gen->add_option("--seed", seed, "corpus seed");
  gen->add_option("--out", gen_out, "output directory")->required();

  // infer
  auto *infer = app.add_subcommand("infer", "run the inference pipeline over a trace");
  std::string trace, format = "auto", known, truth, config, infer_out;
  std::vector<std::string> sets;
  infer->add_option("--trace", trace, "pcap or JSONL trace")->required();
  infer->add_option("--format", format, "trace format: auto, pcap or jsonl");
  infer->add_option("--known", known, "known protocol models JSON");
  infer->add_option("--truth", truth, "ground truth JSON; adds report.json");
  infer->add_option("--config", config, "pipeline parameters JSON");
  infer->add_option("--set", sets, "override one parameter, key=value");
  infer->add_option("--out", infer_out, "artifact directory")->required();

  // eval
  auto *eval = app.add_subcommand("eval", "score existing artifacts against ground truth");
  std::string artifacts, eval_truth, report;
  eval->add_option("--artifacts", artifacts, "artifact directory from infer")->required();
  eval->add_option("--truth", eval_truth, "ground truth JSON")->required();
  eval->add_option("--report", report, "report path (default: artifacts/report.json)");

  // export-dot
  auto *dot = app.add_subcommand("export-dot", "render a state machine artifact as DOT");
  std::string psm_json, dot_out;
  dot->add_option("--psm", psm_json, "psm_<k>.json artifact")->required();
  dot->add_option("--out", dot_out, "DOT output path")->required();

  CLI11_PARSE(app, argc, argv);

  psmkit_ctx *ctx = psmkit_ctx_new();
  if (!ctx) {
    std::fprintf(stderr, "error: out of memory\n");
    return PSMKIT_ERR_INTERNAL;
  }
  int rc = PSMKIT_OK;

  if (gen->parsed()) {
    std::vector<const char *> ptrs;
    for (const std::string &s : specs)
      ptrs.push_back(s.c_str());
    rc = psmkit_gen(ctx, ptrs.data(), ptrs.size(), sessions_per_spec, noise, seed,
                    gen_out.c_str());
    if (rc == PSMKIT_OK)
      std::printf("wrote %s/trace.jsonl and %s/truth.json\n", gen_out.c_str(), gen_out.c_str());
  } else if (infer->parsed()) {
    if (!config.empty())
      rc = psmkit_load_config(ctx, config.c_str());
    for (const std::string &kv : sets) {
      if (rc != PSMKIT_OK)
        break;
      auto pos = kv.find('=');
      if (pos == std::string::npos) {
        std::fprintf(stderr, "error: --set expects key=value, got '%s'\n", kv.c_str());
        rc = PSMKIT_ERR_CONFIG;
        break;
      }
      rc = psmkit_set_param(ctx, kv.substr(0, pos).c_str(), kv.substr(pos + 1).c_str());
    }
    if (rc == PSMKIT_OK)
      rc = psmkit_infer(ctx, trace.c_str(), format.c_str(), known.empty() ? nullptr : known.c_str(),
                        truth.empty() ? nullptr : truth.c_str(), infer_out.c_str());
    if (rc == PSMKIT_OK)
      print_infer_summary(infer_out);
  } else if (eval->parsed()) {
    rc = psmkit_eval(ctx, artifacts.c_str(), eval_truth.c_str(),
                     report.empty() ? nullptr : report.c_str());
    if (rc == PSMKIT_OK) {
      std::string where = report.empty() ? artifacts + "/report.json" : report;
      nlohmann::json r = read_json(where);
      if (r.is_object()) {
        std::printf("format rand index: %.4f\n", r.value("format_ri", 0.0));
        std::printf("session rand index: %.4f\n", r.value("session_ri", 0.0));
        for (const auto &p : r.value("per_protocol", nlohmann::json::array()))
          std::printf("%s: smc=%.4f tmc=%.4f\n", p.value("protocol", std::string("?")).c_str(),
                      p.value("smc", 0.0), p.value("tmc", 0.0));
      }
      std::printf("wrote %s\n", where.c_str());
    }
  } else if (dot->parsed()) {
    rc = psmkit_export_dot(ctx, psm_json.c_str(), dot_out.c_str());
    if (rc == PSMKIT_OK)
      std::printf("wrote %s\n", dot_out.c_str());
  }

  if (rc != PSMKIT_OK)
    fail(ctx, rc);
  psmkit_ctx_free(ctx);
  return rc;
}
