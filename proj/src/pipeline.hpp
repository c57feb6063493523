#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include <json.hpp>

#include "acda.hpp"
#include "align.hpp"
#include "mfi.hpp"
#include "pfts.hpp"
#include "synth.hpp"
#include "trace.hpp"

namespace psmkit {

// Every tunable of the inference pipeline. JSON form uses the same field
// names; config.json written next to the artifacts echoes exactly these.
struct PipelineParams {
  MiningConfig mining;
  AcdaConfig acda;
  AlignmentParams align;
  NoiseThresholds thresholds;
  std::uint64_t seed = 1;

  void validate() const;
};

nlohmann::json params_to_json(const PipelineParams &p);
PipelineParams params_from_json(const nlohmann::json &j);
// Sets one field by its JSON name from a string value ("min_support=0.3").
void apply_param(PipelineParams &p, const std::string &key, const std::string &value);

struct InferRequest {
  std::string trace_path;
  TraceFormat trace_format = TraceFormat::Auto;
  std::string known_models_path;  // optional
  std::string truth_path;         // optional; adds report.json
  std::string out_dir;
  PipelineParams params;
};

struct InferSummary {
  std::size_t packets = 0;
  std::size_t sessions = 0;
  std::size_t messages = 0;
  std::size_t items = 0;
  int format_clusters = 0;
  double format_sc = 0.0;
  int session_clusters = 0;
  std::optional<double> session_sc;
};

// Runs ingest, mining, format clustering, session clustering and machine
// inference, writing mfi.json, pfc.json, sessions.json, one psm_<k>.json and
// psm_<k>.dot per session cluster, config.json and, when ground truth was
// given, report.json into out_dir.
InferSummary run_infer(const InferRequest &req);

// Scores artifacts written by run_infer against ground truth and writes
// report.json (into report_path, or artifacts_dir/report.json when empty).
nlohmann::json run_eval(const std::string &artifacts_dir, const std::string &truth_path,
                        const std::string &report_path = {});

void export_dot_file(const std::string &psm_json_path, const std::string &out_path);

}  // namespace psmkit
