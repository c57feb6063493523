#include "pipeline.hpp"

#include <filesystem>
#include <functional>
#include <map>

#include "cluster.hpp"
#include "errors.hpp"
#include "features.hpp"
#include "json_util.hpp"
#include "known.hpp"
#include "metrics.hpp"
#include "psm.hpp"
#include "sessions.hpp"

namespace psmkit {

void PipelineParams::validate() const {
  mining.validate();
  acda.validate();
  align.validate();
  thresholds.validate();
}

nlohmann::json params_to_json(const PipelineParams &p) {
  return nlohmann::json{{"min_support", p.mining.min_support},
                        {"max_scan_bytes", p.mining.max_scan_bytes},
                        {"eps_min", p.acda.eps_min},
                        {"eps_max", p.acda.eps_max},
                        {"minpts_min", p.acda.minpts_min},
                        {"minpts_max", p.acda.minpts_max},
                        {"eps_step", p.acda.eps_step},
                        {"minpts_step", p.acda.minpts_step},
                        {"tol", p.acda.tol},
                        {"eps_step_min", p.acda.eps_step_min},
                        {"eps_step_max", p.acda.eps_step_max},
                        {"minpts_step_min", p.acda.minpts_step_min},
                        {"minpts_step_max", p.acda.minpts_step_max},
                        {"max_iters", p.acda.max_iters},
                        {"match", p.align.match},
                        {"mismatch", p.align.mismatch},
                        {"gap", p.align.gap},
                        {"min_prob", p.thresholds.min_prob},
                        {"min_share", p.thresholds.min_share},
                        {"seed", p.seed}};
}

namespace {

struct ParamField {
  enum Kind { Double, Int, Size, U64 } kind;
  void *ptr;
};

std::map<std::string, ParamField> param_fields(PipelineParams &p) {
  return {
      {"min_support", {ParamField::Double, &p.mining.min_support}},
      {"max_scan_bytes", {ParamField::Size, &p.mining.max_scan_bytes}},
      {"eps_min", {ParamField::Double, &p.acda.eps_min}},
      {"eps_max", {ParamField::Double, &p.acda.eps_max}},
      {"minpts_min", {ParamField::Int, &p.acda.minpts_min}},
      {"minpts_max", {ParamField::Int, &p.acda.minpts_max}},
      {"eps_step", {ParamField::Double, &p.acda.eps_step}},
      {"minpts_step", {ParamField::Int, &p.acda.minpts_step}},
      {"tol", {ParamField::Double, &p.acda.tol}},
      {"eps_step_min", {ParamField::Double, &p.acda.eps_step_min}},
      {"eps_step_max", {ParamField::Double, &p.acda.eps_step_max}},
      {"minpts_step_min", {ParamField::Int, &p.acda.minpts_step_min}},
      {"minpts_step_max", {ParamField::Int, &p.acda.minpts_step_max}},
      {"max_iters", {ParamField::Int, &p.acda.max_iters}},
      {"match", {ParamField::Int, &p.align.match}},
      {"mismatch", {ParamField::Int, &p.align.mismatch}},
      {"gap", {ParamField::Int, &p.align.gap}},
      {"min_prob", {ParamField::Double, &p.thresholds.min_prob}},
      {"min_share", {ParamField::Double, &p.thresholds.min_share}},
      {"seed", {ParamField::U64, &p.seed}},
  };
}

void assign_field(const ParamField &f, const nlohmann::json &v) {
  switch (f.kind) {
    case ParamField::Double:
      *static_cast<double *>(f.ptr) = v.get<double>();
      break;
    case ParamField::Int:
      *static_cast<int *>(f.ptr) = v.get<int>();
      break;
    case ParamField::Size:
      *static_cast<std::size_t *>(f.ptr) = v.get<std::size_t>();
      break;
    case ParamField::U64:
      *static_cast<std::uint64_t *>(f.ptr) = v.get<std::uint64_t>();
      break;
  }
}

}  // namespace

PipelineParams params_from_json(const nlohmann::json &j) {
  if (!j.is_object())
    throw Error(Stage::Config, "parameters must be a JSON object");
  PipelineParams p;
  auto fields = param_fields(p);
  for (const auto &[key, value] : j.items()) {
    auto it = fields.find(key);
    if (it == fields.end())
      throw Error(Stage::Config, "unknown parameter '" + key + "'");
    try {
      assign_field(it->second, value);
    } catch (const std::exception &) {
      throw Error(Stage::Config, "bad value for parameter '" + key + "'");
    }
  }
  return p;
}

void apply_param(PipelineParams &p, const std::string &key, const std::string &value) {
  auto fields = param_fields(p);
  auto it = fields.find(key);
  if (it == fields.end())
    throw Error(Stage::Config, "unknown parameter '" + key + "'");
  nlohmann::json v = nlohmann::json::parse(value, nullptr, false);
  if (v.is_discarded() || !(v.is_number() || v.is_number_integer()))
    throw Error(Stage::Config, "bad value for parameter '" + key + "'");
  try {
    assign_field(it->second, v);
  } catch (const std::exception &) {
    throw Error(Stage::Config, "bad value for parameter '" + key + "'");
  }
}

namespace {

nlohmann::json build_report(const std::vector<int> &format_labels,
                            const std::vector<int> &session_labels,
                            const std::vector<Psm> &cluster_psms, const GroundTruth &truth,
                            const nlohmann::json &params_echo) {
  std::vector<int> truth_formats = truth.flat_formats();
  if (truth_formats.size() != format_labels.size())
    throw Error(Stage::Metrics, "ground truth message count does not match the trace");
  std::vector<int> truth_protocols = truth.session_protocols();
  if (truth_protocols.size() != session_labels.size())
    throw Error(Stage::Metrics, "ground truth session count does not match the trace");
  if (truth.reference_psms.size() != truth.protocols.size())
    throw Error(Stage::Metrics, "ground truth needs one reference machine per protocol");

  nlohmann::json report;
  report["format_ri"] = rand_index(format_labels, truth_formats);
  report["session_ri"] = rand_index(session_labels, truth_protocols);

  std::map<int, int> format_map = majority_label_map(format_labels, truth_formats);

  nlohmann::json per_protocol = nlohmann::json::array();
  for (std::size_t p = 0; p < truth.protocols.size(); ++p) {
    std::map<int, long long> votes;
    for (std::size_t s = 0; s < session_labels.size(); ++s)
      if (truth_protocols[s] == static_cast<int>(p))
        ++votes[session_labels[s]];
    if (votes.empty())
      throw Error(Stage::Metrics, "ground truth protocol '" + truth.protocols[p] + "' has no sessions");
    int cluster = 0;
    long long best = -1;
    for (const auto &[label, count] : votes) {
      if (count > best) {
        best = count;
        cluster = label;
      }
    }
    if (cluster < 0 || static_cast<std::size_t>(cluster) >= cluster_psms.size())
      throw Error(Stage::Metrics, "no inferred machine for session cluster " + std::to_string(cluster));
    Psm mapped = relabel_psm(cluster_psms[static_cast<std::size_t>(cluster)], format_map);
    const Psm &ref = truth.reference_psms[p];
    per_protocol.push_back({{"protocol", truth.protocols[p]},
                            {"session_cluster", cluster},
                            {"smc", state_machine_correspondence(mapped, ref)},
                            {"tmc", transition_correspondence(mapped, ref)}});
  }
  report["per_protocol"] = std::move(per_protocol);
  report["parameters"] = params_echo;
  return report;
}

}  // namespace

InferSummary run_infer(const InferRequest &req) {
  req.params.validate();
  if (req.out_dir.empty())
    throw Error(Stage::Config, "no output directory given");

  std::vector<RawPacket> packets = load_trace(req.trace_path, req.trace_format);
  if (!req.known_models_path.empty())
    packets = filter_known(packets, load_known_models(req.known_models_path));
  if (packets.empty())
    throw Error(Stage::Ingest, "no usable packets in the trace");

  std::vector<Session> sessions = slice_sessions(packets);
  std::vector<Bytes> payloads = flatten_payloads(sessions);

  std::vector<FrequentItem> items = extract_mfi(payloads, req.params.mining);
  std::vector<FeatureVector> rows = feature_vectors(payloads, items);
  DistanceMatrix dist = DistanceMatrix::from_vectors(rows);
  PfcLabeling pfc = acda(dist, req.params.acda);

  std::vector<SessionSequence> seqs = label_sessions(sessions, pfc.labels);
  SessionClustering clusters =
      cluster_sessions(seqs, pfc.cluster_count, req.params.align, req.params.seed);

  // Dominant message direction per format decides client vs server states.
  std::map<int, std::pair<long long, long long>> dir_votes;  // label -> (initiator, responder)
  {
    std::size_t i = 0;
    for (const Session &s : sessions)
      for (const Message &m : s.messages) {
        int label = pfc.labels[i++];
        if (label >= 0) {
          if (m.direction == Direction::Initiator)
            ++dir_votes[label].first;
          else
            ++dir_votes[label].second;
        }
      }
  }
  std::map<int, Direction> directions;
  for (const auto &[label, votes] : dir_votes)
    directions[label] = votes.second > votes.first ? Direction::Responder : Direction::Initiator;

  std::vector<Psm> psms;
  for (int c = 0; c < clusters.k; ++c) {
    std::vector<SessionSequence> members;
    for (std::size_t s = 0; s < seqs.size(); ++s)
      if (clusters.labels[s] == c)
        members.push_back(seqs[s]);
    Pfts filtered = filter_noise(build_pfts(members), req.params.thresholds);
    psms.push_back(pfts_to_psm(filtered, directions));
  }

  std::filesystem::create_directories(req.out_dir);
  auto path = [&](const std::string &name) { return req.out_dir + "/" + name; };
  write_json_file(path("mfi.json"), mfi_to_json(items));
  write_json_file(path("pfc.json"), nlohmann::json{{"cluster_count", pfc.cluster_count},
                                                   {"eps", pfc.eps},
                                                   {"minpts", pfc.minpts},
                                                   {"sc", pfc.sc},
                                                   {"labels", pfc.labels}});
  write_json_file(path("sessions.json"),
                  nlohmann::json{{"k", clusters.k},
                                 {"sc", clusters.sc.has_value() ? nlohmann::json(*clusters.sc)
                                                                : nlohmann::json(nullptr)},
                                 {"labels", clusters.labels},
                                 {"medoids", clusters.medoids}});
  for (int c = 0; c < clusters.k; ++c) {
    const Psm &m = psms[static_cast<std::size_t>(c)];
    std::string stem = "psm_" + std::to_string(c);
    write_json_file(path(stem + ".json"), psm_to_json(m));
    write_file(path(stem + ".dot"), psm_to_dot(m, stem));
  }
  write_json_file(path("config.json"), params_to_json(req.params));

  if (!req.truth_path.empty()) {
    GroundTruth truth = load_truth(req.truth_path);
    nlohmann::json report =
        build_report(pfc.labels, clusters.labels, psms, truth, params_to_json(req.params));
    write_json_file(path("report.json"), report);
  }

  InferSummary sum;
  sum.packets = packets.size();
  sum.sessions = sessions.size();
  sum.messages = payloads.size();
  sum.items = items.size();
  sum.format_clusters = pfc.cluster_count;
  sum.format_sc = pfc.sc;
  sum.session_clusters = clusters.k;
  sum.session_sc = clusters.sc;
  return sum;
}

nlohmann::json run_eval(const std::string &artifacts_dir, const std::string &truth_path,
                        const std::string &report_path) {
  auto path = [&](const std::string &name) { return artifacts_dir + "/" + name; };
  nlohmann::json pfc = load_json_file(path("pfc.json"));
  nlohmann::json sessions = load_json_file(path("sessions.json"));
  nlohmann::json params_echo = load_json_file(path("config.json"));

  std::vector<int> format_labels, session_labels;
  int k = 0;
  try {
    format_labels = pfc.at("labels").get<std::vector<int>>();
    session_labels = sessions.at("labels").get<std::vector<int>>();
    k = sessions.at("k").get<int>();
  } catch (const std::exception &e) {
    throw Error(Stage::Io, std::string("bad artifacts: ") + e.what());
  }
  std::vector<Psm> psms;
  for (int c = 0; c < k; ++c)
    psms.push_back(psm_from_json(load_json_file(path("psm_" + std::to_string(c) + ".json"))));

  GroundTruth truth = load_truth(truth_path);
  nlohmann::json report = build_report(format_labels, session_labels, psms, truth, params_echo);
  write_json_file(report_path.empty() ? path("report.json") : report_path, report);
  return report;
}

void export_dot_file(const std::string &psm_json_path, const std::string &out_path) {
  Psm m = psm_from_json(load_json_file(psm_json_path));
  write_file(out_path, psm_to_dot(m, "psm"));
}

}  // namespace psmkit
