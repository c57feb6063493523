#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "errors.hpp"
#include "json_util.hpp"
#include "pipeline.hpp"
#include "psm.hpp"
#include "synth.hpp"

using namespace psmkit;

namespace {

std::filesystem::path temp_dir(const std::string &tag) {
  auto dir = std::filesystem::temp_directory_path() / ("psmkit_pipeline_" + tag);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

struct Corpus {
  std::filesystem::path dir;
  std::string trace;
  std::string truth;
};

Corpus make_corpus(const std::string &tag, int sessions_per_spec, double noise, std::uint64_t seed) {
  Corpus c;
  c.dir = temp_dir(tag);
  generate_corpus({builtin_spec("tlsish"), builtin_spec("smtpish")}, sessions_per_spec, noise,
                  seed, c.dir.string());
  c.trace = (c.dir / "trace.jsonl").string();
  c.truth = (c.dir / "truth.json").string();
  return c;
}

}  // namespace

TEST_CASE("pipeline parameters echo to JSON and back") {
  PipelineParams p;
  nlohmann::json j = params_to_json(p);
  const char *expected_keys[] = {
      "min_support", "max_scan_bytes", "eps_min", "eps_max", "minpts_min", "minpts_max",
      "eps_step", "minpts_step", "tol", "eps_step_min", "eps_step_max", "minpts_step_min",
      "minpts_step_max", "max_iters", "match", "mismatch", "gap", "min_prob", "min_share",
      "seed"};
  CHECK(j.size() == 20);
  for (const char *key : expected_keys)
    CHECK(j.contains(key));
  CHECK(j["min_support"] == doctest::Approx(0.35));
  CHECK(j["eps_min"] == doctest::Approx(0.1));
  CHECK(j["eps_max"] == doctest::Approx(2.0));
  CHECK(j["minpts_min"] == 5);
  CHECK(j["minpts_max"] == 50);
  CHECK(j["tol"] == doctest::Approx(0.01));
  CHECK(j["match"] == 2);
  CHECK(j["mismatch"] == -1);
  CHECK(j["gap"] == -1);
  CHECK(j["min_prob"] == doctest::Approx(0.05));
  CHECK(j["min_share"] == doctest::Approx(0.05));
  CHECK(j["seed"] == 1);

  PipelineParams back = params_from_json(j);
  CHECK(params_to_json(back) == j);
}

TEST_CASE("params_from_json accepts partial objects and rejects unknown keys") {
  auto p = params_from_json(nlohmann::json{{"min_support", 0.5}, {"minpts_min", 3}});
  CHECK(p.mining.min_support == doctest::Approx(0.5));
  CHECK(p.acda.minpts_min == 3);
  CHECK(p.acda.eps_min == doctest::Approx(0.1));  // untouched default

  CHECK_THROWS_AS(params_from_json(nlohmann::json{{"min_suport", 0.5}}), Error);
  CHECK_THROWS_AS(params_from_json(nlohmann::json::array()), Error);
  CHECK_THROWS_AS(params_from_json(nlohmann::json{{"min_support", "high"}}), Error);
}

TEST_CASE("apply_param parses one key=value assignment") {
  PipelineParams p;
  apply_param(p, "min_support", "0.4");
  CHECK(p.mining.min_support == doctest::Approx(0.4));
  apply_param(p, "mismatch", "-3");
  CHECK(p.align.mismatch == -3);
  apply_param(p, "seed", "12345");
  CHECK(p.seed == 12345);

  CHECK_THROWS_AS(apply_param(p, "bogus", "1"), Error);
  CHECK_THROWS_AS(apply_param(p, "min_support", "lots"), Error);
  CHECK_THROWS_AS(apply_param(p, "min_support", "\"0.4\""), Error);
}

TEST_CASE("run_infer produces the full artifact set") {
  Corpus corpus = make_corpus("infer", 15, 0.02, 3);
  auto out = temp_dir("infer_out");

  InferRequest req;
  req.trace_path = corpus.trace;
  req.truth_path = corpus.truth;
  req.out_dir = out.string();
  InferSummary sum = run_infer(req);

  CHECK(sum.packets == sum.messages);
  CHECK(sum.sessions == 30);
  CHECK(sum.items > 0);
  CHECK(sum.format_clusters >= 2);
  CHECK(sum.session_clusters >= 1);

  auto mfi = load_json_file((out / "mfi.json").string());
  CHECK(mfi.is_array());
  CHECK(mfi.size() == sum.items);

  auto pfc = load_json_file((out / "pfc.json").string());
  CHECK(pfc.at("cluster_count").get<int>() == sum.format_clusters);
  CHECK(pfc.at("labels").size() == sum.messages);
  CHECK(pfc.at("eps").get<double>() > 0.0);
  CHECK(pfc.at("minpts").get<int>() >= 1);
  CHECK(pfc.at("sc").get<double>() == doctest::Approx(sum.format_sc));

  auto sessions = load_json_file((out / "sessions.json").string());
  CHECK(sessions.at("k").get<int>() == sum.session_clusters);
  CHECK(sessions.at("labels").size() == sum.sessions);
  CHECK(sessions.at("medoids").size() == static_cast<std::size_t>(sum.session_clusters));

  for (int c = 0; c < sum.session_clusters; ++c) {
    auto m = psm_from_json(load_json_file((out / ("psm_" + std::to_string(c) + ".json")).string()));
    CHECK(m.states.size() >= 2);
    std::ifstream dot(out / ("psm_" + std::to_string(c) + ".dot"));
    CHECK(dot.good());
  }

  auto config = load_json_file((out / "config.json").string());
  CHECK(config == params_to_json(PipelineParams{}));

  auto report = load_json_file((out / "report.json").string());
  CHECK(report.at("format_ri").get<double>() >= 0.0);
  CHECK(report.at("format_ri").get<double>() <= 1.0);
  CHECK(report.at("session_ri").get<double>() >= 0.0);
  REQUIRE(report.at("per_protocol").size() == 2);
  for (const auto &pp : report.at("per_protocol")) {
    CHECK(pp.contains("protocol"));
    CHECK(pp.contains("session_cluster"));
    CHECK(pp.at("smc").get<double>() >= 0.0);
    CHECK(pp.at("smc").get<double>() <= 1.0);
    CHECK(pp.at("tmc").get<double>() >= 0.0);
    CHECK(pp.at("tmc").get<double>() <= 1.0);
  }
  CHECK(report.at("parameters") == config);

  std::filesystem::remove_all(corpus.dir);
  std::filesystem::remove_all(out);
}

TEST_CASE("two identical runs write byte-identical artifacts") {
  Corpus corpus = make_corpus("repro", 10, 0.02, 11);
  auto out1 = temp_dir("repro_out1");
  auto out2 = temp_dir("repro_out2");

  InferRequest req;
  req.trace_path = corpus.trace;
  req.truth_path = corpus.truth;
  req.out_dir = out1.string();
  run_infer(req);
  req.out_dir = out2.string();
  run_infer(req);

  std::size_t compared = 0;
  for (const auto &entry : std::filesystem::directory_iterator(out1)) {
    auto name = entry.path().filename().string();
    CAPTURE(name);
    CHECK(read_file(entry.path().string()) == read_file((out2 / name).string()));
    ++compared;
  }
  CHECK(compared >= 6);  // mfi, pfc, sessions, config, report, psm files

  std::filesystem::remove_all(corpus.dir);
  std::filesystem::remove_all(out1);
  std::filesystem::remove_all(out2);
}

TEST_CASE("run_eval recomputes the same report from artifacts") {
  Corpus corpus = make_corpus("eval", 10, 0.02, 5);
  auto out = temp_dir("eval_out");

  InferRequest req;
  req.trace_path = corpus.trace;
  req.truth_path = corpus.truth;
  req.out_dir = out.string();
  run_infer(req);

  std::string from_infer = read_file((out / "report.json").string());
  std::filesystem::remove(out / "report.json");

  nlohmann::json report = run_eval(out.string(), corpus.truth);
  CHECK(read_file((out / "report.json").string()) == from_infer);
  CHECK(report.at("per_protocol").size() == 2);

  // An explicit report path leaves the default location alone.
  std::filesystem::remove(out / "report.json");
  auto custom = out / "scores.json";
  run_eval(out.string(), corpus.truth, custom.string());
  CHECK(std::filesystem::exists(custom));
  CHECK(!std::filesystem::exists(out / "report.json"));
  CHECK(read_file(custom.string()) == from_infer);

  CHECK_THROWS_AS(run_eval((out / "nowhere").string(), corpus.truth), Error);

  std::filesystem::remove_all(corpus.dir);
  std::filesystem::remove_all(out);
}

TEST_CASE("known-protocol filtering removes foreign traffic before inference") {
  Corpus corpus = make_corpus("known", 8, 0.0, 21);
  auto out_plain = temp_dir("known_plain");
  auto out_filtered = temp_dir("known_filtered");

  InferRequest req;
  req.trace_path = corpus.trace;
  req.out_dir = out_plain.string();
  InferSummary plain = run_infer(req);

  // Append foreign chatter on a well-known port to a copy of the trace.
  std::string noisy_trace = (corpus.dir / "noisy.jsonl").string();
  {
    std::ofstream noisy(noisy_trace);
    noisy << read_file(corpus.trace);
    for (int i = 0; i < 40; ++i)
      noisy << R"({"ts": 1900000000.)" << i << R"(, "src": "8.8.8.8:53", "dst": "10.9.0.7:4)"
            << 1000 + i << R"(", "proto": "udp", "payload_hex": "abad1dea"})"
            << "\n";
  }
  std::string models = (corpus.dir / "known.json").string();
  write_file(models, R"([{"name": "dns", "ports": [53]}])");

  req.trace_path = noisy_trace;
  req.known_models_path = models;
  req.out_dir = out_filtered.string();
  InferSummary filtered = run_infer(req);

  CHECK(filtered.packets == plain.packets);
  CHECK(filtered.sessions == plain.sessions);
  for (const char *artifact : {"mfi.json", "pfc.json", "sessions.json"})
    CHECK(read_file((out_filtered / artifact).string()) ==
          read_file((out_plain / artifact).string()));

  std::filesystem::remove_all(corpus.dir);
  std::filesystem::remove_all(out_plain);
  std::filesystem::remove_all(out_filtered);
}

TEST_CASE("export_dot_file renders a machine JSON as DOT") {
  Corpus corpus = make_corpus("dot", 8, 0.0, 2);
  auto out = temp_dir("dot_out");

  InferRequest req;
  req.trace_path = corpus.trace;
  req.out_dir = out.string();
  run_infer(req);

  auto dot_path = out / "exported.dot";
  export_dot_file((out / "psm_0.json").string(), dot_path.string());
  std::string dot = read_file(dot_path.string());
  CHECK(dot.rfind("digraph psm {", 0) == 0);
  CHECK(dot.find("->") != std::string::npos);

  CHECK_THROWS_AS(export_dot_file((out / "missing.json").string(), dot_path.string()), Error);

  std::filesystem::remove_all(corpus.dir);
  std::filesystem::remove_all(out);
}

TEST_CASE("run_infer rejects unusable requests") {
  Corpus corpus = make_corpus("reject", 4, 0.0, 9);
  auto out = temp_dir("reject_out");

  InferRequest req;
  req.trace_path = (corpus.dir / "missing.jsonl").string();
  req.out_dir = out.string();
  CHECK_THROWS_AS(run_infer(req), Error);

  req.trace_path = corpus.trace;
  req.out_dir = "";
  CHECK_THROWS_AS(run_infer(req), Error);

  req.out_dir = out.string();
  req.params.mining.min_support = 2.0;
  CHECK_THROWS_AS(run_infer(req), Error);
  req.params.mining.min_support = 0.35;

  // Filtering away every packet leaves nothing to learn from.
  std::string models = (corpus.dir / "all.json").string();
  write_file(models, R"([{"name": "everything", "ports": [4443, 2525]}])");
  req.known_models_path = models;
  try {
    run_infer(req);
    FAIL("expected an ingest error");
  } catch (const Error &e) {
    CHECK(e.stage() == Stage::Ingest);
  }

  std::filesystem::remove_all(corpus.dir);
  std::filesystem::remove_all(out);
}
