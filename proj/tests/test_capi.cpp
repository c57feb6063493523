// Exercises libpsmkit strictly through the C interface; no core headers.
#include <doctest.h>

#include <psmkit/psmkit.h>

#include <filesystem>
#include <fstream>
#include <memory>
#include <string>

namespace {

struct CtxDeleter {
  void operator()(psmkit_ctx *ctx) const { psmkit_ctx_free(ctx); }
};
using CtxPtr = std::unique_ptr<psmkit_ctx, CtxDeleter>;

CtxPtr make_ctx() {
  CtxPtr ctx(psmkit_ctx_new());
  REQUIRE(ctx != nullptr);
  return ctx;
}

std::filesystem::path temp_dir(const std::string &tag) {
  auto dir = std::filesystem::temp_directory_path() / ("psmkit_capi_" + tag);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

std::string slurp(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

}  // namespace

TEST_CASE("version and status names are stable") {
  CHECK(std::string(psmkit_version()) == "0.1.0");
  CHECK(std::string(psmkit_status_name(PSMKIT_OK)) == "ok");
  CHECK(std::string(psmkit_status_name(PSMKIT_ERR_CONFIG)) == "config");
  CHECK(std::string(psmkit_status_name(PSMKIT_ERR_INGEST)) == "ingest");
  CHECK(std::string(psmkit_status_name(PSMKIT_ERR_MINING)) == "mining");
  CHECK(std::string(psmkit_status_name(PSMKIT_ERR_FORMAT_CLUSTER)) == "format-cluster");
  CHECK(std::string(psmkit_status_name(PSMKIT_ERR_SESSION_CLUSTER)) == "session-cluster");
  CHECK(std::string(psmkit_status_name(PSMKIT_ERR_PSM)) == "psm");
  CHECK(std::string(psmkit_status_name(PSMKIT_ERR_METRICS)) == "metrics");
  CHECK(std::string(psmkit_status_name(PSMKIT_ERR_SYNTH)) == "synth");
  CHECK(std::string(psmkit_status_name(PSMKIT_ERR_IO)) == "io");
  CHECK(std::string(psmkit_status_name(PSMKIT_ERR_USAGE)) == "usage");
  CHECK(std::string(psmkit_status_name(PSMKIT_ERR_INTERNAL)) == "internal");
  CHECK(std::string(psmkit_status_name(99)) == "unknown");
  CHECK(std::string(psmkit_status_name(-1)) == "unknown");
}

TEST_CASE("null handles are rejected without crashing") {
  CHECK(psmkit_set_param(nullptr, "seed", "2") == PSMKIT_ERR_USAGE);
  CHECK(psmkit_load_config(nullptr, "x.json") == PSMKIT_ERR_USAGE);
  CHECK(psmkit_gen(nullptr, nullptr, 0, 1, 0.0, 1, "out") == PSMKIT_ERR_USAGE);
  CHECK(psmkit_infer(nullptr, "t", "auto", nullptr, nullptr, "out") == PSMKIT_ERR_USAGE);
  CHECK(psmkit_eval(nullptr, "d", "t", nullptr) == PSMKIT_ERR_USAGE);
  CHECK(psmkit_export_dot(nullptr, "a", "b") == PSMKIT_ERR_USAGE);
  CHECK(std::string(psmkit_last_error(nullptr)) == "");
  psmkit_ctx_free(nullptr);  // must be a no-op
}

TEST_CASE("last_error tracks the most recent failure") {
  auto ctx = make_ctx();
  CHECK(std::string(psmkit_last_error(ctx.get())) == "");

  CHECK(psmkit_set_param(ctx.get(), "bogus", "1") == PSMKIT_ERR_CONFIG);
  std::string msg = psmkit_last_error(ctx.get());
  CHECK(msg.find("bogus") != std::string::npos);

  CHECK(psmkit_set_param(ctx.get(), "min_support", "0.4") == PSMKIT_OK);
  CHECK(std::string(psmkit_last_error(ctx.get())) == "");

  CHECK(psmkit_set_param(ctx.get(), nullptr, "1") == PSMKIT_ERR_CONFIG);
  CHECK(psmkit_set_param(ctx.get(), "min_support", "abc") == PSMKIT_ERR_CONFIG);
}

TEST_CASE("config files replace the whole parameter set") {
  auto ctx = make_ctx();
  auto dir = temp_dir("config");

  auto good = dir / "good.json";
  std::ofstream(good) << R"({"eps_max": 1.5, "seed": 7})";
  CHECK(psmkit_load_config(ctx.get(), good.string().c_str()) == PSMKIT_OK);

  auto bad = dir / "bad.json";
  std::ofstream(bad) << R"({"eps_maximum": 1.5})";
  CHECK(psmkit_load_config(ctx.get(), bad.string().c_str()) == PSMKIT_ERR_CONFIG);

  auto missing = dir / "missing.json";
  CHECK(psmkit_load_config(ctx.get(), missing.string().c_str()) == PSMKIT_ERR_IO);
  CHECK(psmkit_load_config(ctx.get(), nullptr) == PSMKIT_ERR_CONFIG);

  std::filesystem::remove_all(dir);
}

TEST_CASE("generate, infer, eval and export run end to end") {
  auto ctx = make_ctx();
  auto corpus = temp_dir("corpus");
  auto out = temp_dir("artifacts");

  const char *specs[] = {"tlsish", "smtpish"};
  REQUIRE(psmkit_gen(ctx.get(), specs, 2, 8, 0.02, 4, corpus.string().c_str()) == PSMKIT_OK);
  auto trace = corpus / "trace.jsonl";
  auto truth = corpus / "truth.json";
  CHECK(std::filesystem::exists(trace));
  CHECK(std::filesystem::exists(truth));

  REQUIRE(psmkit_infer(ctx.get(), trace.string().c_str(), "auto", nullptr,
                       truth.string().c_str(), out.string().c_str()) == PSMKIT_OK);
  for (const char *artifact : {"mfi.json", "pfc.json", "sessions.json", "config.json",
                               "psm_0.json", "report.json"})
    CHECK(std::filesystem::exists(out / artifact));

  std::string report_from_infer = slurp(out / "report.json");
  auto rescored = out / "rescored.json";
  REQUIRE(psmkit_eval(ctx.get(), out.string().c_str(), truth.string().c_str(),
                      rescored.string().c_str()) == PSMKIT_OK);
  CHECK(slurp(rescored) == report_from_infer);

  auto dot = out / "exported.dot";
  REQUIRE(psmkit_export_dot(ctx.get(), (out / "psm_0.json").string().c_str(),
                            dot.string().c_str()) == PSMKIT_OK);
  CHECK(slurp(dot).rfind("digraph psm {", 0) == 0);

  std::filesystem::remove_all(corpus);
  std::filesystem::remove_all(out);
}

TEST_CASE("failures map onto the matching status codes") {
  auto ctx = make_ctx();
  auto dir = temp_dir("status");

  const char *specs[] = {"tlsish"};
  CHECK(psmkit_gen(ctx.get(), specs, 1, 0, 0.0, 1, dir.string().c_str()) == PSMKIT_ERR_SYNTH);
  CHECK(psmkit_gen(ctx.get(), nullptr, 0, 1, 0.0, 1, dir.string().c_str()) == PSMKIT_ERR_SYNTH);
  const char *missing_spec[] = {"no_such_spec.json"};
  CHECK(psmkit_gen(ctx.get(), missing_spec, 1, 2, 0.0, 1, dir.string().c_str()) == PSMKIT_ERR_IO);

  REQUIRE(psmkit_gen(ctx.get(), specs, 1, 4, 0.0, 1, dir.string().c_str()) == PSMKIT_OK);
  auto trace = (dir / "trace.jsonl").string();
  auto out = (dir / "out").string();
  CHECK(psmkit_infer(ctx.get(), trace.c_str(), "xml", nullptr, nullptr, out.c_str()) ==
        PSMKIT_ERR_CONFIG);
  CHECK(psmkit_infer(ctx.get(), trace.c_str(), "pcap", nullptr, nullptr, out.c_str()) ==
        PSMKIT_ERR_INGEST);
  CHECK(psmkit_infer(ctx.get(), nullptr, "auto", nullptr, nullptr, out.c_str()) ==
        PSMKIT_ERR_CONFIG);
  CHECK(psmkit_eval(ctx.get(), (dir / "nowhere").string().c_str(),
                    (dir / "truth.json").string().c_str(), nullptr) == PSMKIT_ERR_IO);
  CHECK(psmkit_eval(ctx.get(), out.c_str(), nullptr, nullptr) == PSMKIT_ERR_CONFIG);
  CHECK(psmkit_export_dot(ctx.get(), (dir / "none.json").string().c_str(),
                          (dir / "o.dot").string().c_str()) == PSMKIT_ERR_IO);

  std::filesystem::remove_all(dir);
}
