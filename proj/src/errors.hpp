#pragma once

#include <stdexcept>
#include <string>

namespace psmkit {

// Pipeline stage an error originated in; mirrored 1:1 by the C API status codes.
enum class Stage {
  Config,
  Ingest,
  Mining,
  FormatCluster,
  SessionCluster,
  PsmInfer,
  Metrics,
  Synth,
  Io,
};

inline const char *stage_name(Stage s) {
  switch (s) {
    case Stage::Config: return "config";
    case Stage::Ingest: return "ingest";
    case Stage::Mining: return "mining";
    case Stage::FormatCluster: return "format-cluster";
    case Stage::SessionCluster: return "session-cluster";
    case Stage::PsmInfer: return "psm";
    case Stage::Metrics: return "metrics";
    case Stage::Synth: return "synth";
    case Stage::Io: return "io";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(Stage stage, const std::string &msg)
      : std::runtime_error(std::string(stage_name(stage)) + ": " + msg), stage_(stage) {}

  Stage stage() const { return stage_; }

 private:
  Stage stage_;
};

}  // namespace psmkit
