#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "psm.hpp"
#include "rng.hpp"
#include "trace.hpp"

namespace psmkit {

struct FormatTemplate {
  std::string name;
  Role role = Role::Client;  // who sends messages of this format
  Bytes magic;               // constant prefix, the format's identity
  bool length_field = false;  // append filler length as 16-bit big-endian
  std::uint8_t filler_byte = 0;
  int filler_min = 0;
  int filler_max = 0;
  Bytes trailer;
};

struct SpecEdge {
  int from = -1;  // format index, -1 for the start state
  int to = -1;    // format index, -1 for the end state
  double p = 0.0;
};

struct ProtocolSpec {
  std::string name;
  std::string server;  // "addr:port" the generated sessions talk to
  int session_cap = 0;  // walk truncates after this many messages
  std::vector<FormatTemplate> formats;
  std::vector<SpecEdge> edges;

  void validate() const;
  int format_index(const std::string &name) const;
};

ProtocolSpec spec_from_json(const nlohmann::json &j);
ProtocolSpec load_protocol_spec(const std::string &path);

// Built-in specs: a binary handshake protocol ("tlsish", 4 formats, strict
// client/server turns) and a text command protocol ("smtpish", 5 formats,
// client-driven). Unknown names throw.
const std::vector<std::string> &builtin_spec_names();
const ProtocolSpec &builtin_spec(const std::string &name);

Bytes render_message(const FormatTemplate &fmt, Rng &rng);

struct SampledSession {
  std::vector<int> formats;  // per message, index into spec.formats
  std::vector<Bytes> payloads;
};

// One random walk through the spec's state machine.
SampledSession sample_session(const ProtocolSpec &spec, Rng &rng);
SampledSession sample_session(const ProtocolSpec &spec, std::uint64_t seed);

// Ideal state machine of a spec with format labels shifted by label_offset,
// for comparing inferred machines against.
Psm reference_psm(const ProtocolSpec &spec, int label_offset);

struct TruthMessage {
  int format = -1;  // global format id; -1 for corrupted messages
  bool noise = false;
};

struct TruthSession {
  int protocol = 0;  // index into GroundTruth::protocols
  std::vector<TruthMessage> messages;
};

struct GroundTruth {
  std::vector<std::string> protocols;
  std::vector<std::string> format_names;  // position = global format id
  std::vector<TruthSession> sessions;     // in trace session order
  std::vector<Psm> reference_psms;        // one per protocol

  std::vector<int> flat_formats() const;    // per message, -1 for noise
  std::vector<int> session_protocols() const;
};

nlohmann::json truth_to_json(const GroundTruth &t);
GroundTruth truth_from_json(const nlohmann::json &j);
GroundTruth load_truth(const std::string &path);

// Writes trace.jsonl and truth.json under out_dir: sessions_per_spec walks of
// every spec, a noise_rate share of messages replaced with random bytes, all
// reproducible from the seed.
struct CorpusSummary {
  std::size_t sessions = 0;
  std::size_t messages = 0;
  std::size_t corrupted = 0;
};
CorpusSummary generate_corpus(const std::vector<ProtocolSpec> &specs, int sessions_per_spec,
                              double noise_rate, std::uint64_t seed, const std::string &out_dir);

}  // namespace psmkit
