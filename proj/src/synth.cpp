#include "synth.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <map>
#include <sstream>

#include "errors.hpp"
#include "json_util.hpp"

namespace psmkit {

void ProtocolSpec::validate() const {
  if (name.empty())
    throw Error(Stage::Synth, "protocol spec needs a name");
  if (formats.empty())
    throw Error(Stage::Synth, "spec '" + name + "' has no formats");
  if (session_cap < 1)
    throw Error(Stage::Synth, "spec '" + name + "': session_cap must be at least 1");
  if (server.find(':') == std::string::npos)
    throw Error(Stage::Synth, "spec '" + name + "': server must be addr:port");
  std::map<std::string, int> seen;
  for (std::size_t i = 0; i < formats.size(); ++i) {
    const FormatTemplate &f = formats[i];
    if (f.name.empty())
      throw Error(Stage::Synth, "spec '" + name + "': unnamed format");
    if (!seen.emplace(f.name, static_cast<int>(i)).second)
      throw Error(Stage::Synth, "spec '" + name + "': duplicate format '" + f.name + "'");
    if (f.role != Role::Client && f.role != Role::Server)
      throw Error(Stage::Synth, "spec '" + name + "': format role must be client or server");
    if (f.magic.empty())
      throw Error(Stage::Synth, "spec '" + name + "': format '" + f.name + "' has no magic");
    if (f.filler_min < 0 || f.filler_min > f.filler_max)
      throw Error(Stage::Synth, "spec '" + name + "': bad filler range in '" + f.name + "'");
  }

  std::map<int, double> outgoing;
  bool end_reachable = false;
  for (const SpecEdge &e : edges) {
    if (e.from < -1 || e.from >= static_cast<int>(formats.size()) || e.to < -1 ||
        e.to >= static_cast<int>(formats.size()))
      throw Error(Stage::Synth, "spec '" + name + "': edge endpoint out of range");
    if (!(e.p > 0.0) || e.p > 1.0)
      throw Error(Stage::Synth, "spec '" + name + "': edge probability must be in (0, 1]");
    outgoing[e.from] += e.p;
    if (e.to == -1)
      end_reachable = true;
  }
  if (!outgoing.count(-1))
    throw Error(Stage::Synth, "spec '" + name + "': no edge leaves the start state");
  if (!end_reachable)
    throw Error(Stage::Synth, "spec '" + name + "': the end state is unreachable");
  for (const auto &[from, sum] : outgoing)
    if (std::abs(sum - 1.0) > 1e-6)
      throw Error(Stage::Synth, "spec '" + name + "': outgoing probabilities of " +
                                    (from < 0 ? std::string("start") : formats[static_cast<std::size_t>(from)].name) +
                                    " sum to " + std::to_string(sum));
  for (std::size_t i = 0; i < formats.size(); ++i)
    if (!outgoing.count(static_cast<int>(i)))
      throw Error(Stage::Synth,
                  "spec '" + name + "': format '" + formats[i].name + "' has no outgoing edge");
}

int ProtocolSpec::format_index(const std::string &fname) const {
  for (std::size_t i = 0; i < formats.size(); ++i)
    if (formats[i].name == fname)
      return static_cast<int>(i);
  throw Error(Stage::Synth, "spec '" + name + "': unknown format '" + fname + "'");
}

ProtocolSpec spec_from_json(const nlohmann::json &j) {
  ProtocolSpec spec;
  try {
    spec.name = j.at("name").get<std::string>();
    spec.server = j.at("server").get<std::string>();
    spec.session_cap = j.at("session_cap").get<int>();
    for (const auto &jf : j.at("formats")) {
      FormatTemplate f;
      f.name = jf.at("name").get<std::string>();
      f.role = role_from_name(jf.at("role").get<std::string>());
      f.magic = from_hex(jf.at("magic_hex").get<std::string>());
      f.length_field = jf.value("length_field", false);
      Bytes filler = from_hex(jf.value("filler_byte_hex", std::string("00")));
      if (filler.size() != 1)
        throw Error(Stage::Synth, "filler_byte_hex must be exactly one byte");
      f.filler_byte = filler[0];
      f.filler_min = jf.at("filler_min").get<int>();
      f.filler_max = jf.at("filler_max").get<int>();
      f.trailer = from_hex(jf.value("trailer_hex", std::string()));
      spec.formats.push_back(std::move(f));
    }
    auto endpoint = [&](const std::string &n) {
      if (n == "start" || n == "end")
        return -1;
      return spec.format_index(n);
    };
    for (const auto &je : j.at("psm")) {
      SpecEdge e;
      std::string from = je.at("from").get<std::string>();
      std::string to = je.at("to").get<std::string>();
      if (from == "end")
        throw Error(Stage::Synth, "spec '" + spec.name + "': the end state has no outgoing edges");
      if (to == "start")
        throw Error(Stage::Synth, "spec '" + spec.name + "': nothing may enter the start state");
      e.from = endpoint(from);
      e.to = endpoint(to);
      e.p = je.at("p").get<double>();
      spec.edges.push_back(e);
    }
  } catch (const Error &) {
    throw;
  } catch (const std::exception &e) {
    throw Error(Stage::Synth, std::string("bad protocol spec: ") + e.what());
  }
  spec.validate();
  return spec;
}

ProtocolSpec load_protocol_spec(const std::string &path) {
  return spec_from_json(load_json_file(path));
}

namespace {

// Shared 8-byte building blocks of the built-in protocol family. All formats
// start with a common family block; each protocol adds its own block; each
// format adds a distinctive pair of blocks, so any two formats of one
// protocol differ in at least two feature dimensions.
constexpr const char *kSpecTlsish = R"json({
  "name": "tlsish",
  "server": "10.1.0.1:4443",
  "session_cap": 14,
  "formats": [
    {"name": "hello",  "role": "client", "magic_hex": "a1a2a3a4a5a6a7a8b1b2b3b4b5b6b7b8d1d2d3d4d5d6d7d89192939495969798", "length_field": true, "filler_byte_hex": "00", "filler_min": 33, "filler_max": 64},
    {"name": "accept", "role": "server", "magic_hex": "a1a2a3a4a5a6a7a8b1b2b3b4b5b6b7b8e1e2e3e4e5e6e7e8f1f2f3f4f5f6f7f8", "length_field": true, "filler_byte_hex": "00", "filler_min": 33, "filler_max": 64},
    {"name": "data",   "role": "client", "magic_hex": "a1a2a3a4a5a6a7a8b1b2b3b4b5b6b7b8d1d2d3d4d5d6d7d8e1e2e3e4e5e6e7e8", "length_field": true, "filler_byte_hex": "00", "filler_min": 33, "filler_max": 64},
    {"name": "close",  "role": "server", "magic_hex": "a1a2a3a4a5a6a7a8b1b2b3b4b5b6b7b8f1f2f3f4f5f6f7f89192939495969798", "length_field": true, "filler_byte_hex": "00", "filler_min": 33, "filler_max": 64}
  ],
  "psm": [
    {"from": "start",  "to": "hello",  "p": 1.0},
    {"from": "hello",  "to": "accept", "p": 1.0},
    {"from": "accept", "to": "data",   "p": 1.0},
    {"from": "data",   "to": "data",   "p": 0.55},
    {"from": "data",   "to": "close",  "p": 0.45},
    {"from": "close",  "to": "end",    "p": 1.0}
  ]
})json";

constexpr const char *kSpecSmtpish = R"json({
  "name": "smtpish",
  "server": "10.2.0.1:2525",
  "session_cap": 20,
  "formats": [
    {"name": "ehlo", "role": "client", "magic_hex": "a1a2a3a4a5a6a7a8c1c2c3c4c5c6c7c8d1d2d3d4d5d6d7d8e1e2e3e4e5e6e7e845484c4f20", "filler_byte_hex": "78", "filler_min": 8, "filler_max": 24, "trailer_hex": "0d0a"},
    {"name": "mail", "role": "client", "magic_hex": "a1a2a3a4a5a6a7a8c1c2c3c4c5c6c7c8e1e2e3e4e5e6e7e891929394959697984d41494c20", "filler_byte_hex": "78", "filler_min": 8, "filler_max": 24, "trailer_hex": "0d0a"},
    {"name": "rcpt", "role": "client", "magic_hex": "a1a2a3a4a5a6a7a8c1c2c3c4c5c6c7c8f1f2f3f4f5f6f7f891929394959697985243505420", "filler_byte_hex": "78", "filler_min": 8, "filler_max": 24, "trailer_hex": "0d0a"},
    {"name": "data", "role": "client", "magic_hex": "a1a2a3a4a5a6a7a8c1c2c3c4c5c6c7c8d1d2d3d4d5d6d7d8f1f2f3f4f5f6f7f84441544120", "filler_byte_hex": "78", "filler_min": 8, "filler_max": 24, "trailer_hex": "0d0a"},
    {"name": "quit", "role": "client", "magic_hex": "a1a2a3a4a5a6a7a8c1c2c3c4c5c6c7c8d1d2d3d4d5d6d7d891929394959697985155495420", "filler_byte_hex": "78", "filler_min": 8, "filler_max": 24, "trailer_hex": "0d0a"}
  ],
  "psm": [
    {"from": "start", "to": "ehlo", "p": 1.0},
    {"from": "ehlo",  "to": "mail", "p": 1.0},
    {"from": "mail",  "to": "rcpt", "p": 1.0},
    {"from": "rcpt",  "to": "rcpt", "p": 0.55},
    {"from": "rcpt",  "to": "data", "p": 0.45},
    {"from": "data",  "to": "quit", "p": 1.0},
    {"from": "quit",  "to": "end",  "p": 1.0}
  ]
})json";

}  // namespace

const std::vector<std::string> &builtin_spec_names() {
  static const std::vector<std::string> names{"tlsish", "smtpish"};
  return names;
}

const ProtocolSpec &builtin_spec(const std::string &name) {
  static const ProtocolSpec tlsish = spec_from_json(nlohmann::json::parse(kSpecTlsish));
  static const ProtocolSpec smtpish = spec_from_json(nlohmann::json::parse(kSpecSmtpish));
  if (name == "tlsish")
    return tlsish;
  if (name == "smtpish")
    return smtpish;
  throw Error(Stage::Synth, "no built-in spec named '" + name + "'");
}

Bytes render_message(const FormatTemplate &fmt, Rng &rng) {
  Bytes out = fmt.magic;
  int len = static_cast<int>(rng.uniform_int(fmt.filler_min, fmt.filler_max));
  if (fmt.length_field) {
    out.push_back(static_cast<std::uint8_t>((len >> 8) & 0xff));
    out.push_back(static_cast<std::uint8_t>(len & 0xff));
  }
  out.insert(out.end(), static_cast<std::size_t>(len), fmt.filler_byte);
  out.insert(out.end(), fmt.trailer.begin(), fmt.trailer.end());
  return out;
}

SampledSession sample_session(const ProtocolSpec &spec, Rng &rng) {
  SampledSession s;
  int cur = -1;  // start state
  while (true) {
    double r = rng.uniform();
    double acc = 0.0;
    int next = -1;
    bool found = false;
    for (const SpecEdge &e : spec.edges) {
      if (e.from != cur)
        continue;
      acc += e.p;
      next = e.to;
      found = true;
      if (r < acc)
        break;
    }
    if (!found || next == -1)
      break;  // reached the end state
    s.formats.push_back(next);
    s.payloads.push_back(render_message(spec.formats[static_cast<std::size_t>(next)], rng));
    if (static_cast<int>(s.formats.size()) >= spec.session_cap)
      break;
    cur = next;
  }
  return s;
}

SampledSession sample_session(const ProtocolSpec &spec, std::uint64_t seed) {
  Rng rng(seed);
  return sample_session(spec, rng);
}

Psm reference_psm(const ProtocolSpec &spec, int label_offset) {
  Psm m;
  m.states.push_back({0, Role::Start, std::nullopt});
  m.states.push_back({1, Role::End, std::nullopt});
  for (std::size_t i = 0; i < spec.formats.size(); ++i)
    m.states.push_back(
        {static_cast<int>(i) + 2, spec.formats[i].role, label_offset + static_cast<int>(i)});
  for (const SpecEdge &e : spec.edges) {
    PsmTransition t;
    t.from = e.from < 0 ? 0 : e.from + 2;
    t.to = e.to < 0 ? 1 : e.to + 2;
    if (e.to >= 0)
      t.format = label_offset + e.to;
    t.prob = e.p;
    m.transitions.push_back(t);
  }
  return m;
}

std::vector<int> GroundTruth::flat_formats() const {
  std::vector<int> out;
  for (const TruthSession &s : sessions)
    for (const TruthMessage &m : s.messages)
      out.push_back(m.format);
  return out;
}

std::vector<int> GroundTruth::session_protocols() const {
  std::vector<int> out;
  out.reserve(sessions.size());
  for (const TruthSession &s : sessions)
    out.push_back(s.protocol);
  return out;
}

nlohmann::json truth_to_json(const GroundTruth &t) {
  nlohmann::json sessions = nlohmann::json::array();
  for (const TruthSession &s : t.sessions) {
    nlohmann::json messages = nlohmann::json::array();
    for (const TruthMessage &m : s.messages)
      messages.push_back({{"format", m.format}, {"noise", m.noise}});
    sessions.push_back({{"protocol", s.protocol}, {"messages", std::move(messages)}});
  }
  nlohmann::json psms = nlohmann::json::array();
  for (const Psm &m : t.reference_psms)
    psms.push_back(psm_to_json(m));
  return nlohmann::json{{"protocols", t.protocols},
                        {"format_names", t.format_names},
                        {"sessions", std::move(sessions)},
                        {"reference_psms", std::move(psms)}};
}

GroundTruth truth_from_json(const nlohmann::json &j) {
  GroundTruth t;
  try {
    t.protocols = j.at("protocols").get<std::vector<std::string>>();
    t.format_names = j.at("format_names").get<std::vector<std::string>>();
    for (const auto &js : j.at("sessions")) {
      TruthSession s;
      s.protocol = js.at("protocol").get<int>();
      for (const auto &jm : js.at("messages"))
        s.messages.push_back({jm.at("format").get<int>(), jm.at("noise").get<bool>()});
      t.sessions.push_back(std::move(s));
    }
    for (const auto &jp : j.at("reference_psms"))
      t.reference_psms.push_back(psm_from_json(jp));
  } catch (const Error &) {
    throw;
  } catch (const std::exception &e) {
    throw Error(Stage::Io, std::string("bad ground truth: ") + e.what());
  }
  return t;
}

GroundTruth load_truth(const std::string &path) { return truth_from_json(load_json_file(path)); }

CorpusSummary generate_corpus(const std::vector<ProtocolSpec> &specs, int sessions_per_spec,
                              double noise_rate, std::uint64_t seed, const std::string &out_dir) {
  if (specs.empty())
    throw Error(Stage::Synth, "no protocol specs given");
  if (sessions_per_spec < 1)
    throw Error(Stage::Synth, "sessions_per_spec must be at least 1");
  if (noise_rate < 0.0 || noise_rate >= 1.0)
    throw Error(Stage::Synth, "noise_rate must lie in [0, 1)");
  if (static_cast<long long>(specs.size()) * sessions_per_spec > 40000)
    throw Error(Stage::Synth, "too many sessions for the port space");
  for (const ProtocolSpec &s : specs)
    s.validate();

  Rng rng(seed);
  GroundTruth truth;
  struct FlatMessage {
    std::size_t session = 0;
    Role sender = Role::Client;
    Bytes payload;
  };
  std::vector<FlatMessage> flat;
  std::vector<std::string> servers;  // per session
  int label_offset = 0;
  for (std::size_t si = 0; si < specs.size(); ++si) {
    const ProtocolSpec &spec = specs[si];
    truth.protocols.push_back(spec.name);
    for (const FormatTemplate &f : spec.formats)
      truth.format_names.push_back(spec.name + "/" + f.name);
    truth.reference_psms.push_back(reference_psm(spec, label_offset));
    for (int j = 0; j < sessions_per_spec; ++j) {
      SampledSession sampled = sample_session(spec, rng);
      TruthSession ts;
      ts.protocol = static_cast<int>(si);
      for (std::size_t m = 0; m < sampled.formats.size(); ++m) {
        ts.messages.push_back({label_offset + sampled.formats[m], false});
        flat.push_back({truth.sessions.size(), spec.formats[static_cast<std::size_t>(sampled.formats[m])].role,
                        std::move(sampled.payloads[m])});
      }
      truth.sessions.push_back(std::move(ts));
      servers.push_back(spec.server);
    }
    label_offset += static_cast<int>(spec.formats.size());
  }

  // Corrupt a fixed share of messages, chosen by partial Fisher-Yates so the
  // set is reproducible.
  std::size_t corrupted = static_cast<std::size_t>(
      std::llround(noise_rate * static_cast<double>(flat.size())));
  std::vector<std::size_t> order(flat.size());
  for (std::size_t i = 0; i < order.size(); ++i)
    order[i] = i;
  for (std::size_t i = 0; i < corrupted; ++i) {
    std::size_t j = static_cast<std::size_t>(
        rng.uniform_int(static_cast<std::int64_t>(i), static_cast<std::int64_t>(order.size()) - 1));
    std::swap(order[i], order[j]);
  }
  std::vector<std::size_t> chosen(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(corrupted));
  std::sort(chosen.begin(), chosen.end());
  for (std::size_t idx : chosen) {
    FlatMessage &m = flat[idx];
    Bytes junk(static_cast<std::size_t>(rng.uniform_int(16, 64)));
    for (auto &b : junk)
      b = static_cast<std::uint8_t>(rng.uniform_int(0, 255));
    m.payload = std::move(junk);
    // locate the message inside its session record
    std::size_t offset = idx;
    for (std::size_t s = 0; s < m.session; ++s)
      offset -= truth.sessions[s].messages.size();
    truth.sessions[m.session].messages[offset] = {-1, true};
  }

  std::filesystem::create_directories(out_dir);
  std::ostringstream trace;
  double ts = 1700000000.0;
  for (const FlatMessage &m : flat) {
    std::string client = "10.9.0.7:" + std::to_string(20000 + m.session);
    const std::string &server = servers[m.session];
    nlohmann::json line{{"ts", ts},
                        {"src", m.sender == Role::Client ? client : server},
                        {"dst", m.sender == Role::Client ? server : client},
                        {"proto", "tcp"},
                        {"payload_hex", to_hex(m.payload)}};
    trace << line.dump() << "\n";
    ts += 0.001;
  }
  write_file(out_dir + "/trace.jsonl", trace.str());
  write_json_file(out_dir + "/truth.json", truth_to_json(truth));

  return {truth.sessions.size(), flat.size(), corrupted};
}

}  // namespace psmkit
