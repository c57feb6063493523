#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bytes.hpp"

namespace psmkit {

enum class Transport : std::uint8_t { Tcp, Udp };
enum class Direction : std::uint8_t { Initiator, Responder };

struct Endpoint {
  std::string addr;
  std::uint16_t port = 0;

  auto operator<=>(const Endpoint &) const = default;
};

struct FiveTuple {
  Endpoint src;
  Endpoint dst;
  Transport transport = Transport::Tcp;
};

struct RawPacket {
  double timestamp = 0.0;
  FiveTuple tuple;
  Bytes payload;
  // Ordinal of the record in the source capture; ties on equal timestamps.
  std::uint64_t capture_index = 0;
};

// Canonical bidirectional flow key: transport plus both endpoints in sorted
// order, so the two directions of a conversation share one key.
std::string flow_key(const FiveTuple &t);

struct Message {
  std::string session_key;
  Direction direction = Direction::Initiator;
  std::uint32_t index_in_session = 0;
  Bytes bytes;
  double timestamp = 0.0;
};

struct Session {
  std::string key;
  std::vector<Message> messages;
};

enum class TraceFormat { Auto, Pcap, JsonlTrace };

// Classic libpcap capture, either byte order, Ethernet link layer. Emits one
// RawPacket per IPv4 TCP/UDP packet that carries transport payload; other
// frames (ARP, fragments, bare ACKs, ...) are skipped.
std::vector<RawPacket> parse_pcap(const Bytes &data);

// One JSON object per line: ts, src, dst ("addr:port"), proto ("tcp"/"udp"),
// payload_hex. Blank lines are ignored.
std::vector<RawPacket> parse_jsonl_trace(const std::string &text);

std::vector<RawPacket> load_trace(const std::string &path, TraceFormat format = TraceFormat::Auto);

// Groups packets into bidirectional sessions. The initiator is the source of
// the session's earliest packet; messages are ordered by (timestamp,
// capture_index) and sessions by their first message.
std::vector<Session> slice_sessions(const std::vector<RawPacket> &packets);

// Message payloads of all sessions, session by session, message order
// preserved. This flat order is the one cluster labelings refer to.
std::vector<Bytes> flatten_payloads(const std::vector<Session> &sessions);

}  // namespace psmkit
