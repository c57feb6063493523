#include "trace.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "errors.hpp"

namespace psmkit {

namespace {

std::string endpoint_str(const Endpoint &e) { return e.addr + ":" + std::to_string(e.port); }

Endpoint parse_endpoint(const std::string &s) {
  auto pos = s.rfind(':');
  if (pos == std::string::npos || pos == 0 || pos + 1 == s.size())
    throw Error(Stage::Ingest, "malformed endpoint '" + s + "'");
  Endpoint e;
  e.addr = s.substr(0, pos);
  int port = 0;
  for (std::size_t i = pos + 1; i < s.size(); ++i) {
    char c = s[i];
    if (c < '0' || c > '9')
      throw Error(Stage::Ingest, "malformed endpoint '" + s + "'");
    port = port * 10 + (c - '0');
    if (port > 65535)
      throw Error(Stage::Ingest, "port out of range in '" + s + "'");
  }
  e.port = static_cast<std::uint16_t>(port);
  return e;
}

}  // namespace

std::string flow_key(const FiveTuple &t) {
  const Endpoint &a = std::min(t.src, t.dst);
  const Endpoint &b = std::max(t.src, t.dst);
  std::string proto = t.transport == Transport::Tcp ? "tcp" : "udp";
  return proto + "|" + endpoint_str(a) + "|" + endpoint_str(b);
}

std::vector<RawPacket> parse_jsonl_trace(const std::string &text) {
  std::vector<RawPacket> out;
  std::istringstream in(text);
  std::string line;
  std::uint64_t lineno = 0;
  std::uint64_t index = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos)
      continue;
    nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object())
      throw Error(Stage::Ingest, "line " + std::to_string(lineno) + ": not a JSON object");
    try {
      RawPacket p;
      p.timestamp = j.at("ts").get<double>();
      p.tuple.src = parse_endpoint(j.at("src").get<std::string>());
      p.tuple.dst = parse_endpoint(j.at("dst").get<std::string>());
      std::string proto = j.at("proto").get<std::string>();
      if (proto == "tcp")
        p.tuple.transport = Transport::Tcp;
      else if (proto == "udp")
        p.tuple.transport = Transport::Udp;
      else
        throw Error(Stage::Ingest, "unknown proto '" + proto + "'");
      p.payload = from_hex(j.at("payload_hex").get<std::string>());
      p.capture_index = index++;
      out.push_back(std::move(p));
    } catch (const Error &) {
      throw;
    } catch (const std::exception &e) {
      throw Error(Stage::Ingest, "line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

namespace {

class ByteReader {
 public:
  ByteReader(const Bytes &data, bool swap) : data_(data), swap_(swap) {}

  bool has(std::size_t off, std::size_t len) const {
    return off + len <= data_.size() && off + len >= off;
  }

  std::uint8_t u8(std::size_t off) const { return data_[off]; }

  std::uint16_t u16be(std::size_t off) const {
    return static_cast<std::uint16_t>((data_[off] << 8) | data_[off + 1]);
  }

  // File-order 32-bit field of the pcap container (byte order given by magic).
  std::uint32_t u32file(std::size_t off) const {
    std::uint32_t v = static_cast<std::uint32_t>(data_[off]) |
                      static_cast<std::uint32_t>(data_[off + 1]) << 8 |
                      static_cast<std::uint32_t>(data_[off + 2]) << 16 |
                      static_cast<std::uint32_t>(data_[off + 3]) << 24;
    if (swap_)
      v = __builtin_bswap32(v);
    return v;
  }

 private:
  const Bytes &data_;
  bool swap_;
};

}  // namespace

std::vector<RawPacket> parse_pcap(const Bytes &data) {
  if (data.size() < 24)
    throw Error(Stage::Ingest, "pcap too short for global header");
  std::uint32_t magic = static_cast<std::uint32_t>(data[0]) |
                        static_cast<std::uint32_t>(data[1]) << 8 |
                        static_cast<std::uint32_t>(data[2]) << 16 |
                        static_cast<std::uint32_t>(data[3]) << 24;
  bool swap = false;
  if (magic == 0xa1b2c3d4u)
    swap = false;
  else if (magic == 0xd4c3b2a1u)
    swap = true;
  else
    throw Error(Stage::Ingest, "not a classic pcap file (bad magic)");

  ByteReader r(data, swap);
  std::uint32_t linktype = r.u32file(20);
  if (linktype != 1)
    throw Error(Stage::Ingest, "unsupported link type " + std::to_string(linktype) +
                                   " (only Ethernet is handled)");

  std::vector<RawPacket> out;
  std::size_t off = 24;
  std::uint64_t index = 0;
  while (off < data.size()) {
    if (!r.has(off, 16))
      throw Error(Stage::Ingest, "truncated packet record header at offset " + std::to_string(off));
    std::uint32_t ts_sec = r.u32file(off);
    std::uint32_t ts_usec = r.u32file(off + 4);
    std::uint32_t incl_len = r.u32file(off + 8);
    std::size_t frame = off + 16;
    if (!r.has(frame, incl_len))
      throw Error(Stage::Ingest, "truncated packet data at offset " + std::to_string(frame));
    std::size_t frame_end = frame + incl_len;
    std::uint64_t this_index = index++;
    off = frame_end;

    // Ethernet header.
    if (incl_len < 14 || r.u16be(frame + 12) != 0x0800)
      continue;
    std::size_t ip = frame + 14;
    if (ip + 20 > frame_end)
      continue;

    std::uint8_t vihl = r.u8(ip);
    if ((vihl >> 4) != 4)
      continue;
    std::size_t ihl = static_cast<std::size_t>(vihl & 0xf) * 4;
    if (ihl < 20 || ip + ihl > frame_end)
      continue;
    std::uint16_t total_len = r.u16be(ip + 2);
    if (total_len < ihl)
      continue;
    // total_length bounds the datagram; Ethernet frames shorter than 60 bytes
    // are zero-padded on the wire and the padding must not leak into payloads.
    std::size_t ip_end = std::min(ip + total_len, frame_end);
    std::uint16_t frag = r.u16be(ip + 6);
    bool more_fragments = (frag & 0x2000) != 0;
    std::uint16_t frag_offset = frag & 0x1fff;
    if (more_fragments || frag_offset != 0)
      continue;
    std::uint8_t proto = r.u8(ip + 9);
    if (proto != 6 && proto != 17)
      continue;

    auto ip_str = [&](std::size_t o) {
      return std::to_string(r.u8(o)) + "." + std::to_string(r.u8(o + 1)) + "." +
             std::to_string(r.u8(o + 2)) + "." + std::to_string(r.u8(o + 3));
    };
    RawPacket p;
    p.timestamp = static_cast<double>(ts_sec) + static_cast<double>(ts_usec) * 1e-6;
    p.capture_index = this_index;
    p.tuple.src.addr = ip_str(ip + 12);
    p.tuple.dst.addr = ip_str(ip + 16);

    std::size_t l4 = ip + ihl;
    std::size_t payload_begin = 0;
    if (proto == 6) {
      if (l4 + 20 > ip_end)
        continue;
      p.tuple.transport = Transport::Tcp;
      std::size_t doff = static_cast<std::size_t>(r.u8(l4 + 12) >> 4) * 4;
      if (doff < 20 || l4 + doff > ip_end)
        continue;
      payload_begin = l4 + doff;
    } else {
      if (l4 + 8 > ip_end)
        continue;
      p.tuple.transport = Transport::Udp;
      std::uint16_t udp_len = r.u16be(l4 + 4);
      if (udp_len < 8)
        continue;
      ip_end = std::min(ip_end, l4 + udp_len);
      payload_begin = l4 + 8;
    }
    p.tuple.src.port = r.u16be(l4);
    p.tuple.dst.port = r.u16be(l4 + 2);
    if (payload_begin >= ip_end)
      continue;  // no transport payload, nothing to learn from
    p.payload.assign(data.begin() + static_cast<std::ptrdiff_t>(payload_begin),
                     data.begin() + static_cast<std::ptrdiff_t>(ip_end));
    out.push_back(std::move(p));
  }
  return out;
}

std::vector<RawPacket> load_trace(const std::string &path, TraceFormat format) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw Error(Stage::Io, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  std::string text = ss.str();

  if (format == TraceFormat::Auto) {
    if (text.size() >= 4) {
      std::uint32_t magic = static_cast<std::uint32_t>(static_cast<unsigned char>(text[0])) |
                            static_cast<std::uint32_t>(static_cast<unsigned char>(text[1])) << 8 |
                            static_cast<std::uint32_t>(static_cast<unsigned char>(text[2])) << 16 |
                            static_cast<std::uint32_t>(static_cast<unsigned char>(text[3])) << 24;
      format = (magic == 0xa1b2c3d4u || magic == 0xd4c3b2a1u) ? TraceFormat::Pcap
                                                              : TraceFormat::JsonlTrace;
    } else {
      format = TraceFormat::JsonlTrace;
    }
  }

  if (format == TraceFormat::Pcap) {
    Bytes data(text.begin(), text.end());
    return parse_pcap(data);
  }
  return parse_jsonl_trace(text);
}

std::vector<Session> slice_sessions(const std::vector<RawPacket> &packets) {
  struct Pending {
    std::vector<const RawPacket *> packets;
  };
  std::map<std::string, Pending> by_key;
  for (const RawPacket &p : packets)
    by_key[flow_key(p.tuple)].packets.push_back(&p);

  std::vector<Session> sessions;
  std::vector<std::pair<double, std::uint64_t>> first_seen;
  sessions.reserve(by_key.size());
  for (auto &[key, pending] : by_key) {
    std::stable_sort(pending.packets.begin(), pending.packets.end(),
                     [](const RawPacket *a, const RawPacket *b) {
                       if (a->timestamp != b->timestamp)
                         return a->timestamp < b->timestamp;
                       return a->capture_index < b->capture_index;
                     });
    Session s;
    s.key = key;
    const RawPacket &head = *pending.packets.front();
    const Endpoint &initiator = head.tuple.src;
    std::uint32_t idx = 0;
    for (const RawPacket *p : pending.packets) {
      Message m;
      m.session_key = key;
      m.direction = p->tuple.src == initiator ? Direction::Initiator : Direction::Responder;
      m.index_in_session = idx++;
      m.bytes = p->payload;
      m.timestamp = p->timestamp;
      s.messages.push_back(std::move(m));
    }
    first_seen.emplace_back(head.timestamp, head.capture_index);
    sessions.push_back(std::move(s));
  }

  std::vector<std::size_t> order(sessions.size());
  for (std::size_t i = 0; i < order.size(); ++i)
    order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return first_seen[a] < first_seen[b]; });
  std::vector<Session> sorted;
  sorted.reserve(sessions.size());
  for (std::size_t i : order)
    sorted.push_back(std::move(sessions[i]));
  return sorted;
}

std::vector<Bytes> flatten_payloads(const std::vector<Session> &sessions) {
  std::vector<Bytes> out;
  for (const Session &s : sessions)
    for (const Message &m : s.messages)
      out.push_back(m.bytes);
  return out;
}

}  // namespace psmkit
