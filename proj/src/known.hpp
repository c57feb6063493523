#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "trace.hpp"

namespace psmkit {

struct SignatureRule {
  std::size_t offset = 0;
  Bytes bytes;
};

// Description of an already understood protocol. Traffic matching one of
// these is removed before inference so it cannot pollute the mined formats.
struct KnownProtocolModel {
  std::string name;
  std::vector<std::uint16_t> ports;
  std::vector<SignatureRule> signatures;

  bool matches(const RawPacket &p) const;
};

std::vector<KnownProtocolModel> parse_known_models(const std::string &json_text);
std::vector<KnownProtocolModel> load_known_models(const std::string &path);

std::vector<RawPacket> filter_known(const std::vector<RawPacket> &packets,
                                    const std::vector<KnownProtocolModel> &models);

}  // namespace psmkit
