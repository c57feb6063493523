#include "known.hpp"

#include <algorithm>

#include <json.hpp>

#include "errors.hpp"
#include "json_util.hpp"

namespace psmkit {

bool KnownProtocolModel::matches(const RawPacket &p) const {
  for (std::uint16_t port : ports)
    if (p.tuple.src.port == port || p.tuple.dst.port == port)
      return true;
  for (const SignatureRule &sig : signatures) {
    if (sig.bytes.empty())
      continue;
    if (sig.offset + sig.bytes.size() > p.payload.size())
      continue;
    if (std::equal(sig.bytes.begin(), sig.bytes.end(), p.payload.begin() + static_cast<std::ptrdiff_t>(sig.offset)))
      return true;
  }
  return false;
}

std::vector<KnownProtocolModel> parse_known_models(const std::string &json_text) {
  nlohmann::json j = nlohmann::json::parse(json_text, nullptr, false);
  if (j.is_discarded() || !j.is_array())
    throw Error(Stage::Config, "known protocol models must be a JSON array");
  std::vector<KnownProtocolModel> models;
  for (const auto &item : j) {
    try {
      KnownProtocolModel m;
      m.name = item.at("name").get<std::string>();
      if (item.contains("ports"))
        for (const auto &p : item.at("ports")) {
          long v = p.get<long>();
          if (v < 0 || v > 65535)
            throw Error(Stage::Config, "port out of range in model '" + m.name + "'");
          m.ports.push_back(static_cast<std::uint16_t>(v));
        }
      if (item.contains("signatures"))
        for (const auto &s : item.at("signatures")) {
          SignatureRule rule;
          rule.offset = s.at("offset").get<std::size_t>();
          rule.bytes = from_hex(s.at("bytes_hex").get<std::string>());
          m.signatures.push_back(std::move(rule));
        }
      if (m.ports.empty() && m.signatures.empty())
        throw Error(Stage::Config, "model '" + m.name + "' has neither ports nor signatures");
      models.push_back(std::move(m));
    } catch (const Error &) {
      throw;
    } catch (const std::exception &e) {
      throw Error(Stage::Config, std::string("bad known protocol model: ") + e.what());
    }
  }
  return models;
}

std::vector<KnownProtocolModel> load_known_models(const std::string &path) {
  return parse_known_models(read_file(path));
}

std::vector<RawPacket> filter_known(const std::vector<RawPacket> &packets,
                                    const std::vector<KnownProtocolModel> &models) {
  std::vector<RawPacket> out;
  out.reserve(packets.size());
  for (const RawPacket &p : packets) {
    bool known = std::any_of(models.begin(), models.end(),
                             [&](const KnownProtocolModel &m) { return m.matches(p); });
    if (!known)
      out.push_back(p);
  }
  return out;
}

}  // namespace psmkit
