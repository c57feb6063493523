#include "mfi.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "errors.hpp"

namespace psmkit {

void MiningConfig::validate() const {
  if (!(min_support > 0.0) || min_support > 1.0)
    throw Error(Stage::Config, "min_support must be in (0, 1]");
  if (max_scan_bytes == 0)
    throw Error(Stage::Config, "max_scan_bytes must be positive");
}

double support(const Bytes &item, std::span<const Bytes> messages) {
  if (item.empty())
    throw Error(Stage::Mining, "support of the empty item is undefined");
  if (messages.empty())
    throw Error(Stage::Mining, "support over an empty message set is undefined");
  std::size_t hits = 0;
  for (const Bytes &m : messages)
    if (contains(m, item))
      ++hits;
  return static_cast<double>(hits) / static_cast<double>(messages.size());
}

namespace {

// One mining level: per-message presence counts for every candidate window
// whose halves were frequent at the previous level.
std::set<Bytes> frequent_at_level(std::span<const Bytes> messages, std::size_t len,
                                  const std::set<Bytes> &prev, double min_support,
                                  std::size_t max_scan, std::map<Bytes, double> *supports) {
  const double n = static_cast<double>(messages.size());
  std::map<Bytes, std::size_t> counts;
  std::vector<bool> seen1(256);

  for (const Bytes &msg : messages) {
    std::size_t limit = std::min(msg.size(), max_scan);
    if (len == 1) {
      std::fill(seen1.begin(), seen1.end(), false);
      for (std::size_t i = 0; i < limit; ++i)
        seen1[msg[i]] = true;
      for (int b = 0; b < 256; ++b)
        if (seen1[b])
          ++counts[Bytes{static_cast<std::uint8_t>(b)}];
      continue;
    }
    if (limit < len)
      continue;
    std::set<Bytes> in_msg;
    std::size_t half = len / 2;
    for (std::size_t i = 0; i + len <= limit; ++i) {
      Bytes lo(msg.begin() + static_cast<std::ptrdiff_t>(i),
               msg.begin() + static_cast<std::ptrdiff_t>(i + half));
      if (!prev.count(lo))
        continue;
      Bytes hi(msg.begin() + static_cast<std::ptrdiff_t>(i + half),
               msg.begin() + static_cast<std::ptrdiff_t>(i + len));
      if (!prev.count(hi))
        continue;
      lo.insert(lo.end(), hi.begin(), hi.end());
      in_msg.insert(std::move(lo));
    }
    for (const Bytes &cand : in_msg)
      ++counts[cand];
  }

  std::set<Bytes> frequent;
  for (const auto &[item, count] : counts) {
    double s = static_cast<double>(count) / n;
    if (s >= min_support) {
      frequent.insert(item);
      (*supports)[item] = s;
    }
  }
  return frequent;
}

}  // namespace

std::vector<FrequentItem> extract_mfi(std::span<const Bytes> messages, const MiningConfig &cfg) {
  cfg.validate();
  if (messages.empty())
    throw Error(Stage::Mining, "no messages to mine");

  std::map<Bytes, double> supports;
  std::vector<Bytes> all;
  std::set<Bytes> prev;
  for (std::size_t len = 1; len <= 8; len *= 2) {
    std::set<Bytes> cur =
        frequent_at_level(messages, len, prev, cfg.min_support, cfg.max_scan_bytes, &supports);
    if (cur.empty()) {
      if (len == 1)
        throw Error(Stage::Mining, "no byte reaches the support threshold");
      break;
    }
    all.insert(all.end(), cur.begin(), cur.end());
    prev = std::move(cur);
  }

  // Containment elimination: an item subsumed by a longer frequent item adds
  // no information of its own.
  std::vector<FrequentItem> result;
  for (const Bytes &item : all) {
    bool subsumed = false;
    for (const Bytes &other : all) {
      if (other.size() > item.size() && contains(other, item)) {
        subsumed = true;
        break;
      }
    }
    if (!subsumed)
      result.push_back({item, supports.at(item)});
  }
  std::sort(result.begin(), result.end(), [](const FrequentItem &a, const FrequentItem &b) {
    if (a.bytes.size() != b.bytes.size())
      return a.bytes.size() > b.bytes.size();
    if (a.support != b.support)
      return a.support > b.support;
    return a.bytes < b.bytes;
  });
  return result;
}

nlohmann::json mfi_to_json(const std::vector<FrequentItem> &items) {
  nlohmann::json arr = nlohmann::json::array();
  for (const FrequentItem &it : items)
    arr.push_back({{"bytes_hex", to_hex(it.bytes)}, {"support", it.support}});
  return arr;
}

std::vector<FrequentItem> mfi_from_json(const nlohmann::json &j) {
  if (!j.is_array())
    throw Error(Stage::Io, "frequent item list must be a JSON array");
  std::vector<FrequentItem> items;
  for (const auto &e : j) {
    FrequentItem it;
    it.bytes = from_hex(e.at("bytes_hex").get<std::string>());
    it.support = e.at("support").get<double>();
    items.push_back(std::move(it));
  }
  return items;
}

}  // namespace psmkit
