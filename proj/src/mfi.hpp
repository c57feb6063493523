#pragma once

#include <span>
#include <vector>

#include <json.hpp>

#include "bytes.hpp"

namespace psmkit {

struct FrequentItem {
  Bytes bytes;
  double support = 0.0;
};

struct MiningConfig {
  // Minimum fraction of messages an item must appear in.
  double min_support = 0.35;
  // Only this prefix of each message is scanned during mining; protocol
  // keywords live near the front and unbounded scans make pathological
  // messages quadratic.
  std::size_t max_scan_bytes = 2048;

  void validate() const;
};

// Fraction of messages that contain `item` as a contiguous substring.
// Presence is counted once per message no matter how often the item repeats.
double support(const Bytes &item, std::span<const Bytes> messages);

// Maximum frequent items over the message set: frequent byte strings of
// length 1, 2, 4 and 8 (each level built by concatenating frequent items of
// the previous level), minus any item contained in a longer surviving item.
// Result is ordered by length descending, then support descending, then
// bytewise ascending.
std::vector<FrequentItem> extract_mfi(std::span<const Bytes> messages, const MiningConfig &cfg);

nlohmann::json mfi_to_json(const std::vector<FrequentItem> &items);
std::vector<FrequentItem> mfi_from_json(const nlohmann::json &j);

}  // namespace psmkit
