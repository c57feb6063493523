#include "features.hpp"

#include <cmath>

#include "errors.hpp"

namespace psmkit {

std::size_t lcss_len(const Bytes &a, const Bytes &b) {
  if (a.empty() || b.empty())
    return 0;
  // Rolling-row DP over run lengths ending at (i, j).
  std::vector<std::size_t> prev(b.size() + 1, 0), cur(b.size() + 1, 0);
  std::size_t best = 0;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      if (a[i - 1] == b[j - 1]) {
        cur[j] = prev[j - 1] + 1;
        best = std::max(best, cur[j]);
      } else {
        cur[j] = 0;
      }
    }
    std::swap(prev, cur);
  }
  return best;
}

double membership(const Bytes &item, const Bytes &message) {
  if (item.empty())
    throw Error(Stage::FormatCluster, "membership of the empty item is undefined");
  return static_cast<double>(lcss_len(item, message)) / static_cast<double>(item.size());
}

std::vector<FeatureVector> feature_vectors(std::span<const Bytes> messages,
                                           const std::vector<FrequentItem> &items) {
  if (items.empty())
    throw Error(Stage::FormatCluster, "feature space is empty (no frequent items)");
  std::vector<FeatureVector> rows;
  rows.reserve(messages.size());
  for (const Bytes &msg : messages) {
    FeatureVector row;
    row.reserve(items.size());
    for (const FrequentItem &it : items)
      row.push_back(membership(it.bytes, msg));
    rows.push_back(std::move(row));
  }
  return rows;
}

double euclid(const FeatureVector &a, const FeatureVector &b) {
  if (a.size() != b.size())
    throw Error(Stage::FormatCluster, "feature vectors have different dimensions");
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    double d = a[i] - b[i];
    sum += d * d;
  }
  return std::sqrt(sum);
}

}  // namespace psmkit
