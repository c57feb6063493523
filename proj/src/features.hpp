#pragma once

#include <span>
#include <vector>

#include "bytes.hpp"
#include "mfi.hpp"

namespace psmkit {

using FeatureVector = std::vector<double>;

// Length of the longest common contiguous substring of a and b.
std::size_t lcss_len(const Bytes &a, const Bytes &b);

// Fuzzy membership of an item in a message: how much of the item survives in
// the message as one contiguous run, normalised to [0, 1].
double membership(const Bytes &item, const Bytes &message);

// One row per message, one membership column per frequent item.
std::vector<FeatureVector> feature_vectors(std::span<const Bytes> messages,
                                           const std::vector<FrequentItem> &items);

double euclid(const FeatureVector &a, const FeatureVector &b);

}  // namespace psmkit
