#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "features.hpp"

namespace psmkit {

inline constexpr int kNoiseLabel = -1;

// Symmetric distance matrix, upper triangle stored row-major.
class DistanceMatrix {
 public:
  DistanceMatrix() = default;
  explicit DistanceMatrix(std::size_t n) : n_(n), d_(n * (n + 1) / 2, 0.0) {}

  static DistanceMatrix from_vectors(std::span<const FeatureVector> rows);

  std::size_t size() const { return n_; }

  double at(std::size_t i, std::size_t j) const { return d_[index(i, j)]; }
  void set(std::size_t i, std::size_t j, double v) { d_[index(i, j)] = v; }

 private:
  std::size_t index(std::size_t i, std::size_t j) const {
    if (i > j)
      std::swap(i, j);
    return i * (2 * n_ - i + 1) / 2 + (j - i);
  }

  std::size_t n_ = 0;
  std::vector<double> d_;
};

struct ClusterLabeling {
  std::vector<int> labels;  // cluster id per point, kNoiseLabel for noise
  int cluster_count = 0;
};

// Density clustering on a precomputed distance matrix. A point is core when
// its eps-neighbourhood (itself included) holds at least minpts points.
// Clusters are numbered 0.. in order of discovery, scanning points by index,
// so the labeling is deterministic.
ClusterLabeling dbscan(const DistanceMatrix &dist, double eps, int minpts);

// Same, but with eps-neighbourhoods precomputed; lets a parameter sweep share
// one adjacency across every minpts value for a given eps.
ClusterLabeling dbscan_with_adjacency(const std::vector<std::vector<std::uint32_t>> &adjacency,
                                      int minpts);

std::vector<std::vector<std::uint32_t>> eps_adjacency(const DistanceMatrix &dist, double eps);

// Mean silhouette over clustered points; noise points take no part at all.
// Empty when fewer than two clusters have members, which leaves the score
// undefined. Singleton clusters contribute 0 for their lone point.
std::optional<double> silhouette(const DistanceMatrix &dist, const std::vector<int> &labels);

}  // namespace psmkit
