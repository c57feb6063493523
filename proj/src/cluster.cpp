#include "cluster.hpp"

#include <algorithm>
#include <deque>

#include "errors.hpp"

namespace psmkit {

DistanceMatrix DistanceMatrix::from_vectors(std::span<const FeatureVector> rows) {
  DistanceMatrix m(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = i + 1; j < rows.size(); ++j)
      m.set(i, j, euclid(rows[i], rows[j]));
  return m;
}

std::vector<std::vector<std::uint32_t>> eps_adjacency(const DistanceMatrix &dist, double eps) {
  std::size_t n = dist.size();
  std::vector<std::vector<std::uint32_t>> adj(n);
  for (std::size_t i = 0; i < n; ++i) {
    adj[i].push_back(static_cast<std::uint32_t>(i));
    for (std::size_t j = i + 1; j < n; ++j) {
      if (dist.at(i, j) <= eps) {
        adj[i].push_back(static_cast<std::uint32_t>(j));
        adj[j].push_back(static_cast<std::uint32_t>(i));
      }
    }
  }
  for (auto &row : adj)
    std::sort(row.begin(), row.end());
  return adj;
}

ClusterLabeling dbscan_with_adjacency(const std::vector<std::vector<std::uint32_t>> &adjacency,
                                      int minpts) {
  if (minpts < 1)
    throw Error(Stage::FormatCluster, "minpts must be at least 1");
  const std::size_t n = adjacency.size();
  ClusterLabeling out;
  out.labels.assign(n, kNoiseLabel);
  std::vector<bool> visited(n, false);

  const auto is_core = [&](std::size_t p) {
    return adjacency[p].size() >= static_cast<std::size_t>(minpts);
  };

  int next = 0;
  for (std::size_t seed = 0; seed < n; ++seed) {
    if (visited[seed] || !is_core(seed))
      continue;
    int cluster = next++;
    std::deque<std::uint32_t> queue{static_cast<std::uint32_t>(seed)};
    visited[seed] = true;
    out.labels[seed] = cluster;
    while (!queue.empty()) {
      std::uint32_t p = queue.front();
      queue.pop_front();
      if (!is_core(p))
        continue;  // border point: belongs to the cluster but does not expand it
      for (std::uint32_t q : adjacency[p]) {
        if (out.labels[q] == kNoiseLabel)
          out.labels[q] = cluster;
        if (!visited[q]) {
          visited[q] = true;
          queue.push_back(q);
        }
      }
    }
  }
  out.cluster_count = next;
  return out;
}

ClusterLabeling dbscan(const DistanceMatrix &dist, double eps, int minpts) {
  if (!(eps > 0.0))
    throw Error(Stage::FormatCluster, "eps must be positive");
  return dbscan_with_adjacency(eps_adjacency(dist, eps), minpts);
}

std::optional<double> silhouette(const DistanceMatrix &dist, const std::vector<int> &labels) {
  if (labels.size() != dist.size())
    throw Error(Stage::FormatCluster, "labeling size does not match distance matrix");
  int max_label = -1;
  for (int l : labels)
    max_label = std::max(max_label, l);
  if (max_label < 0)
    return std::nullopt;

  std::vector<std::size_t> sizes(static_cast<std::size_t>(max_label) + 1, 0);
  for (int l : labels)
    if (l >= 0)
      ++sizes[static_cast<std::size_t>(l)];
  std::size_t populated = 0;
  for (std::size_t s : sizes)
    if (s > 0)
      ++populated;
  if (populated < 2)
    return std::nullopt;

  double total = 0.0;
  std::size_t counted = 0;
  std::vector<double> mean_to(sizes.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    int li = labels[i];
    if (li < 0)
      continue;
    ++counted;
    if (sizes[static_cast<std::size_t>(li)] == 1)
      continue;  // singleton: silhouette 0 by convention
    std::fill(mean_to.begin(), mean_to.end(), 0.0);
    for (std::size_t j = 0; j < labels.size(); ++j) {
      int lj = labels[j];
      if (lj < 0 || j == i)
        continue;
      mean_to[static_cast<std::size_t>(lj)] += dist.at(i, j);
    }
    double a = mean_to[static_cast<std::size_t>(li)] /
               static_cast<double>(sizes[static_cast<std::size_t>(li)] - 1);
    double b = 0.0;
    bool have_b = false;
    for (std::size_t c = 0; c < sizes.size(); ++c) {
      if (c == static_cast<std::size_t>(li) || sizes[c] == 0)
        continue;
      double m = mean_to[c] / static_cast<double>(sizes[c]);
      if (!have_b || m < b) {
        b = m;
        have_b = true;
      }
    }
    double denom = std::max(a, b);
    if (denom > 0.0)
      total += (b - a) / denom;
  }
  return total / static_cast<double>(counted);
}

}  // namespace psmkit
