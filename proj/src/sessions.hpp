#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "align.hpp"
#include "cluster.hpp"
#include "trace.hpp"

namespace psmkit {

// Rewrites each session as its sequence of format-cluster labels. The flat
// label vector must line up with flatten_payloads() order.
std::vector<SessionSequence> label_sessions(const std::vector<Session> &sessions,
                                            const std::vector<int> &flat_labels);

DistanceMatrix session_distance_matrix(const std::vector<SessionSequence> &seqs,
                                       const AlignmentParams &params);

struct SessionClustering {
  std::vector<int> labels;
  int k = 0;
  std::vector<int> medoids;  // point indices, one per cluster, in cluster order
  std::optional<double> sc;
};

// PAM-style k-medoids with a deterministic greedy seeding (min-total-distance
// first, then farthest-point), so identical inputs give identical clusterings.
// `seed` is accepted for interface stability and currently unused.
// objective_trace, when given, receives the total point-to-medoid distance
// after every assignment step.
SessionClustering kmedoids(const DistanceMatrix &dist, int k, std::uint64_t seed,
                           std::vector<double> *objective_trace = nullptr);

// Tries k = 2 .. min(format_cluster_count, n-1) and keeps the k with the best
// silhouette (ties to the smaller k). When that range is empty the whole
// trace is one cluster and the silhouette is undefined.
SessionClustering cluster_sessions(const std::vector<SessionSequence> &seqs,
                                   int format_cluster_count, const AlignmentParams &params,
                                   std::uint64_t seed);

}  // namespace psmkit
