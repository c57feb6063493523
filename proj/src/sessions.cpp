#include "sessions.hpp"

#include <algorithm>
#include <limits>

#include "errors.hpp"

namespace psmkit {

std::vector<SessionSequence> label_sessions(const std::vector<Session> &sessions,
                                            const std::vector<int> &flat_labels) {
  std::size_t total = 0;
  for (const Session &s : sessions)
    total += s.messages.size();
  if (total != flat_labels.size())
    throw Error(Stage::SessionCluster, "label vector does not match message count");

  std::vector<SessionSequence> out;
  out.reserve(sessions.size());
  std::size_t i = 0;
  for (const Session &s : sessions) {
    SessionSequence seq;
    seq.session_key = s.key;
    seq.tokens.reserve(s.messages.size());
    for (std::size_t m = 0; m < s.messages.size(); ++m)
      seq.tokens.push_back(flat_labels[i++]);
    out.push_back(std::move(seq));
  }
  return out;
}

DistanceMatrix session_distance_matrix(const std::vector<SessionSequence> &seqs,
                                       const AlignmentParams &params) {
  DistanceMatrix m(seqs.size());
  for (std::size_t i = 0; i < seqs.size(); ++i)
    for (std::size_t j = i + 1; j < seqs.size(); ++j)
      m.set(i, j, session_distance(seqs[i].tokens, seqs[j].tokens, params));
  return m;
}

namespace {

double total_distance(const DistanceMatrix &dist, std::size_t p) {
  double sum = 0.0;
  for (std::size_t q = 0; q < dist.size(); ++q)
    sum += dist.at(p, q);
  return sum;
}

std::vector<int> greedy_seeds(const DistanceMatrix &dist, int k) {
  const std::size_t n = dist.size();
  std::vector<int> medoids;
  std::size_t first = 0;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t p = 0; p < n; ++p) {
    double t = total_distance(dist, p);
    if (t < best) {
      best = t;
      first = p;
    }
  }
  medoids.push_back(static_cast<int>(first));
  std::vector<double> nearest(n);
  for (std::size_t p = 0; p < n; ++p)
    nearest[p] = dist.at(p, first);
  while (static_cast<int>(medoids.size()) < k) {
    std::size_t pick = 0;
    double far = -1.0;
    for (std::size_t p = 0; p < n; ++p) {
      bool taken = std::find(medoids.begin(), medoids.end(), static_cast<int>(p)) != medoids.end();
      if (taken)
        continue;
      if (nearest[p] > far) {
        far = nearest[p];
        pick = p;
      }
    }
    medoids.push_back(static_cast<int>(pick));
    for (std::size_t p = 0; p < n; ++p)
      nearest[p] = std::min(nearest[p], dist.at(p, pick));
  }
  return medoids;
}

}  // namespace

SessionClustering kmedoids(const DistanceMatrix &dist, int k, std::uint64_t seed,
                           std::vector<double> *objective_trace) {
  (void)seed;
  const std::size_t n = dist.size();
  if (k < 1 || static_cast<std::size_t>(k) > n)
    throw Error(Stage::SessionCluster, "k must be between 1 and the number of points");

  std::vector<int> medoids = greedy_seeds(dist, k);
  std::vector<int> labels(n, 0);

  for (int round = 0; round < 100; ++round) {
    // Assignment: nearest medoid, earliest in the list on ties.
    double objective = 0.0;
    for (std::size_t p = 0; p < n; ++p) {
      int best_c = 0;
      double best_d = std::numeric_limits<double>::infinity();
      for (std::size_t c = 0; c < medoids.size(); ++c) {
        double d = dist.at(p, static_cast<std::size_t>(medoids[c]));
        if (d < best_d) {
          best_d = d;
          best_c = static_cast<int>(c);
        }
      }
      labels[p] = best_c;
      objective += best_d;
    }
    if (objective_trace)
      objective_trace->push_back(objective);

    // Update: each cluster's new medoid minimises total distance within the
    // cluster; smallest index on ties.
    std::vector<int> updated = medoids;
    for (std::size_t c = 0; c < medoids.size(); ++c) {
      double best_total = std::numeric_limits<double>::infinity();
      int best_p = medoids[c];
      for (std::size_t p = 0; p < n; ++p) {
        if (labels[p] != static_cast<int>(c))
          continue;
        double total = 0.0;
        for (std::size_t q = 0; q < n; ++q)
          if (labels[q] == static_cast<int>(c))
            total += dist.at(p, q);
        if (total < best_total) {
          best_total = total;
          best_p = static_cast<int>(p);
        }
      }
      updated[c] = best_p;
    }
    if (updated == medoids)
      break;
    medoids = std::move(updated);
  }

  SessionClustering out;
  out.labels = std::move(labels);
  out.k = k;
  out.medoids = std::move(medoids);
  out.sc = silhouette(dist, out.labels);
  return out;
}

SessionClustering cluster_sessions(const std::vector<SessionSequence> &seqs,
                                   int format_cluster_count, const AlignmentParams &params,
                                   std::uint64_t seed) {
  if (seqs.empty())
    throw Error(Stage::SessionCluster, "no sessions to cluster");
  const int n = static_cast<int>(seqs.size());
  DistanceMatrix dist = session_distance_matrix(seqs, params);

  int k_max = std::min(format_cluster_count, n - 1);
  SessionClustering best;
  bool have = false;
  for (int k = 2; k <= k_max; ++k) {
    SessionClustering c = kmedoids(dist, k, seed);
    if (!c.sc.has_value())
      continue;
    if (!have || *c.sc > *best.sc) {
      best = std::move(c);
      have = true;
    }
  }
  if (have)
    return best;

  // Degenerate trace: everything in one cluster, silhouette undefined.
  SessionClustering one;
  one.labels.assign(seqs.size(), 0);
  one.k = 1;
  one.medoids = greedy_seeds(dist, 1);
  one.sc = std::nullopt;
  return one;
}

}  // namespace psmkit
