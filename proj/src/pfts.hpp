#pragma once

#include <map>
#include <utility>
#include <vector>

#include "align.hpp"

namespace psmkit {

// Virtual endpoints of every session in the transition set.
inline constexpr int kStartLabel = -2;
inline constexpr int kEndLabel = -3;

// Format transition set: how often each ordered pair of format labels occurs
// consecutively across all sessions, plus virtual start/end transitions.
struct Pfts {
  std::map<std::pair<int, int>, long long> counts;
  std::map<int, long long> totals;  // outgoing transition count per source label
  long long n_set = 0;              // all transitions in the set

  void recount();
};

// Builds the transition set from labeled sessions. Noise tokens are bridged
// over: they are not formats, so they form no states and no transitions. A
// session with nothing but noise contributes one start->end transition.
Pfts build_pfts(const std::vector<SessionSequence> &seqs);

// Fraction of `from`'s outgoing transitions that go to `to`; 0 when `from`
// has none.
double transition_prob(const Pfts &p, int from, int to);

// Share of (from, to) among every transition in the set; 0 for an empty set.
double transition_share(const Pfts &p, int from, int to);

struct NoiseThresholds {
  double min_prob = 0.05;   // threshold on transition_prob
  double min_share = 0.05;  // threshold on transition_share

  void validate() const;
};

// Drops transitions below either threshold, then restores original
// start->x / x->end edges for any surviving format that the filter left
// without an entry or exit, and finally recounts. Applying the filter twice
// changes nothing.
Pfts filter_noise(const Pfts &p, const NoiseThresholds &t);

}  // namespace psmkit
