#pragma once

#include <map>
#include <utility>
#include <vector>

#include "psm.hpp"

namespace psmkit {

// Pairwise agreement of two labelings of the same points, in [0, 1]. Label
// values carry no meaning across the two vectors; only co-membership counts.
double rand_index(const std::vector<int> &a, const std::vector<int> &b);

// For each cluster in `pred`, the most common label in `truth` over the same
// positions (smaller truth label on ties). Noise (-1) entries of pred get no
// mapping.
std::map<int, int> majority_label_map(const std::vector<int> &pred,
                                      const std::vector<int> &truth);

// Rewrites every state/transition format of a machine through the given map.
Psm relabel_psm(const Psm &m, const std::map<int, int> &format_map);

struct StateMatching {
  // (inferred state id, reference state id) over real states only; the
  // virtual start/end states correspond implicitly.
  std::vector<std::pair<int, int>> pairs;
};

// Maximum-cardinality assignment between the real states of the two machines.
// States may pair only when their roles agree and their incident format
// multisets overlap; among maximum assignments the one with the highest total
// overlap wins, with deterministic ties (earlier inferred state keeps the
// smaller reference id).
StateMatching match_states(const Psm &inferred, const Psm &reference);

// Dice coefficient of matched states: 2*|matching| / (#real states inferred +
// #real states reference). Two empty machines count as identical.
double state_machine_correspondence(const Psm &inferred, const Psm &reference);

// Dice coefficient of matched transitions: a real transition matches when
// both endpoint states are matched and the reference holds the same edge with
// the same format. Edges touching start/end are not counted.
double transition_correspondence(const Psm &inferred, const Psm &reference);

}  // namespace psmkit
