#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace psmkit {

struct AlignmentParams {
  int match = 2;
  int mismatch = -1;
  int gap = -1;

  void validate() const;
};

// A session rewritten as the sequence of format-cluster labels of its
// messages, in message order. Noise labels stay in the sequence as ordinary
// tokens.
struct SessionSequence {
  std::string session_key;
  std::vector<int> tokens;
};

// Number of identically-matched positions in the best global alignment of a
// and b. Among all alignments of maximal score, the one with the most matches
// counts.
std::size_t nw_similarity(const std::vector<int> &a, const std::vector<int> &b,
                          const AlignmentParams &p);

// 1 - matches / max(|a|, |b|); 0 for two empty sequences.
double session_distance(const std::vector<int> &a, const std::vector<int> &b,
                        const AlignmentParams &p);

}  // namespace psmkit
