#include "align.hpp"

#include <algorithm>
#include <utility>

#include "errors.hpp"

namespace psmkit {

void AlignmentParams::validate() const {
  if (match <= 0)
    throw Error(Stage::Config, "alignment match score must be positive");
  if (mismatch >= match || gap >= match)
    throw Error(Stage::Config, "mismatch and gap penalties must be below the match score");
}

std::size_t nw_similarity(const std::vector<int> &a, const std::vector<int> &b,
                          const AlignmentParams &p) {
  p.validate();
  const std::size_t n = a.size(), m = b.size();
  // Cell value: (alignment score, matches), compared lexicographically. Both
  // components are additive along an alignment path, so the usual DP
  // recurrence stays exact for the pair.
  using Cell = std::pair<long long, long long>;
  std::vector<Cell> prev(m + 1), cur(m + 1);
  for (std::size_t j = 0; j <= m; ++j)
    prev[j] = {static_cast<long long>(j) * p.gap, 0};
  for (std::size_t i = 1; i <= n; ++i) {
    cur[0] = {static_cast<long long>(i) * p.gap, 0};
    for (std::size_t j = 1; j <= m; ++j) {
      bool eq = a[i - 1] == b[j - 1];
      Cell diag{prev[j - 1].first + (eq ? p.match : p.mismatch), prev[j - 1].second + (eq ? 1 : 0)};
      Cell up{prev[j].first + p.gap, prev[j].second};
      Cell left{cur[j - 1].first + p.gap, cur[j - 1].second};
      cur[j] = std::max({diag, up, left});
    }
    std::swap(prev, cur);
  }
  return static_cast<std::size_t>(prev[m].second);
}

double session_distance(const std::vector<int> &a, const std::vector<int> &b,
                        const AlignmentParams &p) {
  std::size_t longest = std::max(a.size(), b.size());
  if (longest == 0)
    return 0.0;
  std::size_t matches = nw_similarity(a, b, p);
  return 1.0 - static_cast<double>(matches) / static_cast<double>(longest);
}

}  // namespace psmkit
