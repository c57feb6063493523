#include "metrics.hpp"

#include <algorithm>
#include <climits>
#include <cmath>

#include "errors.hpp"

namespace psmkit {

double rand_index(const std::vector<int> &a, const std::vector<int> &b) {
  if (a.size() != b.size())
    throw Error(Stage::Metrics, "labelings differ in length");
  const std::size_t n = a.size();
  if (n < 2)
    throw Error(Stage::Metrics, "rand index needs at least two points");

  auto choose2 = [](long long v) { return v * (v - 1) / 2; };
  std::map<std::pair<int, int>, long long> joint;
  std::map<int, long long> ma, mb;
  for (std::size_t i = 0; i < n; ++i) {
    ++joint[{a[i], b[i]}];
    ++ma[a[i]];
    ++mb[b[i]];
  }
  long long same_both = 0, same_a = 0, same_b = 0;
  for (const auto &[k, v] : joint)
    same_both += choose2(v);
  for (const auto &[k, v] : ma)
    same_a += choose2(v);
  for (const auto &[k, v] : mb)
    same_b += choose2(v);
  long long pairs = choose2(static_cast<long long>(n));
  long long agreements = pairs - (same_a - same_both) - (same_b - same_both);
  return static_cast<double>(agreements) / static_cast<double>(pairs);
}

std::map<int, int> majority_label_map(const std::vector<int> &pred,
                                      const std::vector<int> &truth) {
  if (pred.size() != truth.size())
    throw Error(Stage::Metrics, "labelings differ in length");
  std::map<int, std::map<int, long long>> votes;
  for (std::size_t i = 0; i < pred.size(); ++i)
    if (pred[i] >= 0)
      ++votes[pred[i]][truth[i]];
  std::map<int, int> out;
  for (const auto &[cluster, tally] : votes) {
    int best_label = 0;
    long long best_count = -1;
    for (const auto &[label, count] : tally) {
      if (count > best_count) {  // map order makes ties go to the smaller label
        best_count = count;
        best_label = label;
      }
    }
    out[cluster] = best_label;
  }
  return out;
}

Psm relabel_psm(const Psm &m, const std::map<int, int> &format_map) {
  Psm out = m;
  auto remap = [&](std::optional<int> &f) {
    if (!f.has_value())
      return;
    auto it = format_map.find(*f);
    if (it == format_map.end())
      throw Error(Stage::Metrics, "no mapping for format " + std::to_string(*f));
    f = it->second;
  };
  for (PsmState &s : out.states)
    remap(s.format);
  for (PsmTransition &t : out.transitions)
    remap(t.format);
  return out;
}

namespace {

bool is_real(const PsmState &s) { return s.role == Role::Client || s.role == Role::Server; }

std::vector<PsmState> real_states(const Psm &m) {
  std::vector<PsmState> out;
  for (const PsmState &s : m.states)
    if (is_real(s))
      out.push_back(s);
  std::sort(out.begin(), out.end(), [](const PsmState &a, const PsmState &b) { return a.id < b.id; });
  return out;
}

// Multiset of formats on edges incident to the state.
std::map<int, long long> incident_formats(const Psm &m, int state_id) {
  std::map<int, long long> out;
  for (const PsmTransition &t : m.transitions) {
    if (!t.format.has_value())
      continue;
    if (t.from == state_id || t.to == state_id)
      ++out[*t.format];
  }
  return out;
}

double multiset_dice(const std::map<int, long long> &a, const std::map<int, long long> &b) {
  long long na = 0, nb = 0, inter = 0;
  for (const auto &[k, v] : a)
    na += v;
  for (const auto &[k, v] : b)
    nb += v;
  if (na + nb == 0)
    return 1.0;  // two isolated states agree trivially
  for (const auto &[k, v] : a) {
    auto it = b.find(k);
    if (it != b.end())
      inter += std::min(v, it->second);
  }
  return 2.0 * static_cast<double>(inter) / static_cast<double>(na + nb);
}

}  // namespace

namespace {

// Shared core of the state matching: admissibility matrix plus a subset DP
// over reference states giving, for every (row, taken-set) suffix, the best
// achievable (cardinality, summed overlap) of a one-to-one matching.
struct MatchingSearch {
  struct Value {
    int card;
    double score;
  };

  std::vector<PsmState> inf, ref;
  std::vector<std::vector<double>> dice;  // -1 marks an inadmissible pair
  std::vector<std::vector<Value>> dp;     // (ni+1) x (1 << nr)

  MatchingSearch(const Psm &inferred, const Psm &reference)
      : inf(real_states(inferred)), ref(real_states(reference)) {
    const std::size_t ni = inf.size(), nr = ref.size();
    if (nr > 16)
      throw Error(Stage::Metrics, "reference machine too large for exact state matching");

    dice.assign(ni, std::vector<double>(nr, -1.0));
    for (std::size_t i = 0; i < ni; ++i) {
      auto fi = incident_formats(inferred, inf[i].id);
      for (std::size_t j = 0; j < nr; ++j) {
        if (inf[i].role != ref[j].role)
          continue;
        auto fj = incident_formats(reference, ref[j].id);
        double d = multiset_dice(fi, fj);
        if (d > 0.0)
          dice[i][j] = d;  // admissible pair
      }
    }

    const std::size_t masks = std::size_t{1} << nr;
    dp.assign(ni + 1, std::vector<Value>(masks, {0, 0.0}));
    for (std::size_t i = ni; i-- > 0;) {
      for (std::size_t mask = 0; mask < masks; ++mask) {
        Value best = dp[i + 1][mask];  // skip row i
        for (std::size_t j = 0; j < nr; ++j) {
          if (dice[i][j] < 0.0 || (mask & (std::size_t{1} << j)))
            continue;
          const Value &next = dp[i + 1][mask | (std::size_t{1} << j)];
          Value v{next.card + 1, next.score + 1.0 + dice[i][j]};
          if (v.card > best.card || (v.card == best.card && v.score > best.score))
            best = v;
        }
        dp[i][mask] = best;
      }
    }
  }

  bool optimal(const Value &v, const Value &target) const {
    return v.card == target.card && std::fabs(v.score - target.score) <= 1e-9;
  }
};

}  // namespace

StateMatching match_states(const Psm &inferred, const Psm &reference) {
  MatchingSearch s(inferred, reference);
  const std::size_t ni = s.inf.size(), nr = s.ref.size();

  // Walk one optimal matching, resolving ties toward the lowest-numbered
  // reference state and preferring a match over a skip.
  StateMatching out;
  std::size_t mask = 0;
  for (std::size_t i = 0; i < ni; ++i) {
    const MatchingSearch::Value &target = s.dp[i][mask];
    int picked = -1;
    for (std::size_t j = 0; j < nr && picked < 0; ++j) {
      if (s.dice[i][j] < 0.0 || (mask & (std::size_t{1} << j)))
        continue;
      const MatchingSearch::Value &next = s.dp[i + 1][mask | (std::size_t{1} << j)];
      if (s.optimal({next.card + 1, next.score + 1.0 + s.dice[i][j]}, target))
        picked = static_cast<int>(j);
    }
    if (picked >= 0) {
      out.pairs.emplace_back(s.inf[i].id, s.ref[static_cast<std::size_t>(picked)].id);
      mask |= std::size_t{1} << static_cast<std::size_t>(picked);
    }
  }
  return out;
}

double state_machine_correspondence(const Psm &inferred, const Psm &reference) {
  std::size_t ni = real_states(inferred).size();
  std::size_t nr = real_states(reference).size();
  if (ni + nr == 0)
    return 1.0;
  StateMatching m = match_states(inferred, reference);
  return 2.0 * static_cast<double>(m.pairs.size()) / static_cast<double>(ni + nr);
}

namespace {

struct EdgeKey {
  int from;
  int to;
  int format_or_min;  // INT_MIN stands in for "no format"

  auto operator<=>(const EdgeKey &) const = default;
};

// Real transitions (both endpoints client/server states) as a multiset.
std::map<EdgeKey, long long> real_transitions(const Psm &m) {
  std::map<int, const PsmState *> by_id;
  for (const PsmState &s : m.states)
    by_id[s.id] = &s;
  std::map<EdgeKey, long long> out;
  for (const PsmTransition &t : m.transitions) {
    auto f = by_id.find(t.from);
    auto g = by_id.find(t.to);
    if (f == by_id.end() || g == by_id.end() || !is_real(*f->second) || !is_real(*g->second))
      continue;
    EdgeKey k{t.from, t.to, t.format.has_value() ? *t.format : INT_MIN};
    ++out[k];
  }
  return out;
}

}  // namespace

namespace {

long long matched_transitions(const std::map<EdgeKey, long long> &ti,
                              const std::map<EdgeKey, long long> &tr,
                              const std::map<int, int> &to_ref) {
  long long matched = 0;
  for (const auto &[k, count] : ti) {
    auto f = to_ref.find(k.from);
    auto g = to_ref.find(k.to);
    if (f == to_ref.end() || g == to_ref.end())
      continue;
    auto it = tr.find(EdgeKey{f->second, g->second, k.format_or_min});
    if (it != tr.end())
      matched += std::min(count, it->second);
  }
  return matched;
}

// All matchings tied at the DP optimum are equally good state matchings, but
// they can map transitions differently. Walking every optimal matching and
// keeping the best transition agreement makes the score independent of which
// machine is called "inferred" and of tie-break order.
void best_over_optimal_matchings(const MatchingSearch &s, std::size_t i, std::size_t mask,
                                 std::map<int, int> &to_ref,
                                 const std::map<EdgeKey, long long> &ti,
                                 const std::map<EdgeKey, long long> &tr, long long &best) {
  if (i == s.inf.size()) {
    best = std::max(best, matched_transitions(ti, tr, to_ref));
    return;
  }
  const MatchingSearch::Value &target = s.dp[i][mask];
  for (std::size_t j = 0; j < s.ref.size(); ++j) {
    if (s.dice[i][j] < 0.0 || (mask & (std::size_t{1} << j)))
      continue;
    const MatchingSearch::Value &next = s.dp[i + 1][mask | (std::size_t{1} << j)];
    if (!s.optimal({next.card + 1, next.score + 1.0 + s.dice[i][j]}, target))
      continue;
    to_ref[s.inf[i].id] = s.ref[j].id;
    best_over_optimal_matchings(s, i + 1, mask | (std::size_t{1} << j), to_ref, ti, tr, best);
    to_ref.erase(s.inf[i].id);
  }
  if (s.optimal(s.dp[i + 1][mask], target))
    best_over_optimal_matchings(s, i + 1, mask, to_ref, ti, tr, best);
}

}  // namespace

double transition_correspondence(const Psm &inferred, const Psm &reference) {
  auto ti = real_transitions(inferred);
  auto tr = real_transitions(reference);
  long long ni = 0, nr = 0;
  for (const auto &[k, v] : ti)
    ni += v;
  for (const auto &[k, v] : tr)
    nr += v;
  if (ni + nr == 0)
    return 1.0;
  if (ni == 0 || nr == 0)
    return 0.0;

  MatchingSearch s(inferred, reference);
  std::map<int, int> to_ref;
  long long matched = 0;
  best_over_optimal_matchings(s, 0, 0, to_ref, ti, tr, matched);
  return 2.0 * static_cast<double>(matched) / static_cast<double>(ni + nr);
}

}  // namespace psmkit
