#include "pfts.hpp"

#include <set>

#include "cluster.hpp"
#include "errors.hpp"

namespace psmkit {

void Pfts::recount() {
  totals.clear();
  n_set = 0;
  for (const auto &[edge, count] : counts) {
    totals[edge.first] += count;
    n_set += count;
  }
}

Pfts build_pfts(const std::vector<SessionSequence> &seqs) {
  Pfts p;
  for (const SessionSequence &s : seqs) {
    int prev = kStartLabel;
    for (int tok : s.tokens) {
      if (tok == kNoiseLabel)
        continue;
      ++p.counts[{prev, tok}];
      prev = tok;
    }
    ++p.counts[{prev, kEndLabel}];
  }
  p.recount();
  return p;
}

double transition_prob(const Pfts &p, int from, int to) {
  auto c = p.counts.find({from, to});
  if (c == p.counts.end())
    return 0.0;
  auto t = p.totals.find(from);
  if (t == p.totals.end() || t->second == 0)
    return 0.0;
  return static_cast<double>(c->second) / static_cast<double>(t->second);
}

double transition_share(const Pfts &p, int from, int to) {
  auto c = p.counts.find({from, to});
  if (c == p.counts.end() || p.n_set == 0)
    return 0.0;
  return static_cast<double>(c->second) / static_cast<double>(p.n_set);
}

void NoiseThresholds::validate() const {
  if (min_prob < 0.0 || min_prob > 1.0 || min_share < 0.0 || min_share > 1.0)
    throw Error(Stage::Config, "noise thresholds must lie in [0, 1]");
}

Pfts filter_noise(const Pfts &p, const NoiseThresholds &t) {
  t.validate();
  Pfts out;
  for (const auto &[edge, count] : p.counts) {
    if (transition_prob(p, edge.first, edge.second) < t.min_prob)
      continue;
    if (transition_share(p, edge.first, edge.second) < t.min_share)
      continue;
    out.counts[edge] = count;
  }

  // A format that survived the cut must stay enterable and exitable; restore
  // its original virtual edges if the filter removed its last ones.
  std::set<int> live;
  for (const auto &[edge, count] : out.counts) {
    if (edge.first != kStartLabel && edge.first != kEndLabel)
      live.insert(edge.first);
    if (edge.second != kStartLabel && edge.second != kEndLabel)
      live.insert(edge.second);
  }
  for (int label : live) {
    bool has_in = false, has_out = false;
    for (const auto &[edge, count] : out.counts) {
      if (edge.second == label)
        has_in = true;
      if (edge.first == label)
        has_out = true;
    }
    if (!has_in) {
      auto orig = p.counts.find({kStartLabel, label});
      if (orig != p.counts.end())
        out.counts[{kStartLabel, label}] = orig->second;
    }
    if (!has_out) {
      auto orig = p.counts.find({label, kEndLabel});
      if (orig != p.counts.end())
        out.counts[{label, kEndLabel}] = orig->second;
    }
  }

  out.recount();
  return out;
}

}  // namespace psmkit
