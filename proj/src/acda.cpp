#include "acda.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "errors.hpp"

namespace psmkit {

void AcdaConfig::validate() const {
  if (!(eps_min > 0.0) || eps_min > eps_max)
    throw Error(Stage::Config, "eps range must satisfy 0 < eps_min <= eps_max");
  if (minpts_min < 1 || minpts_min > minpts_max)
    throw Error(Stage::Config, "minpts range must satisfy 1 <= minpts_min <= minpts_max");
  if (!(eps_step > 0.0) || minpts_step < 1)
    throw Error(Stage::Config, "initial steps must be positive");
  if (!(eps_step_min > 0.0) || eps_step_min > eps_step_max)
    throw Error(Stage::Config, "eps step bounds must satisfy 0 < min <= max");
  if (minpts_step_min < 1 || minpts_step_min > minpts_step_max)
    throw Error(Stage::Config, "minpts step bounds must satisfy 1 <= min <= max");
  if (tol < 0.0)
    throw Error(Stage::Config, "tol must be non-negative");
  if (max_iters < 1)
    throw Error(Stage::Config, "max_iters must be at least 1");
}

double adapt_step(double step, double improvement, double tol, double lo, double hi) {
  double factor = improvement > tol ? 1.0 + improvement : 1.0 - improvement;
  return std::clamp(step * factor, lo, hi);
}

int adapt_int_step(int step, double improvement, double tol, int lo, int hi) {
  double factor = improvement > tol ? 1.0 + improvement : 1.0 - improvement;
  long long v = std::llround(static_cast<double>(step) * factor);
  return static_cast<int>(std::clamp(v, static_cast<long long>(lo), static_cast<long long>(hi)));
}

PfcLabeling acda(const DistanceMatrix &dist, const AcdaConfig &cfg, AcdaTrace *trace) {
  cfg.validate();
  if (dist.size() == 0)
    throw Error(Stage::FormatCluster, "nothing to cluster");

  double eps_step = std::clamp(cfg.eps_step, cfg.eps_step_min, cfg.eps_step_max);
  int minpts_step = std::clamp(cfg.minpts_step, cfg.minpts_step_min, cfg.minpts_step_max);

  PfcLabeling best;
  bool have_best = false;
  double running_best_sc = -1.0;
  // Silhouette depends only on the labeling; sweeps revisit the same
  // labelings constantly, so cache by label vector.
  std::map<std::vector<int>, std::optional<double>> sc_cache;

  for (int iter = 1; iter <= cfg.max_iters; ++iter) {
    double iter_best_sc = -1.0;
    bool iter_has_valid = false;

    for (double eps = cfg.eps_min; eps <= cfg.eps_max + 1e-9; eps += eps_step) {
      auto adjacency = eps_adjacency(dist, eps);
      for (int minpts = cfg.minpts_min; minpts <= cfg.minpts_max; minpts += minpts_step) {
        ClusterLabeling labeling = dbscan_with_adjacency(adjacency, minpts);
        auto it = sc_cache.find(labeling.labels);
        if (it == sc_cache.end())
          it = sc_cache.emplace(labeling.labels, silhouette(dist, labeling.labels)).first;
        if (!it->second.has_value())
          continue;
        double sc = *it->second;
        iter_has_valid = true;
        iter_best_sc = std::max(iter_best_sc, sc);
        bool better = !have_best || sc > best.sc ||
                      (sc == best.sc && (eps < best.eps ||
                                         (eps == best.eps && minpts < best.minpts)));
        if (better) {
          best.labels = labeling.labels;
          best.cluster_count = labeling.cluster_count;
          best.eps = eps;
          best.minpts = minpts;
          best.sc = sc;
          have_best = true;
        }
      }
    }

    double improvement = (iter_has_valid ? iter_best_sc : -1.0) - running_best_sc;
    if (iter_has_valid)
      running_best_sc = std::max(running_best_sc, iter_best_sc);

    bool converged = iter >= 2 && improvement <= cfg.tol;
    if (!converged) {
      eps_step = adapt_step(eps_step, improvement, cfg.tol, cfg.eps_step_min, cfg.eps_step_max);
      minpts_step =
          adapt_int_step(minpts_step, improvement, cfg.tol, cfg.minpts_step_min, cfg.minpts_step_max);
    }
    if (trace)
      trace->iterations.push_back({iter_best_sc, improvement, eps_step, minpts_step});
    if (converged) {
      if (trace)
        trace->converged = true;
      break;
    }
  }

  if (!have_best)
    throw Error(Stage::FormatCluster, "no valid clustering anywhere in the search range");
  return best;
}

PfcLabeling acda(std::span<const FeatureVector> rows, const AcdaConfig &cfg, AcdaTrace *trace) {
  return acda(DistanceMatrix::from_vectors(rows), cfg, trace);
}

}  // namespace psmkit
