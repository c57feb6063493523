#pragma once

#include <vector>

#include "cluster.hpp"

namespace psmkit {

struct AcdaConfig {
  double eps_min = 0.1;
  double eps_max = 2.0;
  int minpts_min = 5;
  int minpts_max = 50;

  // Initial scan resolution.
  double eps_step = 0.1;
  int minpts_step = 5;

  // A sweep whose best silhouette improves on the running best by no more
  // than this has converged.
  double tol = 0.01;

  // Hard bounds the adapted resolutions may never leave.
  double eps_step_min = 0.01;
  double eps_step_max = 0.5;
  int minpts_step_min = 1;
  int minpts_step_max = 10;

  int max_iters = 12;

  void validate() const;
};

// Step update: grow proportionally to the improvement while quality is still
// rising, otherwise contract; always clamped into [lo, hi].
double adapt_step(double step, double improvement, double tol, double lo, double hi);
int adapt_int_step(int step, double improvement, double tol, int lo, int hi);

struct PfcLabeling {
  std::vector<int> labels;
  int cluster_count = 0;
  double eps = 0.0;
  int minpts = 0;
  double sc = -1.0;
};

struct AcdaIteration {
  double iter_best_sc = -1.0;
  double improvement = 0.0;
  double eps_step = 0.0;   // resolution in force after this iteration
  int minpts_step = 0;
};

struct AcdaTrace {
  std::vector<AcdaIteration> iterations;
  bool converged = false;
};

// Sweeps (eps, minpts) over the configured ranges, re-scanning with adapted
// resolution until the best silhouette stops improving, and returns the best
// clustering seen anywhere in the search. Ties prefer smaller eps, then
// smaller minpts.
PfcLabeling acda(const DistanceMatrix &dist, const AcdaConfig &cfg, AcdaTrace *trace = nullptr);
PfcLabeling acda(std::span<const FeatureVector> rows, const AcdaConfig &cfg,
                 AcdaTrace *trace = nullptr);

}  // namespace psmkit
