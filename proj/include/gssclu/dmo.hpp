#pragma once

// Online weight learning for the E-S metric. Minimizes the log-barrier form
//
//   t * sum_l w_l I_l  -  sum_{i != j} log(||Ci - Cj||_A - 1)
//
// over the diagonal weights w, where I_l is the total intra-cluster distance
// of component l and ||Ci - Cj||_A = sqrt(Q_ij), Q_ij = sum_l w_l B_ij,l. The
// ordered double sum counts each unordered pair twice. Each refresh runs a few
// projected gradient steps with backtracking, warm-started from the current
// weights.

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "gssclu/distance.hpp"

namespace gssclu {

struct DmoConfig {
  double t = 1.0;               // barrier parameter
  double step_size = 0.1;       // initial step of every line search
  std::size_t max_steps = 25;   // gradient steps per refresh
  double feasibility_margin = 0.05;
  double weight_floor = 0.0;

  // Throws InvalidArgument unless t > 0, step_size > 0,
  // 0 < feasibility_margin < 1 and weight_floor >= 0.
  void validate() const;

  friend bool operator==(const DmoConfig&, const DmoConfig&) = default;
};

// Intra and pairwise inter distances of the live clusters, frozen for one
// refresh.
struct DmoSnapshot {
  struct Pair {
    std::size_t i = 0;
    std::size_t j = 0;
    std::vector<double> inter_sq;  // B_ij,l per component

    // All B_ij,l zero: no weighting can separate the pair.
    bool degenerate() const;
  };

  std::vector<double> intra;  // I_l per component
  std::vector<Pair> pairs;    // unordered pairs i < j

  std::size_t components() const { return intra.size(); }
  // Q_ij = sum_l w_l B_ij,l.
  static double separation_sq(const Pair& p, std::span<const double> w);
};

template <ClusterStatistics S>
DmoSnapshot dmo_snapshot(std::span<const S> clusters) {
  if (clusters.size() < 2) throw InvalidArgument("weight optimization needs at least 2 clusters");
  const std::size_t m = clusters.front().components();
  DmoSnapshot s;
  s.intra.assign(m, 0.0);
  for (const auto& c : clusters)
    for (std::size_t l = 0; l < m; ++l) s.intra[l] += intra_distance_sq(c, l);
  for (std::size_t i = 0; i < clusters.size(); ++i) {
    for (std::size_t j = i + 1; j < clusters.size(); ++j) {
      DmoSnapshot::Pair p{i, j, std::vector<double>(m)};
      for (std::size_t l = 0; l < m; ++l) p.inter_sq[l] = inter_distance_sq(clusters[i], clusters[j], l);
      s.pairs.push_back(std::move(p));
    }
  }
  return s;
}

// Value of the barrier objective, or nullopt when some non-degenerate pair has
// sqrt(Q_ij) <= 1. Degenerate pairs are left out of the barrier.
std::optional<double> dmo_objective(std::span<const double> w, const DmoSnapshot& s,
                                    const DmoConfig& cfg);
inline std::optional<double> dmo_objective(const WeightVector& a, const DmoSnapshot& s,
                                           const DmoConfig& cfg) {
  return dmo_objective(a.values(), s, cfg);
}

// Analytic gradient. Throws InvalidArgument at an infeasible point.
std::vector<double> dmo_gradient(std::span<const double> w, const DmoSnapshot& s,
                                 const DmoConfig& cfg);
inline std::vector<double> dmo_gradient(const WeightVector& a, const DmoSnapshot& s,
                                        const DmoConfig& cfg) {
  return dmo_gradient(a.values(), s, cfg);
}

struct RefineResult {
  WeightVector weights;
  // Objective after feasibility repair, then after every accepted step.
  std::vector<double> objective_trace;
  bool skipped = false;    // fewer than 2 clusters or every pair degenerate
  bool rescaled = false;   // feasibility repair changed the weights
  std::size_t accepted_steps = 0;
};

RefineResult dmo_refine(const WeightVector& a, const DmoSnapshot& s, const DmoConfig& cfg);

template <ClusterStatistics S>
RefineResult dmo_refine(const WeightVector& a, std::span<const S> clusters,
                        const DmoConfig& cfg) {
  if (clusters.size() < 2) return RefineResult{a, {}, true, false, 0};
  return dmo_refine(a, dmo_snapshot(clusters), cfg);
}

}  // namespace gssclu
