#pragma once

// Distance estimators between graphs and clusters, and between clusters.
//
// Every estimator is built from three per-component primitives that each
// statistics backend provides (component 0 is edges, l = 1..d side types):
//   component_distance_sq(g, c, l)  squared distance of g to the centroid of c
//   intra_distance_sq(c, l)         sum over members of squared distance to centroid
//   inter_distance_sq(ci, cj, l)    squared distance between centroids
// The sketch overloads are declared here, the exact ones in exact_stats.hpp.

#include <cmath>
#include <concepts>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "gssclu/cluster_stats.hpp"
#include "gssclu/errors.hpp"
#include "gssclu/model.hpp"

namespace gssclu {

// Diagonal of the E-S metric: w0 weighs edges, w1..wd the side types.
class WeightVector {
 public:
  // Throws InvalidArgument when empty or any weight is negative or not finite.
  explicit WeightVector(std::vector<double> weights);

  static WeightVector identity(std::size_t components) {
    return WeightVector(std::vector<double>(components, 1.0));
  }

  std::size_t size() const { return w_.size(); }
  double operator[](std::size_t i) const { return w_[i]; }
  std::span<const double> values() const { return w_; }

  friend bool operator==(const WeightVector&, const WeightVector&) = default;

 private:
  std::vector<double> w_;
};

// Per-component unsquared distances [d_e, d_s(T1), ..., d_s(Td)].
struct DistanceVector {
  std::vector<double> components;

  std::size_t size() const { return components.size(); }
  double operator[](std::size_t i) const { return components[i]; }
  // D^T A D.
  double weighted_sq(const WeightVector& a) const;

  friend bool operator==(const DistanceVector&, const DistanceVector&) = default;
};

// Sketch-backed primitives. All throw InvalidArgument on an empty cluster
// (count 0) or a component index above d, and clamp negative raw estimates
// to 0.
double component_distance_sq(const PreparedGraph& g, const ClusterStats& c,
                             std::size_t component);
double intra_distance_sq(const ClusterStats& c, std::size_t component);
// Throws ConfigMismatch on differing sketch configs.
double inter_distance_sq(const ClusterStats& a, const ClusterStats& b, std::size_t component);

template <class S>
concept ClusterStatistics = requires(const S& s, const PreparedGraph& g, std::size_t l) {
  { s.count() } -> std::convertible_to<std::uint64_t>;
  { s.last_update() } -> std::convertible_to<Timestamp>;
  { s.components() } -> std::convertible_to<std::size_t>;
  { component_distance_sq(g, s, l) } -> std::convertible_to<double>;
  { intra_distance_sq(s, l) } -> std::convertible_to<double>;
  { inter_distance_sq(s, s, l) } -> std::convertible_to<double>;
};

template <ClusterStatistics S>
double edge_distance_sq(const PreparedGraph& g, const S& c) {
  return component_distance_sq(g, c, 0);
}

// type is 1-based (1..d).
template <ClusterStatistics S>
double side_distance_sq(const PreparedGraph& g, const S& c, std::size_t type) {
  if (type == 0) throw InvalidArgument("side type index is 1-based");
  return component_distance_sq(g, c, type);
}

template <ClusterStatistics S>
DistanceVector distance_vector(const PreparedGraph& g, const S& c) {
  DistanceVector out;
  out.components.reserve(c.components());
  for (std::size_t l = 0; l < c.components(); ++l)
    out.components.push_back(std::sqrt(component_distance_sq(g, c, l)));
  return out;
}

namespace detail {
inline void check_weights(const WeightVector& a, std::size_t components) {
  if (a.size() != components)
    throw InvalidArgument("weight vector has " + std::to_string(a.size()) +
                          " components, statistics have " + std::to_string(components));
}
}  // namespace detail

// w0 * d_e^2 + sum_l w_l * d_s^2(l).
template <ClusterStatistics S>
double es_distance_sq(const PreparedGraph& g, const S& c, const WeightVector& a) {
  detail::check_weights(a, c.components());
  double sum = 0.0;
  for (std::size_t l = 0; l < a.size(); ++l) sum += a[l] * component_distance_sq(g, c, l);
  return sum;
}

// sum_l w_l * intra_distance_sq(c, l).
template <ClusterStatistics S>
double weighted_intra_distance_sq(const S& c, const WeightVector& a) {
  detail::check_weights(a, c.components());
  double sum = 0.0;
  for (std::size_t l = 0; l < a.size(); ++l) sum += a[l] * intra_distance_sq(c, l);
  return sum;
}

// ||Ci - Cj||_A, unsquared.
template <ClusterStatistics S>
double es_inter_distance(const S& ci, const S& cj, const WeightVector& a) {
  detail::check_weights(a, ci.components());
  double sum = 0.0;
  for (std::size_t l = 0; l < a.size(); ++l) sum += a[l] * inter_distance_sq(ci, cj, l);
  return std::sqrt(sum);
}

// p times the mean squared radius of c under A.
template <ClusterStatistics S>
double structural_spread(const S& c, const WeightVector& a, double p) {
  if (!(p >= 0.0)) throw InvalidArgument("spread factor p must be nonnegative");
  if (c.count() == 0) throw InvalidArgument("structural spread of an empty cluster");
  return p / static_cast<double>(c.count()) * weighted_intra_distance_sq(c, a);
}

}  // namespace gssclu
