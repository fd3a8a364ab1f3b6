#pragma once

// Closed forms shared by both statistics backends. Keeping the arithmetic in
// one place makes the two backends agree bit for bit whenever their inputs
// (cross terms, self products) agree.

#include <cstdint>
#include <string>

#include "gssclu/errors.hpp"

namespace gssclu::detail {

inline double clamp_nonnegative(double v) { return v > 0.0 ? v : 0.0; }

inline void check_cluster(std::uint64_t n, std::size_t component, std::size_t components) {
  if (n == 0) throw InvalidArgument("distance to an empty cluster");
  if (component >= components)
    throw InvalidArgument("component index " + std::to_string(component) + " out of range");
}

// sum F(g)^2 - 2 sum F(g) H / n + sum H^2 / n^2
inline double expand_point_distance(double g_sq, double cross, double self, double n) {
  return clamp_nonnegative(g_sq - 2.0 * cross / n + self / (n * n));
}

// SR - sum H^2 / n
inline double expand_intra(double second, double self, double n) {
  return clamp_nonnegative(second - self / n);
}

// sum Hi^2 / ni^2 - 2 sum Hi Hj / (ni nj) + sum Hj^2 / nj^2, symmetric in (i, j).
inline double expand_inter(double self_a, double na, double self_b, double nb, double cross) {
  return clamp_nonnegative((self_a / (na * na) + self_b / (nb * nb)) - 2.0 * cross / (na * nb));
}

}  // namespace gssclu::detail
