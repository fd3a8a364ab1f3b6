#include "gssclu/distance.hpp"

#include "gssclu/detail/expansion.hpp"

namespace gssclu {

WeightVector::WeightVector(std::vector<double> weights) : w_(std::move(weights)) {
  if (w_.empty()) throw InvalidArgument("weight vector must have at least one component");
  for (double w : w_)
    if (!(w >= 0.0) || !std::isfinite(w))
      throw InvalidArgument("weights must be finite and nonnegative");
}

double DistanceVector::weighted_sq(const WeightVector& a) const {
  detail::check_weights(a, components.size());
  double sum = 0.0;
  for (std::size_t l = 0; l < components.size(); ++l) sum += a[l] * components[l] * components[l];
  return sum;
}

double component_distance_sq(const PreparedGraph& g, const ClusterStats& c,
                             std::size_t component) {
  detail::check_cluster(c.count(), component, c.components());
  if (g.components() != c.components())
    throw SchemaMismatch("graph and cluster statistics disagree on the number of side types");
  const CountMinSketch& sketch = c.sketch(component);
  const auto features = g.features(component);
  const bool hashed = g.hashed_for(sketch.config());
  double cross = 0.0;
  for (std::size_t i = 0; i < features.size(); ++i) {
    const double est = hashed ? sketch.estimate_at(g.cells(component, i))
                              : sketch.estimate(features[i].key);
    cross += features[i].value * est;
  }
  return detail::expand_point_distance(g.sum_sq(component), cross, c.self_product(component),
                                       static_cast<double>(c.count()));
}

double intra_distance_sq(const ClusterStats& c, std::size_t component) {
  detail::check_cluster(c.count(), component, c.components());
  return detail::expand_intra(c.second_moment(component), c.self_product(component),
                              static_cast<double>(c.count()));
}

double inter_distance_sq(const ClusterStats& a, const ClusterStats& b, std::size_t component) {
  detail::check_cluster(a.count(), component, a.components());
  detail::check_cluster(b.count(), component, b.components());
  const double cross = a.sketch(component).inner_product(b.sketch(component));
  return detail::expand_inter(a.self_product(component), static_cast<double>(a.count()),
                              b.self_product(component), static_cast<double>(b.count()), cross);
}

}  // namespace gssclu
