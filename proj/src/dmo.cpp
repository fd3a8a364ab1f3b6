#include "gssclu/dmo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace gssclu {
namespace {

// Line search gives up after this many halvings of the step.
constexpr int kMaxHalvings = 60;

double min_separation(std::span<const double> w, const DmoSnapshot& s) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& p : s.pairs)
    if (!p.degenerate()) best = std::min(best, std::sqrt(DmoSnapshot::separation_sq(p, w)));
  return best;
}

}  // namespace

void DmoConfig::validate() const {
  if (!(t > 0.0)) throw InvalidArgument("barrier parameter t must be positive");
  if (!(step_size > 0.0)) throw InvalidArgument("step size must be positive");
  if (!(feasibility_margin > 0.0 && feasibility_margin < 1.0))
    throw InvalidArgument("feasibility margin must be in (0, 1)");
  if (!(weight_floor >= 0.0)) throw InvalidArgument("weight floor must be nonnegative");
}

bool DmoSnapshot::Pair::degenerate() const {
  return std::all_of(inter_sq.begin(), inter_sq.end(), [](double b) { return b == 0.0; });
}

double DmoSnapshot::separation_sq(const Pair& p, std::span<const double> w) {
  double q = 0.0;
  for (std::size_t l = 0; l < w.size(); ++l) q += w[l] * p.inter_sq[l];
  return q;
}

std::optional<double> dmo_objective(std::span<const double> w, const DmoSnapshot& s,
                                    const DmoConfig& cfg) {
  if (w.size() != s.components())
    throw InvalidArgument("weight vector does not match snapshot dimension");
  double intra = 0.0;
  for (std::size_t l = 0; l < w.size(); ++l) intra += w[l] * s.intra[l];
  double barrier = 0.0;
  for (const auto& p : s.pairs) {
    if (p.degenerate()) continue;
    const double gap = std::sqrt(DmoSnapshot::separation_sq(p, w)) - 1.0;
    if (!(gap > 0.0)) return std::nullopt;
    barrier -= 2.0 * std::log(gap);
  }
  return cfg.t * intra + barrier;
}

std::vector<double> dmo_gradient(std::span<const double> w, const DmoSnapshot& s,
                                 const DmoConfig& cfg) {
  if (w.size() != s.components())
    throw InvalidArgument("weight vector does not match snapshot dimension");
  std::vector<double> grad(w.size());
  for (std::size_t l = 0; l < w.size(); ++l) grad[l] = cfg.t * s.intra[l];
  for (const auto& p : s.pairs) {
    if (p.degenerate()) continue;
    const double root = std::sqrt(DmoSnapshot::separation_sq(p, w));
    if (!(root > 1.0)) throw InvalidArgument("gradient requested at an infeasible point");
    // d/dw_l of -2 log(sqrt(Q) - 1) = -B_l / (sqrt(Q) (sqrt(Q) - 1))
    const double scale = 1.0 / (root * (root - 1.0));
    for (std::size_t l = 0; l < w.size(); ++l) grad[l] -= p.inter_sq[l] * scale;
  }
  return grad;
}

RefineResult dmo_refine(const WeightVector& a, const DmoSnapshot& s, const DmoConfig& cfg) {
  cfg.validate();
  if (a.size() != s.components())
    throw InvalidArgument("weight vector does not match snapshot dimension");
  RefineResult result{a, {}, false, false, 0};
  const bool any_active =
      std::any_of(s.pairs.begin(), s.pairs.end(), [](const auto& p) { return !p.degenerate(); });
  if (!any_active) {
    result.skipped = true;
    return result;
  }

  std::vector<double> w(a.values().begin(), a.values().end());
  for (double& x : w) x = std::max(x, cfg.weight_floor);

  // Q is linear in a uniform scale of w, so scaling by (target / sqrt(Q_min))^2
  // puts the tightest pair exactly at the target separation.
  double tightest = min_separation(w, s);
  if (tightest == 0.0) {
    // Some separable pair gets no weight at all; restart from the identity.
    std::fill(w.begin(), w.end(), std::max(1.0, cfg.weight_floor));
    tightest = min_separation(w, s);
  }
  const double target = 1.0 + cfg.feasibility_margin;
  if (tightest <= target) {
    const double scale = (target / tightest) * (target / tightest);
    for (double& x : w) x *= scale;
  }
  result.rescaled = !std::equal(w.begin(), w.end(), a.values().begin());

  double current = *dmo_objective(w, s, cfg);
  result.objective_trace.push_back(current);

  std::vector<double> candidate(w.size());
  for (std::size_t step = 0; step < cfg.max_steps; ++step) {
    const std::vector<double> grad = dmo_gradient(w, s, cfg);
    double eta = cfg.step_size;
    bool accepted = false;
    for (int h = 0; h <= kMaxHalvings; ++h, eta *= 0.5) {
      bool moved = false;
      for (std::size_t l = 0; l < w.size(); ++l) {
        candidate[l] = std::max(cfg.weight_floor, w[l] - eta * grad[l]);
        moved = moved || candidate[l] != w[l];
      }
      if (!moved) break;
      const auto value = dmo_objective(candidate, s, cfg);
      if (value && *value < current) {
        w.swap(candidate);
        current = *value;
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
    ++result.accepted_steps;
    result.objective_trace.push_back(current);
  }

  result.weights = WeightVector(std::move(w));
  return result;
}

}  // namespace gssclu
