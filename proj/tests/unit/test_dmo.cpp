#include <cmath>
#include <random>

#include "doctest.h"
#include "gssclu/dmo.hpp"
#include "gssclu/errors.hpp"
#include "gssclu/exact_stats.hpp"
#include "oracle.hpp"

using namespace gssclu;

namespace {

DmoSnapshot one_pair(std::vector<double> intra, std::vector<double> b) {
  DmoSnapshot s;
  s.intra = std::move(intra);
  s.pairs.push_back({0, 1, std::move(b)});
  return s;
}

// Coarse-to-fine grid search of the literal objective over a box; each round
// shrinks the box around the best grid point.
std::vector<double> grid_minimum(const DmoSnapshot& s, double t, std::vector<double> lo,
                                 std::vector<double> hi, int rounds) {
  const std::size_t m = lo.size();
  const int n = 40;
  std::vector<double> best(m);
  double best_value = INFINITY;
  for (int round = 0; round < rounds; ++round) {
    std::vector<int> idx(m, 0);
    while (true) {
      std::vector<double> w(m);
      for (std::size_t l = 0; l < m; ++l) w[l] = lo[l] + (hi[l] - lo[l]) * idx[l] / n;
      const auto v = oracle::objective(w, s, t);
      if (v && *v < best_value) {
        best_value = *v;
        best = w;
      }
      std::size_t l = 0;
      while (l < m && ++idx[l] > n) idx[l++] = 0;
      if (l == m) break;
    }
    for (std::size_t l = 0; l < m; ++l) {
      const double span = (hi[l] - lo[l]) / n * 2;
      lo[l] = std::max(0.0, best[l] - span);
      hi[l] = best[l] + span;
    }
  }
  return best;
}

}  // namespace

TEST_CASE("objective worked examples") {
  const DmoConfig cfg;
  const auto s = one_pair({0.0, 0.0}, {2.0, 2.0});
  CHECK(*dmo_objective(std::vector<double>{1.0, 1.0}, s, cfg) == 0.0);
  CHECK_FALSE(dmo_objective(std::vector<double>{0.25, 0.25}, s, cfg));
  CHECK_FALSE(dmo_objective(std::vector<double>{0.1, 0.1}, s, cfg));

  const auto with_intra = one_pair({3.0, 5.0}, {2.0, 6.0});
  const std::vector<double> w{0.5, 1.5};
  DmoConfig doubled;
  doubled.t = 2.0;
  const double barrier = *oracle::objective(w, with_intra, 1.0) - (0.5 * 3.0 + 1.5 * 5.0);
  CHECK(*dmo_objective(w, with_intra, doubled) == doctest::Approx(2.0 * 9.0 + barrier).epsilon(1e-14));
}

TEST_CASE("objective matches the ordered-pair oracle") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    const auto s = oracle::random_snapshot(rng, 1 + rng() % 4, 2 + rng() % 5);
    const auto w = oracle::random_feasible(rng, s);
    DmoConfig cfg;
    cfg.t = 0.1 + static_cast<double>(rng() % 20) / 4.0;
    CHECK(*dmo_objective(w, s, cfg) == doctest::Approx(*oracle::objective(w, s, cfg.t)).epsilon(1e-12));
  }
}

TEST_CASE("degenerate pairs are left out of the barrier") {
  DmoSnapshot s;
  s.intra = {1.0, 1.0};
  s.pairs = {{0, 1, {4.0, 0.0}}, {0, 2, {0.0, 0.0}}};
  CHECK(s.pairs[1].degenerate());
  CHECK_FALSE(s.pairs[0].degenerate());
  const std::vector<double> w{1.0, 1.0};
  CHECK(*dmo_objective(w, s, DmoConfig{}) == doctest::Approx(2.0));
}

TEST_CASE("gradient matches central differences") {
  std::mt19937_64 rng(17);
  int checked = 0;
  for (int trial = 0; trial < 150; ++trial) {
    const auto s = oracle::random_snapshot(rng, 1 + rng() % 5, 2 + rng() % 5);
    const auto w = oracle::random_feasible(rng, s);
    DmoConfig cfg;
    cfg.t = 0.5 + static_cast<double>(rng() % 8);
    const auto analytic = dmo_gradient(w, s, cfg);
    const auto numeric = oracle::finite_gradient(
        [&](const std::vector<double>& x) { return *oracle::objective(x, s, cfg.t); }, w);
    double scale = 0.0;
    for (double g : numeric) scale = std::max(scale, std::abs(g));
    for (std::size_t l = 0; l < w.size(); ++l)
      CHECK(std::abs(analytic[l] - numeric[l]) <= 1e-5 * std::max(1.0, scale));
    ++checked;
  }
  CHECK(checked >= 100);
}

TEST_CASE("gradient edge cases") {
  const DmoConfig cfg;
  const auto sym = one_pair({0.0, 0.0}, {3.0, 3.0});
  const auto g = dmo_gradient(std::vector<double>{2.0, 2.0}, sym, cfg);
  CHECK(g[0] == g[1]);
  CHECK(g[0] < 0.0);

  const auto far = one_pair({2.0, 7.0}, {1.0, 1.0});
  const auto asymptotic = dmo_gradient(std::vector<double>{1e12, 1e12}, far, cfg);
  CHECK(asymptotic[0] == doctest::Approx(2.0).epsilon(1e-5));
  CHECK(asymptotic[1] == doctest::Approx(7.0).epsilon(1e-5));

  CHECK_THROWS_AS(dmo_gradient(std::vector<double>{0.1, 0.1}, far, cfg), InvalidArgument);
}

TEST_CASE("objective is convex along random chords") {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 300; ++trial) {
    const auto s = oracle::random_snapshot(rng, 1 + rng() % 4, 2 + rng() % 4);
    const auto a = oracle::random_feasible(rng, s);
    const auto b = oracle::random_feasible(rng, s);
    std::vector<double> mid(a.size());
    for (std::size_t l = 0; l < a.size(); ++l) mid[l] = 0.5 * (a[l] + b[l]);
    const DmoConfig cfg;
    const double fa = *dmo_objective(a, s, cfg), fb = *dmo_objective(b, s, cfg);
    CHECK(*dmo_objective(mid, s, cfg) <= 0.5 * (fa + fb) + 1e-9);
  }
}

TEST_CASE("refine descends, stays feasible and respects the floor") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 200; ++trial) {
    const auto s = oracle::random_snapshot(rng, 1 + rng() % 4, 2 + rng() % 5);
    std::vector<double> start(s.components());
    for (double& x : start) x = static_cast<double>(rng() % 100) / 50.0;
    DmoConfig cfg;
    cfg.weight_floor = (trial % 3 == 0) ? 0.05 : 0.0;
    cfg.max_steps = 1 + rng() % 40;
    const auto r = dmo_refine(WeightVector(start), s, cfg);
    REQUIRE_FALSE(r.skipped);
    for (std::size_t i = 1; i < r.objective_trace.size(); ++i)
      CHECK(r.objective_trace[i] <= r.objective_trace[i - 1]);
    CHECK(r.objective_trace.size() == r.accepted_steps + 1);
    for (std::size_t l = 0; l < r.weights.size(); ++l) CHECK(r.weights[l] >= cfg.weight_floor);
    for (const auto& p : s.pairs)
      CHECK(std::sqrt(DmoSnapshot::separation_sq(p, r.weights.values())) >= 1.0);
    CHECK(*oracle::objective({r.weights.values().begin(), r.weights.values().end()}, s, cfg.t) ==
          doctest::Approx(r.objective_trace.back()).epsilon(1e-12));
  }
}

TEST_CASE("zero steps only repairs feasibility") {
  const auto s = one_pair({1.0, 1.0}, {0.5, 0.5});
  DmoConfig cfg;
  cfg.max_steps = 0;
  const auto r = dmo_refine(WeightVector::identity(2), s, cfg);
  CHECK(r.rescaled);
  CHECK(r.accepted_steps == 0);
  CHECK(r.weights[0] == r.weights[1]);
  CHECK(std::sqrt(DmoSnapshot::separation_sq(s.pairs[0], r.weights.values())) ==
        doctest::Approx(1.05).epsilon(1e-12));

  // Already feasible with room to spare: untouched.
  const auto loose = one_pair({1.0, 1.0}, {8.0, 8.0});
  const auto same = dmo_refine(WeightVector::identity(2), loose, cfg);
  CHECK_FALSE(same.rescaled);
  CHECK(same.weights == WeightVector::identity(2));
}

TEST_CASE("zero weights on every separating component restart from the identity") {
  const auto s = one_pair({1.0, 1.0}, {0.0, 3.0});
  DmoConfig cfg;
  cfg.max_steps = 0;
  const auto r = dmo_refine(WeightVector({1.0, 0.0}), s, cfg);
  CHECK(std::sqrt(DmoSnapshot::separation_sq(s.pairs[0], r.weights.values())) >= 1.0);
  CHECK(r.weights[1] > 0.0);
}

TEST_CASE("refine skips when nothing can be separated") {
  DmoSnapshot s;
  s.intra = {1.0};
  s.pairs = {{0, 1, {0.0}}};
  const auto r = dmo_refine(WeightVector({0.7}), s, DmoConfig{});
  CHECK(r.skipped);
  CHECK(r.weights == WeightVector({0.7}));

  const std::vector<ExactClusterStats> one{ExactClusterStats(ExactClusterStats::Config{0, false})};
  CHECK(dmo_refine(WeightVector({0.7}), std::span<const ExactClusterStats>(one), DmoConfig{}).skipped);
}

TEST_CASE("a coherent side type gains weight over a noisy one") {
  // Component 1 has no intra spread, component 2 a large one; both separate
  // the pair comparably.
  DmoSnapshot s;
  s.intra = {5.0, 0.0, 60.0};
  s.pairs = {{0, 1, {1.0, 2.0, 2.5}}, {0, 2, {1.5, 2.2, 1.8}}, {1, 2, {0.8, 1.9, 2.1}}};
  // Compared as noisy over coherent: the optimum may drive the noisy weight to 0.
  const auto opt = grid_minimum(s, 1.0, {0, 0, 0}, {6, 6, 6}, 1);
  REQUIRE(opt[1] > 0.0);
  const double before = 1.0;
  CHECK(opt[2] / opt[1] < before);

  DmoConfig cfg;
  cfg.max_steps = 200;
  const auto r = dmo_refine(WeightVector::identity(3), s, cfg);
  REQUIRE(r.weights[1] > 0.0);
  CHECK(r.weights[2] / r.weights[1] < before);
  CHECK(r.weights[2] / r.weights[1] < 0.5 * (before + opt[2] / opt[1]));
}

TEST_CASE("the grid optimum is stationary") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 5; ++trial) {
    // Strictly positive intra so the minimum is interior and bounded.
    auto s = oracle::random_snapshot(rng, 2, 3);
    for (double& x : s.intra) x = 0.5 + x / 10.0;
    const auto opt = grid_minimum(s, 1.0, {0, 0}, {40, 40}, 12);
    DmoConfig cfg;
    cfg.max_steps = 50;
    const auto r = dmo_refine(WeightVector(opt), s, cfg);
    REQUIRE_FALSE(r.rescaled);
    const double start = *oracle::objective(opt, s, 1.0);
    CHECK(start - r.objective_trace.back() < 1e-6);
  }
}

TEST_CASE("config validation") {
  DmoConfig c;
  CHECK_NOTHROW(c.validate());
  c.t = 0.0;
  CHECK_THROWS_AS(c.validate(), InvalidArgument);
  c = DmoConfig{};
  c.feasibility_margin = 1.0;
  CHECK_THROWS_AS(c.validate(), InvalidArgument);
  c = DmoConfig{};
  c.step_size = -1.0;
  CHECK_THROWS_AS(c.validate(), InvalidArgument);
  c = DmoConfig{};
  c.weight_floor = -0.1;
  CHECK_THROWS_AS(c.validate(), InvalidArgument);
}

TEST_CASE("snapshot entries equal distance calls") {
  StreamSchema schema;
  schema.side_types = {{"kw", SideKind::numeric}};
  std::mt19937_64 rng(8);
  std::vector<ExactClusterStats> cs;
  for (int c = 0; c < 3; ++c) {
    ExactClusterStats st(ExactClusterStats::Config{1, true});
    for (int i = 0; i < 3; ++i) st.absorb(PreparedGraph(oracle::random_graph(rng, schema, 6, 5, 8), schema), i + 1);
    cs.push_back(st);
  }
  const auto s = dmo_snapshot(std::span<const ExactClusterStats>(cs));
  REQUIRE(s.pairs.size() == 3);
  for (std::size_t l = 0; l < 2; ++l) {
    double intra = 0.0;
    for (const auto& c : cs) intra += member_intra_distance_sq(c, l);
    CHECK(s.intra[l] == doctest::Approx(intra).epsilon(1e-9));
    for (const auto& p : s.pairs)
      CHECK(p.inter_sq[l] == doctest::Approx(direct_inter_distance_sq(cs[p.i], cs[p.j], l)).epsilon(1e-9));
  }

  std::vector<ExactClusterStats> twins{cs[0], cs[0]};
  const auto dup = dmo_snapshot(std::span<const ExactClusterStats>(twins));
  CHECK(dup.pairs[0].degenerate());
}
