#include <random>

#include "doctest.h"
#include "gssclu/cluster_stats.hpp"
#include "gssclu/errors.hpp"
#include "gssclu/exact_stats.hpp"
#include "oracle.hpp"

using namespace gssclu;

namespace {

StreamSchema schema_with(std::size_t d) {
  StreamSchema s;
  for (std::size_t l = 0; l < d; ++l) s.side_types.push_back({"t" + std::to_string(l), SideKind::numeric});
  return s;
}

GraphObject edges(std::vector<Edge> e, std::vector<AttributeMap> side = {}) {
  GraphObject g;
  g.edges = std::move(e);
  g.side = std::move(side);
  return g;
}

}  // namespace

TEST_CASE("singleton statistics") {
  const auto schema = schema_with(2);
  const auto cfg = ClusterStats::Config::configure(SketchConfig{}, 2);
  const auto g = canonicalize(edges({{"a", "b", 2.0}}), schema);
  const auto s = ClusterStats::singleton(PreparedGraph(g, schema), 7, cfg);
  CHECK(s.er() == 4.0);
  CHECK(s.count() == 1);
  CHECK(s.last_update() == 7);
  CHECK(s.sr(1) == 0.0);
  CHECK(s.sr(2) == 0.0);
  CHECK(s.edge_sketch().estimate(edge_key("a", "b")) == 2.0);
}

TEST_CASE("absorb accumulates first and second moments") {
  const auto schema = schema_with(0);
  const auto cfg = ClusterStats::Config::configure(SketchConfig{}, 0);
  ClusterStats s(cfg);
  s.absorb(PreparedGraph(canonicalize(edges({{"a", "b", 1.0}}), schema), schema), 1);
  s.absorb(PreparedGraph(canonicalize(edges({{"a", "b", 3.0}}), schema), schema), 2);
  CHECK(s.er() == 10.0);
  CHECK(s.edge_sketch().estimate(edge_key("a", "b")) == 4.0);
  CHECK(s.count() == 2);

  const auto before = s;
  s.absorb(PreparedGraph(GraphObject{}, schema), 3);
  CHECK(s.count() == 3);
  CHECK(s.er() == before.er());
  CHECK(s.edge_sketch() == before.edge_sketch());
}

TEST_CASE("hashed and unhashed absorption agree") {
  const auto schema = schema_with(1);
  const SketchConfig sc{5, 64, 21};
  const auto cfg = ClusterStats::Config::configure(sc, 1);
  const SketchHasher hasher(sc);
  std::mt19937_64 rng(4);
  ClusterStats a(cfg), b(cfg);
  for (int i = 0; i < 40; ++i) {
    const auto g = oracle::random_graph(rng, schema, 6, 5, 8);
    a.absorb(PreparedGraph(g, schema, &hasher), i + 1);
    b.absorb(PreparedGraph(g, schema), i + 1);
  }
  CHECK(a == b);
}

TEST_CASE("last update never decreases") {
  const auto schema = schema_with(0);
  ClusterStats s(ClusterStats::Config::configure(SketchConfig{}, 0));
  s.absorb(PreparedGraph(GraphObject{}, schema), 5);
  s.absorb(PreparedGraph(GraphObject{}, schema), 3);
  CHECK(s.last_update() == 5);
}

TEST_CASE("schema mismatch is rejected") {
  const auto cfg = ClusterStats::Config::configure(SketchConfig{}, 1);
  ClusterStats s(cfg);
  const auto wide = schema_with(2);
  CHECK_THROWS_AS(s.absorb(PreparedGraph(GraphObject{}, wide), 1), SchemaMismatch);
}

TEST_CASE("merge matches sequential absorption exactly") {
  const auto schema = schema_with(2);
  const auto cfg = ClusterStats::Config::configure(SketchConfig{3, 50, 8}, 2);
  std::mt19937_64 rng(12);
  const auto g1 = oracle::random_graph(rng, schema, 8, 6, 10);
  const auto g2 = oracle::random_graph(rng, schema, 8, 6, 10);

  ClusterStats seq(cfg);
  seq.absorb(PreparedGraph(g1, schema), 1);
  seq.absorb(PreparedGraph(g2, schema), 2);
  const auto merged = merge(ClusterStats::singleton(PreparedGraph(g1, schema), 1, cfg),
                            ClusterStats::singleton(PreparedGraph(g2, schema), 2, cfg));
  CHECK(merged == seq);
  CHECK(merged.last_update() == 2);

  const ClusterStats empty(cfg);
  CHECK(merge(seq, empty) == seq);

  ClusterStats other(ClusterStats::Config::configure(SketchConfig{3, 50, 9}, 2));
  CHECK_THROWS_AS(seq.merge(other), ConfigMismatch);
}

TEST_CASE("second moments are exact for any absorption sequence") {
  const auto schema = schema_with(2);
  const auto cfg = ClusterStats::Config::configure(SketchConfig{2, 8, 1}, 2);
  std::mt19937_64 rng(30);
  ClusterStats s(cfg);
  std::vector<double> expect(3, 0.0);
  for (int i = 0; i < 100; ++i) {
    const auto g = oracle::random_graph(rng, schema, 10, 6, 12);
    const auto parts = oracle::components(g, 2);
    for (std::size_t l = 0; l < 3; ++l)
      for (const auto& [k, v] : parts[l]) expect[l] += v * v;
    s.absorb(PreparedGraph(g, schema), i + 1);
  }
  for (std::size_t l = 0; l < 3; ++l) CHECK(s.second_moment(l) == expect[l]);
}

TEST_CASE("serialized size depends only on shape") {
  const auto schema = schema_with(2);
  const auto cfg = ClusterStats::Config::configure(SketchConfig{4, 40, 2}, 2);
  std::mt19937_64 rng(9);
  ClusterStats s(cfg);
  std::size_t size_at_10 = 0;
  for (int i = 1; i <= 10000; ++i) {
    s.absorb(PreparedGraph(oracle::random_graph(rng, schema, 20, 4, 30), schema), i);
    if (i == 10) size_at_10 = s.serialize().size();
  }
  CHECK(s.serialize().size() == size_at_10);
}

TEST_CASE("statistics round-trip through serialization") {
  const auto schema = schema_with(1);
  const auto cfg = ClusterStats::Config::configure(SketchConfig{3, 16, 5}, 1);
  std::mt19937_64 rng(2);
  ClusterStats s(cfg);
  for (int i = 0; i < 10; ++i) s.absorb(PreparedGraph(oracle::random_graph(rng, schema, 5, 4, 6), schema), i + 1);
  const auto back = ClusterStats::deserialize(s.serialize());
  CHECK(back == s);
  for (std::size_t l = 0; l < 2; ++l) CHECK(back.self_product(l) == s.self_product(l));
  CHECK_THROWS_AS(ClusterStats::deserialize(s.serialize() + "x"), FormatError);
}

TEST_CASE("exact statistics track totals, second moments and members") {
  const auto schema = schema_with(1);
  ExactClusterStats::Config cfg{1, true};
  ExactClusterStats s(cfg);
  s.absorb(PreparedGraph(canonicalize(edges({{"a", "b", 1.0}}, {{{"x", 2.0}}}), schema), schema), 1);
  s.absorb(PreparedGraph(canonicalize(edges({{"a", "b", 3.0}}), schema), schema), 2);
  CHECK(s.totals(0).at(edge_key("a", "b")) == 4.0);
  CHECK(s.second_moment(0) == 10.0);
  CHECK(s.second_moment(1) == 4.0);
  CHECK(s.members().size() == 2);
  CHECK(ExactClusterStats::deserialize(s.serialize()) == s);

  ExactClusterStats t(cfg);
  t.merge(s);
  CHECK(t == s);
}
