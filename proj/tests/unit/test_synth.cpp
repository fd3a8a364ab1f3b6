#include <array>
#include <map>
#include <set>
#include <sstream>

#include "doctest.h"
#include "gssclu/errors.hpp"
#include "gssclu/stream_io.hpp"
#include "gssclu/synth.hpp"

using namespace gssclu;

namespace {

// Chi-square statistic of how a type's attribute values split across the
// class labels, from a contingency table of (label, value-class) counts.
double label_association(const SynthStream& s, std::size_t type) {
  std::map<std::string, std::map<std::string, double>> table;
  std::map<std::string, double> rows, cols;
  double total = 0.0;
  for (const auto& g : s.graphs)
    for (const auto& [key, v] : g.side[type]) {
      // Values are "<type>=<word>"; group the word by its prefix up to 'w'.
      const auto word = key.substr(key.find('=') + 1);
      const auto bucket = word.substr(0, word.find('w'));
      table[*g.label][bucket] += v;
      rows[*g.label] += v;
      cols[bucket] += v;
      total += v;
    }
  double chi = 0.0;
  for (const auto& [r, rn] : rows)
    for (const auto& [c, cn] : cols) {
      const double expect = rn * cn / total;
      const double got = table[r][c];
      chi += (got - expect) * (got - expect) / expect;
    }
  return chi / total;  // Cramer-style normalization
}

}  // namespace

TEST_CASE("same seed gives the same stream, new seed a different one") {
  SynthConfig c;
  c.n_graphs = 300;
  const auto a = synth_generate(c), b = synth_generate(c);
  CHECK(a.graphs == b.graphs);
  c.seed = 2;
  CHECK(synth_generate(c).graphs != a.graphs);

  SynthConfig w;
  w.n_graphs = 50;
  std::ostringstream x, y;
  synth_write(w, x);
  synth_write(w, y);
  CHECK(x.str() == y.str());
}

TEST_CASE("graphs are independent of stream length") {
  SynthConfig c;
  c.n_graphs = 100;
  const auto short_stream = synth_generate(c);
  c.n_graphs = 400;
  const auto long_stream = synth_generate(c);
  for (std::size_t i = 0; i < 100; ++i) CHECK(short_stream.graphs[i] == long_stream.graphs[i]);
}

TEST_CASE("written files parse back to the generated stream") {
  SynthConfig c;
  c.n_graphs = 120;
  std::stringstream buf;
  synth_write(c, buf);
  const auto file = read_stream(buf, true);
  const auto gen = synth_generate(c);
  CHECK(file.schema == gen.schema);
  CHECK(file.graphs == gen.graphs);
  CHECK(file.diagnostics.empty());
}

TEST_CASE("schema lists informative types first") {
  SynthConfig c;
  c.informative_types = {{"topic", 0.9}, {"venue", 0.7}};
  c.noise_types = {{"noise", 30, 4}};
  const auto s = c.schema();
  REQUIRE(s.d() == 3);
  CHECK(s.side_types[0].name == "topic");
  CHECK(s.side_types[1].name == "venue");
  CHECK(s.side_types[2].name == "noise");
  for (const auto& t : s.side_types) CHECK(t.kind == SideKind::categorical);
}

TEST_CASE("labels are balanced within twenty percent") {
  SynthConfig c;
  c.n_graphs = 2000;
  c.n_clusters = 5;
  const auto s = synth_generate(c);
  std::map<std::string, int> counts;
  for (const auto& g : s.graphs) ++counts[*g.label];
  CHECK(counts.size() == 5);
  for (const auto& [label, n] : counts) {
    CHECK(n >= 0.8 * 400);
    CHECK(n <= 1.2 * 400);
  }
}

TEST_CASE("fidelity one keeps informative values inside the class vocabulary") {
  SynthConfig c;
  c.n_graphs = 300;
  c.informative_types = {{"topic", 1.0}};
  const auto s = synth_generate(c);
  for (const auto& g : s.graphs)
    for (const auto& [key, v] : g.side[0]) CHECK(key.rfind("topic=" + *g.label + "w", 0) == 0);
}

TEST_CASE("informative types track labels, noise types do not") {
  SynthConfig c;
  c.n_graphs = 1500;
  const auto s = synth_generate(c);
  // Noise words carry no class prefix; split them by word parity instead.
  std::map<std::string, std::array<double, 2>> noise;
  for (const auto& g : s.graphs)
    for (const auto& [key, v] : g.side[1]) {
      const int w = std::stoi(key.substr(key.find("=w") + 2));
      noise[*g.label][w % 2] += v;
    }
  CHECK(label_association(s, 0) > 0.5);
  for (const auto& [label, split] : noise) {
    const double share = split[0] / (split[0] + split[1]);
    CHECK(share == doctest::Approx(0.5).epsilon(0.1));
  }
}

TEST_CASE("without cross edges every edge stays in the class community") {
  SynthConfig c;
  c.n_graphs = 500;
  c.cross_edge_rate = 0.0;
  for (const auto& g : synth_generate(c).graphs)
    for (const auto& e : g.edges) {
      CHECK(e.src.rfind(*g.label + "n", 0) == 0);
      CHECK(e.dst.rfind(*g.label + "n", 0) == 0);
    }
}

TEST_CASE("invalid configs are rejected") {
  SynthConfig c;
  c.n_clusters = 0;
  CHECK_THROWS_AS(c.validate(), InvalidArgument);
  c = SynthConfig{};
  c.informative_types = {{"a", 1.5}};
  CHECK_THROWS_AS(c.validate(), InvalidArgument);
  c = SynthConfig{};
  c.noise_types = {{"topic", 10, 2}};
  CHECK_THROWS_AS(c.validate(), InvalidArgument);
  c = SynthConfig{};
  c.cross_edge_rate = -0.1;
  CHECK_THROWS_AS(c.validate(), InvalidArgument);
}
