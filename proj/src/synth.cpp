#include "gssclu/synth.hpp"

#include <ostream>
#include <random>

#include "gssclu/errors.hpp"
#include "gssclu/stream_io.hpp"

namespace gssclu {
namespace {

// mt19937_64 output is fixed by the standard but the std distributions are
// not, so draws are reduced by hand to keep files identical across toolchains.
class Draw {
 public:
  explicit Draw(std::uint64_t seed) : gen_(seed) {}

  std::size_t below(std::size_t n) {
    return static_cast<std::size_t>((static_cast<unsigned __int128>(gen_()) * n) >> 64);
  }
  double unit() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

 private:
  std::mt19937_64 gen_;
};

std::uint64_t graph_seed(std::uint64_t seed, std::size_t index) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (static_cast<std::uint64_t>(index) + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::string node(std::size_t community, std::size_t i) {
  return "c" + std::to_string(community) + "n" + std::to_string(i);
}

std::size_t other_class(Draw& rng, std::size_t own, std::size_t classes) {
  const std::size_t k = rng.below(classes - 1);
  return k >= own ? k + 1 : k;
}

}  // namespace

void SynthConfig::validate() const {
  if (n_clusters < 1) throw InvalidArgument("n_clusters must be positive");
  if (n_graphs < 1) throw InvalidArgument("n_graphs must be positive");
  if (nodes_per_community < 1) throw InvalidArgument("nodes_per_community must be positive");
  if (edges_per_graph < 1) throw InvalidArgument("edges_per_graph must be positive");
  if (vocab_per_class < 1) throw InvalidArgument("vocab_per_class must be positive");
  if (!(cross_edge_rate >= 0.0 && cross_edge_rate <= 1.0))
    throw InvalidArgument("cross_edge_rate must lie in [0, 1]");
  for (const auto& t : informative_types)
    if (!(t.fidelity >= 0.0 && t.fidelity <= 1.0))
      throw InvalidArgument("fidelity of '" + t.name + "' must lie in [0, 1]");
  for (const auto& t : noise_types)
    if (t.vocabulary < 1) throw InvalidArgument("vocabulary of '" + t.name + "' must be positive");
  schema().validate();
}

StreamSchema SynthConfig::schema() const {
  StreamSchema s;
  for (const auto& t : informative_types) s.side_types.push_back({t.name, SideKind::categorical});
  for (const auto& t : noise_types) s.side_types.push_back({t.name, SideKind::categorical});
  return s;
}

GraphObject synth_graph(const SynthConfig& cfg, std::size_t index) {
  Draw rng(graph_seed(cfg.seed, index));
  const std::size_t cls = rng.below(cfg.n_clusters);
  const std::size_t nodes = cfg.nodes_per_community;

  GraphObject g;
  g.id = "g" + std::to_string(index + 1);
  g.timestamp = index + 1;
  g.label = "c" + std::to_string(cls);

  for (std::size_t e = 0; e < cfg.edges_per_graph; ++e) {
    const std::size_t a = rng.below(nodes);
    if (cfg.n_clusters > 1 && rng.unit() < cfg.cross_edge_rate) {
      g.edges.push_back({node(cls, a), node(other_class(rng, cls, cfg.n_clusters), rng.below(nodes)),
                         std::nullopt});
      continue;
    }
    std::size_t b = a;
    if (nodes > 1) {
      b = rng.below(nodes - 1);
      if (b >= a) ++b;
    }
    g.edges.push_back({node(cls, a), node(cls, b), std::nullopt});
  }

  const std::size_t d = cfg.informative_types.size() + cfg.noise_types.size();
  g.categories.resize(d);
  std::size_t l = 0;
  for (const auto& t : cfg.informative_types) {
    auto& values = g.categories[l++];
    for (std::size_t i = 0; i < t.draws; ++i) {
      std::size_t owner = cls;
      if (cfg.n_clusters > 1 && rng.unit() >= t.fidelity)
        owner = other_class(rng, cls, cfg.n_clusters);
      values.push_back("c" + std::to_string(owner) + "w" + std::to_string(rng.below(cfg.vocab_per_class)));
    }
  }
  for (const auto& t : cfg.noise_types) {
    auto& values = g.categories[l++];
    for (std::size_t i = 0; i < t.draws; ++i)
      values.push_back("w" + std::to_string(rng.below(t.vocabulary)));
  }
  return g;
}

SynthStream synth_generate(const SynthConfig& cfg) {
  cfg.validate();
  SynthStream out{cfg.schema(), {}};
  out.graphs.reserve(cfg.n_graphs);
  for (std::size_t i = 0; i < cfg.n_graphs; ++i)
    out.graphs.push_back(preprocess(synth_graph(cfg, i), out.schema));
  return out;
}

void synth_write(const SynthConfig& cfg, std::ostream& out) {
  cfg.validate();
  const StreamSchema schema = cfg.schema();
  out << schema_to_json_line(schema) << '\n';
  for (std::size_t i = 0; i < cfg.n_graphs; ++i)
    out << graph_to_json_line(preprocess(synth_graph(cfg, i), schema), schema) << '\n';
}

}  // namespace gssclu
