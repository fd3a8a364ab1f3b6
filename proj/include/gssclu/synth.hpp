#pragma once

// Labeled synthetic graph streams with planted structure. Each graph draws a
// hidden class; its edges come mostly from that class's node community and
// its side attributes from per-type vocabularies, some of which track the
// class (informative) and some of which do not (noise).

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "gssclu/model.hpp"

namespace gssclu {

struct InformativeType {
  std::string name;
  double fidelity = 0.9;  // probability a draw comes from the graph's own class vocabulary
  std::size_t draws = 4;  // attribute draws per graph
};

struct NoiseType {
  std::string name;
  std::size_t vocabulary = 50;
  std::size_t draws = 4;
};

struct SynthConfig {
  std::size_t n_clusters = 4;
  std::size_t n_graphs = 2000;
  std::size_t nodes_per_community = 40;
  std::size_t edges_per_graph = 8;
  std::vector<InformativeType> informative_types{{"topic", 0.9}};
  std::vector<NoiseType> noise_types{{"noise", 20, 32}};
  double cross_edge_rate = 0.1;
  std::size_t vocab_per_class = 8;
  std::uint64_t seed = 1;

  // Throws InvalidArgument on out-of-range fields or duplicate type names.
  void validate() const;

  // Informative types first, then noise types, all categorical.
  StreamSchema schema() const;
};

// Graph `index` depends only on (cfg, index), so generation can be split
// across workers.
GraphObject synth_graph(const SynthConfig& cfg, std::size_t index);

struct SynthStream {
  StreamSchema schema;
  std::vector<GraphObject> graphs;  // preprocessed, labeled "c<class>"
};

SynthStream synth_generate(const SynthConfig& cfg);

// Writes the stream file (schema header plus one record per graph) without
// materializing the whole stream.
void synth_write(const SynthConfig& cfg, std::ostream& out);

}  // namespace gssclu
