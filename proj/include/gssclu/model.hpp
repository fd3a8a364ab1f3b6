#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gssclu/sketch.hpp"

namespace gssclu {

using Timestamp = std::uint64_t;

enum class SideKind { numeric, categorical, binary };

std::string_view to_string(SideKind kind);
// Throws InvalidArgument on an unknown name.
SideKind side_kind_from_string(std::string_view name);

struct SideType {
  std::string name;
  SideKind kind = SideKind::numeric;

  friend bool operator==(const SideType&, const SideType&) = default;
};

struct StreamSchema {
  std::vector<SideType> side_types;
  bool directed = false;

  std::size_t d() const { return side_types.size(); }
  // Index of the named type, if declared.
  std::optional<std::size_t> index_of(std::string_view name) const;
  // Throws InvalidArgument on duplicate or empty type names.
  void validate() const;

  friend bool operator==(const StreamSchema&, const StreamSchema&) = default;
};

// Reserved byte joining node labels into edge keys. Labels and attribute
// identifiers must not contain it.
inline constexpr char kKeySeparator = '\x1F';

using AttributeMap = std::map<std::string, double, std::less<>>;

struct Edge {
  std::string src;
  std::string dst;
  std::optional<double> freq;  // absent means 1

  friend bool operator==(const Edge&, const Edge&) = default;
};

// A side attribute attached to one node or edge rather than the whole graph.
struct LocalAttribute {
  std::string scope;  // node label, or "src->dst" for edges; informational only
  std::size_t type = 0;
  std::string attr;
  double value = 0.0;

  friend bool operator==(const LocalAttribute&, const LocalAttribute&) = default;
};

struct GraphObject {
  std::string id;
  Timestamp timestamp = 0;
  std::vector<Edge> edges;
  // Graph-level attribute values per side type; size d after preprocessing.
  std::vector<AttributeMap> side;
  // Raw categorical values per side type, consumed by expand_categorical().
  std::vector<std::vector<std::string>> categories;
  // Node/edge scoped values, consumed by aggregate_local_attrs().
  std::vector<LocalAttribute> local_side;
  // Class tag for evaluation; never read by clustering.
  std::optional<std::string> label;

  std::size_t edge_count() const { return edges.size(); }

  friend bool operator==(const GraphObject&, const GraphObject&) = default;
};

// src, 0x1F, dst. Throws InvalidArgument if a label contains the separator.
std::string edge_key(std::string_view src, std::string_view dst);

// Orders undirected endpoints, fills default frequency 1, sums parallel edges,
// drops zero frequencies and zero attribute values. Edges come out sorted.
GraphObject canonicalize(GraphObject g, const StreamSchema& schema);

// Each categorical value v of type T becomes attribute "T=v" with value 1.
GraphObject expand_categorical(GraphObject g, const StreamSchema& schema);

// Sums node/edge scoped values into graph-level values per (type, attribute).
GraphObject aggregate_local_attrs(GraphObject g);

// aggregate_local_attrs, expand_categorical, canonicalize in that order.
GraphObject preprocess(GraphObject g, const StreamSchema& schema);

// Sparse per-component view of a canonical graph: component 0 holds edge
// frequencies keyed by edge_key(), component l holds side type l's values.
struct Feature {
  std::string key;
  double value = 0.0;
};

class PreparedGraph {
 public:
  // When hasher is given, the sketch cell of every feature in every row is
  // computed once here and shared by all clusters.
  PreparedGraph(const GraphObject& g, const StreamSchema& schema,
                const SketchHasher* hasher = nullptr);

  std::size_t components() const { return features_.size(); }
  std::span<const Feature> features(std::size_t component) const { return features_[component]; }
  // Sum of squared values of one component.
  double sum_sq(std::size_t component) const { return sum_sq_[component]; }
  std::size_t edge_count() const { return features_[0].size(); }

  // True when cells() were computed with a hasher of exactly this config.
  bool hashed_for(const SketchConfig& config) const { return hashed_with_ == config; }
  std::span<const std::uint32_t> cells(std::size_t component, std::size_t feature) const {
    return std::span<const std::uint32_t>(cells_[component]).subspan(feature * rows_, rows_);
  }

 private:
  std::vector<std::vector<Feature>> features_;
  std::vector<double> sum_sq_;
  std::vector<std::vector<std::uint32_t>> cells_;
  std::uint32_t rows_ = 0;
  std::optional<SketchConfig> hashed_with_;
};

}  // namespace gssclu
