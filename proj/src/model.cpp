#include "gssclu/model.hpp"

#include <cmath>
#include <set>

#include "gssclu/errors.hpp"
#include "gssclu/sketch.hpp"

namespace gssclu {
namespace {

bool has_separator(std::string_view s) { return s.find(kKeySeparator) != std::string_view::npos; }

void check_label(std::string_view label, const char* what) {
  if (label.empty()) throw InvalidArgument(std::string(what) + " must be non-empty");
  if (has_separator(label))
    throw InvalidArgument(std::string(what) + " contains the reserved separator byte");
}

void check_value(double v, const char* what) {
  if (!(v >= 0.0) || !std::isfinite(v))
    throw InvalidArgument(std::string(what) + " must be a finite nonnegative number");
}

void fit_side(GraphObject& g, std::size_t d) {
  if (g.side.size() > d)
    throw SchemaMismatch("graph '" + g.id + "' has " + std::to_string(g.side.size()) +
                         " side types, schema declares " + std::to_string(d));
  g.side.resize(d);
}

}  // namespace

std::string_view to_string(SideKind kind) {
  switch (kind) {
    case SideKind::numeric: return "numeric";
    case SideKind::categorical: return "categorical";
    case SideKind::binary: return "binary";
  }
  return "numeric";
}

SideKind side_kind_from_string(std::string_view name) {
  if (name == "numeric") return SideKind::numeric;
  if (name == "categorical") return SideKind::categorical;
  if (name == "binary") return SideKind::binary;
  throw InvalidArgument("unknown side type kind '" + std::string(name) + "'");
}

std::optional<std::size_t> StreamSchema::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < side_types.size(); ++i)
    if (side_types[i].name == name) return i;
  return std::nullopt;
}

void StreamSchema::validate() const {
  std::set<std::string_view> seen;
  for (const auto& t : side_types) {
    if (t.name.empty()) throw InvalidArgument("side type name must be non-empty");
    if (!seen.insert(t.name).second)
      throw InvalidArgument("duplicate side type name '" + t.name + "'");
  }
}

std::string edge_key(std::string_view src, std::string_view dst) {
  if (has_separator(src) || has_separator(dst))
    throw InvalidArgument("node label contains the reserved separator byte");
  std::string key;
  key.reserve(src.size() + dst.size() + 1);
  key.append(src);
  key.push_back(kKeySeparator);
  key.append(dst);
  return key;
}

GraphObject canonicalize(GraphObject g, const StreamSchema& schema) {
  fit_side(g, schema.d());

  std::map<std::pair<std::string, std::string>, double> merged;
  for (auto& e : g.edges) {
    check_label(e.src, "node label");
    check_label(e.dst, "node label");
    const double f = e.freq.value_or(1.0);
    check_value(f, "edge frequency");
    if (!schema.directed && e.dst < e.src) std::swap(e.src, e.dst);
    merged[{std::move(e.src), std::move(e.dst)}] += f;
  }
  g.edges.clear();
  for (auto& [pair, f] : merged)
    if (f > 0.0) g.edges.push_back({pair.first, pair.second, f});

  for (auto& attrs : g.side) {
    for (auto it = attrs.begin(); it != attrs.end();) {
      check_label(it->first, "attribute identifier");
      check_value(it->second, "attribute value");
      it = it->second == 0.0 ? attrs.erase(it) : std::next(it);
    }
  }
  return g;
}

GraphObject expand_categorical(GraphObject g, const StreamSchema& schema) {
  fit_side(g, schema.d());
  for (std::size_t l = 0; l < g.categories.size() && l < schema.d(); ++l) {
    if (g.categories[l].empty()) continue;
    const std::string& type = schema.side_types[l].name;
    for (const auto& v : g.categories[l]) g.side[l][type + "=" + v] += 1.0;
  }
  if (g.categories.size() > schema.d())
    throw SchemaMismatch("graph '" + g.id + "' has categorical values for undeclared types");
  g.categories.clear();
  return g;
}

GraphObject aggregate_local_attrs(GraphObject g) {
  for (const auto& a : g.local_side) {
    check_value(a.value, "attribute value");
    if (a.type >= g.side.size()) g.side.resize(a.type + 1);
    g.side[a.type][a.attr] += a.value;
  }
  g.local_side.clear();
  return g;
}

GraphObject preprocess(GraphObject g, const StreamSchema& schema) {
  return canonicalize(expand_categorical(aggregate_local_attrs(std::move(g)), schema), schema);
}

PreparedGraph::PreparedGraph(const GraphObject& g, const StreamSchema& schema,
                             const SketchHasher* hasher) {
  const std::size_t d = schema.d();
  if (g.side.size() > d)
    throw SchemaMismatch("graph '" + g.id + "' has more side types than the schema");
  features_.resize(d + 1);
  sum_sq_.assign(d + 1, 0.0);

  features_[0].reserve(g.edges.size());
  for (const auto& e : g.edges) {
    const double f = e.freq.value_or(1.0);
    features_[0].push_back({edge_key(e.src, e.dst), f});
    sum_sq_[0] += f * f;
  }
  for (std::size_t l = 0; l < g.side.size(); ++l) {
    auto& out = features_[l + 1];
    out.reserve(g.side[l].size());
    for (const auto& [attr, v] : g.side[l]) {
      out.push_back({attr, v});
      sum_sq_[l + 1] += v * v;
    }
  }

  if (hasher) {
    rows_ = hasher->rows();
    hashed_with_ = hasher->config();
    cells_.resize(d + 1);
    for (std::size_t l = 0; l <= d; ++l) {
      cells_[l].resize(features_[l].size() * rows_);
      for (std::size_t i = 0; i < features_[l].size(); ++i)
        hasher->locate(features_[l][i].key,
                       std::span<std::uint32_t>(cells_[l]).subspan(i * rows_, rows_));
    }
  }
}

}  // namespace gssclu
