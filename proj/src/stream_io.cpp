#include "gssclu/stream_io.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>

#include "json.hpp"

namespace gssclu {
namespace {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

json parse_object(const std::string& line, std::size_t line_no) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::parse_error& e) {
    throw ParseError(line_no, std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ParseError(line_no, "record is not a JSON object");
  return j;
}

std::string scalar_text(const json& v, std::size_t line_no, const char* what) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  if (v.is_number_unsigned()) return std::to_string(v.get<unsigned long long>());
  throw ParseError(line_no, std::string(what) + " must be a string or integer");
}

double number(const json& v, std::size_t line_no, const char* what) {
  if (!v.is_number()) throw ParseError(line_no, std::string(what) + " must be a number");
  return v.get<double>();
}

void read_type_values(const json& v, const SideType& type, std::size_t l, GraphObject& g,
                      std::size_t line_no) {
  const std::string where = "side type '" + type.name + "'";
  if (v.is_object()) {
    for (const auto& [attr, val] : v.items()) {
      const double x = number(val, line_no, (where + " value").c_str());
      if (type.kind == SideKind::binary && x != 0.0 && x != 1.0)
        throw ParseError(line_no, where + " is binary; values must be 0 or 1");
      g.side[l][attr] += x;
    }
    return;
  }
  if (type.kind == SideKind::numeric)
    throw ParseError(line_no, where + " is numeric and needs an {attr: value} object");
  std::vector<std::string> names;
  if (v.is_string()) {
    names.push_back(v.get<std::string>());
  } else if (v.is_array()) {
    for (const auto& x : v) names.push_back(scalar_text(x, line_no, (where + " entry").c_str()));
  } else {
    throw ParseError(line_no, where + " has an unsupported value shape");
  }
  if (type.kind == SideKind::categorical) {
    auto& cats = g.categories[l];
    cats.insert(cats.end(), names.begin(), names.end());
  } else {
    for (const auto& n : names) g.side[l][n] = 1.0;
  }
}

void read_local_block(const json& block, const std::string& scope, const StreamSchema& schema,
                      GraphObject& g, std::size_t line_no) {
  if (!block.is_object()) throw ParseError(line_no, "local attribute block must be an object");
  for (const auto& [type_name, attrs] : block.items()) {
    const auto l = schema.index_of(type_name);
    if (!l) throw ParseError(line_no, "undeclared side type '" + type_name + "'");
    if (!attrs.is_object())
      throw ParseError(line_no, "local attributes must be {attr: value} objects");
    for (const auto& [attr, val] : attrs.items()) {
      std::string id = attr;
      if (schema.side_types[*l].kind == SideKind::categorical) id = type_name + "=" + attr;
      g.local_side.push_back({scope, *l, id, number(val, line_no, "local attribute value")});
    }
  }
}

}  // namespace

std::string schema_to_json_line(const StreamSchema& schema) {
  ordered_json types = ordered_json::array();
  for (const auto& t : schema.side_types)
    types.push_back({{"name", t.name}, {"kind", std::string(to_string(t.kind))}});
  ordered_json j;
  j["schema"] = {{"directed", schema.directed}, {"side_types", types}};
  return j.dump();
}

StreamSchema schema_from_json_line(const std::string& line, std::size_t line_no) {
  const json j = parse_object(line, line_no);
  if (!j.contains("schema") || !j["schema"].is_object())
    throw ParseError(line_no, "missing schema header");
  const json& s = j["schema"];
  StreamSchema schema;
  if (s.contains("directed")) {
    if (!s["directed"].is_boolean()) throw ParseError(line_no, "schema.directed must be boolean");
    schema.directed = s["directed"].get<bool>();
  }
  if (s.contains("side_types")) {
    if (!s["side_types"].is_array()) throw ParseError(line_no, "schema.side_types must be a list");
    for (const auto& t : s["side_types"]) {
      if (!t.is_object() || !t.contains("name") || !t["name"].is_string())
        throw ParseError(line_no, "side type needs a string name");
      SideType st;
      st.name = t["name"].get<std::string>();
      try {
        if (t.contains("kind")) st.kind = side_kind_from_string(t["kind"].get<std::string>());
      } catch (const std::exception& e) {
        throw ParseError(line_no, e.what());
      }
      schema.side_types.push_back(std::move(st));
    }
  }
  try {
    schema.validate();
  } catch (const InvalidArgument& e) {
    throw ParseError(line_no, e.what());
  }
  return schema;
}

GraphObject graph_from_json_line(const std::string& line, const StreamSchema& schema,
                                 std::size_t line_no) {
  const json j = parse_object(line, line_no);
  GraphObject g;
  g.side.resize(schema.d());
  g.categories.resize(schema.d());

  if (j.contains("id")) g.id = scalar_text(j["id"], line_no, "id");
  if (j.contains("ts")) {
    if (!j["ts"].is_number_unsigned() && !(j["ts"].is_number_integer() && j["ts"].get<long long>() >= 0))
      throw ParseError(line_no, "ts must be a nonnegative integer");
    g.timestamp = j["ts"].get<Timestamp>();
  }
  if (j.contains("label") && !j["label"].is_null())
    g.label = scalar_text(j["label"], line_no, "label");

  if (j.contains("edges")) {
    if (!j["edges"].is_array()) throw ParseError(line_no, "edges must be a list");
    for (const auto& e : j["edges"]) {
      if (!e.is_array() || e.size() < 2 || e.size() > 3)
        throw ParseError(line_no, "edge must be [src, dst] or [src, dst, freq]");
      Edge edge{scalar_text(e[0], line_no, "node label"), scalar_text(e[1], line_no, "node label"),
                std::nullopt};
      if (e.size() == 3 && !e[2].is_null()) edge.freq = number(e[2], line_no, "edge frequency");
      g.edges.push_back(std::move(edge));
    }
  }

  if (j.contains("side")) {
    if (!j["side"].is_object()) throw ParseError(line_no, "side must be an object");
    for (const auto& [type_name, v] : j["side"].items()) {
      const auto l = schema.index_of(type_name);
      if (!l) throw ParseError(line_no, "undeclared side type '" + type_name + "'");
      read_type_values(v, schema.side_types[*l], *l, g, line_no);
    }
  }
  if (j.contains("node_side")) {
    if (!j["node_side"].is_object()) throw ParseError(line_no, "node_side must be an object");
    for (const auto& [node, block] : j["node_side"].items())
      read_local_block(block, node, schema, g, line_no);
  }
  if (j.contains("edge_side")) {
    if (!j["edge_side"].is_array()) throw ParseError(line_no, "edge_side must be a list");
    for (const auto& e : j["edge_side"]) {
      if (!e.is_array() || e.size() != 3)
        throw ParseError(line_no, "edge_side entry must be [src, dst, {type: {attr: value}}]");
      const std::string scope = scalar_text(e[0], line_no, "node label") + "->" +
                                scalar_text(e[1], line_no, "node label");
      read_local_block(e[2], scope, schema, g, line_no);
    }
  }
  return g;
}

std::string graph_to_json_line(const GraphObject& g, const StreamSchema& schema) {
  ordered_json j;
  j["id"] = g.id;
  j["ts"] = g.timestamp;
  ordered_json edges = ordered_json::array();
  for (const auto& e : g.edges) edges.push_back({e.src, e.dst, e.freq.value_or(1.0)});
  j["edges"] = std::move(edges);
  ordered_json side = ordered_json::object();
  for (std::size_t l = 0; l < g.side.size() && l < schema.d(); ++l) {
    if (g.side[l].empty()) continue;
    ordered_json attrs = ordered_json::object();
    for (const auto& [attr, v] : g.side[l]) attrs[attr] = v;
    side[schema.side_types[l].name] = std::move(attrs);
  }
  j["side"] = std::move(side);
  if (g.label) j["label"] = *g.label;
  return j.dump();
}

StreamReader::StreamReader(std::istream& in, bool strict) : in_(in), strict_(strict) {
  std::string line;
  if (!next_line(line)) throw ParseError(0, "empty stream: missing schema header");
  schema_ = schema_from_json_line(line, line_no_);
}

bool StreamReader::next_line(std::string& line) {
  while (std::getline(in_, line)) {
    ++line_no_;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") != std::string::npos) return true;
  }
  return false;
}

std::optional<GraphObject> StreamReader::next() {
  std::string line;
  while (next_line(line)) {
    try {
      GraphObject g = graph_from_json_line(line, schema_, line_no_);
      if (g.id.empty()) g.id = "g" + std::to_string(records_ + 1);
      if (g.timestamp == 0) g.timestamp = records_ + 1;
      try {
        g = preprocess(std::move(g), schema_);
      } catch (const std::invalid_argument& e) {
        throw ParseError(line_no_, e.what());
      }
      ++records_;
      return g;
    } catch (const ParseError& e) {
      if (strict_) throw;
      diagnostics_.push_back(e);
    }
  }
  return std::nullopt;
}

std::size_t StreamReader::skip(std::size_t n) {
  std::size_t skipped = 0;
  while (skipped < n && next()) ++skipped;
  return skipped;
}

StreamFile read_stream(std::istream& in, bool strict) {
  StreamReader reader(in, strict);
  StreamFile out;
  out.schema = reader.schema();
  while (auto g = reader.next()) out.graphs.push_back(std::move(*g));
  out.diagnostics = reader.diagnostics();
  return out;
}

StreamFile read_stream_file(const std::string& path, bool strict) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open stream file '" + path + "'");
  return read_stream(in, strict);
}

void write_stream(std::ostream& out, const StreamSchema& schema,
                  const std::vector<GraphObject>& graphs) {
  out << schema_to_json_line(schema) << '\n';
  for (const auto& g : graphs) out << graph_to_json_line(g, schema) << '\n';
}

}  // namespace gssclu
