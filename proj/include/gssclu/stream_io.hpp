#pragma once

// Newline-delimited JSON stream files. The first non-empty line is the schema
// header:
//   {"schema": {"directed": false, "side_types": [{"name": "kw", "kind": "numeric"}]}}
// followed by one graph per line:
//   {"id": "g1", "ts": 1, "edges": [["a", "b", 2.0], ["b", "c"]],
//    "side": {"kw": {"db": 3}}, "label": "DB"}
// Categorical types take a string or list of strings, binary types an object
// of 0/1 values or a list of present attribute names. Node and edge scoped
// attributes go under "node_side": {node: {type: {attr: v}}} and
// "edge_side": [[src, dst, {type: {attr: v}}]].

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "gssclu/errors.hpp"
#include "gssclu/model.hpp"

namespace gssclu {

std::string schema_to_json_line(const StreamSchema& schema);
// Throws ParseError(line) when the line is not a schema header.
StreamSchema schema_from_json_line(const std::string& line, std::size_t line_no = 1);

// Graph-level form only; call on preprocessed graphs.
std::string graph_to_json_line(const GraphObject& g, const StreamSchema& schema);
// Parses one record without preprocessing. Throws ParseError(line_no).
GraphObject graph_from_json_line(const std::string& line, const StreamSchema& schema,
                                 std::size_t line_no);

class StreamReader {
 public:
  // Reads the schema header immediately. In strict mode any malformed record
  // throws ParseError; otherwise it is reported through diagnostics() and
  // skipped.
  StreamReader(std::istream& in, bool strict);

  const StreamSchema& schema() const { return schema_; }

  // Next preprocessed graph, or nullopt at end of input.
  std::optional<GraphObject> next();

  // Skips n valid records (used when resuming from a checkpoint).
  std::size_t skip(std::size_t n);

  const std::vector<ParseError>& diagnostics() const { return diagnostics_; }
  std::size_t line_number() const { return line_no_; }

 private:
  bool next_line(std::string& line);

  std::istream& in_;
  bool strict_;
  StreamSchema schema_;
  std::size_t line_no_ = 0;
  std::size_t records_ = 0;
  std::vector<ParseError> diagnostics_;
};

struct StreamFile {
  StreamSchema schema;
  std::vector<GraphObject> graphs;
  std::vector<ParseError> diagnostics;
};

// Reads a whole file. Throws ParseError (header, or any record when strict)
// and std::runtime_error when the file cannot be opened.
StreamFile read_stream_file(const std::string& path, bool strict);
StreamFile read_stream(std::istream& in, bool strict);

void write_stream(std::ostream& out, const StreamSchema& schema,
                  const std::vector<GraphObject>& graphs);

}  // namespace gssclu
