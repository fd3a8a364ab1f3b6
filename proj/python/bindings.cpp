#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <fstream>
#include <sstream>

#include "gssclu/engine.hpp"
#include "gssclu/errors.hpp"
#include "gssclu/eval.hpp"
#include "gssclu/stream_io.hpp"
#include "gssclu/synth.hpp"

namespace py = pybind11;
using namespace gssclu;

namespace {

using EdgeTuple = std::tuple<std::string, std::string, std::optional<double>>;

GraphObject make_graph(std::string id, const std::vector<EdgeTuple>& edges,
                       std::vector<AttributeMap> side, std::optional<std::string> label,
                       Timestamp ts) {
  GraphObject g;
  g.id = std::move(id);
  g.timestamp = ts;
  for (const auto& [s, d, f] : edges) g.edges.push_back({s, d, f});
  g.side = std::move(side);
  g.label = std::move(label);
  return g;
}

std::vector<EdgeTuple> edge_tuples(const GraphObject& g) {
  std::vector<EdgeTuple> out;
  out.reserve(g.edges.size());
  for (const auto& e : g.edges) out.emplace_back(e.src, e.dst, e.freq);
  return out;
}

template <class E>
void bind_engine(py::module_& m, const char* name) {
  py::class_<E>(m, name)
      .def(py::init<const EngineConfig&, const StreamSchema&>(), py::arg("config"), py::arg("schema"))
      // Graphs are preprocessed on the way in; that is idempotent, so
      // already canonical graphs pass through unchanged.
      .def("process",
           [](E& e, const GraphObject& g) { return e.process(preprocess(g, e.schema())); },
           py::arg("graph"))
      .def("run",
           [](E& e, std::vector<GraphObject> graphs) {
             py::gil_scoped_release nogil;
             for (auto& g : graphs) g = preprocess(std::move(g), e.schema());
             return e.run(graphs);
           },
           py::arg("graphs"))
      .def_property_readonly("config", &E::config)
      .def_property_readonly("schema", &E::schema)
      .def_property_readonly("weights",
                             [](const E& e) {
                               auto w = e.weights().values();
                               return std::vector<double>(w.begin(), w.end());
                             })
      .def("set_weights", [](E& e, std::vector<double> w) { e.set_weights(WeightVector(std::move(w))); })
      .def_property_readonly("cluster_uids",
                             [](const E& e) {
                               auto u = e.cluster_uids();
                               return std::vector<std::uint64_t>(u.begin(), u.end());
                             })
      .def_property_readonly("n_clusters", [](const E& e) { return e.clusters().size(); })
      .def_property_readonly("graph_count", &E::graph_count)
      .def_property_readonly("refresh_count", &E::refresh_count)
      .def("set_diagnostics", &E::set_diagnostics)
      .def("checkpoint", [](const E& e) { return py::bytes(e.checkpoint()); })
      .def_static("restore", [](py::bytes b) { return E::restore(std::string(b)); });
}

}  // namespace

PYBIND11_MODULE(_gssclu, m) {
  m.doc() = "Streaming clustering of graphs with side information";
  m.attr("__version__") = GSSCLU_VERSION;

  // Registered translators are tried newest first, so the specific classes
  // win over the generic std::invalid_argument -> ValueError mapping.
  py::register_exception<ConfigMismatch>(m, "ConfigMismatch", PyExc_ValueError);
  py::register_exception<SchemaMismatch>(m, "SchemaMismatch", PyExc_ValueError);
  py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
  py::register_exception<FormatError>(m, "FormatError", PyExc_ValueError);

  py::class_<SketchConfig>(m, "SketchConfig")
      .def(py::init([](std::uint32_t rows, std::uint32_t cols, std::uint64_t seed) {
             SketchConfig c{rows, cols, seed};
             c.validate();
             return c;
           }),
           py::arg("rows") = SketchConfig{}.rows, py::arg("cols") = SketchConfig{}.cols,
           py::arg("seed") = SketchConfig{}.seed)
      .def_static("from_accuracy", &SketchConfig::from_accuracy, py::arg("epsilon"), py::arg("delta"),
                  py::arg("seed") = 0)
      .def_readwrite("rows", &SketchConfig::rows)
      .def_readwrite("cols", &SketchConfig::cols)
      .def_readwrite("seed", &SketchConfig::seed)
      .def_property_readonly("epsilon", &SketchConfig::epsilon)
      .def_property_readonly("delta", &SketchConfig::delta)
      .def(py::self == py::self);

  py::class_<CountMinSketch>(m, "CountMinSketch")
      .def(py::init<const SketchConfig&>())
      .def_property_readonly("config", &CountMinSketch::config)
      .def("update", &CountMinSketch::update, py::arg("key"), py::arg("value") = 1.0)
      .def("estimate", &CountMinSketch::estimate)
      .def("self_inner_product", &CountMinSketch::self_inner_product)
      .def("inner_product", &CountMinSketch::inner_product)
      .def("merge", &CountMinSketch::merge)
      .def("serialize", [](const CountMinSketch& s) { return py::bytes(s.serialize()); })
      .def_static("deserialize", [](py::bytes b) { return CountMinSketch::deserialize(std::string(b)); })
      .def(py::self == py::self);

  py::enum_<SideKind>(m, "SideKind")
      .value("numeric", SideKind::numeric)
      .value("categorical", SideKind::categorical)
      .value("binary", SideKind::binary);

  py::class_<SideType>(m, "SideType")
      .def(py::init([](std::string name, SideKind kind) { return SideType{std::move(name), kind}; }),
           py::arg("name"), py::arg("kind") = SideKind::numeric)
      .def_readwrite("name", &SideType::name)
      .def_readwrite("kind", &SideType::kind);

  py::class_<StreamSchema>(m, "StreamSchema")
      .def(py::init([](std::vector<SideType> types, bool directed) {
             StreamSchema s{std::move(types), directed};
             s.validate();
             return s;
           }),
           py::arg("side_types") = std::vector<SideType>{}, py::arg("directed") = false)
      .def_readwrite("side_types", &StreamSchema::side_types)
      .def_readwrite("directed", &StreamSchema::directed)
      .def_property_readonly("d", &StreamSchema::d)
      .def("to_json", &schema_to_json_line)
      .def(py::self == py::self);

  py::class_<GraphObject>(m, "Graph")
      .def(py::init(&make_graph), py::arg("id"), py::arg("edges"),
           py::arg("side") = std::vector<AttributeMap>{}, py::arg("label") = std::nullopt,
           py::arg("timestamp") = 0)
      .def_readwrite("id", &GraphObject::id)
      .def_readwrite("timestamp", &GraphObject::timestamp)
      .def_readwrite("label", &GraphObject::label)
      .def_property_readonly("edges", &edge_tuples)
      .def_readwrite("side", &GraphObject::side)
      .def_property_readonly("edge_count", &GraphObject::edge_count)
      .def(py::self == py::self);

  m.def("preprocess", &preprocess, py::arg("graph"), py::arg("schema"));
  m.def("parse_graph", [](const std::string& line, const StreamSchema& schema) {
    return preprocess(graph_from_json_line(line, schema, 0), schema);
  });
  m.def("graph_to_json", &graph_to_json_line, py::arg("graph"), py::arg("schema"));
  m.def(
      "read_stream",
      [](const std::string& path, bool strict) {
        auto f = read_stream_file(path, strict);
        std::vector<std::pair<std::size_t, std::string>> skipped;
        for (const auto& d : f.diagnostics) skipped.emplace_back(d.line(), d.what());
        return py::make_tuple(f.schema, f.graphs, skipped);
      },
      py::arg("path"), py::arg("strict") = false,
      "Returns (schema, graphs, skipped) where skipped lists (line, message).");

  py::class_<InformativeType>(m, "InformativeType")
      .def(py::init([](std::string name, double fidelity, std::size_t draws) {
             return InformativeType{std::move(name), fidelity, draws};
           }),
           py::arg("name"), py::arg("fidelity") = 0.9, py::arg("draws") = 4)
      .def_readwrite("name", &InformativeType::name)
      .def_readwrite("fidelity", &InformativeType::fidelity)
      .def_readwrite("draws", &InformativeType::draws);

  py::class_<NoiseType>(m, "NoiseType")
      .def(py::init([](std::string name, std::size_t vocabulary, std::size_t draws) {
             return NoiseType{std::move(name), vocabulary, draws};
           }),
           py::arg("name"), py::arg("vocabulary") = 50, py::arg("draws") = 4)
      .def_readwrite("name", &NoiseType::name)
      .def_readwrite("vocabulary", &NoiseType::vocabulary)
      .def_readwrite("draws", &NoiseType::draws);

  py::class_<SynthConfig>(m, "SynthConfig")
      .def(py::init<>())
      .def_readwrite("n_clusters", &SynthConfig::n_clusters)
      .def_readwrite("n_graphs", &SynthConfig::n_graphs)
      .def_readwrite("nodes_per_community", &SynthConfig::nodes_per_community)
      .def_readwrite("edges_per_graph", &SynthConfig::edges_per_graph)
      .def_readwrite("informative_types", &SynthConfig::informative_types)
      .def_readwrite("noise_types", &SynthConfig::noise_types)
      .def_readwrite("cross_edge_rate", &SynthConfig::cross_edge_rate)
      .def_readwrite("vocab_per_class", &SynthConfig::vocab_per_class)
      .def_readwrite("seed", &SynthConfig::seed)
      .def("validate", &SynthConfig::validate)
      .def("schema", &SynthConfig::schema);

  m.def(
      "synth_generate",
      [](const SynthConfig& cfg) {
        auto s = synth_generate(cfg);
        return py::make_tuple(std::move(s.schema), std::move(s.graphs));
      },
      py::arg("config"), "Returns (schema, graphs).");
  m.def(
      "synth_write",
      [](const SynthConfig& cfg, const std::string& path) {
        std::ofstream out(path, std::ios::binary);
        if (!out) throw std::runtime_error("cannot open " + path);
        synth_write(cfg, out);
      },
      py::arg("config"), py::arg("path"));

  py::class_<DmoConfig>(m, "DmoConfig")
      .def(py::init<>())
      .def_readwrite("t", &DmoConfig::t)
      .def_readwrite("step_size", &DmoConfig::step_size)
      .def_readwrite("max_steps", &DmoConfig::max_steps)
      .def_readwrite("feasibility_margin", &DmoConfig::feasibility_margin)
      .def_readwrite("weight_floor", &DmoConfig::weight_floor);

  py::class_<EngineConfig>(m, "EngineConfig")
      .def(py::init<>())
      .def_readwrite("k", &EngineConfig::k)
      .def_readwrite("gamma", &EngineConfig::gamma)
      .def_readwrite("p", &EngineConfig::p)
      .def_readwrite("sketch", &EngineConfig::sketch)
      .def_readwrite("dmo", &EngineConfig::dmo)
      .def_readwrite("optimize_weights", &EngineConfig::optimize_weights)
      .def("validate", &EngineConfig::validate)
      .def(py::self == py::self);

  py::enum_<Action>(m, "Action")
      .value("initialized", Action::initialized)
      .value("assigned", Action::assigned)
      .value("replaced_stale", Action::replaced_stale);

  py::class_<AssignmentEvent>(m, "AssignmentEvent")
      .def_readonly("graph_id", &AssignmentEvent::graph_id)
      .def_readonly("sequence", &AssignmentEvent::sequence)
      .def_readonly("action", &AssignmentEvent::action)
      .def_readonly("cluster_index", &AssignmentEvent::cluster_index)
      .def_readonly("cluster_uid", &AssignmentEvent::cluster_uid)
      .def_readonly("evicted_uid", &AssignmentEvent::evicted_uid)
      .def_readonly("nearest_index", &AssignmentEvent::nearest_index)
      .def_readonly("es_distance_sq", &AssignmentEvent::es_distance_sq)
      .def_readonly("spread", &AssignmentEvent::spread)
      .def_readonly("edge_count", &AssignmentEvent::edge_count)
      .def_readonly("weights_refreshed", &AssignmentEvent::weights_refreshed)
      .def_property_readonly("distances",
                             [](const AssignmentEvent& e) {
                               std::vector<std::vector<double>> out;
                               for (const auto& d : e.distances) out.push_back(d.components);
                               return out;
                             })
      .def("to_json", &event_to_json_line)
      .def_static("from_json", [](const std::string& line) { return event_from_json_line(line, 0); })
      .def(py::self == py::self);

  bind_engine<SketchEngine>(m, "SketchEngine");
  bind_engine<ExactEngine>(m, "ExactEngine");

  py::class_<PurityReport>(m, "PurityReport")
      .def_readonly("cluster_ids", &PurityReport::cluster_ids)
      .def_readonly("cluster_sizes", &PurityReport::cluster_sizes)
      .def_readonly("dominant_labels", &PurityReport::dominant_labels)
      .def_readonly("per_cluster_purity", &PurityReport::per_cluster_purity)
      .def_readonly("average_purity", &PurityReport::average_purity)
      .def_readonly("weighted_purity", &PurityReport::weighted_purity);

  m.def("purity", [](const std::vector<std::uint64_t>& c, const std::vector<std::string>& l) {
    return purity(c, l);
  }, py::arg("clusters"), py::arg("labels"));
  m.def(
      "live_purity",
      [](const std::vector<AssignmentEvent>& events, const std::vector<std::string>& labels) {
        if (events.size() != labels.size()) throw InvalidArgument("one label per event");
        LiveMembership live;
        for (std::size_t i = 0; i < events.size(); ++i) live.apply(events[i], labels[i]);
        return live.report();
      },
      py::arg("events"), py::arg("labels"),
      "Purity of the clusters still alive after the events.");
  m.def(
      "purity_series",
      [](const std::vector<AssignmentEvent>& events, const std::vector<std::string>& labels,
         std::size_t every) {
        std::vector<std::tuple<std::uint64_t, double, double>> out;
        for (const auto& p : purity_series(events, labels, every))
          out.emplace_back(p.graphs_processed, p.average_purity, p.weighted_purity);
        return out;
      },
      py::arg("events"), py::arg("labels"), py::arg("every") = 100,
      "List of (graphs_processed, average_purity, weighted_purity).");
  m.def("assignment_agreement",
        [](const std::vector<AssignmentEvent>& a, const std::vector<AssignmentEvent>& b) {
          return assignment_agreement(a, b);
        });
}
