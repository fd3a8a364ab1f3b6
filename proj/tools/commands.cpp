#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "gssclu/errors.hpp"
#include "gssclu/eval.hpp"
#include "gssclu/stream_io.hpp"
#include "json.hpp"

namespace gssclu::cli {
namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

std::ofstream open_out(const fs::path& path, std::ios::openmode mode = std::ios::out) {
  std::ofstream out(path, mode | std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  return in;
}

void warn(const ParseError& e) {
  json j{{"level", "warning"}, {"line", e.line()}, {"error", e.what()}};
  std::cerr << j.dump() << '\n';
}

json config_json(const EngineConfig& c) {
  return json{{"k", c.k},
              {"gamma", c.gamma},
              {"p", c.p},
              {"sketch", {{"rows", c.sketch.rows}, {"cols", c.sketch.cols}, {"seed", c.sketch.seed}}},
              {"dmo",
               {{"enabled", c.optimize_weights},
                {"t", c.dmo.t},
                {"step_size", c.dmo.step_size},
                {"max_steps", c.dmo.max_steps},
                {"feasibility_margin", c.dmo.feasibility_margin},
                {"weight_floor", c.dmo.weight_floor}}}};
}

json weights_json(const WeightVector& w, const StreamSchema& schema) {
  json names = json::array({"edges"});
  for (const auto& t : schema.side_types) names.push_back(t.name);
  return json{{"components", names}, {"weights", w.values()}};
}

bool all_labeled(const std::vector<std::string>& labels, const std::vector<bool>& has) {
  return !labels.empty() && std::all_of(has.begin(), has.end(), [](bool b) { return b; });
}

// Reads previously written events; a resumed run appends to them.
std::vector<AssignmentEvent> read_events(const fs::path& path) {
  std::vector<AssignmentEvent> out;
  std::ifstream in(path, std::ios::binary);
  if (!in) return out;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line))
    if (++n, !line.empty()) out.push_back(event_from_json_line(line, n));
  return out;
}

template <class E>
int cluster_with(E engine, const ClusterOptions& opt, StreamReader& reader, bool resumed) {
  const fs::path dir(opt.out_dir);
  fs::create_directories(dir);
  engine.set_diagnostics(opt.diagnostics);

  // Labels of the graphs the checkpoint already covers; their events come
  // from the earlier run's events file.
  std::vector<std::string> labels;
  std::vector<bool> has_label;
  std::vector<AssignmentEvent> history;
  if (resumed) {
    history = read_events(dir / "events.ndjson");
    if (history.size() != engine.graph_count()) {
      if (!history.empty() || fs::exists(dir / "events.ndjson"))
        std::cerr << json{{"level", "warning"},
                          {"error", "events.ndjson does not match the checkpoint; starting it afresh"}}
                         .dump()
                  << '\n';
      history.clear();
    }
    for (std::uint64_t i = 0; i < engine.graph_count(); ++i) {
      auto g = reader.next();
      if (!g) throw ParseError(reader.line_number(), "stream ends before the checkpoint position");
      labels.push_back(g->label.value_or(""));
      has_label.push_back(g->label.has_value());
    }
  }

  auto events_out = open_out(dir / "events.ndjson", resumed && !history.empty() ? std::ios::app : std::ios::out);
  std::ofstream trace;
  if (opt.dmo_trace) trace = open_out(dir / "dmo_trace.ndjson", resumed ? std::ios::app : std::ios::out);

  std::vector<TimingMark> marks;
  const Stopwatch clock;
  std::uint64_t processed = 0;
  while (!opt.max_graphs || processed < *opt.max_graphs) {
    auto g = reader.next();
    if (!g) break;
    const auto ev = engine.process(*g);
    marks.push_back({clock.elapsed_s(), ev.edge_count});
    ++processed;
    labels.push_back(g->label.value_or(""));
    has_label.push_back(g->label.has_value());
    events_out << event_to_json_line(ev) << '\n';
    history.push_back(ev);
    if (opt.dmo_trace && ev.weights_refreshed && engine.last_refine()) {
      const auto& r = *engine.last_refine();
      trace << json{{"graphs_processed", engine.graph_count()},
                    {"skipped", r.skipped},
                    {"rescaled", r.rescaled},
                    {"accepted_steps", r.accepted_steps},
                    {"objective", r.objective_trace},
                    {"weights", r.weights.values()}}
                   .dump()
            << '\n';
    }
  }
  for (const auto& d : reader.diagnostics()) warn(d);

  open_out(dir / "weights.json") << weights_json(engine.weights(), engine.schema()).dump(2) << '\n';
  open_out(dir / "checkpoint.bin") << engine.checkpoint();

  // Purity needs every graph's label and the full event history.
  const bool purity = all_labeled(labels, has_label) && history.size() == labels.size();
  if (purity) {
    auto out = open_out(dir / "purity.csv");
    write_purity_csv(out, purity_series(history, labels, opt.purity_every));
  }
  {
    auto out = open_out(dir / "throughput.csv");
    write_throughput_csv(out, throughput(marks, opt.window_s));
  }

  json manifest{{"tool", "gssclu"},
                {"version", GSSCLU_VERSION},
                {"input", opt.input},
                {"backend", std::string(E::Stats::kBackendName)},
                {"strict", opt.run.strict},
                {"resumed_from", opt.resume ? json(*opt.resume) : json(nullptr)},
                {"max_graphs", opt.max_graphs ? json(*opt.max_graphs) : json(nullptr)},
                {"seed", engine.config().sketch.seed},
                {"config", config_json(engine.config())},
                {"schema", json::parse(schema_to_json_line(engine.schema()))["schema"]},
                {"graphs_processed", engine.graph_count()},
                {"clusters", engine.clusters().size()},
                {"refreshes", engine.refresh_count()},
                {"skipped_records", reader.diagnostics().size()},
                {"outputs",
                 {"events.ndjson", "weights.json", "checkpoint.bin", "throughput.csv"}}};
  if (purity) manifest["outputs"].push_back("purity.csv");
  if (opt.dmo_trace) manifest["outputs"].push_back("dmo_trace.ndjson");
  open_out(dir / "manifest.json") << manifest.dump(2) << '\n';

  std::cerr << "processed " << processed << " graphs (" << engine.graph_count() << " total), "
            << engine.clusters().size() << " clusters, " << engine.refresh_count()
            << " weight refreshes\n";
  return kOk;
}

template <class E>
E resume_engine(const std::string& path, const StreamSchema& schema) {
  auto in = open_in(path);
  std::stringstream buf;
  buf << in.rdbuf();
  E engine = E::restore(buf.str());
  if (!(engine.schema() == schema))
    throw SchemaMismatch("checkpoint schema differs from the stream header");
  return engine;
}

struct Quantiles {
  std::size_t count = 0;
  double p50 = 0, p90 = 0, p99 = 0, max = 0;
};

Quantiles quantiles(std::vector<double> v) {
  Quantiles q;
  q.count = v.size();
  if (v.empty()) return q;
  std::sort(v.begin(), v.end());
  auto at = [&](double f) { return v[std::min(v.size() - 1, static_cast<std::size_t>(f * v.size()))]; };
  q.p50 = at(0.5);
  q.p90 = at(0.9);
  q.p99 = at(0.99);
  q.max = v.back();
  return q;
}

// Exact statistics that follow the decisions of another engine, so the
// distances that engine saw can be checked against their exact values.
class Shadow {
 public:
  explicit Shadow(const StreamSchema& schema) : schema_(schema), cfg_{schema.d(), false} {}

  // Relative errors of the event's per-cluster distances; call before apply().
  void measure(const GraphObject& g, const AssignmentEvent& ev, std::vector<double>& rel,
               std::size_t& zero_exact) const {
    const PreparedGraph pg(g, schema_);
    for (std::size_t c = 0; c < ev.distances.size() && c < clusters_.size(); ++c)
      for (std::size_t l = 0; l < ev.distances[c].size(); ++l) {
        const double exact = std::sqrt(component_distance_sq(pg, clusters_[c], l));
        if (exact > 0.0)
          rel.push_back(std::abs(ev.distances[c][l] - exact) / exact);
        else
          ++zero_exact;
      }
  }

  void apply(const GraphObject& g, const AssignmentEvent& ev) {
    const PreparedGraph pg(g, schema_);
    const Timestamp now = ev.sequence;
    if (ev.action == Action::assigned)
      clusters_[ev.cluster_index].absorb(pg, now);
    else if (ev.action == Action::initialized)
      clusters_.push_back(ExactClusterStats::singleton(pg, now, cfg_));
    else
      clusters_[ev.cluster_index] = ExactClusterStats::singleton(pg, now, cfg_);
  }

 private:
  StreamSchema schema_;
  ExactClusterStats::Config cfg_;
  std::vector<ExactClusterStats> clusters_;
};

template <class E>
int compare_with(E engine, const CompareOptions& opt, const StreamFile& file) {
  const fs::path dir(opt.out_dir);
  fs::create_directories(dir);
  ExactEngine reference(opt.run.engine, file.schema);
  engine.set_diagnostics(true);

  Shadow shadow(file.schema);
  std::vector<double> rel;
  std::size_t zero_exact = 0;
  std::vector<AssignmentEvent> a, b;
  for (const auto& g : file.graphs) {
    a.push_back(engine.process(g));
    b.push_back(reference.process(g));
    shadow.measure(g, a.back(), rel, zero_exact);
    shadow.apply(g, a.back());
  }
  const double agreement = assignment_agreement(a, b);
  const auto q = quantiles(rel);

  std::vector<std::string> labels;
  bool labeled = !file.graphs.empty();
  for (const auto& g : file.graphs) {
    labeled = labeled && g.label.has_value();
    labels.push_back(g.label.value_or(""));
  }
  json report{{"backend", std::string(E::Stats::kBackendName)},
              {"reference", "exact"},
              {"graphs", file.graphs.size()},
              {"assignment_agreement", agreement},
              {"relative_error",
               {{"count", q.count}, {"p50", q.p50}, {"p90", q.p90}, {"p99", q.p99}, {"max", q.max},
                {"exact_zero_distances", zero_exact}}},
              {"config", config_json(opt.run.engine)}};
  if (labeled) {
    const auto sa = purity_series(a, labels, opt.purity_every);
    const auto sb = purity_series(b, labels, opt.purity_every);
    auto out = open_out(dir / "purity.csv");
    out << "graphs_processed,average_purity,reference_average_purity\n";
    for (std::size_t i = 0; i < sa.size(); ++i)
      out << sa[i].graphs_processed << ',' << sa[i].average_purity << ',' << sb[i].average_purity << '\n';
    report["final_purity"] = {{"run", sa.back().average_purity}, {"reference", sb.back().average_purity}};
  }
  {
    auto out = open_out(dir / "relative_error.csv");
    out << "relative_error\n";
    for (double r : rel) out << r << '\n';
  }
  open_out(dir / "report.json") << report.dump(2) << '\n';
  std::cout << report.dump(2) << '\n';
  return kOk;
}

SynthConfig synth_config(const SynthOptions& opt) {
  SynthConfig c = opt.config;
  const InformativeType info = c.informative_types.empty() ? InformativeType{"topic"} : c.informative_types[0];
  const NoiseType noise = c.noise_types.empty() ? NoiseType{"noise"} : c.noise_types[0];
  c.informative_types.clear();
  c.noise_types.clear();
  for (std::size_t i = 0; i < opt.n_informative; ++i) {
    InformativeType t = info;
    t.name = i ? "topic" + std::to_string(i + 1) : "topic";
    c.informative_types.push_back(t);
  }
  for (std::size_t i = 0; i < opt.n_noise; ++i) {
    NoiseType t = noise;
    t.name = i ? "noise" + std::to_string(i + 1) : "noise";
    c.noise_types.push_back(t);
  }
  return c;
}

}  // namespace

int run_cluster(const ClusterOptions& opt) {
  opt.run.engine.validate();
  auto in = open_in(opt.input);
  StreamReader reader(in, opt.run.strict);
  if (opt.run.backend == "exact") {
    if (opt.resume) return cluster_with(resume_engine<ExactEngine>(*opt.resume, reader.schema()), opt, reader, true);
    return cluster_with(ExactEngine(opt.run.engine, reader.schema()), opt, reader, false);
  }
  if (opt.resume) return cluster_with(resume_engine<SketchEngine>(*opt.resume, reader.schema()), opt, reader, true);
  return cluster_with(SketchEngine(opt.run.engine, reader.schema()), opt, reader, false);
}

int run_synth(const SynthOptions& opt) {
  const SynthConfig c = synth_config(opt);
  c.validate();
  if (opt.out == "-") {
    synth_write(c, std::cout);
    return kOk;
  }
  auto out = open_out(opt.out);
  synth_write(c, out);
  return kOk;
}

int run_compare(const CompareOptions& opt) {
  opt.run.engine.validate();
  const StreamFile file = read_stream_file(opt.input, opt.run.strict);
  for (const auto& d : file.diagnostics) warn(d);
  if (opt.run.backend == "exact") return compare_with(ExactEngine(opt.run.engine, file.schema), opt, file);
  return compare_with(SketchEngine(opt.run.engine, file.schema), opt, file);
}

int run_eval(const EvalOptions& opt) {
  const StreamFile file = read_stream_file(opt.input, true);
  std::ifstream probe(opt.events);
  if (!probe) throw std::runtime_error("cannot open " + opt.events);
  probe.close();
  const auto events = read_events(opt.events);
  if (events.size() > file.graphs.size())
    throw ParseError(0, "events file covers " + std::to_string(events.size()) + " graphs, stream has " +
                            std::to_string(file.graphs.size()));
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < events.size(); ++i) {
    const auto& g = file.graphs[i];
    if (!g.label) throw ParseError(0, "graph '" + g.id + "' has no label");
    if (g.id != events[i].graph_id)
      throw ParseError(0, "event " + std::to_string(i + 1) + " is for '" + events[i].graph_id +
                              "', stream has '" + g.id + "'");
    labels.push_back(*g.label);
  }
  if (events.empty()) throw ParseError(0, "events file is empty");

  LiveMembership live;
  for (std::size_t i = 0; i < events.size(); ++i) live.apply(events[i], labels[i]);
  const auto r = live.report();
  json clusters = json::array();
  for (std::size_t i = 0; i < r.cluster_ids.size(); ++i)
    clusters.push_back({{"uid", r.cluster_ids[i]},
                        {"size", r.cluster_sizes[i]},
                        {"dominant_label", r.dominant_labels[i]},
                        {"purity", r.per_cluster_purity[i]}});
  std::cout << json{{"graphs", events.size()},
                    {"average_purity", r.average_purity},
                    {"weighted_purity", r.weighted_purity},
                    {"clusters", clusters}}
                   .dump(2)
            << '\n';
  if (opt.csv) {
    auto out = open_out(*opt.csv);
    write_purity_csv(out, purity_series(events, labels, opt.purity_every));
  }
  return kOk;
}

}  // namespace gssclu::cli
