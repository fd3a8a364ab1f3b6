#include "gssclu/engine.hpp"

#include "json.hpp"

#include "gssclu/binary_io.hpp"
#include "gssclu/errors.hpp"

namespace gssclu {
namespace {

constexpr std::string_view kEngineMagic = "GSEN";
constexpr std::uint32_t kEngineVersion = 1;

void write_stats_config(io::Writer&, const ClusterStats::Config&) {}
void write_stats_config(io::Writer& out, const ExactClusterStats::Config& c) {
  out.u8(c.retain_members ? 1 : 0);
}

ClusterStats::Config read_stats_config(io::Reader&, const EngineConfig& config,
                                       const StreamSchema& schema, const ClusterStats*) {
  return ClusterStats::Config::configure(config.sketch, schema.d());
}
ExactClusterStats::Config read_stats_config(io::Reader& in, const EngineConfig&,
                                            const StreamSchema& schema,
                                            const ExactClusterStats*) {
  ExactClusterStats::Config c{schema.d(), false};
  c.retain_members = in.u8() != 0;
  return c;
}

}  // namespace

void EngineConfig::validate() const {
  if (k < 2) throw InvalidArgument("k must be at least 2");
  if (gamma < 1) throw InvalidArgument("gamma must be at least 1");
  if (!(p >= 0.0) || !std::isfinite(p)) throw InvalidArgument("p must be finite and nonnegative");
  sketch.validate();
  dmo.validate();
}

std::string_view to_string(Action action) {
  switch (action) {
    case Action::initialized: return "initialized";
    case Action::assigned: return "assigned";
    case Action::replaced_stale: return "replaced_stale";
  }
  return "initialized";
}

Action action_from_string(std::string_view name) {
  if (name == "initialized") return Action::initialized;
  if (name == "assigned") return Action::assigned;
  if (name == "replaced_stale") return Action::replaced_stale;
  throw InvalidArgument("unknown action '" + std::string(name) + "'");
}

std::string event_to_json_line(const AssignmentEvent& e) {
  nlohmann::ordered_json j;
  j["graph_id"] = e.graph_id;
  j["seq"] = e.sequence;
  j["action"] = std::string(to_string(e.action));
  j["cluster"] = e.cluster_index;
  j["uid"] = e.cluster_uid;
  if (e.evicted_uid) j["evicted_uid"] = *e.evicted_uid;
  if (e.nearest_index) j["nearest"] = *e.nearest_index;
  j["es_distance_sq"] = e.es_distance_sq;
  j["spread"] = e.spread;
  j["edges"] = e.edge_count;
  j["refresh"] = e.weights_refreshed;
  if (!e.distances.empty()) {
    auto& arr = j["distances"] = nlohmann::ordered_json::array();
    for (const auto& d : e.distances) arr.push_back(d.components);
  }
  return j.dump();
}

AssignmentEvent event_from_json_line(const std::string& line, std::size_t line_no) {
  try {
    const auto j = nlohmann::json::parse(line);
    AssignmentEvent e;
    e.graph_id = j.at("graph_id").get<std::string>();
    e.sequence = j.at("seq").get<std::uint64_t>();
    e.action = action_from_string(j.at("action").get<std::string>());
    e.cluster_index = j.at("cluster").get<std::size_t>();
    e.cluster_uid = j.at("uid").get<std::uint64_t>();
    if (j.contains("evicted_uid")) e.evicted_uid = j["evicted_uid"].get<std::uint64_t>();
    if (j.contains("nearest")) e.nearest_index = j["nearest"].get<std::size_t>();
    e.es_distance_sq = j.at("es_distance_sq").get<double>();
    e.spread = j.at("spread").get<double>();
    e.edge_count = j.value("edges", std::size_t{0});
    e.weights_refreshed = j.value("refresh", false);
    if (j.contains("distances"))
      for (const auto& d : j["distances"]) e.distances.push_back({d.get<std::vector<double>>()});
    return e;
  } catch (const ParseError&) {
    throw;
  } catch (const std::exception& ex) {
    throw ParseError(line_no, std::string("bad event record: ") + ex.what());
  }
}

template <ClusterStatistics S>
Engine<S>::Engine(const EngineConfig& config, const StreamSchema& schema)
    : Engine(config, schema, StatsConfig::configure(config.sketch, schema.d())) {}

template <ClusterStatistics S>
Engine<S>::Engine(const EngineConfig& config, const StreamSchema& schema,
                  const StatsConfig& stats_config)
    : config_(config),
      schema_(schema),
      stats_config_(stats_config),
      weights_(WeightVector::identity(schema.d() + 1)) {
  config_.validate();
  schema_.validate();
  if constexpr (S::kUsesSketches) hasher_.emplace(config_.sketch);
  clusters_.reserve(config_.k);
}

template <ClusterStatistics S>
void Engine<S>::set_weights(const WeightVector& w) {
  if (w.size() != schema_.d() + 1)
    throw InvalidArgument("weight vector must have d + 1 components");
  weights_ = w;
}

template <ClusterStatistics S>
S Engine<S>::make_singleton(const PreparedGraph& g, Timestamp now) const {
  return S::singleton(g, now, stats_config_);
}

template <ClusterStatistics S>
AssignmentEvent Engine<S>::process(const GraphObject& g) {
  const PreparedGraph prepared(g, schema_, hasher_ ? &*hasher_ : nullptr);
  const Timestamp now = graph_count_ + 1;

  AssignmentEvent e;
  e.graph_id = g.id;
  e.sequence = now;
  e.edge_count = g.edges.size();

  if (clusters_.size() < config_.k) {
    clusters_.push_back(make_singleton(prepared, now));
    uids_.push_back(next_uid_++);
    e.action = Action::initialized;
    e.cluster_index = clusters_.size() - 1;
    e.cluster_uid = uids_.back();
  } else {
    const std::size_t m = weights_.size();
    std::size_t nearest = 0;
    double best = 0.0;
    scratch_.resize(m);
    for (std::size_t j = 0; j < clusters_.size(); ++j) {
      double es = 0.0;
      for (std::size_t l = 0; l < m; ++l) {
        scratch_[l] = component_distance_sq(prepared, clusters_[j], l);
        es += weights_[l] * scratch_[l];
      }
      if (diagnostics_) {
        DistanceVector dv;
        for (double sq : scratch_) dv.components.push_back(std::sqrt(sq));
        e.distances.push_back(std::move(dv));
      }
      if (j == 0 || es < best) {
        best = es;
        nearest = j;
      }
    }
    const S& target = clusters_[nearest];
    const double spread = structural_spread(target, weights_, config_.p);
    e.nearest_index = nearest;
    e.es_distance_sq = best;
    e.spread = spread;

    // A singleton has zero spread, and so does a cluster of identical graphs;
    // both still accept a graph sitting on their centroid or, for
    // singletons, the nearest graph of any kind.
    const bool admit = best < spread || target.count() == 1 || (spread == 0.0 && best == 0.0);
    if (admit) {
      clusters_[nearest].absorb(prepared, now);
      e.action = Action::assigned;
      e.cluster_index = nearest;
      e.cluster_uid = uids_[nearest];
    } else {
      std::size_t stale = 0;
      for (std::size_t j = 1; j < clusters_.size(); ++j)
        if (clusters_[j].last_update() < clusters_[stale].last_update()) stale = j;
      e.action = Action::replaced_stale;
      e.cluster_index = stale;
      e.evicted_uid = uids_[stale];
      clusters_[stale] = make_singleton(prepared, now);
      uids_[stale] = next_uid_++;
      e.cluster_uid = uids_[stale];
    }
  }

  ++graph_count_;
  maybe_refresh(e);
  return e;
}

template <ClusterStatistics S>
void Engine<S>::maybe_refresh(AssignmentEvent& e) {
  if (!config_.optimize_weights || graph_count_ % config_.gamma != 0 || clusters_.size() < 2)
    return;
  RefineResult r = dmo_refine(weights_, std::span<const S>(clusters_), config_.dmo);
  weights_ = r.weights;
  last_refine_ = std::move(r);
  ++refresh_count_;
  e.weights_refreshed = true;
}

template <ClusterStatistics S>
std::vector<AssignmentEvent> Engine<S>::run(std::span<const GraphObject> stream) {
  std::vector<AssignmentEvent> events;
  events.reserve(stream.size());
  for (const auto& g : stream) events.push_back(process(g));
  return events;
}

template <ClusterStatistics S>
std::string Engine<S>::checkpoint() const {
  io::Writer out;
  out.magic(kEngineMagic);
  out.u32(kEngineVersion);
  out.str(S::kBackendName);

  out.u64(config_.k);
  out.u64(config_.gamma);
  out.f64(config_.p);
  out.u32(config_.sketch.rows);
  out.u32(config_.sketch.cols);
  out.u64(config_.sketch.seed);
  out.f64(config_.dmo.t);
  out.f64(config_.dmo.step_size);
  out.u64(config_.dmo.max_steps);
  out.f64(config_.dmo.feasibility_margin);
  out.f64(config_.dmo.weight_floor);
  out.u8(config_.optimize_weights ? 1 : 0);

  out.u8(schema_.directed ? 1 : 0);
  out.u32(static_cast<std::uint32_t>(schema_.d()));
  for (const auto& t : schema_.side_types) {
    out.str(t.name);
    out.u8(static_cast<std::uint8_t>(t.kind));
  }
  write_stats_config(out, stats_config_);

  for (double w : weights_.values()) out.f64(w);
  out.u64(graph_count_);
  out.u64(refresh_count_);
  out.u64(next_uid_);
  out.u32(static_cast<std::uint32_t>(clusters_.size()));
  for (std::size_t j = 0; j < clusters_.size(); ++j) {
    out.u64(uids_[j]);
    clusters_[j].write(out);
  }
  return std::move(out).bytes();
}

template <ClusterStatistics S>
Engine<S> Engine<S>::restore(std::string_view bytes) {
  io::Reader in(bytes);
  in.expect_magic(kEngineMagic);
  const std::uint32_t version = in.u32();
  if (version != kEngineVersion)
    throw FormatError("unsupported checkpoint version " + std::to_string(version));
  const std::string backend = in.str();
  if (backend != S::kBackendName)
    throw FormatError("checkpoint was written by the '" + backend + "' backend");

  EngineConfig config;
  config.k = in.u64();
  config.gamma = in.u64();
  config.p = in.f64();
  config.sketch.rows = in.u32();
  config.sketch.cols = in.u32();
  config.sketch.seed = in.u64();
  config.dmo.t = in.f64();
  config.dmo.step_size = in.f64();
  config.dmo.max_steps = in.u64();
  config.dmo.feasibility_margin = in.f64();
  config.dmo.weight_floor = in.f64();
  config.optimize_weights = in.u8() != 0;

  StreamSchema schema;
  schema.directed = in.u8() != 0;
  const std::uint32_t d = in.u32();
  for (std::uint32_t l = 0; l < d; ++l) {
    SideType t;
    t.name = in.str();
    const std::uint8_t kind = in.u8();
    if (kind > static_cast<std::uint8_t>(SideKind::binary)) throw FormatError("bad side kind");
    t.kind = static_cast<SideKind>(kind);
    schema.side_types.push_back(std::move(t));
  }
  const StatsConfig stats_config =
      read_stats_config(in, config, schema, static_cast<const S*>(nullptr));

  Engine engine = [&] {
    try {
      return Engine(config, schema, stats_config);
    } catch (const InvalidArgument& e) {
      throw FormatError(std::string("checkpoint holds an invalid config: ") + e.what());
    }
  }();
  std::vector<double> w(d + 1);
  for (double& x : w) x = in.f64();
  engine.weights_ = WeightVector(std::move(w));
  engine.graph_count_ = in.u64();
  engine.refresh_count_ = in.u64();
  engine.next_uid_ = in.u64();
  const std::uint32_t count = in.u32();
  if (count > config.k) throw FormatError("checkpoint holds more than k clusters");
  for (std::uint32_t j = 0; j < count; ++j) {
    engine.uids_.push_back(in.u64());
    S stats = S::read(in);
    if (!(stats.config() == stats_config))
      throw FormatError("cluster statistics do not match the engine config");
    engine.clusters_.push_back(std::move(stats));
  }
  if (!in.at_end()) throw FormatError("trailing bytes after checkpoint");
  return engine;
}

template class Engine<ClusterStats>;
template class Engine<ExactClusterStats>;

}  // namespace gssclu
