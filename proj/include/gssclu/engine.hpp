#pragma once

// Single-pass clustering of a graph stream into at most k clusters, each kept
// as a constant-size statistics bundle. Generic over the statistics backend:
// Engine<ClusterStats> is the sketch engine, Engine<ExactClusterStats> the
// exact oracle used for differential testing.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gssclu/cluster_stats.hpp"
#include "gssclu/distance.hpp"
#include "gssclu/dmo.hpp"
#include "gssclu/exact_stats.hpp"
#include "gssclu/model.hpp"

namespace gssclu {

struct EngineConfig {
  std::size_t k = 10;
  std::uint64_t gamma = 250;  // weight refresh period, in graphs
  double p = 3.0;             // spread factor
  SketchConfig sketch{};      // sketch.seed seeds the hash family
  DmoConfig dmo{};
  bool optimize_weights = true;

  // Throws InvalidArgument unless k >= 2, gamma >= 1, p >= 0 and the sketch
  // and optimizer configs are valid.
  void validate() const;

  friend bool operator==(const EngineConfig&, const EngineConfig&) = default;
};

enum class Action { initialized, assigned, replaced_stale };

std::string_view to_string(Action action);
Action action_from_string(std::string_view name);

struct AssignmentEvent {
  std::string graph_id;
  std::uint64_t sequence = 0;  // 1-based arrival ordinal
  Action action = Action::initialized;
  std::size_t cluster_index = 0;       // slot written (created, absorbed or replaced)
  std::uint64_t cluster_uid = 0;       // unique id of the cluster now in that slot
  std::optional<std::uint64_t> evicted_uid;  // replaced_stale only
  std::optional<std::size_t> nearest_index;  // absent for initialized
  double es_distance_sq = 0.0;         // to the nearest cluster
  double spread = 0.0;                 // of the nearest cluster
  std::size_t edge_count = 0;
  bool weights_refreshed = false;      // a weight refresh ran after this graph
  std::vector<DistanceVector> distances;  // per cluster, when diagnostics are on

  friend bool operator==(const AssignmentEvent&, const AssignmentEvent&) = default;
};

std::string event_to_json_line(const AssignmentEvent& e);
// Throws ParseError(line_no).
AssignmentEvent event_from_json_line(const std::string& line, std::size_t line_no);

template <ClusterStatistics S>
class Engine {
 public:
  using Stats = S;
  using StatsConfig = typename S::Config;

  Engine(const EngineConfig& config, const StreamSchema& schema);
  Engine(const EngineConfig& config, const StreamSchema& schema, const StatsConfig& stats_config);

  // Processes one canonical graph. Throws SchemaMismatch when the graph has
  // more side types than the schema.
  AssignmentEvent process(const GraphObject& g);
  std::vector<AssignmentEvent> run(std::span<const GraphObject> stream);

  const EngineConfig& config() const { return config_; }
  const StreamSchema& schema() const { return schema_; }
  const WeightVector& weights() const { return weights_; }
  // Throws InvalidArgument on a dimension mismatch.
  void set_weights(const WeightVector& w);

  std::span<const S> clusters() const { return clusters_; }
  std::span<const std::uint64_t> cluster_uids() const { return uids_; }
  std::uint64_t graph_count() const { return graph_count_; }
  std::uint64_t refresh_count() const { return refresh_count_; }
  const std::optional<RefineResult>& last_refine() const { return last_refine_; }

  void set_diagnostics(bool on) { diagnostics_ = on; }

  // Versioned binary state; restore() resumes exactly where checkpoint() was taken.
  std::string checkpoint() const;
  static Engine restore(std::string_view bytes);

 private:
  S make_singleton(const PreparedGraph& g, Timestamp now) const;
  void maybe_refresh(AssignmentEvent& e);

  EngineConfig config_;
  StreamSchema schema_;
  StatsConfig stats_config_;
  std::optional<SketchHasher> hasher_;
  WeightVector weights_;
  std::vector<S> clusters_;
  std::vector<std::uint64_t> uids_;
  std::uint64_t next_uid_ = 0;
  std::uint64_t graph_count_ = 0;
  std::uint64_t refresh_count_ = 0;
  std::optional<RefineResult> last_refine_;
  bool diagnostics_ = false;
  std::vector<double> scratch_;
};

using SketchEngine = Engine<ClusterStats>;
using ExactEngine = Engine<ExactClusterStats>;

extern template class Engine<ClusterStats>;
extern template class Engine<ExactClusterStats>;

}  // namespace gssclu
