#pragma once

// Clustering quality and throughput measures.

#include <chrono>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gssclu/engine.hpp"

namespace gssclu {

struct PurityReport {
  std::vector<std::uint64_t> cluster_ids;  // sorted ascending
  std::vector<std::size_t> cluster_sizes;
  std::vector<std::string> dominant_labels;  // ties go to the smallest label
  std::vector<double> per_cluster_purity;
  double average_purity = 0.0;  // unweighted mean over nonempty clusters
  double weighted_purity = 0.0;  // size-weighted mean
};

// clusters[i] and labels[i] describe graph i. Throws InvalidArgument when the
// input is empty or the lengths differ.
PurityReport purity(std::span<const std::uint64_t> clusters, std::span<const std::string> labels);

// Label counts of the clusters alive in an engine, replayed from its events:
// a graph joins the cluster uid its event names, and a replaced_stale event
// drops every member of the evicted cluster along with its statistics.
class LiveMembership {
 public:
  void apply(const AssignmentEvent& e, const std::string& label);

  // Throws InvalidArgument when no cluster is alive.
  PurityReport report() const;
  std::size_t live_clusters() const { return members_.size(); }

 private:
  std::map<std::uint64_t, std::map<std::string, std::size_t>> members_;
};

struct PurityPoint {
  std::uint64_t graphs_processed = 0;
  double average_purity = 0.0;
  double weighted_purity = 0.0;
};

// Purity of the live clusters after every `every` graphs, and after the last
// one. labels[i] belongs to events[i].
std::vector<PurityPoint> purity_series(std::span<const AssignmentEvent> events,
                                       std::span<const std::string> labels, std::size_t every);

// One timing mark per processed graph: seconds since the run started when the
// graph finished, and its edge count.
struct TimingMark {
  double elapsed_s = 0.0;
  std::size_t edges = 0;
};

struct ThroughputWindow {
  double start_s = 0.0;
  double end_s = 0.0;
  std::size_t graphs = 0;
  std::size_t edges = 0;
  std::optional<double> edges_per_s;  // absent for a zero-duration window
};

// Consecutive windows of about window_s seconds each. A window closes with
// the first graph finishing at or after start + window_s; its rate is edges
// over the time between the previous window's last mark and its own.
// Throws InvalidArgument unless window_s > 0 and marks are nondecreasing.
std::vector<ThroughputWindow> throughput(std::span<const TimingMark> marks, double window_s);

// Total edges over the last mark's elapsed time; absent for zero time.
std::optional<double> total_rate(std::span<const TimingMark> marks);

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double elapsed_s() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

// Fraction of graphs on which two runs over the same stream agree: the same
// action and, for assigned graphs, clusters that correspond under a greedy
// one-to-one matching of cluster uids by co-occurrence count. Throws
// InvalidArgument when the runs cover different graphs.
double assignment_agreement(std::span<const AssignmentEvent> a, std::span<const AssignmentEvent> b);

void write_purity_csv(std::ostream& out, std::span<const PurityPoint> series);
void write_throughput_csv(std::ostream& out, std::span<const ThroughputWindow> windows);

}  // namespace gssclu
