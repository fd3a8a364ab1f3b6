#include "gssclu/eval.hpp"

#include <algorithm>
#include <ostream>
#include <tuple>

#include "gssclu/errors.hpp"

namespace gssclu {
namespace {

using LabelCounts = std::map<std::string, std::size_t>;

PurityReport report_from_counts(const std::map<std::uint64_t, LabelCounts>& clusters) {
  PurityReport r;
  std::size_t total = 0;
  std::size_t dominant_total = 0;
  double sum = 0.0;
  for (const auto& [id, counts] : clusters) {
    std::size_t size = 0;
    const std::string* best = nullptr;
    std::size_t best_count = 0;
    for (const auto& [label, c] : counts) {
      size += c;
      if (c > best_count) {
        best = &label;
        best_count = c;
      }
    }
    if (size == 0) continue;
    const double p = static_cast<double>(best_count) / static_cast<double>(size);
    r.cluster_ids.push_back(id);
    r.cluster_sizes.push_back(size);
    r.dominant_labels.push_back(*best);
    r.per_cluster_purity.push_back(p);
    sum += p;
    total += size;
    dominant_total += best_count;
  }
  if (r.cluster_ids.empty()) throw InvalidArgument("purity of an empty assignment");
  r.average_purity = sum / static_cast<double>(r.cluster_ids.size());
  r.weighted_purity = static_cast<double>(dominant_total) / static_cast<double>(total);
  return r;
}

}  // namespace

PurityReport purity(std::span<const std::uint64_t> clusters, std::span<const std::string> labels) {
  if (clusters.size() != labels.size())
    throw InvalidArgument("purity needs one label per assigned graph");
  std::map<std::uint64_t, LabelCounts> counts;
  for (std::size_t i = 0; i < clusters.size(); ++i) ++counts[clusters[i]][labels[i]];
  return report_from_counts(counts);
}

void LiveMembership::apply(const AssignmentEvent& e, const std::string& label) {
  if (e.evicted_uid) members_.erase(*e.evicted_uid);
  ++members_[e.cluster_uid][label];
}

PurityReport LiveMembership::report() const { return report_from_counts(members_); }

std::vector<PurityPoint> purity_series(std::span<const AssignmentEvent> events,
                                       std::span<const std::string> labels, std::size_t every) {
  if (events.size() != labels.size()) throw InvalidArgument("purity needs one label per event");
  if (every == 0) throw InvalidArgument("purity series interval must be positive");
  std::vector<PurityPoint> out;
  LiveMembership live;
  for (std::size_t i = 0; i < events.size(); ++i) {
    live.apply(events[i], labels[i]);
    const std::size_t done = i + 1;
    if (done % every == 0 || done == events.size()) {
      const PurityReport r = live.report();
      out.push_back({done, r.average_purity, r.weighted_purity});
    }
  }
  return out;
}

std::vector<ThroughputWindow> throughput(std::span<const TimingMark> marks, double window_s) {
  if (!(window_s > 0.0)) throw InvalidArgument("throughput window must be positive");
  std::vector<ThroughputWindow> out;
  double start = 0.0;
  ThroughputWindow w;
  for (std::size_t i = 0; i < marks.size(); ++i) {
    if (marks[i].elapsed_s < (i ? marks[i - 1].elapsed_s : 0.0))
      throw InvalidArgument("timing marks must be nondecreasing");
    ++w.graphs;
    w.edges += marks[i].edges;
    if (marks[i].elapsed_s - start >= window_s || i + 1 == marks.size()) {
      w.start_s = start;
      w.end_s = marks[i].elapsed_s;
      const double span = w.end_s - w.start_s;
      if (span > 0.0) w.edges_per_s = static_cast<double>(w.edges) / span;
      out.push_back(w);
      start = w.end_s;
      w = ThroughputWindow{};
    }
  }
  return out;
}

std::optional<double> total_rate(std::span<const TimingMark> marks) {
  if (marks.empty() || !(marks.back().elapsed_s > 0.0)) return std::nullopt;
  std::size_t edges = 0;
  for (const auto& m : marks) edges += m.edges;
  return static_cast<double>(edges) / marks.back().elapsed_s;
}

double assignment_agreement(std::span<const AssignmentEvent> a, std::span<const AssignmentEvent> b) {
  if (a.size() != b.size()) throw InvalidArgument("runs cover different numbers of graphs");
  if (a.empty()) return 1.0;
  std::map<std::pair<std::uint64_t, std::uint64_t>, std::size_t> together;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].graph_id != b[i].graph_id)
      throw InvalidArgument("runs disagree on graph " + std::to_string(i + 1) + ": '" +
                            a[i].graph_id + "' vs '" + b[i].graph_id + "'");
    ++together[{a[i].cluster_uid, b[i].cluster_uid}];
  }

  // Largest co-occurrence first; ties broken by uid for determinism.
  std::vector<std::tuple<std::size_t, std::uint64_t, std::uint64_t>> pairs;
  for (const auto& [uids, count] : together) pairs.emplace_back(count, uids.first, uids.second);
  std::sort(pairs.begin(), pairs.end(), [](const auto& x, const auto& y) {
    if (std::get<0>(x) != std::get<0>(y)) return std::get<0>(x) > std::get<0>(y);
    return std::tie(std::get<1>(x), std::get<2>(x)) < std::tie(std::get<1>(y), std::get<2>(y));
  });
  std::map<std::uint64_t, std::uint64_t> match;
  std::map<std::uint64_t, bool> taken;
  for (const auto& [count, ua, ub] : pairs) {
    if (match.contains(ua) || taken.contains(ub)) continue;
    match[ua] = ub;
    taken[ub] = true;
  }

  std::size_t agree = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].action != b[i].action) continue;
    if (a[i].action == Action::assigned) {
      const auto it = match.find(a[i].cluster_uid);
      if (it == match.end() || it->second != b[i].cluster_uid) continue;
    }
    ++agree;
  }
  return static_cast<double>(agree) / static_cast<double>(a.size());
}

void write_purity_csv(std::ostream& out, std::span<const PurityPoint> series) {
  out << "graphs_processed,average_purity,weighted_purity\n";
  for (const auto& p : series)
    out << p.graphs_processed << ',' << p.average_purity << ',' << p.weighted_purity << '\n';
}

void write_throughput_csv(std::ostream& out, std::span<const ThroughputWindow> windows) {
  out << "elapsed_s,edges_per_s,graphs,edges\n";
  for (const auto& w : windows) {
    out << w.end_s << ',';
    if (w.edges_per_s) out << *w.edges_per_s;
    out << ',' << w.graphs << ',' << w.edges << '\n';
  }
}

}  // namespace gssclu
