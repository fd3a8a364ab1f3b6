#pragma once

// Exact statistics backend: explicit per-cluster maps of summed edge
// frequencies and attribute values. Implements the same interface as
// ClusterStats with zero estimation error, for differential testing.

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "gssclu/model.hpp"
#include "gssclu/sketch.hpp"

namespace gssclu {

class ExactClusterStats {
 public:
  struct Config {
    std::size_t d = 0;
    // Keeps every absorbed graph so definitional sums can be recomputed.
    // Breaks constant memory; for tests only.
    bool retain_members = false;

    static Config configure(const SketchConfig&, std::size_t d) { return {d, false}; }
    friend bool operator==(const Config&, const Config&) = default;
  };

  // Sparse vector of one member graph per component.
  using Member = std::vector<AttributeMap>;

  static constexpr bool kUsesSketches = false;
  static constexpr std::string_view kBackendName = "exact";

  explicit ExactClusterStats(const Config& config);

  static ExactClusterStats singleton(const PreparedGraph& g, Timestamp now, const Config& config);

  void absorb(const PreparedGraph& g, Timestamp now);
  // Throws ConfigMismatch when d differs.
  void merge(const ExactClusterStats& other);

  std::uint64_t count() const { return n_; }
  Timestamp last_update() const { return t_last_; }
  std::size_t components() const { return totals_.size(); }
  std::size_t d() const { return totals_.size() - 1; }
  const Config& config() const { return config_; }

  // Summed values of the aggregate graph H(C) for one component.
  const AttributeMap& totals(std::size_t component) const { return totals_[component]; }
  double second_moment(std::size_t component) const { return second_[component]; }
  double er() const { return second_[0]; }
  double sr(std::size_t type) const { return second_.at(type); }
  // Sum of squared totals of one component (cached).
  double self_product(std::size_t component) const { return self_[component]; }

  const std::vector<Member>& members() const { return members_; }

  void write(io::Writer& out) const;
  static ExactClusterStats read(io::Reader& in);
  std::string serialize() const;
  static ExactClusterStats deserialize(std::string_view bytes);

  friend bool operator==(const ExactClusterStats& a, const ExactClusterStats& b) {
    return a.config_ == b.config_ && a.n_ == b.n_ && a.t_last_ == b.t_last_ &&
           a.second_ == b.second_ && a.totals_ == b.totals_ && a.members_ == b.members_;
  }

 private:
  void refresh_cache();

  Config config_;
  std::vector<AttributeMap> totals_;
  std::vector<double> second_;
  std::vector<double> self_;
  std::uint64_t n_ = 0;
  Timestamp t_last_ = 0;
  std::vector<Member> members_;
};

ExactClusterStats merge(const ExactClusterStats& a, const ExactClusterStats& b);

// Expansion-form estimators over exact maps; same contracts as the sketch
// overloads in distance.hpp.
double component_distance_sq(const PreparedGraph& g, const ExactClusterStats& c,
                             std::size_t component);
double intra_distance_sq(const ExactClusterStats& c, std::size_t component);
double inter_distance_sq(const ExactClusterStats& a, const ExactClusterStats& b,
                         std::size_t component);

// Literal definitions, enumerating the union of keys:
//   sum_t (F(t, g) - F(t, H(C)) / N(C))^2
double direct_component_distance_sq(const PreparedGraph& g, const ExactClusterStats& c,
                                    std::size_t component);
//   sum_t (F(t, H(Ci)) / N(Ci) - F(t, H(Cj)) / N(Cj))^2
double direct_inter_distance_sq(const ExactClusterStats& a, const ExactClusterStats& b,
                                std::size_t component);
//   sum over retained members G of sum_t (F(t, G) - F(t, H(C)) / N(C))^2.
// Throws InvalidArgument unless members are retained.
double member_intra_distance_sq(const ExactClusterStats& c, std::size_t component);

}  // namespace gssclu
