#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "gssclu/model.hpp"
#include "gssclu/sketch.hpp"

namespace gssclu {

// Constant-size summary of one cluster: a first-moment sketch and an exact
// second-moment sum per component (component 0 is edges, l = 1..d the side
// types), the graph count and the last update time. All sketches of all
// clusters share one SketchConfig so cross-cluster inner products are defined.
class ClusterStats {
 public:
  struct Config {
    SketchConfig sketch;
    std::size_t d = 0;

    static Config configure(const SketchConfig& sketch, std::size_t d) { return {sketch, d}; }
    friend bool operator==(const Config&, const Config&) = default;
  };

  static constexpr bool kUsesSketches = true;
  static constexpr std::string_view kBackendName = "sketch";

  // n = 0 bundle; the identity element of merge().
  explicit ClusterStats(const Config& config);

  static ClusterStats singleton(const PreparedGraph& g, Timestamp now, const Config& config);

  // Adds g's edge frequencies and attribute values to the sketches, their
  // squares to the second moments, increments the count.
  void absorb(const PreparedGraph& g, Timestamp now);
  // Cell-wise and component-wise sum; count summed; last update is the max.
  // Throws ConfigMismatch on different configs.
  void merge(const ClusterStats& other);

  std::uint64_t count() const { return n_; }
  Timestamp last_update() const { return t_last_; }
  std::size_t components() const { return sketches_.size(); }
  std::size_t d() const { return sketches_.size() - 1; }
  const Config& config() const { return config_; }

  const CountMinSketch& sketch(std::size_t component) const { return sketches_[component]; }
  const CountMinSketch& edge_sketch() const { return sketches_[0]; }
  const CountMinSketch& side_sketch(std::size_t type) const { return sketches_.at(type); }
  double second_moment(std::size_t component) const { return second_[component]; }
  double er() const { return second_[0]; }
  double sr(std::size_t type) const { return second_.at(type); }

  // Cached sketch_self_inner_product() of a component.
  double self_product(std::size_t component) const { return self_[component]; }

  void write(io::Writer& out) const;
  static ClusterStats read(io::Reader& in);
  std::string serialize() const;
  static ClusterStats deserialize(std::string_view bytes);

  // Field-exact equality (sketch grids and scalars).
  friend bool operator==(const ClusterStats& a, const ClusterStats& b) {
    return a.config_ == b.config_ && a.n_ == b.n_ && a.t_last_ == b.t_last_ &&
           a.second_ == b.second_ && a.sketches_ == b.sketches_;
  }

 private:
  void refresh_cache();

  Config config_;
  std::vector<CountMinSketch> sketches_;
  std::vector<double> second_;
  std::vector<double> self_;
  std::uint64_t n_ = 0;
  Timestamp t_last_ = 0;
};

ClusterStats merge(const ClusterStats& a, const ClusterStats& b);

}  // namespace gssclu
