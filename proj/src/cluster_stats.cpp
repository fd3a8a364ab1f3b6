#include "gssclu/cluster_stats.hpp"

#include <algorithm>

#include "gssclu/errors.hpp"

namespace gssclu {
namespace {

constexpr std::string_view kStatsMagic = "GSST";
constexpr std::uint32_t kStatsVersion = 1;

}  // namespace

ClusterStats::ClusterStats(const Config& config)
    : config_(config),
      sketches_(config.d + 1, CountMinSketch(config.sketch)),
      second_(config.d + 1, 0.0),
      self_(config.d + 1, 0.0) {}

ClusterStats ClusterStats::singleton(const PreparedGraph& g, Timestamp now, const Config& config) {
  ClusterStats s(config);
  s.absorb(g, now);
  return s;
}

void ClusterStats::absorb(const PreparedGraph& g, Timestamp now) {
  if (g.components() != components())
    throw SchemaMismatch("graph has " + std::to_string(g.components() - 1) +
                         " side types, cluster statistics expect " + std::to_string(d()));
  const bool hashed = g.hashed_for(config_.sketch);
  for (std::size_t c = 0; c < components(); ++c) {
    const auto features = g.features(c);
    for (std::size_t i = 0; i < features.size(); ++i) {
      if (hashed)
        sketches_[c].update_at(g.cells(c, i), features[i].value);
      else
        sketches_[c].update(features[i].key, features[i].value);
    }
    second_[c] += g.sum_sq(c);
  }
  ++n_;
  t_last_ = std::max(t_last_, now);
  refresh_cache();
}

void ClusterStats::merge(const ClusterStats& other) {
  if (!(config_ == other.config_))
    throw ConfigMismatch("cluster statistics merge requires identical configs");
  for (std::size_t c = 0; c < components(); ++c) {
    sketches_[c].merge(other.sketches_[c]);
    second_[c] += other.second_[c];
  }
  n_ += other.n_;
  t_last_ = std::max(t_last_, other.t_last_);
  refresh_cache();
}

void ClusterStats::refresh_cache() {
  for (std::size_t c = 0; c < components(); ++c) self_[c] = sketches_[c].self_inner_product();
}

void ClusterStats::write(io::Writer& out) const {
  out.magic(kStatsMagic);
  out.u32(kStatsVersion);
  out.u32(static_cast<std::uint32_t>(d()));
  out.u64(n_);
  out.u64(t_last_);
  for (double v : second_) out.f64(v);
  for (const auto& s : sketches_) s.write(out);
}

ClusterStats ClusterStats::read(io::Reader& in) {
  in.expect_magic(kStatsMagic);
  const std::uint32_t version = in.u32();
  if (version != kStatsVersion)
    throw FormatError("unsupported cluster statistics version " + std::to_string(version));
  const std::uint32_t d = in.u32();
  const std::uint64_t n = in.u64();
  const Timestamp t = in.u64();
  std::vector<double> second(d + 1);
  for (double& v : second) v = in.f64();
  std::vector<CountMinSketch> sketches;
  sketches.reserve(d + 1);
  for (std::uint32_t c = 0; c <= d; ++c) sketches.push_back(CountMinSketch::read(in));
  for (const auto& s : sketches)
    if (!(s.config() == sketches.front().config()))
      throw FormatError("cluster statistics sketches have differing configs");

  ClusterStats out(Config{sketches.front().config(), d});
  out.sketches_ = std::move(sketches);
  out.second_ = std::move(second);
  out.n_ = n;
  out.t_last_ = t;
  out.refresh_cache();
  return out;
}

std::string ClusterStats::serialize() const {
  io::Writer w;
  write(w);
  return std::move(w).bytes();
}

ClusterStats ClusterStats::deserialize(std::string_view bytes) {
  io::Reader r(bytes);
  ClusterStats s = read(r);
  if (!r.at_end()) throw FormatError("trailing bytes after cluster statistics");
  return s;
}

ClusterStats merge(const ClusterStats& a, const ClusterStats& b) {
  ClusterStats out = a;
  out.merge(b);
  return out;
}

}  // namespace gssclu
