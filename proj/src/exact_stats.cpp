#include "gssclu/exact_stats.hpp"

#include <algorithm>

#include "gssclu/detail/expansion.hpp"
#include "gssclu/errors.hpp"

namespace gssclu {
namespace {

constexpr std::string_view kExactMagic = "GSEX";
constexpr std::uint32_t kExactVersion = 1;

double lookup(const AttributeMap& m, std::string_view key) {
  const auto it = m.find(key);
  return it == m.end() ? 0.0 : it->second;
}

// Sum over keys of a[k] * b[k], walked in key order so the result does not
// depend on argument order.
double sorted_dot(const AttributeMap& a, const AttributeMap& b) {
  double sum = 0.0;
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() && ib != b.end()) {
    if (ia->first < ib->first) {
      ++ia;
    } else if (ib->first < ia->first) {
      ++ib;
    } else {
      sum += ia->second * ib->second;
      ++ia;
      ++ib;
    }
  }
  return sum;
}

void write_map(io::Writer& out, const AttributeMap& m) {
  out.u64(m.size());
  for (const auto& [k, v] : m) {
    out.str(k);
    out.f64(v);
  }
}

AttributeMap read_map(io::Reader& in) {
  AttributeMap m;
  const std::uint64_t size = in.u64();
  for (std::uint64_t i = 0; i < size; ++i) {
    std::string k = in.str();
    m.emplace(std::move(k), in.f64());
  }
  return m;
}

}  // namespace

ExactClusterStats::ExactClusterStats(const Config& config)
    : config_(config),
      totals_(config.d + 1),
      second_(config.d + 1, 0.0),
      self_(config.d + 1, 0.0) {}

ExactClusterStats ExactClusterStats::singleton(const PreparedGraph& g, Timestamp now,
                                               const Config& config) {
  ExactClusterStats s(config);
  s.absorb(g, now);
  return s;
}

void ExactClusterStats::absorb(const PreparedGraph& g, Timestamp now) {
  if (g.components() != components())
    throw SchemaMismatch("graph has " + std::to_string(g.components() - 1) +
                         " side types, cluster statistics expect " + std::to_string(d()));
  Member member;
  if (config_.retain_members) member.resize(components());
  for (std::size_t c = 0; c < components(); ++c) {
    for (const auto& f : g.features(c)) {
      if (f.value == 0.0) continue;
      totals_[c][f.key] += f.value;
      if (config_.retain_members) member[c][f.key] += f.value;
    }
    second_[c] += g.sum_sq(c);
  }
  if (config_.retain_members) members_.push_back(std::move(member));
  ++n_;
  t_last_ = std::max(t_last_, now);
  refresh_cache();
}

void ExactClusterStats::merge(const ExactClusterStats& other) {
  if (!(config_ == other.config_))
    throw ConfigMismatch("exact statistics merge requires identical configs");
  for (std::size_t c = 0; c < components(); ++c) {
    for (const auto& [k, v] : other.totals_[c]) totals_[c][k] += v;
    second_[c] += other.second_[c];
  }
  members_.insert(members_.end(), other.members_.begin(), other.members_.end());
  n_ += other.n_;
  t_last_ = std::max(t_last_, other.t_last_);
  refresh_cache();
}

void ExactClusterStats::refresh_cache() {
  for (std::size_t c = 0; c < components(); ++c) {
    double sum = 0.0;
    for (const auto& [k, v] : totals_[c]) sum += v * v;
    self_[c] = sum;
  }
}

void ExactClusterStats::write(io::Writer& out) const {
  out.magic(kExactMagic);
  out.u32(kExactVersion);
  out.u32(static_cast<std::uint32_t>(d()));
  out.u8(config_.retain_members ? 1 : 0);
  out.u64(n_);
  out.u64(t_last_);
  for (double v : second_) out.f64(v);
  for (const auto& m : totals_) write_map(out, m);
  if (config_.retain_members) {
    out.u64(members_.size());
    for (const auto& member : members_)
      for (const auto& m : member) write_map(out, m);
  }
}

ExactClusterStats ExactClusterStats::read(io::Reader& in) {
  in.expect_magic(kExactMagic);
  const std::uint32_t version = in.u32();
  if (version != kExactVersion)
    throw FormatError("unsupported exact statistics version " + std::to_string(version));
  Config config;
  config.d = in.u32();
  config.retain_members = in.u8() != 0;
  ExactClusterStats out(config);
  out.n_ = in.u64();
  out.t_last_ = in.u64();
  for (double& v : out.second_) v = in.f64();
  for (auto& m : out.totals_) m = read_map(in);
  if (config.retain_members) {
    const std::uint64_t count = in.u64();
    for (std::uint64_t i = 0; i < count; ++i) {
      Member member(config.d + 1);
      for (auto& m : member) m = read_map(in);
      out.members_.push_back(std::move(member));
    }
  }
  out.refresh_cache();
  return out;
}

std::string ExactClusterStats::serialize() const {
  io::Writer w;
  write(w);
  return std::move(w).bytes();
}

ExactClusterStats ExactClusterStats::deserialize(std::string_view bytes) {
  io::Reader r(bytes);
  ExactClusterStats s = read(r);
  if (!r.at_end()) throw FormatError("trailing bytes after exact statistics");
  return s;
}

ExactClusterStats merge(const ExactClusterStats& a, const ExactClusterStats& b) {
  ExactClusterStats out = a;
  out.merge(b);
  return out;
}

double component_distance_sq(const PreparedGraph& g, const ExactClusterStats& c,
                             std::size_t component) {
  detail::check_cluster(c.count(), component, c.components());
  if (g.components() != c.components())
    throw SchemaMismatch("graph and cluster statistics disagree on the number of side types");
  const AttributeMap& totals = c.totals(component);
  double cross = 0.0;
  for (const auto& f : g.features(component)) cross += f.value * lookup(totals, f.key);
  return detail::expand_point_distance(g.sum_sq(component), cross, c.self_product(component),
                                       static_cast<double>(c.count()));
}

double intra_distance_sq(const ExactClusterStats& c, std::size_t component) {
  detail::check_cluster(c.count(), component, c.components());
  return detail::expand_intra(c.second_moment(component), c.self_product(component),
                              static_cast<double>(c.count()));
}

double inter_distance_sq(const ExactClusterStats& a, const ExactClusterStats& b,
                         std::size_t component) {
  detail::check_cluster(a.count(), component, a.components());
  detail::check_cluster(b.count(), component, b.components());
  if (a.components() != b.components())
    throw ConfigMismatch("exact statistics disagree on the number of side types");
  const double cross = sorted_dot(a.totals(component), b.totals(component));
  return detail::expand_inter(a.self_product(component), static_cast<double>(a.count()),
                              b.self_product(component), static_cast<double>(b.count()), cross);
}

double direct_component_distance_sq(const PreparedGraph& g, const ExactClusterStats& c,
                                    std::size_t component) {
  detail::check_cluster(c.count(), component, c.components());
  const double n = static_cast<double>(c.count());
  AttributeMap graph;
  for (const auto& f : g.features(component)) graph[f.key] += f.value;
  const AttributeMap& totals = c.totals(component);

  double sum = 0.0;
  for (const auto& [key, v] : graph) {
    const double diff = v - lookup(totals, key) / n;
    sum += diff * diff;
  }
  for (const auto& [key, h] : totals) {
    if (graph.contains(key)) continue;
    const double centroid = h / n;
    sum += centroid * centroid;
  }
  return sum;
}

double direct_inter_distance_sq(const ExactClusterStats& a, const ExactClusterStats& b,
                                std::size_t component) {
  detail::check_cluster(a.count(), component, a.components());
  detail::check_cluster(b.count(), component, b.components());
  const double na = static_cast<double>(a.count());
  const double nb = static_cast<double>(b.count());
  const AttributeMap& ta = a.totals(component);
  const AttributeMap& tb = b.totals(component);
  double sum = 0.0;
  for (const auto& [key, v] : ta) {
    const double diff = v / na - lookup(tb, key) / nb;
    sum += diff * diff;
  }
  for (const auto& [key, v] : tb) {
    if (ta.contains(key)) continue;
    sum += (v / nb) * (v / nb);
  }
  return sum;
}

double member_intra_distance_sq(const ExactClusterStats& c, std::size_t component) {
  detail::check_cluster(c.count(), component, c.components());
  if (!c.config().retain_members || c.members().size() != c.count())
    throw InvalidArgument("member_intra_distance_sq requires retained members");
  const double n = static_cast<double>(c.count());
  const AttributeMap& totals = c.totals(component);
  double sum = 0.0;
  for (const auto& member : c.members()) {
    const AttributeMap& g = member[component];
    for (const auto& [key, h] : totals) {
      const double diff = lookup(g, key) - h / n;
      sum += diff * diff;
    }
  }
  return sum;
}

}  // namespace gssclu
