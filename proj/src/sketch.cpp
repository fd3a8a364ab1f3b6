#include "gssclu/sketch.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "gssclu/errors.hpp"

namespace gssclu {
namespace {

constexpr std::string_view kSketchMagic = "GSCM";
constexpr std::uint32_t kSketchVersion = 1;

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

SketchConfig SketchConfig::from_accuracy(double epsilon, double delta, std::uint64_t seed) {
  if (!(epsilon > 0.0) || !(delta > 0.0 && delta < 1.0))
    throw InvalidArgument("sketch accuracy requires epsilon > 0 and 0 < delta < 1");
  SketchConfig c;
  c.rows = static_cast<std::uint32_t>(std::max(1.0, std::ceil(std::log(1.0 / delta))));
  c.cols = static_cast<std::uint32_t>(std::max(2.0, std::ceil(std::numbers::e / epsilon)));
  c.seed = seed;
  return c;
}

void SketchConfig::validate() const {
  if (rows < 1) throw InvalidArgument("sketch rows must be >= 1");
  if (cols < 2) throw InvalidArgument("sketch cols must be >= 2");
}

double SketchConfig::epsilon() const { return std::numbers::e / cols; }
double SketchConfig::delta() const { return std::exp(-static_cast<double>(rows)); }

SketchHasher::SketchHasher(const SketchConfig& config) : config_(config), cols_(config.cols) {
  config.validate();
  std::uint64_t state = config.seed;
  coeffs_.reserve(config.rows);
  for (std::uint32_t r = 0; r < config.rows; ++r) {
    const std::uint64_t mul = splitmix64(state) | 1ULL;
    const std::uint64_t add = splitmix64(state);
    coeffs_.push_back({mul, add});
  }
}

std::uint64_t SketchHasher::digest(std::string_view key) {
  // FNV-1a, then a splitmix finalizer to spread low-entropy keys.
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : key) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return splitmix64(h);
}

void SketchHasher::locate(std::string_view key, std::span<std::uint32_t> out) const {
  const std::uint64_t d = digest(key);
  for (std::uint32_t r = 0; r < rows(); ++r) out[r] = r * cols_ + column(r, d);
}

CountMinSketch::CountMinSketch(const SketchConfig& config)
    : config_(config),
      hasher_(config),
      cells_(static_cast<std::size_t>(config.rows) * config.cols, 0.0) {}

void CountMinSketch::update(std::string_view key, double value) {
  std::vector<std::uint32_t> cells(config_.rows);
  hasher_.locate(key, cells);
  update_at(cells, value);
}

void CountMinSketch::update_at(std::span<const std::uint32_t> cells, double value) {
  if (!(value >= 0.0)) throw InvalidArgument("sketch update value must be nonnegative");
  if (value == 0.0) return;
  for (std::uint32_t idx : cells) cells_[idx] += value;
}

double CountMinSketch::estimate(std::string_view key) const {
  std::vector<std::uint32_t> cells(config_.rows);
  hasher_.locate(key, cells);
  return estimate_at(cells);
}

double CountMinSketch::estimate_at(std::span<const std::uint32_t> cells) const {
  double best = std::numeric_limits<double>::infinity();
  for (std::uint32_t idx : cells) best = std::min(best, cells_[idx]);
  return best;
}

double CountMinSketch::self_inner_product() const {
  double best = std::numeric_limits<double>::infinity();
  const double* row = cells_.data();
  for (std::uint32_t r = 0; r < config_.rows; ++r, row += config_.cols) {
    double sum = 0.0;
    for (std::uint32_t c = 0; c < config_.cols; ++c) sum += row[c] * row[c];
    best = std::min(best, sum);
  }
  return best;
}

double CountMinSketch::inner_product(const CountMinSketch& other) const {
  require_compatible(other, "inner_product");
  double best = std::numeric_limits<double>::infinity();
  const double* a = cells_.data();
  const double* b = other.cells_.data();
  for (std::uint32_t r = 0; r < config_.rows; ++r, a += config_.cols, b += config_.cols) {
    double sum = 0.0;
    for (std::uint32_t c = 0; c < config_.cols; ++c) sum += a[c] * b[c];
    best = std::min(best, sum);
  }
  return best;
}

void CountMinSketch::merge(const CountMinSketch& other) {
  require_compatible(other, "merge");
  for (std::size_t i = 0; i < cells_.size(); ++i) cells_[i] += other.cells_[i];
}

double CountMinSketch::row_total(std::uint32_t row) const {
  double sum = 0.0;
  for (std::uint32_t c = 0; c < config_.cols; ++c) sum += cell(row, c);
  return sum;
}

void CountMinSketch::require_compatible(const CountMinSketch& other, const char* op) const {
  if (!(config_ == other.config_))
    throw ConfigMismatch(std::string("sketch ") + op + " requires identical configs");
}

void CountMinSketch::write(io::Writer& out) const {
  out.magic(kSketchMagic);
  out.u32(kSketchVersion);
  out.u32(config_.rows);
  out.u32(config_.cols);
  out.u64(config_.seed);
  for (double v : cells_) out.f64(v);
}

CountMinSketch CountMinSketch::read(io::Reader& in) {
  in.expect_magic(kSketchMagic);
  const std::uint32_t version = in.u32();
  if (version != kSketchVersion)
    throw FormatError("unsupported sketch version " + std::to_string(version));
  SketchConfig config;
  config.rows = in.u32();
  config.cols = in.u32();
  config.seed = in.u64();
  try {
    config.validate();
  } catch (const InvalidArgument& e) {
    throw FormatError(e.what());
  }
  CountMinSketch s(config);
  for (double& v : s.cells_) {
    v = in.f64();
    if (!(v >= 0.0)) throw FormatError("negative or NaN sketch cell");
  }
  return s;
}

std::string CountMinSketch::serialize() const {
  io::Writer w;
  write(w);
  return std::move(w).bytes();
}

CountMinSketch CountMinSketch::deserialize(std::string_view bytes) {
  io::Reader r(bytes);
  CountMinSketch s = read(r);
  if (!r.at_end()) throw FormatError("trailing bytes after sketch");
  return s;
}

CountMinSketch merge(const CountMinSketch& a, const CountMinSketch& b) {
  CountMinSketch out = a;
  out.merge(b);
  return out;
}

}  // namespace gssclu
