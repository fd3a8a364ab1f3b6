#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gssclu/binary_io.hpp"

namespace gssclu {

// Shape and hash seed of a Count-Min sketch. Sketches combine (merge, inner
// product) only when their configs are identical.
struct SketchConfig {
  std::uint32_t rows = 10;
  std::uint32_t cols = 500;
  std::uint64_t seed = 0;

  // rows = ceil(ln(1/delta)), cols = ceil(e/epsilon).
  static SketchConfig from_accuracy(double epsilon, double delta, std::uint64_t seed);

  // Throws InvalidArgument unless rows >= 1 and cols >= 2.
  void validate() const;

  // Additive overestimate factor of a point query: e / cols.
  double epsilon() const;
  // Failure probability of the epsilon bound: exp(-rows).
  double delta() const;

  friend bool operator==(const SketchConfig&, const SketchConfig&) = default;
};

// Row hash family: a 64-bit key digest followed by a seeded multiply-add per
// row, range-reduced onto [0, cols) from the high bits.
class SketchHasher {
 public:
  explicit SketchHasher(const SketchConfig& config);

  static std::uint64_t digest(std::string_view key);

  std::uint32_t column(std::uint32_t row, std::uint64_t digest) const {
    const std::uint64_t mixed = coeffs_[row].mul * digest + coeffs_[row].add;
    return static_cast<std::uint32_t>(
        (static_cast<unsigned __int128>(mixed) * cols_) >> 64);
  }

  // Writes the flat cell index (row * cols + column) of key for every row.
  void locate(std::string_view key, std::span<std::uint32_t> out) const;

  std::uint32_t rows() const { return config_.rows; }
  std::uint32_t cols() const { return cols_; }
  const SketchConfig& config() const { return config_; }

 private:
  struct Coeff {
    std::uint64_t mul;
    std::uint64_t add;
  };
  SketchConfig config_;
  std::vector<Coeff> coeffs_;
  std::uint32_t cols_;
};

// Count-Min sketch over nonnegative real counters, with point, self
// inner-product and cross inner-product estimators. Every estimator returns
// the minimum over rows, which can only overestimate the exact quantity.
class CountMinSketch {
 public:
  explicit CountMinSketch(const SketchConfig& config);

  const SketchConfig& config() const { return config_; }
  const SketchHasher& hasher() const { return hasher_; }

  // Throws InvalidArgument on a negative (or NaN) value.
  void update(std::string_view key, double value);
  // Same as update() with cell indices already computed by hasher().locate().
  void update_at(std::span<const std::uint32_t> cells, double value);

  double estimate(std::string_view key) const;
  double estimate_at(std::span<const std::uint32_t> cells) const;

  double self_inner_product() const;
  // Throws ConfigMismatch unless configs are identical.
  double inner_product(const CountMinSketch& other) const;

  // Cell-wise addition. Throws ConfigMismatch unless configs are identical.
  void merge(const CountMinSketch& other);

  double cell(std::uint32_t row, std::uint32_t col) const {
    return cells_[static_cast<std::size_t>(row) * config_.cols + col];
  }
  std::span<const double> cells() const { return cells_; }
  // Sum of one row; equal across rows up to rounding.
  double row_total(std::uint32_t row) const;

  void write(io::Writer& out) const;
  static CountMinSketch read(io::Reader& in);
  std::string serialize() const;
  static CountMinSketch deserialize(std::string_view bytes);

  // Exact equality of config and every cell.
  friend bool operator==(const CountMinSketch& a, const CountMinSketch& b) {
    return a.config_ == b.config_ && a.cells_ == b.cells_;
  }

 private:
  void require_compatible(const CountMinSketch& other, const char* op) const;

  SketchConfig config_;
  SketchHasher hasher_;
  std::vector<double> cells_;
};

CountMinSketch merge(const CountMinSketch& a, const CountMinSketch& b);

}  // namespace gssclu
