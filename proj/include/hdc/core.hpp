#pragma once

// Shared value types, error reporting and the counter-based random source used
// by every other part of the library.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace hdc {

enum class ErrorKind {
  kParameter,
  kShape,
  kLabel,
  kRange,
  kConfig,
  kIo,
  kBadMagic,
  kBadVersion,
  kTruncated,
  kNormMismatch,
  kFormat,
};

std::string_view to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

// Problem dimensions: J input features, D hypervector components, L classes.
struct ShapeMeta {
  std::uint32_t features = 1;
  std::uint32_t dim = 1;
  std::uint32_t classes = 2;

  static ShapeMeta make(std::uint32_t features, std::uint32_t dim, std::uint32_t classes);

  friend bool operator==(const ShapeMeta&, const ShapeMeta&) = default;
};

struct Seed {
  std::uint64_t value = 0;

  friend bool operator==(const Seed&, const Seed&) = default;
};

namespace detail {

void check_finite(std::span<const float> values, std::string_view what);

}  // namespace detail

// Owning, finite-checked real vector. FeatureVector and HyperVector are
// distinct instantiations so the two spaces cannot be mixed up.
template <typename Tag>
class RealVector {
 public:
  RealVector() = default;

  explicit RealVector(std::vector<float> values) : values_(std::move(values)) {
    detail::check_finite(values_, Tag::kName);
  }

  explicit RealVector(std::span<const float> values)
      : RealVector(std::vector<float>(values.begin(), values.end())) {}

  [[nodiscard]] std::size_t size() const noexcept { return values_.size(); }
  [[nodiscard]] std::span<const float> values() const noexcept { return values_; }
  [[nodiscard]] float operator[](std::size_t i) const noexcept { return values_[i]; }
  [[nodiscard]] const float* data() const noexcept { return values_.data(); }

  friend bool operator==(const RealVector&, const RealVector&) = default;

 private:
  std::vector<float> values_;
};

struct FeatureTag {
  static constexpr std::string_view kName = "feature vector";
};
struct HyperTag {
  static constexpr std::string_view kName = "hypervector";
};

using FeatureVector = RealVector<FeatureTag>;
using HyperVector = RealVector<HyperTag>;

// Dense row-major float matrix. Used for feature batches and encoded batches
// where one allocation per row would dominate the cost.
class FloatMatrix {
 public:
  FloatMatrix() = default;
  FloatMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}
  FloatMatrix(std::size_t rows, std::size_t cols, std::vector<float> data);

  [[nodiscard]] std::size_t rows() const noexcept { return rows_; }
  [[nodiscard]] std::size_t cols() const noexcept { return cols_; }
  [[nodiscard]] std::span<const float> row(std::size_t r) const noexcept {
    return {data_.data() + r * cols_, cols_};
  }
  [[nodiscard]] std::span<float> row(std::size_t r) noexcept { return {data_.data() + r * cols_, cols_}; }
  [[nodiscard]] std::span<const float> data() const noexcept { return data_; }
  [[nodiscard]] std::span<float> data() noexcept { return data_; }

  friend bool operator==(const FloatMatrix&, const FloatMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<float> data_;
};

// SplitMix64 output finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Counter-based generator. Draw k of stream (seed, label) is
// mix64(key + (k + 1) * golden) with key = mix64(mix64(seed) ^ mix64(label + golden)).
// Model files store seeds instead of bases, so this mapping is part of the
// file-format contract and must never change.
class CounterRng {
 public:
  static constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

  CounterRng(Seed seed, std::uint32_t stream) noexcept
      : key_(mix64(mix64(seed.value) ^ mix64(std::uint64_t{stream} + kGolden))) {}

  [[nodiscard]] std::uint64_t at(std::uint64_t counter) const noexcept {
    return mix64(key_ + (counter + 1) * kGolden);
  }
  // Uniform in [0, 1) with 53 random bits.
  [[nodiscard]] double uniform_at(std::uint64_t counter) const noexcept {
    return static_cast<double>(at(counter) >> 11) * 0x1.0p-53;
  }

  std::uint64_t next_u64() noexcept { return at(counter_++); }
  double next_uniform() noexcept { return uniform_at(counter_++); }

  [[nodiscard]] std::uint64_t position() const noexcept { return counter_; }
  void seek(std::uint64_t counter) noexcept { counter_ = counter; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

CounterRng make_rng(Seed seed, std::uint32_t stream_label) noexcept;

// Box-Muller on two consecutive uniforms, cosine branch only:
// sqrt(-2 ln(1 - u1)) * cos(2 pi u2).
inline double standard_normal_from(double u1, double u2) noexcept {
  constexpr double kTwoPi = 6.283185307179586476925286766559;
  return std::sqrt(-2.0 * std::log1p(-u1)) * std::cos(kTwoPi * u2);
}

double gaussian_draw(CounterRng& rng, double sigma);
double uniform_draw(CounterRng& rng, double lo, double hi);

// Uniform integer in [0, bound) by rejection; bound > 0.
std::uint64_t uniform_index(CounterRng& rng, std::uint64_t bound);

}  // namespace hdc
