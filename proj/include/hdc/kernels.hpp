#pragma once

// Data-parallel inner loops. Every kernel exists twice: a plain serial
// reference, and an OpenMP version used on the hot path. Both produce
// bitwise-identical results because every output element is reduced in the
// same fixed lane order regardless of tiling or thread layout.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "hdc/core.hpp"
#include "hdc/instrumentation.hpp"

namespace hdc::kernels {

inline constexpr std::size_t kLanes = 16;

constexpr std::size_t padded_width(std::size_t n) noexcept { return (n + kLanes - 1) / kLanes * kLanes; }

// Row-major float rows zero-padded to a multiple of kLanes. Padding is
// never counted as work.
class PaddedRows {
 public:
  PaddedRows() = default;
  PaddedRows(std::size_t rows, std::size_t width)
      : rows_(rows), width_(width), stride_(padded_width(width)), data_(rows * stride_, 0.0f) {}

  static PaddedRows from(const FloatMatrix& m);

  [[nodiscard]] std::size_t rows() const noexcept { return rows_; }
  [[nodiscard]] std::size_t width() const noexcept { return width_; }
  [[nodiscard]] std::size_t stride() const noexcept { return stride_; }
  [[nodiscard]] const float* row(std::size_t r) const noexcept { return data_.data() + r * stride_; }
  [[nodiscard]] float* row(std::size_t r) noexcept { return data_.data() + r * stride_; }
  [[nodiscard]] std::span<const float> logical_row(std::size_t r) const noexcept { return {row(r), width_}; }

  friend bool operator==(const PaddedRows&, const PaddedRows&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t width_ = 0;
  std::size_t stride_ = 0;
  std::vector<float> data_;
};

// Fixed-order dot product over padded rows: kLanes fused accumulators, then
// a pairwise lane reduction.
float dot_lanes(const float* a, const float* b, std::size_t stride) noexcept;

// Dot of a double accumulator row with a float hypervector, 8 fixed lanes.
double dot_mixed(const double* c, const float* h, std::size_t n) noexcept;
double sum_squares(const double* c, std::size_t n) noexcept;
double sum_squares(const float* h, std::size_t n) noexcept;

enum class Activation : std::uint8_t { kIdentity, kCosine };

// out[s * basis.rows() + i] = act(dot(xs[s], basis[i]) + offsets[i]); the
// offset is only applied under kCosine. Returns the operations executed.
namespace serial {
OpCounter project(const PaddedRows& basis, std::span<const double> offsets, Activation act, const PaddedRows& xs,
                  std::span<float> out);
void fill_gaussian(const CounterRng& rng, double sigma, PaddedRows& rows);
void fill_uniform(const CounterRng& rng, double lo, double hi, std::span<double> out);
OpCounter similarities(std::span<const double> prototypes, std::size_t classes, std::size_t dim,
                       std::span<const float> queries, std::span<double> dots, std::span<double> query_norms);
}  // namespace serial

namespace omp {
OpCounter project(const PaddedRows& basis, std::span<const double> offsets, Activation act, const PaddedRows& xs,
                  std::span<float> out);
void fill_gaussian(const CounterRng& rng, double sigma, PaddedRows& rows);
void fill_uniform(const CounterRng& rng, double lo, double hi, std::span<double> out);
OpCounter similarities(std::span<const double> prototypes, std::size_t classes, std::size_t dim,
                       std::span<const float> queries, std::span<double> dots, std::span<double> query_norms);
}  // namespace omp

int max_threads() noexcept;

}  // namespace hdc::kernels
