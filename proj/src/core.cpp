#include "hdc/core.hpp"

#include <algorithm>
#include <limits>

namespace hdc {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::kParameter: return "parameter error";
    case ErrorKind::kShape: return "shape error";
    case ErrorKind::kLabel: return "label error";
    case ErrorKind::kRange: return "range error";
    case ErrorKind::kConfig: return "configuration error";
    case ErrorKind::kIo: return "i/o error";
    case ErrorKind::kBadMagic: return "bad magic";
    case ErrorKind::kBadVersion: return "bad version";
    case ErrorKind::kTruncated: return "truncated file";
    case ErrorKind::kNormMismatch: return "norm mismatch";
    case ErrorKind::kFormat: return "format error";
  }
  return "error";
}

ShapeMeta ShapeMeta::make(std::uint32_t features, std::uint32_t dim, std::uint32_t classes) {
  if (features < 1) throw Error(ErrorKind::kParameter, "feature count J must be >= 1");
  if (dim < 1) throw Error(ErrorKind::kParameter, "dimension D must be >= 1");
  if (classes < 2) throw Error(ErrorKind::kParameter, "class count L must be >= 2");
  return ShapeMeta{features, dim, classes};
}

namespace detail {

void check_finite(std::span<const float> values, std::string_view what) {
  const auto bad = std::find_if(values.begin(), values.end(), [](float v) { return !std::isfinite(v); });
  if (bad != values.end()) {
    throw Error(ErrorKind::kParameter, std::string(what) + " has a non-finite entry at index " +
                                           std::to_string(bad - values.begin()));
  }
}

}  // namespace detail

FloatMatrix::FloatMatrix(std::size_t rows, std::size_t cols, std::vector<float> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows * cols) {
    throw Error(ErrorKind::kShape, "matrix storage holds " + std::to_string(data_.size()) +
                                       " values, expected " + std::to_string(rows * cols));
  }
}

CounterRng make_rng(Seed seed, std::uint32_t stream_label) noexcept { return CounterRng(seed, stream_label); }

double gaussian_draw(CounterRng& rng, double sigma) {
  if (!(sigma > 0.0)) throw Error(ErrorKind::kParameter, "gaussian sigma must be > 0");
  const double u1 = rng.next_uniform();
  const double u2 = rng.next_uniform();
  return sigma * standard_normal_from(u1, u2);
}

double uniform_draw(CounterRng& rng, double lo, double hi) {
  if (!(lo < hi)) throw Error(ErrorKind::kParameter, "uniform interval requires lo < hi");
  const double v = lo + (hi - lo) * rng.next_uniform();
  return v < hi ? v : std::nextafter(hi, lo);
}

std::uint64_t uniform_index(CounterRng& rng, std::uint64_t bound) {
  if (bound == 0) throw Error(ErrorKind::kParameter, "uniform_index bound must be > 0");
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t v = rng.next_u64();
  while (v >= limit) v = rng.next_u64();
  return v % bound;
}

}  // namespace hdc
