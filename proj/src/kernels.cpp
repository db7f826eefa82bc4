#include "hdc/kernels.hpp"

#include <algorithm>
#include <cmath>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace hdc::kernels {

namespace {

constexpr std::size_t kTileRows = 4;
constexpr std::size_t kTileSamples = 4;
constexpr std::size_t kSampleChunk = 64;
constexpr std::size_t kRowPanel = 512;
constexpr std::size_t kMixedLanes = 8;

template <typename T, std::size_t N>
inline T reduce_pairwise(T (&acc)[N]) noexcept {
  for (std::size_t width = N / 2; width >= 1; width /= 2) {
    for (std::size_t l = 0; l < width; ++l) acc[l] += acc[l + width];
  }
  return acc[0];
}

inline float activate(float linear, Activation act, double offset) noexcept {
  if (act == Activation::kIdentity) return linear;
  return static_cast<float>(std::cos(static_cast<double>(linear) + offset));
}

// 4 basis rows x 4 samples, each entry accumulated exactly like dot_lanes.
inline void tile_4x4(const float* b, std::size_t b_stride, const float* x, std::size_t x_stride, std::size_t len,
                     float out[kTileRows][kTileSamples]) noexcept {
  float acc[kTileRows][kTileSamples][kLanes] = {};
  for (std::size_t j = 0; j < len; j += kLanes) {
#pragma GCC unroll 4
    for (std::size_t r = 0; r < kTileRows; ++r) {
      const float* br = b + r * b_stride + j;
#pragma GCC unroll 4
      for (std::size_t s = 0; s < kTileSamples; ++s) {
        const float* xs = x + s * x_stride + j;
#pragma omp simd
        for (std::size_t l = 0; l < kLanes; ++l) acc[r][s][l] = std::fma(br[l], xs[l], acc[r][s][l]);
      }
    }
  }
  for (std::size_t r = 0; r < kTileRows; ++r) {
    for (std::size_t s = 0; s < kTileSamples; ++s) out[r][s] = reduce_pairwise(acc[r][s]);
  }
}

// Rows [r_begin, r_end) x samples [s_begin, s_end) of the projection.
OpCounter project_block(const PaddedRows& basis, std::span<const double> offsets, Activation act,
                        const PaddedRows& xs, std::span<float> out, std::size_t r_begin, std::size_t r_end,
                        std::size_t s_begin, std::size_t s_end) noexcept {
  const std::size_t dim = basis.rows();
  const std::size_t stride = basis.stride();
  OpCounter ops;
  std::size_t r = r_begin;
  for (; r + kTileRows <= r_end; r += kTileRows) {
    std::size_t s = s_begin;
    for (; s + kTileSamples <= s_end; s += kTileSamples) {
      float tile[kTileRows][kTileSamples];
      tile_4x4(basis.row(r), stride, xs.row(s), xs.stride(), stride, tile);
      for (std::size_t tr = 0; tr < kTileRows; ++tr) {
        const double off = act == Activation::kCosine ? offsets[r + tr] : 0.0;
        for (std::size_t ts = 0; ts < kTileSamples; ++ts) {
          out[(s + ts) * dim + r + tr] = activate(tile[tr][ts], act, off);
        }
      }
    }
    for (; s < s_end; ++s) {
      for (std::size_t tr = 0; tr < kTileRows; ++tr) {
        const double off = act == Activation::kCosine ? offsets[r + tr] : 0.0;
        out[s * dim + r + tr] = activate(dot_lanes(basis.row(r + tr), xs.row(s), stride), act, off);
      }
    }
  }
  for (; r < r_end; ++r) {
    const double off = act == Activation::kCosine ? offsets[r] : 0.0;
    for (std::size_t s = s_begin; s < s_end; ++s) {
      out[s * dim + r] = activate(dot_lanes(basis.row(r), xs.row(s), stride), act, off);
    }
  }
  const std::uint64_t dots = static_cast<std::uint64_t>(r_end - r_begin) * (s_end - s_begin);
  ops.mul_add = dots * basis.width();
  if (act == Activation::kCosine) ops.activation = dots;
  return ops;
}

void check_project_shapes(const PaddedRows& basis, std::span<const double> offsets, Activation act,
                          const PaddedRows& xs, std::span<float> out) {
  if (xs.width() != basis.width()) {
    throw Error(ErrorKind::kShape, "input width " + std::to_string(xs.width()) + " does not match basis width " +
                                       std::to_string(basis.width()));
  }
  if (out.size() != xs.rows() * basis.rows()) throw Error(ErrorKind::kShape, "projection output size mismatch");
  if (act == Activation::kCosine && offsets.size() != basis.rows()) {
    throw Error(ErrorKind::kShape, "offset vector length does not match basis rows");
  }
}

inline float gaussian_entry(const CounterRng& rng, double sigma, std::uint64_t k) noexcept {
  return static_cast<float>(sigma * standard_normal_from(rng.uniform_at(2 * k), rng.uniform_at(2 * k + 1)));
}

inline double uniform_entry(const CounterRng& rng, double lo, double hi, std::uint64_t k) noexcept {
  const double v = lo + (hi - lo) * rng.uniform_at(k);
  return v < hi ? v : std::nextafter(hi, lo);
}

void similarity_row(std::span<const double> prototypes, std::size_t classes, std::size_t dim, const float* h,
                    double* dots, double& norm) noexcept {
  for (std::size_t l = 0; l < classes; ++l) dots[l] = dot_mixed(prototypes.data() + l * dim, h, dim);
  norm = std::sqrt(sum_squares(h, dim));
}

OpCounter similarity_ops(std::size_t queries, std::size_t classes, std::size_t dim) noexcept {
  OpCounter ops;
  ops.mul_add = static_cast<std::uint64_t>(queries) * classes * dim;
  ops.norm_ops = static_cast<std::uint64_t>(queries) * (dim + 1);
  return ops;
}

void check_similarity_shapes(std::span<const double> prototypes, std::size_t classes, std::size_t dim,
                             std::span<const float> queries, std::span<double> dots, std::span<double> norms) {
  if (dim == 0 || prototypes.size() != classes * dim || queries.size() % dim != 0) {
    throw Error(ErrorKind::kShape, "similarity operands do not share dimension");
  }
  const std::size_t q = queries.size() / dim;
  if (dots.size() != q * classes || norms.size() != q) throw Error(ErrorKind::kShape, "similarity output size");
}

}  // namespace

PaddedRows PaddedRows::from(const FloatMatrix& m) {
  PaddedRows rows(m.rows(), m.cols());
  for (std::size_t r = 0; r < m.rows(); ++r) std::copy(m.row(r).begin(), m.row(r).end(), rows.row(r));
  return rows;
}

float dot_lanes(const float* a, const float* b, std::size_t stride) noexcept {
  float acc[kLanes] = {};
  for (std::size_t j = 0; j < stride; j += kLanes) {
#pragma omp simd
    for (std::size_t l = 0; l < kLanes; ++l) acc[l] = std::fma(a[j + l], b[j + l], acc[l]);
  }
  return reduce_pairwise(acc);
}

double dot_mixed(const double* c, const float* h, std::size_t n) noexcept {
  double acc[kMixedLanes] = {};
  std::size_t j = 0;
  for (; j + kMixedLanes <= n; j += kMixedLanes) {
#pragma omp simd
    for (std::size_t l = 0; l < kMixedLanes; ++l) acc[l] = std::fma(c[j + l], static_cast<double>(h[j + l]), acc[l]);
  }
  for (std::size_t l = 0; j < n; ++j, ++l) acc[l] = std::fma(c[j], static_cast<double>(h[j]), acc[l]);
  return reduce_pairwise(acc);
}

double sum_squares(const double* c, std::size_t n) noexcept {
  double acc[kMixedLanes] = {};
  std::size_t j = 0;
  for (; j + kMixedLanes <= n; j += kMixedLanes) {
#pragma omp simd
    for (std::size_t l = 0; l < kMixedLanes; ++l) acc[l] = std::fma(c[j + l], c[j + l], acc[l]);
  }
  for (std::size_t l = 0; j < n; ++j, ++l) acc[l] = std::fma(c[j], c[j], acc[l]);
  return reduce_pairwise(acc);
}

double sum_squares(const float* h, std::size_t n) noexcept {
  double acc[kMixedLanes] = {};
  std::size_t j = 0;
  for (; j + kMixedLanes <= n; j += kMixedLanes) {
#pragma omp simd
    for (std::size_t l = 0; l < kMixedLanes; ++l) {
      const double v = h[j + l];
      acc[l] = std::fma(v, v, acc[l]);
    }
  }
  for (std::size_t l = 0; j < n; ++j, ++l) {
    const double v = h[j];
    acc[l] = std::fma(v, v, acc[l]);
  }
  return reduce_pairwise(acc);
}

int max_threads() noexcept {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

namespace serial {

OpCounter project(const PaddedRows& basis, std::span<const double> offsets, Activation act, const PaddedRows& xs,
                  std::span<float> out) {
  check_project_shapes(basis, offsets, act, xs, out);
  const std::size_t dim = basis.rows();
  OpCounter ops;
  for (std::size_t s = 0; s < xs.rows(); ++s) {
    for (std::size_t i = 0; i < dim; ++i) {
      const float linear = dot_lanes(basis.row(i), xs.row(s), basis.stride());
      ops.mul_add += basis.width();
      if (act == Activation::kCosine) {
        out[s * dim + i] = activate(linear, act, offsets[i]);
        ++ops.activation;
      } else {
        out[s * dim + i] = linear;
      }
    }
  }
  return ops;
}

void fill_gaussian(const CounterRng& rng, double sigma, PaddedRows& rows) {
  if (!(sigma > 0.0)) throw Error(ErrorKind::kParameter, "gaussian sigma must be > 0");
  const std::size_t width = rows.width();
  for (std::size_t r = 0; r < rows.rows(); ++r) {
    float* dst = rows.row(r);
    for (std::size_t j = 0; j < width; ++j) dst[j] = gaussian_entry(rng, sigma, r * width + j);
  }
}

void fill_uniform(const CounterRng& rng, double lo, double hi, std::span<double> out) {
  if (!(lo < hi)) throw Error(ErrorKind::kParameter, "uniform interval requires lo < hi");
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = uniform_entry(rng, lo, hi, k);
}

OpCounter similarities(std::span<const double> prototypes, std::size_t classes, std::size_t dim,
                       std::span<const float> queries, std::span<double> dots, std::span<double> query_norms) {
  check_similarity_shapes(prototypes, classes, dim, queries, dots, query_norms);
  const std::size_t q = queries.size() / dim;
  for (std::size_t i = 0; i < q; ++i) {
    similarity_row(prototypes, classes, dim, queries.data() + i * dim, dots.data() + i * classes, query_norms[i]);
  }
  return similarity_ops(q, classes, dim);
}

}  // namespace serial

namespace omp {

OpCounter project(const PaddedRows& basis, std::span<const double> offsets, Activation act, const PaddedRows& xs,
                  std::span<float> out) {
  check_project_shapes(basis, offsets, act, xs, out);
  const std::size_t dim = basis.rows();
  const std::size_t n = xs.rows();
  const auto chunks = static_cast<std::int64_t>((n + kSampleChunk - 1) / kSampleChunk);
  const auto panels = static_cast<std::int64_t>((dim + kRowPanel - 1) / kRowPanel);
  OpCounter total;
#pragma omp parallel
  {
    OpCounter local;
#pragma omp for collapse(2) schedule(static)
    for (std::int64_t c = 0; c < chunks; ++c) {
      for (std::int64_t p = 0; p < panels; ++p) {
        const std::size_t s0 = static_cast<std::size_t>(c) * kSampleChunk;
        const std::size_t r0 = static_cast<std::size_t>(p) * kRowPanel;
        local += project_block(basis, offsets, act, xs, out, r0, std::min(dim, r0 + kRowPanel), s0,
                               std::min(n, s0 + kSampleChunk));
      }
    }
#pragma omp critical(hdc_project_merge)
    total += local;
  }
  return total;
}

void fill_gaussian(const CounterRng& rng, double sigma, PaddedRows& rows) {
  if (!(sigma > 0.0)) throw Error(ErrorKind::kParameter, "gaussian sigma must be > 0");
  const std::size_t width = rows.width();
  const auto n = static_cast<std::int64_t>(rows.rows());
#pragma omp parallel for schedule(static)
  for (std::int64_t r = 0; r < n; ++r) {
    float* dst = rows.row(static_cast<std::size_t>(r));
    const std::size_t base = static_cast<std::size_t>(r) * width;
    for (std::size_t j = 0; j < width; ++j) dst[j] = gaussian_entry(rng, sigma, base + j);
  }
}

void fill_uniform(const CounterRng& rng, double lo, double hi, std::span<double> out) {
  if (!(lo < hi)) throw Error(ErrorKind::kParameter, "uniform interval requires lo < hi");
  const auto n = static_cast<std::int64_t>(out.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t k = 0; k < n; ++k) {
    out[static_cast<std::size_t>(k)] = uniform_entry(rng, lo, hi, static_cast<std::uint64_t>(k));
  }
}

OpCounter similarities(std::span<const double> prototypes, std::size_t classes, std::size_t dim,
                       std::span<const float> queries, std::span<double> dots, std::span<double> query_norms) {
  check_similarity_shapes(prototypes, classes, dim, queries, dots, query_norms);
  const auto q = static_cast<std::int64_t>(queries.size() / dim);
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < q; ++i) {
    const auto row = static_cast<std::size_t>(i);
    similarity_row(prototypes, classes, dim, queries.data() + row * dim, dots.data() + row * classes,
                   query_norms[row]);
  }
  return similarity_ops(static_cast<std::size_t>(q), classes, dim);
}

}  // namespace omp

}  // namespace hdc::kernels
