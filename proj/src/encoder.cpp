#include "hdc/encoder.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "hdc/instrumentation.hpp"

namespace hdc {

namespace {

kernels::Activation activation_for(EncoderKind kind) noexcept {
  return kind == EncoderKind::kRff ? kernels::Activation::kCosine : kernels::Activation::kIdentity;
}

FloatMatrix project(const Basis& basis, const kernels::PaddedRows& xs) {
  CountScope scope(Stage::kEncode);
  FloatMatrix out(xs.rows(), basis.dim());
  record(kernels::omp::project(basis.rows(), basis.offsets(), activation_for(basis.config().kind), xs, out.data()));
  return out;
}

}  // namespace

std::string_view to_string(EncoderKind kind) noexcept { return kind == EncoderKind::kRff ? "rff" : "rp"; }

std::optional<EncoderKind> parse_encoder_kind(std::string_view text) noexcept {
  if (text == "rp" || text == "RP") return EncoderKind::kRp;
  if (text == "rff" || text == "RFF") return EncoderKind::kRff;
  return std::nullopt;
}

void EncoderConfig::validate() const {
  if (kind != EncoderKind::kRp && kind != EncoderKind::kRff) throw Error(ErrorKind::kParameter, "unknown encoder kind");
  if (dim < 1) throw Error(ErrorKind::kParameter, "dimension D must be >= 1");
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw Error(ErrorKind::kParameter, "sigma_b must be a positive finite value");
}

Basis build_basis(const EncoderConfig& config, std::uint32_t features) {
  config.validate();
  if (features < 1) throw Error(ErrorKind::kParameter, "feature count J must be >= 1");
  Basis basis;
  basis.config_ = config;
  basis.rows_ = kernels::PaddedRows(config.dim, features);
  kernels::omp::fill_gaussian(make_rng(config.seed, Basis::kCoefficientStream), config.sigma, basis.rows_);
  basis.offsets_.resize(config.dim);
  kernels::omp::fill_uniform(make_rng(config.seed, Basis::kOffsetStream), 0.0, 2.0 * std::numbers::pi,
                             basis.offsets_);
  return basis;
}

Basis make_basis(const EncoderConfig& config, std::uint32_t features, std::span<const float> coefficients,
                 std::span<const double> offsets) {
  config.validate();
  if (features < 1) throw Error(ErrorKind::kParameter, "feature count J must be >= 1");
  if (coefficients.size() != std::size_t{config.dim} * features || offsets.size() != config.dim) {
    throw Error(ErrorKind::kShape, "basis coefficients must be D x J and offsets length D");
  }
  Basis basis;
  basis.config_ = config;
  basis.rows_ = kernels::PaddedRows(config.dim, features);
  for (std::size_t i = 0; i < config.dim; ++i) {
    std::copy_n(coefficients.begin() + static_cast<std::ptrdiff_t>(i * features), features, basis.rows_.row(i));
  }
  basis.offsets_.assign(offsets.begin(), offsets.end());
  return basis;
}

HyperVector encode(const Basis& basis, const FeatureVector& x) {
  if (x.size() != basis.features()) {
    throw Error(ErrorKind::kShape, "feature vector has length " + std::to_string(x.size()) + ", basis expects " +
                                       std::to_string(basis.features()));
  }
  kernels::PaddedRows xs(1, x.size());
  std::copy(x.values().begin(), x.values().end(), xs.row(0));
  FloatMatrix h = project(basis, xs);
  return HyperVector(h.row(0));
}

std::vector<HyperVector> encode_batch(const Basis& basis, std::span<const FeatureVector> xs) {
  kernels::PaddedRows rows(xs.size(), basis.features());
  for (std::size_t r = 0; r < xs.size(); ++r) {
    if (xs[r].size() != basis.features()) {
      throw Error(ErrorKind::kShape, "row " + std::to_string(r) + " has length " + std::to_string(xs[r].size()) +
                                         ", basis expects " + std::to_string(basis.features()));
    }
    std::copy(xs[r].values().begin(), xs[r].values().end(), rows.row(r));
  }
  const FloatMatrix h = project(basis, rows);
  std::vector<HyperVector> out;
  out.reserve(xs.size());
  for (std::size_t r = 0; r < xs.size(); ++r) out.emplace_back(h.row(r));
  return out;
}

FloatMatrix encode_batch(const Basis& basis, const FloatMatrix& xs) {
  if (xs.rows() > 0 && xs.cols() != basis.features()) {
    throw Error(ErrorKind::kShape, "row 0 has length " + std::to_string(xs.cols()) + ", basis expects " +
                                       std::to_string(basis.features()));
  }
  if (xs.rows() == 0) return FloatMatrix(0, basis.dim());
  return project(basis, kernels::PaddedRows::from(xs));
}

}  // namespace hdc
