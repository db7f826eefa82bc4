#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "hdc/core.hpp"
#include "hdc/kernels.hpp"

namespace hdc {

enum class EncoderKind : std::uint8_t { kRp = 0, kRff = 1 };

std::string_view to_string(EncoderKind kind) noexcept;
std::optional<EncoderKind> parse_encoder_kind(std::string_view text) noexcept;

struct EncoderConfig {
  EncoderKind kind = EncoderKind::kRp;
  std::uint32_t dim = 1;
  double sigma = 1.0;  // standard deviation of basis entries
  Seed seed;

  void validate() const;

  friend bool operator==(const EncoderConfig&, const EncoderConfig&) = default;
};

// Random basis: D rows of J Gaussian coefficients (stream label 0) and D
// uniform offsets in [0, 2pi) (stream label 1). Offsets are generated for
// both kinds so switching kind never changes the coefficients.
class Basis {
 public:
  static constexpr std::uint32_t kCoefficientStream = 0;
  static constexpr std::uint32_t kOffsetStream = 1;

  [[nodiscard]] const EncoderConfig& config() const noexcept { return config_; }
  [[nodiscard]] std::uint32_t features() const noexcept { return static_cast<std::uint32_t>(rows_.width()); }
  [[nodiscard]] std::uint32_t dim() const noexcept { return config_.dim; }
  [[nodiscard]] std::span<const float> row(std::size_t i) const noexcept { return rows_.logical_row(i); }
  [[nodiscard]] const kernels::PaddedRows& rows() const noexcept { return rows_; }
  [[nodiscard]] std::span<const double> offsets() const noexcept { return offsets_; }

  friend bool operator==(const Basis&, const Basis&) = default;

 private:
  friend Basis build_basis(const EncoderConfig& config, std::uint32_t features);
  friend Basis make_basis(const EncoderConfig&, std::uint32_t, std::span<const float>, std::span<const double>);

  EncoderConfig config_;
  kernels::PaddedRows rows_;
  std::vector<double> offsets_;
};

Basis build_basis(const EncoderConfig& config, std::uint32_t features);

// Basis from explicit coefficients (row-major D x J) and offsets; for
// hand-built cases and tests.
Basis make_basis(const EncoderConfig& config, std::uint32_t features, std::span<const float> coefficients,
                 std::span<const double> offsets);

// RP: h_i = x . B_i. RFF: h_i = cos(x . B_i + u_i). Counts J*D multiply-adds
// (plus D activations for RFF) under an encode scope.
HyperVector encode(const Basis& basis, const FeatureVector& x);

std::vector<HyperVector> encode_batch(const Basis& basis, std::span<const FeatureVector> xs);

// Matrix form of encode_batch: N x J features in, N x D hypervectors out.
FloatMatrix encode_batch(const Basis& basis, const FloatMatrix& xs);

}  // namespace hdc
