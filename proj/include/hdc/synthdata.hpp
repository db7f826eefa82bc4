#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "hdc/core.hpp"

namespace hdc {

struct Dataset {
  FloatMatrix features;  // N x J
  std::vector<std::uint32_t> labels;
  std::uint32_t classes = 2;
  std::string provenance;

  [[nodiscard]] std::size_t size() const noexcept { return labels.size(); }
  [[nodiscard]] std::uint32_t feature_count() const noexcept { return static_cast<std::uint32_t>(features.cols()); }
  [[nodiscard]] std::vector<std::uint64_t> class_histogram() const;

  // Shape, label range and finiteness.
  void validate() const;

  // Rows picked by `indices`, in the given order.
  [[nodiscard]] Dataset subset(std::span<const std::size_t> indices) const;
};

struct Split {
  Dataset train;
  Dataset test;
  double fraction = 0.3;  // share of each class held out for test
  std::vector<std::size_t> train_indices;
  std::vector<std::size_t> test_indices;
};

inline constexpr std::uint32_t kSignalChannels = 90;
inline constexpr std::uint32_t kSignalWindow = 10;
inline constexpr std::uint32_t kSignalClasses = 3;
inline constexpr double kSignalNoise = 0.3;
inline constexpr std::uint32_t kImageClasses = 8;
inline constexpr double kImageNoise = 0.5;

// 90 channels x 10 time steps of sinusoids. Frequencies, amplitudes and the
// per-class phase offset of every channel are fixed task constants; each
// sample gets a random global phase, so a class is identified only by the
// phase pattern across channels. Labels are i mod 3.
Dataset gen_signal_task(std::size_t n, Seed seed);

// side x side frames. Class l puts a warm blob in stripe l/2 of four
// vertical stripes, in the upper (overhang, l odd) or lower (bulk) region.
// Each frame is shifted by a small random translation, scaled by a random
// gain in [0.25, 1.5] and corrupted with Gaussian noise. Labels are i mod 8.
Dataset gen_image_task(std::size_t n, Seed seed, std::uint32_t side = 16);

struct FeatureStats {
  std::vector<double> mean;
  std::vector<double> std;  // population std, floored at 1e-8

  [[nodiscard]] FloatMatrix apply(const FloatMatrix& features) const;
};

FeatureStats feature_stats(const FloatMatrix& features);

// Features of `apply_to` standardized with the statistics of `train`.
Dataset standardize(const Dataset& train, const Dataset& apply_to);

// Stratified split: each class is shuffled with the seed and
// round(count * fraction) of its rows go to test. Both sides keep the
// original row order.
Split split(const Dataset& ds, double fraction, Seed seed);

std::vector<std::uint8_t> encode_dataset(const Dataset& ds);
Dataset decode_dataset(std::span<const std::uint8_t> bytes);

void write_dataset(const Dataset& ds, const std::filesystem::path& path);
Dataset read_dataset(const std::filesystem::path& path);

}  // namespace hdc
