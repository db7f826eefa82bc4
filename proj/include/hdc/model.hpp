#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "hdc/core.hpp"
#include "hdc/encoder.hpp"
#include "hdc/instrumentation.hpp"

namespace hdc {

// Encoded training set: N hypervectors (rows) with their labels.
struct EncodedSet {
  FloatMatrix vectors;
  std::vector<std::uint32_t> labels;

  [[nodiscard]] std::size_t size() const noexcept { return labels.size(); }
};

// Class prototypes C_l as 64-bit accumulators with cached Euclidean norms,
// plus what is needed to regenerate the basis (config and J).
class ClassMemory {
 public:
  ClassMemory(ShapeMeta shape, EncoderConfig config);

  // Reassembles a memory from stored prototypes and norms; throws on
  // non-finite values or size mismatch. Norms are taken as given.
  static ClassMemory from_parts(ShapeMeta shape, EncoderConfig config, std::vector<double> prototypes,
                                std::vector<double> norms);

  [[nodiscard]] const ShapeMeta& shape() const noexcept { return shape_; }
  [[nodiscard]] const EncoderConfig& config() const noexcept { return config_; }
  [[nodiscard]] std::uint32_t classes() const noexcept { return shape_.classes; }
  [[nodiscard]] std::uint32_t dim() const noexcept { return shape_.dim; }

  [[nodiscard]] std::span<const double> prototype(std::uint32_t l) const;
  [[nodiscard]] std::span<const double> prototypes() const noexcept { return prototypes_; }
  [[nodiscard]] double norm(std::uint32_t l) const;
  [[nodiscard]] std::span<const double> norms() const noexcept { return norms_; }
  // Training samples aggregated per class (M_l); zero for loaded models.
  [[nodiscard]] std::span<const std::uint64_t> class_counts() const noexcept { return counts_; }

  // Largest relative gap between cached and recomputed norms.
  [[nodiscard]] double norm_drift() const;

  void add(std::uint32_t l, std::span<const float> h);
  void subtract(std::uint32_t l, std::span<const float> h);
  void refresh_norm(std::uint32_t l);
  void refresh_norms();

  friend bool operator==(const ClassMemory&, const ClassMemory&) = default;

 private:
  friend ClassMemory train(const EncodedSet&, ShapeMeta, const EncoderConfig&);

  ShapeMeta shape_;
  EncoderConfig config_;
  std::vector<double> prototypes_;
  std::vector<double> norms_;
  std::vector<std::uint64_t> counts_;
};

struct Prediction {
  std::uint32_t label = 0;
  std::vector<double> similarities;
};

struct RetrainStats {
  std::uint32_t epochs_run = 0;
  std::vector<std::uint64_t> corrections_per_epoch;
  std::vector<double> train_accuracy_per_epoch;

  [[nodiscard]] std::uint64_t total_corrections() const noexcept;
};

// C_l = sum of the hypervectors labelled l; records N*D additions under a
// train scope.
ClassMemory train(const EncodedSet& encoded, ShapeMeta shape, const EncoderConfig& config);

// Cosine similarity against prototype l using the cached norm; 0 when either
// norm is zero.
double similarity(const ClassMemory& memory, const HyperVector& h, std::uint32_t l);

// Argmax of similarity over all classes, lowest index on ties.
Prediction infer(const ClassMemory& memory, const HyperVector& h);
Prediction infer(const ClassMemory& memory, std::span<const float> h);

std::vector<std::uint32_t> predict_batch(const ClassMemory& memory, const FloatMatrix& hypervectors);

// One online pass in dataset order: predict with the current memory, on a
// miss move the sample from the predicted prototype to the true one and
// refresh both norms. All norms are recomputed at the end of the pass.
// Returns the number of corrections.
std::uint64_t retrain_epoch(ClassMemory& memory, const EncodedSet& encoded);

struct FitOptions {
  std::uint32_t epochs = 20;
  bool early_stop = false;
};

struct FitResult {
  Basis basis;
  ClassMemory memory;
  RetrainStats stats;
  StageCounters ops;
};

// Builds the basis, encodes the training set once, aggregates prototypes and
// runs up to `epochs` retraining passes over the cached encodings.
FitResult fit(const FloatMatrix& features, std::span<const std::uint32_t> labels, std::uint32_t classes,
              const EncoderConfig& config, const FitOptions& options = {});

// Encode and classify a feature batch under an infer scope.
std::vector<std::uint32_t> classify(const ClassMemory& memory, const Basis& basis, const FloatMatrix& features);

double accuracy(std::span<const std::uint32_t> predicted, std::span<const std::uint32_t> truth);

}  // namespace hdc
