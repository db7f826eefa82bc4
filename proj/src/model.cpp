#include "hdc/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "hdc/kernels.hpp"

namespace hdc {

namespace {

void check_dim(std::size_t got, std::uint32_t dim) {
  if (got != dim) {
    throw Error(ErrorKind::kShape, "hypervector has length " + std::to_string(got) + ", memory expects " +
                                       std::to_string(dim));
  }
}

void check_class(std::uint32_t l, std::uint32_t classes) {
  if (l >= classes) {
    throw Error(ErrorKind::kRange, "class index " + std::to_string(l) + " outside [0, " + std::to_string(classes) + ")");
  }
}

double cosine(double dot, double proto_norm, double query_norm) noexcept {
  if (proto_norm == 0.0 || query_norm == 0.0) return 0.0;
  return std::clamp(dot / (proto_norm * query_norm), -1.0, 1.0);
}

std::uint32_t argmax_lowest(std::span<const double> values) noexcept {
  std::uint32_t best = 0;
  for (std::uint32_t l = 1; l < values.size(); ++l) {
    if (values[l] > values[best]) best = l;
  }
  return best;
}

OpCounter norm_cost(std::uint64_t vectors, std::uint32_t dim) noexcept {
  OpCounter ops;
  ops.norm_ops = vectors * (std::uint64_t{dim} + 1);
  return ops;
}

}  // namespace

ClassMemory::ClassMemory(ShapeMeta shape, EncoderConfig config)
    : shape_(ShapeMeta::make(shape.features, shape.dim, shape.classes)),
      config_(config),
      prototypes_(std::size_t{shape.classes} * shape.dim, 0.0),
      norms_(shape.classes, 0.0),
      counts_(shape.classes, 0) {
  config_.validate();
  if (config_.dim != shape_.dim) throw Error(ErrorKind::kShape, "encoder dimension does not match memory dimension");
}

ClassMemory ClassMemory::from_parts(ShapeMeta shape, EncoderConfig config, std::vector<double> prototypes,
                                    std::vector<double> norms) {
  ClassMemory memory(shape, config);
  if (prototypes.size() != memory.prototypes_.size() || norms.size() != memory.norms_.size()) {
    throw Error(ErrorKind::kShape, "prototype block does not match L x D");
  }
  const auto finite = [](double v) { return std::isfinite(v); };
  if (!std::all_of(prototypes.begin(), prototypes.end(), finite) ||
      !std::all_of(norms.begin(), norms.end(), [](double v) { return std::isfinite(v) && v >= 0.0; })) {
    throw Error(ErrorKind::kParameter, "prototypes and norms must be finite, norms non-negative");
  }
  memory.prototypes_ = std::move(prototypes);
  memory.norms_ = std::move(norms);
  return memory;
}

std::span<const double> ClassMemory::prototype(std::uint32_t l) const {
  check_class(l, shape_.classes);
  return {prototypes_.data() + std::size_t{l} * shape_.dim, shape_.dim};
}

double ClassMemory::norm(std::uint32_t l) const {
  check_class(l, shape_.classes);
  return norms_[l];
}

double ClassMemory::norm_drift() const {
  double worst = 0.0;
  for (std::uint32_t l = 0; l < shape_.classes; ++l) {
    const double exact = std::sqrt(kernels::sum_squares(prototype(l).data(), shape_.dim));
    const double gap = std::abs(exact - norms_[l]);
    worst = std::max(worst, exact > 0.0 ? gap / exact : gap);
  }
  return worst;
}

void ClassMemory::add(std::uint32_t l, std::span<const float> h) {
  check_class(l, shape_.classes);
  check_dim(h.size(), shape_.dim);
  double* c = prototypes_.data() + std::size_t{l} * shape_.dim;
  for (std::size_t i = 0; i < h.size(); ++i) c[i] += static_cast<double>(h[i]);
  OpCounter ops;
  ops.add_sub = shape_.dim;
  record(ops);
}

void ClassMemory::subtract(std::uint32_t l, std::span<const float> h) {
  check_class(l, shape_.classes);
  check_dim(h.size(), shape_.dim);
  double* c = prototypes_.data() + std::size_t{l} * shape_.dim;
  for (std::size_t i = 0; i < h.size(); ++i) c[i] -= static_cast<double>(h[i]);
  OpCounter ops;
  ops.add_sub = shape_.dim;
  record(ops);
}

void ClassMemory::refresh_norm(std::uint32_t l) {
  check_class(l, shape_.classes);
  norms_[l] = std::sqrt(kernels::sum_squares(prototypes_.data() + std::size_t{l} * shape_.dim, shape_.dim));
  record(norm_cost(1, shape_.dim));
}

void ClassMemory::refresh_norms() {
  for (std::uint32_t l = 0; l < shape_.classes; ++l) refresh_norm(l);
}

std::uint64_t RetrainStats::total_corrections() const noexcept {
  return std::accumulate(corrections_per_epoch.begin(), corrections_per_epoch.end(), std::uint64_t{0});
}

ClassMemory train(const EncodedSet& encoded, ShapeMeta shape, const EncoderConfig& config) {
  if (encoded.size() == 0) throw Error(ErrorKind::kParameter, "training requires at least one sample");
  if (encoded.vectors.rows() != encoded.size()) throw Error(ErrorKind::kShape, "labels and hypervectors differ in count");
  check_dim(encoded.vectors.cols(), shape.dim);
  for (std::size_t i = 0; i < encoded.size(); ++i) {
    if (encoded.labels[i] >= shape.classes) {
      throw Error(ErrorKind::kLabel, "sample " + std::to_string(i) + " has label " + std::to_string(encoded.labels[i]) +
                                         " outside [0, " + std::to_string(shape.classes) + ")");
    }
  }
  CountScope scope(Stage::kTrain);
  ClassMemory memory(shape, config);
  for (std::size_t i = 0; i < encoded.size(); ++i) {
    memory.add(encoded.labels[i], encoded.vectors.row(i));
    ++memory.counts_[encoded.labels[i]];
  }
  memory.refresh_norms();
  return memory;
}

double similarity(const ClassMemory& memory, const HyperVector& h, std::uint32_t l) {
  check_class(l, memory.classes());
  check_dim(h.size(), memory.dim());
  const double dot = kernels::dot_mixed(memory.prototype(l).data(), h.data(), h.size());
  const double hn = std::sqrt(kernels::sum_squares(h.data(), h.size()));
  OpCounter ops = norm_cost(1, memory.dim());
  ops.mul_add = memory.dim();
  record(ops);
  return cosine(dot, memory.norm(l), hn);
}

Prediction infer(const ClassMemory& memory, std::span<const float> h) {
  check_dim(h.size(), memory.dim());
  const std::uint32_t classes = memory.classes();
  const std::uint32_t dim = memory.dim();
  const double hn = std::sqrt(kernels::sum_squares(h.data(), dim));
  Prediction p;
  p.similarities.resize(classes);
  for (std::uint32_t l = 0; l < classes; ++l) {
    const double dot = kernels::dot_mixed(memory.prototypes().data() + std::size_t{l} * dim, h.data(), dim);
    p.similarities[l] = cosine(dot, memory.norms()[l], hn);
  }
  p.label = argmax_lowest(p.similarities);
  OpCounter ops = norm_cost(1, dim);
  ops.mul_add = std::uint64_t{classes} * dim;
  record(ops);
  return p;
}

Prediction infer(const ClassMemory& memory, const HyperVector& h) { return infer(memory, h.values()); }

std::vector<std::uint32_t> predict_batch(const ClassMemory& memory, const FloatMatrix& hypervectors) {
  const std::size_t n = hypervectors.rows();
  if (n == 0) return {};
  check_dim(hypervectors.cols(), memory.dim());
  const std::uint32_t classes = memory.classes();
  std::vector<double> dots(n * classes);
  std::vector<double> norms(n);
  record(kernels::omp::similarities(memory.prototypes(), classes, memory.dim(), hypervectors.data(), dots, norms));
  std::vector<std::uint32_t> labels(n);
  std::vector<double> sims(classes);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::uint32_t l = 0; l < classes; ++l) sims[l] = cosine(dots[i * classes + l], memory.norms()[l], norms[i]);
    labels[i] = argmax_lowest(sims);
  }
  return labels;
}

std::uint64_t retrain_epoch(ClassMemory& memory, const EncodedSet& encoded) {
  if (encoded.vectors.rows() != encoded.size()) throw Error(ErrorKind::kShape, "labels and hypervectors differ in count");
  if (encoded.size() > 0) check_dim(encoded.vectors.cols(), memory.dim());
  CountScope scope(Stage::kRetrain);
  std::uint64_t corrections = 0;
  for (std::size_t i = 0; i < encoded.size(); ++i) {
    const std::uint32_t truth = encoded.labels[i];
    check_class(truth, memory.classes());
    const auto h = encoded.vectors.row(i);
    const std::uint32_t predicted = infer(memory, h).label;
    if (predicted == truth) continue;
    memory.subtract(predicted, h);
    memory.add(truth, h);
    memory.refresh_norm(predicted);
    memory.refresh_norm(truth);
    ++corrections;
  }
  memory.refresh_norms();
  return corrections;
}

FitResult fit(const FloatMatrix& features, std::span<const std::uint32_t> labels, std::uint32_t classes,
              const EncoderConfig& config, const FitOptions& options) {
  if (features.rows() != labels.size()) throw Error(ErrorKind::kShape, "feature rows and labels differ in count");
  if (features.rows() == 0) throw Error(ErrorKind::kParameter, "training requires at least one sample");
  const ShapeMeta shape = ShapeMeta::make(static_cast<std::uint32_t>(features.cols()), config.dim, classes);
  Basis basis = build_basis(config, shape.features);

  StageCounters ops;
  EncodedSet encoded;
  std::optional<ClassMemory> memory;
  {
    CountScope scope(Stage::kTrain);
    encoded.vectors = encode_batch(basis, features);
    encoded.labels.assign(labels.begin(), labels.end());
    memory.emplace(train(encoded, shape, config));
    ops[Stage::kEncode] += scope.stages()[Stage::kEncode];
    ops[Stage::kTrain] += scope.counter();
  }

  RetrainStats stats;
  for (std::uint32_t e = 0; e < options.epochs; ++e) {
    CountScope scope(Stage::kRetrain);
    const std::uint64_t corrections = retrain_epoch(*memory, encoded);
    ops[Stage::kRetrain] += scope.counter();
    ++stats.epochs_run;
    stats.corrections_per_epoch.push_back(corrections);
    stats.train_accuracy_per_epoch.push_back(1.0 - static_cast<double>(corrections) / static_cast<double>(encoded.size()));
    if (options.early_stop && corrections == 0) break;
  }
  return FitResult{std::move(basis), std::move(*memory), std::move(stats), ops};
}

std::vector<std::uint32_t> classify(const ClassMemory& memory, const Basis& basis, const FloatMatrix& features) {
  if (basis.dim() != memory.dim()) throw Error(ErrorKind::kShape, "basis and memory dimensions differ");
  if (features.rows() > 0 && features.cols() != basis.features()) {
    throw Error(ErrorKind::kShape, "data has J=" + std::to_string(features.cols()) + " but model expects J=" +
                                       std::to_string(basis.features()));
  }
  CountScope scope(Stage::kInfer);
  // Blocks of queries keep the encoded rows cache resident, so time stays linear in N.
  constexpr std::size_t kBlock = 64;
  std::vector<std::uint32_t> labels;
  labels.reserve(features.rows());
  const std::size_t cols = features.cols();
  for (std::size_t start = 0; start < features.rows(); start += kBlock) {
    const std::size_t n = std::min(kBlock, features.rows() - start);
    const auto rows = features.data().subspan(start * cols, n * cols);
    const FloatMatrix block(n, cols, std::vector<float>(rows.begin(), rows.end()));
    const auto predicted = predict_batch(memory, encode_batch(basis, block));
    labels.insert(labels.end(), predicted.begin(), predicted.end());
  }
  return labels;
}

double accuracy(std::span<const std::uint32_t> predicted, std::span<const std::uint32_t> truth) {
  if (predicted.size() != truth.size()) throw Error(ErrorKind::kShape, "prediction and label counts differ");
  if (truth.empty()) return 0.0;
  std::size_t hits = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) hits += predicted[i] == truth[i] ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(truth.size());
}

}  // namespace hdc
