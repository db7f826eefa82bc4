#include "hdc/io.hpp"

#include <cmath>
#include <fstream>

#include "hdc/byte_io.hpp"
#include "hdc/kernels.hpp"

namespace hdc {

namespace {

constexpr char kModelMagic[] = "HDCM";
constexpr std::uint32_t kModelVersion = 1;
constexpr double kNormTolerance = 1e-9;

}  // namespace

std::vector<std::uint8_t> encode_model(const ClassMemory& memory) {
  const auto& config = memory.config();
  bytes::Writer w;
  w.put_magic(kModelMagic);
  w.put_u32(kModelVersion);
  w.put_u32(static_cast<std::uint32_t>(config.kind));
  w.put_u32(memory.dim());
  w.put_u32(memory.shape().features);
  w.put_u32(memory.classes());
  w.put_f64(config.sigma);
  w.put_u64(config.seed.value);
  for (double v : memory.prototypes()) w.put_f64(v);
  for (double v : memory.norms()) w.put_f64(v);
  return w.take();
}

LoadedModel decode_model(std::span<const std::uint8_t> data) {
  bytes::Reader r(data);
  r.expect_magic(kModelMagic);
  const std::uint32_t version = r.u32("header");
  if (version != kModelVersion) {
    throw Error(ErrorKind::kBadVersion, "model version " + std::to_string(version) + " is not supported");
  }
  const std::uint32_t kind_code = r.u32("header");
  const std::uint32_t dim = r.u32("header");
  const std::uint32_t features = r.u32("header");
  const std::uint32_t classes = r.u32("header");
  const double sigma = r.f64("header");
  const std::uint64_t seed = r.u64("header");
  if (kind_code > 1) throw Error(ErrorKind::kFormat, "unknown encoder kind code " + std::to_string(kind_code));

  EncoderConfig config{static_cast<EncoderKind>(kind_code), dim, sigma, Seed{seed}};
  ShapeMeta shape;
  try {
    config.validate();
    shape = ShapeMeta::make(features, dim, classes);
  } catch (const Error& e) {
    throw Error(ErrorKind::kFormat, std::string("invalid model header: ") + e.what());
  }

  const std::size_t count = std::size_t{classes} * dim;
  r.need(count * 8, "prototypes");
  std::vector<double> prototypes(count);
  for (double& v : prototypes) v = r.f64("prototypes");
  r.need(std::size_t{classes} * 8, "norms");
  std::vector<double> norms(classes);
  for (double& v : norms) v = r.f64("norms");
  r.expect_end();

  for (std::uint32_t l = 0; l < classes; ++l) {
    const double exact = std::sqrt(kernels::sum_squares(prototypes.data() + std::size_t{l} * dim, dim));
    const double gap = std::abs(exact - norms[l]);
    if (!(gap <= kNormTolerance * std::max(exact, 1e-300)) && !(exact == 0.0 && norms[l] == 0.0)) {
      throw Error(ErrorKind::kNormMismatch, "stored norm of class " + std::to_string(l) + " is " +
                                                std::to_string(norms[l]) + ", prototype gives " + std::to_string(exact));
    }
  }
  ClassMemory memory = [&] {
    try {
      return ClassMemory::from_parts(shape, config, std::move(prototypes), std::move(norms));
    } catch (const Error& e) {
      throw Error(ErrorKind::kFormat, std::string("invalid model body: ") + e.what());
    }
  }();
  Basis basis = build_basis(config, features);
  return LoadedModel{std::move(memory), std::move(basis)};
}

void save_model(const ClassMemory& memory, const std::filesystem::path& path) {
  bytes::write_file(path, encode_model(memory));
}

LoadedModel load_model(const std::filesystem::path& path) { return decode_model(bytes::read_file(path)); }

nlohmann::json to_json(const OpCounter& ops) {
  return {{"mul_add", ops.mul_add},
          {"add_sub", ops.add_sub},
          {"activation", ops.activation},
          {"norm", ops.norm_ops},
          {"arithmetic", ops.arithmetic()}};
}

nlohmann::json to_json(const StageCounters& ops) {
  return {{"encode", to_json(ops[Stage::kEncode])},
          {"train", to_json(ops[Stage::kTrain])},
          {"infer", to_json(ops[Stage::kInfer])},
          {"retrain", to_json(ops[Stage::kRetrain])}};
}

nlohmann::json metrics_json(const MetricsRecord& m, const nlohmann::json& config) {
  return {{"accuracy", m.accuracy},
          {"inference_time_ms", m.inference_time_ms},
          {"train_time_s", m.train_time_s},
          {"energy_j", m.energy_j},
          {"ops", to_json(m.ops)},
          {"config", config}};
}

void write_json_line(const nlohmann::json& doc, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorKind::kIo, "cannot open " + path.string() + " for writing");
  out << doc.dump() << '\n';
  if (!out) throw Error(ErrorKind::kIo, "write failed for " + path.string());
}

}  // namespace hdc
