#include "hdc/synthdata.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "hdc/byte_io.hpp"

namespace hdc {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;
// The signal task's frequencies, amplitudes and class phase patterns are
// drawn once from this seed; the sample seed only drives per-sample noise.
constexpr Seed kSignalStructureSeed{1234};
constexpr std::uint32_t kSampleStream = 0;
constexpr std::uint32_t kSplitStream = 2;

constexpr char kDatasetMagic[] = "HDCD";
constexpr std::uint32_t kDatasetVersion = 1;

std::string describe(std::string_view name, std::initializer_list<std::pair<std::string_view, double>> params) {
  std::ostringstream out;
  out << name << '(';
  bool first = true;
  for (const auto& [k, v] : params) {
    out << (first ? "" : ", ") << k << '=' << v;
    first = false;
  }
  out << ')';
  return out.str();
}

}  // namespace

std::vector<std::uint64_t> Dataset::class_histogram() const {
  std::vector<std::uint64_t> counts(classes, 0);
  for (auto l : labels) {
    if (l < classes) ++counts[l];
  }
  return counts;
}

void Dataset::validate() const {
  if (classes < 2) throw Error(ErrorKind::kShape, "dataset needs at least 2 classes");
  if (features.rows() != labels.size()) {
    throw Error(ErrorKind::kShape, "dataset has " + std::to_string(features.rows()) + " feature rows but " +
                                       std::to_string(labels.size()) + " labels");
  }
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] >= classes) {
      throw Error(ErrorKind::kLabel, "row " + std::to_string(i) + " has label " + std::to_string(labels[i]) +
                                         " outside [0, " + std::to_string(classes) + ")");
    }
  }
  detail::check_finite(features.data(), "dataset features");
}

Dataset Dataset::subset(std::span<const std::size_t> indices) const {
  Dataset out;
  out.classes = classes;
  out.provenance = provenance;
  out.features = FloatMatrix(indices.size(), features.cols());
  out.labels.reserve(indices.size());
  for (std::size_t k = 0; k < indices.size(); ++k) {
    const std::size_t i = indices[k];
    if (i >= size()) throw Error(ErrorKind::kRange, "row index " + std::to_string(i) + " out of range");
    std::ranges::copy(features.row(i), out.features.row(k).begin());
    out.labels.push_back(labels[i]);
  }
  return out;
}

Dataset gen_signal_task(std::size_t n, Seed seed) {
  if (n < 30) throw Error(ErrorKind::kParameter, "signal task needs n >= 30");
  constexpr std::uint32_t C = kSignalChannels;
  constexpr std::uint32_t T = kSignalWindow;

  CounterRng structure = make_rng(kSignalStructureSeed, 0);
  std::vector<double> omega(C), amp(C), delta(std::size_t{kSignalClasses} * C);
  for (auto& w : omega) w = uniform_draw(structure, 0.2, 1.2);
  for (auto& d : delta) d = uniform_draw(structure, 0.0, kTwoPi);
  for (auto& a : amp) a = 40.0 * uniform_draw(structure, 0.5, 1.5);

  Dataset ds;
  ds.classes = kSignalClasses;
  ds.features = FloatMatrix(n, std::size_t{C} * T);
  ds.labels.resize(n);
  CounterRng rng = make_rng(seed, kSampleStream);
  for (std::size_t i = 0; i < n; ++i) {
    const auto label = static_cast<std::uint32_t>(i % kSignalClasses);
    ds.labels[i] = label;
    const double psi = uniform_draw(rng, 0.0, kTwoPi);
    auto row = ds.features.row(i);
    for (std::uint32_t c = 0; c < C; ++c) {
      const double phase = psi + delta[std::size_t{label} * C + c];
      for (std::uint32_t t = 0; t < T; ++t) {
        const double clean = amp[c] * std::sin(omega[c] * t + phase);
        row[std::size_t{c} * T + t] = static_cast<float>(clean + gaussian_draw(rng, kSignalNoise));
      }
    }
  }
  ds.provenance = describe("signal", {{"n", static_cast<double>(n)},
                                      {"channels", C},
                                      {"window", T},
                                      {"noise", kSignalNoise},
                                      {"seed", static_cast<double>(seed.value)}});
  return ds;
}

Dataset gen_image_task(std::size_t n, Seed seed, std::uint32_t side) {
  if (n < std::size_t{kImageClasses} * 4) throw Error(ErrorKind::kParameter, "image task needs n >= 32");
  if (side < 4) throw Error(ErrorKind::kParameter, "image side must be >= 4");

  const double sw = side / 4.0;
  const auto shift = static_cast<std::int64_t>(std::max<std::uint32_t>(1, side / 16));
  Dataset ds;
  ds.classes = kImageClasses;
  ds.features = FloatMatrix(n, std::size_t{side} * side);
  ds.labels.resize(n);
  CounterRng rng = make_rng(seed, kSampleStream);
  for (std::size_t i = 0; i < n; ++i) {
    const auto label = static_cast<std::uint32_t>(i % kImageClasses);
    ds.labels[i] = label;
    const std::uint32_t stripe = label / 2;
    const bool overhang = label % 2 == 1;
    const auto dx = static_cast<double>(static_cast<std::int64_t>(uniform_index(rng, 2 * shift + 1)) - shift);
    const auto dy = static_cast<double>(static_cast<std::int64_t>(uniform_index(rng, 2 * shift + 1)) - shift);
    const double gain = uniform_draw(rng, 0.25, 1.5);

    const double cx = (stripe + 0.5) * sw + dx;
    const double cy = (overhang ? 0.2 : 0.6) * side + dy;
    const double rx = overhang ? sw * 0.35 : sw * 0.5;
    const double ry = overhang ? side * 0.12 : side * 0.3;
    const double peak = overhang ? 4.0 : 3.5;

    auto row = ds.features.row(i);
    for (std::uint32_t y = 0; y < side; ++y) {
      for (std::uint32_t x = 0; x < side; ++x) {
        const double ex = (x - cx) / rx;
        const double ey = (y - cy) / ry;
        const double clean = gain * peak * std::exp(-(ex * ex + ey * ey));
        row[std::size_t{y} * side + x] = static_cast<float>(clean + gaussian_draw(rng, kImageNoise));
      }
    }
  }
  ds.provenance = describe("image", {{"n", static_cast<double>(n)},
                                     {"side", side},
                                     {"noise", kImageNoise},
                                     {"shift", static_cast<double>(shift)},
                                     {"seed", static_cast<double>(seed.value)}});
  return ds;
}

FeatureStats feature_stats(const FloatMatrix& features) {
  const std::size_t n = features.rows();
  const std::size_t j = features.cols();
  if (n == 0) throw Error(ErrorKind::kParameter, "cannot compute statistics of an empty dataset");
  FeatureStats stats;
  stats.mean.assign(j, 0.0);
  stats.std.assign(j, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto row = features.row(i);
    for (std::size_t f = 0; f < j; ++f) stats.mean[f] += row[f];
  }
  for (auto& m : stats.mean) m /= static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto row = features.row(i);
    for (std::size_t f = 0; f < j; ++f) {
      const double d = row[f] - stats.mean[f];
      stats.std[f] += d * d;
    }
  }
  for (auto& s : stats.std) s = std::max(std::sqrt(s / static_cast<double>(n)), 1e-8);
  return stats;
}

FloatMatrix FeatureStats::apply(const FloatMatrix& features) const {
  if (features.cols() != mean.size()) {
    throw Error(ErrorKind::kShape, "statistics cover " + std::to_string(mean.size()) + " features, data has " +
                                       std::to_string(features.cols()));
  }
  FloatMatrix out(features.rows(), features.cols());
  for (std::size_t i = 0; i < features.rows(); ++i) {
    const auto in = features.row(i);
    auto dst = out.row(i);
    for (std::size_t f = 0; f < in.size(); ++f) dst[f] = static_cast<float>((in[f] - mean[f]) / std[f]);
  }
  return out;
}

Dataset standardize(const Dataset& train, const Dataset& apply_to) {
  Dataset out = apply_to;
  out.features = feature_stats(train.features).apply(apply_to.features);
  return out;
}

Split split(const Dataset& ds, double fraction, Seed seed) {
  if (!(fraction > 0.0 && fraction < 1.0)) throw Error(ErrorKind::kParameter, "split fraction must lie in (0, 1)");
  ds.validate();
  CounterRng rng = make_rng(seed, kSplitStream);
  std::vector<std::vector<std::size_t>> by_class(ds.classes);
  for (std::size_t i = 0; i < ds.size(); ++i) by_class[ds.labels[i]].push_back(i);

  Split out;
  out.fraction = fraction;
  for (auto& idx : by_class) {
    for (std::size_t k = idx.size(); k > 1; --k) std::swap(idx[k - 1], idx[uniform_index(rng, k)]);
    const auto held = static_cast<std::size_t>(std::lround(static_cast<double>(idx.size()) * fraction));
    out.test_indices.insert(out.test_indices.end(), idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(held));
    out.train_indices.insert(out.train_indices.end(), idx.begin() + static_cast<std::ptrdiff_t>(held), idx.end());
  }
  std::ranges::sort(out.train_indices);
  std::ranges::sort(out.test_indices);
  out.train = ds.subset(out.train_indices);
  out.test = ds.subset(out.test_indices);
  return out;
}

std::vector<std::uint8_t> encode_dataset(const Dataset& ds) {
  ds.validate();
  bytes::Writer w;
  w.put_magic(kDatasetMagic);
  w.put_u32(kDatasetVersion);
  w.put_u32(static_cast<std::uint32_t>(ds.size()));
  w.put_u32(ds.feature_count());
  w.put_u32(ds.classes);
  for (auto l : ds.labels) w.put_u32(l);
  for (float v : ds.features.data()) w.put_f32(v);
  return w.take();
}

Dataset decode_dataset(std::span<const std::uint8_t> data) {
  bytes::Reader r(data);
  r.expect_magic(kDatasetMagic);
  const std::uint32_t version = r.u32("header");
  if (version != kDatasetVersion) {
    throw Error(ErrorKind::kBadVersion, "dataset version " + std::to_string(version) + " is not supported");
  }
  const std::uint32_t n = r.u32("header");
  const std::uint32_t j = r.u32("header");
  const std::uint32_t l = r.u32("header");
  if (l < 2) throw Error(ErrorKind::kFormat, "dataset declares fewer than 2 classes");
  if (n > 0 && j == 0) throw Error(ErrorKind::kFormat, "dataset declares zero features");
  r.need(std::uint64_t{n} * 4, "labels");
  Dataset ds;
  ds.classes = l;
  ds.labels.resize(n);
  for (auto& label : ds.labels) {
    label = r.u32("labels");
    if (label >= l) throw Error(ErrorKind::kFormat, "label " + std::to_string(label) + " outside [0, " + std::to_string(l) + ")");
  }
  r.need(std::uint64_t{n} * j * 4, "features");
  ds.features = FloatMatrix(n, j);
  for (float& v : ds.features.data()) v = r.f32("features");
  r.expect_end();
  for (float v : ds.features.data()) {
    if (!std::isfinite(v)) throw Error(ErrorKind::kFormat, "dataset contains non-finite features");
  }
  ds.provenance = "file";
  return ds;
}

void write_dataset(const Dataset& ds, const std::filesystem::path& path) {
  bytes::write_file(path, encode_dataset(ds));
}

Dataset read_dataset(const std::filesystem::path& path) {
  Dataset ds = decode_dataset(bytes::read_file(path));
  ds.provenance = "file:" + path.string();
  return ds;
}

}  // namespace hdc
