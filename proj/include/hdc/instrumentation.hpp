#pragma once

#include <array>
#include <chrono>
#include <cstdint>
#include <functional>
#include <string_view>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

namespace hdc {

// Exact operation tallies. mul_add, add_sub and activation are the arithmetic
// terms of the cost model; norm_ops (one per squared element plus one per
// root) are kept apart so the model comparison stays exact.
struct OpCounter {
  std::uint64_t mul_add = 0;
  std::uint64_t add_sub = 0;
  std::uint64_t activation = 0;
  std::uint64_t norm_ops = 0;

  [[nodiscard]] std::uint64_t arithmetic() const noexcept { return mul_add + add_sub + activation; }
  [[nodiscard]] std::uint64_t total() const noexcept { return arithmetic() + norm_ops; }

  OpCounter& operator+=(const OpCounter& o) noexcept {
    mul_add += o.mul_add;
    add_sub += o.add_sub;
    activation += o.activation;
    norm_ops += o.norm_ops;
    return *this;
  }
  friend OpCounter operator+(OpCounter a, const OpCounter& b) noexcept { return a += b; }
  friend bool operator==(const OpCounter&, const OpCounter&) = default;
};

enum class Stage : std::uint8_t { kEncode, kTrain, kInfer, kRetrain };
inline constexpr std::size_t kStageCount = 4;
std::string_view to_string(Stage stage) noexcept;

// Per-stage counters. Stages are inclusive: an encode scope nested inside
// a train scope counts toward both.
struct StageCounters {
  std::array<OpCounter, kStageCount> by_stage{};

  OpCounter& operator[](Stage s) noexcept { return by_stage[static_cast<std::size_t>(s)]; }
  const OpCounter& operator[](Stage s) const noexcept { return by_stage[static_cast<std::size_t>(s)]; }

  StageCounters& operator+=(const StageCounters& o) noexcept {
    for (std::size_t i = 0; i < kStageCount; ++i) by_stage[i] += o.by_stage[i];
    return *this;
  }
};

// RAII counting scope. Scopes are per thread and nest: on destruction the
// scope's tally is added into its parent. Recording with no open scope is a
// no-op, so the kernels cost nothing outside measurement.
class CountScope {
 public:
  explicit CountScope(Stage stage) noexcept;
  ~CountScope();
  CountScope(const CountScope&) = delete;
  CountScope& operator=(const CountScope&) = delete;

  [[nodiscard]] Stage stage() const noexcept { return stage_; }
  [[nodiscard]] const OpCounter& counter() const noexcept { return counter_; }
  // Per-stage totals of this scope, including nested child scopes.
  [[nodiscard]] const StageCounters& stages() const noexcept { return stages_; }

 private:
  friend void record(const OpCounter& ops) noexcept;

  Stage stage_;
  OpCounter counter_;
  StageCounters stages_;
  CountScope* parent_;
};

// Adds ops to the innermost open scope of the calling thread.
void record(const OpCounter& ops) noexcept;

template <typename T>
struct Counted {
  T value;
  OpCounter ops;
};

template <typename Body>
auto scoped_count(Stage stage, Body&& body) {
  CountScope scope(stage);
  if constexpr (std::is_void_v<std::invoke_result_t<Body>>) {
    std::forward<Body>(body)();
    return Counted<std::monostate>{{}, scope.counter()};
  } else {
    auto value = std::forward<Body>(body)();
    return Counted<decltype(value)>{std::move(value), scope.counter()};
  }
}

using Clock = std::chrono::steady_clock;

template <typename T>
struct Timed {
  T value;
  double seconds;
};

template <typename Body>
auto measure_time(Body&& body) {
  const auto start = Clock::now();
  if constexpr (std::is_void_v<std::invoke_result_t<Body>>) {
    std::forward<Body>(body)();
    return Timed<std::monostate>{{}, std::chrono::duration<double>(Clock::now() - start).count()};
  } else {
    auto value = std::forward<Body>(body)();
    const double s = std::chrono::duration<double>(Clock::now() - start).count();
    return Timed<decltype(value)>{std::move(value), s};
  }
}

double median(std::vector<double> values);

// Median wall-clock seconds of `reps` runs of body.
template <typename Body>
double median_time(int reps, Body&& body) {
  std::vector<double> samples;
  samples.reserve(static_cast<std::size_t>(reps > 0 ? reps : 1));
  for (int r = 0; r < (reps > 0 ? reps : 1); ++r) samples.push_back(measure_time(body).seconds);
  return median(std::move(samples));
}

// Declared linear proxy for energy: joules = sum of field * per-op constant.
struct EnergyModel {
  double joules_per_mul_add = 1e-9;
  double joules_per_activation = 5e-9;
  double joules_per_add_sub = 1e-9;
  double joules_per_norm_op = 1e-9;

  static EnergyModel make(double mul_add, double activation, double add_sub = 1e-9, double norm_op = 1e-9);
};

double energy(const EnergyModel& model, const OpCounter& counter) noexcept;

// Optional external meter: returns cumulative joules when sampled. When set,
// measured energy is the difference of two samples around the workload.
using EnergyMeter = std::function<double()>;

struct MetricsRecord {
  double accuracy = 0.0;
  double inference_time_ms = 0.0;
  double train_time_s = 0.0;
  double energy_j = 0.0;
  StageCounters ops;
};

void validate(const MetricsRecord& m);

}  // namespace hdc
