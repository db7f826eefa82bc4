#include "hdc/instrumentation.hpp"

#include <algorithm>

#include "hdc/core.hpp"

namespace hdc {

namespace {
thread_local CountScope* current_scope = nullptr;
}

std::string_view to_string(Stage stage) noexcept {
  switch (stage) {
    case Stage::kEncode: return "encode";
    case Stage::kTrain: return "train";
    case Stage::kInfer: return "infer";
    case Stage::kRetrain: return "retrain";
  }
  return "unknown";
}

CountScope::CountScope(Stage stage) noexcept : stage_(stage), parent_(current_scope) { current_scope = this; }

CountScope::~CountScope() {
  current_scope = parent_;
  stages_[stage_] += counter_;
  if (parent_ != nullptr) {
    parent_->counter_ += counter_;
    // Child stage totals flow up; the parent's own stage is credited when it closes.
    for (std::size_t i = 0; i < kStageCount; ++i) {
      if (static_cast<Stage>(i) != parent_->stage_) parent_->stages_.by_stage[i] += stages_.by_stage[i];
    }
  }
}

void record(const OpCounter& ops) noexcept {
  if (current_scope != nullptr) current_scope->counter_ += ops;
}

double median(std::vector<double> values) {
  if (values.empty()) return 0.0;
  const auto mid = values.begin() + static_cast<std::ptrdiff_t>(values.size() / 2);
  std::nth_element(values.begin(), mid, values.end());
  if (values.size() % 2 == 1) return *mid;
  const double hi = *mid;
  const double lo = *std::max_element(values.begin(), mid);
  return 0.5 * (lo + hi);
}

EnergyModel EnergyModel::make(double mul_add, double activation, double add_sub, double norm_op) {
  if (!(mul_add > 0) || !(activation > 0) || !(add_sub > 0) || !(norm_op > 0)) {
    throw Error(ErrorKind::kParameter, "energy model constants must be positive");
  }
  return EnergyModel{mul_add, activation, add_sub, norm_op};
}

double energy(const EnergyModel& model, const OpCounter& c) noexcept {
  return model.joules_per_mul_add * static_cast<double>(c.mul_add) +
         model.joules_per_activation * static_cast<double>(c.activation) +
         model.joules_per_add_sub * static_cast<double>(c.add_sub) +
         model.joules_per_norm_op * static_cast<double>(c.norm_ops);
}

void validate(const MetricsRecord& m) {
  if (!(m.accuracy >= 0.0 && m.accuracy <= 1.0)) throw Error(ErrorKind::kRange, "accuracy outside [0, 1]");
  if (m.inference_time_ms < 0 || m.train_time_s < 0 || m.energy_j < 0) {
    throw Error(ErrorKind::kRange, "metrics must be non-negative");
  }
}

}  // namespace hdc
