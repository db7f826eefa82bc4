#include "hdc/complexity.hpp"

#include <sstream>

namespace hdc {

namespace {

void require_dim(const CostQuery& q) {
  if (q.dim < 1) throw Error(ErrorKind::kParameter, "cost query needs D >= 1");
}

CostBreakdown finish(CostBreakdown c) {
  c.total = c.encode_ops + c.similarity_ops + c.update_ops + c.activation_ops;
  return c;
}

}  // namespace

CostBreakdown inference_cost(const CostQuery& q) {
  require_dim(q);
  CostBreakdown c;
  c.encode_ops = q.features * q.dim;
  c.similarity_ops = q.classes * q.dim;
  c.activation_ops = q.kind == EncoderKind::kRff ? q.dim : 0;
  return finish(c);
}

CostBreakdown training_cost(const CostQuery& q) {
  require_dim(q);
  CostBreakdown c;
  c.encode_ops = q.samples * q.features * q.dim;
  c.update_ops = q.samples * q.dim;
  c.activation_ops = q.kind == EncoderKind::kRff ? q.samples * q.dim : 0;
  return finish(c);
}

CostBreakdown retraining_cost(const CostQuery& q) {
  require_dim(q);
  CostBreakdown c;
  c.encode_ops = q.corrections * q.features * q.dim;
  c.similarity_ops = q.corrections * q.classes * q.dim;
  c.update_ops = q.corrections * q.dim;
  return finish(c);
}

CostBreakdown retraining_cost_cached(const CostQuery& q) {
  require_dim(q);
  CostBreakdown c;
  c.similarity_ops = q.samples * q.classes * q.dim;
  c.update_ops = 2 * q.corrections * q.dim;
  return finish(c);
}

std::uint64_t basis_generation_draws(const CostQuery& q) { return q.features * q.dim + q.dim; }

std::string to_string(CostMode mode) {
  switch (mode) {
    case CostMode::kInference: return "inference";
    case CostMode::kTraining: return "training";
    case CostMode::kRetrainingCached: return "retraining-cached";
    case CostMode::kRetrainingReencode: return "retraining-reencode";
  }
  return "unknown";
}

std::string ValidationReport::describe() const {
  std::ostringstream out;
  out << (pass ? "PASS" : "FAIL");
  for (const auto& l : lines) {
    out << " [" << l.stage << " expected=" << l.expected << " measured=" << l.measured << "]";
  }
  return out.str();
}

ValidationReport validate_against_measurement(const CostQuery& q, const OpCounter& measured, CostMode mode) {
  std::uint64_t expected = 0;
  switch (mode) {
    case CostMode::kInference: expected = q.samples * inference_cost(q).total; break;
    case CostMode::kTraining: expected = training_cost(q).total; break;
    case CostMode::kRetrainingCached: expected = retraining_cost_cached(q).total; break;
    case CostMode::kRetrainingReencode: expected = retraining_cost(q).total; break;
  }
  ValidationReport report;
  report.pass = expected == measured.arithmetic();
  report.lines.push_back({to_string(mode), expected, measured.arithmetic()});
  return report;
}

}  // namespace hdc
