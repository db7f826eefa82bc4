#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hdc/encoder.hpp"
#include "hdc/instrumentation.hpp"

namespace hdc {

// Inputs of the analytic cost model. N is the number of samples the stage
// touches (training samples, queries, or samples scanned during retraining);
// P is the number of retraining corrections.
struct CostQuery {
  std::uint64_t features = 0;  // J
  std::uint64_t dim = 1;       // D
  std::uint64_t classes = 0;   // L
  std::uint64_t samples = 0;   // N
  std::uint64_t corrections = 0;  // P
  EncoderKind kind = EncoderKind::kRp;
};

// Exact operation counts; multiply-add, add/sub and activation each count one.
struct CostBreakdown {
  std::uint64_t encode_ops = 0;
  std::uint64_t similarity_ops = 0;
  std::uint64_t update_ops = 0;
  std::uint64_t activation_ops = 0;
  std::uint64_t total = 0;

  friend bool operator==(const CostBreakdown&, const CostBreakdown&) = default;
};

// One query: J*D encode + L*D similarity (+ D cosines for RFF).
CostBreakdown inference_cost(const CostQuery& q);

// N samples: N*J*D encode + N*D aggregation (+ N*D cosines for RFF).
CostBreakdown training_cost(const CostQuery& q);

// Per correction: re-encode J*D + similarity L*D + update D, so P*D*(J+L+1).
CostBreakdown retraining_cost(const CostQuery& q);

// What the model actually executes with encodings cached: every scanned
// sample costs L*D for similarity and every correction 2*D for subtracting
// from the wrong prototype and adding to the right one.
CostBreakdown retraining_cost_cached(const CostQuery& q);

// Basis generation, reported separately and never part of the comparison.
std::uint64_t basis_generation_draws(const CostQuery& q);

enum class CostMode : std::uint8_t { kInference, kTraining, kRetrainingCached, kRetrainingReencode };

std::string to_string(CostMode mode);

struct ValidationLine {
  std::string stage;
  std::uint64_t expected = 0;
  std::uint64_t measured = 0;
};

struct ValidationReport {
  bool pass = false;
  std::vector<ValidationLine> lines;

  [[nodiscard]] std::string describe() const;
};

// Exact integer comparison of the analytic total against measured
// arithmetic (mul_add + add_sub + activation). For kInference the query's
// N is the number of queries. Norm work is excluded.
ValidationReport validate_against_measurement(const CostQuery& q, const OpCounter& measured, CostMode mode);

}  // namespace hdc
