#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include <json.hpp>

#include "hdc/encoder.hpp"
#include "hdc/instrumentation.hpp"
#include "hdc/model.hpp"
#include "hdc/synthdata.hpp"

namespace hdc {

struct SearchSpace {
  std::vector<EncoderKind> kinds{EncoderKind::kRp, EncoderKind::kRff};
  std::uint32_t dim_min = 100;
  std::uint32_t dim_max = 50000;
  double sigma_min = 0.01;
  double sigma_max = 2.0;

  void validate() const;
};

inline constexpr double kUnbounded = std::numeric_limits<double>::infinity();

struct Constraints {
  double acc_min = 0.0;
  double inference_max_ms = kUnbounded;
  double train_max_s = kUnbounded;
  double energy_max_j = kUnbounded;

  void validate() const;
  [[nodiscard]] bool satisfied_by(const MetricsRecord& m) const noexcept;
};

struct Theta {
  EncoderKind kind = EncoderKind::kRp;
  std::uint32_t dim = 1;
  double sigma = 1.0;

  friend bool operator==(const Theta&, const Theta&) = default;
};

struct TrialRecord {
  std::size_t index = 0;
  Theta theta;
  MetricsRecord metrics;
  bool feasible = false;
  Seed seed;
};

// Indices into the trial sequence, in insertion order.
struct ParetoFront {
  std::vector<std::size_t> members;
};

// a dominates b: no worse on accuracy (max) and the three costs (min),
// strictly better on at least one.
bool dominates(const MetricsRecord& a, const MetricsRecord& b) noexcept;

// Adds trials[index] if it is feasible and not dominated by a member, and
// drops members it dominates. A trial equal on all four metrics to a member
// is rejected, so the earlier one stays.
ParetoFront pareto_insert(ParetoFront front, std::span<const TrialRecord> trials, std::size_t index);

// Highest feasible accuracy; ties go to lower energy, then lower D, then RP.
std::optional<std::size_t> best_feasible(std::span<const TrialRecord> trials);

struct EvalOptions {
  std::uint32_t epochs = 20;
  bool early_stop = true;
  int reps = 5;  // timing repetitions for inference
  EnergyModel energy;
};

// Standardizes with train statistics, fits on train (timed, energy from the
// fit's operation counts), then times encode + classify over the whole test
// set (median of reps, counts from one run) and scores test accuracy.
MetricsRecord evaluate(const Theta& theta, const Split& data, Seed seed, const EvalOptions& options = {});

struct Evaluation {
  MetricsRecord metrics;
  FitResult model;
  FeatureStats stats;  // train statistics used for both sides
};

// evaluate() that also hands back the fitted model and scaler.
Evaluation evaluate_full(const Theta& theta, const Split& data, Seed seed, const EvalOptions& options = {});

inline constexpr std::size_t kRandomSuggestions = 10;
inline constexpr std::size_t kCandidatesPerKind = 1024;

// Random draws for the first kRandomSuggestions trials, then feasibility
// weighted expected improvement over per-kind GP surrogates.
Theta suggest(std::span<const TrialRecord> history, const SearchSpace& space, const Constraints& constraints,
              CounterRng& rng);

using Evaluator = std::function<MetricsRecord(const Theta&, Seed)>;

struct TuneOptions {
  std::size_t episodes = 50;
  Seed seed;
  // Receives every new trial as soon as it is evaluated.
  std::function<void(const TrialRecord&)> on_trial;
};

struct TuneResult {
  std::vector<TrialRecord> trials;
  ParetoFront front;
};

// Runs episodes suggest/evaluate cycles. Trials in `history` (a replayed
// log) count as already-run episodes; the run continues after them and
// reproduces what an uninterrupted run would have done.
TuneResult run(const SearchSpace& space, const Constraints& constraints, const Evaluator& evaluator,
               const TuneOptions& options, std::vector<TrialRecord> history = {});

nlohmann::json trial_to_json(const TrialRecord& trial);
TrialRecord trial_from_json(const nlohmann::json& doc);

// One JSON object per line, flushed.
void append_trial(std::ostream& out, const TrialRecord& trial);
std::vector<TrialRecord> read_trial_log(const std::filesystem::path& path);

}  // namespace hdc
