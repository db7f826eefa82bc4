#include "hdc/tuner.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <ostream>

#include "hdc/gp.hpp"
#include "hdc/model.hpp"

namespace hdc {

namespace {

constexpr std::uint32_t kEpisodeStreamBase = 16;
constexpr double kVarianceFloor = 1e-6;

bool positive_or_inf(double v) { return v > 0.0; }

int kind_rank(EncoderKind k) { return static_cast<int>(k); }

double norm_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }
double norm_pdf(double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * 3.14159265358979323846); }

// Unit-square coordinates: log D and sigma, each scaled to [0, 1].
GaussianProcess::Point to_unit(const SearchSpace& space, std::uint32_t dim, double sigma) {
  const double lo = std::log(static_cast<double>(space.dim_min));
  const double hi = std::log(static_cast<double>(space.dim_max));
  const double x = hi > lo ? (std::log(static_cast<double>(dim)) - lo) / (hi - lo) : 0.0;
  const double y = space.sigma_max > space.sigma_min ? (sigma - space.sigma_min) / (space.sigma_max - space.sigma_min) : 0.0;
  return {x, y};
}

Theta random_theta(const SearchSpace& space, EncoderKind kind, CounterRng& rng) {
  Theta t;
  t.kind = kind;
  if (space.dim_max > space.dim_min) {
    const double lo = std::log(static_cast<double>(space.dim_min));
    const double hi = std::log(static_cast<double>(space.dim_max));
    const double d = std::round(std::exp(uniform_draw(rng, lo, hi)));
    t.dim = static_cast<std::uint32_t>(std::clamp(d, double(space.dim_min), double(space.dim_max)));
  } else {
    rng.next_u64();
    t.dim = space.dim_min;
  }
  if (space.sigma_max > space.sigma_min) {
    t.sigma = uniform_draw(rng, space.sigma_min, space.sigma_max);
  } else {
    rng.next_u64();
    t.sigma = space.sigma_min;
  }
  return t;
}

// Targets the surrogates model: accuracy and the log of each cost.
constexpr std::size_t kTargets = 4;

std::array<double, kTargets> targets(const MetricsRecord& m) {
  const auto safe_log = [](double v) { return std::log(std::max(v, 1e-12)); };
  return {m.accuracy, safe_log(m.inference_time_ms), safe_log(m.train_time_s), safe_log(m.energy_j)};
}

struct Candidate {
  Theta theta;
  double score = -1.0;
  double energy = 0.0;  // predicted log energy
};

bool better(const Candidate& a, const Candidate& b) {
  if (a.score != b.score) return a.score > b.score;
  if (a.energy != b.energy) return a.energy < b.energy;
  if (a.theta.dim != b.theta.dim) return a.theta.dim < b.theta.dim;
  return kind_rank(a.theta.kind) < kind_rank(b.theta.kind);
}

}  // namespace

void SearchSpace::validate() const {
  if (kinds.empty()) throw Error(ErrorKind::kConfig, "search space has no encoder kinds");
  if (dim_min < 1 || dim_min > dim_max) throw Error(ErrorKind::kConfig, "search space needs 1 <= D_min <= D_max");
  if (!(sigma_min > 0.0) || !(sigma_min <= sigma_max) || !std::isfinite(sigma_max)) {
    throw Error(ErrorKind::kConfig, "search space needs 0 < sigma_min <= sigma_max");
  }
}

void Constraints::validate() const {
  if (!(acc_min >= 0.0)) throw Error(ErrorKind::kConfig, "acc_min must be >= 0");
  if (!positive_or_inf(inference_max_ms) || !positive_or_inf(train_max_s) || !positive_or_inf(energy_max_j)) {
    throw Error(ErrorKind::kConfig, "cost bounds must be positive");
  }
}

bool Constraints::satisfied_by(const MetricsRecord& m) const noexcept {
  return m.accuracy >= acc_min && m.inference_time_ms <= inference_max_ms && m.train_time_s <= train_max_s &&
         m.energy_j <= energy_max_j;
}

bool dominates(const MetricsRecord& a, const MetricsRecord& b) noexcept {
  const bool no_worse = a.accuracy >= b.accuracy && a.inference_time_ms <= b.inference_time_ms &&
                        a.train_time_s <= b.train_time_s && a.energy_j <= b.energy_j;
  const bool better = a.accuracy > b.accuracy || a.inference_time_ms < b.inference_time_ms ||
                      a.train_time_s < b.train_time_s || a.energy_j < b.energy_j;
  return no_worse && better;
}

ParetoFront pareto_insert(ParetoFront front, std::span<const TrialRecord> trials, std::size_t index) {
  if (index >= trials.size()) throw Error(ErrorKind::kRange, "trial index out of range");
  const TrialRecord& t = trials[index];
  if (!t.feasible) return front;
  const auto same = [&](const MetricsRecord& m) {
    return m.accuracy == t.metrics.accuracy && m.inference_time_ms == t.metrics.inference_time_ms &&
           m.train_time_s == t.metrics.train_time_s && m.energy_j == t.metrics.energy_j;
  };
  for (auto m : front.members) {
    const auto& other = trials[m].metrics;
    if (dominates(other, t.metrics) || same(other)) return front;
  }
  std::erase_if(front.members, [&](std::size_t m) { return dominates(t.metrics, trials[m].metrics); });
  front.members.push_back(index);
  return front;
}

std::optional<std::size_t> best_feasible(std::span<const TrialRecord> trials) {
  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < trials.size(); ++i) {
    const auto& t = trials[i];
    if (!t.feasible) continue;
    if (!best) {
      best = i;
      continue;
    }
    const auto& b = trials[*best];
    const bool wins = t.metrics.accuracy != b.metrics.accuracy ? t.metrics.accuracy > b.metrics.accuracy
                      : t.metrics.energy_j != b.metrics.energy_j ? t.metrics.energy_j < b.metrics.energy_j
                      : t.theta.dim != b.theta.dim               ? t.theta.dim < b.theta.dim
                                                                 : kind_rank(t.theta.kind) < kind_rank(b.theta.kind);
    if (wins) best = i;
  }
  return best;
}

Evaluation evaluate_full(const Theta& theta, const Split& data, Seed seed, const EvalOptions& options) {
  FeatureStats stats = feature_stats(data.train.features);
  const FloatMatrix train_x = stats.apply(data.train.features);
  const FloatMatrix test_x = stats.apply(data.test.features);
  const EncoderConfig config{theta.kind, theta.dim, theta.sigma, seed};

  auto fitted = measure_time([&] {
    return fit(train_x, data.train.labels, data.train.classes, config, {options.epochs, options.early_stop});
  });
  const FitResult& model = fitted.value;

  const auto counted = scoped_count(Stage::kInfer, [&] { return classify(model.memory, model.basis, test_x); });
  const double infer_s = median_time(options.reps, [&] { (void)classify(model.memory, model.basis, test_x); });

  MetricsRecord m;
  m.accuracy = accuracy(counted.value, data.test.labels);
  m.inference_time_ms = infer_s * 1e3;
  m.train_time_s = fitted.seconds;
  m.ops = model.ops;
  m.ops[Stage::kInfer] = counted.ops;
  m.energy_j = energy(options.energy, model.ops[Stage::kTrain] + model.ops[Stage::kRetrain]);
  return Evaluation{m, std::move(fitted.value), std::move(stats)};
}

MetricsRecord evaluate(const Theta& theta, const Split& data, Seed seed, const EvalOptions& options) {
  return evaluate_full(theta, data, seed, options).metrics;
}

Theta suggest(std::span<const TrialRecord> history, const SearchSpace& space, const Constraints& constraints,
              CounterRng& rng) {
  space.validate();
  std::vector<EncoderKind> kinds = space.kinds;
  std::ranges::sort(kinds, {}, kind_rank);
  kinds.erase(std::unique(kinds.begin(), kinds.end()), kinds.end());

  if (history.size() < kRandomSuggestions) {
    const EncoderKind kind = kinds[uniform_index(rng, kinds.size())];
    return random_theta(space, kind, rng);
  }

  // Shared prior statistics so a kind with few trials still gets a sensible
  // prior.
  std::array<double, kTargets> mean{}, var{};
  for (const auto& t : history) {
    const auto y = targets(t.metrics);
    for (std::size_t k = 0; k < kTargets; ++k) mean[k] += y[k];
  }
  for (auto& m : mean) m /= static_cast<double>(history.size());
  for (const auto& t : history) {
    const auto y = targets(t.metrics);
    for (std::size_t k = 0; k < kTargets; ++k) var[k] += (y[k] - mean[k]) * (y[k] - mean[k]);
  }
  for (auto& v : var) v = std::max(v / static_cast<double>(history.size()), kVarianceFloor);

  double incumbent = -std::numeric_limits<double>::infinity();
  for (const auto& t : history) {
    if (t.feasible) incumbent = std::max(incumbent, t.metrics.accuracy);
  }
  const bool have_feasible = std::isfinite(incumbent);

  const std::array<double, kTargets> bounds{constraints.acc_min, std::log(constraints.inference_max_ms),
                                            std::log(constraints.train_max_s), std::log(constraints.energy_max_j)};

  std::optional<Candidate> best;
  for (const EncoderKind kind : kinds) {
    std::vector<GaussianProcess::Point> xs;
    std::array<std::vector<double>, kTargets> ys;
    for (const auto& t : history) {
      if (t.theta.kind != kind) continue;
      xs.push_back(to_unit(space, t.theta.dim, t.theta.sigma));
      const auto y = targets(t.metrics);
      for (std::size_t k = 0; k < kTargets; ++k) ys[k].push_back(y[k]);
    }
    std::vector<GaussianProcess> models;
    for (std::size_t k = 0; k < kTargets; ++k) {
      GaussianProcess::Params p;
      p.amplitude = var[k];
      p.mean = ys[k].empty() ? mean[k]
                             : std::accumulate(ys[k].begin(), ys[k].end(), 0.0) / static_cast<double>(ys[k].size());
      models.emplace_back(xs, ys[k], p);
    }

    for (std::size_t c = 0; c < kCandidatesPerKind; ++c) {
      Candidate cand;
      cand.theta = random_theta(space, kind, rng);
      const auto x = to_unit(space, cand.theta.dim, cand.theta.sigma);
      std::array<GaussianProcess::Posterior, kTargets> post;
      for (std::size_t k = 0; k < kTargets; ++k) post[k] = models[k].predict(x);

      double feasibility = 1.0;
      if (constraints.acc_min > 0.0) {
        feasibility *= post[0].stddev > 0.0 ? norm_cdf((post[0].mean - bounds[0]) / post[0].stddev)
                                            : (post[0].mean >= bounds[0] ? 1.0 : 0.0);
      }
      for (std::size_t k = 1; k < kTargets; ++k) {
        if (std::isinf(bounds[k])) continue;
        feasibility *= post[k].stddev > 0.0 ? norm_cdf((bounds[k] - post[k].mean) / post[k].stddev)
                                            : (post[k].mean <= bounds[k] ? 1.0 : 0.0);
      }

      double improvement = 1.0;
      if (have_feasible) {
        const double gap = post[0].mean - incumbent;
        const double s = post[0].stddev;
        improvement = s > 0.0 ? gap * norm_cdf(gap / s) + s * norm_pdf(gap / s) : std::max(gap, 0.0);
      }
      cand.score = improvement * feasibility;
      cand.energy = post[3].mean;
      if (!best || better(cand, *best)) best = cand;
    }
  }
  return best->theta;
}

TuneResult run(const SearchSpace& space, const Constraints& constraints, const Evaluator& evaluator,
               const TuneOptions& options, std::vector<TrialRecord> history) {
  space.validate();
  constraints.validate();
  TuneResult result;
  result.trials = std::move(history);
  for (std::size_t i = 0; i < result.trials.size(); ++i) {
    result.trials[i].index = i;
    result.front = pareto_insert(std::move(result.front), result.trials, i);
  }
  for (std::size_t e = result.trials.size(); e < options.episodes; ++e) {
    CounterRng rng = make_rng(options.seed, kEpisodeStreamBase + static_cast<std::uint32_t>(e));
    const Theta theta = suggest(result.trials, space, constraints, rng);
    TrialRecord trial;
    trial.index = e;
    trial.theta = theta;
    trial.seed = options.seed;
    trial.metrics = evaluator(theta, options.seed);
    validate(trial.metrics);
    trial.feasible = constraints.satisfied_by(trial.metrics);
    result.trials.push_back(trial);
    result.front = pareto_insert(std::move(result.front), result.trials, e);
    if (options.on_trial) options.on_trial(trial);
  }
  return result;
}

nlohmann::json trial_to_json(const TrialRecord& t) {
  return {{"index", t.index},
          {"kind", std::string(to_string(t.theta.kind))},
          {"dim", t.theta.dim},
          {"sigma_b", t.theta.sigma},
          {"accuracy", t.metrics.accuracy},
          {"inference_time_ms", t.metrics.inference_time_ms},
          {"train_time_s", t.metrics.train_time_s},
          {"energy_j", t.metrics.energy_j},
          {"feasible", t.feasible},
          {"seed", t.seed.value}};
}

TrialRecord trial_from_json(const nlohmann::json& doc) {
  try {
    TrialRecord t;
    t.index = doc.at("index").get<std::size_t>();
    const auto kind = parse_encoder_kind(doc.at("kind").get<std::string>());
    if (!kind) throw Error(ErrorKind::kFormat, "unknown kind in trial log");
    t.theta = Theta{*kind, doc.at("dim").get<std::uint32_t>(), doc.at("sigma_b").get<double>()};
    t.metrics.accuracy = doc.at("accuracy").get<double>();
    t.metrics.inference_time_ms = doc.at("inference_time_ms").get<double>();
    t.metrics.train_time_s = doc.at("train_time_s").get<double>();
    t.metrics.energy_j = doc.at("energy_j").get<double>();
    t.feasible = doc.at("feasible").get<bool>();
    t.seed = Seed{doc.at("seed").get<std::uint64_t>()};
    return t;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::kFormat, std::string("malformed trial record: ") + e.what());
  }
}

void append_trial(std::ostream& out, const TrialRecord& trial) {
  out << trial_to_json(trial).dump() << '\n';
  out.flush();
  if (!out) throw Error(ErrorKind::kIo, "failed to append to trial log");
}

std::vector<TrialRecord> read_trial_log(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIo, "cannot open " + path.string() + " for reading");
  std::vector<TrialRecord> trials;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      // A run killed mid-write leaves a partial last line; drop it.
      if (in.peek() == std::char_traits<char>::eof()) break;
      throw Error(ErrorKind::kFormat, "trial log line " + std::to_string(trials.size() + 1) + ": " + e.what());
    }
    TrialRecord t = trial_from_json(doc);
    if (t.index != trials.size()) throw Error(ErrorKind::kFormat, "trial log indices are not consecutive");
    trials.push_back(t);
  }
  return trials;
}

}  // namespace hdc
