#include "hdc/cli.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include "hdc/complexity.hpp"
#include "hdc/io.hpp"
#include "hdc/tuner.hpp"

namespace hdc::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr std::uint32_t kDefaultEpochs = 20;
constexpr double kDefaultTestFraction = 0.3;
constexpr int kBenchReps = 5;

const std::vector<std::string> kKinds{"rp", "rff"};

EncoderKind kind_of(const std::string& text) { return *parse_encoder_kind(text); }

fs::path scaler_path(const fs::path& model) { return fs::path(model.string() + ".scaler.json"); }

void write_scaler(const FeatureStats& stats, const fs::path& path) {
  write_json_line(json{{"mean", stats.mean}, {"std", stats.std}}, path);
}

FeatureStats read_scaler(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIo, "cannot open " + path.string());
  try {
    const json doc = json::parse(in);
    FeatureStats stats{doc.at("mean").get<std::vector<double>>(), doc.at("std").get<std::vector<double>>()};
    if (stats.mean.size() != stats.std.size()) throw Error(ErrorKind::kFormat, "scaler mean and std differ in length");
    return stats;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::kFormat, path.string() + ": " + e.what());
  }
}

Dataset generate(const std::string& task, std::size_t samples, std::uint64_t seed) {
  return task == "signal" ? gen_signal_task(samples, Seed{seed}) : gen_image_task(samples, Seed{seed});
}

struct GenArgs {
  std::string task;
  std::size_t samples = 0;
  std::uint64_t seed = 1;
  std::string out;
};

int gen_data(const GenArgs& a, std::ostream& out) {
  const Dataset ds = generate(a.task, a.samples, a.seed);
  write_dataset(ds, a.out);
  out << json{{"out", a.out},
              {"N", ds.size()},
              {"J", ds.feature_count()},
              {"L", ds.classes},
              {"provenance", ds.provenance}}
             .dump()
      << '\n';
  return kOk;
}

struct TrainArgs {
  std::string data;
  std::string kind;
  std::uint32_t dim = 0;
  double sigma = 1.0;
  std::uint32_t epochs = kDefaultEpochs;
  double test_frac = kDefaultTestFraction;
  std::uint64_t seed = 1;
  std::string model_out;
  std::string metrics_out;
};

int train(const TrainArgs& a, std::ostream& out) {
  const EncoderKind kind = kind_of(a.kind);
  EncoderConfig{kind, a.dim, a.sigma, Seed{a.seed}}.validate();
  if (!(a.test_frac > 0.0 && a.test_frac < 1.0)) throw Error(ErrorKind::kParameter, "--test-frac must lie in (0, 1)");
  const Dataset ds = read_dataset(a.data);
  const Split parts = split(ds, a.test_frac, Seed{a.seed});
  EvalOptions options;
  options.epochs = a.epochs;
  options.early_stop = false;
  options.reps = kBenchReps;
  const Theta theta{kind, a.dim, a.sigma};
  const Evaluation result = evaluate_full(theta, parts, Seed{a.seed}, options);

  save_model(result.model.memory, a.model_out);
  write_scaler(result.stats, scaler_path(a.model_out));
  const json config{{"kind", a.kind},
                    {"dim", a.dim},
                    {"sigma_b", a.sigma},
                    {"epochs", a.epochs},
                    {"seed", a.seed},
                    {"test_frac", a.test_frac},
                    {"early_stop", false},
                    {"data", a.data},
                    {"train_samples", parts.train.size()},
                    {"test_samples", parts.test.size()},
                    {"corrections", result.model.stats.corrections_per_epoch}};
  const json doc = metrics_json(result.metrics, config);
  write_json_line(doc, a.metrics_out);
  out << doc.dump() << '\n';
  return kOk;
}

struct EvalArgs {
  std::string model;
  std::string data;
  std::string metrics_out;
};

int eval(const EvalArgs& a, std::ostream& out) {
  const LoadedModel loaded = load_model(a.model);
  const Dataset ds = read_dataset(a.data);
  const std::uint32_t expected = loaded.memory.shape().features;
  if (ds.feature_count() != expected) {
    throw Error(ErrorKind::kShape, "data has J=" + std::to_string(ds.feature_count()) + " but model expects J=" +
                                       std::to_string(expected));
  }
  if (ds.classes != loaded.memory.classes()) {
    throw Error(ErrorKind::kShape, "data has L=" + std::to_string(ds.classes) + " but model expects L=" +
                                       std::to_string(loaded.memory.classes()));
  }
  const fs::path sidecar = scaler_path(a.model);
  const bool have_scaler = fs::exists(sidecar);
  const FeatureStats stats = have_scaler ? read_scaler(sidecar) : feature_stats(ds.features);
  const FloatMatrix x = stats.apply(ds.features);

  const auto counted = scoped_count(Stage::kInfer, [&] { return classify(loaded.memory, loaded.basis, x); });
  const double seconds = median_time(kBenchReps, [&] { (void)classify(loaded.memory, loaded.basis, x); });

  MetricsRecord m;
  m.accuracy = accuracy(counted.value, ds.labels);
  m.inference_time_ms = seconds * 1e3;
  m.ops[Stage::kInfer] = counted.ops;
  const auto& cfg = loaded.memory.config();
  const json config{{"kind", std::string(to_string(cfg.kind))},
                    {"dim", cfg.dim},
                    {"sigma_b", cfg.sigma},
                    {"epochs", nullptr},
                    {"seed", cfg.seed.value},
                    {"model", a.model},
                    {"data", a.data},
                    {"scaler", have_scaler ? "train" : "self"}};
  const json doc = metrics_json(m, config);
  write_json_line(doc, a.metrics_out);
  out << doc.dump() << '\n';
  return kOk;
}

struct BenchArgs {
  std::vector<std::uint32_t> dims;
  std::string task;
  std::size_t samples = 0;
  std::uint64_t seed = 1;
  std::string out;
  std::string kind = "rp";
};

int bench(const BenchArgs& a, std::ostream& out) {
  const EncoderKind kind = kind_of(a.kind);
  if (a.dims.empty()) throw Error(ErrorKind::kParameter, "--dims is empty");
  for (const std::uint32_t dim : a.dims) EncoderConfig{kind, dim, 1.0, Seed{a.seed}}.validate();
  const Dataset ds = generate(a.task, a.samples, a.seed);
  const Split parts = split(ds, kDefaultTestFraction, Seed{a.seed});
  std::ofstream csv(a.out, std::ios::trunc);
  if (!csv) throw Error(ErrorKind::kIo, "cannot open " + a.out + " for writing");
  csv << "dim,kind,t_infer_ms,t_train_s,energy_j,ops_measured,ops_analytic,match\n";
  bool all_match = true;
  for (const std::uint32_t dim : a.dims) {
    EvalOptions options;
    options.epochs = kDefaultEpochs;
    options.early_stop = false;
    options.reps = kBenchReps;
    const Theta theta{kind, dim, 1.0};
    const Evaluation r = evaluate_full(theta, parts, Seed{a.seed}, options);

    // Training, retraining over the cached encodings, and test inference.
    CostQuery q;
    q.features = ds.feature_count();
    q.dim = dim;
    q.classes = ds.classes;
    q.kind = kind;
    q.samples = parts.train.size();
    std::uint64_t analytic = training_cost(q).total;
    CostQuery retrain = q;
    retrain.samples = parts.train.size() * r.model.stats.epochs_run;
    retrain.corrections = r.model.stats.total_corrections();
    analytic += retraining_cost_cached(retrain).total;
    CostQuery infer = q;
    infer.samples = parts.test.size();
    analytic += infer.samples * inference_cost(infer).total;

    const auto& ops = r.metrics.ops;
    const std::uint64_t measured =
        ops[Stage::kTrain].arithmetic() + ops[Stage::kRetrain].arithmetic() + ops[Stage::kInfer].arithmetic();
    const bool match = measured == analytic;
    all_match = all_match && match;
    csv << dim << ',' << a.kind << ',' << r.metrics.inference_time_ms << ',' << r.metrics.train_time_s
        << ',' << r.metrics.energy_j << ',' << measured << ',' << analytic << ',' << (match ? "PASS" : "FAIL") << '\n';
    csv.flush();
    out << "D=" << dim << " t_infer_ms=" << r.metrics.inference_time_ms << " ops=" << measured
        << (match ? " PASS" : " FAIL") << '\n';
  }
  if (!csv) throw Error(ErrorKind::kIo, "write failed for " + a.out);
  return all_match ? kOk : kFailure;
}

struct TuneArgs {
  std::string data;
  std::size_t episodes = 50;
  double acc_min = 0.0;
  double infer_max_ms = kUnbounded;
  double train_max_s = kUnbounded;
  double energy_max_j = kUnbounded;
  std::uint64_t seed = 1;
  std::string out;
  bool resume = false;
};

int tune(const TuneArgs& a, std::ostream& out) {
  Constraints constraints{a.acc_min, a.infer_max_ms, a.train_max_s, a.energy_max_j};
  constraints.validate();
  const Dataset ds = read_dataset(a.data);
  const Split parts = split(ds, kDefaultTestFraction, Seed{a.seed});

  std::vector<TrialRecord> history;
  if (a.resume && fs::exists(a.out)) {
    history = read_trial_log(a.out);
    if (history.size() > a.episodes) history.resize(a.episodes);
  }
  // Rewrite the replayed prefix so a partial last line is dropped.
  std::ofstream log(a.out, std::ios::trunc);
  if (!log) throw Error(ErrorKind::kIo, "cannot open " + a.out + " for writing");
  for (const auto& t : history) append_trial(log, t);

  TuneOptions options;
  options.episodes = a.episodes;
  options.seed = Seed{a.seed};
  options.on_trial = [&](const TrialRecord& t) {
    append_trial(log, t);
    out << trial_to_json(t).dump() << '\n';
  };
  const Evaluator evaluator = [&](const Theta& theta, Seed seed) { return evaluate(theta, parts, seed); };
  const TuneResult result = run(SearchSpace{}, constraints, evaluator, options, std::move(history));

  const auto best = best_feasible(result.trials);
  const auto feasible = std::ranges::count_if(result.trials, [](const TrialRecord& t) { return t.feasible; });
  const json summary{{"trials", result.trials.size()},
                     {"feasible", feasible},
                     {"front", result.front.members},
                     {"best", best ? trial_to_json(result.trials[*best]) : json(nullptr)},
                     {"config",
                      {{"data", a.data},
                       {"episodes", a.episodes},
                       {"acc_min", a.acc_min},
                       {"infer_max_ms", a.infer_max_ms},
                       {"train_max_s", a.train_max_s},
                       {"energy_max_j", a.energy_max_j},
                       {"seed", a.seed},
                       {"resumed", a.resume}}}};
  out << summary.dump() << '\n';
  return best ? kOk : kInfeasible;
}

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kParameter:
    case ErrorKind::kConfig:
    case ErrorKind::kRange:
      return kUsage;
    case ErrorKind::kShape:
    case ErrorKind::kLabel:
    case ErrorKind::kIo:
    case ErrorKind::kBadMagic:
    case ErrorKind::kBadVersion:
    case ErrorKind::kTruncated:
    case ErrorKind::kNormMismatch:
    case ErrorKind::kFormat:
      return kDataError;
  }
  return kFailure;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Hyperdimensional classifier toolkit", "hdc"};
  app.require_subcommand(1);
  app.allow_extras(false);

  GenArgs gen;
  auto* gen_cmd = app.add_subcommand("gen-data", "Generate a synthetic dataset file");
  gen_cmd->add_option("--task", gen.task, "signal or image")->required()->check(CLI::IsMember({"signal", "image"}));
  gen_cmd->add_option("--samples", gen.samples, "Number of samples")->required();
  gen_cmd->add_option("--seed", gen.seed, "Generator seed")->capture_default_str();
  gen_cmd->add_option("--out", gen.out, "Output dataset path")->required();

  TrainArgs tr;
  auto* train_cmd = app.add_subcommand("train", "Fit a model and report test metrics");
  train_cmd->add_option("--data", tr.data, "Dataset path")->required();
  train_cmd->add_option("--encoder", tr.kind, "rp or rff")->required()->check(CLI::IsMember(kKinds));
  train_cmd->add_option("--dim", tr.dim, "Hypervector dimension D")->required();
  train_cmd->add_option("--sigma", tr.sigma, "Basis standard deviation")->capture_default_str();
  train_cmd->add_option("--epochs", tr.epochs, "Retraining epochs")->capture_default_str();
  train_cmd->add_option("--test-frac", tr.test_frac, "Held-out fraction")->capture_default_str();
  train_cmd->add_option("--seed", tr.seed, "Split and basis seed")->capture_default_str();
  train_cmd->add_option("--model-out", tr.model_out, "Model output path")->required();
  train_cmd->add_option("--metrics-out", tr.metrics_out, "Metrics JSON path")->required();

  EvalArgs ev;
  auto* eval_cmd = app.add_subcommand("eval", "Score a saved model on a dataset");
  eval_cmd->add_option("--model", ev.model, "Model path")->required();
  eval_cmd->add_option("--data", ev.data, "Dataset path")->required();
  eval_cmd->add_option("--metrics-out", ev.metrics_out, "Metrics JSON path")->required();

  BenchArgs be;
  std::string dims_text;
  auto* bench_cmd = app.add_subcommand("bench", "Sweep D and check measured against analytic op counts");
  bench_cmd->add_option("--dims", dims_text, "Comma-separated list of D")->required();
  bench_cmd->add_option("--task", be.task, "signal or image")->required()->check(CLI::IsMember({"signal", "image"}));
  bench_cmd->add_option("--samples", be.samples, "Number of samples")->required();
  bench_cmd->add_option("--seed", be.seed, "Data and basis seed")->capture_default_str();
  bench_cmd->add_option("--out", be.out, "CSV output path")->required();
  bench_cmd->add_option("--encoder", be.kind, "rp or rff")->check(CLI::IsMember(kKinds))->capture_default_str();

  TuneArgs tu;
  auto* tune_cmd = app.add_subcommand("tune", "Constrained Bayesian search over encoder, D and sigma");
  tune_cmd->add_option("--data", tu.data, "Dataset path")->required();
  tune_cmd->add_option("--episodes", tu.episodes, "Number of trials")->capture_default_str();
  tune_cmd->add_option("--acc-min", tu.acc_min, "Minimum test accuracy");
  tune_cmd->add_option("--infer-max-ms", tu.infer_max_ms, "Inference time bound");
  tune_cmd->add_option("--train-max-s", tu.train_max_s, "Training time bound");
  tune_cmd->add_option("--energy-max-j", tu.energy_max_j, "Training energy bound");
  tune_cmd->add_option("--seed", tu.seed, "Search and basis seed")->capture_default_str();
  tune_cmd->add_option("--out", tu.out, "Trial log (JSON lines)")->required();
  tune_cmd->add_flag("--resume", tu.resume, "Replay an existing trial log before continuing");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }

  try {
    if (*gen_cmd) return gen_data(gen, out);
    if (*train_cmd) return train(tr, out);
    if (*eval_cmd) return eval(ev, out);
    if (*bench_cmd) {
      std::stringstream ss(dims_text);
      std::string item;
      while (std::getline(ss, item, ',')) {
        try {
          std::size_t used = 0;
          const long long v = std::stoll(item, &used);
          if (used != item.size() || v < 0 || v > std::numeric_limits<std::uint32_t>::max()) throw std::invalid_argument(item);
          be.dims.push_back(static_cast<std::uint32_t>(v));
        } catch (const std::logic_error&) {
          err << "error: --dims expects comma-separated integers, got \"" << item << "\"\n";
          return kUsage;
        }
      }
      return bench(be, out);
    }
    if (*tune_cmd) return tune(tu, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kFailure;
  }
  return kFailure;
}

}  // namespace hdc::cli
