#include "sparsemine_tools/cli.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "sparsemine/classifier.hpp"
#include "sparsemine/dataio.hpp"
#include "sparsemine/dictionary_learning.hpp"
#include "sparsemine/errors.hpp"
#include "sparsemine/gpr_synth.hpp"
#include "sparsemine/stats_metrics.hpp"

#ifndef SPARSEMINE_VERSION
#define SPARSEMINE_VERSION "unknown"
#endif

namespace sparsemine::cli {
namespace {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

unsigned default_jobs() {
  const char* env = std::getenv("SPARSEMINE_THREADS");
  if (env == nullptr || *env == '\0') return 1;
  unsigned value = 0;
  const std::string_view text(env);
  const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size() || value == 0) {
    throw InvalidArgument("SPARSEMINE_THREADS must be a positive integer");
  }
  return value;
}

// Configuration files are user input: malformed ones are usage errors.
json read_config_file(const std::string& path) {
  try {
    return read_json(path);
  } catch (const FormatError& e) {
    throw InvalidArgument(e.what());
  }
}

template <typename T>
T config_from(const json& j, const std::string& what) {
  try {
    return j.get<T>();
  } catch (const json::exception& e) {
    throw InvalidArgument(what + ": " + e.what());
  }
}

SignalMatrix load_signals(const std::string& source) {
  const fs::path path(source);
  if (path.extension() == ".spmx") return read_matrix(path);
  if (path.extension() == ".csv") return read_csv_matrix(path);
  return load_dataset(path).profiles;
}

fs::path with_suffix(const std::string& prefix, std::string_view suffix) {
  fs::path p(prefix);
  p += std::string(suffix);
  return p;
}

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

/// Echo of a run, written next to the primary output as <out>.run.json.
struct RunLog {
  std::string command;
  std::vector<std::string> args;
  json config = json::object();
  std::vector<std::string> outputs;
  Clock::time_point start = Clock::now();

  void write(const std::string& out_prefix) {
    const fs::path path = with_suffix(out_prefix, ".run.json");
    outputs.push_back(path.string());
    json doc = {{"command", command},
                {"arguments", args},
                {"version", SPARSEMINE_VERSION},
                {"config", config},
                {"outputs", outputs},
                {"wall_time_s", seconds_since(start)}};
    write_json(path, doc);
  }
};

// ---------------------------------------------------------------- generate

struct GenerateOptions {
  std::string layout;
  std::string preset = "standard";
  std::uint64_t seed = 0;
  std::string out;
};

int cmd_generate(const GenerateOptions& opt, RunLog& log, std::ostream& out) {
  SurveyLayout layout = opt.preset == "separable" ? SurveyLayout::separable() : SurveyLayout::standard();
  PulseParams pulse;
  if (!opt.layout.empty()) {
    const json doc = read_config_file(opt.layout);
    if (!doc.is_object()) throw InvalidArgument("layout file must hold a JSON object");
    json layout_doc = doc.contains("layout") ? doc.at("layout") : doc;
    if (doc.contains("pulse")) pulse = config_from<PulseParams>(doc.at("pulse"), "pulse");
    if (doc.contains("layout")) {
      for (const auto& [key, value] : doc.items()) {
        if (key != "layout" && key != "pulse") throw InvalidArgument("layout file: unknown key '" + key + "'");
      }
    }
    if (!layout_doc.contains("preset")) layout_doc["preset"] = opt.preset;
    layout = config_from<SurveyLayout>(layout_doc, "layout");
  }
  layout.validate();
  pulse.validate();

  const SurveyDataset dataset = generate_survey(layout, pulse, opt.seed);
  const json config = {{"layout", layout}, {"pulse", pulse}};
  save_dataset(opt.out, dataset, config);
  log.config = config;
  log.config["seed"] = opt.seed;
  log.outputs = {matrix_path(opt.out).string(), manifest_path(opt.out).string()};

  const std::vector<Index> counts = dataset.class_histogram();
  out << "pixels: " << dataset.pixel_count() << " (" << dataset.x_cells << " x " << dataset.y_cells
      << "), samples: " << dataset.profiles.rows() << "\n";
  for (std::size_t c = 0; c < counts.size(); ++c) {
    out << "  " << dataset.class_names[c] << ": " << counts[c] << "\n";
  }
  return kOk;
}

// ------------------------------------------------------------------- learn

struct TrainFlags {
  std::string config_file;
  Index atoms = 0;
  Index iterations = 0;
  Index sparsity = 0;
  double delta = 0.0;
  bool entropy = false;
  Index new_batch = 0;
  Index previous_batch = 0;
  Index drop_after = 0;
  double chi = 0.0;
  double lambda = 0.0;
  Index odl_batch = 0;
  std::uint64_t seed = 0;
  std::map<std::string, CLI::Option*> given;

  void add_to(CLI::App& app) {
    given["config"] = app.add_option("--config", config_file, "JSON file with training parameters");
    given["k"] = app.add_option("--k", atoms, "number of atoms K (0: automatic)");
    given["nt"] = app.add_option("--nt", iterations, "iterations N_t (ksvd, odl)");
    given["ks"] = app.add_option("--ks", sparsity, "sparsity K_s (0 disables the rule)");
    auto* delta_opt = app.add_option("--delta", delta, "relative residual threshold for OMP");
    auto* entropy_opt = app.add_flag("--entropy", entropy, "derive the residual threshold from entropy");
    delta_opt->excludes(entropy_opt);
    given["delta"] = delta_opt;
    given["entropy"] = entropy_opt;
    given["nb"] = app.add_option("--nb", new_batch, "new-element mini-batch N_b (dominodl)");
    given["nr"] = app.add_option("--nr", previous_batch, "previous-element mini-batch N_r (dominodl)");
    given["nu"] = app.add_option("--nu", drop_after, "drop-off age N_u (dominodl)");
    given["chi"] = app.add_option("--chi", chi, "convergence threshold (dominodl)");
    given["lambda"] = app.add_option("--lambda", lambda, "l1 weight relative to ||y|| (odl)");
    given["odl-batch"] = app.add_option("--odl-batch", odl_batch, "samples per odl iteration");
    given["seed"] = app.add_option("--seed", seed, "random seed");
  }

  bool has(const char* name) const { return given.at(name)->count() > 0; }

  TrainConfig resolve() const {
    TrainConfig cfg;
    if (!config_file.empty()) cfg = config_from<TrainConfig>(read_config_file(config_file), "train config");
    if (has("k")) cfg.atoms = atoms;
    if (has("nt")) cfg.iterations = iterations;
    if (has("ks")) cfg.sparsity = sparsity;
    if (has("delta")) {
      cfg.delta = delta;
      cfg.entropy_delta = false;
    }
    if (has("entropy")) cfg.entropy_delta = entropy;
    if (has("nb")) cfg.new_batch = new_batch;
    if (has("nr")) cfg.previous_batch = previous_batch;
    if (has("nu")) cfg.drop_after = drop_after;
    if (has("chi")) cfg.chi = chi;
    if (has("lambda")) cfg.lambda = lambda;
    if (has("odl-batch")) cfg.odl_batch = odl_batch;
    if (has("seed")) cfg.seed = seed;
    cfg.validate();
    return cfg;
  }
};

struct LearnOptions {
  std::string algo;
  std::string train;
  std::string out;
  TrainFlags flags;
};

int cmd_learn(const LearnOptions& opt, RunLog& log, std::ostream& out) {
  const Learner learner = parse_learner(opt.algo);
  TrainConfig cfg = opt.flags.resolve();
  const SignalMatrix signals = load_signals(opt.train);
  cfg.atoms = cfg.resolved_atoms(signals);
  const StopRule stop = cfg.stop_rule(signals);

  LearnResult result = learn(learner, signals, cfg);
  DictionaryBundle bundle{result.dictionary, learner, cfg, stop, result.report};
  save_dictionary(opt.out, bundle);

  json report = report_to_json(result.report);
  report["learner"] = std::string(to_string(learner));
  report["atoms"] = result.dictionary.atom_count();
  report["signal_dim"] = result.dictionary.signal_dim();
  report["failed_codes"] = result.codes.failed_count();
  const fs::path report_path = with_suffix(opt.out, ".report.json");
  write_json(report_path, report);

  log.config = {{"learner", std::string(to_string(learner))}, {"train", cfg}, {"stop", stop}, {"source", opt.train}};
  log.outputs = {matrix_path(opt.out).string(), manifest_path(opt.out).string(), report_path.string()};

  char line[160];
  std::snprintf(line, sizeof line, "%s: K=%lld M=%lld iterations=%lld wall_time=%.4fs error=%.6g\n",
                std::string(to_string(learner)).c_str(), static_cast<long long>(result.dictionary.atom_count()),
                static_cast<long long>(result.dictionary.signal_dim()),
                static_cast<long long>(result.report.iterations), result.report.wall_time_s,
                result.report.final_error);
  out << line;
  return kOk;
}

// ------------------------------------------------------------------- sweep

// "L/8" style atom counts are resolved against the training set size.
json resolve_fractions(json point, Index columns) {
  if (point.contains("K") && point.at("K").is_string()) {
    const std::string text = point.at("K").get<std::string>();
    Index divisor = 0;
    if (text.rfind("L/", 0) != 0) throw InvalidArgument("grid: K must be a number or \"L/<n>\"");
    const auto res = std::from_chars(text.data() + 2, text.data() + text.size(), divisor);
    if (res.ec != std::errc() || res.ptr != text.data() + text.size() || divisor < 1) {
      throw InvalidArgument("grid: bad K fraction '" + text + "'");
    }
    point["K"] = std::max<Index>(1, columns / divisor);
  }
  return point;
}

/// Grid file: {"base": {...}, "points": [{...}, ...]} or {"base": {...}, "axes": {"K": [...], ...}}.
/// Axes expand to their cartesian product, keys in lexical order, last key fastest.
std::vector<TrainConfig> parse_grid(const json& doc, Index columns) {
  if (!doc.is_object()) throw InvalidArgument("grid file must hold a JSON object");
  for (const auto& [key, value] : doc.items()) {
    if (key != "base" && key != "points" && key != "axes") throw InvalidArgument("grid: unknown key '" + key + "'");
  }
  const json base = doc.value("base", json::object());
  std::vector<json> points;
  if (doc.contains("points")) {
    for (const json& p : doc.at("points")) {
      json merged = base;
      merged.update(p);
      points.push_back(std::move(merged));
    }
  }
  if (doc.contains("axes")) {
    const json& axes = doc.at("axes");
    if (!axes.is_object() || axes.empty()) throw InvalidArgument("grid: axes must be a non-empty object");
    std::vector<json> product{base};
    for (const auto& [key, values] : axes.items()) {
      if (!values.is_array() || values.empty()) throw InvalidArgument("grid: axis '" + key + "' must be a non-empty array");
      std::vector<json> next;
      for (const json& partial : product) {
        for (const json& v : values) {
          json p = partial;
          p[key] = v;
          next.push_back(std::move(p));
        }
      }
      product = std::move(next);
    }
    points.insert(points.end(), product.begin(), product.end());
  }
  if (points.empty()) throw InvalidArgument("grid is empty");
  std::vector<TrainConfig> grid;
  for (const json& p : points) {
    TrainConfig cfg = config_from<TrainConfig>(resolve_fractions(p, columns), "grid point");
    cfg.validate();
    grid.push_back(cfg);
  }
  return grid;
}

/// Reference used when none is given: one iteration, K = L/8, default batches.
TrainConfig default_reference(Index columns) {
  TrainConfig ref;
  ref.iterations = 1;
  ref.atoms = std::max<Index>(1, columns / 8);
  ref.new_batch = 30;
  ref.previous_batch = 10;
  ref.drop_after = 10;
  return ref;
}

struct SweepOptions {
  std::string algo;
  std::string train;
  std::string grid;
  std::string reference;
  double alpha = 0.05;
  unsigned jobs = 1;
  std::string out;
};

int cmd_sweep(const SweepOptions& opt, RunLog& log, std::ostream& out, std::ostream& err) {
  const Learner learner = parse_learner(opt.algo);
  if (!(opt.alpha > 0.0 && opt.alpha < 2.0)) throw InvalidArgument("--alpha must lie in (0, 2)");
  const SignalMatrix signals = load_signals(opt.train);
  const std::vector<TrainConfig> grid = parse_grid(read_config_file(opt.grid), signals.cols());
  TrainConfig reference = default_reference(signals.cols());
  if (!opt.reference.empty()) {
    reference = config_from<TrainConfig>(resolve_fractions(read_config_file(opt.reference), signals.cols()),
                                         "reference");
  }
  reference.validate();

  const SweepResult result = parameter_sweep(learner, grid, reference, signals, opt.alpha, opt.jobs);
  write_sweep_csv(fs::path(opt.out), result.records);

  json grid_json = json::array();
  for (const auto& g : grid) grid_json.push_back(g);
  log.config = {{"learner", std::string(to_string(learner))},
                {"grid", grid_json},
                {"reference", reference},
                {"alpha", opt.alpha},
                {"jobs", opt.jobs},
                {"source", opt.train}};
  log.outputs = {opt.out};

  Index failed = 0;
  for (const SweepRecord& r : result.records) {
    if (r.failed) {
      ++failed;
      err << "grid point failed: " << r.error << "\n";
    }
  }
  out << "sweep: " << result.records.size() << " grid points, " << failed << " failed\n";
  return kOk;
}

// ---------------------------------------------------------------- classify

struct ClassifyOptions {
  std::string dict;
  std::string train;
  std::string test;
  double keep = 1.0;
  std::uint64_t seed = 0;
  Index folds = 10;
  unsigned jobs = 1;
  std::string out;
};

int cmd_classify(const ClassifyOptions& opt, RunLog& log, std::ostream& out) {
  if (opt.folds < 2) throw InvalidArgument("--cv-folds must be >= 2");
  const DictionaryBundle bundle = load_dictionary(opt.dict);
  const SurveyDataset train = load_dataset(opt.train);
  const SurveyDataset test = load_dataset(opt.test);
  if (train.profiles.rows() != bundle.dictionary.signal_dim() ||
      test.profiles.rows() != bundle.dictionary.signal_dim()) {
    throw DataError("surveys and dictionary disagree on the number of samples");
  }
  if (train.class_names != test.class_names) throw DataError("training and test surveys use different classes");

  const std::vector<Index> train_counts = train.class_histogram();
  const std::vector<Index> test_counts = test.class_histogram();
  for (std::size_t c = 0; c < test_counts.size(); ++c) {
    if (test_counts[c] > 0 && train_counts[c] == 0) {
      throw DataError("class '" + test.class_names[c] + "' absent from training set");
    }
  }

  const Matrix features = batch_omp(train.profiles, bundle.dictionary, bundle.stop, opt.jobs).dense();
  const CrossValidationResult cv = cross_validate(features, train.labels, default_cost_grid(),
                                                  default_gamma_grid(), opt.folds, opt.seed, opt.jobs);
  SvmModel model = svm_train_multiclass(features, train.labels, SvmParams{cv.best_cost, cv.best_gamma});
  model.dictionary_fingerprint = bundle.dictionary.fingerprint();

  std::vector<Index> rows;
  std::optional<std::span<const Index>> mask;
  if (opt.keep < 1.0) {
    rows = reduce_samples(test.profiles, opt.keep, opt.seed).rows;
    mask = std::span<const Index>(rows);
    out << rows.size() << " rows kept of " << test.profiles.rows() << "\n";
  } else if (!(opt.keep == 1.0)) {
    throw InvalidArgument("--keep must lie in (0, 1]");
  }

  const ClassMap map = classify_survey(bundle.dictionary, model, test, bundle.stop, mask, opt.jobs);
  const ConfusionMatrix cm = confusion_matrix(map, test.labels, test.class_names);
  const PccResult scores = pcc(map, test.halos, test.labels, test.class_count());

  const fs::path pgm = with_suffix(opt.out, ".map.pgm");
  const fs::path map_csv = with_suffix(opt.out, ".map.csv");
  const fs::path confusion = with_suffix(opt.out, ".confusion.csv");
  const fs::path pcc_path = with_suffix(opt.out, ".pcc.json");
  const std::string model_prefix = opt.out + ".model";
  write_class_map_pgm(pgm, map, test.class_count());
  write_class_map_csv(map_csv, map);
  write_confusion_csv(confusion, cm);
  json pcc_doc = pcc_to_json(scores, test.class_names);
  pcc_doc["cv"] = {{"best_cost", cv.best_cost},
                   {"best_gamma", cv.best_gamma},
                   {"best_accuracy", cv.best_accuracy},
                   {"folds_shrunk", cv.folds_shrunk}};
  pcc_doc["rows_kept"] = mask ? static_cast<Index>(rows.size()) : test.profiles.rows();
  write_json(pcc_path, pcc_doc);
  save_model(model_prefix, model, json{{"cv_folds", opt.folds}, {"seed", opt.seed}});

  log.config = {{"dict", opt.dict},
                {"train", opt.train},
                {"test", opt.test},
                {"keep", opt.keep},
                {"seed", opt.seed},
                {"cv_folds", opt.folds},
                {"jobs", opt.jobs},
                {"stop", bundle.stop},
                {"cost", cv.best_cost},
                {"gamma", cv.best_gamma}};
  if (mask) log.config["rows"] = rows;
  log.outputs = {pgm.string(), map_csv.string(), confusion.string(), pcc_path.string(),
                 matrix_path(model_prefix).string(), manifest_path(model_prefix).string()};

  char line[160];
  std::snprintf(line, sizeof line, "cv: C=%g gamma=%g accuracy=%.4f\n", cv.best_cost, cv.best_gamma,
                cv.best_accuracy);
  out << line;
  for (std::size_t c = 0; c < scores.per_class.size(); ++c) {
    std::snprintf(line, sizeof line, "P_CC %s: %.4f (%lld/%lld)\n", test.class_names[c].c_str(), scores.per_class[c],
                  static_cast<long long>(scores.correct[c]), static_cast<long long>(scores.evaluated[c]));
    out << line;
  }
  return kOk;
}

// ------------------------------------------------------------- reconstruct

struct ReconstructOptions {
  std::string dict;
  std::string data;
  Index bins = 20;
  unsigned jobs = 1;
  std::string out;
};

int cmd_reconstruct(const ReconstructOptions& opt, RunLog& log, std::ostream& out) {
  if (opt.bins < 1) throw InvalidArgument("--bins must be >= 1");
  const DictionaryBundle bundle = load_dictionary(opt.dict);
  const SignalMatrix signals = load_signals(opt.data);
  if (signals.rows() != bundle.dictionary.signal_dim()) throw DataError("data and dictionary disagree on M");
  const SparseCodes codes = batch_omp(signals, bundle.dictionary, bundle.stop, opt.jobs);
  const Matrix rebuilt = codes.reconstruct(bundle.dictionary.atoms());
  const std::vector<double> samples = similarity_samples(signals, rebuilt);
  const std::vector<double> mass = unit_interval_histogram(samples, opt.bins);
  write_epdf_csv(opt.out, mass);

  double mean = 0.0;
  for (double s : samples) mean += s;
  mean /= static_cast<double>(samples.size());
  log.config = {{"dict", opt.dict}, {"data", opt.data}, {"bins", opt.bins}, {"stop", bundle.stop}};
  log.outputs = {opt.out};
  char line[96];
  std::snprintf(line, sizeof line, "mean similarity: %.6f over %zu signals\n", mean, samples.size());
  out << line;
  return kOk;
}

// ------------------------------------------------------------------ timing

struct TimingOptions {
  std::string train;
  Index repeats = 5;
  double margin = 1.5;
  std::string out;
  TrainFlags flags;
};

int cmd_timing(const TimingOptions& opt, RunLog& log, std::ostream& out) {
  if (opt.repeats < 1) throw InvalidArgument("--repeats must be >= 1");
  const TrainConfig cfg = opt.flags.resolve();
  const SignalMatrix signals = load_signals(opt.train);
  std::map<Learner, double> median;
  json runs = json::object();
  for (Learner l : {Learner::ksvd, Learner::odl, Learner::cbwlsu, Learner::dominodl}) {
    std::vector<double> times;
    for (Index r = 0; r < opt.repeats; ++r) times.push_back(learn(l, signals, cfg).report.wall_time_s);
    runs[std::string(to_string(l))] = times;
    std::nth_element(times.begin(), times.begin() + static_cast<std::ptrdiff_t>(times.size() / 2), times.end());
    median[l] = times[times.size() / 2];
  }
  const auto faster = [&](Learner a, Learner b) { return median[a] * opt.margin <= median[b]; };
  const bool order = faster(Learner::dominodl, Learner::odl) && faster(Learner::odl, Learner::ksvd) &&
                     faster(Learner::dominodl, Learner::cbwlsu);

  json doc = {{"median_s", json::object()}, {"runs_s", runs}, {"margin", opt.margin}, {"ordering_holds", order}};
  char line[96];
  for (const auto& [l, t] : median) {
    doc["median_s"][std::string(to_string(l))] = t;
    std::snprintf(line, sizeof line, "%-9s median %.4fs\n", std::string(to_string(l)).c_str(), t);
    out << line;
  }
  out << "dominodl < odl < ksvd and dominodl < cbwlsu (x" << opt.margin << "): " << (order ? "yes" : "no") << "\n";
  write_json(opt.out, doc);
  log.config = {{"train", cfg}, {"source", opt.train}, {"repeats", opt.repeats}, {"margin", opt.margin}};
  log.outputs = {opt.out};
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Dictionary learning and sparse-code classification of synthetic GPR surveys", "sparsemine"};
  app.require_subcommand(1);
  app.set_version_flag("--version", SPARSEMINE_VERSION);

  unsigned jobs = 1;
  try {
    jobs = default_jobs();
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }

  GenerateOptions gen;
  auto* generate = app.add_subcommand("generate", "generate a labelled synthetic survey");
  generate->add_option("--layout", gen.layout, "layout JSON file")->check(CLI::ExistingFile);
  generate->add_option("--preset", gen.preset, "preset used for missing layout fields")
      ->check(CLI::IsMember({"standard", "separable"}));
  generate->add_option("--seed", gen.seed, "random seed");
  generate->add_option("--out", gen.out, "output bundle prefix")->required();

  LearnOptions lrn;
  auto* learn_cmd = app.add_subcommand("learn", "train a dictionary");
  learn_cmd->add_option("--algo", lrn.algo, "ksvd | odl | cbwlsu | dominodl")
      ->required()
      ->check(CLI::IsMember({"ksvd", "odl", "cbwlsu", "dominodl"}));
  learn_cmd->add_option("--train", lrn.train, "training bundle prefix, .spmx or .csv")->required();
  learn_cmd->add_option("--out", lrn.out, "output bundle prefix")->required();
  lrn.flags.add_to(*learn_cmd);

  SweepOptions swp;
  swp.jobs = jobs;
  auto* sweep = app.add_subcommand("sweep", "parametric analysis over a grid of training parameters");
  sweep->add_option("--algo", swp.algo, "ksvd | odl | cbwlsu | dominodl")
      ->required()
      ->check(CLI::IsMember({"ksvd", "odl", "cbwlsu", "dominodl"}));
  sweep->add_option("--train", swp.train, "training bundle prefix, .spmx or .csv")->required();
  sweep->add_option("--grid", swp.grid, "grid JSON file")->required()->check(CLI::ExistingFile);
  sweep->add_option("--reference", swp.reference, "reference config JSON file")->check(CLI::ExistingFile);
  sweep->add_option("--alpha", swp.alpha, "DKW significance level");
  sweep->add_option("--jobs", swp.jobs, "worker threads")->check(CLI::PositiveNumber);
  sweep->add_option("--out", swp.out, "output CSV")->required();

  ClassifyOptions cls;
  cls.jobs = jobs;
  auto* classify = app.add_subcommand("classify", "train the SVM on sparse codes and classify a survey");
  classify->add_option("--dict", cls.dict, "dictionary bundle prefix")->required();
  classify->add_option("--train", cls.train, "training survey bundle prefix")->required();
  classify->add_option("--test", cls.test, "test survey bundle prefix")->required();
  classify->add_option("--keep", cls.keep, "fraction of range samples kept");
  classify->add_option("--seed", cls.seed, "seed for the sample mask and the folds");
  classify->add_option("--cv-folds", cls.folds, "cross-validation folds");
  classify->add_option("--jobs", cls.jobs, "worker threads")->check(CLI::PositiveNumber);
  classify->add_option("--out", cls.out, "output prefix")->required();

  ReconstructOptions rec;
  rec.jobs = jobs;
  auto* reconstruct = app.add_subcommand("reconstruct", "similarity histogram of sparse reconstructions");
  reconstruct->add_option("--dict", rec.dict, "dictionary bundle prefix")->required();
  reconstruct->add_option("--data", rec.data, "survey bundle prefix, .spmx or .csv")->required();
  reconstruct->add_option("--bins", rec.bins, "histogram bins");
  reconstruct->add_option("--jobs", rec.jobs, "worker threads")->check(CLI::PositiveNumber);
  reconstruct->add_option("--out", rec.out, "output CSV")->required();

  TimingOptions tim;
  auto* timing = app.add_subcommand("timing", "median wall time of every learner on one training set");
  timing->add_option("--train", tim.train, "training bundle prefix, .spmx or .csv")->required();
  timing->add_option("--repeats", tim.repeats, "runs per learner");
  timing->add_option("--margin", tim.margin, "required speed-up factor for the ordering check");
  timing->add_option("--out", tim.out, "output JSON")->required();
  tim.flags.add_to(*timing);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::CallForVersion&) {
    out << SPARSEMINE_VERSION << "\n";
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    err << "run with --help for usage\n";
    return kUsage;
  }

  RunLog log;
  log.args = args;
  try {
    int code = kOk;
    std::string prefix;
    if (generate->parsed()) {
      log.command = "generate";
      code = cmd_generate(gen, log, out);
      prefix = gen.out;
    } else if (learn_cmd->parsed()) {
      log.command = "learn";
      code = cmd_learn(lrn, log, out);
      prefix = lrn.out;
    } else if (sweep->parsed()) {
      log.command = "sweep";
      code = cmd_sweep(swp, log, out, err);
      prefix = swp.out;
    } else if (classify->parsed()) {
      log.command = "classify";
      code = cmd_classify(cls, log, out);
      prefix = cls.out;
    } else if (reconstruct->parsed()) {
      log.command = "reconstruct";
      code = cmd_reconstruct(rec, log, out);
      prefix = rec.out;
    } else if (timing->parsed()) {
      log.command = "timing";
      code = cmd_timing(tim, log, out);
      prefix = tim.out;
    }
    log.write(prefix);
    return code;
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const DataError& e) {
    err << "data error: " << e.what() << "\n";
    return kData;
  } catch (const NumericalError& e) {
    err << "numerical error: " << e.what() << "\n";
    return kNumerical;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kData;
  } catch (const nlohmann::json::exception& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }
}

}  // namespace sparsemine::cli
