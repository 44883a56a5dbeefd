#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "interreflect/image.hpp"
#include "interreflect/simulation.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace interreflect;

namespace {

constexpr const char* kFooter =
    "Exit codes: 0 success, 2 configuration error, 3 dataset/image error,\n"
    "4 estimation failure.\n"
    "A JSON config file (--config) may preset any long option; flags win.";

struct Settings {
  std::string config;
  std::string dataset;
  std::string method;  // per-command default: simulate "pure", estimate "gm"
  int lines = 5;
  int trials = 100;
  std::uint64_t seed = 0;
  double alpha_low = 0.2;
  double alpha_high = 1.0;
  int threads = 1;
  double hist_bin = 0.1;
  std::string out = ".";
  std::string image;
  std::string annotation;
  std::string samples;
  std::string stats_out;
  // tolerance overrides
  double epsilon_channel = 1e-9;
  double epsilon_points = 1e-7;
  double epsilon_parallel = 1e-9;
  double epsilon_irls = 1e-12;
  double step_tolerance = 1e-10;
  int max_iterations = 1000;
  double clip_threshold = -1.0;  // <0: keep the annotation's value
  int min_valid_pixels = -1;
};

void apply_config(Settings& s, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw ConfigError(path + ": invalid JSON: " + e.what());
  }
  try {
    for (const auto& [key, value] : doc.items()) {
      if (key == "dataset") s.dataset = value.get<std::string>();
      else if (key == "method") s.method = value.get<std::string>();
      else if (key == "lines") s.lines = value.get<int>();
      else if (key == "trials") s.trials = value.get<int>();
      else if (key == "seed") s.seed = value.get<std::uint64_t>();
      else if (key == "alpha_low") s.alpha_low = value.get<double>();
      else if (key == "alpha_high") s.alpha_high = value.get<double>();
      else if (key == "threads") s.threads = value.get<int>();
      else if (key == "hist_bin") s.hist_bin = value.get<double>();
      else if (key == "out") s.out = value.get<std::string>();
      else if (key == "epsilon_channel") s.epsilon_channel = value.get<double>();
      else if (key == "epsilon_points") s.epsilon_points = value.get<double>();
      else if (key == "epsilon_parallel") s.epsilon_parallel = value.get<double>();
      else if (key == "epsilon_irls") s.epsilon_irls = value.get<double>();
      else if (key == "step_tolerance") s.step_tolerance = value.get<double>();
      else if (key == "max_iterations") s.max_iterations = value.get<int>();
      else if (key == "clip_threshold") s.clip_threshold = value.get<double>();
      else if (key == "min_valid_pixels") s.min_valid_pixels = value.get<int>();
      else throw ConfigError(path + ": unknown config key '" + key + "'");
    }
  } catch (const json::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

SolverOptions solver_options(const Settings& s) {
  SolverOptions opts;
  opts.epsilon_irls = s.epsilon_irls;
  opts.step_tolerance = s.step_tolerance;
  opts.max_iterations = s.max_iterations;
  opts.tol.epsilon_channel = s.epsilon_channel;
  opts.tol.epsilon_points = s.epsilon_points;
  opts.tol.epsilon_parallel = s.epsilon_parallel;
  return opts;
}

// Writes all artifacts under temporary names first so a failed run leaves no
// partial outputs behind.
class OutputSet {
 public:
  explicit OutputSet(const fs::path& dir) : dir_(dir) {
    fs::create_directories(dir_);
  }
  ~OutputSet() {
    for (const auto& [tmp, _] : pending_) {
      std::error_code ec;
      fs::remove(tmp, ec);
    }
  }
  std::string stage(const std::string& name) {
    const fs::path final = dir_ / name;
    const fs::path tmp = dir_ / (name + ".tmp");
    pending_.emplace_back(tmp, final);
    return tmp.string();
  }
  void commit() {
    for (const auto& [tmp, final] : pending_) fs::rename(tmp, final);
    pending_.clear();
  }

 private:
  fs::path dir_;
  std::vector<std::pair<fs::path, fs::path>> pending_;
};

int cmd_simulate(const Settings& s) {
  TrialPlan plan;
  plan.seed = s.seed;
  plan.trials_per_illuminant = s.trials;
  plan.lines_per_trial = s.lines;
  plan.alpha_low = s.alpha_low;
  plan.alpha_high = s.alpha_high;
  plan.method = parse_method(s.method.empty() ? "pure" : s.method);
  plan.solver = solver_options(s);
  plan.validate();
  if (s.dataset.empty())
    throw ConfigError("no dataset directory (use --dataset or INTERREFLECT_DATASET)");

  const SpectralDataset dataset = load_dataset(s.dataset);
  const auto samples =
      plan.method == Method::pure
          ? run_pure_simulation(dataset, plan, s.threads)
          : run_colorline_simulation(dataset, plan, s.threads);
  const ErrorStats stats = summarize_errors(samples);

  OutputSet outputs{fs::path(s.out)};
  write_samples_csv(outputs.stage("samples.csv"), samples);
  write_stats_csv(outputs.stage("stats.csv"), stats);
  write_histogram_csv(outputs.stage("histogram.csv"), samples, s.hist_bin);
  outputs.commit();

  std::cout << stats_csv_header() << '\n' << stats_csv_row(stats) << '\n';
  return 0;
}

int cmd_estimate(const Settings& s) {
  const SceneAnnotation loaded = load_annotation(s.annotation);
  SceneAnnotation ann = loaded;
  if (s.clip_threshold >= 0.0) ann.clip_threshold = s.clip_threshold;
  if (s.min_valid_pixels >= 0) ann.min_valid_pixels = s.min_valid_pixels;

  fs::path image_path = s.image.empty() ? fs::path(ann.image_path) : fs::path(s.image);
  if (s.image.empty() && image_path.is_relative())
    image_path = fs::path(s.annotation).parent_path() / image_path;

  const LinearImage img = load_image(image_path.string());
  const Method method = parse_method(s.method.empty() ? "gm" : s.method);
  if (method == Method::pure)
    throw ConfigError("method 'pure' is not applicable to scene estimation");
  const SceneReport report = estimate_scene(img, ann, method, solver_options(s));

  json doc;
  doc["method"] = method_name(report.estimate.method);
  doc["illuminant"] = {report.estimate.illuminant.r, report.estimate.illuminant.g,
                       report.estimate.illuminant.b};
  doc["per_line_residuals"] = report.estimate.per_line_residuals;
  doc["iterations"] = report.estimate.iterations;
  doc["converged"] = report.estimate.converged;
  doc["warnings"] = report.estimate.warnings;
  doc["skipped_triples"] = report.skipped_triples;
  if (report.ground_truth) {
    doc["ground_truth"] = {report.ground_truth->r, report.ground_truth->g,
                           report.ground_truth->b};
    doc["angular_error_deg"] = *report.angular_error_deg;
  }

  OutputSet outputs{fs::path(s.out)};
  {
    std::ofstream out(outputs.stage("report.json"), std::ios::binary);
    out << doc.dump(2) << '\n';
    if (!out) throw DataError("cannot write report.json under " + s.out);
  }
  outputs.commit();

  // stdout mirrors the JSON report
  std::cout << "method: " << doc["method"].get<std::string>() << '\n';
  std::cout << "illuminant:";
  for (const auto& v : doc["illuminant"]) std::cout << ' ' << v.dump();
  std::cout << '\n' << "per_line_residuals:";
  for (const auto& v : doc["per_line_residuals"]) std::cout << ' ' << v.dump();
  std::cout << '\n';
  if (doc.contains("angular_error_deg"))
    std::cout << "angular_error_deg: " << doc["angular_error_deg"].dump() << '\n';
  for (const auto& w : doc["warnings"])
    std::cout << "warning: " << w.get<std::string>() << '\n';
  for (const auto& w : doc["skipped_triples"])
    std::cout << "skipped: " << w.get<std::string>() << '\n';
  return 0;
}

int cmd_stats(const Settings& s) {
  const auto samples = read_samples_csv(s.samples);
  const ErrorStats stats = summarize_errors(samples);
  if (!s.stats_out.empty()) write_stats_csv(s.stats_out, stats);
  std::cout << stats_csv_header() << '\n' << stats_csv_row(stats) << '\n';
  return 0;
}

int run(int argc, char** argv) {
  Settings s;

  // Config values act as defaults, so the file is read before parsing.
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--config" && i + 1 < argc) apply_config(s, argv[i + 1]);
    else if (arg.rfind("--config=", 0) == 0) apply_config(s, arg.substr(9));
  }

  CLI::App app{"Illuminant chromaticity estimation from diffuse interreflections"};
  app.footer(kFooter);
  app.require_subcommand(1);
  app.add_option("--config", s.config, "JSON config file with option presets");

  auto add_tolerances = [&](CLI::App* cmd) {
    cmd->add_option("--config", s.config, "JSON config file with option presets");
    cmd->add_option("--epsilon-channel", s.epsilon_channel,
                    "relative dark-channel guard");
    cmd->add_option("--epsilon-points", s.epsilon_points,
                    "coincident-point guard for color lines");
    cmd->add_option("--epsilon-parallel", s.epsilon_parallel,
                    "parallel-line guard (|sin angle|)");
    cmd->add_option("--epsilon-irls", s.epsilon_irls,
                    "distance smoothing in the reweighting");
    cmd->add_option("--step-tolerance", s.step_tolerance,
                    "solver convergence step size");
    cmd->add_option("--max-iterations", s.max_iterations, "solver iteration cap");
  };

  CLI::App* simulate = app.add_subcommand(
      "simulate", "Monte-Carlo spectral simulation over a dataset");
  simulate->add_option("--dataset", s.dataset,
                       "directory with illuminants.csv, reflectances.csv, sensor.csv")
      ->envname("INTERREFLECT_DATASET");
  simulate->add_option("--method", s.method, "pure, gm or ls")
      ->default_str("pure");
  simulate->add_option("--lines", s.lines, "color lines per trial")
      ->capture_default_str();
  simulate->add_option("--trials", s.trials, "trials per illuminant")
      ->capture_default_str();
  simulate->add_option("--seed", s.seed, "RNG seed")->capture_default_str();
  simulate->add_option("--alpha-low", s.alpha_low, "mixing factor lower bound")
      ->capture_default_str();
  simulate->add_option("--alpha-high", s.alpha_high, "mixing factor upper bound")
      ->capture_default_str();
  simulate->add_option("--threads", s.threads,
                       "worker threads (does not affect output bytes)")
      ->capture_default_str();
  simulate->add_option("--hist-bin", s.hist_bin, "histogram bin width, degrees")
      ->capture_default_str();
  simulate->add_option("--out", s.out, "output directory")->capture_default_str();
  add_tolerances(simulate);

  CLI::App* estimate =
      app.add_subcommand("estimate", "estimate the illuminant of one scene");
  estimate->add_option("--image", s.image,
                       "PPM/PFM image (default: the annotation's image field)");
  estimate->add_option("--annotation", s.annotation, "scene annotation JSON")
      ->required();
  estimate->add_option("--method", s.method, "gm or ls")->default_str("gm");
  estimate->add_option("--out", s.out, "directory for report.json")
      ->capture_default_str();
  estimate->add_option("--clip-threshold", s.clip_threshold,
                       "override the annotation's clip threshold");
  estimate->add_option("--min-valid-pixels", s.min_valid_pixels,
                       "override the annotation's pixel minimum");
  add_tolerances(estimate);

  CLI::App* stats =
      app.add_subcommand("stats", "summarize an error-samples CSV");
  stats->add_option("--config", s.config, "JSON config file with option presets");
  stats->add_option("--samples", s.samples, "samples CSV from simulate")
      ->required();
  stats->add_option("--out", s.stats_out, "also write the stats CSV here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  if (simulate->parsed()) return cmd_simulate(s);
  if (estimate->parsed()) return cmd_estimate(s);
  return cmd_stats(s);
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return 3;
  } catch (const EstimationError& e) {
    std::cerr << "estimation error: " << e.what() << '\n';
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
