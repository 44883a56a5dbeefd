// Acceptance suite. Prints one line per criterion and exits nonzero if any
// criterion fails. Criteria that need the full spectral dataset are skipped
// (with a mini-dataset determinism substitute) when INTERREFLECT_DATASET is
// not set.
//
// usage: acceptance_tests <mini-dataset-dir> <path-to-cli>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <thread>
#include <vector>

#include "gm_oracle.hpp"
#include "interreflect/image.hpp"
#include "interreflect/rng.hpp"
#include "interreflect/simulation.hpp"
#include "model_util.hpp"
#include "scene_util.hpp"
#include "stats_oracle.hpp"
#include "test_util.hpp"

using namespace interreflect;

namespace {

bool g_all_ok = true;

void report(int criterion, bool ok, const std::string& detail) {
  std::printf("[%s] criterion %d: %s\n", ok ? "PASS" : "FAIL", criterion,
              detail.c_str());
  if (!ok) g_all_ok = false;
}

void skip(int criterion, const std::string& detail) {
  std::printf("[SKIP] criterion %d: %s\n", criterion, detail.c_str());
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

// ---- criterion 1: the estimators are exact in the 3D model ----------------

void criterion_exact_model() {
  const auto start = std::chrono::steady_clock::now();
  RandomStream rng(1001, 0, 0);
  double worst = 0.0;
  SolverOptions opts;
  for (int trial = 0; trial < 10000; ++trial) {
    const RGBColor light = random_color(rng);
    const RGBColor truth = light.normalized();

    const RGBColor r1 = random_color(rng);
    const RGBColor r2 = random_color(rng);
    const double a1 = rng.next_uniform(0.2, 1.0);
    const double a2 = rng.next_uniform(0.2, 1.0);
    const double a3 = rng.next_uniform(0.2, 1.0);
    const RGBColor pure = estimate_pure(a1 * (r1 * light), a2 * (r2 * light),
                                        a3 * (r1 * (r2 * light)));
    worst = std::max(worst, angular_error_deg(pure, truth));

    for (int m : {2, 3, 5}) {
      const auto observations = make_exact_observation_set(rng, light, m);
      for (Method method : {Method::gm, Method::ls}) {
        const auto est = estimate_from_observations(observations, method, opts);
        worst = std::max(worst, angular_error_deg(est.illuminant, truth));
      }
    }
  }
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  report(1, worst <= 1e-7 && seconds < 30.0,
         "exact-model recovery over 10^4 draws, pure + m in {2,3,5} x {gm,ls}: "
         "worst error " +
             fmt(worst) + " deg (<= 1e-7), " + fmt(seconds) + " s (< 30)");
}

// ---- criteria 2-3: dataset reproduction ------------------------------------

bool full_dataset_available(std::string& dir) {
  const char* env = std::getenv("INTERREFLECT_DATASET");
  if (!env || !*env) return false;
  dir = env;
  return std::filesystem::exists(std::filesystem::path(dir) / "illuminants.csv");
}

int worker_threads() {
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

void criterion_pure_reproduction(const std::string& mini) {
  std::string dir;
  if (!full_dataset_available(dir)) {
    // substitute: the mini dataset must give identical samples on every run
    const SpectralDataset ds = load_dataset(mini);
    TrialPlan plan;
    plan.seed = 20250811;
    plan.trials_per_illuminant = 200;
    plan.method = Method::pure;
    const auto a = run_pure_simulation(ds, plan, 1);
    const auto b = run_pure_simulation(ds, plan, worker_threads());
    bool same = a.size() == b.size();
    for (std::size_t i = 0; same && i < a.size(); ++i)
      same = a[i].error_deg == b[i].error_deg &&
             a[i].resample_count == b[i].resample_count &&
             a[i].valid == b[i].valid;
    skip(2, "full dataset not installed (set INTERREFLECT_DATASET); "
            "mini-dataset determinism substitute " +
                std::string(same ? "passed" : "FAILED"));
    if (!same) g_all_ok = false;
    return;
  }

  const SpectralDataset ds = load_dataset(dir);
  TrialPlan plan;
  plan.seed = 20250811;
  plan.trials_per_illuminant = 10000;
  plan.method = Method::pure;
  const auto samples = run_pure_simulation(ds, plan, worker_threads());
  const ErrorStats st = summarize_errors(samples);
  const bool ok = std::abs(st.mean - 0.69) <= 0.15 &&
                  std::abs(st.median - 0.37) <= 0.10;
  report(2, ok,
         "pure-method reproduction on the full dataset: mean " + fmt(st.mean) +
             " deg (0.69 +/- 0.15), median " + fmt(st.median) +
             " deg (0.37 +/- 0.10)");
}

void criterion_line_count_ordering() {
  std::string dir;
  if (!full_dataset_available(dir)) {
    skip(3, "full dataset not installed (set INTERREFLECT_DATASET)");
    return;
  }
  const SpectralDataset ds = load_dataset(dir);
  TrialPlan plan;
  plan.seed = 31337;
  plan.trials_per_illuminant = 1000;
  plan.method = Method::gm;
  double mean_gm[11] = {};
  for (int m : {2, 3, 5, 10}) {
    plan.lines_per_trial = m;
    mean_gm[m] =
        summarize_errors(run_colorline_simulation(ds, plan, worker_threads()))
            .mean;
  }
  plan.method = Method::ls;
  plan.lines_per_trial = 10;
  const double mean_ls10 =
      summarize_errors(run_colorline_simulation(ds, plan, worker_threads()))
          .mean;
  const bool ok = mean_gm[10] < mean_gm[5] && mean_gm[5] < mean_gm[3] &&
                  mean_gm[3] < mean_gm[2] && mean_gm[10] < mean_ls10;
  report(3, ok,
         "line-count ordering: gm means m=10/5/3/2 = " + fmt(mean_gm[10]) +
             "/" + fmt(mean_gm[5]) + "/" + fmt(mean_gm[3]) + "/" +
             fmt(mean_gm[2]) + " deg, ls m=10 = " + fmt(mean_ls10) + " deg");
}

// ---- criterion 4: geometric-median oracle equivalence ----------------------

void criterion_gm_oracle() {
  RandomStream rng(4004, 0, 0);
  double worst_gap = 0.0;
  bool monotone = true;
  int done = 0;
  while (done < 100) {
    const int m = 3 + static_cast<int>(rng.next_index(4));
    std::vector<ChromaLine> lines;
    for (int i = 0; i < m; ++i) {
      const ChromaPoint p{rng.next_uniform(0, 1), rng.next_uniform(0, 1)};
      const double angle = rng.next_uniform(0, 3.14159265358979323846);
      lines.push_back(line_through(p, {p.r + std::cos(angle), p.g + std::sin(angle)}));
    }
    if (pencil_condition(lines) > 1e6) continue;
    ++done;
    const auto res = solve_geometric_median(lines);
    for (std::size_t k = 1; k < res.objective_history.size(); ++k)
      if (res.objective_history[k] > res.objective_history[k - 1])
        monotone = false;
    const ChromaPoint ref = gm_oracle_minimize(lines);
    worst_gap = std::max(worst_gap, std::abs(gm_objective(lines, res.point) -
                                             gm_objective(lines, ref)));
  }
  report(4, worst_gap <= 1e-6 && monotone,
         "IRLS vs grid+refinement oracle on 100 instances: worst objective gap " +
             fmt(worst_gap) + " (<= 1e-6), objective sequences " +
             (monotone ? "non-increasing" : "NOT monotone"));
}

// ---- criterion 5: wide-angle and outlier behavior --------------------------

void criterion_gm_behavior() {
  auto line_angle = [](const ChromaPoint& through, double angle) {
    return line_through(through,
                        {through.r + std::cos(angle), through.g + std::sin(angle)});
  };

  // one wide-angle crossing, two shallow ones elsewhere
  const ChromaLine l1 = line_angle({0.0, 0.0}, 0.0);
  const ChromaLine l2 = line_angle({0.3, 0.0}, 1.396263401595464);     // 80 deg
  const ChromaLine l3 = line_angle({0.0, 0.015}, 0.06981317007977318); // 4 deg
  const std::vector<ChromaLine> fig{l1, l2, l3};
  const ChromaPoint wide = intersect_pair(l1, l2);
  const double d_wide = distance(solve_geometric_median(fig).point, wide);

  // four concurrent lines plus one distant outlier
  const ChromaPoint q{0.4, 0.35};
  std::vector<ChromaLine> outlier;
  for (double a : {0.0, 0.7853981633974483, 1.5707963267948966, 2.356194490192345})
    outlier.push_back(line_angle(q, a));
  outlier.push_back(line_angle({0.0, 0.9}, 0.0));
  const double d_gm = distance(solve_geometric_median(outlier).point, q);
  const double d_ls = distance(intersect_least_squares(outlier), q);

  report(5, d_wide <= 1e-6 && d_gm <= 1e-6 && d_gm < d_ls,
         "gm lands on the wide-angle intersection (" + fmt(d_wide) +
             " <= 1e-6) and resists the outlier (gm " + fmt(d_gm) + " < ls " +
             fmt(d_ls) + ")");
}

// ---- criterion 6: statistics oracle ----------------------------------------

void criterion_stats_oracle() {
  RandomStream rng(6006, 0, 0);
  std::vector<double> v(100000);
  for (auto& x : v) x = rng.next_uniform(0.0, 180.0);
  const ErrorStats got = summarize_errors(v);
  const ErrorStats want = stats_oracle(v);
  const bool ok = got.mean == want.mean && got.median == want.median &&
                  got.trimean == want.trimean && got.best25 == want.best25 &&
                  got.worst25 == want.worst25 && got.p95 == want.p95 &&
                  got.max == want.max && got.min == want.min;
  report(6, ok, "all eight summary columns match the full-sort oracle exactly "
                "on 10^5 samples");
}

// ---- criterion 7: image pipeline end to end ---------------------------------

void criterion_image_pipeline() {
  TempDir tmp("acceptance-scene");
  const SyntheticScene scene = make_synthetic_scene();
  save_ppm16(tmp.path("scene.ppm"), scene.image);
  {
    std::ofstream f(tmp.path("scene.json"));
    f << synthetic_annotation_json("scene.ppm");
  }
  const SceneAnnotation ann = load_annotation(tmp.path("scene.json"));
  const LinearImage img = load_image(tmp.path("scene.ppm"));
  const SceneReport rep = estimate_scene(img, ann, Method::gm);

  const RGBColor truth = scene.illuminant.normalized();
  const double est_err = angular_error_deg(rep.estimate.illuminant, truth);
  const double card_err =
      rep.ground_truth ? angular_error_deg(*rep.ground_truth, truth) : 1.0;
  report(7, est_err < 1e-6 && card_err <= 1e-10,
         "synthetic PPM scene: estimate error " + fmt(est_err) +
             " deg (< 1e-6), gray-card truth error " + fmt(card_err) +
             " deg (<= 1e-10); no real captures bundled (advisory band "
             "0.3-2.5 deg)");
}

// ---- criterion 8: CLI determinism -------------------------------------------

void criterion_cli_determinism(const std::string& mini, const std::string& cli) {
  TempDir tmp("acceptance-cli");
  std::vector<std::string> outputs;
  for (const char* threads : {"1", "2", "5"}) {
    for (int rep = 0; rep < 2; ++rep) {
      const std::string out =
          tmp.path(std::string("t") + threads + "r" + std::to_string(rep));
      const std::string cmd = "'" + cli + "' simulate --dataset '" + mini +
                              "' --method gm --lines 3 --trials 10 --seed 3 "
                              "--threads " +
                              threads + " --out '" + out + "' > /dev/null 2>&1";
      if (std::system(cmd.c_str()) != 0) {
        report(8, false, "CLI run failed: " + cmd);
        return;
      }
      outputs.push_back(out);
    }
  }
  bool same = true;
  for (const char* name : {"samples.csv", "stats.csv", "histogram.csv"}) {
    const std::string first = slurp(outputs[0] + "/" + name);
    if (first.empty()) same = false;
    for (const auto& out : outputs)
      if (slurp(out + "/" + name) != first) same = false;
  }
  report(8, same,
         "six simulate runs (threads 1/2/5, twice each) produced byte-identical "
         "CSV artifacts");
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 3) {
    std::fprintf(stderr, "usage: acceptance_tests <mini-dataset-dir> <cli>\n");
    return 2;
  }
  const std::string mini = argv[1];
  const std::string cli = argv[2];

  criterion_exact_model();
  criterion_pure_reproduction(mini);
  criterion_line_count_ordering();
  criterion_gm_oracle();
  criterion_gm_behavior();
  criterion_stats_oracle();
  criterion_image_pipeline();
  criterion_cli_determinism(mini, cli);

  std::printf(g_all_ok ? "acceptance: all criteria passed (skips noted above)\n"
                       : "acceptance: FAILURES present\n");
  return g_all_ok ? 0 : 1;
}
