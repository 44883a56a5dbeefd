// Drives the installed CLI binary end to end.
// usage: cli_tests <path-to-cli> <mini-dataset-dir>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "interreflect/image.hpp"
#include "scene_util.hpp"
#include "test_util.hpp"

namespace {

int g_failures = 0;

void check(bool ok, const std::string& what) {
  if (!ok) {
    ++g_failures;
    std::cerr << "FAIL: " << what << '\n';
  }
}

struct RunResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

RunResult run_cli(const std::string& cli, const std::vector<std::string>& args,
                  const TempDir& tmp, const std::string& tag) {
  std::string cmd = "'" + cli + "'";
  for (const auto& a : args) cmd += " '" + a + "'";
  const std::string out_file = tmp.path(tag + ".out");
  const std::string err_file = tmp.path(tag + ".err");
  cmd += " >'" + out_file + "' 2>'" + err_file + "'";
  const int status = std::system(cmd.c_str());
  RunResult r;
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(out_file);
  r.err = slurp(err_file);
  return r;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 3) {
    std::cerr << "usage: cli_tests <cli> <mini-dataset-dir>\n";
    return 2;
  }
  const std::string cli = argv[1];
  const std::string mini = argv[2];
  TempDir tmp("cli-tests");

  // byte-identical reruns, also across thread counts
  const std::vector<std::string> base{"simulate", "--dataset", mini, "--method",
                                      "pure",     "--trials",  "5",  "--seed",
                                      "7",        "--out",     tmp.path("run1")};
  auto r1 = run_cli(cli, base, tmp, "sim1");
  check(r1.exit_code == 0, "simulate exit 0, got " + std::to_string(r1.exit_code) + ": " + r1.err);
  check(r1.out.find("mean_deg,") == 0, "simulate prints the stats header");

  auto args2 = base;
  args2.back() = tmp.path("run2");
  run_cli(cli, args2, tmp, "sim2");
  auto args3 = base;
  args3.back() = tmp.path("run3");
  args3.push_back("--threads");
  args3.push_back("4");
  run_cli(cli, args3, tmp, "sim3");
  for (const char* name : {"samples.csv", "stats.csv", "histogram.csv"}) {
    const std::string a = slurp(tmp.path("run1") + "/" + name);
    check(!a.empty(), std::string(name) + " written");
    check(a == slurp(tmp.path("run2") + "/" + name),
          std::string(name) + " reproducible");
    check(a == slurp(tmp.path("run3") + "/" + name),
          std::string(name) + " independent of --threads");
  }

  // color-line method produces a coherent stats row
  auto gm = run_cli(cli,
                    {"simulate", "--dataset", mini, "--method", "gm", "--lines",
                     "3", "--trials", "3", "--seed", "1", "--out",
                     tmp.path("gm")},
                    tmp, "simgm");
  check(gm.exit_code == 0, "gm simulate exit 0: " + gm.err);
  {
    std::istringstream rows(slurp(tmp.path("gm") + "/stats.csv"));
    std::string header, row;
    std::getline(rows, header);
    std::getline(rows, row);
    std::vector<double> v;
    std::istringstream cells(row);
    std::string cell;
    while (std::getline(cells, cell, ',')) v.push_back(std::stod(cell));
    check(v.size() == 8, "stats row has 8 columns");
    // mean median trimean best25 worst25 p95 max min
    check(v[7] <= v[3] && v[3] <= v[1] && v[1] <= v[4] && v[4] <= v[6],
          "stats ordering chain min <= best25 <= median <= worst25 <= max");
    check(v[5] <= v[6], "p95 <= max");
  }

  // stats of simulate's samples reproduces simulate's own stats file
  auto st = run_cli(cli,
                    {"stats", "--samples", tmp.path("run1") + "/samples.csv",
                     "--out", tmp.path("restats.csv")},
                    tmp, "stats1");
  check(st.exit_code == 0, "stats exit 0: " + st.err);
  check(slurp(tmp.path("restats.csv")) == slurp(tmp.path("run1") + "/stats.csv"),
        "stats output equals simulate's stats.csv");
  check(st.out == slurp(tmp.path("run1") + "/stats.csv"),
        "stats stdout equals the file contents");

  // hand-written samples file with hand-computed summary
  {
    std::ofstream f(tmp.path("hand.csv"), std::ios::binary);
    f << "illuminant,trial,error_deg,resamples,valid\n";
    f << "a,0,1,0,1\na,1,2,0,1\na,2,3,0,1\na,3,4,0,1\n";
    f << "a,4,99,0,0\n";  // invalid row must be ignored
  }
  auto hand = run_cli(cli, {"stats", "--samples", tmp.path("hand.csv")}, tmp,
                      "stats2");
  check(hand.exit_code == 0, "hand stats exit 0");
  check(hand.out.find("\n2.5,2,2,1,4,4,4,1\n") != std::string::npos,
        "hand-computed stats row, got: " + hand.out);

  // malformed samples CSV
  {
    std::ofstream f(tmp.path("bad.csv"), std::ios::binary);
    f << "nope\n1\n";
  }
  auto bad = run_cli(cli, {"stats", "--samples", tmp.path("bad.csv")}, tmp,
                     "stats3");
  check(bad.exit_code == 2, "malformed CSV exits 2");

  // scene estimation on the synthetic capture
  const SyntheticScene scene = make_synthetic_scene();
  interreflect::save_ppm16(tmp.path("scene.ppm"), scene.image);
  {
    std::ofstream f(tmp.path("scene.json"));
    f << synthetic_annotation_json("scene.ppm");
  }
  auto est = run_cli(cli,
                     {"estimate", "--annotation", tmp.path("scene.json"),
                      "--out", tmp.path("est-gm")},
                     tmp, "est1");
  check(est.exit_code == 0, "estimate exit 0: " + est.err);
  nlohmann::json report;
  try {
    report = nlohmann::json::parse(slurp(tmp.path("est-gm") + "/report.json"));
    check(report.at("method") == "gm", "default method is gm");
    check(report.at("angular_error_deg").get<double>() < 1e-6,
          "synthetic scene error < 1e-6 deg");
    const auto ill = report.at("illuminant");
    check(est.out.find(ill[0].dump()) != std::string::npos,
          "stdout mirrors the JSON illuminant");

    auto ls = run_cli(cli,
                      {"estimate", "--annotation", tmp.path("scene.json"),
                       "--method", "ls", "--out", tmp.path("est-ls")},
                      tmp, "est2");
    check(ls.exit_code == 0, "ls estimate exit 0");
    const auto report_ls =
        nlohmann::json::parse(slurp(tmp.path("est-ls") + "/report.json"));
    for (int c = 0; c < 3; ++c)
      check(std::abs(report.at("illuminant")[c].get<double>() -
                     report_ls.at("illuminant")[c].get<double>()) <= 1e-12,
            "two-triple gm and ls agree");
  } catch (const nlohmann::json::exception& e) {
    check(false, std::string("report.json parse: ") + e.what());
  }

  // config file presets, flags win
  {
    std::ofstream f(tmp.path("cfg.json"));
    f << R"({"method": "ls"})";
  }
  auto cfg = run_cli(cli,
                     {"estimate", "--config", tmp.path("cfg.json"),
                      "--annotation", tmp.path("scene.json"), "--out",
                      tmp.path("est-cfg")},
                     tmp, "est3");
  check(cfg.exit_code == 0, "config run exit 0: " + cfg.err);
  check(slurp(tmp.path("est-cfg") + "/report.json").find("\"method\": \"ls\"") !=
            std::string::npos,
        "config file sets the method");
  auto cfg2 = run_cli(cli,
                      {"estimate", "--config", tmp.path("cfg.json"), "--method",
                       "gm", "--annotation", tmp.path("scene.json"), "--out",
                       tmp.path("est-cfg2")},
                      tmp, "est4");
  check(slurp(tmp.path("est-cfg2") + "/report.json")
                .find("\"method\": \"gm\"") != std::string::npos,
        "flags override the config file");

  // failure taxonomy
  {
    std::ofstream f(tmp.path("missing.json"));
    f << R"({"image": "scene.ppm",
             "patches": {"a": {"shape": "rect", "x": 4, "y": 4, "w": 12, "h": 12, "role": "direct_r1"}},
             "interreflections": [["a", "a", "phantom_patch"], ["a", "a", "a"]]})";
  }
  auto missing = run_cli(cli, {"estimate", "--annotation", tmp.path("missing.json")},
                         tmp, "est5");
  check(missing.exit_code == 2, "unknown patch reference exits 2");
  check(missing.err.find("phantom_patch") != std::string::npos,
        "error names the missing patch");

  auto pure = run_cli(cli,
                      {"estimate", "--annotation", tmp.path("scene.json"),
                       "--method", "pure"},
                      tmp, "est6");
  check(pure.exit_code == 2, "estimate --method pure exits 2");

  auto nods = run_cli(cli,
                      {"simulate", "--dataset", tmp.path("nowhere"), "--trials",
                       "1", "--out", tmp.path("x")},
                      tmp, "sim4");
  check(nods.exit_code == 3, "missing dataset exits 3");
  check(!std::filesystem::exists(tmp.path("x") + "/samples.csv"),
        "failed run leaves no partial outputs");

  auto badlines = run_cli(cli,
                          {"simulate", "--dataset", mini, "--method", "gm",
                           "--lines", "1", "--trials", "1", "--out", tmp.path("y")},
                          tmp, "sim5");
  check(badlines.exit_code == 2, "gm with --lines 1 exits 2");

  if (g_failures == 0) {
    std::cout << "cli tests passed\n";
    return 0;
  }
  std::cerr << g_failures << " cli test failure(s)\n";
  return 1;
}
