#include "interreflect/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <thread>

#include "interreflect/rng.hpp"

namespace interreflect {

namespace {

constexpr int kMaxConsecutiveResamples = 100;

std::string fmt_g17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// Runs fn(i) for i in [0, total). Each index owns its output slot, so the
// partitioning cannot affect results.
template <typename Fn>
void parallel_for(int total, int threads, Fn&& fn) {
  threads = std::max(1, std::min(threads, total));
  if (threads == 1) {
    for (int i = 0; i < total; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (int w = 0; w < threads; ++w) {
    const int lo = static_cast<int>(static_cast<long long>(total) * w / threads);
    const int hi =
        static_cast<int>(static_cast<long long>(total) * (w + 1) / threads);
    pool.emplace_back([lo, hi, &fn] {
      for (int i = lo; i < hi; ++i) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

RGBColor ground_truth(const SpectralDataset& ds, int illuminant) {
  return project_to_rgb(ds.illuminants[illuminant].spectrum, ds.sensor)
      .normalized();
}

Spectrum mix_spectra(const Spectrum& a, double ka, const Spectrum& b, double kb) {
  Spectrum out{a.grid, std::vector<double>(a.values.size())};
  for (std::size_t i = 0; i < a.values.size(); ++i)
    out.values[i] = ka * a.values[i] + kb * b.values[i];
  return out;
}

}  // namespace

void TrialPlan::validate() const {
  if (trials_per_illuminant < 1)
    throw ConfigError("trials per illuminant must be at least 1");
  if (!(alpha_low > 0.0) || !(alpha_high > alpha_low))
    throw ConfigError("alpha range must satisfy 0 < low < high");
  if (method != Method::pure && lines_per_trial < 2)
    throw ConfigError("color-line methods need at least 2 lines per trial");
  if (solver.max_iterations < 1 || !(solver.epsilon_irls > 0.0) ||
      !(solver.step_tolerance > 0.0))
    throw ConfigError("solver options must be positive");
}

SceneColors render_scene_spectral(const Spectrum& illuminant, const Spectrum& r1,
                                  const Spectrum& r2,
                                  const SensorResponse& sensor) {
  const Spectrum r1l = multiply(r1, illuminant);
  const Spectrum r2l = multiply(r2, illuminant);
  return {project_to_rgb(r1l, sensor), project_to_rgb(r2l, sensor),
          project_to_rgb(multiply(r2, r1l), sensor)};
}

SceneColors render_scene_spectral(const Spectrum& illuminant, const Spectrum& r1,
                                  const Spectrum& r2,
                                  const SensorResponse& sensor, double alpha3,
                                  double alpha4) {
  const Spectrum r1l = multiply(r1, illuminant);
  const Spectrum r2l = multiply(r2, illuminant);
  const Spectrum mixed = mix_spectra(r1l, alpha3, multiply(r2, r1l), alpha4);
  return {project_to_rgb(r1l, sensor), project_to_rgb(r2l, sensor),
          project_to_rgb(mixed, sensor)};
}

std::vector<ErrorSample> run_pure_simulation(const SpectralDataset& dataset,
                                             const TrialPlan& plan, int threads) {
  plan.validate();
  if (plan.method != Method::pure)
    throw ConfigError("run_pure_simulation requires method 'pure'");

  const int ni = static_cast<int>(dataset.illuminants.size());
  const int nt = plan.trials_per_illuminant;
  const std::size_t nr = dataset.reflectances.size();

  std::vector<RGBColor> truths(ni);
  for (int i = 0; i < ni; ++i) truths[i] = ground_truth(dataset, i);

  std::vector<ErrorSample> samples(static_cast<std::size_t>(ni) * nt);
  parallel_for(ni * nt, threads, [&](int k) {
    const int i = k / nt;
    const int t = k % nt;
    ErrorSample& s = samples[k];
    s.illuminant_name = dataset.illuminants[i].name;
    s.illuminant_index = i;
    s.trial_index = t;

    RandomStream rng(plan.seed, static_cast<std::uint64_t>(i),
                     static_cast<std::uint64_t>(t));
    const Spectrum& light = dataset.illuminants[i].spectrum;
    while (true) {
      const std::size_t a = rng.next_index(nr);
      const std::size_t b = rng.next_index(nr);
      try {
        const SceneColors sc =
            render_scene_spectral(light, dataset.reflectances[a].spectrum,
                                  dataset.reflectances[b].spectrum, dataset.sensor);
        const RGBColor est =
            estimate_pure(sc.c1, sc.c2, sc.third, plan.solver.tol);
        s.error_deg = angular_error_deg(est, truths[i]);
        s.valid = true;
        break;
      } catch (const EstimationError&) {
        if (++s.resample_count >= kMaxConsecutiveResamples) {
          s.valid = false;
          s.error_deg = std::numeric_limits<double>::quiet_NaN();
          break;
        }
      }
    }
  });
  return samples;
}

std::vector<ErrorSample> run_colorline_simulation(const SpectralDataset& dataset,
                                                  const TrialPlan& plan,
                                                  int threads) {
  plan.validate();
  if (plan.method == Method::pure)
    throw ConfigError("run_colorline_simulation requires method 'gm' or 'ls'");

  const int ni = static_cast<int>(dataset.illuminants.size());
  const int nt = plan.trials_per_illuminant;
  const std::size_t nr = dataset.reflectances.size();
  const std::size_t m = static_cast<std::size_t>(plan.lines_per_trial);

  std::vector<RGBColor> truths(ni);
  for (int i = 0; i < ni; ++i) truths[i] = ground_truth(dataset, i);

  std::vector<ErrorSample> samples(static_cast<std::size_t>(ni) * nt);
  parallel_for(ni * nt, threads, [&](int k) {
    const int i = k / nt;
    const int t = k % nt;
    ErrorSample& s = samples[k];
    s.illuminant_name = dataset.illuminants[i].name;
    s.illuminant_index = i;
    s.trial_index = t;
    s.valid = false;
    s.error_deg = std::numeric_limits<double>::quiet_NaN();

    RandomStream rng(plan.seed, static_cast<std::uint64_t>(i),
                     static_cast<std::uint64_t>(t));
    const Spectrum& light = dataset.illuminants[i].spectrum;

    std::vector<InterreflectionObservation> observations;
    std::vector<std::size_t> used_r2;
    observations.reserve(m);
    int consecutive = 0;

    // Per attempt the stream yields (r1 index, r2 index, alpha3, alpha4) in
    // that order; resampled attempts consume the stream the same way.
    while (observations.size() < m) {
      const std::size_t a = rng.next_index(nr);
      const std::size_t b = rng.next_index(nr);
      const double alpha3 = rng.next_uniform(plan.alpha_low, plan.alpha_high);
      const double alpha4 = rng.next_uniform(plan.alpha_low, plan.alpha_high);

      bool ok = false;
      if (std::find(used_r2.begin(), used_r2.end(), b) == used_r2.end()) {
        try {
          const SceneColors sc = render_scene_spectral(
              light, dataset.reflectances[a].spectrum,
              dataset.reflectances[b].spectrum, dataset.sensor, alpha3, alpha4);
          const InterreflectionObservation obs{sc.c1, sc.c2, sc.third};
          build_color_line(obs, plan.solver.tol);  // degeneracy probe
          observations.push_back(obs);
          used_r2.push_back(b);
          ok = true;
        } catch (const EstimationError&) {
        }
      }
      if (ok) {
        consecutive = 0;
      } else {
        ++s.resample_count;
        if (++consecutive >= kMaxConsecutiveResamples) return;
      }
    }

    try {
      const EstimateReport report =
          estimate_from_observations(observations, plan.method, plan.solver);
      s.error_deg = angular_error_deg(report.illuminant, truths[i]);
      s.valid = true;
    } catch (const EstimationError&) {
      // parallel pencil after resampling: leave the trial flagged invalid
    }
  });
  return samples;
}

ErrorStats summarize_errors(std::span<const double> errors_deg) {
  if (errors_deg.empty()) throw ConfigError("no error samples to summarize");
  std::vector<double> x(errors_deg.begin(), errors_deg.end());
  std::sort(x.begin(), x.end());
  const std::size_t n = x.size();

  ErrorStats st;
  double sum = 0.0;
  for (double v : x) sum += v;
  st.mean = sum / static_cast<double>(n);
  st.median = x[(n - 1) / 2];
  st.min = x.front();
  st.max = x.back();

  if (n == 1) {
    st.trimean = x[0];
  } else {
    const std::size_t h = n / 2;
    const double q1 = x[(h - 1) / 2];
    const double q3 = x[n - h + (h - 1) / 2];
    st.trimean = (q1 + 2.0 * st.median + q3) / 4.0;
  }

  const std::size_t k = std::max<std::size_t>(1, n / 4);
  double lo = 0.0, hi = 0.0;
  for (std::size_t i = 0; i < k; ++i) lo += x[i];
  for (std::size_t i = n - k; i < n; ++i) hi += x[i];
  st.best25 = lo / static_cast<double>(k);
  st.worst25 = hi / static_cast<double>(k);

  const std::size_t rank = (19 * n + 19) / 20;  // ceil(0.95 n), exact
  st.p95 = x[rank - 1];
  return st;
}

ErrorStats summarize_errors(std::span<const ErrorSample> samples) {
  std::vector<double> errors;
  errors.reserve(samples.size());
  for (const auto& s : samples)
    if (s.valid) errors.push_back(s.error_deg);
  if (errors.empty()) throw ConfigError("no valid error samples to summarize");
  return summarize_errors(errors);
}

void write_samples_csv(const std::string& path,
                       std::span<const ErrorSample> samples) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write samples CSV: " + path);
  out << "illuminant,trial,error_deg,resamples,valid\n";
  for (const auto& s : samples)
    out << s.illuminant_name << ',' << s.trial_index << ','
        << fmt_g17(s.error_deg) << ',' << s.resample_count << ','
        << (s.valid ? 1 : 0) << '\n';
  if (!out) throw DataError("write failed: " + path);
}

std::vector<ErrorSample> read_samples_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open samples CSV: " + path);
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("malformed samples CSV: empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "illuminant,trial,error_deg,resamples,valid")
    throw ConfigError("malformed samples CSV: unexpected header");

  std::vector<ErrorSample> samples;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() != 5)
      throw ConfigError("malformed samples CSV: line " + std::to_string(lineno));
    try {
      ErrorSample s;
      s.illuminant_name = cells[0];
      s.trial_index = std::stoi(cells[1]);
      s.error_deg = std::stod(cells[2]);
      s.resample_count = std::stoi(cells[3]);
      s.valid = cells[4] == "1";
      if (cells[4] != "1" && cells[4] != "0") throw std::invalid_argument("valid");
      samples.push_back(std::move(s));
    } catch (const std::exception&) {
      throw ConfigError("malformed samples CSV: line " + std::to_string(lineno));
    }
  }
  return samples;
}

std::string stats_csv_header() {
  return "mean_deg,median_deg,trimean_deg,best25_deg,worst25_deg,p95_deg,"
         "max_deg,min_deg";
}

std::string stats_csv_row(const ErrorStats& st) {
  std::string row = fmt_g17(st.mean);
  for (double v : {st.median, st.trimean, st.best25, st.worst25, st.p95, st.max,
                   st.min})
    row += ',' + fmt_g17(v);
  return row;
}

void write_stats_csv(const std::string& path, const ErrorStats& stats) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write stats CSV: " + path);
  out << stats_csv_header() << '\n' << stats_csv_row(stats) << '\n';
  if (!out) throw DataError("write failed: " + path);
}

void write_histogram_csv(const std::string& path,
                         std::span<const ErrorSample> samples,
                         double bin_width_deg) {
  if (!(bin_width_deg > 0.0))
    throw ConfigError("histogram bin width must be positive");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write histogram CSV: " + path);
  out << "bin_left_deg,count\n";

  double max_err = -1.0;
  for (const auto& s : samples)
    if (s.valid) max_err = std::max(max_err, s.error_deg);
  if (max_err >= 0.0) {
    const auto nbins =
        static_cast<std::size_t>(std::floor(max_err / bin_width_deg)) + 1;
    std::vector<std::size_t> counts(nbins, 0);
    for (const auto& s : samples) {
      if (!s.valid) continue;
      auto idx = static_cast<std::size_t>(s.error_deg / bin_width_deg);
      if (idx >= nbins) idx = nbins - 1;
      ++counts[idx];
    }
    for (std::size_t i = 0; i < nbins; ++i)
      out << fmt_g17(i * bin_width_deg) << ',' << counts[i] << '\n';
  }
  if (!out) throw DataError("write failed: " + path);
}

}  // namespace interreflect
