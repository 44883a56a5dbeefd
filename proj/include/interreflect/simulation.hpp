#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "interreflect/estimators.hpp"
#include "interreflect/spectrum.hpp"

namespace interreflect {

struct TrialPlan {
  std::uint64_t seed = 0;
  int trials_per_illuminant = 1;
  int lines_per_trial = 5;  // ignored by the pure method
  double alpha_low = 0.2;
  double alpha_high = 1.0;
  Method method = Method::pure;
  SolverOptions solver;

  void validate() const;
};

struct ErrorSample {
  std::string illuminant_name;
  int illuminant_index = 0;
  int trial_index = 0;
  double error_deg = 0.0;  // NaN when invalid
  int resample_count = 0;  // degenerate draws discarded before success
  bool valid = true;
};

// The eight summary columns reported for an angular-error sample set.
struct ErrorStats {
  double mean = 0.0;
  double median = 0.0;
  double trimean = 0.0;
  double best25 = 0.0;
  double worst25 = 0.0;
  double p95 = 0.0;
  double max = 0.0;
  double min = 0.0;
};

struct SceneColors {
  RGBColor c1;     // direct reflection off the first surface
  RGBColor c2;     // direct reflection off the second surface
  RGBColor third;  // pure interreflection, or the mixed color
};

// Pure mode: third = project(R1*R2*L).
SceneColors render_scene_spectral(const Spectrum& illuminant, const Spectrum& r1,
                                  const Spectrum& r2, const SensorResponse& sensor);

// Mixed mode: third = project(a3*R1*L + a4*R1*R2*L), spectra combined before
// projection.
SceneColors render_scene_spectral(const Spectrum& illuminant, const Spectrum& r1,
                                  const Spectrum& r2, const SensorResponse& sensor,
                                  double alpha3, double alpha4);

// One pure-interreflection estimate per trial: draw two reflectances per
// attempt (with replacement), render, estimate, record the angular error
// against the projected illuminant. Dark-channel draws are resampled, up to
// 100 consecutive failures per trial. Output is ordered by (illuminant,
// trial) regardless of `threads`.
std::vector<ErrorSample> run_pure_simulation(const SpectralDataset& dataset,
                                             const TrialPlan& plan,
                                             int threads = 1);

// Color-line variant: draw lines_per_trial reflectance pairs plus per-pair
// mixing factors, build color lines, intersect with the plan's method.
// Degenerate pairs (dark channels, degenerate lines, or a reflectance reused
// as the second surface) are resampled; trials whose solver still reports a
// parallel pencil are flagged invalid.
std::vector<ErrorSample> run_colorline_simulation(const SpectralDataset& dataset,
                                                  const TrialPlan& plan,
                                                  int threads = 1);

// Conventions (documented in the README): median takes the lower of the two
// middle values; trimean = (Q1 + 2*median + Q3)/4 with quartiles taken as the
// lower-middle medians of the two halves excluding the median element;
// best25/worst25 average the lowest/highest max(1, n/4) errors; p95 is the
// nearest-rank value at ceil(0.95 n).
ErrorStats summarize_errors(std::span<const double> errors_deg);

// Summarizes the valid samples only. Throws when none are valid.
ErrorStats summarize_errors(std::span<const ErrorSample> samples);

void write_samples_csv(const std::string& path,
                       std::span<const ErrorSample> samples);
std::vector<ErrorSample> read_samples_csv(const std::string& path);
void write_stats_csv(const std::string& path, const ErrorStats& stats);
void write_histogram_csv(const std::string& path,
                         std::span<const ErrorSample> samples,
                         double bin_width_deg);

std::string stats_csv_header();
std::string stats_csv_row(const ErrorStats& stats);

}  // namespace interreflect
