#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "interreflect/errors.hpp"
#include "interreflect/geometry.hpp"

namespace interreflect {

// Uniform wavelength sampling grid, in nanometers.
struct WavelengthGrid {
  double start_nm = 380.0;
  double step_nm = 4.0;
  int count = 101;

  double wavelength(int i) const { return start_nm + step_nm * i; }
  double end_nm() const { return wavelength(count - 1); }

  bool operator==(const WavelengthGrid& o) const {
    return start_nm == o.start_nm && step_nm == o.step_nm && count == o.count;
  }

  void validate() const;
};

// Canonical grid used when assembling datasets: 380-780 nm at 4 nm.
WavelengthGrid default_grid();

// Sampled spectral power (illuminants, relative units) or reflectance
// (unitless, nominally in [0,1]).
struct Spectrum {
  WavelengthGrid grid;
  std::vector<double> values;
};

// Linear interpolation onto the target grid; zero outside the source range.
Spectrum resample(const Spectrum& s, const WavelengthGrid& target);

// Elementwise product; the grids must match.
Spectrum multiply(const Spectrum& a, const Spectrum& b);

// Camera channel sensitivities on one shared grid.
struct SensorResponse {
  Spectrum red;
  Spectrum green;
  Spectrum blue;

  void validate() const;
};

// Rectangle-rule projection: channel = sum_i s[i] * channel[i] * step_nm.
// The absolute scale cancels in every downstream chromaticity ratio.
RGBColor project_to_rgb(const Spectrum& s, const SensorResponse& sensor);

struct NamedSpectrum {
  std::string name;
  Spectrum spectrum;
};

// Result of parsing one spectra CSV. Slightly negative samples are clamped to
// zero and counted; measured datasets contain such artifacts.
struct SpectraFile {
  WavelengthGrid grid;
  std::vector<NamedSpectrum> spectra;
  std::size_t negatives_clamped = 0;
};

// CSV schema: header `wavelength_nm,<name>,<name>,...`, one row per
// wavelength, strictly increasing and uniformly spaced, decimal-point reals.
SpectraFile load_spectra_csv(const std::string& path);

void save_spectra_csv(const std::string& path,
                      const std::vector<NamedSpectrum>& spectra);

// Everything resampled onto one canonical grid.
struct SpectralDataset {
  WavelengthGrid grid;
  std::vector<NamedSpectrum> illuminants;
  std::vector<NamedSpectrum> reflectances;
  SensorResponse sensor;
};

// Loads illuminants.csv, reflectances.csv and sensor.csv from a directory and
// resamples them onto `grid`. Reflectance samples above 1.05 are rejected.
SpectralDataset load_dataset(const std::string& dir,
                             const WavelengthGrid& grid = default_grid());

}  // namespace interreflect
