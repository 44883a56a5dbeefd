#include "interreflect/spectrum.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace interreflect {

namespace {

constexpr double kReflectanceTolerance = 0.05;

std::vector<std::string> split_csv_row(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_real(const std::string& cell, const std::string& path) {
  const char* begin = cell.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  while (end && *end == ' ') ++end;
  if (end == begin || (end && *end != '\0') || !std::isfinite(v))
    throw DataError(path + ": malformed real value '" + cell + "'");
  return v;
}

std::string fmt_g17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

void WavelengthGrid::validate() const {
  if (!(step_nm > 0.0))
    throw ConfigError("wavelength grid step must be positive");
  if (count < 2)
    throw ConfigError("wavelength grid needs at least two samples");
  if (start_nm < 300.0 || end_nm() > 900.0)
    throw ConfigError("wavelength grid outside the 300-900 nm band");
}

WavelengthGrid default_grid() { return {380.0, 4.0, 101}; }

Spectrum resample(const Spectrum& s, const WavelengthGrid& target) {
  target.validate();
  if (s.grid == target) return s;

  const double lo = s.grid.start_nm;
  const double hi = s.grid.end_nm();
  const double edge = 1e-9 * s.grid.step_nm;

  Spectrum out{target, std::vector<double>(target.count, 0.0)};
  for (int j = 0; j < target.count; ++j) {
    double w = target.wavelength(j);
    // Snap wavelengths that fall within rounding noise of the covered range.
    if (w < lo && w >= lo - edge) w = lo;
    if (w > hi && w <= hi + edge) w = hi;
    if (w < lo || w > hi) continue;
    const double t = (w - lo) / s.grid.step_nm;
    int i = static_cast<int>(t);
    if (i >= s.grid.count - 1) {
      out.values[j] = s.values.back();
      continue;
    }
    const double f = t - i;
    out.values[j] = s.values[i] * (1.0 - f) + s.values[i + 1] * f;
  }
  return out;
}

Spectrum multiply(const Spectrum& a, const Spectrum& b) {
  if (!(a.grid == b.grid)) throw ConfigError("grid mismatch in spectrum multiply");
  Spectrum out{a.grid, std::vector<double>(a.values.size())};
  for (std::size_t i = 0; i < a.values.size(); ++i)
    out.values[i] = a.values[i] * b.values[i];
  return out;
}

void SensorResponse::validate() const {
  if (!(red.grid == green.grid) || !(red.grid == blue.grid))
    throw ConfigError("sensor channels must share one grid");
  for (const Spectrum* ch : {&red, &green, &blue}) {
    bool positive = false;
    for (double v : ch->values) {
      if (v < 0.0) throw DataError("negative sensor sensitivity");
      if (v > 0.0) positive = true;
    }
    if (!positive)
      throw DataError("sensor channel has no positive sensitivity on the grid");
  }
}

RGBColor project_to_rgb(const Spectrum& s, const SensorResponse& sensor) {
  if (!(s.grid == sensor.red.grid))
    throw ConfigError("grid mismatch in RGB projection");
  double r = 0.0, g = 0.0, b = 0.0;
  for (std::size_t i = 0; i < s.values.size(); ++i) {
    r += s.values[i] * sensor.red.values[i];
    g += s.values[i] * sensor.green.values[i];
    b += s.values[i] * sensor.blue.values[i];
  }
  const double step = s.grid.step_nm;
  return {r * step, g * step, b * step};
}

SpectraFile load_spectra_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open spectra CSV: " + path);

  std::string line;
  if (!std::getline(in, line)) throw DataError(path + ": empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();

  const auto header = split_csv_row(line);
  if (header.size() < 2 || header[0] != "wavelength_nm")
    throw DataError(path + ": first header column must be wavelength_nm");

  const std::size_t ncols = header.size() - 1;
  std::vector<double> wavelengths;
  std::vector<std::vector<double>> columns(ncols);
  std::size_t clamped = 0;

  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cells = split_csv_row(line);
    if (cells.size() != header.size())
      throw DataError(path + ": row has " + std::to_string(cells.size()) +
                      " cells, expected " + std::to_string(header.size()));
    wavelengths.push_back(parse_real(cells[0], path));
    for (std::size_t c = 0; c < ncols; ++c) {
      double v = parse_real(cells[c + 1], path);
      if (v < -kReflectanceTolerance)
        throw DataError(path + ": negative value beyond tolerance in column '" +
                        header[c + 1] + "'");
      if (v < 0.0) {
        v = 0.0;
        ++clamped;
      }
      columns[c].push_back(v);
    }
  }

  if (wavelengths.size() < 2)
    throw DataError(path + ": needs at least two wavelength rows");
  const double step = wavelengths[1] - wavelengths[0];
  for (std::size_t i = 0; i + 1 < wavelengths.size(); ++i) {
    const double d = wavelengths[i + 1] - wavelengths[i];
    if (!(d > 0.0)) throw DataError(path + ": non-monotonic grid");
    if (std::abs(d - step) > 1e-6 * step)
      throw DataError(path + ": non-uniform grid");
  }

  WavelengthGrid grid{wavelengths[0], step, static_cast<int>(wavelengths.size())};
  grid.validate();

  SpectraFile out;
  out.grid = grid;
  out.negatives_clamped = clamped;
  out.spectra.reserve(ncols);
  for (std::size_t c = 0; c < ncols; ++c)
    out.spectra.push_back({header[c + 1], Spectrum{grid, std::move(columns[c])}});
  return out;
}

void save_spectra_csv(const std::string& path,
                      const std::vector<NamedSpectrum>& spectra) {
  if (spectra.empty()) throw ConfigError("no spectra to save");
  const WavelengthGrid grid = spectra.front().spectrum.grid;
  for (const auto& ns : spectra)
    if (!(ns.spectrum.grid == grid))
      throw ConfigError("spectra CSV requires one shared grid");

  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write spectra CSV: " + path);
  out << "wavelength_nm";
  for (const auto& ns : spectra) out << ',' << ns.name;
  out << '\n';
  for (int i = 0; i < grid.count; ++i) {
    out << fmt_g17(grid.wavelength(i));
    for (const auto& ns : spectra) out << ',' << fmt_g17(ns.spectrum.values[i]);
    out << '\n';
  }
  if (!out) throw DataError("write failed: " + path);
}

SpectralDataset load_dataset(const std::string& dir, const WavelengthGrid& grid) {
  grid.validate();
  SpectralDataset ds;
  ds.grid = grid;

  const auto illum = load_spectra_csv(dir + "/illuminants.csv");
  for (const auto& ns : illum.spectra)
    ds.illuminants.push_back({ns.name, resample(ns.spectrum, grid)});

  const auto refl = load_spectra_csv(dir + "/reflectances.csv");
  for (const auto& ns : refl.spectra) {
    for (double v : ns.spectrum.values)
      if (v > 1.0 + kReflectanceTolerance)
        throw DataError(dir + "/reflectances.csv: reflectance '" + ns.name +
                        "' above tolerance");
    ds.reflectances.push_back({ns.name, resample(ns.spectrum, grid)});
  }

  const auto sensor = load_spectra_csv(dir + "/sensor.csv");
  if (sensor.spectra.size() != 3 || sensor.spectra[0].name != "red" ||
      sensor.spectra[1].name != "green" || sensor.spectra[2].name != "blue")
    throw DataError(dir + "/sensor.csv: expected exactly red,green,blue columns");
  ds.sensor.red = resample(sensor.spectra[0].spectrum, grid);
  ds.sensor.green = resample(sensor.spectra[1].spectrum, grid);
  ds.sensor.blue = resample(sensor.spectra[2].spectrum, grid);
  ds.sensor.validate();

  if (ds.illuminants.empty()) throw DataError(dir + ": no illuminants");
  if (ds.reflectances.empty()) throw DataError(dir + ": no reflectances");
  return ds;
}

}  // namespace interreflect
