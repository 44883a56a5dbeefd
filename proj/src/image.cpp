#include "interreflect/image.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>

#include <json.hpp>

namespace interreflect {

namespace {

std::vector<unsigned char> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open image: " + path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

bool is_space(unsigned char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

// PNM-style token reader: skips whitespace and '#' comment lines.
std::string next_token(const std::vector<unsigned char>& buf, std::size_t& pos,
                       const std::string& path) {
  while (pos < buf.size()) {
    if (is_space(buf[pos])) {
      ++pos;
    } else if (buf[pos] == '#') {
      while (pos < buf.size() && buf[pos] != '\n') ++pos;
    } else {
      break;
    }
  }
  const std::size_t start = pos;
  while (pos < buf.size() && !is_space(buf[pos]) && buf[pos] != '#') ++pos;
  if (pos == start) throw DataError(path + ": truncated header");
  return {buf.begin() + start, buf.begin() + pos};
}

long parse_int(const std::string& tok, const std::string& path) {
  std::size_t used = 0;
  long v = 0;
  try {
    v = std::stol(tok, &used);
  } catch (const std::exception&) {
    throw DataError(path + ": bad header integer '" + tok + "'");
  }
  if (used != tok.size()) throw DataError(path + ": bad header integer '" + tok + "'");
  return v;
}

LinearImage load_ppm(const std::vector<unsigned char>& buf, const std::string& path) {
  std::size_t pos = 2;  // past "P6"
  const long w = parse_int(next_token(buf, pos, path), path);
  const long h = parse_int(next_token(buf, pos, path), path);
  const long maxval = parse_int(next_token(buf, pos, path), path);
  if (w < 1 || h < 1) throw DataError(path + ": bad PPM dimensions");
  if (maxval != 255 && maxval != 65535)
    throw DataError(path + ": PPM maxval outside {255, 65535}");
  if (pos >= buf.size() || !is_space(buf[pos]))
    throw DataError(path + ": truncated file");
  ++pos;  // single whitespace between header and raster

  const std::size_t samples = static_cast<std::size_t>(w) * h * 3;
  const std::size_t bytes = samples * (maxval == 255 ? 1 : 2);
  if (buf.size() - pos < bytes) throw DataError(path + ": truncated file");

  LinearImage img;
  img.width = static_cast<int>(w);
  img.height = static_cast<int>(h);
  img.pixels.resize(samples);
  const double scale = 1.0 / static_cast<double>(maxval);
  if (maxval == 255) {
    for (std::size_t i = 0; i < samples; ++i)
      img.pixels[i] = buf[pos + i] * scale;
  } else {
    for (std::size_t i = 0; i < samples; ++i) {
      const unsigned v = (static_cast<unsigned>(buf[pos + 2 * i]) << 8) |
                         buf[pos + 2 * i + 1];  // big-endian
      img.pixels[i] = v * scale;
    }
  }
  return img;
}

float swap_float(float f) {
  std::uint32_t u;
  std::memcpy(&u, &f, 4);
  u = ((u & 0x000000FFu) << 24) | ((u & 0x0000FF00u) << 8) |
      ((u & 0x00FF0000u) >> 8) | ((u & 0xFF000000u) >> 24);
  std::memcpy(&f, &u, 4);
  return f;
}

LinearImage load_pfm(const std::vector<unsigned char>& buf, const std::string& path) {
  std::size_t pos = 2;  // past "PF"
  const long w = parse_int(next_token(buf, pos, path), path);
  const long h = parse_int(next_token(buf, pos, path), path);
  const std::string scale_tok = next_token(buf, pos, path);
  double scale = 0.0;
  try {
    scale = std::stod(scale_tok);
  } catch (const std::exception&) {
    throw DataError(path + ": bad PFM scale '" + scale_tok + "'");
  }
  if (w < 1 || h < 1 || scale == 0.0) throw DataError(path + ": bad PFM header");
  if (pos >= buf.size() || !is_space(buf[pos]))
    throw DataError(path + ": truncated file");
  ++pos;

  const std::size_t samples = static_cast<std::size_t>(w) * h * 3;
  if (buf.size() - pos < samples * 4) throw DataError(path + ": truncated file");

  const bool file_little = scale < 0.0;
  const bool host_little = std::endian::native == std::endian::little;
  const bool swap = file_little != host_little;

  LinearImage img;
  img.width = static_cast<int>(w);
  img.height = static_cast<int>(h);
  img.pixels.resize(samples);
  // PFM rasters run bottom-to-top.
  for (long row = 0; row < h; ++row) {
    const long y = h - 1 - row;
    for (long i = 0; i < w * 3; ++i) {
      float f;
      std::memcpy(&f, buf.data() + pos + (static_cast<std::size_t>(row) * w * 3 + i) * 4, 4);
      if (swap) f = swap_float(f);
      if (!std::isfinite(f)) throw DataError(path + ": non-finite PFM sample");
      img.pixels[static_cast<std::size_t>(y) * w * 3 + i] =
          std::clamp(static_cast<double>(f), 0.0, img.white_level);
    }
  }
  return img;
}

const PatchRegion& find_patch(const SceneAnnotation& ann, const std::string& name) {
  const auto it = ann.patches.find(name);
  if (it == ann.patches.end())
    throw ConfigError("annotation references unknown patch '" + name + "'");
  return it->second;
}

PatchRole parse_role(const std::string& role, const std::string& name) {
  if (role == "direct_r1") return PatchRole::direct_r1;
  if (role == "direct_r2") return PatchRole::direct_r2;
  if (role == "mixed") return PatchRole::mixed;
  if (role == "graycard") return PatchRole::graycard;
  throw ConfigError("patch '" + name + "' has unknown role '" + role + "'");
}

}  // namespace

LinearImage load_image(const std::string& path) {
  const auto buf = read_file(path);
  if (buf.size() < 2) throw DataError(path + ": truncated file");
  if (buf[0] == 'P' && buf[1] == '6') return load_ppm(buf, path);
  if (buf[0] == 'P' && buf[1] == 'F') return load_pfm(buf, path);
  if (buf[0] == 'P' && buf[1] == 'f')
    throw DataError(path + ": grayscale PFM is not supported");
  throw DataError(path + ": unsupported format (expected binary PPM or PFM)");
}

void save_ppm16(const std::string& path, const LinearImage& img) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write image: " + path);
  out << "P6\n" << img.width << ' ' << img.height << "\n65535\n";
  for (double v : img.pixels) {
    const double unit = std::clamp(v / img.white_level, 0.0, 1.0);
    const unsigned q = static_cast<unsigned>(std::lround(unit * 65535.0));
    out.put(static_cast<char>((q >> 8) & 0xFF));
    out.put(static_cast<char>(q & 0xFF));
  }
  if (!out) throw DataError("write failed: " + path);
}

void save_pfm(const std::string& path, const LinearImage& img) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write image: " + path);
  out << "PF\n" << img.width << ' ' << img.height << "\n-1.0\n";
  const bool host_little = std::endian::native == std::endian::little;
  for (int row = img.height - 1; row >= 0; --row) {
    for (int i = 0; i < img.width * 3; ++i) {
      float f = static_cast<float>(
          img.pixels[static_cast<std::size_t>(row) * img.width * 3 + i]);
      if (!host_little) f = swap_float(f);
      out.write(reinterpret_cast<const char*>(&f), 4);
    }
  }
  if (!out) throw DataError("write failed: " + path);
}

SceneAnnotation load_annotation(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open annotation: " + path);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(path + ": invalid JSON: " + e.what());
  }

  SceneAnnotation ann;
  try {
    ann.image_path = doc.at("image").get<std::string>();
    for (const auto& [name, p] : doc.at("patches").items()) {
      PatchRegion region;
      const std::string shape = p.at("shape").get<std::string>();
      region.role = parse_role(p.at("role").get<std::string>(), name);
      double area = 0.0;
      if (shape == "rect") {
        region.shape = PatchShape::rect;
        region.x = p.at("x").get<int>();
        region.y = p.at("y").get<int>();
        region.w = p.at("w").get<int>();
        region.h = p.at("h").get<int>();
        if (region.w < 1 || region.h < 1)
          throw ConfigError("patch '" + name + "' has empty extent");
        area = static_cast<double>(region.w) * region.h;
      } else if (shape == "circle") {
        region.shape = PatchShape::circle;
        region.cx = p.at("cx").get<double>();
        region.cy = p.at("cy").get<double>();
        region.radius = p.at("r").get<double>();
        if (!(region.radius > 0.0))
          throw ConfigError("patch '" + name + "' has non-positive radius");
        area = 3.14159265358979323846 * region.radius * region.radius;
      } else {
        throw ConfigError("patch '" + name + "' has unknown shape '" + shape + "'");
      }
      if (area < 9.0)
        throw ConfigError("patch '" + name + "' covers fewer than 9 pixels");
      ann.patches.emplace(name, region);
    }
    for (const auto& triple : doc.at("interreflections")) {
      if (!triple.is_array() || triple.size() != 3)
        throw ConfigError("interreflections entries must be [r1, r2, mixed]");
      ann.interreflections.push_back({triple[0].get<std::string>(),
                                      triple[1].get<std::string>(),
                                      triple[2].get<std::string>()});
    }
    if (doc.contains("graycard"))
      ann.graycard = doc.at("graycard").get<std::string>();
    if (doc.contains("clip_threshold"))
      ann.clip_threshold = doc.at("clip_threshold").get<double>();
    if (doc.contains("min_valid_pixels"))
      ann.min_valid_pixels = doc.at("min_valid_pixels").get<int>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }

  if (!(ann.clip_threshold > 0.0) || ann.clip_threshold > 1.0)
    throw ConfigError(path + ": clip_threshold must be in (0, 1]");
  if (ann.min_valid_pixels < 1)
    throw ConfigError(path + ": min_valid_pixels must be at least 1");
  if (ann.interreflections.size() < 2)
    throw ConfigError(path + ": need at least two interreflection triples");
  for (const auto& t : ann.interreflections)
    for (const std::string* n : {&t.direct_r1, &t.direct_r2, &t.mixed})
      find_patch(ann, *n);
  if (ann.graycard) find_patch(ann, *ann.graycard);
  return ann;
}

RGBColor sample_patch(const LinearImage& img, const PatchRegion& region,
                      double clip_threshold, int min_valid_pixels) {
  const double clip = clip_threshold * img.white_level;
  std::vector<double> ch[3];

  auto consider = [&](int px, int py) {
    if (px < 0 || py < 0 || px >= img.width || py >= img.height) return;
    const RGBColor c = img.at(px, py);
    if (c.r >= clip || c.g >= clip || c.b >= clip) return;
    ch[0].push_back(c.r);
    ch[1].push_back(c.g);
    ch[2].push_back(c.b);
  };

  if (region.shape == PatchShape::rect) {
    for (int py = region.y; py < region.y + region.h; ++py)
      for (int px = region.x; px < region.x + region.w; ++px) consider(px, py);
  } else {
    const double r2 = region.radius * region.radius;
    const int x0 = static_cast<int>(std::floor(region.cx - region.radius));
    const int x1 = static_cast<int>(std::ceil(region.cx + region.radius));
    const int y0 = static_cast<int>(std::floor(region.cy - region.radius));
    const int y1 = static_cast<int>(std::ceil(region.cy + region.radius));
    for (int py = y0; py <= y1; ++py)
      for (int px = x0; px <= x1; ++px) {
        const double dx = px - region.cx;
        const double dy = py - region.cy;
        if (dx * dx + dy * dy <= r2) consider(px, py);
      }
  }

  if (ch[0].size() < static_cast<std::size_t>(min_valid_pixels))
    throw EstimationError("patch saturated or too small");

  RGBColor out;
  double* dst[3] = {&out.r, &out.g, &out.b};
  for (int c = 0; c < 3; ++c) {
    const std::size_t mid = (ch[c].size() - 1) / 2;  // lower-middle median
    std::nth_element(ch[c].begin(), ch[c].begin() + mid, ch[c].end());
    *dst[c] = ch[c][mid];
  }
  return out;
}

RGBColor ground_truth_from_graycard(const LinearImage& img,
                                    const PatchRegion& region,
                                    double clip_threshold, int min_valid_pixels) {
  return sample_patch(img, region, clip_threshold, min_valid_pixels).normalized();
}

SceneReport estimate_scene(const LinearImage& img, const SceneAnnotation& ann,
                           Method method, const SolverOptions& opts) {
  if (ann.interreflections.size() < 2)
    throw EstimationError("insufficient valid interreflections");

  // Each patch is sampled once; failures are remembered per patch.
  std::map<std::string, RGBColor> colors;
  std::map<std::string, std::string> failures;
  auto sample = [&](const std::string& name) -> const RGBColor* {
    if (const auto it = colors.find(name); it != colors.end()) return &it->second;
    if (failures.count(name)) return nullptr;
    try {
      const RGBColor c = sample_patch(img, find_patch(ann, name),
                                      ann.clip_threshold, ann.min_valid_pixels);
      return &colors.emplace(name, c).first->second;
    } catch (const EstimationError& e) {
      failures.emplace(name, e.what());
      return nullptr;
    }
  };

  SceneReport report;
  std::vector<InterreflectionObservation> observations;
  for (std::size_t i = 0; i < ann.interreflections.size(); ++i) {
    const auto& t = ann.interreflections[i];
    const RGBColor* d1 = sample(t.direct_r1);
    const RGBColor* d2 = sample(t.direct_r2);
    const RGBColor* mx = sample(t.mixed);
    std::string problem;
    if (!d1 || !d2 || !mx) {
      for (const std::string* n : {&t.direct_r1, &t.direct_r2, &t.mixed})
        if (failures.count(*n)) {
          problem = "patch '" + *n + "': " + failures[*n];
          break;
        }
    } else {
      const InterreflectionObservation obs{*d1, *d2, *mx};
      try {
        build_color_line(obs, opts.tol);
        observations.push_back(obs);
      } catch (const EstimationError& e) {
        problem = e.what();
      }
    }
    if (!problem.empty())
      report.skipped_triples.push_back("triple " + std::to_string(i) + " [" +
                                       t.direct_r1 + ", " + t.direct_r2 + ", " +
                                       t.mixed + "]: " + problem);
  }

  if (observations.size() < 2)
    throw EstimationError("insufficient valid interreflections");
  report.estimate = estimate_from_observations(observations, method, opts);

  if (ann.graycard) {
    const RGBColor* card = sample(*ann.graycard);
    if (!card)
      throw EstimationError("gray card: " + failures[*ann.graycard]);
    report.ground_truth = card->normalized();
    report.angular_error_deg =
        angular_error_deg(report.estimate.illuminant, *report.ground_truth);
  }
  return report;
}

}  // namespace interreflect
