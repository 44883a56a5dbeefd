#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "interreflect/estimators.hpp"

namespace interreflect {

// Linear RGB image, row-major, channels in [0, white_level].
struct LinearImage {
  int width = 0;
  int height = 0;
  std::vector<double> pixels;  // 3 * width * height
  double white_level = 1.0;

  RGBColor at(int x, int y) const {
    const std::size_t i = 3 * (static_cast<std::size_t>(y) * width + x);
    return {pixels[i], pixels[i + 1], pixels[i + 2]};
  }
};

// Reads binary PPM (P6, maxval 255 or 65535) or color PFM (PF, either byte
// order per its scale header, bottom-to-top rows). PPM samples are normalized
// by maxval; PFM samples are clamped into [0, white_level].
LinearImage load_image(const std::string& path);

void save_ppm16(const std::string& path, const LinearImage& img);
void save_pfm(const std::string& path, const LinearImage& img);

enum class PatchShape { rect, circle };
enum class PatchRole { direct_r1, direct_r2, mixed, graycard };

struct PatchRegion {
  PatchShape shape = PatchShape::rect;
  PatchRole role = PatchRole::direct_r1;
  // rect
  int x = 0, y = 0, w = 0, h = 0;
  // circle
  double cx = 0.0, cy = 0.0, radius = 0.0;
};

struct InterreflectionTriple {
  std::string direct_r1;
  std::string direct_r2;
  std::string mixed;
};

struct SceneAnnotation {
  std::string image_path;
  std::map<std::string, PatchRegion> patches;
  std::vector<InterreflectionTriple> interreflections;
  std::optional<std::string> graycard;
  double clip_threshold = 0.98;
  int min_valid_pixels = 16;
};

// Validating JSON loader; see the README for the schema. Unknown patch
// references and out-of-range settings raise ConfigError naming the culprit.
SceneAnnotation load_annotation(const std::string& path);

// Robust patch color: drop pixels with any channel at or above
// clip_threshold * white_level, then take the per-channel median of the
// survivors (lower-middle convention). Throws when fewer than
// min_valid_pixels survive.
RGBColor sample_patch(const LinearImage& img, const PatchRegion& region,
                      double clip_threshold, int min_valid_pixels);

// Unit illuminant direction from a spectrally flat reference patch.
RGBColor ground_truth_from_graycard(const LinearImage& img,
                                    const PatchRegion& region,
                                    double clip_threshold, int min_valid_pixels);

struct SceneReport {
  EstimateReport estimate;
  std::optional<RGBColor> ground_truth;
  std::optional<double> angular_error_deg;
  std::vector<std::string> skipped_triples;
};

// Samples every referenced patch, assembles one observation per triple
// (triples whose line degenerates or whose patches saturate are skipped and
// reported), and estimates from the survivors. Needs at least two usable
// triples.
SceneReport estimate_scene(const LinearImage& img, const SceneAnnotation& ann,
                           Method method, const SolverOptions& opts = {});

}  // namespace interreflect
