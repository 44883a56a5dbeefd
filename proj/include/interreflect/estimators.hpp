#pragma once

#include <span>
#include <string>
#include <vector>

#include "interreflect/geometry.hpp"

namespace interreflect {

// One interreflection site: the two directly lit surface colors and the
// mixed (direct + interreflected) color measured on the first surface.
// All channels must be strictly positive.
struct InterreflectionObservation {
  RGBColor direct_r1;
  RGBColor direct_r2;
  RGBColor mixed;
};

enum class Method { pure, gm, ls };

const char* method_name(Method m);
Method parse_method(const std::string& name);

struct SolverOptions {
  double epsilon_irls = 1e-12;
  double step_tolerance = 1e-10;
  int max_iterations = 1000;
  Tolerances tol;
};

struct EstimateReport {
  RGBColor illuminant;  // unit vector
  Method method = Method::gm;
  std::vector<double> per_line_residuals;
  int iterations = 0;
  bool converged = true;
  std::vector<std::string> warnings;
};

// Recovers the illuminant direction from a pure interreflection triple:
// normalize((c1*c2)/c12) with componentwise product and division.
RGBColor estimate_pure(const RGBColor& c1, const RGBColor& c2,
                       const RGBColor& c12, const Tolerances& tol = {});

// Builds the color line of one observation: the ratio mixed/(d1*d2) is a
// positive combination of 1/d2 and 1/illuminant, so its chromaticity-plane
// projection and that of 1/d2 span a line through the projection of the
// reciprocal illuminant. Throws "degenerate color line" when the two
// projections coincide (no interreflected component, or the second surface
// matches the illuminant chromaticity).
ChromaLine build_color_line(const InterreflectionObservation& obs,
                            const Tolerances& tol = {});

// Condition number of the 2x2 normal matrix sum(n_i n_i^T). Large values mean
// a near-parallel pencil.
double pencil_condition(std::span<const ChromaLine> lines);

// Unique minimizer of sum((n_i . (x - p_i))^2) via the 2x2 normal equations.
ChromaPoint intersect_least_squares(std::span<const ChromaLine> lines,
                                    const Tolerances& tol = {});

struct GeometricMedianResult {
  ChromaPoint point;
  int iterations = 0;
  bool converged = true;
  std::vector<double> objective_history;  // non-increasing
  std::vector<std::string> warnings;
};

// Minimizer of sum(d(l_i, x)) by iteratively reweighted least squares from
// the least-squares initializer. The piecewise-linear objective attains its
// minimum on a pairwise intersection, so those are scanned before iterating;
// steps that would increase the objective are backtracked. As a result
// objective_history never increases.
GeometricMedianResult solve_geometric_median(std::span<const ChromaLine> lines,
                                             const SolverOptions& opts = {});

ChromaPoint geometric_median_lines(std::span<const ChromaLine> lines,
                                   const SolverOptions& opts = {});

// Full color-line pipeline: build one line per observation, intersect with
// the requested method (two lines short-circuit to the exact pair
// intersection for either method), and invert back to a unit illuminant.
EstimateReport estimate_from_observations(
    std::span<const InterreflectionObservation> observations, Method method,
    const SolverOptions& opts = {});

}  // namespace interreflect
