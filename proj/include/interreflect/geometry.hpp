#pragma once

#include <cmath>

#include "interreflect/errors.hpp"

namespace interreflect {

// Numeric guards shared by the geometry kernel and the solvers.
// epsilon_channel is relative to the largest channel of the vector it guards.
struct Tolerances {
  double epsilon_channel = 1e-9;
  double epsilon_points = 1e-7;
  double epsilon_parallel = 1e-9;
  double condition_warn = 1e4;
  double condition_error = 1e8;
};

// Non-negative tristimulus vector in linear camera units. Scale-free: every
// consumer in this library only cares about the direction.
struct RGBColor {
  double r = 0.0;
  double g = 0.0;
  double b = 0.0;

  double max_channel() const { return std::max(r, std::max(g, b)); }
  double min_channel() const { return std::min(r, std::min(g, b)); }
  double sum() const { return r + g + b; }
  double norm() const { return std::sqrt(r * r + g * g + b * b); }

  RGBColor normalized() const {
    const double n = norm();
    if (!(n > 0.0))
      throw EstimationError("cannot normalize zero RGB vector");
    return {r / n, g / n, b / n};
  }
};

inline RGBColor operator*(const RGBColor& a, double k) {
  return {a.r * k, a.g * k, a.b * k};
}
inline RGBColor operator*(double k, const RGBColor& a) { return a * k; }
inline RGBColor operator*(const RGBColor& a, const RGBColor& b) {
  return {a.r * b.r, a.g * b.g, a.b * b.b};
}
inline RGBColor operator+(const RGBColor& a, const RGBColor& b) {
  return {a.r + b.r, a.g + b.g, a.b + b.b};
}
inline double dot(const RGBColor& a, const RGBColor& b) {
  return a.r * b.r + a.g * b.g + a.b * b.b;
}

// Point in the r+g+b=1 chromaticity plane, charted by its (r, g) affine
// coordinates with b = 1-r-g implied. Distances below are Euclidean in this
// chart; the chart choice is documented in the README.
struct ChromaPoint {
  double r = 0.0;
  double g = 0.0;
};

inline double distance(const ChromaPoint& a, const ChromaPoint& b) {
  return std::hypot(a.r - b.r, a.g - b.g);
}

// Line in the chromaticity plane: points x with normal . (x - anchor) = 0.
struct ChromaLine {
  ChromaPoint anchor;
  double nx = 0.0;  // unit normal
  double ny = 0.0;
};

// Componentwise 1/c. Throws when any channel is within epsilon_channel
// (relative to the largest channel) of zero.
RGBColor reciprocal(const RGBColor& c, const Tolerances& tol = {});

// Componentwise a/b with the same dark-channel guard on b.
RGBColor divide(const RGBColor& a, const RGBColor& b, const Tolerances& tol = {});

// (r, g) / (r+g+b). Invariant under positive scaling of c.
ChromaPoint project_chroma(const RGBColor& c);

ChromaLine line_through(const ChromaPoint& p, const ChromaPoint& q,
                        const Tolerances& tol = {});

double point_line_distance(const ChromaLine& l, const ChromaPoint& x);

ChromaPoint intersect_pair(const ChromaLine& l1, const ChromaLine& l2,
                           const Tolerances& tol = {});

// Inverts the chromaticity-plane representation of a reciprocal color back to
// a unit illuminant vector. x must lie strictly inside the chromaticity
// simplex.
RGBColor chroma_to_illuminant(const ChromaPoint& x);

// Angle between two color directions, in degrees. Symmetric, scale-invariant.
double angular_error_deg(const RGBColor& a, const RGBColor& b);

}  // namespace interreflect
