#include "interreflect/geometry.hpp"

#include <algorithm>
#include <string>

namespace interreflect {

namespace {

const char* darkest_channel_name(const RGBColor& c) {
  if (c.r <= c.g && c.r <= c.b) return "red";
  if (c.g <= c.b) return "green";
  return "blue";
}

}  // namespace

RGBColor reciprocal(const RGBColor& c, const Tolerances& tol) {
  const double eps = tol.epsilon_channel * c.max_channel();
  if (!(c.min_channel() > eps))
    throw EstimationError(std::string("reciprocal of dark channel: ") +
                          darkest_channel_name(c));
  return {1.0 / c.r, 1.0 / c.g, 1.0 / c.b};
}

RGBColor divide(const RGBColor& a, const RGBColor& b, const Tolerances& tol) {
  const double eps = tol.epsilon_channel * b.max_channel();
  if (!(b.min_channel() > eps))
    throw EstimationError(std::string("division by dark channel: ") +
                          darkest_channel_name(b));
  return {a.r / b.r, a.g / b.g, a.b / b.b};
}

ChromaPoint project_chroma(const RGBColor& c) {
  const double s = c.sum();
  if (!(s > 0.0))
    throw EstimationError("chromaticity projection of zero vector");
  return {c.r / s, c.g / s};
}

ChromaLine line_through(const ChromaPoint& p, const ChromaPoint& q,
                        const Tolerances& tol) {
  const double dx = q.r - p.r;
  const double dy = q.g - p.g;
  const double len = std::hypot(dx, dy);
  if (!(len > tol.epsilon_points))
    throw EstimationError("degenerate color line: defining points coincide");
  return {p, -dy / len, dx / len};
}

double point_line_distance(const ChromaLine& l, const ChromaPoint& x) {
  return std::abs(l.nx * (x.r - l.anchor.r) + l.ny * (x.g - l.anchor.g));
}

ChromaPoint intersect_pair(const ChromaLine& l1, const ChromaLine& l2,
                           const Tolerances& tol) {
  // det of the two unit normals equals sin(angle between the lines).
  const double det = l1.nx * l2.ny - l1.ny * l2.nx;
  if (!(std::abs(det) > tol.epsilon_parallel))
    throw EstimationError("parallel color lines");
  const double c1 = l1.nx * l1.anchor.r + l1.ny * l1.anchor.g;
  const double c2 = l2.nx * l2.anchor.r + l2.ny * l2.anchor.g;
  return {(c1 * l2.ny - c2 * l1.ny) / det, (l1.nx * c2 - l2.nx * c1) / det};
}

RGBColor chroma_to_illuminant(const ChromaPoint& x) {
  const double b = 1.0 - x.r - x.g;
  if (!(x.r > 0.0) || !(x.g > 0.0) || !(b > 0.0))
    throw EstimationError("unphysical chromaticity: outside the r+g+b=1 simplex");
  return RGBColor{1.0 / x.r, 1.0 / x.g, 1.0 / b}.normalized();
}

double angular_error_deg(const RGBColor& a, const RGBColor& b) {
  if (!(a.norm() > 0.0) || !(b.norm() > 0.0))
    throw EstimationError("angular error of zero vector");
  // atan2 of the cross/dot pair evaluates arccos of the normalized dot
  // product without its precision cliff near zero angle.
  const double cx = a.g * b.b - a.b * b.g;
  const double cy = a.b * b.r - a.r * b.b;
  const double cz = a.r * b.g - a.g * b.r;
  const double sin_term = std::sqrt(cx * cx + cy * cy + cz * cz);
  return std::atan2(sin_term, dot(a, b)) * 180.0 / 3.14159265358979323846;
}

}  // namespace interreflect
