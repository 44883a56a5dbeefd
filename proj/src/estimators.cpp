#include "interreflect/estimators.hpp"

#include <cmath>
#include <cstdio>
#include <limits>

namespace interreflect {

namespace {

struct NormalEq {
  double a11 = 0.0, a12 = 0.0, a22 = 0.0;
  double b1 = 0.0, b2 = 0.0;

  void add(const ChromaLine& l, double w) {
    const double c = l.nx * l.anchor.r + l.ny * l.anchor.g;
    a11 += w * l.nx * l.nx;
    a12 += w * l.nx * l.ny;
    a22 += w * l.ny * l.ny;
    b1 += w * l.nx * c;
    b2 += w * l.ny * c;
  }

  // Eigenvalue ratio of the symmetric 2x2 matrix.
  double condition() const {
    const double tr = a11 + a22;
    const double det = a11 * a22 - a12 * a12;
    const double disc = std::sqrt(std::max(tr * tr - 4.0 * det, 0.0));
    const double lo = 0.5 * (tr - disc);
    const double hi = 0.5 * (tr + disc);
    if (!(lo > 0.0)) return std::numeric_limits<double>::infinity();
    return hi / lo;
  }

  bool solve(ChromaPoint& out) const {
    const double det = a11 * a22 - a12 * a12;
    if (!(std::abs(det) > 0.0)) return false;
    out.r = (b1 * a22 - b2 * a12) / det;
    out.g = (a11 * b2 - a12 * b1) / det;
    return true;
  }
};

double sum_of_distances(std::span<const ChromaLine> lines, const ChromaPoint& x) {
  double s = 0.0;
  for (const auto& l : lines) s += point_line_distance(l, x);
  return s;
}

std::string condition_warning(double cond) {
  char buf[96];
  std::snprintf(buf, sizeof(buf),
                "near-parallel color lines: condition number %.3g", cond);
  return buf;
}

void check_observation(const InterreflectionObservation& obs) {
  for (const RGBColor* c : {&obs.direct_r1, &obs.direct_r2, &obs.mixed})
    if (!(c->min_channel() > 0.0))
      throw EstimationError("observation has a non-positive channel");
}

}  // namespace

const char* method_name(Method m) {
  switch (m) {
    case Method::pure: return "pure";
    case Method::gm: return "gm";
    case Method::ls: return "ls";
  }
  return "?";
}

Method parse_method(const std::string& name) {
  if (name == "pure") return Method::pure;
  if (name == "gm") return Method::gm;
  if (name == "ls") return Method::ls;
  throw ConfigError("unknown method '" + name + "' (expected pure, gm or ls)");
}

RGBColor estimate_pure(const RGBColor& c1, const RGBColor& c2,
                       const RGBColor& c12, const Tolerances& tol) {
  return divide(c1 * c2, c12, tol).normalized();
}

ChromaLine build_color_line(const InterreflectionObservation& obs,
                            const Tolerances& tol) {
  check_observation(obs);
  const RGBColor ratio = divide(obs.mixed, obs.direct_r1 * obs.direct_r2, tol);
  const ChromaPoint p = project_chroma(reciprocal(obs.direct_r2, tol));
  const ChromaPoint q = project_chroma(ratio);
  return line_through(p, q, tol);
}

double pencil_condition(std::span<const ChromaLine> lines) {
  NormalEq eq;
  for (const auto& l : lines) eq.add(l, 1.0);
  return eq.condition();
}

ChromaPoint intersect_least_squares(std::span<const ChromaLine> lines,
                                    const Tolerances& tol) {
  if (lines.size() < 2)
    throw EstimationError("need at least two color lines to intersect");
  NormalEq eq;
  for (const auto& l : lines) eq.add(l, 1.0);
  ChromaPoint x;
  if (eq.condition() > tol.condition_error || !eq.solve(x))
    throw EstimationError("parallel color lines: intersection is ill-conditioned");
  return x;
}

GeometricMedianResult solve_geometric_median(std::span<const ChromaLine> lines,
                                             const SolverOptions& opts) {
  GeometricMedianResult res;
  res.point = intersect_least_squares(lines, opts.tol);

  const double cond = pencil_condition(lines);
  if (cond > opts.tol.condition_warn) res.warnings.push_back(condition_warning(cond));

  double objective = sum_of_distances(lines, res.point);
  res.objective_history.push_back(objective);
  res.converged = false;

  // The objective is piecewise linear and convex, so its minimum sits on a
  // pairwise intersection. Visiting those keeps the reweighted iteration from
  // locking onto a non-optimal crossing (any point on two lines is a fixed
  // point of the raw iteration).
  {
    ChromaPoint best = res.point;
    double best_obj = objective;
    for (std::size_t i = 0; i < lines.size(); ++i)
      for (std::size_t j = i + 1; j < lines.size(); ++j) {
        if (std::abs(lines[i].nx * lines[j].ny - lines[i].ny * lines[j].nx) <=
            opts.tol.epsilon_parallel)
          continue;
        const ChromaPoint v = intersect_pair(lines[i], lines[j], opts.tol);
        const double obj = sum_of_distances(lines, v);
        if (obj < best_obj) {
          best_obj = obj;
          best = v;
        }
      }
    if (best_obj < objective) {
      res.point = best;
      objective = best_obj;
      res.objective_history.push_back(objective);
    }
  }

  for (int k = 0; k < opts.max_iterations; ++k) {
    NormalEq eq;
    for (const auto& l : lines)
      eq.add(l, 1.0 / std::max(point_line_distance(l, res.point), opts.epsilon_irls));

    ChromaPoint target;
    if (!eq.solve(target)) {
      res.warnings.push_back("ill-conditioned reweighting step; stopping early");
      res.converged = true;
      break;
    }

    // The IRLS step never increases the smoothed objective; backtracking
    // absorbs the epsilon smoothing so the recorded objective is monotone.
    double dx = target.r - res.point.r;
    double dy = target.g - res.point.g;
    double t = 1.0;
    ChromaPoint next{res.point.r + dx, res.point.g + dy};
    double next_obj = sum_of_distances(lines, next);
    while (next_obj > objective && t > 1e-12) {
      t *= 0.5;
      next = {res.point.r + t * dx, res.point.g + t * dy};
      next_obj = sum_of_distances(lines, next);
    }
    if (next_obj > objective) {
      res.converged = true;
      break;
    }

    const double step = std::hypot(next.r - res.point.r, next.g - res.point.g);
    res.point = next;
    objective = next_obj;
    res.objective_history.push_back(objective);
    ++res.iterations;

    if (step < opts.step_tolerance) {
      res.converged = true;
      break;
    }
  }

  if (!res.converged && res.iterations >= opts.max_iterations)
    res.warnings.push_back("geometric median did not converge within iteration cap");
  return res;
}

ChromaPoint geometric_median_lines(std::span<const ChromaLine> lines,
                                   const SolverOptions& opts) {
  return solve_geometric_median(lines, opts).point;
}

EstimateReport estimate_from_observations(
    std::span<const InterreflectionObservation> observations, Method method,
    const SolverOptions& opts) {
  if (method == Method::pure)
    throw ConfigError("method 'pure' takes direct triples, not observations");
  if (observations.size() < 2)
    throw EstimationError("insufficient observations: need at least two");

  std::vector<ChromaLine> lines;
  lines.reserve(observations.size());
  for (const auto& obs : observations)
    lines.push_back(build_color_line(obs, opts.tol));

  EstimateReport report;
  report.method = method;

  ChromaPoint solution;
  if (lines.size() == 2) {
    // Both methods reduce to the exact pairwise intersection.
    solution = intersect_pair(lines[0], lines[1], opts.tol);
    const double cond = pencil_condition(lines);
    if (cond > opts.tol.condition_warn)
      report.warnings.push_back(condition_warning(cond));
  } else if (method == Method::ls) {
    solution = intersect_least_squares(lines, opts.tol);
    const double cond = pencil_condition(lines);
    if (cond > opts.tol.condition_warn)
      report.warnings.push_back(condition_warning(cond));
  } else {
    auto gm = solve_geometric_median(lines, opts);
    solution = gm.point;
    report.iterations = gm.iterations;
    report.converged = gm.converged;
    report.warnings = std::move(gm.warnings);
  }

  report.illuminant = chroma_to_illuminant(solution);
  report.per_line_residuals.reserve(lines.size());
  for (const auto& l : lines)
    report.per_line_residuals.push_back(point_line_distance(l, solution));
  return report;
}

}  // namespace interreflect
