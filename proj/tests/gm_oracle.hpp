#pragma once

#include <cmath>
#include <span>

#include "interreflect/geometry.hpp"

// Brute-force reference for the sum-of-distances objective: a dense grid over
// [0,1]^2 plus two local refinements that are reliable on this piecewise
// linear convex function. Pattern search alone can stall in the narrow cones
// around line crossings, so the oracle also minimizes the 1-D convex
// restriction of the objective along every input line (the minimizer always
// lies on one) with a plateau-aware ternary search.

inline double gm_objective(std::span<const interreflect::ChromaLine> lines,
                           const interreflect::ChromaPoint& x) {
  double s = 0.0;
  for (const auto& l : lines) s += point_line_distance(l, x);
  return s;
}

inline interreflect::ChromaPoint gm_oracle_minimize(
    std::span<const interreflect::ChromaLine> lines, double spacing = 1e-3) {
  using interreflect::ChromaPoint;
  ChromaPoint best{0.0, 0.0};
  double best_obj = gm_objective(lines, best);
  auto offer = [&](const ChromaPoint& p) {
    const double obj = gm_objective(lines, p);
    if (obj < best_obj) {
      best_obj = obj;
      best = p;
    }
  };

  const int n = static_cast<int>(1.0 / spacing);
  for (int i = 0; i <= n; ++i)
    for (int j = 0; j <= n; ++j) offer({i * spacing, j * spacing});

  // compass refinement from the grid winner
  {
    ChromaPoint center = best;
    double center_obj = best_obj;
    double step = spacing;
    while (step > 1e-13) {
      bool moved = false;
      for (int di = -1; di <= 1; ++di)
        for (int dj = -1; dj <= 1; ++dj) {
          if (di == 0 && dj == 0) continue;
          const ChromaPoint p{center.r + di * step, center.g + dj * step};
          const double obj = gm_objective(lines, p);
          if (obj < center_obj) {
            center_obj = obj;
            center = p;
            moved = true;
          }
        }
      if (!moved) step *= 0.5;
    }
    offer(center);
  }

  // exact 1-D minimization along each line
  for (const auto& line : lines) {
    const double dx = -line.ny, dy = line.nx;
    auto at = [&](double t) {
      return ChromaPoint{line.anchor.r + t * dx, line.anchor.g + t * dy};
    };
    double lo = -1e4, hi = 1e4;
    for (int it = 0; it < 400 && hi - lo > 1e-13; ++it) {
      const double m1 = lo + (hi - lo) / 3.0;
      const double m2 = hi - (hi - lo) / 3.0;
      const double f1 = gm_objective(lines, at(m1));
      const double f2 = gm_objective(lines, at(m2));
      if (f1 < f2) {
        hi = m2;
      } else if (f2 < f1) {
        lo = m1;
      } else {
        lo = m1;
        hi = m2;
      }
    }
    offer(at(0.5 * (lo + hi)));
  }
  return best;
}
