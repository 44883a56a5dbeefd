#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <array>
#include <utility>
#include <vector>

#include "interreflect/image.hpp"
#include "interreflect/simulation.hpp"

namespace py = pybind11;
using namespace interreflect;

namespace {

using Color = std::array<double, 3>;
using Point = std::pair<double, double>;
using Line = std::pair<Point, Point>;  // (anchor, unit normal)

RGBColor to_rgb(const Color& c) { return {c[0], c[1], c[2]}; }
Color from_rgb(const RGBColor& c) { return {c.r, c.g, c.b}; }
ChromaLine to_line(const Line& l) {
  return {{l.first.first, l.first.second}, l.second.first, l.second.second};
}
Line from_line(const ChromaLine& l) {
  return {{l.anchor.r, l.anchor.g}, {l.nx, l.ny}};
}

SolverOptions make_options(double epsilon_irls, double step_tolerance,
                           int max_iterations) {
  SolverOptions opts;
  opts.epsilon_irls = epsilon_irls;
  opts.step_tolerance = step_tolerance;
  opts.max_iterations = max_iterations;
  return opts;
}

std::vector<InterreflectionObservation> to_observations(
    const std::vector<std::array<Color, 3>>& raw) {
  std::vector<InterreflectionObservation> out;
  out.reserve(raw.size());
  for (const auto& o : raw)
    out.push_back({to_rgb(o[0]), to_rgb(o[1]), to_rgb(o[2])});
  return out;
}

py::dict report_dict(const EstimateReport& r) {
  py::dict d;
  d["method"] = method_name(r.method);
  d["illuminant"] = from_rgb(r.illuminant);
  d["per_line_residuals"] = r.per_line_residuals;
  d["iterations"] = r.iterations;
  d["converged"] = r.converged;
  d["warnings"] = r.warnings;
  return d;
}

py::dict stats_dict(const ErrorStats& st) {
  py::dict d;
  d["mean"] = st.mean;
  d["median"] = st.median;
  d["trimean"] = st.trimean;
  d["best25"] = st.best25;
  d["worst25"] = st.worst25;
  d["p95"] = st.p95;
  d["max"] = st.max;
  d["min"] = st.min;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Illuminant chromaticity estimation from diffuse interreflections";

  const auto base = py::register_exception<Error>(m, "Error");
  py::register_exception<ConfigError>(m, "ConfigError", base);
  py::register_exception<DataError>(m, "DataError", base);
  py::register_exception<EstimationError>(m, "EstimationError", base);

  m.def(
      "estimate_pure",
      [](const Color& c1, const Color& c2, const Color& c12) {
        return from_rgb(estimate_pure(to_rgb(c1), to_rgb(c2), to_rgb(c12)));
      },
      py::arg("direct_r1"), py::arg("direct_r2"), py::arg("interreflection"),
      "Unit illuminant from a pure interreflection triple: "
      "normalize((c1*c2)/c12).");

  m.def(
      "angular_error_deg",
      [](const Color& a, const Color& b) {
        return angular_error_deg(to_rgb(a), to_rgb(b));
      },
      py::arg("a"), py::arg("b"));

  m.def(
      "project_chroma",
      [](const Color& c) {
        const ChromaPoint p = project_chroma(to_rgb(c));
        return Point{p.r, p.g};
      },
      py::arg("color"), "(r, g) coordinates in the r+g+b=1 plane.");

  m.def(
      "chroma_to_illuminant",
      [](const Point& p) {
        return from_rgb(chroma_to_illuminant({p.first, p.second}));
      },
      py::arg("point"));

  m.def(
      "build_color_line",
      [](const Color& d1, const Color& d2, const Color& mixed) {
        return from_line(
            build_color_line({to_rgb(d1), to_rgb(d2), to_rgb(mixed)}));
      },
      py::arg("direct_r1"), py::arg("direct_r2"), py::arg("mixed"),
      "Color line ((anchor_r, anchor_g), (nx, ny)) of one observation.");

  m.def(
      "point_line_distance",
      [](const Line& l, const Point& p) {
        return point_line_distance(to_line(l), {p.first, p.second});
      },
      py::arg("line"), py::arg("point"));

  m.def(
      "intersect_least_squares",
      [](const std::vector<Line>& raw) {
        std::vector<ChromaLine> lines;
        lines.reserve(raw.size());
        for (const auto& l : raw) lines.push_back(to_line(l));
        const ChromaPoint p = intersect_least_squares(lines);
        return Point{p.r, p.g};
      },
      py::arg("lines"));

  m.def(
      "geometric_median_lines",
      [](const std::vector<Line>& raw, double epsilon_irls,
         double step_tolerance, int max_iterations) {
        std::vector<ChromaLine> lines;
        lines.reserve(raw.size());
        for (const auto& l : raw) lines.push_back(to_line(l));
        const ChromaPoint p = geometric_median_lines(
            lines, make_options(epsilon_irls, step_tolerance, max_iterations));
        return Point{p.r, p.g};
      },
      py::arg("lines"), py::arg("epsilon_irls") = 1e-12,
      py::arg("step_tolerance") = 1e-10, py::arg("max_iterations") = 1000,
      "Point minimizing the sum of distances to the lines.");

  m.def(
      "estimate_from_observations",
      [](const std::vector<std::array<Color, 3>>& raw, const std::string& method,
         double epsilon_irls, double step_tolerance, int max_iterations) {
        const auto report = estimate_from_observations(
            to_observations(raw), parse_method(method),
            make_options(epsilon_irls, step_tolerance, max_iterations));
        return report_dict(report);
      },
      py::arg("observations"), py::arg("method") = "gm",
      py::arg("epsilon_irls") = 1e-12, py::arg("step_tolerance") = 1e-10,
      py::arg("max_iterations") = 1000,
      "Estimate from [(direct_r1, direct_r2, mixed), ...] color triples.");

  m.def(
      "summarize_errors",
      [](const std::vector<double>& errors) {
        return stats_dict(summarize_errors(errors));
      },
      py::arg("errors_deg"));

  m.def(
      "run_simulation",
      [](const std::string& dataset_dir, const std::string& method, int trials,
         std::uint64_t seed, int lines, double alpha_low, double alpha_high,
         int threads) {
        const SpectralDataset dataset = load_dataset(dataset_dir);
        TrialPlan plan;
        plan.seed = seed;
        plan.trials_per_illuminant = trials;
        plan.lines_per_trial = lines;
        plan.alpha_low = alpha_low;
        plan.alpha_high = alpha_high;
        plan.method = parse_method(method);
        const auto samples =
            plan.method == Method::pure
                ? run_pure_simulation(dataset, plan, threads)
                : run_colorline_simulation(dataset, plan, threads);
        py::list rows;
        for (const auto& s : samples)
          rows.append(py::make_tuple(s.illuminant_name, s.trial_index,
                                     s.error_deg, s.resample_count, s.valid));
        py::dict d;
        d["samples"] = rows;
        d["stats"] = stats_dict(summarize_errors(samples));
        return d;
      },
      py::arg("dataset_dir"), py::arg("method") = "pure",
      py::arg("trials") = 100, py::arg("seed") = 0, py::arg("lines") = 5,
      py::arg("alpha_low") = 0.2, py::arg("alpha_high") = 1.0,
      py::arg("threads") = 1,
      "Monte-Carlo run over a dataset directory; returns samples and stats.");

  m.def(
      "estimate_scene",
      [](const std::string& image_path, const std::string& annotation_path,
         const std::string& method) {
        const SceneAnnotation ann = load_annotation(annotation_path);
        const LinearImage img = load_image(image_path);
        const SceneReport rep =
            estimate_scene(img, ann, parse_method(method), SolverOptions{});
        py::dict d = report_dict(rep.estimate);
        d["skipped_triples"] = rep.skipped_triples;
        if (rep.ground_truth) {
          d["ground_truth"] = from_rgb(*rep.ground_truth);
          d["angular_error_deg"] = *rep.angular_error_deg;
        }
        return d;
      },
      py::arg("image_path"), py::arg("annotation_path"),
      py::arg("method") = "gm",
      "Full image pipeline: sample annotated patches and estimate.");

#ifdef INTERREFLECT_VERSION
  m.attr("__version__") = INTERREFLECT_VERSION;
#else
  m.attr("__version__") = "dev";
#endif
}
