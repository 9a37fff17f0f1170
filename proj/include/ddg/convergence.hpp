#pragma once

// Closed-form smooth oracles and convergence tables of discrete quantities against them.

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "ddg/core.hpp"
#include "ddg/curves.hpp"
#include "ddg/fixtures.hpp"
#include "ddg/mesh.hpp"

namespace ddg {

struct AnalyticCurve {
  std::string name;
  std::function<Vector3(double)> point;
  double t0 = 0.0;
  double t1 = kTwoPi;
  bool closed = true;
  double analytic_total_curvature = 0.0;
};

inline AnalyticCurve circle_curve(double radius = 1.0) {
  return {"circle", [radius](double t) { return Vector3(radius * std::cos(t), radius * std::sin(t), 0.0); },
          0.0, kTwoPi, true, kTwoPi};
}

inline AnalyticCurve ellipse_curve(double a = 2.0, double b = 1.0) {
  return {"ellipse", [a, b](double t) { return Vector3(a * std::cos(t), b * std::sin(t), 0.0); },
          0.0, kTwoPi, true, kTwoPi};
}

/// One turn of (cos t, sin t, h t): curvature 1/(1+h^2), length 2 pi sqrt(1+h^2).
inline AnalyticCurve helix_curve(double h = 1.0) {
  return {"helix", [h](double t) { return Vector3(std::cos(t), std::sin(t), h * t); },
          0.0, kTwoPi, false, kTwoPi / std::sqrt(1.0 + h * h)};
}

inline std::vector<AnalyticCurve> builtin_curves() {
  return {circle_curve(1.0), ellipse_curve(2.0, 1.0), helix_curve(1.0)};
}

inline double inscribed_total_curvature(const AnalyticCurve& c, std::size_t samples) {
  return inscribed_total_curvature(c.point, uniform_grid(c.t0, c.t1, samples, c.closed), c.closed);
}

struct AnalyticSurfaceOracle {
  std::string name;
  double area = 0.0;
  double total_mean_curvature = 0.0;  // integral of H = (k1 + k2) / 2
  double total_gauss = 0.0;
};

inline AnalyticSurfaceOracle sphere_oracle(double R) {
  return {"sphere", 4.0 * kPi * R * R, 4.0 * kPi * R, 4.0 * kPi};
}

inline AnalyticSurfaceOracle torus_oracle(double R, double r) {
  return {"torus", 4.0 * kPi * kPi * R * r, 2.0 * kPi * kPi * R, 0.0};
}

struct ConvergenceRow {
  double refinement = 0.0;
  double discrete = 0.0;
  double analytic = 0.0;
  double abs_err = 0.0;
  double rel_err = 0.0;
};

struct ConvergenceReport {
  std::string quantity;
  std::vector<ConvergenceRow> rows;
  /// False when some row's error exceeds the previous row's.
  bool monotone = true;
};

/// Evaluates `discrete` at each refinement of the schedule against a fixed analytic value.
inline ConvergenceReport convergence_report(std::string quantity, const std::function<double(double)>& discrete,
                                            double analytic, const std::vector<double>& schedule) {
  ConvergenceReport rep{std::move(quantity), {}, true};
  for (double r : schedule) {
    const double d = discrete(r);
    const double abs_err = std::abs(d - analytic);
    rep.rows.push_back({r, d, analytic, abs_err, analytic != 0.0 ? abs_err / std::abs(analytic) : abs_err});
    if (rep.rows.size() > 1 && abs_err > rep.rows[rep.rows.size() - 2].abs_err) rep.monotone = false;
  }
  return rep;
}

enum class SurfaceQuantity { Area, TotalMeanCurvature, TotalGaussCurvature };

inline std::string_view to_string(SurfaceQuantity q) {
  switch (q) {
    case SurfaceQuantity::Area: return "area";
    case SurfaceQuantity::TotalMeanCurvature: return "total_mean_curvature";
    case SurfaceQuantity::TotalGaussCurvature: return "total_gauss_curvature";
  }
  return "unknown";
}

inline double surface_quantity(const TriangleMesh& m, SurfaceQuantity q) {
  switch (q) {
    case SurfaceQuantity::Area: return surface_area(m);
    case SurfaceQuantity::TotalMeanCurvature: return total_mean_curvature(m);
    case SurfaceQuantity::TotalGaussCurvature: {
      double s = 0.0;
      for (double k : vertex_angle_defect(m)) s += k;
      return s;
    }
  }
  return 0.0;
}

/// Icospheres of radius R at the given subdivision levels.
inline ConvergenceReport icosphere_report(SurfaceQuantity q, double R, const std::vector<int>& levels) {
  const auto oracle = sphere_oracle(R);
  const double analytic = q == SurfaceQuantity::Area                 ? oracle.area
                          : q == SurfaceQuantity::TotalMeanCurvature ? oracle.total_mean_curvature
                                                                     : oracle.total_gauss;
  std::vector<double> schedule(levels.begin(), levels.end());
  return convergence_report(std::string(to_string(q)),
                            [&](double level) { return surface_quantity(icosphere(R, static_cast<int>(level)), q); },
                            analytic, schedule);
}

/// Tori (R, r) on n x n grids.
inline ConvergenceReport torus_report(SurfaceQuantity q, double R, double r, const std::vector<int>& grids) {
  const auto oracle = torus_oracle(R, r);
  const double analytic = q == SurfaceQuantity::Area                 ? oracle.area
                          : q == SurfaceQuantity::TotalMeanCurvature ? oracle.total_mean_curvature
                                                                     : oracle.total_gauss;
  std::vector<double> schedule(grids.begin(), grids.end());
  return convergence_report(std::string(to_string(q)),
                            [&](double n) {
                              const int k = static_cast<int>(n);
                              return surface_quantity(torus_mesh(R, r, k, k), q);
                            },
                            analytic, schedule);
}

/// Inscribed polygon total curvature at the given sample counts.
inline ConvergenceReport curve_report(const AnalyticCurve& c, const std::vector<std::size_t>& samples) {
  std::vector<double> schedule(samples.begin(), samples.end());
  return convergence_report(c.name + "_total_curvature",
                            [&](double n) { return inscribed_total_curvature(c, static_cast<std::size_t>(n)); },
                            c.analytic_total_curvature, schedule);
}

}  // namespace ddg
