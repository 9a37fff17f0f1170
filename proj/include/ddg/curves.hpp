#pragma once

// Turning angles, total curvature and integral geometry of planar and space polygons.

#include <cmath>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "ddg/core.hpp"
#include "ddg/geom_core.hpp"

namespace ddg {

namespace detail {

template <class Point>
double max_spread(const std::vector<Point>& pts) {
  double s = 0.0;
  for (const auto& p : pts) s = std::max(s, p.cwiseAbs().maxCoeff());
  return std::max(s, 1.0);
}

}  // namespace detail

/// A closed polygon in the plane. Consecutive vertices are distinct and the direction
/// never reverses at a vertex.
class PlanarPolygon {
 public:
  explicit PlanarPolygon(std::vector<Vector2> vertices, const Tolerances& tol = default_tolerances())
      : vertices_(std::move(vertices)) {
    const std::size_t n = vertices_.size();
    if (n < 3) throw Error(ErrorKind::InvalidArgument, "planar polygon needs at least 3 vertices");
    const double eps = tol.eps_degenerate * detail::max_spread(vertices_);
    for (std::size_t i = 0; i < n; ++i)
      if ((vertices_[(i + 1) % n] - vertices_[i]).norm() <= eps)
        throw Error(ErrorKind::DegenerateVertex, "vertices " + std::to_string(i) + " and " +
                                                     std::to_string((i + 1) % n) + " coincide");
    for (std::size_t i = 0; i < n; ++i)
      if (std::abs(turn_at(i)) >= kPi - tol.eps_angle)
        throw Error(ErrorKind::ReversalVertex, "direction reverses at vertex " + std::to_string(i));
  }

  const std::vector<Vector2>& vertices() const { return vertices_; }
  std::size_t size() const { return vertices_.size(); }

  /// Signed angle from edge (i-1, i) to edge (i, i+1); positive for a left turn.
  double turn_at(std::size_t i) const {
    const std::size_t n = vertices_.size();
    const Vector2 a = vertices_[i] - vertices_[(i + n - 1) % n];
    const Vector2 b = vertices_[(i + 1) % n] - vertices_[i];
    return std::atan2(a.x() * b.y() - a.y() * b.x(), a.dot(b));
  }

  double perimeter() const {
    double total = 0.0;
    for (std::size_t i = 0; i < vertices_.size(); ++i)
      total += (vertices_[(i + 1) % vertices_.size()] - vertices_[i]).norm();
    return total;
  }

 private:
  std::vector<Vector2> vertices_;
};

/// A polygon in R^3, open or closed. Closed polygons wrap indices modulo n.
class SpacePolygon {
 public:
  SpacePolygon(std::vector<Vector3> vertices, bool closed, const Tolerances& tol = default_tolerances())
      : vertices_(std::move(vertices)), closed_(closed) {
    const std::size_t n = vertices_.size();
    if (n < 3) throw Error(ErrorKind::InvalidArgument, "space polygon needs at least 3 vertices");
    const double eps = tol.eps_degenerate * detail::max_spread(vertices_);
    for (std::size_t i = 0; i < edge_count(); ++i)
      if (edge(i).norm() <= eps)
        throw Error(ErrorKind::DegenerateVertex, "vertices " + std::to_string(i) + " and " +
                                                     std::to_string((i + 1) % n) + " coincide");
    for (std::size_t i = first_vertex(); i < last_vertex(); ++i)
      if (turn_at(i) >= kPi - tol.eps_angle)
        throw Error(ErrorKind::ReversalVertex, "direction reverses at vertex " + std::to_string(i));
  }

  const std::vector<Vector3>& vertices() const { return vertices_; }
  bool closed() const { return closed_; }
  std::size_t size() const { return vertices_.size(); }
  std::size_t edge_count() const { return closed_ ? vertices_.size() : vertices_.size() - 1; }
  Vector3 edge(std::size_t i) const { return vertices_[(i + 1) % vertices_.size()] - vertices_[i]; }

  /// Range of vertices carrying a turning angle: all of them when closed, interior ones otherwise.
  std::size_t first_vertex() const { return closed_ ? 0 : 1; }
  std::size_t last_vertex() const { return closed_ ? vertices_.size() : vertices_.size() - 1; }

  /// pi minus the interior angle at vertex i.
  double turn_at(std::size_t i) const {
    const std::size_t n = vertices_.size();
    return angle_between(edge((i + n - 1) % n), edge(i));
  }

 private:
  std::vector<Vector3> vertices_;
  bool closed_;
};

inline std::vector<double> signed_turning_angles(const PlanarPolygon& p) {
  std::vector<double> out(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) out[i] = p.turn_at(i);
  return out;
}

/// The integer k with total signed curvature 2 pi k.
inline int turning_number(const PlanarPolygon& p, const Tolerances& tol = default_tolerances()) {
  double total = 0.0;
  for (double k : signed_turning_angles(p)) total += k;
  const double k = std::round(total / kTwoPi);
  if (std::abs(total - kTwoPi * k) > tol.eps_turning)
    throw Error(ErrorKind::NotClosedToMultiple,
                "turning sum " + std::to_string(total) + " is not a multiple of 2 pi");
  return static_cast<int>(k);
}

inline std::vector<double> turning_angles(const SpacePolygon& p) {
  std::vector<double> out;
  out.reserve(p.size());
  for (std::size_t i = p.first_vertex(); i < p.last_vertex(); ++i) out.push_back(p.turn_at(i));
  return out;
}

struct TotalCurvature {
  double total = 0.0;
  /// Set when a closed polygon attains the lower bound 2 pi (planar and convex).
  bool fenchel_equality = false;
};

inline TotalCurvature total_curvature(const SpacePolygon& p, const Tolerances& tol = default_tolerances()) {
  double total = 0.0;
  for (double k : turning_angles(p)) total += k;
  return {total, p.closed() && std::abs(total - kTwoPi) <= tol.eps_turning};
}

/// Spherical polygon of unit edge directions. Repeated consecutive directions (collinear
/// vertices, zero turning) are merged since they add no arc length.
inline SphericalPolygon tangent_indicatrix(const SpacePolygon& p, const Tolerances& tol = default_tolerances()) {
  std::vector<UnitVector> dirs;
  for (std::size_t i = 0; i < p.edge_count(); ++i) {
    UnitVector t = UnitVector::normalized(p.edge(i), tol);
    if (!dirs.empty() && (dirs.back().vec() - t.vec()).norm() <= tol.eps_unit) continue;
    dirs.push_back(t);
  }
  if (p.closed())
    while (dirs.size() > 1 && (dirs.back().vec() - dirs.front().vec()).norm() <= tol.eps_unit) dirs.pop_back();
  if (dirs.size() < (p.closed() ? 3u : 2u))
    throw Error(ErrorKind::DegenerateVertex, "tangent indicatrix collapses to too few directions");
  return SphericalPolygon(std::move(dirs), p.closed(), tol);
}

/// A unit v with <T_i, v> > eps for every vertex T_i, when one exists.
inline std::optional<UnitVector> open_hemisphere_witness(const SphericalPolygon& s,
                                                         const Tolerances& tol = default_tolerances()) {
  std::vector<Vector3> pts;
  pts.reserve(s.size());
  for (const auto& u : s.vertices()) pts.push_back(u.vec());
  if (auto w = detail::hemisphere_witness(pts, tol.eps_hemisphere)) return UnitVector::normalized(*w);
  return std::nullopt;
}

/// Length of a spherical polygon as pi times the mean number of crossings with a uniformly
/// random great circle. Directions with a vertex within 1e-12 of the circle are redrawn.
inline EstimateWithError crofton_length_estimate(const SphericalPolygon& s, std::uint64_t samples,
                                                 std::uint64_t seed = kDefaultSeed) {
  if (samples < 100) throw Error(ErrorKind::InvalidArgument, "Crofton estimate needs at least 100 samples");
  constexpr double kTie = 1e-12;
  const std::size_t n = s.size();
  std::vector<Vector3> pts;
  for (const auto& u : s.vertices()) pts.push_back(u.vec());
  std::vector<double> side(n);
  return run_sharded({samples, seed}, [&](std::mt19937_64& rng, std::uint64_t count) {
    std::normal_distribution<double> normal;
    SampleStats stats;
    for (std::uint64_t k = 0; k < count; ++k) {
      bool tie = true;
      while (tie) {
        Vector3 v(normal(rng), normal(rng), normal(rng));
        const double len = v.norm();
        if (len == 0.0) continue;
        v /= len;
        tie = false;
        for (std::size_t i = 0; i < n && !tie; ++i) {
          side[i] = pts[i].dot(v);
          tie = std::abs(side[i]) < kTie;
        }
      }
      int crossings = 0;
      for (std::size_t i = 0; i < s.arc_count(); ++i)
        if ((side[i] > 0) != (side[(i + 1) % n] > 0)) ++crossings;
      stats.add(crossings);
    }
    return stats;
  }, kPi);
}

/// Total curvature of the polygon inscribed in `curve` at the grid parameters.
/// For closed curves the grid covers one period; a final sample that repeats the first
/// point is dropped.
inline double inscribed_total_curvature(const std::function<Vector3(double)>& curve,
                                        const std::vector<double>& grid, bool closed,
                                        const Tolerances& tol = default_tolerances()) {
  for (std::size_t i = 1; i < grid.size(); ++i)
    if (!(grid[i] > grid[i - 1])) throw Error(ErrorKind::InvalidArgument, "parameter grid must increase strictly");
  std::vector<Vector3> pts;
  pts.reserve(grid.size());
  for (double t : grid) pts.push_back(curve(t));
  if (closed && pts.size() > 3 &&
      (pts.back() - pts.front()).norm() <= tol.eps_degenerate * detail::max_spread(pts))
    pts.pop_back();
  return total_curvature(SpacePolygon(std::move(pts), closed, tol), tol).total;
}

/// Uniform grid of n points: [a, b] for open curves, [a, b) for closed ones.
inline std::vector<double> uniform_grid(double a, double b, std::size_t n, bool closed) {
  std::vector<double> g(n);
  const double step = (b - a) / static_cast<double>(closed ? n : n - 1);
  for (std::size_t i = 0; i < n; ++i) g[i] = a + step * static_cast<double>(i);
  return g;
}

/// Width of a planar polygon in direction u: the length of its projection to the line.
inline double planar_width(const PlanarPolygon& p, const Vector2& u) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const auto& v : p.vertices()) {
    const double s = v.dot(u);
    lo = std::min(lo, s);
    hi = std::max(hi, s);
  }
  return hi - lo;
}

/// Mean width over uniformly random directions on the circle.
inline EstimateWithError planar_mean_width(const PlanarPolygon& p, std::uint64_t samples,
                                           std::uint64_t seed = kDefaultSeed) {
  return run_sharded({samples, seed}, [&](std::mt19937_64& rng, std::uint64_t count) {
    std::uniform_real_distribution<double> angle(0.0, kTwoPi);
    SampleStats stats;
    for (std::uint64_t k = 0; k < count; ++k) {
      const double a = angle(rng);
      stats.add(planar_width(p, Vector2(std::cos(a), std::sin(a))));
    }
    return stats;
  });
}

}  // namespace ddg
