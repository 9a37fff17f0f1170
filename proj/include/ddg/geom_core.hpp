#pragma once

// Low-level exact geometry: angles, spherical polygons, simplices given by edge lengths.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <random>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "ddg/core.hpp"
#include "ddg/dual.hpp"

namespace ddg {

using Vector2 = Eigen::Vector2d;
using Vector3 = Eigen::Vector3d;

/// Angle in [0, pi] between two nonzero vectors, via atan2(|u x v|, u.v).
inline double angle_between(const Vector3& u, const Vector3& v,
                            const Tolerances& tol = default_tolerances()) {
  if (u.norm() < tol.eps_degenerate || v.norm() < tol.eps_degenerate)
    throw Error(ErrorKind::ZeroVector, "angle_between needs nonzero vectors");
  return std::atan2(u.cross(v).norm(), u.dot(v));
}

/// Dimension-free variant: 2 atan2(|u^ - v^|, |u^ + v^|), stable near 0 and pi.
inline double angle_between(const Eigen::VectorXd& u, const Eigen::VectorXd& v,
                            const Tolerances& tol = default_tolerances()) {
  const double nu = u.norm();
  const double nv = v.norm();
  if (nu < tol.eps_degenerate || nv < tol.eps_degenerate)
    throw Error(ErrorKind::ZeroVector, "angle_between needs nonzero vectors");
  const Eigen::VectorXd a = u / nu;
  const Eigen::VectorXd b = v / nv;
  return 2.0 * std::atan2((a - b).norm(), (a + b).norm());
}

/// A point of the unit sphere.
class UnitVector {
 public:
  explicit UnitVector(const Vector3& v, const Tolerances& tol = default_tolerances()) : v_(v) {
    if (!std::isfinite(v.x()) || !std::isfinite(v.y()) || !std::isfinite(v.z()) ||
        std::abs(v.norm() - 1.0) > tol.eps_unit)
      throw Error(ErrorKind::InvalidArgument, "UnitVector must have norm 1");
  }

  static UnitVector normalized(const Vector3& v, const Tolerances& tol = default_tolerances()) {
    const double n = v.norm();
    if (n < tol.eps_degenerate) throw Error(ErrorKind::ZeroVector, "cannot normalize a zero vector");
    return UnitVector(v / n, tol);
  }

  const Vector3& vec() const { return v_; }
  double dot(const UnitVector& o) const { return v_.dot(o.v_); }

 private:
  Vector3 v_;
};

/// A spherical polygon whose consecutive vertices are joined by minor great-circle arcs.
/// Closed polygons are cyclic and need 3 vertices; open ones are paths of at least 2.
class SphericalPolygon {
 public:
  explicit SphericalPolygon(std::vector<UnitVector> vertices, bool closed = true,
                            const Tolerances& tol = default_tolerances())
      : vertices_(std::move(vertices)), closed_(closed) {
    const std::size_t n = vertices_.size();
    if (n < (closed ? 3u : 2u))
      throw Error(ErrorKind::InvalidArgument, "spherical polygon has too few vertices");
    for (std::size_t i = 0; i < arc_count(); ++i) {
      const Vector3& a = vertices_[i].vec();
      const Vector3& b = vertices_[(i + 1) % n].vec();
      if ((a - b).norm() <= tol.eps_unit)
        throw Error(ErrorKind::DegenerateVertex, "consecutive spherical vertices coincide at " + std::to_string(i));
      if ((a + b).norm() <= tol.eps_unit)
        throw Error(ErrorKind::AntipodalDirections, "consecutive spherical vertices are antipodal at " + std::to_string(i));
    }
  }

  const std::vector<UnitVector>& vertices() const { return vertices_; }
  std::size_t size() const { return vertices_.size(); }
  bool closed() const { return closed_; }
  std::size_t arc_count() const { return closed_ ? vertices_.size() : vertices_.size() - 1; }
  const UnitVector& arc_start(std::size_t i) const { return vertices_[i]; }
  const UnitVector& arc_end(std::size_t i) const { return vertices_[(i + 1) % vertices_.size()]; }

  /// Sum of great-circle arc lengths.
  double length() const {
    double total = 0.0;
    for (std::size_t i = 0; i < arc_count(); ++i)
      total += angle_between(arc_start(i).vec(), arc_end(i).vec());
    return total;
  }

 private:
  std::vector<UnitVector> vertices_;
  bool closed_;
};

namespace detail {

/// max t subject to <p_i, v> >= t, |v|_inf <= 1, solved as a small LP with Bland's rule.
/// Returns (t, v). The origin is always feasible, so no phase one is needed.
inline std::pair<double, Vector3> hemisphere_lp(std::span<const Vector3> points) {
  const int n = static_cast<int>(points.size());
  const int vars = 7;  // v+ (3), v- (3), t
  const int rows = n + 7;
  const int cols = vars + rows + 1;
  std::vector<double> tab(static_cast<std::size_t>(rows + 1) * cols, 0.0);
  auto at = [&](int r, int c) -> double& { return tab[static_cast<std::size_t>(r) * cols + c]; };
  std::vector<int> basis(rows);
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < 3; ++k) {
      at(i, k) = -points[i][k];
      at(i, 3 + k) = points[i][k];
    }
    at(i, 6) = 1.0;
  }
  for (int k = 0; k < 7; ++k) {
    at(n + k, k) = 1.0;
    at(n + k, cols - 1) = 1.0;
  }
  for (int r = 0; r < rows; ++r) {
    at(r, vars + r) = 1.0;
    basis[r] = vars + r;
  }
  // Objective row holds reduced costs of "maximize t".
  at(rows, 6) = 1.0;
  constexpr double kPivotTol = 1e-12;
  for (int iter = 0; iter < 10 * (rows + vars) + 100; ++iter) {
    int enter = -1;
    for (int c = 0; c < cols - 1; ++c)
      if (at(rows, c) > kPivotTol) { enter = c; break; }
    if (enter < 0) break;
    int leave = -1;
    double best = 0.0;
    for (int r = 0; r < rows; ++r) {
      if (at(r, enter) <= kPivotTol) continue;
      const double ratio = at(r, cols - 1) / at(r, enter);
      if (leave < 0 || ratio < best - 1e-15 || (ratio <= best + 1e-15 && basis[r] < basis[leave])) {
        leave = r;
        best = ratio;
      }
    }
    if (leave < 0) break;  // unbounded cannot happen with the box rows
    const double piv = at(leave, enter);
    for (int c = 0; c < cols; ++c) at(leave, c) /= piv;
    for (int r = 0; r <= rows; ++r) {
      if (r == leave) continue;
      const double f = at(r, enter);
      if (f == 0.0) continue;
      for (int c = 0; c < cols; ++c) at(r, c) -= f * at(leave, c);
    }
    basis[leave] = enter;
  }
  double x[7] = {0, 0, 0, 0, 0, 0, 0};
  for (int r = 0; r < rows; ++r)
    if (basis[r] < vars) x[basis[r]] = at(r, cols - 1);
  return {x[6], Vector3(x[0] - x[3], x[1] - x[4], x[2] - x[5])};
}

/// Returns a unit v with <p_i, v> > eps for all points, or nothing.
/// Among the LP optimum and the normalized mean, the one with the larger margin is kept.
inline std::optional<Vector3> hemisphere_witness(std::span<const Vector3> points, double eps) {
  if (points.empty()) return Vector3::UnitZ();
  auto margin = [&](const Vector3& v) {
    double m = std::numeric_limits<double>::infinity();
    for (const auto& p : points) m = std::min(m, p.dot(v));
    return m;
  };
  auto [t, v] = hemisphere_lp(points);
  if (t <= eps || v.norm() == 0.0) return std::nullopt;
  Vector3 best = v.normalized();
  double best_margin = margin(best);
  Vector3 mean = Vector3::Zero();
  for (const auto& p : points) mean += p;
  if (mean.norm() > 0.0) {
    const Vector3 m = mean.normalized();
    if (const double mm = margin(m); mm > best_margin) {
      best = m;
      best_margin = mm;
    }
  }
  if (best_margin <= eps) return std::nullopt;
  return best;
}

}  // namespace detail

/// Area of a convex spherical polygon: sum of interior angles minus (n - 2) pi.
inline double spherical_polygon_area(const SphericalPolygon& p,
                                     const Tolerances& tol = default_tolerances()) {
  const std::size_t n = p.size();
  if (!p.closed() || n < 3)
    throw Error(ErrorKind::NotConvexSpherical, "area needs a closed polygon with at least 3 vertices");
  std::vector<Vector3> pts;
  pts.reserve(n);
  for (const auto& u : p.vertices()) pts.push_back(u.vec());

  int orientation = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const Vector3 edge_normal = pts[i].cross(pts[(i + 1) % n]);
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i || j == (i + 1) % n) continue;
      const double side = edge_normal.dot(pts[j]);
      if (std::abs(side) <= tol.eps_degenerate)
        throw Error(ErrorKind::NotConvexSpherical, "vertices are not in strictly convex position");
      const int s = side > 0 ? 1 : -1;
      if (orientation == 0) orientation = s;
      if (s != orientation) throw Error(ErrorKind::NotConvexSpherical, "polygon is not convex");
    }
  }
  if (!detail::hemisphere_witness(pts, 0.0))
    throw Error(ErrorKind::NotConvexSpherical, "polygon is not contained in an open hemisphere");

  double angle_sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Vector3& c = pts[i];
    const Vector3& prev = pts[(i + n - 1) % n];
    const Vector3& next = pts[(i + 1) % n];
    const Vector3 t_prev = prev - prev.dot(c) * c;
    const Vector3 t_next = next - next.dot(c) * c;
    angle_sum += angle_between(t_prev, t_next, tol);
  }
  return angle_sum - static_cast<double>(n - 2) * kPi;
}

// ---------------------------------------------------------------------------
// Simplices

namespace detail {

/// Pivoted Cholesky of the Gram matrix of a simplex given by squared edge lengths.
/// `sq` is the (d+1)x(d+1) row-major matrix of squared lengths. On success `rows[k]`
/// holds the coordinates (lower-triangular, first k+1 entries) of vertex order[k] + 1;
/// vertex 0 sits at the origin.
template <class Scalar>
struct GramFactor {
  int dim = 0;
  std::vector<int> order;
  std::vector<std::vector<Scalar>> rows;
  int failed_step = -1;
  double failed_pivot = 0.0;
};

template <class Scalar>
GramFactor<Scalar> factor_gram(int d, const std::vector<Scalar>& sq, double pivot_floor) {
  using std::sqrt;
  GramFactor<Scalar> f;
  f.dim = d;
  const int n = d + 1;
  auto len2 = [&](int i, int j) -> const Scalar& { return sq[static_cast<std::size_t>(i) * n + j]; };
  std::vector<Scalar> g(static_cast<std::size_t>(d) * d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      g[static_cast<std::size_t>(i) * d + j] = (len2(0, i + 1) + len2(0, j + 1) - len2(i + 1, j + 1)) * 0.5;
  auto G = [&](int i, int j) -> Scalar& { return g[static_cast<std::size_t>(i) * d + j]; };

  std::vector<int> remaining(d);
  for (int i = 0; i < d; ++i) remaining[i] = i;
  std::vector<Scalar> residual(d);
  for (int i = 0; i < d; ++i) residual[i] = G(i, i);
  // coords[i] = coordinates of gram index i, filled column by column
  std::vector<std::vector<Scalar>> coords(d, std::vector<Scalar>(d, Scalar(0.0)));

  for (int k = 0; k < d; ++k) {
    auto it = std::max_element(remaining.begin(), remaining.end(), [&](int a, int b) {
      return value_of(residual[a]) < value_of(residual[b]);
    });
    const int p = *it;
    remaining.erase(it);
    if (!(value_of(residual[p]) > pivot_floor)) {
      f.failed_step = k;
      f.failed_pivot = value_of(residual[p]);
      f.order.push_back(p);
      return f;
    }
    const Scalar root = sqrt(residual[p]);
    coords[p][k] = root;
    for (int q : remaining) {
      Scalar s = G(q, p);
      for (int j = 0; j < k; ++j) s -= coords[q][j] * coords[p][j];
      coords[q][k] = s / root;
      residual[q] -= coords[q][k] * coords[q][k];
    }
    f.order.push_back(p);
  }
  for (int k = 0; k < d; ++k) f.rows.push_back(coords[f.order[k]]);
  return f;
}

/// All dihedral angles of a simplex from squared lengths, indexed by the pair {a, b} of
/// vertices *not* in the codim-2 face. Result is a (d+1)x(d+1) row-major matrix.
template <class Scalar>
std::vector<Scalar> dihedral_angles_from_squares(int d, const std::vector<Scalar>& sq) {
  using std::atan2;
  using std::sqrt;
  const int n = d + 1;
  auto f = factor_gram<Scalar>(d, sq, 0.0);
  if (f.failed_step >= 0) throw Error(ErrorKind::UnrealizableMetric, "simplex is not realizable");
  std::vector<std::vector<Scalar>> pts(n, std::vector<Scalar>(d, Scalar(0.0)));
  for (int k = 0; k < d; ++k) pts[f.order[k] + 1] = f.rows[k];

  auto sub = [&](const std::vector<Scalar>& a, const std::vector<Scalar>& b) {
    std::vector<Scalar> r(d);
    for (int i = 0; i < d; ++i) r[i] = a[i] - b[i];
    return r;
  };
  auto dot = [&](const std::vector<Scalar>& a, const std::vector<Scalar>& b) {
    Scalar s(0.0);
    for (int i = 0; i < d; ++i) s += a[i] * b[i];
    return s;
  };

  std::vector<Scalar> out(static_cast<std::size_t>(n) * n, Scalar(0.0));
  for (int a = 0; a < n; ++a) {
    for (int b = a + 1; b < n; ++b) {
      std::vector<int> face;
      for (int v = 0; v < n; ++v)
        if (v != a && v != b) face.push_back(v);
      const auto& base = pts[face[0]];
      std::vector<std::vector<Scalar>> basis;
      for (std::size_t k = 1; k < face.size(); ++k) {
        auto e = sub(pts[face[k]], base);
        for (const auto& q : basis) {
          const Scalar c = dot(e, q);
          for (int i = 0; i < d; ++i) e[i] -= c * q[i];
        }
        const Scalar len = sqrt(dot(e, e));
        for (int i = 0; i < d; ++i) e[i] /= len;
        basis.push_back(std::move(e));
      }
      auto reject = [&](int v) {
        auto u = sub(pts[v], base);
        for (const auto& q : basis) {
          const Scalar c = dot(u, q);
          for (int i = 0; i < d; ++i) u[i] -= c * q[i];
        }
        const Scalar len = sqrt(dot(u, u));
        for (int i = 0; i < d; ++i) u[i] /= len;
        return u;
      };
      const auto ua = reject(a);
      const auto ub = reject(b);
      Scalar diff2(0.0), sum2(0.0);
      for (int i = 0; i < d; ++i) {
        diff2 += (ua[i] - ub[i]) * (ua[i] - ub[i]);
        sum2 += (ua[i] + ub[i]) * (ua[i] + ub[i]);
      }
      const Scalar angle = atan2(sqrt(diff2), sqrt(sum2)) * 2.0;
      out[static_cast<std::size_t>(a) * n + b] = angle;
      out[static_cast<std::size_t>(b) * n + a] = angle;
    }
  }
  return out;
}

inline std::string describe_vertices(const std::vector<int>& vs) {
  std::ostringstream os;
  os << '{';
  for (std::size_t i = 0; i < vs.size(); ++i) os << (i ? "," : "") << vs[i];
  os << '}';
  return os.str();
}

}  // namespace detail

/// A d-simplex given by its edge lengths. Construction verifies realizability in R^d.
class MetricSimplex {
 public:
  /// `lengths` is a symmetric (d+1)x(d+1) matrix with zero diagonal.
  MetricSimplex(int dim, Eigen::MatrixXd lengths, const Tolerances& tol = default_tolerances())
      : dim_(dim), lengths_(std::move(lengths)) {
    if (dim_ < 1) throw Error(ErrorKind::InvalidArgument, "simplex dimension must be at least 1");
    if (lengths_.rows() != dim_ + 1 || lengths_.cols() != dim_ + 1)
      throw Error(ErrorKind::InvalidArgument, "length matrix has the wrong size");
    for (int i = 0; i <= dim_; ++i)
      for (int j = i + 1; j <= dim_; ++j) {
        const double l = lengths_(i, j);
        if (!(l > 0.0) || !std::isfinite(l) || std::abs(l - lengths_(j, i)) > 0.0)
          throw Error(ErrorKind::UnrealizableMetric,
                      "edge {" + std::to_string(i) + "," + std::to_string(j) + "} needs a positive symmetric length");
      }
    const auto f = detail::factor_gram<double>(dim_, squared(), pivot_floor(tol));
    if (f.failed_step >= 0) {
      std::vector<int> sub{0};
      for (int k = 0; k <= f.failed_step; ++k) sub.push_back(f.order[k] + 1);
      std::sort(sub.begin(), sub.end());
      throw Error(ErrorKind::UnrealizableMetric,
                  "Gram pivot " + std::to_string(f.failed_pivot) + " degenerate at sub-simplex " +
                      detail::describe_vertices(sub));
    }
  }

  /// Lengths listed in lexicographic pair order (0,1),(0,2),...,(d-1,d).
  static MetricSimplex from_edge_list(int dim, std::span<const double> edges,
                                      const Tolerances& tol = default_tolerances()) {
    if (dim < 1 || edges.size() != static_cast<std::size_t>(dim * (dim + 1) / 2))
      throw Error(ErrorKind::InvalidArgument, "wrong number of edge lengths for the dimension");
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(dim + 1, dim + 1);
    std::size_t k = 0;
    for (int i = 0; i <= dim; ++i)
      for (int j = i + 1; j <= dim; ++j) m(i, j) = m(j, i) = edges[k++];
    return MetricSimplex(dim, std::move(m), tol);
  }

  /// Simplex with all edges of the same length.
  static MetricSimplex regular(int dim, double edge = 1.0) {
    Eigen::MatrixXd m = Eigen::MatrixXd::Constant(dim + 1, dim + 1, edge);
    m.diagonal().setZero();
    return MetricSimplex(dim, std::move(m));
  }

  /// Simplex spanned by the columns of `points` (ambient dimension arbitrary).
  static MetricSimplex from_points(const Eigen::MatrixXd& points,
                                   const Tolerances& tol = default_tolerances()) {
    const int n = static_cast<int>(points.cols());
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) m(i, j) = m(j, i) = (points.col(i) - points.col(j)).norm();
    return MetricSimplex(n - 1, std::move(m), tol);
  }

  int dim() const { return dim_; }
  double length(int i, int j) const { return lengths_(i, j); }
  const Eigen::MatrixXd& lengths() const { return lengths_; }
  double scale() const { return lengths_.maxCoeff(); }

  std::vector<double> squared() const {
    const int n = dim_ + 1;
    std::vector<double> sq(static_cast<std::size_t>(n) * n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) sq[static_cast<std::size_t>(i) * n + j] = lengths_(i, j) * lengths_(i, j);
    return sq;
  }

  /// The sub-simplex on the given (sorted, distinct) local vertices.
  MetricSimplex face(std::span<const int> vertices) const {
    const int n = static_cast<int>(vertices.size());
    Eigen::MatrixXd m(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) m(i, j) = lengths_(vertices[i], vertices[j]);
    return MetricSimplex(n - 1, std::move(m));
  }

  double pivot_floor(const Tolerances& tol) const {
    const double s = lengths_.maxCoeff();
    return tol.eps_degenerate * s * s;
  }

 private:
  int dim_;
  Eigen::MatrixXd lengths_;
};

/// A realization of a simplex: d+1 points (columns) in R^d.
struct EmbeddedSimplex {
  int dim = 0;
  Eigen::MatrixXd points;

  Eigen::MatrixXd edge_matrix() const {
    Eigen::MatrixXd e(dim, dim);
    for (int i = 0; i < dim; ++i) e.col(i) = points.col(i + 1) - points.col(0);
    return e;
  }

  double volume() const {
    double fact = 1.0;
    for (int i = 2; i <= dim; ++i) fact *= i;
    return std::abs(edge_matrix().determinant()) / fact;
  }
};

/// Places vertex 0 at the origin and factors the Gram matrix into coordinates.
inline EmbeddedSimplex embed_simplex(const MetricSimplex& s, const Tolerances& tol = default_tolerances()) {
  const int d = s.dim();
  const auto f = detail::factor_gram<double>(d, s.squared(), s.pivot_floor(tol));
  if (f.failed_step >= 0) throw Error(ErrorKind::UnrealizableMetric, "Gram matrix is not positive definite");
  EmbeddedSimplex e{d, Eigen::MatrixXd::Zero(d, d + 1)};
  for (int k = 0; k < d; ++k)
    for (int c = 0; c < d; ++c) e.points(c, f.order[k] + 1) = f.rows[k][c];
  const double scale = s.scale();
  for (int i = 0; i <= d; ++i)
    for (int j = i + 1; j <= d; ++j)
      if (std::abs((e.points.col(i) - e.points.col(j)).norm() - s.length(i, j)) > tol.eps_embed * scale)
        throw Error(ErrorKind::UnrealizableMetric, "embedding does not reproduce the edge lengths");
  return e;
}

namespace detail {

inline Eigen::MatrixXd cayley_menger(const MetricSimplex& s) {
  const int n = s.dim() + 1;
  Eigen::MatrixXd cm = Eigen::MatrixXd::Zero(n + 1, n + 1);
  for (int i = 1; i <= n; ++i) cm(0, i) = cm(i, 0) = 1.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) cm(i + 1, j + 1) = s.length(i, j) * s.length(i, j);
  return cm;
}

inline double cayley_menger_factor(int d) {
  double fact = 1.0;
  for (int i = 2; i <= d; ++i) fact *= i;
  const double sign = (d % 2 == 0) ? -1.0 : 1.0;  // (-1)^(d+1)
  return sign / (std::ldexp(1.0, d) * fact * fact);
}

}  // namespace detail

/// Volume from the Cayley-Menger determinant.
inline double simplex_volume(const MetricSimplex& s) {
  const Eigen::MatrixXd cm = detail::cayley_menger(s);
  const double vol2 = detail::cayley_menger_factor(s.dim()) * cm.partialPivLu().determinant();
  if (!(vol2 > 0.0)) throw Error(ErrorKind::UnrealizableMetric, "Cayley-Menger volume is not positive");
  return std::sqrt(vol2);
}

/// d vol / d l_ij as a symmetric matrix (zero diagonal).
/// Uses d vol / d l_ij = 2 vol l_ij (CM^-1)_{i+1,j+1}.
inline Eigen::MatrixXd simplex_volume_gradient(const MetricSimplex& s) {
  const Eigen::MatrixXd cm = detail::cayley_menger(s);
  const auto lu = cm.partialPivLu();
  const double vol2 = detail::cayley_menger_factor(s.dim()) * lu.determinant();
  if (!(vol2 > 0.0)) throw Error(ErrorKind::UnrealizableMetric, "Cayley-Menger volume is not positive");
  const double vol = std::sqrt(vol2);
  const Eigen::MatrixXd inv = lu.inverse();
  const int n = s.dim() + 1;
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j) g(i, j) = 2.0 * vol * s.length(i, j) * inv(i + 1, j + 1);
  return g;
}

namespace detail {

inline void check_face(const MetricSimplex& s, std::span<const int> face) {
  for (std::size_t i = 0; i < face.size(); ++i) {
    if (face[i] < 0 || face[i] > s.dim())
      throw Error(ErrorKind::BadFace, "face vertex " + std::to_string(face[i]) + " out of range");
    if (i > 0 && face[i] <= face[i - 1]) throw Error(ErrorKind::BadFace, "face vertices must be sorted and distinct");
  }
  if (face.empty()) throw Error(ErrorKind::BadFace, "empty face");
}

inline std::pair<int, int> complement_pair(const MetricSimplex& s, std::span<const int> face) {
  check_face(s, face);
  if (static_cast<int>(face.size()) != s.dim() - 1)
    throw Error(ErrorKind::BadFace, "dihedral angles live at codimension-2 faces");
  std::vector<int> rest;
  for (int v = 0; v <= s.dim(); ++v)
    if (std::find(face.begin(), face.end(), v) == face.end()) rest.push_back(v);
  return {rest[0], rest[1]};
}

}  // namespace detail

/// All dihedral angles, indexed by the complementary vertex pair: entry (a, b) is the
/// angle at the codim-2 face spanned by the other vertices.
inline Eigen::MatrixXd dihedral_angles(const MetricSimplex& s) {
  if (s.dim() < 2) throw Error(ErrorKind::BadFace, "dihedral angles need dimension at least 2");
  const auto flat = detail::dihedral_angles_from_squares<double>(s.dim(), s.squared());
  const int n = s.dim() + 1;
  Eigen::MatrixXd m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = flat[static_cast<std::size_t>(i) * n + j];
  return m;
}

/// Angle between the two facets containing the codim-2 face `q` (sorted local indices).
inline double dihedral_angle(const MetricSimplex& s, std::span<const int> q) {
  if (s.dim() < 2) throw Error(ErrorKind::BadFace, "dihedral angles need dimension at least 2");
  const auto [a, b] = detail::complement_pair(s, q);
  return dihedral_angles(s)(a, b);
}

/// Jacobian of all dihedral angles with respect to the edge lengths, by forward-mode
/// differentiation. Entry [pair(a,b)][edge(i,j)] uses the lexicographic pair order.
inline Eigen::MatrixXd dihedral_jacobian(const MetricSimplex& s) {
  const int d = s.dim();
  const int n = d + 1;
  const int pairs = n * (n - 1) / 2;
  Eigen::MatrixXd jac(pairs, pairs);
  int col = 0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j, ++col) {
      std::vector<Dual> sq(static_cast<std::size_t>(n) * n);
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
          const double l = s.length(a, b);
          const bool seeded = (a == i && b == j) || (a == j && b == i);
          sq[static_cast<std::size_t>(a) * n + b] = Dual(l * l, seeded ? 2.0 * l : 0.0);
        }
      const auto ang = detail::dihedral_angles_from_squares<Dual>(d, sq);
      int row = 0;
      for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b, ++row) jac(row, col) = ang[static_cast<std::size_t>(a) * n + b].d;
    }
  return jac;
}

/// Index of pair (i, j), i < j, in lexicographic order over n vertices.
inline int pair_index(int n, int i, int j) {
  if (i > j) std::swap(i, j);
  return i * n - i * (i + 1) / 2 + (j - i - 1);
}

/// Normalized external angle beta(q, s): exact for codimension up to 3,
/// Monte Carlo (with standard error) above.
struct ExternalAngle {
  double value = 0.0;
  double std_error = 0.0;
  bool exact = true;
};

namespace detail {

/// Outward unit facet normals of an embedded simplex; column a is normal to the facet opposite a.
inline Eigen::MatrixXd outward_facet_normals(const EmbeddedSimplex& e) {
  const int d = e.dim;
  const Eigen::MatrixXd grads = e.edge_matrix().inverse();  // row i = grad of barycentric i+1
  Eigen::MatrixXd normals(d, d + 1);
  Eigen::VectorXd g0 = Eigen::VectorXd::Zero(d);
  for (int i = 0; i < d; ++i) {
    const Eigen::VectorXd gi = grads.row(i).transpose();
    g0 -= gi;
    normals.col(i + 1) = -gi.normalized();
  }
  normals.col(0) = -g0.normalized();
  return normals;
}

/// Generators of the normal cone at face q, in an orthonormal basis of the normal space.
inline Eigen::MatrixXd normal_cone_generators(const MetricSimplex& s, std::span<const int> q) {
  const auto emb = embed_simplex(s);
  const Eigen::MatrixXd normals = outward_facet_normals(emb);
  std::vector<int> gens;
  for (int v = 0; v <= s.dim(); ++v)
    if (std::find(q.begin(), q.end(), v) == q.end()) gens.push_back(v);
  const int k = static_cast<int>(gens.size());
  Eigen::MatrixXd g(s.dim(), k);
  for (int c = 0; c < k; ++c) g.col(c) = normals.col(gens[c]);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  const Eigen::MatrixXd basis = qr.householderQ() * Eigen::MatrixXd::Identity(s.dim(), k);
  return basis.transpose() * g;
}

/// Solid angle (steradians) of the cone spanned by three vectors in R^3.
inline double triple_cone_solid_angle(const Vector3& a, const Vector3& b, const Vector3& c) {
  const Vector3 u = a.normalized(), v = b.normalized(), w = c.normalized();
  const double det = std::abs(u.dot(v.cross(w)));
  return 2.0 * std::atan2(det, 1.0 + u.dot(v) + v.dot(w) + w.dot(u));
}

}  // namespace detail

/// Fraction of standard normal samples in R^k landing in the cone {G c : c >= 0}.
inline EstimateWithError simplicial_cone_fraction(const Eigen::MatrixXd& generators, const MonteCarloConfig& mc) {
  const int k = static_cast<int>(generators.cols());
  const Eigen::MatrixXd inv = generators.inverse();
  return run_sharded(mc, [&](std::mt19937_64& rng, std::uint64_t n) {
    std::normal_distribution<double> normal;
    Eigen::VectorXd g(k);
    std::uint64_t hits = 0;
    for (std::uint64_t s = 0; s < n; ++s) {
      for (int i = 0; i < k; ++i) g[i] = normal(rng);
      const Eigen::VectorXd c = inv * g;
      if ((c.array() >= 0.0).all()) ++hits;
    }
    return bernoulli_stats(hits, n);
  });
}

inline ExternalAngle external_angle(const MetricSimplex& s, std::span<const int> q,
                                    const MonteCarloConfig& mc = {}) {
  detail::check_face(s, q);
  const int codim = s.dim() - (static_cast<int>(q.size()) - 1);
  switch (codim) {
    case 0: return {1.0, 0.0, true};
    case 1: return {0.5, 0.0, true};
    case 2: return {(kPi - dihedral_angle(s, q)) / kTwoPi, 0.0, true};
    case 3: {
      const Eigen::MatrixXd g = detail::normal_cone_generators(s, q);
      const double omega = detail::triple_cone_solid_angle(g.col(0), g.col(1), g.col(2));
      return {omega / (4.0 * kPi), 0.0, true};
    }
    default: {
      const auto est = simplicial_cone_fraction(detail::normal_cone_generators(s, q), mc);
      return {est.mean, est.std_error, false};
    }
  }
}

}  // namespace ddg
