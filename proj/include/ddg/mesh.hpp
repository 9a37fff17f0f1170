#pragma once

// Curvature of closed polyhedral surfaces in R^3: exterior angles, angle defects,
// Gauss-Bonnet, Steiner polynomials and the projection/width identities.

#include <algorithm>
#include <array>
#include <concepts>
#include <limits>
#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "ddg/core.hpp"
#include "ddg/geom_core.hpp"

namespace ddg {

/// One undirected edge a < b with the face holding a->b on the left and b->a on the right.
struct SurfaceEdge {
  int a = 0;
  int b = 0;
  int left = -1;
  int right = -1;
};

namespace detail {

/// Closed oriented polygonal surface with validated combinatorics.
class Surface {
 public:
  Surface() = default;

  Surface(std::vector<Vector3> vertices, std::vector<std::vector<int>> faces, const Tolerances& tol)
      : vertices_(std::move(vertices)), faces_(std::move(faces)) {
    const int nv = static_cast<int>(vertices_.size());
    if (nv == 0 || faces_.empty()) throw Error(ErrorKind::NonManifold, "surface has no vertices or faces");
    for (const auto& p : vertices_)
      if (!p.allFinite()) throw Error(ErrorKind::InvalidArgument, "vertex coordinates must be finite");

    std::map<std::pair<int, int>, int> directed;
    for (int f = 0; f < static_cast<int>(faces_.size()); ++f) {
      const auto& face = faces_[f];
      if (face.size() < 3) throw Error(ErrorKind::NonManifold, "face " + std::to_string(f) + " has fewer than 3 vertices");
      for (std::size_t i = 0; i < face.size(); ++i) {
        const int a = face[i];
        if (a < 0 || a >= nv)
          throw Error(ErrorKind::IndexOutOfRange, "face " + std::to_string(f) + " references vertex " + std::to_string(a));
        for (std::size_t j = i + 1; j < face.size(); ++j)
          if (face[j] == a) throw Error(ErrorKind::NonManifold, "face " + std::to_string(f) + " repeats a vertex");
        const int b = face[(i + 1) % face.size()];
        if (!directed.emplace(std::make_pair(a, b), f).second)
          throw Error(ErrorKind::NonManifold, "directed edge (" + std::to_string(a) + "," + std::to_string(b) +
                                                  ") used twice: inconsistent orientation or non-manifold edge");
      }
    }
    for (const auto& [key, f] : directed) {
      const auto [a, b] = key;
      const auto twin = directed.find({b, a});
      if (twin == directed.end())
        throw Error(ErrorKind::NonManifold, "edge (" + std::to_string(a) + "," + std::to_string(b) +
                                                ") has no opposite half: surface is not closed");
      if (a < b) edges_.push_back({a, b, f, twin->second});
    }
    directed_ = std::move(directed);

    // Umbrella of faces around each vertex must be a single cycle.
    corners_.assign(nv, {});
    for (int f = 0; f < static_cast<int>(faces_.size()); ++f)
      for (int v : faces_[f]) corners_[v].push_back(f);
    umbrellas_.assign(nv, {});
    for (int v = 0; v < nv; ++v) {
      if (corners_[v].empty()) throw Error(ErrorKind::NonManifold, "vertex " + std::to_string(v) + " is not used by any face");
      std::vector<int>& ring = umbrellas_[v];
      int f = corners_[v].front();
      do {
        ring.push_back(f);
        f = directed_.at({v, prev_in_face(f, v)});
      } while (f != ring.front() && ring.size() <= corners_[v].size());
      if (ring.size() != corners_[v].size())
        throw Error(ErrorKind::NonManifold, "vertex " + std::to_string(v) + " has a pinched neighbourhood");
    }

    // Connected components, by union-find over edges.
    std::vector<int> parent(nv);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int x) {
      while (parent[x] != x) x = parent[x] = parent[parent[x]];
      return x;
    };
    for (const auto& e : edges_) parent[find(e.a)] = find(e.b);
    components_ = 0;
    for (int v = 0; v < nv; ++v)
      if (find(v) == v) ++components_;

    Eigen::Vector3d lo = vertices_.front(), hi = vertices_.front();
    for (const auto& p : vertices_) {
      lo = lo.cwiseMin(p);
      hi = hi.cwiseMax(p);
    }
    diameter_ = std::max((hi - lo).norm(), 1e-300);

    for (int f = 0; f < static_cast<int>(faces_.size()); ++f) {
      const Vector3 n = newell(f);
      const double area = 0.5 * n.norm();
      if (!(area > tol.eps_degenerate * diameter_ * diameter_))
        throw Error(ErrorKind::DegenerateNormal, "face " + std::to_string(f) + " has (near) zero area");
      areas_.push_back(area);
      normals_.push_back(n.normalized());
    }
  }

  const std::vector<Vector3>& vertices() const { return vertices_; }
  const std::vector<std::vector<int>>& faces() const { return faces_; }
  const std::vector<SurfaceEdge>& edges() const { return edges_; }
  const std::vector<Vector3>& normals() const { return normals_; }
  const std::vector<double>& face_areas() const { return areas_; }
  /// Faces around vertex v in rotational order.
  const std::vector<int>& umbrella(int v) const { return umbrellas_[v]; }
  int components() const { return components_; }
  double diameter() const { return diameter_; }

  int prev_in_face(int f, int v) const {
    const auto& face = faces_[f];
    const auto it = std::find(face.begin(), face.end(), v);
    const std::size_t i = static_cast<std::size_t>(it - face.begin());
    return face[(i + face.size() - 1) % face.size()];
  }

  Vector3 face_centroid(int f) const {
    Vector3 c = Vector3::Zero();
    for (int v : faces_[f]) c += vertices_[v];
    return c / static_cast<double>(faces_[f].size());
  }

 private:
  Vector3 newell(int f) const {
    Vector3 n = Vector3::Zero();
    const auto& face = faces_[f];
    for (std::size_t i = 0; i < face.size(); ++i) {
      const Vector3& p = vertices_[face[i]];
      const Vector3& q = vertices_[face[(i + 1) % face.size()]];
      n += p.cross(q);
    }
    return n;
  }

  std::vector<Vector3> vertices_;
  std::vector<std::vector<int>> faces_;
  std::vector<SurfaceEdge> edges_;
  std::map<std::pair<int, int>, int> directed_;
  std::vector<std::vector<int>> corners_;
  std::vector<std::vector<int>> umbrellas_;
  std::vector<Vector3> normals_;
  std::vector<double> areas_;
  int components_ = 0;
  double diameter_ = 1.0;
};

}  // namespace detail

/// Closed oriented triangle mesh (2-manifold without boundary).
class TriangleMesh {
 public:
  TriangleMesh(std::vector<Vector3> vertices, std::vector<std::array<int, 3>> triangles,
               const Tolerances& tol = default_tolerances())
      : surface_(std::move(vertices), to_faces(triangles), tol) {}

  const detail::Surface& surface() const { return surface_; }
  const std::vector<Vector3>& vertices() const { return surface_.vertices(); }
  std::size_t triangle_count() const { return surface_.faces().size(); }
  std::array<int, 3> triangle(std::size_t i) const {
    const auto& f = surface_.faces()[i];
    return {f[0], f[1], f[2]};
  }

 private:
  static std::vector<std::vector<int>> to_faces(const std::vector<std::array<int, 3>>& tris) {
    std::vector<std::vector<int>> faces;
    faces.reserve(tris.size());
    for (const auto& t : tris) faces.push_back({t[0], t[1], t[2]});
    return faces;
  }

  detail::Surface surface_;
};

/// Closed convex polyhedron with planar polygonal faces and outward normals.
/// Planarity and convexity are verified against the diameter-relative tolerances.
class ConvexPolyhedron {
 public:
  ConvexPolyhedron(std::vector<Vector3> vertices, std::vector<std::vector<int>> faces,
                   const Tolerances& tol = default_tolerances())
      : surface_(std::move(vertices), std::move(faces), tol) {
    const auto& pts = surface_.vertices();
    const double diam = surface_.diameter();
    if (surface_.components() != 1) throw Error(ErrorKind::NotConvex, "convex polyhedron must be connected");
    for (int f = 0; f < static_cast<int>(surface_.faces().size()); ++f) {
      const Vector3 c = surface_.face_centroid(f);
      const Vector3& n = surface_.normals()[f];
      for (int v : surface_.faces()[f])
        if (std::abs((pts[v] - c).dot(n)) > tol.eps_planar * diam)
          throw Error(ErrorKind::NotConvex, "face " + std::to_string(f) + " is not planar");
      for (int v = 0; v < static_cast<int>(pts.size()); ++v)
        if ((pts[v] - c).dot(n) > tol.eps_convex * diam)
          throw Error(ErrorKind::NotConvex, "vertex " + std::to_string(v) + " lies outside the plane of face " +
                                                std::to_string(f));
    }
  }

  explicit ConvexPolyhedron(const TriangleMesh& mesh, const Tolerances& tol = default_tolerances())
      : ConvexPolyhedron(mesh.vertices(), mesh.surface().faces(), tol) {}

  const detail::Surface& surface() const { return surface_; }
  const std::vector<Vector3>& vertices() const { return surface_.vertices(); }
  const std::vector<std::vector<int>>& faces() const { return surface_.faces(); }
  const std::vector<Vector3>& face_normals() const { return surface_.normals(); }

 private:
  detail::Surface surface_;
};

template <class M>
concept ClosedSurface = requires(const M& m) {
  { m.surface() } -> std::convertible_to<const detail::Surface&>;
};

template <ClosedSurface M>
int euler_characteristic(const M& m) {
  const auto& s = m.surface();
  return static_cast<int>(s.vertices().size()) - static_cast<int>(s.edges().size()) +
         static_cast<int>(s.faces().size());
}

struct EdgeExteriorAngle {
  int a = 0;
  int b = 0;
  /// Angle between the adjacent face normals; negative where the surface is locally concave.
  double beta = 0.0;
  double length = 0.0;
};

template <ClosedSurface M>
std::vector<EdgeExteriorAngle> edge_exterior_angles(const M& m) {
  const auto& s = m.surface();
  std::vector<EdgeExteriorAngle> out;
  out.reserve(s.edges().size());
  for (const auto& e : s.edges()) {
    const Vector3& nl = s.normals()[e.left];
    const Vector3& nr = s.normals()[e.right];
    const Vector3 dir = s.vertices()[e.b] - s.vertices()[e.a];
    const double angle = std::atan2(nl.cross(nr).norm(), nl.dot(nr));
    const double sign = nl.cross(nr).dot(dir) >= 0.0 ? 1.0 : -1.0;
    out.push_back({e.a, e.b, sign * angle, dir.norm()});
  }
  return out;
}

/// Sum of face angles at each vertex; polygonal faces are fanned from their first vertex.
template <ClosedSurface M>
std::vector<double> vertex_angle_sums(const M& m, const Tolerances& tol = default_tolerances()) {
  const auto& s = m.surface();
  const auto& p = s.vertices();
  std::vector<double> alpha(p.size(), 0.0);
  for (const auto& face : s.faces()) {
    for (std::size_t i = 1; i + 1 < face.size(); ++i) {
      const int tri[3] = {face[0], face[i], face[i + 1]};
      for (int c = 0; c < 3; ++c) {
        const int v = tri[c], u = tri[(c + 1) % 3], w = tri[(c + 2) % 3];
        alpha[v] += angle_between(Vector3(p[u] - p[v]), Vector3(p[w] - p[v]), tol);
      }
    }
  }
  return alpha;
}

/// Angle defect K_v = 2 pi - (sum of incident face angles).
template <ClosedSurface M>
std::vector<double> vertex_angle_defect(const M& m, const Tolerances& tol = default_tolerances()) {
  auto k = vertex_angle_sums(m, tol);
  for (double& a : k) a = kTwoPi - a;
  return k;
}

/// Spherical area of the normal cone at each vertex of a convex polyhedron.
inline std::vector<double> vertex_exterior_angle(const ConvexPolyhedron& p,
                                                 const Tolerances& tol = default_tolerances()) {
  const auto& s = p.surface();
  std::vector<double> beta(s.vertices().size(), 0.0);
  for (int v = 0; v < static_cast<int>(beta.size()); ++v) {
    std::vector<UnitVector> ring;
    for (int f : s.umbrella(v)) {
      const UnitVector n(s.normals()[f], tol);
      if (!ring.empty() && (ring.back().vec() - n.vec()).norm() <= tol.eps_unit) continue;
      ring.push_back(n);
    }
    while (ring.size() > 1 && (ring.back().vec() - ring.front().vec()).norm() <= tol.eps_unit) ring.pop_back();
    if (ring.size() < 3) continue;  // flat or ridge vertex: the cone has no area
    try {
      beta[v] = spherical_polygon_area(SphericalPolygon(std::move(ring), true, tol), tol);
    } catch (const Error& e) {
      throw Error(ErrorKind::NotConvex, "normal cone at vertex " + std::to_string(v) + ": " + e.what());
    }
  }
  return beta;
}

struct GaussBonnetReport {
  double total_curvature = 0.0;
  double two_pi_chi = 0.0;
  double residual = 0.0;
  bool ok = false;
};

/// Intrinsic Gauss-Bonnet: sum of angle defects against 2 pi chi.
template <ClosedSurface M>
GaussBonnetReport gauss_bonnet_check(const M& m, const Tolerances& tol = default_tolerances()) {
  GaussBonnetReport r;
  for (double k : vertex_angle_defect(m, tol)) r.total_curvature += k;
  r.two_pi_chi = kTwoPi * euler_characteristic(m);
  r.residual = std::abs(r.total_curvature - r.two_pi_chi);
  r.ok = r.residual <= 1e-8 * (1.0 + std::abs(r.total_curvature));
  return r;
}

/// V2 = (1/2) sum_e beta_e l_e, with signed beta_e on nonconvex meshes.
template <ClosedSurface M>
double total_mean_curvature(const M& m) {
  double sum = 0.0;
  for (const auto& e : edge_exterior_angles(m)) sum += e.beta * e.length;
  return 0.5 * sum;
}

template <ClosedSurface M>
double surface_area(const M& m) {
  const auto& a = m.surface().face_areas();
  return std::accumulate(a.begin(), a.end(), 0.0);
}

/// Enclosed volume by the divergence theorem over fanned faces.
template <ClosedSurface M>
double enclosed_volume(const M& m) {
  const auto& s = m.surface();
  const auto& p = s.vertices();
  const Vector3 origin = p.front();
  double six_vol = 0.0;
  for (const auto& face : s.faces())
    for (std::size_t i = 1; i + 1 < face.size(); ++i)
      six_vol += (p[face[0]] - origin).dot((p[face[i]] - origin).cross(p[face[i + 1]] - origin));
  return six_vol / 6.0;
}

/// Coefficients of vol(N_r) = V0 + V1 r + V2 r^2 + V3 r^3.
struct SteinerCoefficients {
  double V0 = 0.0;
  double V1 = 0.0;
  double V2 = 0.0;
  double V3 = 0.0;
};

struct SteinerPolynomials {
  SteinerCoefficients coefficients;
  double sum_beta_length = 0.0;  // sum_e beta_e l_e
  double sum_beta_vertex = 0.0;  // sum_v beta_v

  double area(double r) const {
    return coefficients.V1 + r * sum_beta_length + r * r * sum_beta_vertex;
  }
  double volume(double r) const {
    const auto& c = coefficients;
    return c.V0 + r * (c.V1 + r * (c.V2 + r * c.V3));
  }
};

inline SteinerPolynomials steiner_polynomials(const ConvexPolyhedron& p, const Tolerances& tol = default_tolerances()) {
  SteinerPolynomials out;
  for (const auto& e : edge_exterior_angles(p)) out.sum_beta_length += e.beta * e.length;
  for (double b : vertex_exterior_angle(p, tol)) out.sum_beta_vertex += b;
  out.coefficients = {enclosed_volume(p), surface_area(p), 0.5 * out.sum_beta_length,
                      out.sum_beta_vertex / 3.0};
  return out;
}

/// Area of the orthogonal projection onto the plane normal to v: every point of the
/// shadow is covered by exactly two faces.
inline double projection_area(const ConvexPolyhedron& p, const Vector3& v) {
  const auto& s = p.surface();
  double sum = 0.0;
  for (std::size_t f = 0; f < s.faces().size(); ++f) sum += std::abs(s.normals()[f].dot(v)) * s.face_areas()[f];
  return 0.5 * sum;
}

/// Support value h(v) = max over vertices of <x, v>.
inline double support_value(const ConvexPolyhedron& p, const Vector3& v) {
  double h = -std::numeric_limits<double>::infinity();
  for (const auto& x : p.vertices()) h = std::max(h, x.dot(v));
  return h;
}

inline double width(const ConvexPolyhedron& p, const Vector3& v) {
  return support_value(p, v) + support_value(p, -v);
}

namespace detail {

template <class F>
EstimateWithError sphere_average(std::uint64_t samples, std::uint64_t seed, F&& f) {
  if (samples < 1000) throw Error(ErrorKind::InvalidArgument, "sphere averages need at least 1000 samples");
  return run_sharded({samples, seed}, [&](std::mt19937_64& rng, std::uint64_t count) {
    std::normal_distribution<double> normal;
    SampleStats stats;
    for (std::uint64_t k = 0; k < count; ++k) {
      Vector3 v(normal(rng), normal(rng), normal(rng));
      const double n = v.norm();
      if (n == 0.0) { --k; continue; }
      stats.add(f(Vector3(v / n)));
    }
    return stats;
  });
}

}  // namespace detail

inline EstimateWithError mean_projection_area(const ConvexPolyhedron& p, std::uint64_t samples,
                                              std::uint64_t seed = kDefaultSeed) {
  return detail::sphere_average(samples, seed, [&](const Vector3& v) { return projection_area(p, v); });
}

inline EstimateWithError mean_width(const ConvexPolyhedron& p, std::uint64_t samples,
                                    std::uint64_t seed = kDefaultSeed) {
  return detail::sphere_average(samples, seed, [&](const Vector3& v) { return width(p, v); });
}

}  // namespace ddg
