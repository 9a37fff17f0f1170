#pragma once

// Fixture generators: platonic solids, icospheres, tori, a genus-2 surface, convex hulls,
// and abstract complexes (simplex boundaries, periodic flat 3-tori).

#include <array>
#include <cmath>
#include <map>
#include <random>
#include <set>
#include <tuple>
#include <vector>

#include "ddg/core.hpp"
#include "ddg/geom_core.hpp"
#include "ddg/mesh.hpp"
#include "ddg/polyhedral.hpp"

namespace ddg {

inline ConvexPolyhedron unit_cube() {
  std::vector<Vector3> v;
  for (int i = 0; i < 8; ++i) v.emplace_back(i & 1, (i >> 1) & 1, (i >> 2) & 1);
  // Faces counter-clockwise seen from outside.
  std::vector<std::vector<int>> f = {
      {0, 2, 3, 1}, {4, 5, 7, 6}, {0, 1, 5, 4}, {2, 6, 7, 3}, {0, 4, 6, 2}, {1, 3, 7, 5}};
  return ConvexPolyhedron(std::move(v), std::move(f));
}

inline TriangleMesh triangulate(const ConvexPolyhedron& p) {
  std::vector<std::array<int, 3>> tris;
  for (const auto& face : p.faces())
    for (std::size_t i = 1; i + 1 < face.size(); ++i) tris.push_back({face[0], face[i], face[i + 1]});
  return TriangleMesh(p.vertices(), std::move(tris));
}

inline ConvexPolyhedron regular_tetrahedron(double edge = 1.0) {
  const double s = edge / (2.0 * std::sqrt(2.0));
  std::vector<Vector3> v = {s * Vector3(1, 1, 1), s * Vector3(1, -1, -1), s * Vector3(-1, 1, -1),
                            s * Vector3(-1, -1, 1)};
  std::vector<std::vector<int>> f = {{0, 1, 2}, {0, 3, 1}, {0, 2, 3}, {1, 3, 2}};
  return ConvexPolyhedron(std::move(v), std::move(f));
}

/// Repeated 4-to-1 subdivision of the icosahedron, reprojected to radius R.
inline TriangleMesh icosphere(double radius, int level) {
  if (level < 0 || !(radius > 0.0)) throw Error(ErrorKind::InvalidArgument, "icosphere needs radius > 0 and level >= 0");
  const double t = (1.0 + std::sqrt(5.0)) / 2.0;
  std::vector<Vector3> v = {{-1, t, 0}, {1, t, 0}, {-1, -t, 0}, {1, -t, 0}, {0, -1, t}, {0, 1, t},
                            {0, -1, -t}, {0, 1, -t}, {t, 0, -1}, {t, 0, 1}, {-t, 0, -1}, {-t, 0, 1}};
  for (auto& p : v) p = p.normalized();
  std::vector<std::array<int, 3>> f = {
      {0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11}, {1, 5, 9}, {5, 11, 4},
      {11, 10, 2}, {10, 7, 6}, {7, 1, 8},  {3, 9, 4},  {3, 4, 2},   {3, 2, 6}, {3, 6, 8},
      {3, 8, 9},  {4, 9, 5},  {2, 4, 11}, {6, 2, 10}, {8, 6, 7},   {9, 8, 1}};
  for (int l = 0; l < level; ++l) {
    std::map<std::pair<int, int>, int> mid;
    auto midpoint = [&](int a, int b) {
      const auto key = std::minmax(a, b);
      const auto it = mid.find(key);
      if (it != mid.end()) return it->second;
      v.push_back((v[a] + v[b]).normalized());
      const int id = static_cast<int>(v.size()) - 1;
      mid.emplace(key, id);
      return id;
    };
    std::vector<std::array<int, 3>> next;
    next.reserve(f.size() * 4);
    for (const auto& tri : f) {
      const int a = midpoint(tri[0], tri[1]), b = midpoint(tri[1], tri[2]), c = midpoint(tri[2], tri[0]);
      next.push_back({tri[0], a, c});
      next.push_back({tri[1], b, a});
      next.push_back({tri[2], c, b});
      next.push_back({a, b, c});
    }
    f = std::move(next);
  }
  for (auto& p : v) p *= radius;
  return TriangleMesh(std::move(v), std::move(f));
}

/// m x n grid on the torus of radii R > r, each quad split along a diagonal.
inline TriangleMesh torus_mesh(double R, double r, int m, int n) {
  if (m < 3 || n < 3 || !(R > r) || !(r > 0.0))
    throw Error(ErrorKind::InvalidArgument, "torus needs m, n >= 3 and R > r > 0");
  std::vector<Vector3> v;
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) {
      const double u = kTwoPi * i / m, w = kTwoPi * j / n;
      v.emplace_back((R + r * std::cos(w)) * std::cos(u), (R + r * std::cos(w)) * std::sin(u), r * std::sin(w));
    }
  auto id = [&](int i, int j) { return ((i + m) % m) * n + (j + n) % n; };
  std::vector<std::array<int, 3>> f;
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) {
      f.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
      f.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
    }
  return TriangleMesh(std::move(v), std::move(f));
}

/// Boundary of a union of unit cubes (given by integer cell coordinates), triangulated.
inline TriangleMesh voxel_surface(const std::set<std::array<int, 3>>& cells) {
  std::map<std::array<int, 3>, int> ids;
  std::vector<Vector3> v;
  auto vid = [&](const std::array<int, 3>& p) {
    const auto [it, fresh] = ids.emplace(p, static_cast<int>(v.size()));
    if (fresh) v.emplace_back(p[0], p[1], p[2]);
    return it->second;
  };
  std::vector<std::array<int, 3>> tris;
  for (const auto& c : cells) {
    for (int axis = 0; axis < 3; ++axis)
      for (int dir : {-1, 1}) {
        std::array<int, 3> nb = c;
        nb[axis] += dir;
        if (cells.count(nb)) continue;
        const int u = (axis + 1) % 3, w = (axis + 2) % 3;
        std::array<std::array<int, 3>, 4> q;
        for (int k = 0; k < 4; ++k) {
          q[k] = c;
          if (dir > 0) q[k][axis] += 1;
        }
        q[1][u] += 1;
        q[2][u] += 1;
        q[2][w] += 1;
        q[3][w] += 1;
        // (u, w) order gives normal +axis; reverse for the negative side.
        if (dir < 0) std::swap(q[1], q[3]);
        const int a = vid(q[0]), b = vid(q[1]), cc = vid(q[2]), d = vid(q[3]);
        tris.push_back({a, b, cc});
        tris.push_back({a, cc, d});
      }
  }
  return TriangleMesh(std::move(v), std::move(tris));
}

/// A 3 x 5 x 1 slab of cubes with two square holes: a closed surface of genus 2.
inline TriangleMesh genus2_mesh() {
  std::set<std::array<int, 3>> cells;
  for (int x = 0; x < 3; ++x)
    for (int y = 0; y < 5; ++y)
      if (!(x == 1 && (y == 1 || y == 3))) cells.insert({x, y, 0});
  return voxel_surface(cells);
}

inline std::vector<Vector3> random_sphere_points(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  std::vector<Vector3> pts;
  while (static_cast<int>(pts.size()) < n) {
    Vector3 p(normal(rng), normal(rng), normal(rng));
    if (p.norm() > 1e-9) pts.push_back(p.normalized());
  }
  return pts;
}

/// Incremental 3D convex hull of points in general position; returns the outward
/// oriented triangulated boundary over the extreme points.
inline TriangleMesh convex_hull(const std::vector<Vector3>& pts) {
  const int n = static_cast<int>(pts.size());
  if (n < 4) throw Error(ErrorKind::InvalidArgument, "convex hull needs at least 4 points");
  double scale = 0.0;
  for (const auto& p : pts) scale = std::max(scale, p.norm());
  const double eps = 1e-12 * std::max(scale, 1.0);

  int i1 = -1, i2 = -1, i3 = -1;
  for (int i = 1; i < n && i1 < 0; ++i)
    if ((pts[i] - pts[0]).norm() > eps) i1 = i;
  for (int i = 1; i < n && i2 < 0 && i1 >= 0; ++i)
    if ((pts[i1] - pts[0]).cross(pts[i] - pts[0]).norm() > eps) i2 = i;
  for (int i = 1; i < n && i3 < 0 && i2 >= 0; ++i)
    if (std::abs((pts[i1] - pts[0]).cross(pts[i2] - pts[0]).dot(pts[i] - pts[0])) > eps) i3 = i;
  if (i3 < 0) throw Error(ErrorKind::InvalidArgument, "points are coplanar");

  struct Face {
    std::array<int, 3> v;
    Vector3 normal;
    bool alive = true;
  };
  std::vector<Face> faces;
  auto add_face = [&](int a, int b, int c) {
    const Vector3 nrm = (pts[b] - pts[a]).cross(pts[c] - pts[a]);
    faces.push_back({{a, b, c}, nrm, true});
  };
  const Vector3 inside = (pts[0] + pts[i1] + pts[i2] + pts[i3]) / 4.0;
  for (auto [a, b, c] : {std::tuple{0, i1, i2}, std::tuple{0, i1, i3}, std::tuple{0, i2, i3}, std::tuple{i1, i2, i3}}) {
    if ((pts[b] - pts[a]).cross(pts[c] - pts[a]).dot(inside - pts[a]) > 0) std::swap(b, c);
    add_face(a, b, c);
  }
  for (int p = 0; p < n; ++p) {
    if (p == 0 || p == i1 || p == i2 || p == i3) continue;
    std::vector<int> visible;
    for (int f = 0; f < static_cast<int>(faces.size()); ++f)
      if (faces[f].alive && faces[f].normal.dot(pts[p] - pts[faces[f].v[0]]) > eps * faces[f].normal.norm())
        visible.push_back(f);
    if (visible.empty()) continue;
    std::set<std::pair<int, int>> edges;
    for (int f : visible)
      for (int k = 0; k < 3; ++k) edges.insert({faces[f].v[k], faces[f].v[(k + 1) % 3]});
    for (int f : visible) faces[f].alive = false;
    for (const auto& [a, b] : edges)
      if (!edges.count({b, a})) add_face(a, b, p);
  }
  std::map<int, int> remap;
  std::vector<Vector3> verts;
  std::vector<std::array<int, 3>> tris;
  for (const auto& f : faces) {
    if (!f.alive) continue;
    std::array<int, 3> t;
    for (int k = 0; k < 3; ++k) {
      const auto [it, fresh] = remap.emplace(f.v[k], static_cast<int>(verts.size()));
      if (fresh) verts.push_back(pts[f.v[k]]);
      t[k] = it->second;
    }
    tris.push_back(t);
  }
  return TriangleMesh(std::move(verts), std::move(tris));
}

/// Abstract metric of a triangle mesh: its triangles with Euclidean edge lengths.
inline PolyhedralMetric mesh_metric(const TriangleMesh& m) {
  std::vector<Simplex> tops;
  EdgeLengths lengths;
  const auto& p = m.vertices();
  for (std::size_t t = 0; t < m.triangle_count(); ++t) {
    const auto tri = m.triangle(t);
    tops.push_back({tri[0], tri[1], tri[2]});
    for (int k = 0; k < 3; ++k) {
      const int a = tri[k], b = tri[(k + 1) % 3];
      lengths[make_edge(a, b)] = (p[a] - p[b]).norm();
    }
  }
  return PolyhedralMetric(SimplicialComplex(2, std::move(tops)), lengths);
}

/// Boundary of the (dim+1)-simplex with all edges of the given length: a dim-sphere.
inline PolyhedralMetric simplex_boundary(int dim, double edge = 1.0) {
  const Simplex all = [&] {
    Simplex s(dim + 2);
    std::iota(s.begin(), s.end(), 0);
    return s;
  }();
  std::vector<Simplex> tops = detail::subsets(all, dim);
  EdgeLengths lengths;
  for (int a = 0; a < dim + 2; ++a)
    for (int b = a + 1; b < dim + 2; ++b) lengths[{a, b}] = edge;
  return PolyhedralMetric(SimplicialComplex(dim, std::move(tops)), lengths);
}

/// Periodic unit cube cut into m^3 cells, each split into 6 tetrahedra along its main
/// diagonal; lengths from coordinates, so the metric is flat.
inline PolyhedralMetric flat_torus3(int m = 3) {
  if (m < 3) throw Error(ErrorKind::InvalidArgument, "flat torus needs at least 3 cells per side");
  auto id = [&](int i, int j, int k) { return ((i % m) * m + (j % m)) * m + (k % m); };
  const double h = 1.0 / m;
  std::vector<Simplex> tops;
  EdgeLengths lengths;
  std::array<int, 3> perm = {0, 1, 2};
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      for (int k = 0; k < m; ++k) {
        std::sort(perm.begin(), perm.end());
        do {
          std::array<std::array<int, 3>, 4> path;
          path[0] = {i, j, k};
          for (int s = 0; s < 3; ++s) {
            path[s + 1] = path[s];
            path[s + 1][perm[s]] += 1;
          }
          Simplex t;
          for (const auto& p : path) t.push_back(id(p[0], p[1], p[2]));
          for (int a = 0; a < 4; ++a)
            for (int b = a + 1; b < 4; ++b) {
              Vector3 d(path[a][0] - path[b][0], path[a][1] - path[b][1], path[a][2] - path[b][2]);
              lengths[make_edge(t[a], t[b])] = h * d.norm();
            }
          std::sort(t.begin(), t.end());
          tops.push_back(std::move(t));
        } while (std::next_permutation(perm.begin(), perm.end()));
      }
  return PolyhedralMetric(SimplicialComplex(3, std::move(tops)), lengths);
}

}  // namespace ddg
