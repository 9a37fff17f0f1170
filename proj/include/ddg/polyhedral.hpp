#pragma once

// Abstract polyhedral manifolds: simplicial complexes with edge lengths, cone angles and
// deficits, the Regge functional with its gradient and relaxation, discrete
// Lipschitz-Killing curvatures and the discrete Chern-Gauss-Bonnet identity.

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <memory>
#include <numeric>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "ddg/core.hpp"
#include "ddg/geom_core.hpp"

namespace ddg {

/// Sorted vertex ids of a simplex.
using Simplex = std::vector<int>;
using Edge = std::pair<int, int>;
using EdgeLengths = std::map<Edge, double>;

inline Edge make_edge(int a, int b) { return a < b ? Edge{a, b} : Edge{b, a}; }

inline std::string describe(const Simplex& s) { return detail::describe_vertices(s); }

namespace detail {

/// All sub-simplices of `s` with k+1 vertices, lexicographic.
inline std::vector<Simplex> subsets(const Simplex& s, int k) {
  std::vector<Simplex> out;
  const int n = static_cast<int>(s.size());
  if (k + 1 > n || k < 0) return out;
  std::vector<int> idx(k + 1);
  std::iota(idx.begin(), idx.end(), 0);
  while (true) {
    Simplex sub;
    for (int i : idx) sub.push_back(s[i]);
    out.push_back(std::move(sub));
    int i = k;
    while (i >= 0 && idx[i] == n - (k + 1) + i) --i;
    if (i < 0) break;
    ++idx[i];
    for (int j = i + 1; j <= k; ++j) idx[j] = idx[j - 1] + 1;
  }
  return out;
}

/// Local positions of `sub` inside `super` (both sorted).
inline std::vector<int> local_indices(const Simplex& super, const Simplex& sub) {
  std::vector<int> out;
  for (int v : sub) {
    const auto it = std::lower_bound(super.begin(), super.end(), v);
    if (it == super.end() || *it != v) throw Error(ErrorKind::BadFace, describe(sub) + " is not a face of " + describe(super));
    out.push_back(static_cast<int>(it - super.begin()));
  }
  return out;
}

inline std::uint64_t simplex_hash(std::uint64_t h, const Simplex& s) {
  for (int v : s) h = mix_seed(h, static_cast<std::uint64_t>(v) + 1);
  return mix_seed(h, s.size() + 0x51ull);
}

}  // namespace detail

struct ValidationReport {
  bool ok = true;
  ErrorKind first_error = ErrorKind::InvalidArgument;
  std::vector<std::string> problems;
  std::vector<int> face_counts;

  void fail(ErrorKind kind, std::string what) {
    if (ok) first_error = kind;
    ok = false;
    problems.push_back(std::move(what));
  }
  std::string message() const {
    std::string m;
    for (const auto& p : problems) m += (m.empty() ? "" : "; ") + p;
    return m;
  }
};

/// Pure closed pseudo-manifold: every (n-1)-face lies in exactly two top simplices.
class SimplicialComplex {
 public:
  SimplicialComplex(int dim, std::vector<Simplex> tops) : dim_(dim), tops_(std::move(tops)) {
    ValidationReport report;
    check(report);
    if (!report.ok) throw Error(report.first_error, report.message());
  }

  /// Structural checks without throwing.
  static ValidationReport inspect(int dim, std::vector<Simplex> tops) {
    SimplicialComplex c(dim, std::move(tops), Unchecked{});
    ValidationReport report;
    c.check(report);
    return report;
  }

  int dim() const { return dim_; }
  const std::vector<Simplex>& top_simplices() const { return tops_; }
  /// All k-faces in lexicographic order.
  const std::vector<Simplex>& faces(int k) const { return faces_.at(k); }
  int face_index(const Simplex& s) const {
    const int k = static_cast<int>(s.size()) - 1;
    const auto it = index_.at(k).find(s);
    if (it == index_.at(k).end()) throw Error(ErrorKind::BadFace, describe(s) + " is not a face of the complex");
    return it->second;
  }
  std::vector<int> face_counts() const {
    std::vector<int> f;
    for (const auto& fk : faces_) f.push_back(static_cast<int>(fk.size()));
    return f;
  }
  /// Top simplices containing the given k-face.
  const std::vector<int>& tops_containing(int k, int index) const { return cofaces_.at(k).at(index); }

  /// All faces of dimension m containing `q`, lexicographic.
  std::vector<Simplex> faces_containing(const Simplex& q, int m) const {
    std::set<Simplex> found;
    const int k = static_cast<int>(q.size()) - 1;
    for (int t : tops_containing(k, face_index(q))) {
      const Simplex& top = tops_[t];
      Simplex rest;
      std::set_difference(top.begin(), top.end(), q.begin(), q.end(), std::back_inserter(rest));
      for (const auto& extra : detail::subsets(rest, m - k - 1)) {
        Simplex s = q;
        s.insert(s.end(), extra.begin(), extra.end());
        std::sort(s.begin(), s.end());
        found.insert(std::move(s));
      }
      if (m == k) found.insert(q);
    }
    return {found.begin(), found.end()};
  }

 private:
  struct Unchecked {};
  SimplicialComplex(int dim, std::vector<Simplex> tops, Unchecked) : dim_(dim), tops_(std::move(tops)) {}

  void check(ValidationReport& report) {
    if (dim_ < 1) {
      report.fail(ErrorKind::InvalidArgument, "dimension must be at least 1");
      return;
    }
    if (tops_.empty()) {
      report.fail(ErrorKind::NonManifold, "complex has no top simplices");
      return;
    }
    for (auto& t : tops_) {
      std::sort(t.begin(), t.end());
      if (static_cast<int>(t.size()) != dim_ + 1 || std::adjacent_find(t.begin(), t.end()) != t.end() ||
          t.front() < 0) {
        report.fail(ErrorKind::NonManifold, "top simplex " + describe(t) + " does not have " +
                                                std::to_string(dim_ + 1) + " distinct non-negative vertices");
      }
    }
    if (!report.ok) return;
    {
      std::set<Simplex> seen;
      for (const auto& t : tops_)
        if (!seen.insert(t).second) report.fail(ErrorKind::NonManifold, "top simplex " + describe(t) + " is repeated");
    }
    faces_.assign(dim_ + 1, {});
    index_.assign(dim_ + 1, {});
    cofaces_.assign(dim_ + 1, {});
    for (int k = 0; k <= dim_; ++k) {
      std::set<Simplex> all;
      for (const auto& t : tops_)
        for (auto& s : detail::subsets(t, k)) all.insert(std::move(s));
      faces_[k].assign(all.begin(), all.end());
      for (int i = 0; i < static_cast<int>(faces_[k].size()); ++i) index_[k][faces_[k][i]] = i;
      cofaces_[k].assign(faces_[k].size(), {});
      for (int t = 0; t < static_cast<int>(tops_.size()); ++t)
        for (const auto& s : detail::subsets(tops_[t], k)) cofaces_[k][index_[k].at(s)].push_back(t);
    }
    report.face_counts = face_counts();
    for (std::size_t i = 0; i < faces_[dim_ - 1].size(); ++i) {
      const auto count = cofaces_[dim_ - 1][i].size();
      if (count != 2)
        report.fail(ErrorKind::NonManifold, "facet " + describe(faces_[dim_ - 1][i]) + " lies in " +
                                                std::to_string(count) + " top simplices (expected 2)");
    }
    // Connectivity through shared facets.
    std::vector<int> parent(tops_.size());
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int x) {
      while (parent[x] != x) x = parent[x] = parent[parent[x]];
      return x;
    };
    for (const auto& tops : cofaces_[dim_ - 1])
      for (std::size_t j = 1; j < tops.size(); ++j) parent[find(tops[j])] = find(tops[0]);
    int roots = 0;
    for (int t = 0; t < static_cast<int>(tops_.size()); ++t)
      if (find(t) == t) ++roots;
    if (roots != 1) report.fail(ErrorKind::NonManifold, "complex has " + std::to_string(roots) + " components");
  }

  int dim_;
  std::vector<Simplex> tops_;
  std::vector<std::vector<Simplex>> faces_;
  std::vector<std::map<Simplex, int>> index_;
  std::vector<std::vector<std::vector<int>>> cofaces_;
};

/// A simplicial complex together with an edge-length assignment; every top simplex
/// must be a realizable Euclidean simplex.
class PolyhedralMetric {
 public:
  PolyhedralMetric(SimplicialComplex complex, const EdgeLengths& lengths,
                   const Tolerances& tol = default_tolerances())
      : complex_(std::make_shared<const SimplicialComplex>(std::move(complex))) {
    const auto& edges = complex_->faces(1);
    lengths_.reserve(edges.size());
    for (const auto& e : edges) {
      const auto it = lengths.find({e[0], e[1]});
      if (it == lengths.end())
        throw Error(ErrorKind::MissingLength, "no length for edge " + describe(e));
      lengths_.push_back(it->second);
    }
    if (lengths.size() != edges.size())
      throw Error(ErrorKind::InvalidArgument, "length given for a pair that is not an edge of the complex");
    validate_lengths(tol);
  }

  PolyhedralMetric(SimplicialComplex complex, std::vector<double> lengths,
                   const Tolerances& tol = default_tolerances())
      : PolyhedralMetric(std::make_shared<const SimplicialComplex>(std::move(complex)), std::move(lengths), tol) {}

  PolyhedralMetric(std::shared_ptr<const SimplicialComplex> complex, std::vector<double> lengths,
                   const Tolerances& tol = default_tolerances())
      : complex_(std::move(complex)), lengths_(std::move(lengths)) {
    if (lengths_.size() != complex_->faces(1).size())
      throw Error(ErrorKind::InvalidArgument, "one length per edge is required");
    validate_lengths(tol);
  }

  const SimplicialComplex& complex() const { return *complex_; }
  int dim() const { return complex_->dim(); }
  /// Lengths in the order of complex().faces(1).
  const std::vector<double>& lengths() const { return lengths_; }
  double length(int a, int b) const {
    return lengths_[complex_->face_index(Simplex{std::min(a, b), std::max(a, b)})];
  }
  EdgeLengths length_map() const {
    EdgeLengths m;
    const auto& edges = complex_->faces(1);
    for (std::size_t i = 0; i < edges.size(); ++i) m[{edges[i][0], edges[i][1]}] = lengths_[i];
    return m;
  }

  /// Induced metric simplex on a face of dimension >= 1.
  MetricSimplex simplex(const Simplex& s, const Tolerances& tol = default_tolerances()) const {
    const int n = static_cast<int>(s.size());
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) m(i, j) = m(j, i) = length(s[i], s[j]);
    return MetricSimplex(n - 1, std::move(m), tol);
  }

  /// Same complex with new lengths (validated).
  PolyhedralMetric with_lengths(std::vector<double> lengths, const Tolerances& tol = default_tolerances()) const {
    return PolyhedralMetric(complex_, std::move(lengths), tol);
  }

 private:
  void validate_lengths(const Tolerances& tol) {
    for (std::size_t i = 0; i < lengths_.size(); ++i)
      if (!(lengths_[i] > 0.0) || !std::isfinite(lengths_[i]))
        throw Error(ErrorKind::UnrealizableMetric, "edge " + describe(complex_->faces(1)[i]) + " needs a positive length");
    std::string bad;
    for (const auto& t : complex_->top_simplices()) {
      try {
        (void)simplex(t, tol);
      } catch (const Error& e) {
        bad += (bad.empty() ? "" : "; ") + describe(t) + " (" + e.what() + ")";
      }
    }
    if (!bad.empty()) throw Error(ErrorKind::UnrealizableMetric, "unrealizable top simplices: " + bad);
  }

  std::shared_ptr<const SimplicialComplex> complex_;
  std::vector<double> lengths_;
};

/// Non-throwing validation of raw input: pseudo-manifold structure and realizability.
inline ValidationReport validate(int dim, const std::vector<Simplex>& tops, const EdgeLengths& lengths,
                                 const Tolerances& tol = default_tolerances()) {
  ValidationReport report = SimplicialComplex::inspect(dim, tops);
  if (!report.ok) return report;
  try {
    PolyhedralMetric metric(SimplicialComplex(dim, tops), lengths, tol);
  } catch (const Error& e) {
    report.fail(e.kind(), e.what());
  }
  return report;
}

inline int euler_characteristic(const SimplicialComplex& c) {
  int chi = 0;
  const auto f = c.face_counts();
  for (std::size_t k = 0; k < f.size(); ++k) chi += (k % 2 == 0 ? 1 : -1) * f[k];
  return chi;
}

inline int euler_characteristic(const PolyhedralMetric& c) { return euler_characteristic(c.complex()); }

/// Volume of a face; a vertex has volume 1.
inline double face_volume(const PolyhedralMetric& c, const Simplex& q) {
  return q.size() == 1 ? 1.0 : simplex_volume(c.simplex(q));
}

struct CodimTwoFace {
  Simplex face;
  double cone_angle = 0.0;
  double deficit = 0.0;
  double volume = 0.0;
};

/// Per codimension-2 face: cone angle, deficit 2 pi - cone angle, and volume.
struct CurvatureTable {
  std::vector<CodimTwoFace> rows;

  double max_abs_deficit() const {
    double m = 0.0;
    for (const auto& r : rows) m = std::max(m, std::abs(r.deficit));
    return m;
  }
};

namespace detail {

/// Calls f(Q index, top index, local complement pair (a, b)) for every (codim-2 face, top) incidence.
template <class F>
void for_each_hinge(const PolyhedralMetric& c, F&& f) {
  const auto& cx = c.complex();
  const int n = cx.dim();
  for (int t = 0; t < static_cast<int>(cx.top_simplices().size()); ++t) {
    const Simplex& top = cx.top_simplices()[t];
    for (int a = 0; a <= n; ++a)
      for (int b = a + 1; b <= n; ++b) {
        Simplex q;
        for (int v = 0; v <= n; ++v)
          if (v != a && v != b) q.push_back(top[v]);
        f(cx.face_index(q), t, a, b);
      }
  }
}

}  // namespace detail

inline CurvatureTable cone_angles(const PolyhedralMetric& c) {
  const auto& cx = c.complex();
  const int n = cx.dim();
  if (n < 2) throw Error(ErrorKind::InvalidArgument, "cone angles need dimension at least 2");
  CurvatureTable table;
  for (const auto& q : cx.faces(n - 2)) table.rows.push_back({q, 0.0, 0.0, face_volume(c, q)});
  std::vector<Eigen::MatrixXd> dihedral;
  for (const auto& top : cx.top_simplices()) dihedral.push_back(dihedral_angles(c.simplex(top)));
  detail::for_each_hinge(c, [&](int q, int t, int a, int b) { table.rows[q].cone_angle += dihedral[t](a, b); });
  for (auto& r : table.rows) r.deficit = kTwoPi - r.cone_angle;
  return table;
}

/// Total scalar curvature F = sum_Q K_Q vol(Q) over codimension-2 faces.
inline double regge_functional(const PolyhedralMetric& c) {
  double f = 0.0;
  for (const auto& r : cone_angles(c).rows) f += r.deficit * r.volume;
  return f;
}

namespace detail {

/// Accumulates weight * d vol(q) / d l_e into `grad` (indexed like complex().faces(1)).
inline void add_volume_gradient(const PolyhedralMetric& c, const Simplex& q, double weight, std::vector<double>& grad) {
  if (q.size() < 2) return;
  const Eigen::MatrixXd g = simplex_volume_gradient(c.simplex(q));
  for (std::size_t i = 0; i < q.size(); ++i)
    for (std::size_t j = i + 1; j < q.size(); ++j)
      grad[c.complex().face_index(Simplex{q[i], q[j]})] += weight * g(static_cast<int>(i), static_cast<int>(j));
}

}  // namespace detail

/// dF/dl_e = sum_{Q containing e} K_Q d vol(Q)/d l_e. The dihedral-angle variations cancel.
inline std::vector<double> regge_gradient(const PolyhedralMetric& c) {
  std::vector<double> grad(c.lengths().size(), 0.0);
  for (const auto& r : cone_angles(c).rows) detail::add_volume_gradient(c, r.face, r.deficit, grad);
  return grad;
}

/// E = sum_Q K_Q^2 vol(Q), minimized by flat metrics.
inline double deficit_energy(const CurvatureTable& table) {
  double e = 0.0;
  for (const auto& r : table.rows) e += r.deficit * r.deficit * r.volume;
  return e;
}

inline double total_volume(const PolyhedralMetric& c) {
  double v = 0.0;
  for (const auto& t : c.complex().top_simplices()) v += simplex_volume(c.simplex(t));
  return v;
}

/// Gradient of the deficit energy with respect to edge lengths.
inline std::vector<double> deficit_energy_gradient(const PolyhedralMetric& c, const CurvatureTable& table) {
  const auto& cx = c.complex();
  const int n = cx.dim();
  std::vector<double> grad(c.lengths().size(), 0.0);
  for (const auto& r : table.rows) detail::add_volume_gradient(c, r.face, r.deficit * r.deficit, grad);
  for (int t = 0; t < static_cast<int>(cx.top_simplices().size()); ++t) {
    const Simplex& top = cx.top_simplices()[t];
    const Eigen::MatrixXd jac = dihedral_jacobian(c.simplex(top));
    std::vector<int> edge_ids;
    for (int i = 0; i <= n; ++i)
      for (int j = i + 1; j <= n; ++j) edge_ids.push_back(cx.face_index(Simplex{top[i], top[j]}));
    int row = 0;
    for (int a = 0; a <= n; ++a)
      for (int b = a + 1; b <= n; ++b, ++row) {
        Simplex q;
        for (int v = 0; v <= n; ++v)
          if (v != a && v != b) q.push_back(top[v]);
        const auto& hinge = table.rows[cx.face_index(q)];
        // dK_Q = -d(dihedral)
        const double w = -2.0 * hinge.deficit * hinge.volume;
        for (std::size_t e = 0; e < edge_ids.size(); ++e) grad[edge_ids[e]] += w * jac(row, static_cast<int>(e));
      }
  }
  return grad;
}

struct RelaxOptions {
  double tolerance = 1e-6;        ///< stop when max |K_Q| falls below this
  int max_iterations = 10'000;
  bool normalize_volume = true;   ///< rescale lengths to keep the total volume fixed
  double initial_step = 1.0;
  int max_backtracks = 60;
};

enum class RelaxStatus { Converged, MaxIterations, Stalled };

inline std::string_view to_string(RelaxStatus s) {
  switch (s) {
    case RelaxStatus::Converged: return "converged";
    case RelaxStatus::MaxIterations: return "max_iterations";
    case RelaxStatus::Stalled: return "stalled";
  }
  return "unknown";
}

struct RelaxRow {
  int iteration = 0;
  double energy = 0.0;
  double max_abs_deficit = 0.0;
  double total_volume = 0.0;
};

struct RelaxResult {
  PolyhedralMetric metric;
  std::vector<RelaxRow> trajectory;
  RelaxStatus status = RelaxStatus::MaxIterations;
  int iterations = 0;
  int rejected_unrealizable = 0;
};

/// Gradient descent on the squared-deficit energy with backtracking. Trial steps that
/// leave the realizable region are rejected and the step is halved.
inline RelaxResult regge_relax(const PolyhedralMetric& start, const RelaxOptions& opt = {}) {
  if (start.dim() < 3) throw Error(ErrorKind::InvalidArgument, "relaxation needs dimension at least 3");
  RelaxResult result{start, {}, RelaxStatus::MaxIterations, 0, 0};
  PolyhedralMetric current = start;
  CurvatureTable table = cone_angles(current);
  double energy = deficit_energy(table);
  const double target_volume = total_volume(current);
  const double n = current.dim();
  auto record = [&](int it) {
    result.trajectory.push_back({it, energy, table.max_abs_deficit(), total_volume(current)});
  };
  record(0);
  double step = opt.initial_step;
  int it = 0;
  while (table.max_abs_deficit() >= opt.tolerance) {
    if (it >= opt.max_iterations) {
      result.status = RelaxStatus::MaxIterations;
      break;
    }
    const std::vector<double> grad = deficit_energy_gradient(current, table);
    bool accepted = false;
    for (int bt = 0; bt < opt.max_backtracks && !accepted; ++bt, step *= 0.5) {
      std::vector<double> trial = current.lengths();
      for (std::size_t e = 0; e < trial.size(); ++e) trial[e] -= step * grad[e];
      try {
        PolyhedralMetric candidate = current.with_lengths(trial);
        if (opt.normalize_volume) {
          const double scale = std::pow(target_volume / total_volume(candidate), 1.0 / n);
          for (double& l : trial) l *= scale;
          candidate = current.with_lengths(std::move(trial));
        }
        CurvatureTable cand_table = cone_angles(candidate);
        const double cand_energy = deficit_energy(cand_table);
        if (cand_energy < energy) {
          current = std::move(candidate);
          table = std::move(cand_table);
          energy = cand_energy;
          accepted = true;
        }
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::UnrealizableMetric) throw;
        ++result.rejected_unrealizable;
      }
    }
    if (!accepted) {
      result.status = RelaxStatus::Stalled;
      break;
    }
    step *= 4.0;  // undo the final halving and try a longer step next time
    ++it;
    record(it);
  }
  if (table.max_abs_deficit() < opt.tolerance) result.status = RelaxStatus::Converged;
  result.iterations = it;
  result.metric = std::move(current);
  return result;
}

/// Alternating sum of normalized external angles of all faces T containing Q.
struct LKValue {
  double value = 0.0;
  double std_error = 0.0;
  bool exact = true;
};

inline LKValue lk_curvature(const PolyhedralMetric& c, const Simplex& q, const MonteCarloConfig& mc = {}) {
  const auto& cx = c.complex();
  (void)cx.face_index(q);
  const int dq = static_cast<int>(q.size()) - 1;
  LKValue out;
  double variance = 0.0;
  for (int m = dq; m <= cx.dim(); ++m) {
    const double sign = ((m - dq) % 2 == 0) ? 1.0 : -1.0;
    for (const auto& t : cx.faces_containing(q, m)) {
      ExternalAngle beta;
      if (m == dq) {
        beta = {1.0, 0.0, true};
      } else {
        const auto local = detail::local_indices(t, q);
        const MonteCarloConfig item{mc.samples, detail::simplex_hash(detail::simplex_hash(mc.seed, t), q)};
        beta = external_angle(c.simplex(t), local, item);
      }
      out.value += sign * beta.value;
      variance += beta.std_error * beta.std_error;
      out.exact = out.exact && beta.exact;
    }
  }
  out.std_error = std::sqrt(variance);
  return out;
}

struct LKFaceRow {
  Simplex face;
  double curvature = 0.0;
  double std_error = 0.0;
  double volume = 0.0;
};

struct LKReport {
  int k = 0;
  std::vector<LKFaceRow> rows;
  double total = 0.0;
  double std_error = 0.0;
  bool exact = true;
};

/// S_2k = sum over faces of dimension n - 2k of K_Q vol(Q), with unit normalization.
inline LKReport lk_total(const PolyhedralMetric& c, int k, const MonteCarloConfig& mc = {}) {
  const int dim_q = c.dim() - 2 * k;
  if (k < 0 || dim_q < 0) throw Error(ErrorKind::InvalidArgument, "LK index out of range for this dimension");
  LKReport report;
  report.k = k;
  double variance = 0.0;
  for (const auto& q : c.complex().faces(dim_q)) {
    const LKValue v = lk_curvature(c, q, mc);
    const double vol = face_volume(c, q);
    report.rows.push_back({q, v.value, v.std_error, vol});
    report.total += v.value * vol;
    variance += (v.std_error * vol) * (v.std_error * vol);
    report.exact = report.exact && v.exact;
  }
  report.std_error = std::sqrt(variance);
  return report;
}

struct CgbReport {
  double total_curvature = 0.0;
  int chi = 0;
  double residual = 0.0;
  double std_error = 0.0;
  bool exact = true;
};

/// Sum of vertex LK curvatures against the Euler characteristic (even dimensions only).
inline CgbReport cgb_check(const PolyhedralMetric& c, const MonteCarloConfig& mc = {}) {
  if (c.dim() % 2 != 0)
    throw Error(ErrorKind::OddDimension, "Chern-Gauss-Bonnet needs an even-dimensional complex, got dimension " +
                                             std::to_string(c.dim()));
  const LKReport vertices = lk_total(c, c.dim() / 2, mc);
  CgbReport r;
  r.total_curvature = vertices.total;
  r.std_error = vertices.std_error;
  r.exact = vertices.exact;
  r.chi = euler_characteristic(c);
  r.residual = std::abs(r.total_curvature - r.chi);
  return r;
}

/// Result of subdividing raw simplices: new top simplices and barycentre distances.
struct Subdivision {
  int dim = 0;
  std::vector<Simplex> tops;
  EdgeLengths lengths;
  /// Original face for every new vertex id.
  std::vector<Simplex> vertex_faces;
};

/// Barycentric subdivision of a set of top simplices carrying edge lengths. New vertex ids
/// enumerate the faces by dimension, then lexicographically. New edge lengths are
/// barycentre distances measured in an embedding of a containing top simplex.
inline Subdivision subdivide_complex(int dim, const std::vector<Simplex>& tops_in,
                                     const std::function<double(int, int)>& length) {
  std::vector<Simplex> tops = tops_in;
  for (auto& t : tops) std::sort(t.begin(), t.end());
  std::vector<std::set<Simplex>> by_dim(dim + 1);
  for (const auto& t : tops)
    for (int k = 0; k <= dim; ++k)
      for (auto& s : detail::subsets(t, k)) by_dim[k].insert(std::move(s));
  Subdivision out;
  out.dim = dim;
  std::map<Simplex, int> id;
  for (const auto& layer : by_dim)
    for (const auto& s : layer) {
      id[s] = static_cast<int>(out.vertex_faces.size());
      out.vertex_faces.push_back(s);
    }
  for (const auto& top : tops) {
    Eigen::MatrixXd lm = Eigen::MatrixXd::Zero(dim + 1, dim + 1);
    for (int i = 0; i <= dim; ++i)
      for (int j = i + 1; j <= dim; ++j) lm(i, j) = lm(j, i) = length(top[i], top[j]);
    const EmbeddedSimplex emb = embed_simplex(MetricSimplex(dim, lm));
    auto barycentre = [&](const Simplex& face) {
      Eigen::VectorXd c = Eigen::VectorXd::Zero(dim);
      for (int l : detail::local_indices(top, face)) c += emb.points.col(l);
      return Eigen::VectorXd(c / static_cast<double>(face.size()));
    };
    std::vector<int> perm(dim + 1);
    std::iota(perm.begin(), perm.end(), 0);
    do {
      Simplex chain_ids;
      std::vector<Simplex> chain;
      Simplex face;
      for (int k = 0; k <= dim; ++k) {
        face.push_back(top[perm[k]]);
        Simplex sorted = face;
        std::sort(sorted.begin(), sorted.end());
        chain.push_back(sorted);
        chain_ids.push_back(id.at(sorted));
      }
      for (int i = 0; i <= dim; ++i)
        for (int j = i + 1; j <= dim; ++j) {
          const Edge e = make_edge(chain_ids[i], chain_ids[j]);
          if (!out.lengths.count(e)) out.lengths[e] = (barycentre(chain[i]) - barycentre(chain[j])).norm();
        }
      std::sort(chain_ids.begin(), chain_ids.end());
      out.tops.push_back(std::move(chain_ids));
    } while (std::next_permutation(perm.begin(), perm.end()));
  }
  return out;
}

inline PolyhedralMetric barycentric_subdivide(const PolyhedralMetric& c) {
  Subdivision s = subdivide_complex(c.dim(), c.complex().top_simplices(),
                                    [&](int a, int b) { return c.length(a, b); });
  return PolyhedralMetric(SimplicialComplex(s.dim, std::move(s.tops)), s.lengths);
}

}  // namespace ddg
