// Acceptance run: one PASS/FAIL line per criterion, nonzero exit when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "ddg/convergence.hpp"
#include "ddg/curves.hpp"
#include "ddg/fixtures.hpp"
#include "ddg/io.hpp"
#include "ddg/mesh.hpp"
#include "ddg/polyhedral.hpp"

using namespace ddg;

namespace {

struct Outcome {
  bool ok = true;
  std::ostringstream detail;

  void require(bool condition, const std::string& what) {
    if (condition) return;
    ok = false;
    const std::string tag = " [failed: " + what + "]";
    if (detail.str().find(tag) == std::string::npos) detail << tag;
  }
};

struct Criterion {
  int id;
  std::string title;
  double max_seconds;
  std::function<void(Outcome&)> body;
};

std::string data_path(const std::string& name) { return std::string(DDG_DATA_DIR) + "/" + name; }

std::vector<Vector2> read_planar(const std::string& name) {
  return parse_polygon(read_text_file(data_path(name))).planar();
}

std::vector<Vector3> lift(const std::vector<Vector2>& p) {
  std::vector<Vector3> out;
  for (const auto& v : p) out.emplace_back(v.x(), v.y(), 0.0);
  return out;
}

std::vector<Vector2> regular_polygon(int n) {
  std::vector<Vector2> p;
  for (int k = 0; k < n; ++k) p.emplace_back(std::cos(kTwoPi * k / n), std::sin(kTwoPi * k / n));
  return p;
}

// Sorted random angles with random radii and every angular gap below pi: star-shaped about
// the origin, so simple with turning number +1 or -1.
std::vector<Vector2> random_star_polygon(std::mt19937_64& rng, bool clockwise) {
  std::uniform_int_distribution<int> count(3, 30);
  std::uniform_real_distribution<double> angle(0.0, kTwoPi), radius(0.2, 2.0);
  std::vector<double> a(count(rng));
  for (double& x : a) x = angle(rng);
  std::sort(a.begin(), a.end());
  double gap = a.front() + kTwoPi - a.back();
  for (std::size_t i = 1; i < a.size(); ++i) gap = std::max(gap, a[i] - a[i - 1]);
  if (gap >= kPi) return random_star_polygon(rng, clockwise);
  std::vector<Vector2> p;
  for (double x : a) {
    const double r = radius(rng);
    p.emplace_back(r * std::cos(x), r * std::sin(x));
  }
  if (clockwise) std::reverse(p.begin(), p.end());
  return p;
}

std::vector<Vector3> random_space_polygon(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> count(4, 20);
  std::normal_distribution<double> normal;
  std::vector<Vector3> p(count(rng));
  for (auto& v : p) v = Vector3(normal(rng), normal(rng), normal(rng));
  return p;
}

PolyhedralMetric perturbed(const PolyhedralMetric& c, double amount, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-amount, amount);
  auto l = c.lengths();
  for (double& x : l) x *= 1.0 + u(rng);
  return c.with_lengths(l);
}

double fd_gradient_error(const PolyhedralMetric& c, double h) {
  const auto g = regge_gradient(c);
  double worst = 0.0;
  for (std::size_t e = 0; e < g.size(); ++e) {
    auto plus = c.lengths(), minus = c.lengths();
    plus[e] += h;
    minus[e] -= h;
    const double fd = (regge_functional(c.with_lengths(plus)) - regge_functional(c.with_lengths(minus))) / (2 * h);
    worst = std::max(worst, std::abs(fd - g[e]));
  }
  return worst;
}

void turning_numbers(Outcome& o) {
  const auto tol = default_tolerances();
  const int square = turning_number(PlanarPolygon(read_planar("square.txt")), tol);
  const int reversed = turning_number(PlanarPolygon(read_planar("square_reversed.txt")), tol);
  const int crossing = turning_number(PlanarPolygon(read_planar("bowtie.txt")), tol);
  o.detail << "square " << square << ", reversed " << reversed << ", crossing " << crossing;
  o.require(square == 1 && reversed == -1 && crossing == 0, "fixture turning numbers");
  std::mt19937_64 rng(1);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const bool cw = i % 2 == 1;
    const PlanarPolygon p(random_star_polygon(rng, cw));
    double sum = 0.0;
    for (double k : signed_turning_angles(p)) sum += k;
    const int k = turning_number(p, tol);
    o.require(k == (cw ? -1 : 1), "random polygon turning number");
    worst = std::max(worst, std::abs(sum - kTwoPi * k));
  }
  o.detail << "; max |sum - 2 pi k| over 1000 polygons " << worst;
  o.require(worst <= 1e-8, "sum of signed turning angles");
}

void fenchel(Outcome& o) {
  std::mt19937_64 rng(2);
  double lowest = 1e300;
  for (int i = 0; i < 1000; ++i) lowest = std::min(lowest, total_curvature(SpacePolygon(random_space_polygon(rng), true)).total);
  o.detail << "min total curvature " << lowest;
  o.require(lowest >= kTwoPi - 1e-9, "random polygons below 2 pi");
  double worst = 0.0;
  for (const auto& p : {read_planar("square.txt"), read_planar("hexagon.json"), regular_polygon(3), regular_polygon(17)})
    worst = std::max(worst, std::abs(total_curvature(SpacePolygon(lift(p), true)).total - kTwoPi));
  o.detail << "; convex fixtures max |total - 2 pi| " << worst;
  o.require(worst <= 1e-9, "convex fixtures equal 2 pi");
}

void indicatrix(Outcome& o) {
  std::mt19937_64 rng(3);
  double worst = 0.0;
  int witnesses = 0;
  for (int i = 0; i < 500; ++i) {
    const SpacePolygon p(random_space_polygon(rng), true);
    const auto s = tangent_indicatrix(p);
    worst = std::max(worst, std::abs(s.length() - total_curvature(p).total));
    if (open_hemisphere_witness(s)) ++witnesses;
  }
  o.detail << "max |total - indicatrix length| " << worst << ", hemisphere witnesses " << witnesses;
  o.require(worst <= 1e-10, "indicatrix length");
  o.require(witnesses == 0, "closed polygon with tangents in a hemisphere");
}

void crofton(Outcome& o) {
  const SphericalPolygon arc({UnitVector(Vector3(1, 0, 0)), UnitVector(Vector3(0, 1, 0))}, false);
  const auto est = crofton_length_estimate(arc, 1'000'000, kDefaultSeed);
  o.detail << "arc " << est.mean << " +- " << est.std_error << " (pi/2 = " << kPi / 2 << ")";
  o.require(est.within(kPi / 2, 3.0), "quarter arc within 3 sigma");
  std::mt19937_64 rng(4);
  const SpacePolygon p(random_space_polygon(rng), true);
  const auto s = tangent_indicatrix(p);
  const auto cross = crofton_length_estimate(s, 1'000'000, kDefaultSeed + 1);
  o.detail << "; indicatrix " << cross.mean << " +- " << cross.std_error << " vs " << s.length();
  o.require(cross.within(s.length(), 4.0), "indicatrix cross-check within 4 sigma");
}

void cube_suite(Outcome& o) {
  const auto cube = unit_cube();
  const auto beta = vertex_exterior_angle(cube);
  const auto defect = vertex_angle_defect(cube);
  double sum = 0.0, gap = 0.0;
  for (std::size_t v = 0; v < beta.size(); ++v) {
    sum += beta[v];
    gap = std::max(gap, std::abs(beta[v] - defect[v]));
  }
  const auto s = steiner_polynomials(cube);
  o.detail << "sum beta " << sum << ", max |beta - K| " << gap << ", V2 " << s.coefficients.V2 << ", V3 "
           << s.coefficients.V3;
  o.require(std::abs(sum - 4 * kPi) <= 1e-9, "sum of vertex exterior angles");
  o.require(gap <= 1e-9, "exterior angle equals defect");
  o.require(std::abs(s.coefficients.V2 - 3 * kPi) <= 1e-9, "V2");
  o.require(std::abs(s.coefficients.V3 - 4 * kPi / 3) <= 1e-9, "V3");
  const double analytic = 7 + 3 * kPi + 4 * kPi / 3;
  o.require(std::abs(s.volume(1.0) - analytic) <= 1e-9, "Steiner polynomial at r = 1");
  const auto mc = run_sharded({10'000'000, kDefaultSeed}, [](std::mt19937_64& rng, std::uint64_t n) {
    std::uniform_real_distribution<double> u(-1.0, 2.0);
    std::uint64_t hits = 0;
    for (std::uint64_t i = 0; i < n; ++i) {
      const Vector3 x(u(rng), u(rng), u(rng));
      if ((x - x.cwiseMax(0.0).cwiseMin(1.0)).norm() <= 1.0) ++hits;
    }
    return bernoulli_stats(hits, n);
  }, 27.0);
  o.detail << ", neighbourhood MC " << mc.mean << " +- " << mc.std_error << " vs " << analytic;
  o.require(mc.within(analytic, 3.0), "neighbourhood volume within 3 sigma");
}

void gauss_bonnet(Outcome& o) {
  double worst = 0.0;
  auto check = [&](const auto& m) { worst = std::max(worst, gauss_bonnet_check(m).residual); };
  check(unit_cube());
  check(regular_tetrahedron());
  for (int level = 0; level <= 4; ++level) check(icosphere(1.0, level));
  check(torus_mesh(2.0, 0.5, 24, 12));
  check(torus_mesh(3.0, 1.0, 40, 40));
  check(genus2_mesh());
  o.detail << "max |sum K - 2 pi chi| " << worst;
  o.require(worst <= 1e-8, "Gauss-Bonnet residual");
}

void mean_width_check(Outcome& o) {
  const auto cube = unit_cube();
  const auto mw = mean_width(cube, 1'000'000, kDefaultSeed);
  const auto mp = mean_projection_area(cube, 1'000'000, mix_seed(kDefaultSeed, 1));
  o.detail << "mean width " << mw.mean << " +- " << mw.std_error << ", mean projection " << mp.mean << " +- "
           << mp.std_error;
  o.require(mw.within(1.5, 3.0), "mean width 3/2");
  o.require(std::abs(kTwoPi * mw.mean - 3 * kPi) <= 3.0 * kTwoPi * mw.std_error, "2 pi mean width = V2");
  o.require(mp.within(1.5, 3.0), "mean projection 3/2");
  o.require(std::abs(4.0 * mp.mean - surface_area(cube)) <= 3.0 * 4.0 * mp.std_error, "area = 4 mean projection");
}

void schlafli(Outcome& o) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> jitter(-0.4, 0.4);
  const double h = 1e-5;
  double worst = 0.0;
  for (int k = 0; k < 200; ++k) {
    Eigen::MatrixXd pts(3, 4);
    pts << 1, -1, -1, 1, 1, -1, 1, -1, 1, 1, -1, -1;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 4; ++j) pts(i, j) += jitter(rng);
    const auto s = MetricSimplex::from_points(pts);
    for (int i = 0; i < 4; ++i)
      for (int j = i + 1; j < 4; ++j) {
        Eigen::MatrixXd plus = s.lengths(), minus = s.lengths();
        plus(i, j) = plus(j, i) += h;
        minus(i, j) = minus(j, i) -= h;
        const Eigen::MatrixXd da = (dihedral_angles(MetricSimplex(3, plus)) - dihedral_angles(MetricSimplex(3, minus))) / (2 * h);
        double sum = 0.0;
        for (int a = 0; a < 4; ++a)
          for (int b = a + 1; b < 4; ++b) {
            const auto [p, q] = detail::complement_pair(s, std::vector<int>{a, b});
            sum += s.length(a, b) * da(p, q);
          }
        worst = std::max(worst, std::abs(sum));
      }
  }
  o.detail << "max residual " << worst;
  o.require(worst <= 1e-6, "Schlafli residual");
}

void regge_gradient_check(Outcome& o) {
  double worst = 0.0;
  for (const auto& c : {simplex_boundary(3), flat_torus3(), perturbed(simplex_boundary(3), 0.05, 9),
                        perturbed(flat_torus3(), 0.02, 10), barycentric_subdivide(simplex_boundary(3))}) {
    const auto g = regge_gradient(c);
    const auto t = cone_angles(c);
    for (std::size_t e = 0; e < g.size(); ++e) worst = std::max(worst, std::abs(g[e] - t.rows[e].deficit));
  }
  o.detail << "dim 3 max |dF/dl - K| " << worst << "; FD ratios";
  o.require(worst <= 1e-12, "gradient equals deficit");
  for (const auto& c : {simplex_boundary(4), perturbed(simplex_boundary(4), 0.05, 11), perturbed(simplex_boundary(4), 0.1, 12)}) {
    const double coarse = fd_gradient_error(c, 1e-2), fine = fd_gradient_error(c, 1e-3);
    o.detail << " " << coarse / fine << " (" << coarse << " -> " << fine << ")";
    o.require(fine <= 1e-5, "FD residual");
    o.require(coarse / fine > 50 && coarse / fine < 200, "second-order FD ratio");
  }
}

void regge_values(Outcome& o) {
  const auto torus = flat_torus3();
  const double k_torus = cone_angles(torus).max_abs_deficit();
  const double f_torus = regge_functional(torus);
  const auto sphere = simplex_boundary(3);
  const double expected = kTwoPi - 3 * std::acos(1.0 / 3.0);
  double worst = 0.0;
  for (const auto& row : cone_angles(sphere).rows) worst = std::max(worst, std::abs(row.deficit - expected));
  const double f_sphere = regge_functional(sphere);
  o.detail << "flat torus max|K| " << k_torus << ", F " << f_torus << "; sphere max|K - K0| " << worst << ", F "
           << f_sphere;
  o.require(k_torus <= 1e-9 && std::abs(f_torus) <= 1e-9, "flat torus");
  o.require(worst <= 1e-10, "sphere deficits");
  o.require(std::abs(f_sphere - 10 * expected) <= 1e-9, "sphere functional");
}

void relaxation(Outcome& o) {
  const auto r = regge_relax(perturbed(flat_torus3(), 0.02, 13));
  const double k = cone_angles(r.metric).max_abs_deficit();
  o.detail << "status " << to_string(r.status) << ", iterations " << r.iterations << ", max|K| " << k;
  o.require(r.status == RelaxStatus::Converged && k < 1e-6 && r.iterations <= 10'000, "relaxation to flat");
}

void subdivision(Outcome& o) {
  double worst = 0.0;
  for (const auto& c : {simplex_boundary(3), flat_torus3(), perturbed(simplex_boundary(3), 0.05, 14),
                        perturbed(flat_torus3(), 0.02, 15)})
    worst = std::max(worst, std::abs(regge_functional(barycentric_subdivide(c)) - regge_functional(c)));
  const double flat = cone_angles(barycentric_subdivide(flat_torus3())).max_abs_deficit();
  o.detail << "max |F(sd c) - F(c)| " << worst << ", subdivided flat torus max|K| " << flat;
  o.require(worst <= 1e-8, "functional invariance");
  o.require(flat <= 1e-9, "flat stays flat");
}

void chern_gauss_bonnet(Outcome& o) {
  const std::vector<std::pair<PolyhedralMetric, int>> surfaces = {
      {parse_complex_json(read_text_file(data_path("tetrahedron_boundary.json"))), 2},
      {mesh_metric(torus_mesh(2.0, 0.5, 24, 12)), 0},
      {mesh_metric(genus2_mesh()), -2}};
  double worst = 0.0;
  for (const auto& [c, chi] : surfaces) {
    const auto r = cgb_check(c);
    o.require(r.exact && r.chi == chi, "surface chi");
    worst = std::max(worst, r.residual);
  }
  o.detail << "dim 2 max residual " << worst;
  o.require(worst <= 1e-10, "dim 2 residual");

  const auto sphere = simplex_boundary(4);
  const MonteCarloConfig mc{1'000'000, kDefaultSeed};
  const auto r = cgb_check(sphere, mc);
  o.detail << "; dim 4 sum K " << r.total_curvature << " +- " << r.std_error << " (chi " << r.chi << ")";
  o.require(r.chi == 2 && r.residual <= 3.0 * r.std_error, "dim 4 sum within 3 sigma");

  const Simplex top = sphere.complex().top_simplices().front();
  const auto s = sphere.simplex(top);
  double sum = 0.0, var = 0.0;
  for (int v = 0; v < 5; ++v) {
    const int q[] = {v};
    const auto b = external_angle(s, q, {mc.samples, mix_seed(mc.seed, 100 + v)});
    sum += b.value;
    var += b.std_error * b.std_error;
  }
  o.detail << "; sum_v beta(v,T) " << sum << " +- " << std::sqrt(var);
  o.require(std::abs(sum - 1.0) <= 3.0 * std::sqrt(var), "per-simplex normalization");
}

void convergence(Outcome& o) {
  const auto v2 = icosphere_report(SurfaceQuantity::TotalMeanCurvature, 1.0, {1, 2, 3, 4, 5});
  const auto area = icosphere_report(SurfaceQuantity::Area, 1.0, {1, 2, 3, 4, 5});
  const auto helix = curve_report(helix_curve(1.0), {10, 100, 1000, 10000});
  o.detail << "level 5 V2 rel " << v2.rows.back().rel_err << ", area rel " << area.rows.back().rel_err
           << "; helix rel at 1e4 " << helix.rows.back().rel_err;
  o.require(v2.rows.back().rel_err <= 0.01, "icosphere V2 within 1%");
  o.require(area.rows.back().rel_err <= 0.005, "icosphere area within 0.5%");
  o.require(helix.rows.back().rel_err <= 1e-4, "helix within 1e-4 relative");
  o.require(v2.monotone && area.monotone && helix.monotone, "monotone errors");
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "turning number", 1, turning_numbers},
      {2, "Fenchel bound", 1, fenchel},
      {3, "indicatrix length and hemisphere", 0, indicatrix},
      {4, "Crofton Monte Carlo", 10, crofton},
      {5, "cube curvature and Steiner suite", 30, cube_suite},
      {6, "Gauss-Bonnet on meshes", 0, gauss_bonnet},
      {7, "mean width and mean projection", 0, mean_width_check},
      {8, "Schlafli identity", 0, schlafli},
      {9, "Regge gradient", 0, regge_gradient_check},
      {10, "Regge values", 0, regge_values},
      {11, "relaxation to a flat metric", 60, relaxation},
      {12, "subdivision invariance", 0, subdivision},
      {13, "discrete Chern-Gauss-Bonnet", 300, chern_gauss_bonnet},
      {14, "smooth convergence", 0, convergence},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    Outcome o;
    const auto start = std::chrono::steady_clock::now();
    try {
      c.body(o);
    } catch (const std::exception& e) {
      o.ok = false;
      o.detail << "[exception: " << e.what() << "]";
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.max_seconds > 0 && seconds > c.max_seconds) {
      o.ok = false;
      o.detail << " [runtime over " << c.max_seconds << " s]";
    }
    if (!o.ok) ++failures;
    std::printf("%s criterion %d: %s (%.2f s) %s\n", o.ok ? "PASS" : "FAIL", c.id, c.title.c_str(), seconds,
                o.detail.str().c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
