#pragma once

// Command-line front end: one subcommand per family of checks, reports as CSV or JSON.

#include <deque>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "ddg/convergence.hpp"
#include "ddg/curves.hpp"
#include "ddg/io.hpp"
#include "ddg/mesh.hpp"
#include "ddg/polyhedral.hpp"

namespace ddg {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitCheckFailed = 3;

/// Summary values, named tables and the outcome of every numerical check of one command.
class Report {
 public:
  explicit Report(std::string command) : command_(std::move(command)) {}

  void set(const std::string& key, nlohmann::json value) { summary_.emplace_back(key, std::move(value)); }

  Table& table(std::string name, std::vector<std::string> columns) {
    tables_.push_back({std::move(name), std::move(columns), {}});
    return tables_.back();
  }

  /// Records a named check; a failure turns the exit code into kExitCheckFailed.
  void check(const std::string& name, bool ok, const std::string& detail) {
    set("check_" + name, ok ? "pass" : "fail");
    if (!ok) failures_.push_back(name + ": " + detail);
  }

  const std::vector<std::string>& failures() const { return failures_; }
  const std::deque<Table>& tables() const { return tables_; }

  Table summary_table() const {
    Table t{"summary", {"key", "value"}, {}};
    for (const auto& [key, value] : summary_) t.rows.push_back({key, cell(value)});
    return t;
  }

  /// CSV output: each table follows a "# name" line, tables separated by a blank line.
  /// With `only` set, just that table is written, without the marker line.
  void write_csv(std::ostream& os, const std::string& only = {}) const {
    if (!only.empty()) {
      if (only == "summary") return ddg::write_csv(os, summary_table());
      for (const auto& t : tables_)
        if (t.name == only) return ddg::write_csv(os, t);
      throw Error(ErrorKind::InvalidArgument, "report of '" + command_ + "' has no table '" + only + "'");
    }
    os << "# summary\n";
    ddg::write_csv(os, summary_table());
    for (const auto& t : tables_) {
      os << "\n# " << t.name << '\n';
      ddg::write_csv(os, t);
    }
  }

  void write_json(std::ostream& os) const {
    nlohmann::ordered_json j;
    j["command"] = command_;
    nlohmann::ordered_json summary = nlohmann::ordered_json::object();
    for (const auto& [key, value] : summary_) summary[key] = value;
    j["summary"] = std::move(summary);
    nlohmann::ordered_json tables = nlohmann::ordered_json::object();
    for (const auto& t : tables_) {
      nlohmann::ordered_json rows = nlohmann::ordered_json::array();
      for (const auto& row : t.rows) {
        nlohmann::ordered_json r = nlohmann::ordered_json::array();
        for (const auto& c : row) r.push_back(typed(c));
        rows.push_back(std::move(r));
      }
      tables[t.name] = {{"columns", t.columns}, {"rows", std::move(rows)}};
    }
    j["tables"] = std::move(tables);
    os << j.dump(2) << '\n';
  }

 private:
  /// Cells are stored as text; JSON output restores integers, doubles and booleans.
  static nlohmann::ordered_json typed(const std::string& c) {
    if (c == "true" || c == "false") return c == "true";
    const char* end = c.data() + c.size();
    long long i = 0;
    if (auto res = std::from_chars(c.data(), end, i); res.ec == std::errc() && res.ptr == end) return i;
    double d = 0.0;
    if (auto res = std::from_chars(c.data(), end, d); res.ec == std::errc() && res.ptr == end && std::isfinite(d))
      return d;
    return c;
  }

  static std::string cell(const nlohmann::json& v) {
    if (v.is_number_float()) return format_double(v.get<double>());
    if (v.is_string()) return v.get<std::string>();
    return v.dump();
  }

  std::string command_;
  std::vector<std::pair<std::string, nlohmann::json>> summary_;
  std::deque<Table> tables_;
  std::vector<std::string> failures_;
};

namespace detail {

inline std::string extension_of(const std::string& path) {
  std::string ext = std::filesystem::path(path).extension().string();
  for (char& c : ext) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return ext;
}

/// Residual bound for an identity that holds exactly up to rounding.
inline bool within_exact(double residual, double scale, double check) { return residual <= check * (1.0 + std::abs(scale)); }

inline void edge_table(Report& r, const std::vector<EdgeExteriorAngle>& edges) {
  auto& t = r.table("edges", {"a", "b", "beta", "length"});
  for (const auto& e : edges) t.add(e.a, e.b, e.beta, e.length);
}

template <ClosedSurface M>
void surface_common(Report& r, const M& m, const RunConfig& cfg) {
  const auto& s = m.surface();
  const double check = tolerance_value(cfg, "check");
  r.set("vertices", s.vertices().size());
  r.set("edges", s.edges().size());
  r.set("faces", s.faces().size());
  r.set("euler_characteristic", euler_characteristic(m));
  const auto gb = gauss_bonnet_check(m, tolerances(cfg));
  r.set("sum_angle_defect", gb.total_curvature);
  r.set("two_pi_chi", gb.two_pi_chi);
  r.set("gauss_bonnet_residual", gb.residual);
  r.check("gauss_bonnet", within_exact(gb.residual, gb.total_curvature, check),
          "sum of angle defects differs from 2 pi chi by " + format_double(gb.residual));
  r.set("area", surface_area(m));
  r.set("volume", enclosed_volume(m));
  r.set("total_mean_curvature", total_mean_curvature(m));
}

inline std::optional<ConvexPolyhedron> as_convex(const SurfaceMesh& mesh, const Tolerances& tol) {
  if (const auto* p = std::get_if<ConvexPolyhedron>(&mesh)) return *p;
  try {
    return ConvexPolyhedron(std::get<TriangleMesh>(mesh), tol);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::NotConvex) throw;
    return std::nullopt;
  }
}

inline ConvexPolyhedron require_convex(const SurfaceMesh& mesh, const Tolerances& tol) {
  if (const auto* p = std::get_if<ConvexPolyhedron>(&mesh)) return *p;
  return ConvexPolyhedron(std::get<TriangleMesh>(mesh), tol);
}

inline SurfaceMesh load_off(const std::string& path, const Tolerances& tol) {
  return parse_off(read_text_file(path), tol);
}

inline PolyhedralMetric load_complex(const std::string& path, const Tolerances& tol) {
  return parse_complex_json(read_text_file(path), tol);
}

inline std::string face_label(const Simplex& s) {
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) out += (i ? " " : "") + std::to_string(s[i]);
  return out;
}

}  // namespace detail

inline Report run_curve(const std::string& path, const RunConfig& cfg) {
  const Tolerances tol = tolerances(cfg);
  const double check = tolerance_value(cfg, "check");
  const PolygonData data = parse_polygon(read_text_file(path));
  Report r("curve");
  r.set("dimension", data.dim);
  r.set("closed", data.closed);
  r.set("vertex_count", data.vertices.size());

  if (data.dim == 2 && data.closed) {
    const PlanarPolygon planar(data.planar(), tol);
    const auto kappa = signed_turning_angles(planar);
    double total = 0.0;
    auto& t = r.table("signed_turning", {"vertex", "signed_turning_angle"});
    for (std::size_t i = 0; i < kappa.size(); ++i) {
      t.add(i, kappa[i]);
      total += kappa[i];
    }
    r.set("total_signed_curvature", total);
    try {
      r.set("turning_number", turning_number(planar, tol));
      r.check("turning_number", true, "");
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::NotClosedToMultiple) throw;
      r.check("turning_number", false, e.what());
    }
  }

  const SpacePolygon space(data.spatial(), data.closed, tol);
  const auto kappa = turning_angles(space);
  auto& t = r.table("turning", {"vertex", "turning_angle"});
  for (std::size_t i = 0; i < kappa.size(); ++i) t.add(i + space.first_vertex(), kappa[i]);
  const auto tc = total_curvature(space, tol);
  r.set("total_curvature", tc.total);
  if (data.closed) {
    r.set("fenchel_equality", tc.fenchel_equality);
    r.check("fenchel", tc.total >= kTwoPi - check, "closed polygon has total curvature below 2 pi");
  }
  const SphericalPolygon indicatrix = tangent_indicatrix(space, tol);
  const double length = indicatrix.length();
  r.set("indicatrix_length", length);
  r.check("indicatrix", detail::within_exact(std::abs(length - tc.total), tc.total, check),
          "indicatrix length differs from total curvature by " + format_double(std::abs(length - tc.total)));
  const bool witness = open_hemisphere_witness(indicatrix, tol).has_value();
  r.set("hemisphere_witness", witness);
  if (data.closed) r.check("hemisphere", !witness, "closed polygon has its tangents in an open hemisphere");
  const auto crofton = crofton_length_estimate(indicatrix, std::max<std::uint64_t>(cfg.samples, 100), cfg.seed);
  r.set("crofton_length", crofton.mean);
  r.set("crofton_std_error", crofton.std_error);
  r.set("samples", crofton.samples);
  r.set("seed", cfg.seed);
  r.check("crofton", crofton.within(length, 4.0),
          "Crofton estimate is more than 4 standard errors from the indicatrix length");
  return r;
}

inline Report run_surface(const std::string& path, const RunConfig& cfg) {
  const Tolerances tol = tolerances(cfg);
  const double check = tolerance_value(cfg, "check");
  const SurfaceMesh mesh = detail::load_off(path, tol);
  Report r("surface");
  std::visit([&](const auto& m) { detail::surface_common(r, m, cfg); }, mesh);
  const std::optional<ConvexPolyhedron> convex = detail::as_convex(mesh, tol);
  r.set("convex", convex.has_value());

  const auto defects = std::visit([&](const auto& m) { return vertex_angle_defect(m, tol); }, mesh);
  if (convex) {
    const auto beta = vertex_exterior_angle(*convex, tol);
    double sum = 0.0, worst = 0.0;
    auto& t = r.table("vertices", {"vertex", "angle_defect", "exterior_angle"});
    for (std::size_t v = 0; v < beta.size(); ++v) {
      t.add(v, defects[v], beta[v]);
      sum += beta[v];
      worst = std::max(worst, std::abs(beta[v] - defects[v]));
    }
    r.set("sum_exterior_angle", sum);
    r.check("total_gauss_curvature", detail::within_exact(std::abs(sum - 4.0 * kPi), 4.0 * kPi, check),
            "vertex exterior angles sum to " + format_double(sum) + ", not 4 pi");
    r.set("max_exterior_defect_gap", worst);
    r.check("exterior_equals_defect", worst <= check, "a vertex exterior angle differs from its angle defect");
    detail::edge_table(r, edge_exterior_angles(*convex));
  } else {
    auto& t = r.table("vertices", {"vertex", "angle_defect"});
    for (std::size_t v = 0; v < defects.size(); ++v) t.add(v, defects[v]);
    std::visit([&](const auto& m) { detail::edge_table(r, edge_exterior_angles(m)); }, mesh);
  }
  return r;
}

inline Report run_steiner(const std::string& path, const RunConfig& cfg, const std::vector<double>& radii) {
  const Tolerances tol = tolerances(cfg);
  const double check = tolerance_value(cfg, "check");
  const ConvexPolyhedron p = detail::require_convex(detail::load_off(path, tol), tol);
  const auto s = steiner_polynomials(p, tol);
  Report r("steiner");
  r.set("V0", s.coefficients.V0);
  r.set("V1", s.coefficients.V1);
  r.set("V2", s.coefficients.V2);
  r.set("V3", s.coefficients.V3);
  r.set("sum_beta_length", s.sum_beta_length);
  r.set("sum_beta_vertex", s.sum_beta_vertex);
  r.check("V3", detail::within_exact(std::abs(s.coefficients.V3 - 4.0 * kPi / 3.0), 1.0, check),
          "V3 = " + format_double(s.coefficients.V3) + " differs from 4 pi / 3");
  auto& t = r.table("polynomials", {"r", "area", "volume"});
  for (double rad : radii) {
    if (rad < 0) throw Error(ErrorKind::InvalidArgument, "radius must be nonnegative");
    t.add(rad, s.area(rad), s.volume(rad));
  }
  return r;
}

inline Report run_integral_geometry(const std::string& path, const RunConfig& cfg) {
  const Tolerances tol = tolerances(cfg);
  Report r("integral-geometry");
  r.set("samples", cfg.samples);
  r.set("seed", cfg.seed);
  if (detail::extension_of(path) == ".off") {
    const ConvexPolyhedron p = detail::require_convex(detail::load_off(path, tol), tol);
    const double v2 = total_mean_curvature(p);
    const double area = surface_area(p);
    const auto mw = mean_width(p, cfg.samples, cfg.seed);
    const auto mp = mean_projection_area(p, cfg.samples, mix_seed(cfg.seed, 1));
    r.set("mean_width", mw.mean);
    r.set("mean_width_std_error", mw.std_error);
    r.set("two_pi_mean_width", kTwoPi * mw.mean);
    r.set("V2", v2);
    r.check("mean_width", std::abs(kTwoPi * mw.mean - v2) <= 3.0 * kTwoPi * mw.std_error,
            "2 pi times the mean width is more than 3 standard errors from V2");
    r.set("mean_projection_area", mp.mean);
    r.set("mean_projection_std_error", mp.std_error);
    r.set("four_mean_projection", 4.0 * mp.mean);
    r.set("area", area);
    r.check("cauchy", std::abs(4.0 * mp.mean - area) <= 3.0 * 4.0 * mp.std_error,
            "4 times the mean projection area is more than 3 standard errors from the area");
    return r;
  }
  const PolygonData data = parse_polygon(read_text_file(path));
  if (data.dim == 2 && data.closed) {
    const PlanarPolygon planar(data.planar(), tol);
    const auto kappa = signed_turning_angles(planar);
    bool convex = true;
    for (double k : kappa) convex = convex && k * kappa.front() > 0.0;
    const auto mw = planar_mean_width(planar, cfg.samples, cfg.seed);
    r.set("perimeter", planar.perimeter());
    r.set("mean_width", mw.mean);
    r.set("mean_width_std_error", mw.std_error);
    r.set("pi_mean_width", kPi * mw.mean);
    r.set("convex", convex && std::abs(turning_number(planar, tol)) == 1);
    if (convex)
      r.check("planar_crofton", std::abs(kPi * mw.mean - planar.perimeter()) <= 3.0 * kPi * mw.std_error,
              "pi times the mean width is more than 3 standard errors from the perimeter");
  }
  const SpacePolygon space(data.spatial(), data.closed, tol);
  const SphericalPolygon indicatrix = tangent_indicatrix(space, tol);
  const auto est = crofton_length_estimate(indicatrix, std::max<std::uint64_t>(cfg.samples, 100), cfg.seed);
  const double total = total_curvature(space, tol).total;
  r.set("total_curvature", total);
  r.set("crofton_length", est.mean);
  r.set("crofton_std_error", est.std_error);
  r.check("crofton", est.within(total, 3.0), "Crofton estimate is more than 3 standard errors from the total curvature");
  return r;
}

struct ReggeOptions {
  bool gradient = false;
  bool relax = false;
  bool subdivide = false;
  RelaxOptions relax_options;
  std::string trajectory_path;
  std::string relaxed_path;
};

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::InvalidArgument, "cannot write '" + path + "'");
  out << content;
}

inline Report run_regge(const std::string& path, const RunConfig& cfg, const ReggeOptions& opt) {
  const Tolerances tol = tolerances(cfg);
  const double check = tolerance_value(cfg, "check");
  const PolyhedralMetric metric = detail::load_complex(path, tol);
  Report r("regge");
  r.set("dim", metric.dim());
  r.set("euler_characteristic", euler_characteristic(metric));
  const auto table = cone_angles(metric);
  const double F = regge_functional(metric);
  r.set("regge_functional", F);
  r.set("max_abs_deficit", table.max_abs_deficit());
  r.set("flat", table.max_abs_deficit() <= tol.eps_singular);
  auto& hinges = r.table("hinges", {"face", "cone_angle", "deficit", "volume"});
  for (const auto& row : table.rows) hinges.add(detail::face_label(row.face), row.cone_angle, row.deficit, row.volume);

  if (opt.gradient) {
    const auto grad = regge_gradient(metric);
    const auto& edges = metric.complex().faces(1);
    auto& t = r.table("gradient", {"a", "b", "dF_dlength"});
    double worst = 0.0;
    for (std::size_t e = 0; e < edges.size(); ++e) {
      t.add(edges[e][0], edges[e][1], grad[e]);
      worst = std::max(worst, std::abs(grad[e]));
    }
    r.set("max_abs_gradient", worst);
    r.set("zero_gradient", worst <= tol.eps_singular);
  }
  if (opt.subdivide) {
    const double Fs = regge_functional(barycentric_subdivide(metric));
    r.set("regge_functional_subdivided", Fs);
    r.check("subdivision", detail::within_exact(std::abs(Fs - F), F, check),
            "subdivision changes the Regge functional by " + format_double(std::abs(Fs - F)));
  }
  if (opt.relax) {
    const RelaxResult res = regge_relax(metric, opt.relax_options);
    r.set("relax_status", std::string(to_string(res.status)));
    r.set("relax_iterations", res.iterations);
    r.set("relax_rejected_unrealizable", res.rejected_unrealizable);
    r.set("relax_max_abs_deficit", res.trajectory.back().max_abs_deficit);
    auto& t = r.table("trajectory", {"iteration", "E", "max_abs_K", "total_volume"});
    for (const auto& row : res.trajectory) t.add(row.iteration, row.energy, row.max_abs_deficit, row.total_volume);
    r.check("relaxation", res.status == RelaxStatus::Converged,
            "relaxation ended as " + std::string(to_string(res.status)) + " with max |K| " +
                format_double(res.trajectory.back().max_abs_deficit));
    if (!opt.trajectory_path.empty()) {
      std::ostringstream os;
      write_csv(os, t);
      write_file(opt.trajectory_path, os.str());
    }
    if (!opt.relaxed_path.empty()) write_file(opt.relaxed_path, write_complex_json(res.metric));
  }
  return r;
}

inline Report run_lk(const std::string& path, const RunConfig& cfg, std::optional<int> k) {
  const Tolerances tol = tolerances(cfg);
  const PolyhedralMetric metric = detail::load_complex(path, tol);
  Report r("lk");
  r.set("dim", metric.dim());
  r.set("samples", cfg.samples);
  r.set("seed", cfg.seed);
  auto& t = r.table("curvatures", {"k", "face", "curvature", "std_error", "volume"});
  std::vector<int> ks;
  if (k) {
    ks.push_back(*k);
  } else {
    for (int i = 0; 2 * i <= metric.dim(); ++i) ks.push_back(i);
  }
  for (int kk : ks) {
    const LKReport rep = lk_total(metric, kk, cfg.monte_carlo());
    for (const auto& row : rep.rows) t.add(kk, detail::face_label(row.face), row.curvature, row.std_error, row.volume);
    r.set("S_" + std::to_string(2 * kk), rep.total);
    r.set("S_" + std::to_string(2 * kk) + "_std_error", rep.std_error);
    r.set("S_" + std::to_string(2 * kk) + "_exact", rep.exact);
  }
  return r;
}

inline Report run_cgb(const std::string& path, const RunConfig& cfg) {
  const Tolerances tol = tolerances(cfg);
  const double check = tolerance_value(cfg, "check");
  const PolyhedralMetric metric = detail::load_complex(path, tol);
  const CgbReport c = cgb_check(metric, cfg.monte_carlo());
  Report r("cgb");
  r.set("dim", metric.dim());
  r.set("sum_vertex_curvature", c.total_curvature);
  r.set("euler_characteristic", c.chi);
  r.set("residual", c.residual);
  r.set("std_error", c.std_error);
  r.set("exact", c.exact);
  const double bound = c.exact ? check : 3.0 * c.std_error + check;
  r.check("chern_gauss_bonnet", c.residual <= bound,
          "vertex curvatures sum to " + format_double(c.total_curvature) + " against chi = " + std::to_string(c.chi));
  return r;
}

/// Targets accepted by the converge subcommand.
inline const std::vector<std::string>& convergence_targets() {
  static const std::vector<std::string> t = {"icosphere-area", "icosphere-mean-curvature", "icosphere-gauss",
                                             "torus-area",     "torus-mean-curvature",     "torus-gauss",
                                             "circle",         "ellipse",                  "helix"};
  return t;
}

inline Report run_converge(const std::string& target, std::vector<int> schedule) {
  ConvergenceReport rep;
  auto quantity = [&](const std::string& suffix) {
    if (suffix == "area") return SurfaceQuantity::Area;
    if (suffix == "mean-curvature") return SurfaceQuantity::TotalMeanCurvature;
    return SurfaceQuantity::TotalGaussCurvature;
  };
  if (target.rfind("icosphere-", 0) == 0) {
    if (schedule.empty()) schedule = {1, 2, 3, 4, 5};
    rep = icosphere_report(quantity(target.substr(10)), 1.0, schedule);
  } else if (target.rfind("torus-", 0) == 0) {
    if (schedule.empty()) schedule = {8, 16, 32, 64, 128};
    rep = torus_report(quantity(target.substr(6)), 2.0, 0.5, schedule);
  } else if (target == "circle" || target == "ellipse" || target == "helix") {
    if (schedule.empty()) schedule = {10, 100, 1000, 10000};
    const AnalyticCurve c = target == "circle" ? circle_curve() : target == "ellipse" ? ellipse_curve() : helix_curve();
    rep = curve_report(c, std::vector<std::size_t>(schedule.begin(), schedule.end()));
  } else {
    throw Error(ErrorKind::InvalidArgument, "unknown convergence target '" + target + "'");
  }
  Report r("converge");
  r.set("target", target);
  r.set("quantity", rep.quantity);
  r.set("monotone", rep.monotone);
  auto& t = r.table("convergence", {"refinement", "discrete", "analytic", "abs_err", "rel_err"});
  for (const auto& row : rep.rows) t.add(row.refinement, row.discrete, row.analytic, row.abs_err, row.rel_err);
  return r;
}

inline int exit_code_for(ErrorKind kind) {
  return kind == ErrorKind::NotClosedToMultiple || kind == ErrorKind::StallError ? kExitCheckFailed : kExitValidation;
}

/// Parses arguments, runs one subcommand and writes its report. Returns the process exit code.
inline int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Discrete curvature toolkit for polygons, polyhedral surfaces and polyhedral manifolds"};
  app.require_subcommand(1);
  RunConfig cfg;
  std::vector<std::string> tol_items;
  std::string format = "csv";
  std::string only_table;
  std::string input;

  auto add_common = [&](CLI::App* sub, bool needs_input) {
    if (needs_input) sub->add_option("input", input, "Input file")->required();
    sub->add_option("--seed", cfg.seed, "Random seed for Monte Carlo estimates")->capture_default_str();
    sub->add_option("--samples", cfg.samples, "Monte Carlo sample count")->capture_default_str();
    sub->add_option("--tol", tol_items, "Tolerance override key=value (repeatable)");
    sub->add_option("--out", cfg.out, "Write the report here instead of standard output");
    sub->add_option("--format", format, "Report format")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
    sub->add_option("--table", only_table, "Emit only this table (CSV)");
  };

  auto* curve = app.add_subcommand("curve", "Turning angles, total curvature, indicatrix and Crofton length of a polygon");
  add_common(curve, true);
  auto* surface = app.add_subcommand("surface", "Curvature tables and Gauss-Bonnet check of an OFF surface");
  add_common(surface, true);
  auto* steiner = app.add_subcommand("steiner", "Steiner coefficients and polynomials of a convex polyhedron");
  add_common(steiner, true);
  std::vector<double> radii = {0.0, 0.5, 1.0, 2.0};
  steiner->add_option("--radius", radii, "Radii at which to evaluate the polynomials");
  auto* integral = app.add_subcommand("integral-geometry", "Monte Carlo mean width, projection and Crofton checks");
  add_common(integral, true);
  auto* regge = app.add_subcommand("regge", "Deficits, Regge functional, gradient and relaxation of a complex");
  add_common(regge, true);
  ReggeOptions ropt;
  regge->add_flag("--grad", ropt.gradient, "Report the gradient of the Regge functional");
  regge->add_flag("--subdivide", ropt.subdivide, "Compare with the barycentric subdivision");
  regge->add_flag("--relax", ropt.relax, "Relax the metric towards a flat one");
  regge->add_option("--max-iterations", ropt.relax_options.max_iterations, "Relaxation iteration cap")
      ->capture_default_str();
  regge->add_option("--relax-tol", ropt.relax_options.tolerance, "Target max |K| for relaxation")->capture_default_str();
  bool fixed_scale = false;
  regge->add_flag("--no-normalize", fixed_scale, "Do not hold the total volume fixed during relaxation");
  regge->add_option("--trajectory", ropt.trajectory_path, "Write the relaxation trajectory CSV here");
  regge->add_option("--relaxed", ropt.relaxed_path, "Write the relaxed complex JSON here");
  auto* lk = app.add_subcommand("lk", "Lipschitz-Killing curvatures of a complex");
  add_common(lk, true);
  std::optional<int> lk_k;
  lk->add_option("--k", lk_k, "Only the curvature S_2k on faces of dimension dim - 2k");
  auto* cgb = app.add_subcommand("cgb", "Discrete Chern-Gauss-Bonnet check of an even-dimensional complex");
  add_common(cgb, true);
  auto* converge = app.add_subcommand("converge", "Convergence table of a discrete quantity against its smooth value");
  add_common(converge, false);
  std::string target;
  converge->add_option("target", target, "Fixture family and quantity")
      ->required()
      ->check(CLI::IsMember(convergence_targets()));
  std::vector<int> schedule;
  converge->add_option("--schedule", schedule, "Refinement levels, grid sizes or sample counts");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    std::ostringstream os;
    const int code = app.exit(e, os, os);
    if (code == 0) {
      out << os.str();
      return kExitOk;
    }
    err << os.str();
    return kExitValidation;
  }

  try {
    cfg.tolerance_overrides = parse_tolerance_overrides(tol_items);
    cfg.format = format == "json" ? OutputFormat::Json : OutputFormat::Csv;
    validate_config(cfg);
    ropt.relax_options.normalize_volume = !fixed_scale;

    std::optional<Report> report;
    if (curve->parsed()) report = run_curve(input, cfg);
    if (surface->parsed()) report = run_surface(input, cfg);
    if (steiner->parsed()) report = run_steiner(input, cfg, radii);
    if (integral->parsed()) report = run_integral_geometry(input, cfg);
    if (regge->parsed()) report = run_regge(input, cfg, ropt);
    if (lk->parsed()) report = run_lk(input, cfg, lk_k);
    if (cgb->parsed()) report = run_cgb(input, cfg);
    if (converge->parsed()) report = run_converge(target, schedule);

    std::ostringstream body;
    if (cfg.format == OutputFormat::Json)
      report->write_json(body);
    else
      report->write_csv(body, only_table);
    if (cfg.out.empty())
      out << body.str();
    else
      write_file(cfg.out, body.str());

    for (const auto& f : report->failures()) err << "check failed: " << f << '\n';
    return report->failures().empty() ? kExitOk : kExitCheckFailed;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e.kind());
  }
}

}  // namespace ddg
