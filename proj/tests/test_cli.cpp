#include <gtest/gtest.h>

#include <filesystem>
#include <nlohmann/json.hpp>
#include <sstream>

#include "ddg/cli.hpp"
#include "support.hpp"

using namespace ddg;
using ddg::test::data_path;

namespace {

struct Run {
  int code = -1;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "ddg");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  Run r;
  r.code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

// Value of `key` in the summary section of a CSV report.
std::string summary_value(const std::string& csv, const std::string& key) {
  std::istringstream is(csv);
  std::string line;
  while (std::getline(is, line))
    if (line.rfind(key + ",", 0) == 0) return line.substr(key.size() + 1);
  return {};
}

double summary_number(const std::string& csv, const std::string& key) {
  const auto v = summary_value(csv, key);
  EXPECT_FALSE(v.empty()) << "missing " << key;
  return v.empty() ? std::nan("") : std::stod(v);
}

}  // namespace

TEST(Cli, SurfaceCube) {
  const auto r = run({"surface", data_path("cube.off")});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_EQ(summary_value(r.out, "euler_characteristic"), "2");
  EXPECT_NEAR(summary_number(r.out, "sum_exterior_angle"), 4 * kPi, 1e-12);
  EXPECT_NEAR(summary_number(r.out, "total_mean_curvature"), 3 * kPi, 1e-12);
  EXPECT_EQ(summary_value(r.out, "check_gauss_bonnet"), "pass");
  EXPECT_NE(r.out.find("# vertices"), std::string::npos);
  EXPECT_NE(r.out.find("# edges"), std::string::npos);
}

TEST(Cli, SteinerCube) {
  const auto r = run({"steiner", data_path("cube.off"), "--radius", "0.5", "--radius", "2"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_NEAR(summary_number(r.out, "V0"), 1.0, 1e-12);
  EXPECT_NEAR(summary_number(r.out, "V1"), 6.0, 1e-12);
  EXPECT_NEAR(summary_number(r.out, "V2"), 3 * kPi, 1e-12);
  EXPECT_NEAR(summary_number(r.out, "V3"), 4 * kPi / 3, 1e-12);
}

TEST(Cli, SteinerRejectsNonConvex) {
  const auto r = run({"steiner", data_path("genus2.off")});
  EXPECT_EQ(r.code, kExitValidation);
  EXPECT_NE(r.err.find("NotConvex"), std::string::npos) << r.err;
}

TEST(Cli, ReggeFlatTorusGradient) {
  const auto r = run({"regge", "--grad", data_path("flat_torus3.json")});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_EQ(summary_value(r.out, "zero_gradient"), "true");
  EXPECT_EQ(summary_value(r.out, "flat"), "true");
  EXPECT_NE(r.out.find("# gradient"), std::string::npos);
}

TEST(Cli, ReggeSimplexBoundary) {
  const auto r = run({"regge", "--subdivide", data_path("simplex_boundary_3.json")});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_NEAR(summary_number(r.out, "regge_functional"), 10 * (kTwoPi - 3 * std::acos(1.0 / 3.0)), 1e-9);
  EXPECT_EQ(summary_value(r.out, "check_subdivision"), "pass");
}

TEST(Cli, FailedRelaxationExitsThree) {
  const auto r = run({"regge", "--relax", "--max-iterations", "5", data_path("simplex_boundary_3.json")});
  EXPECT_EQ(r.code, kExitCheckFailed);
  EXPECT_EQ(summary_value(r.out, "check_relaxation"), "fail");
  EXPECT_NE(r.err.find("check failed: relaxation"), std::string::npos) << r.err;
}

TEST(Cli, ValidationErrorsExitTwo) {
  auto r = run({"cgb", data_path("odd_dim.json")});
  EXPECT_EQ(r.code, kExitValidation);
  EXPECT_NE(r.err.find("OddDimension"), std::string::npos) << r.err;
  r = run({"surface", data_path("bad_index.off")});
  EXPECT_EQ(r.code, kExitValidation);
  EXPECT_NE(r.err.find("IndexOutOfRange"), std::string::npos) << r.err;
  r = run({"regge", data_path("missing_length.json")});
  EXPECT_EQ(r.code, kExitValidation);
  EXPECT_NE(r.err.find("{1,3}"), std::string::npos) << r.err;
  r = run({"surface", data_path("no_such_file.off")});
  EXPECT_EQ(r.code, kExitValidation);
  r = run({"surface", data_path("cube.off"), "--tol", "eps_bogus=1"});
  EXPECT_EQ(r.code, kExitValidation);
  r = run({"curve", data_path("square.txt"), "--samples", "0"});
  EXPECT_EQ(r.code, kExitValidation);
  r = run({"nonsense"});
  EXPECT_EQ(r.code, kExitValidation);
  r = run({"converge", "sphere-volume"});
  EXPECT_EQ(r.code, kExitValidation);
}

TEST(Cli, CurveTurningNumbers) {
  auto r = run({"curve", data_path("square.txt"), "--samples", "10000"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_EQ(summary_value(r.out, "turning_number"), "1");
  r = run({"curve", data_path("square_reversed.txt"), "--samples", "10000"});
  EXPECT_EQ(summary_value(r.out, "turning_number"), "-1");
  r = run({"curve", data_path("bowtie.txt"), "--samples", "10000"});
  EXPECT_EQ(summary_value(r.out, "turning_number"), "0");
}

TEST(Cli, SameSeedIsByteIdentical) {
  const std::vector<std::string> args = {"integral-geometry", data_path("cube.off"), "--samples", "20000", "--seed", "7"};
  const auto a = run(args), b = run(args);
  ASSERT_EQ(a.code, kExitOk) << a.err;
  EXPECT_EQ(a.out, b.out);
  auto other = args;
  other.back() = "8";
  EXPECT_NE(run(other).out, a.out);
}

TEST(Cli, OutFileAndJson) {
  const auto path = (std::filesystem::temp_directory_path() / "ddg_cli_test_report.json").string();
  std::filesystem::remove(path);
  const auto r = run({"lk", data_path("simplex_boundary_3.json"), "--format", "json", "--out", path});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_TRUE(r.out.empty());
  const auto j = nlohmann::json::parse(read_text_file(path));
  EXPECT_EQ(j["command"], "lk");
  EXPECT_EQ(j["summary"]["dim"], 3);
  EXPECT_NEAR(j["summary"]["S_0"].get<double>(), 5.0 * std::sqrt(2.0) / 12.0, 1e-12);
  EXPECT_TRUE(j["tables"].is_object());
  std::filesystem::remove(path);
}

TEST(Cli, SingleTable) {
  const auto r = run({"converge", "circle", "--schedule", "3", "--schedule", "30", "--table", "convergence"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_EQ(r.out.rfind("refinement,discrete,analytic,abs_err,rel_err\n", 0), 0u) << r.out;
  EXPECT_EQ(r.out.find('#'), std::string::npos);
}

TEST(Cli, CgbSurfaceAndSphere) {
  auto r = run({"cgb", data_path("tetrahedron_boundary.json")});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_EQ(summary_value(r.out, "exact"), "true");
  r = run({"cgb", data_path("simplex_boundary_4.json"), "--samples", "100000"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_EQ(summary_value(r.out, "euler_characteristic"), "2");
  EXPECT_EQ(summary_value(r.out, "check_chern_gauss_bonnet"), "pass");
}

TEST(Cli, Help) {
  const auto r = run({"--help"});
  EXPECT_EQ(r.code, kExitOk);
  EXPECT_NE(r.out.find("regge"), std::string::npos);
}
