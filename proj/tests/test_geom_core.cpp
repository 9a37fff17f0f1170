#include <gtest/gtest.h>

#include <random>

#include "ddg/geom_core.hpp"
#include "support.hpp"

using namespace ddg;
using ddg::test::expect_error;

TEST(AngleBetween, OrthogonalAndIdentical) {
  EXPECT_NEAR(angle_between(Vector3(1, 0, 0), Vector3(0, 1, 0)), kPi / 2, 1e-15);
  EXPECT_EQ(angle_between(Vector3(1, 0, 0), Vector3(1, 0, 0)), 0.0);
}

TEST(AngleBetween, NearAntipodalIsStable) {
  const double a = angle_between(Vector3(1, 0, 0), Vector3(-1, 1e-12, 0));
  EXPECT_NEAR(a, kPi - 1e-12, 1e-15);
}

TEST(AngleBetween, SymmetricAndSupplementary) {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> n;
  for (int k = 0; k < 1000; ++k) {
    const Vector3 u(n(rng), n(rng), n(rng)), v(n(rng), n(rng), n(rng));
    EXPECT_EQ(angle_between(u, v), angle_between(v, u));
    EXPECT_NEAR(angle_between(u, v) + angle_between(u, Vector3(-v)), kPi, 1e-12);
  }
}

TEST(AngleBetween, ZeroVectorRejected) {
  expect_error(ErrorKind::ZeroVector, [] { angle_between(Vector3(0, 0, 0), Vector3(1, 0, 0)); });
}

TEST(UnitVector, NormChecked) {
  EXPECT_NO_THROW(UnitVector(Vector3(0, 0, 1)));
  expect_error(ErrorKind::InvalidArgument, [] { UnitVector(Vector3(0, 0, 1.1)); });
  expect_error(ErrorKind::ZeroVector, [] { UnitVector::normalized(Vector3(0, 0, 0)); });
}

TEST(SphericalPolygon, RejectsBadVertexLists) {
  const UnitVector e1(Vector3(1, 0, 0)), e2(Vector3(0, 1, 0)), m1(Vector3(-1, 0, 0));
  expect_error(ErrorKind::InvalidArgument, [&] { SphericalPolygon({e1, e2}); });
  expect_error(ErrorKind::DegenerateVertex, [&] { SphericalPolygon({e1, e1, e2}); });
  expect_error(ErrorKind::AntipodalDirections, [&] { SphericalPolygon({e1, m1, e2}); });
}

TEST(SphericalArea, OctantTriangle) {
  const SphericalPolygon p({UnitVector(Vector3(1, 0, 0)), UnitVector(Vector3(0, 1, 0)), UnitVector(Vector3(0, 0, 1))});
  EXPECT_NEAR(spherical_polygon_area(p), kPi / 2, 1e-12);
  EXPECT_NEAR(p.length(), 3 * kPi / 2, 1e-12);
}

TEST(SphericalArea, OrientationDoesNotMatter) {
  const SphericalPolygon p({UnitVector(Vector3(0, 0, 1)), UnitVector(Vector3(0, 1, 0)), UnitVector(Vector3(1, 0, 0))});
  EXPECT_NEAR(spherical_polygon_area(p), kPi / 2, 1e-12);
}

TEST(SphericalArea, CubeCornerNormalCone) {
  // Outward normals of the three faces meeting at the corner (1,1,1) of the unit cube.
  const SphericalPolygon p({UnitVector(Vector3(1, 0, 0)), UnitVector(Vector3(0, 1, 0)), UnitVector(Vector3(0, 0, 1))});
  EXPECT_NEAR(spherical_polygon_area(p), 4 * kPi / 8, 1e-12);
}

TEST(SphericalArea, SmallCapQuadrilateral) {
  // Four points at polar angle t around e3: area of the spherical square by Girard's theorem.
  const double t = 0.3;
  std::vector<UnitVector> v;
  for (int k = 0; k < 4; ++k)
    v.push_back(UnitVector::normalized(Vector3(std::sin(t) * std::cos(k * kPi / 2), std::sin(t) * std::sin(k * kPi / 2), std::cos(t))));
  // Interior angle from the tangent vectors, computed independently with arccos.
  const Vector3 a = v[0].vec(), b = v[1].vec(), d = v[3].vec();
  const Vector3 tb = (b - a.dot(b) * a).normalized(), td = (d - a.dot(d) * a).normalized();
  const double interior = std::acos(tb.dot(td));
  EXPECT_NEAR(spherical_polygon_area(SphericalPolygon(v)), 4 * interior - 2 * kPi, 1e-12);
}

TEST(SphericalArea, NonConvexRejected) {
  // The last vertex is a reflex corner of the gnomonic projection.
  std::vector<UnitVector> v;
  for (const auto& [x, y] : {std::pair{0.5, 0.0}, {0.0, 0.5}, {-0.5, 0.0}, {0.0, 0.1}})
    v.push_back(UnitVector::normalized(Vector3(x, y, 1.0)));
  expect_error(ErrorKind::NotConvexSpherical, [&] { spherical_polygon_area(SphericalPolygon(v)); });
}

TEST(MetricSimplex, EquilateralTriangleEmbedding) {
  const auto s = MetricSimplex::regular(2, 1.0);
  const auto e = embed_simplex(s);
  for (int i = 0; i < 3; ++i)
    for (int j = i + 1; j < 3; ++j) EXPECT_NEAR((e.points.col(i) - e.points.col(j)).norm(), 1.0, 1e-12);
  EXPECT_NEAR(e.volume(), std::sqrt(3.0) / 4, 1e-12);
}

TEST(MetricSimplex, TriangleInequalityViolation) {
  const double l[] = {1, 1, 3};
  try {
    MetricSimplex::from_edge_list(2, l);
    FAIL() << "expected UnrealizableMetric";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::UnrealizableMetric);
    EXPECT_NE(std::string(e.what()).find('{'), std::string::npos) << "message should name the sub-simplex";
  }
}

TEST(MetricSimplex, FlatTetrahedronRejected) {
  // Vertex 3 on the plane of an equilateral base: zero volume.
  Eigen::MatrixXd p(3, 4);
  p << 0, 1, 0.5, 0.5, 0, 0, std::sqrt(3.0) / 2, std::sqrt(3.0) / 6, 0, 0, 0, 0;
  expect_error(ErrorKind::UnrealizableMetric, [&] { MetricSimplex::from_points(p); });
}

TEST(SimplexVolume, KnownValues) {
  EXPECT_NEAR(simplex_volume(MetricSimplex::regular(1, 1.0)), 1.0, 1e-15);
  EXPECT_NEAR(simplex_volume(MetricSimplex::regular(2, 1.0)), std::sqrt(3.0) / 4, 1e-15);
  EXPECT_NEAR(simplex_volume(MetricSimplex::regular(3, 1.0)), 1.0 / (6 * std::sqrt(2.0)), 1e-15);
  EXPECT_NEAR(embed_simplex(MetricSimplex::regular(3, 1.0)).volume(), 0.117851130197758, 1e-12);
}

TEST(SimplexVolume, CayleyMengerMatchesCoordinates) {
  std::mt19937_64 rng(3);
  for (int d = 1; d <= 5; ++d)
    for (int k = 0; k < 50; ++k) {
      const Eigen::MatrixXd p = ddg::test::random_simplex_points(d, rng);
      Eigen::MatrixXd e(d, d);
      for (int j = 0; j < d; ++j) e.col(j) = p.col(j + 1) - p.col(0);
      double fact = 1;
      for (int i = 2; i <= d; ++i) fact *= i;
      const double coord = std::abs(e.determinant()) / fact;
      const auto s = MetricSimplex::from_points(p);
      EXPECT_NEAR(simplex_volume(s), coord, 1e-10 * coord);
      const auto emb = embed_simplex(s);
      for (int i = 0; i <= d; ++i)
        for (int j = i + 1; j <= d; ++j)
          EXPECT_NEAR((emb.points.col(i) - emb.points.col(j)).norm(), s.length(i, j), 1e-9 * s.scale());
    }
}

TEST(SimplexVolumeGradient, SegmentAndHeron) {
  const auto g1 = simplex_volume_gradient(MetricSimplex::regular(1, 1.0));
  EXPECT_NEAR(g1(0, 1), 1.0, 1e-14);
  const auto g2 = simplex_volume_gradient(MetricSimplex::regular(2, 1.0));
  for (int i = 0; i < 3; ++i)
    for (int j = i + 1; j < 3; ++j) EXPECT_NEAR(g2(i, j), 1.0 / (2 * std::sqrt(3.0)), 1e-14);
}

TEST(SimplexVolumeGradient, MatchesFiniteDifferences) {
  std::mt19937_64 rng(5);
  const double h = 1e-6;
  for (int d = 2; d <= 4; ++d)
    for (int k = 0; k < 20; ++k) {
      const auto s = MetricSimplex::from_points(ddg::test::random_simplex_points(d, rng));
      const auto g = simplex_volume_gradient(s);
      for (int i = 0; i <= d; ++i)
        for (int j = i + 1; j <= d; ++j) {
          Eigen::MatrixXd plus = s.lengths(), minus = s.lengths();
          plus(i, j) = plus(j, i) = s.length(i, j) + h;
          minus(i, j) = minus(j, i) = s.length(i, j) - h;
          const double fd =
              (simplex_volume(MetricSimplex(d, plus)) - simplex_volume(MetricSimplex(d, minus))) / (2 * h);
          EXPECT_NEAR(g(i, j), fd, 1e-6 * (1 + std::abs(fd)));
        }
    }
}

TEST(DihedralAngle, KnownValues) {
  const int v[] = {0};
  EXPECT_NEAR(dihedral_angle(MetricSimplex::regular(2, 1.0), v), kPi / 3, 1e-14);
  const int e[] = {0, 1};
  EXPECT_NEAR(dihedral_angle(MetricSimplex::regular(3, 1.0), e), std::acos(1.0 / 3.0), 1e-14);
  EXPECT_NEAR(dihedral_angle(MetricSimplex::regular(3, 1.0), e), 1.2309594173407747, 1e-14);
}

TEST(DihedralAngle, RightCornerTetrahedron) {
  Eigen::MatrixXd p(3, 4);
  p << 0, 1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1;
  const auto s = MetricSimplex::from_points(p);
  const int x_axis[] = {0, 1};
  EXPECT_NEAR(dihedral_angle(s, x_axis), kPi / 2, 1e-14);
  const int hyp[] = {1, 2};  // edge on the slanted face: dihedral with the xy-plane is arctan(sqrt 2)
  EXPECT_NEAR(dihedral_angle(s, hyp), std::atan(std::sqrt(2.0)), 1e-14);
}

TEST(DihedralAngle, BadFaceRejected) {
  const auto s = MetricSimplex::regular(3, 1.0);
  const int not_codim2[] = {0};
  const int out_of_range[] = {0, 7};
  expect_error(ErrorKind::BadFace, [&] { dihedral_angle(s, not_codim2); });
  expect_error(ErrorKind::BadFace, [&] { dihedral_angle(s, out_of_range); });
}

TEST(DihedralJacobian, MatchesFiniteDifferences) {
  std::mt19937_64 rng(9);
  const double h = 1e-6;
  for (int d = 2; d <= 4; ++d) {
    const auto s = MetricSimplex::from_points(ddg::test::random_simplex_points(d, rng));
    const auto jac = dihedral_jacobian(s);
    const int n = d + 1;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        Eigen::MatrixXd plus = s.lengths(), minus = s.lengths();
        plus(i, j) = plus(j, i) += h;
        minus(i, j) = minus(j, i) -= h;
        const Eigen::MatrixXd fd = (dihedral_angles(MetricSimplex(d, plus)) - dihedral_angles(MetricSimplex(d, minus))) / (2 * h);
        for (int a = 0; a < n; ++a)
          for (int b = a + 1; b < n; ++b)
            EXPECT_NEAR(jac(pair_index(n, a, b), pair_index(n, i, j)), fd(a, b), 1e-6);
      }
  }
}

// Schlafli: sum over edges q of l_q * d(alpha_q)/d(l_e) vanishes for every edge e.
TEST(Schlafli, RandomTetrahedraCentralDifferences) {
  std::mt19937_64 rng(200);
  const double h = 1e-5;
  double worst = 0.0;
  for (int k = 0; k < 200; ++k) {
    const auto s = MetricSimplex::from_points(ddg::test::random_tetrahedron_points(rng));
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
  EXPECT_LE(worst, 1e-6);
}

// Same identity with the exact Jacobian, on unconstrained random simplices including slivers.
TEST(Schlafli, ExactJacobianAnyShape) {
  std::mt19937_64 rng(201);
  for (int d = 3; d <= 5; ++d)
    for (int k = 0; k < 100; ++k) {
      const auto s = MetricSimplex::from_points(ddg::test::random_simplex_points(d, rng));
      const auto jac = dihedral_jacobian(s);
      const int n = d + 1;
      for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
          double sum = 0.0, scale = 0.0;
          for (int a = 0; a < n; ++a)
            for (int b = a + 1; b < n; ++b) {
              std::vector<int> hinge;
              for (int v = 0; v < n; ++v)
                if (v != a && v != b) hinge.push_back(v);
              const double term = simplex_volume(s.face(hinge)) * jac(pair_index(n, a, b), pair_index(n, i, j));
              sum += term;
              scale += std::abs(term);
            }
          EXPECT_LE(std::abs(sum), 1e-10 * (1.0 + scale));
        }
    }
}

TEST(ExternalAngle, LowCodimensionValues) {
  const auto tri = MetricSimplex::regular(2, 1.0);
  const int edge[] = {0, 1};
  const auto b = external_angle(tri, edge);
  EXPECT_EQ(b.value, 0.5);
  EXPECT_TRUE(b.exact);
  const int all[] = {0, 1, 2};
  EXPECT_EQ(external_angle(tri, all).value, 1.0);

  Eigen::MatrixXd p(2, 3);
  p << 0, 1, 0, 0, 0, 1;
  const int corner[] = {0};
  EXPECT_NEAR(external_angle(MetricSimplex::from_points(p), corner).value, 0.25, 1e-15);
}

TEST(ExternalAngle, CodimTwoIsComplementaryDihedral) {
  std::mt19937_64 rng(21);
  const auto s = MetricSimplex::from_points(ddg::test::random_simplex_points(3, rng));
  const int e[] = {1, 3};
  EXPECT_DOUBLE_EQ(external_angle(s, e).value, 0.5 - dihedral_angle(s, e) / kTwoPi);
}

TEST(ExternalAngle, VertexAnglesTileInExactRegime) {
  std::mt19937_64 rng(42);
  for (int d = 1; d <= 3; ++d)
    for (int k = 0; k < 50; ++k) {
      const auto s = MetricSimplex::from_points(ddg::test::random_simplex_points(d, rng));
      double sum = 0.0;
      for (int v = 0; v <= d; ++v) {
        const int q[] = {v};
        const auto b = external_angle(s, q);
        EXPECT_TRUE(b.exact);
        EXPECT_GT(b.value, 0.0);
        sum += b.value;
      }
      EXPECT_NEAR(sum, 1.0, 1e-12);
    }
}

TEST(ExternalAngle, RightCornerTetrahedronOctant) {
  Eigen::MatrixXd p(3, 4);
  p << 0, 1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1;
  const int origin[] = {0};
  EXPECT_NEAR(external_angle(MetricSimplex::from_points(p), origin).value, 1.0 / 8.0, 1e-14);
}

TEST(ExternalAngle, RegularFourSimplexMonteCarlo) {
  const auto s = MetricSimplex::regular(4, 1.0);
  std::vector<EstimateWithError> parts;
  for (int v = 0; v < 5; ++v) {
    const int q[] = {v};
    const auto b = external_angle(s, q, {1'000'000, mix_seed(kDefaultSeed, v)});
    EXPECT_FALSE(b.exact);
    EXPECT_GT(b.std_error, 0.0);
    parts.push_back({b.value, b.std_error, 1'000'000, 0});
  }
  double sum = 0.0, var = 0.0;
  for (const auto& e : parts) {
    sum += e.mean;
    var += e.std_error * e.std_error;
  }
  EXPECT_LE(std::abs(sum - 1.0), 3.0 * std::sqrt(var));
}

TEST(ExternalAngle, DeterministicForFixedSeed) {
  const auto s = MetricSimplex::regular(4, 1.0);
  const int q[] = {2};
  const auto a = external_angle(s, q, {200'000, 17});
  const auto b = external_angle(s, q, {200'000, 17});
  EXPECT_EQ(a.value, b.value);
  EXPECT_EQ(a.std_error, b.std_error);
}

TEST(MonteCarlo, ShardMergeMatchesSinglePass) {
  SampleStats all, left, right;
  for (int i = 0; i < 1000; ++i) {
    const double x = std::sin(i * 0.37) * 3.0 + i * 1e-3;
    all.add(x);
    (i < 400 ? left : right).add(x);
  }
  left.merge(right);
  EXPECT_EQ(left.count, all.count);
  EXPECT_NEAR(left.mean, all.mean, 1e-13);
  EXPECT_NEAR(left.variance(), all.variance(), 1e-12);
}

TEST(MonteCarlo, SeedsAreMixed) {
  EXPECT_NE(mix_seed(1, 0), mix_seed(1, 1));
  EXPECT_NE(mix_seed(1, 0), mix_seed(2, 0));
  EXPECT_EQ(mix_seed(7, 3), mix_seed(7, 3));
}
