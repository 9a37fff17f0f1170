#pragma once

#include <random>
#include <string>
#include <vector>

#include "ddg/core.hpp"
#include "ddg/geom_core.hpp"

namespace ddg::test {

inline std::string data_path(const std::string& name) { return std::string(DDG_DATA_DIR) + "/" + name; }

/// A random non-degenerate simplex given by its vertex coordinates (d x (d+1)).
inline Eigen::MatrixXd random_simplex_points(int d, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  while (true) {
    Eigen::MatrixXd p(d, d + 1);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j <= d; ++j) p(i, j) = normal(rng);
    Eigen::MatrixXd e(d, d);
    for (int j = 0; j < d; ++j) e.col(j) = p.col(j + 1) - p.col(0);
    if (std::abs(e.determinant()) > 0.05) return p;
  }
}

/// Regular tetrahedron (edge 2 sqrt 2) with each coordinate jittered by up to 0.4: random
/// shapes with bounded aspect ratio.
inline Eigen::MatrixXd random_tetrahedron_points(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-0.4, 0.4);
  Eigen::MatrixXd p(3, 4);
  p << 1, -1, -1, 1, 1, -1, 1, -1, 1, 1, -1, -1;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 4; ++j) p(i, j) += u(rng);
  return p;
}

template <class F>
void expect_error(ErrorKind kind, F&& f) {
  try {
    f();
    ADD_FAILURE() << "expected " << to_string(kind) << " but nothing was thrown";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), kind) << e.what();
  }
}

}  // namespace ddg::test
