#include <doctest.h>

#include <Eigen/Dense>
#include <random>

#include "sparse_lu.hpp"

using floodsp::lp::SparseLu;

namespace {

struct Csc {
  std::vector<int> start, index;
  std::vector<double> value;
};

Csc to_csc(const Eigen::MatrixXd& a) {
  Csc c;
  c.start.push_back(0);
  for (int j = 0; j < a.cols(); ++j) {
    for (int i = 0; i < a.rows(); ++i) {
      if (a(i, j) != 0.0) {
        c.index.push_back(i);
        c.value.push_back(a(i, j));
      }
    }
    c.start.push_back(static_cast<int>(c.index.size()));
  }
  return c;
}

// Sparse, diagonally weighted but row/column permuted, like a simplex basis.
Eigen::MatrixXd random_basis(std::mt19937_64& rng, int m) {
  std::uniform_real_distribution<double> v(-2.0, 2.0);
  std::uniform_int_distribution<int> coin(0, 9);
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(m, m);
  std::vector<int> perm(static_cast<size_t>(m));
  for (int i = 0; i < m; ++i) perm[static_cast<size_t>(i)] = i;
  std::shuffle(perm.begin(), perm.end(), rng);
  for (int j = 0; j < m; ++j) {
    a(perm[static_cast<size_t>(j)], j) = 3.0 + v(rng);
    for (int i = 0; i < m; ++i) {
      if (coin(rng) == 0) a(i, j) += v(rng);
    }
  }
  return a;
}

}  // namespace

TEST_CASE("sparse LU solves match dense LU") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> v(-1.0, 1.0);
  for (int trial = 0; trial < 60; ++trial) {
    const int m = 1 + trial % 30;
    const Eigen::MatrixXd a = random_basis(rng, m);
    if (std::abs(a.determinant()) < 1e-6) continue;
    const auto c = to_csc(a);
    SparseLu lu;
    REQUIRE(lu.factorize(m, c.start, c.index, c.value));
    Eigen::VectorXd b(m);
    for (int i = 0; i < m; ++i) b[i] = trial % 3 == 0 && i != m / 2 ? 0.0 : v(rng);
    Eigen::VectorXd x = b;
    lu.solve(x.data());
    CHECK((a * x - b).norm() <= 1e-10 * (1.0 + b.norm()));
    Eigen::VectorXd y = b;
    lu.solve_transpose(y.data());
    CHECK((a.transpose() * y - b).norm() <= 1e-10 * (1.0 + b.norm()));
    CHECK((x - a.partialPivLu().solve(b)).norm() <= 1e-9 * (1.0 + x.norm()));
  }
}

TEST_CASE("singular matrices are reported") {
  Eigen::MatrixXd a(3, 3);
  a << 1, 2, 0, 2, 4, 0, 0, 0, 1;
  const auto c = to_csc(a);
  SparseLu lu;
  CHECK_FALSE(lu.factorize(3, c.start, c.index, c.value));
  Eigen::MatrixXd z = Eigen::MatrixXd::Zero(2, 2);
  z(0, 0) = 1.0;
  const auto cz = to_csc(z);
  CHECK_FALSE(lu.factorize(2, cz.start, cz.index, cz.value));
}
