// Copyright 2026 The Kernpiler Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <catch2/catch.hpp>

#include "kernpiler/numerics.hpp"
#include "test_helpers.hpp"

using namespace kernpiler;
using testutil::kron;
using testutil::string_matrix;

namespace {

Matrix random_hermitian(std::mt19937& rng, Eigen::Index dim) {
  std::normal_distribution<double> g;
  Matrix a(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i)
    for (Eigen::Index j = 0; j < dim; ++j) a(i, j) = complexd(g(rng), g(rng));
  return (a + a.adjoint()) / 2.0;
}

}  // namespace

TEST_CASE("expm of Z and of zero time") {
  const double theta = 0.731;
  const Matrix u = expm_i_hermitian(string_matrix("Z"), theta);
  Matrix expected(2, 2);
  expected << std::exp(complexd(0, theta)), 0, 0, std::exp(complexd(0, -theta));
  CHECK((u - expected).norm() < 1e-12);

  std::mt19937 rng(3);
  const Matrix h = random_hermitian(rng, 4);
  CHECK((expm_i_hermitian(h, 0.0) - Matrix::Identity(4, 4)).norm() < 1e-12);
}

TEST_CASE("expm of X at pi/2 is iX") {
  const Matrix u = expm_i_hermitian(string_matrix("X"), M_PI / 2.0);
  CHECK((u - complexd(0, 1) * string_matrix("X")).norm() < 1e-12);
}

TEST_CASE("expm rejects non-Hermitian input") {
  Matrix m(2, 2);
  m << 0, 1, 0, 0;
  CHECK_THROWS_AS(expm_i_hermitian(m, 1.0), std::invalid_argument);
}

TEST_CASE("expm inverse and additivity") {
  std::mt19937 rng(17);
  for (int trial = 0; trial < 10; ++trial) {
    const Matrix h = random_hermitian(rng, 8);
    const double t1 = 0.3 + 0.1 * trial;
    const double t2 = -0.7 + 0.05 * trial;
    const Matrix u1 = expm_i_hermitian(h, t1);
    const Matrix identity = Matrix::Identity(8, 8);
    CHECK((u1 * expm_i_hermitian(h, -t1) - identity).norm() < 1e-10);
    CHECK((u1 * expm_i_hermitian(h, t2) - expm_i_hermitian(h, t1 + t2)).norm() < 1e-10);
    CHECK((u1 * u1.adjoint() - identity).norm() < 1e-10);  // unitary
  }
}

TEST_CASE("norm basics") {
  const Matrix identity = Matrix::Identity(4, 4);
  CHECK(spectral_norm(identity) == Approx(1.0).margin(1e-12));
  CHECK(frobenius_norm(identity) == Approx(2.0).margin(1e-12));
  CHECK(spectral_norm(Matrix::Zero(3, 3)) == 0.0);
  CHECK(frobenius_norm(Matrix::Zero(3, 3)) == 0.0);

  std::mt19937 rng(5);
  std::normal_distribution<double> g;
  Eigen::VectorXcd u(6), v(6);
  for (int i = 0; i < 6; ++i) {
    u(i) = complexd(g(rng), g(rng));
    v(i) = complexd(g(rng), g(rng));
  }
  u.normalize();
  v.normalize();
  const Matrix outer = u * v.adjoint();
  CHECK(spectral_norm(outer) == Approx(1.0).margin(1e-10));
  CHECK(frobenius_norm(outer) == Approx(1.0).margin(1e-10));
}

TEST_CASE("spectral norm is unitarily invariant and below frobenius") {
  std::mt19937 rng(31);
  for (Eigen::Index dim : {6, 16}) {
    const Matrix m = testutil::random_unitary(rng, dim) * random_hermitian(rng, dim);
    const Matrix u = testutil::random_unitary(rng, dim);
    const Matrix v = testutil::random_unitary(rng, dim);
    CHECK(spectral_norm(u * m * v) == Approx(spectral_norm(m)).margin(1e-10));
    CHECK(spectral_norm(m) <= frobenius_norm(m) + 1e-12);
  }
}

TEST_CASE("power-iteration path agrees with the SVD path") {
  std::mt19937 rng(92);
  const Matrix m = random_hermitian(rng, 300);
  Eigen::JacobiSVD<Matrix> svd(m);
  CHECK(spectral_norm(m) == Approx(svd.singularValues()(0)).epsilon(1e-9));
}

TEST_CASE("embed places factors per the qubit-order convention") {
  const Matrix x = string_matrix("X");
  SECTION("X on qubit 0 of 2") {
    const std::vector<int> support = {0};
    CHECK((embed(x, support, 2) - string_matrix("XI")).norm() < 1e-15);
  }
  SECTION("X on qubit 1 of 2") {
    const std::vector<int> support = {1};
    CHECK((embed(x, support, 2) - string_matrix("IX")).norm() < 1e-15);
  }
  SECTION("full support is the identity embedding") {
    std::mt19937 rng(8);
    const Matrix u = testutil::random_unitary(rng, 8);
    const std::vector<int> support = {0, 1, 2};
    CHECK((embed(u, support, 3) - u).norm() < 1e-15);
  }
  SECTION("XX on qubits {0,2} of 3") {
    const Matrix xx = kron(x, x);
    const std::vector<int> support = {0, 2};
    CHECK((embed(xx, support, 3) - string_matrix("XIX")).norm() < 1e-15);
  }
  SECTION("unsorted support is rejected") {
    const Matrix xx = kron(x, x);
    const std::vector<int> support = {2, 0};
    CHECK_THROWS_AS(embed(xx, support, 3), std::invalid_argument);
  }
}

TEST_CASE("apply_block_inplace equals multiplication by the embedding") {
  std::mt19937 rng(44);
  for (int trial = 0; trial < 10; ++trial) {
    const int n = 4;
    const Matrix u = testutil::random_unitary(rng, 4);
    std::vector<int> support = {static_cast<int>(rng() % 3)};
    support.push_back(support[0] + 1 + static_cast<int>(rng() % static_cast<unsigned>(n - support[0] - 1)));
    Matrix state = testutil::random_unitary(rng, 1 << n);
    const Matrix expected = embed(u, support, n) * state;
    apply_block_inplace(state, u, support, n);
    CHECK((state - expected).norm() < 1e-12);
  }
}

TEST_CASE("phase alignment") {
  std::mt19937 rng(66);
  const Matrix u = testutil::random_unitary(rng, 8);
  const Matrix rotated = std::exp(complexd(0, 1.234)) * u;
  CHECK(phase_aligned_frobenius(rotated, u) < 1e-12);
  CHECK(phase_aligned_spectral(rotated, u) < 1e-12);
  const Matrix other = testutil::random_unitary(rng, 8);
  CHECK(phase_aligned_frobenius(u, other) <= (u - other).norm() + 1e-12);
}

TEST_CASE("damped least squares solves a linear system in one accepted step") {
  Eigen::MatrixXd a(4, 2);
  a << 1, 2, 3, 4, 5, 6, 7, 9;
  Eigen::VectorXd b(4);
  b << 1, -1, 2, 0.5;
  const Eigen::VectorXd solution = (a.transpose() * a).ldlt().solve(a.transpose() * b);
  auto residual = [&](const Eigen::VectorXd& theta) -> Eigen::VectorXd { return a * theta - b; };
  auto jacobian = [&](const Eigen::VectorXd&) -> Eigen::MatrixXd { return a; };
  const auto result = damped_least_squares(residual, jacobian, Eigen::VectorXd::Zero(2));
  CHECK(result.ok);
  CHECK((result.params - solution).norm() < 1e-10);
  CHECK(result.iterations <= 2);
}

TEST_CASE("damped least squares converges on a Rosenbrock-style residual") {
  // r = (1 - x, 10 (y - x^2)); minimum at (1, 1) with zero residual.
  auto residual = [](const Eigen::VectorXd& theta) -> Eigen::VectorXd {
    Eigen::VectorXd r(2);
    r(0) = 1.0 - theta(0);
    r(1) = 10.0 * (theta(1) - theta(0) * theta(0));
    return r;
  };
  auto jacobian = [](const Eigen::VectorXd& theta) -> Eigen::MatrixXd {
    Eigen::MatrixXd j(2, 2);
    j << -1, 0, -20 * theta(0), 10;
    return j;
  };
  Eigen::VectorXd start(2);
  start << -1.2, 1.0;
  const auto result = damped_least_squares(residual, jacobian, start);
  CHECK(result.ok);
  CHECK(result.residual_norm < 1e-8);
  CHECK((result.params - Eigen::VectorXd::Ones(2)).norm() < 1e-6);
}

TEST_CASE("damped least squares edge cases") {
  SECTION("zero parameters returns the initial norm") {
    auto residual = [](const Eigen::VectorXd&) -> Eigen::VectorXd {
      Eigen::VectorXd r(1);
      r(0) = 3.0;
      return r;
    };
    auto jacobian = [](const Eigen::VectorXd&) -> Eigen::MatrixXd {
      return Eigen::MatrixXd(1, 0);
    };
    const auto result = damped_least_squares(residual, jacobian, Eigen::VectorXd());
    CHECK(result.ok);
    CHECK(result.residual_norm == Approx(3.0));
  }
  SECTION("non-finite residual aborts with a diagnostic") {
    auto residual = [](const Eigen::VectorXd&) -> Eigen::VectorXd {
      Eigen::VectorXd r(1);
      r(0) = std::numeric_limits<double>::quiet_NaN();
      return r;
    };
    auto jacobian = [](const Eigen::VectorXd&) -> Eigen::MatrixXd {
      return Eigen::MatrixXd::Ones(1, 1);
    };
    const auto result = damped_least_squares(residual, jacobian, Eigen::VectorXd::Zero(1));
    CHECK_FALSE(result.ok);
    CHECK_FALSE(result.message.empty());
  }
}
