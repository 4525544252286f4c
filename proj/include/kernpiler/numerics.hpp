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

#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "kernpiler/pauli.hpp"

namespace kernpiler {

inline bool is_power_of_two(Eigen::Index d) { return d > 0 && (d & (d - 1)) == 0; }

inline int log2_dim(Eigen::Index d) {
  if (!is_power_of_two(d)) throw std::invalid_argument("matrix dimension is not a power of two");
  int k = 0;
  while ((Eigen::Index(1) << k) < d) ++k;
  return k;
}

inline double frobenius_norm(const Matrix& m) { return m.norm(); }

/// Largest singular value.  Exact SVD up to dim 256; above that a Lanczos
/// iteration on M^H M with full reorthogonalization and a deterministic start
/// vector, whose extremal Ritz value is machine-accurate at the Krylov sizes
/// used here.
inline double spectral_norm(const Matrix& m) {
  if (m.rows() == 0 || m.cols() == 0) return 0.0;
  if (m.rows() <= 256 && m.cols() <= 256) {
    Eigen::JacobiSVD<Matrix> svd(m);
    return svd.singularValues()(0);
  }
  const Eigen::Index dim = m.cols();
  const int krylov = static_cast<int>(std::min<Eigen::Index>(dim, 128));
  Eigen::VectorXcd v = Eigen::VectorXcd::Ones(dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    v(i) += complexd(1e-3 * std::cos(0.7 * static_cast<double>(i)),
                     1e-3 * std::sin(1.3 * static_cast<double>(i)));
  }
  v.normalize();
  const double scale = m.cwiseAbs().maxCoeff();
  if (scale == 0.0) return 0.0;
  Eigen::MatrixXcd basis(dim, krylov);
  Eigen::VectorXd alpha = Eigen::VectorXd::Zero(krylov);
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(krylov);
  basis.col(0) = v;
  int steps = 0;
  for (int j = 0; j < krylov; ++j) {
    Eigen::VectorXcd w = m.adjoint() * (m * basis.col(j));
    alpha(j) = w.dot(basis.col(j)).real();
    steps = j + 1;
    if (j + 1 == krylov) break;
    w -= alpha(j) * basis.col(j);
    if (j > 0) w -= beta(j - 1) * basis.col(j - 1);
    // Full reorthogonalization, twice.
    for (int pass = 0; pass < 2; ++pass) {
      for (int i = 0; i <= j; ++i) w -= basis.col(i).dot(w) * basis.col(i);
    }
    beta(j) = w.norm();
    if (beta(j) <= 1e-14 * scale * scale) break;  // invariant subspace reached
    basis.col(j + 1) = w / beta(j);
  }
  Eigen::MatrixXd tri = Eigen::MatrixXd::Zero(steps, steps);
  for (int j = 0; j < steps; ++j) {
    tri(j, j) = alpha(j);
    if (j + 1 < steps) tri(j, j + 1) = tri(j + 1, j) = beta(j);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(tri);
  const double top = es.eigenvalues().maxCoeff();
  return std::sqrt(std::max(top, 0.0));
}

/// exp(i t H) for Hermitian H via eigendecomposition: V diag(e^{i t l}) V^H.
inline Matrix expm_i_hermitian(const Matrix& h, double t) {
  if (h.rows() != h.cols()) throw std::invalid_argument("expm_i_hermitian: matrix not square");
  if ((h - h.adjoint()).norm() >= 1e-10)
    throw std::invalid_argument("expm_i_hermitian: input is not Hermitian");
  Eigen::SelfAdjointEigenSolver<Matrix> es(h);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("expm_i_hermitian: eigendecomposition failed");
  const Eigen::VectorXd& evals = es.eigenvalues();
  Eigen::VectorXcd phases(evals.size());
  for (Eigen::Index i = 0; i < evals.size(); ++i) {
    phases(i) = std::exp(complexd(0.0, t * evals(i)));
  }
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

/// U (on the ascending-sorted qubit set `support`) tensor identity on the
/// rest, placed per the project qubit-order convention (qubit 0 = leftmost
/// factor = most significant index bit).
inline Matrix embed(const Matrix& u, std::span<const int> support, int n) {
  if (n > kDenseQubitLimit) throw std::invalid_argument("embed: n exceeds the dense limit");
  const int k = static_cast<int>(support.size());
  if ((Eigen::Index(1) << k) != u.rows() || u.rows() != u.cols())
    throw std::invalid_argument("embed: dimension does not match support size");
  for (int j = 0; j + 1 < k; ++j) {
    if (support[static_cast<std::size_t>(j)] >= support[static_cast<std::size_t>(j) + 1])
      throw std::invalid_argument("embed: support must be ascending");
  }
  for (int j = 0; j < k; ++j) {
    const int q = support[static_cast<std::size_t>(j)];
    if (q < 0 || q >= n) throw std::invalid_argument("embed: support index out of range");
  }
  const std::size_t dim = std::size_t(1) << n;
  // Bit masks of the support positions within an n-bit index.
  std::vector<std::size_t> support_bit(static_cast<std::size_t>(k));
  for (int j = 0; j < k; ++j) {
    support_bit[static_cast<std::size_t>(j)] =
        std::size_t(1) << (n - 1 - support[static_cast<std::size_t>(j)]);
  }
  std::size_t rest_mask = dim - 1;
  for (std::size_t b : support_bit) rest_mask &= ~b;
  Matrix out = Matrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  // Enumerate the identity-part indices by iterating subsets of rest_mask.
  std::size_t rest = 0;
  while (true) {
    for (int rs = 0; rs < (1 << k); ++rs) {
      std::size_t row = rest;
      for (int j = 0; j < k; ++j)
        if ((rs >> (k - 1 - j)) & 1) row |= support_bit[static_cast<std::size_t>(j)];
      for (int cs = 0; cs < (1 << k); ++cs) {
        const complexd value = u(rs, cs);
        if (value == complexd(0.0, 0.0)) continue;
        std::size_t col = rest;
        for (int j = 0; j < k; ++j)
          if ((cs >> (k - 1 - j)) & 1) col |= support_bit[static_cast<std::size_t>(j)];
        out(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col)) = value;
      }
    }
    if (rest == rest_mask) break;
    rest = (rest - rest_mask) & rest_mask;  // next subset of rest_mask
  }
  return out;
}

inline Matrix embed(const Matrix& u, const std::vector<int>& support, int n) {
  return embed(u, std::span<const int>(support), n);
}

/// m <- (U tensor I) * m where U acts on the sorted qubit set `support` of an
/// n-qubit operator m.  Cost O(4^n * 2^k), far cheaper than a full product.
inline void apply_block_inplace(Matrix& m, const Matrix& u,
                                std::span<const int> support, int n) {
  const int k = static_cast<int>(support.size());
  if ((Eigen::Index(1) << k) != u.rows() || u.rows() != u.cols())
    throw std::invalid_argument("apply_block_inplace: dimension mismatch");
  const std::size_t dim = std::size_t(1) << n;
  if (m.rows() != static_cast<Eigen::Index>(dim))
    throw std::invalid_argument("apply_block_inplace: operand dimension mismatch");
  std::vector<std::size_t> support_bit(static_cast<std::size_t>(k));
  for (int j = 0; j < k; ++j) {
    const int q = support[static_cast<std::size_t>(j)];
    if (q < 0 || q >= n) throw std::invalid_argument("apply_block_inplace: support out of range");
    support_bit[static_cast<std::size_t>(j)] = std::size_t(1) << (n - 1 - q);
  }
  std::size_t rest_mask = dim - 1;
  for (std::size_t b : support_bit) rest_mask &= ~b;
  const int sub = 1 << k;
  std::vector<std::size_t> rows(static_cast<std::size_t>(sub));
  std::vector<complexd> scratch(static_cast<std::size_t>(sub));
  for (Eigen::Index col = 0; col < m.cols(); ++col) {
    complexd* data = m.col(col).data();
    std::size_t rest = 0;
    while (true) {
      for (int rs = 0; rs < sub; ++rs) {
        std::size_t row = rest;
        for (int j = 0; j < k; ++j)
          if ((rs >> (k - 1 - j)) & 1) row |= support_bit[static_cast<std::size_t>(j)];
        rows[static_cast<std::size_t>(rs)] = row;
      }
      for (int rs = 0; rs < sub; ++rs) {
        complexd acc(0.0, 0.0);
        for (int cs = 0; cs < sub; ++cs) acc += u(rs, cs) * data[rows[static_cast<std::size_t>(cs)]];
        scratch[static_cast<std::size_t>(rs)] = acc;
      }
      for (int rs = 0; rs < sub; ++rs) data[rows[static_cast<std::size_t>(rs)]] = scratch[static_cast<std::size_t>(rs)];
      if (rest == rest_mask) break;
      rest = (rest - rest_mask) & rest_mask;
    }
  }
}

/// Phase alignment: alpha minimizing ||A e^{i alpha} - B||_F, i.e. the
/// argument of tr(A^H B).
inline double align_phase(const Matrix& a, const Matrix& b) {
  const complexd s = (a.adjoint() * b).trace();
  if (std::abs(s) == 0.0) return 0.0;
  return std::arg(s);
}

inline double phase_aligned_frobenius(const Matrix& a, const Matrix& b) {
  const double alpha = align_phase(a, b);
  return (a * std::exp(complexd(0.0, alpha)) - b).norm();
}

inline double phase_aligned_spectral(const Matrix& a, const Matrix& b) {
  const double alpha = align_phase(a, b);
  return spectral_norm(a * std::exp(complexd(0.0, alpha)) - b);
}

// ---------------------------------------------------------------------------
// Damped (Levenberg) Gauss-Newton least squares.
// ---------------------------------------------------------------------------

struct LeastSquaresOptions {
  int max_iterations = 200;
  double target_residual = 0.0;   // stop when ||r|| <= target
  double step_tolerance = 1e-12;  // stop when ||step|| < tolerance
  double max_damping = 1e12;
  int stall_window = 0;           // > 0: stop when the residual improved by less
  double stall_tolerance = 1e-4;  // than this factor over the last window iterations
  double stall_floor = 0.0;       // stall cutoff only applies while ||r|| > floor
};

struct LeastSquaresResult {
  Eigen::VectorXd params;
  double residual_norm = 0.0;
  int iterations = 0;
  bool ok = true;
  std::string message;
};

/// Minimizes ||r(theta)||_2 by Gauss-Newton steps (J^T J + mu I) d = -J^T r.
///
/// mu starts at zero (pure Gauss-Newton; a linear residual solves in one
/// accepted step) and is adapted multiplicatively: x10 on a rejected or
/// non-finite step, /10 on an accepted one.
inline LeastSquaresResult damped_least_squares(
    const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& residual,
    const std::function<Eigen::MatrixXd(const Eigen::VectorXd&)>& jacobian,
    Eigen::VectorXd theta, const LeastSquaresOptions& opts = {}) {
  LeastSquaresResult result;
  Eigen::VectorXd r = residual(theta);
  if (!r.allFinite()) {
    result.params = theta;
    result.ok = false;
    result.message = "non-finite residual at the initial point";
    result.residual_norm = std::numeric_limits<double>::infinity();
    return result;
  }
  double rnorm = r.norm();
  if (theta.size() == 0) {
    result.params = theta;
    result.residual_norm = rnorm;
    return result;
  }
  double mu = 0.0;
  double window_reference = rnorm;
  for (int iter = 0; iter < opts.max_iterations; ++iter) {
    result.iterations = iter;
    if (rnorm <= opts.target_residual) break;
    if (opts.stall_window > 0 && rnorm > opts.stall_floor && iter > 0 &&
        iter % opts.stall_window == 0) {
      if (rnorm > window_reference * (1.0 - opts.stall_tolerance)) break;
      window_reference = rnorm;
    }
    const Eigen::MatrixXd j = jacobian(theta);
    Eigen::MatrixXd jtj = Eigen::MatrixXd::Zero(theta.size(), theta.size());
    jtj.selfadjointView<Eigen::Lower>().rankUpdate(j.transpose());
    jtj.triangularView<Eigen::StrictlyUpper>() = jtj.transpose();
    const Eigen::VectorXd g = j.transpose() * r;
    bool accepted = false;
    double step_norm = 0.0;
    while (!accepted) {
      Eigen::MatrixXd a = jtj;
      if (mu > 0.0) a.diagonal().array() += mu;
      const Eigen::VectorXd step = a.ldlt().solve(-g);
      step_norm = step.norm();
      bool usable = step.allFinite();
      Eigen::VectorXd trial;
      Eigen::VectorXd r_trial;
      double trial_norm = std::numeric_limits<double>::infinity();
      if (usable) {
        trial = theta + step;
        r_trial = residual(trial);
        usable = r_trial.allFinite();
        if (usable) trial_norm = r_trial.norm();
      }
      if (usable && trial_norm < rnorm) {
        theta = trial;
        r = r_trial;
        rnorm = trial_norm;
        mu = (mu == 0.0) ? 0.0 : mu / 10.0;
        if (mu < 1e-12) mu = 0.0;
        accepted = true;
      } else {
        mu = (mu == 0.0) ? 1e-6 : mu * 10.0;
        if (mu > opts.max_damping) {
          result.params = theta;
          result.residual_norm = rnorm;
          result.message = "damping limit reached";
          return result;
        }
      }
    }
    if (step_norm < opts.step_tolerance) break;
  }
  result.params = theta;
  result.residual_norm = rnorm;
  return result;
}

}  // namespace kernpiler
