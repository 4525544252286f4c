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
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "kernpiler/circuit.hpp"
#include "kernpiler/numerics.hpp"

namespace kernpiler {

/// A fixed CNOT skeleton with parameterized u3 slots: one u3 per qubit before
/// the first CNOT, then one u3 on each qubit a CNOT touches.  Slot order is
/// application order; each u3 slot owns three consecutive parameters.
struct CircuitTemplate {
  struct Slot {
    bool is_cnot = false;
    int a = 0;  // u3 qubit, or cnot control
    int b = 0;  // cnot target
  };

  int k = 0;
  std::vector<Slot> slots;
  int u3_slots = 0;

  int param_count() const { return 3 * u3_slots; }
};

/// Full-interleave template: u3 on every qubit, then for each skeleton CNOT
/// the CNOT followed by a u3 on its control and target.
inline CircuitTemplate interleaved_template(int k, std::span<const std::pair<int, int>> cnots) {
  CircuitTemplate t;
  t.k = k;
  for (int q = 0; q < k; ++q) t.slots.push_back({false, q, 0});
  t.u3_slots = k;
  for (const auto& [c, tq] : cnots) {
    if (c == tq || c < 0 || tq < 0 || c >= k || tq >= k)
      throw std::invalid_argument("interleaved_template: bad cnot qubits");
    t.slots.push_back({true, c, tq});
    t.slots.push_back({false, c, 0});
    t.slots.push_back({false, tq, 0});
    t.u3_slots += 2;
  }
  return t;
}

/// Instantiates the template at a parameter vector.
inline Circuit realize(const CircuitTemplate& t, const Eigen::VectorXd& params) {
  if (params.size() != t.param_count())
    throw std::invalid_argument("realize: wrong parameter count");
  Circuit c(t.k);
  Eigen::Index p = 0;
  for (const auto& slot : t.slots) {
    if (slot.is_cnot) {
      c.push(Gate::cnot(slot.a, slot.b));
    } else {
      c.push(Gate::u3(slot.a, params(p), params(p + 1), params(p + 2)));
      p += 3;
    }
  }
  return c;
}

namespace detail {

/// d(u3)/d(theta|phi|lambda) as 2x2 matrices; index 0..2.
inline Eigen::Matrix2cd u3_derivative(double theta, double phi, double lambda, int which) {
  const double c = std::cos(theta / 2.0);
  const double s = std::sin(theta / 2.0);
  const complexd el = std::exp(complexd(0.0, lambda));
  const complexd ep = std::exp(complexd(0.0, phi));
  const complexd epl = std::exp(complexd(0.0, phi + lambda));
  Eigen::Matrix2cd d = Eigen::Matrix2cd::Zero();
  switch (which) {
    case 0:
      d(0, 0) = -s / 2.0;
      d(0, 1) = -el * (c / 2.0);
      d(1, 0) = ep * (c / 2.0);
      d(1, 1) = epl * (-s / 2.0);
      break;
    case 1:
      d(1, 0) = complexd(0.0, 1.0) * ep * s;
      d(1, 1) = complexd(0.0, 1.0) * epl * c;
      break;
    case 2:
      d(0, 1) = complexd(0.0, -1.0) * el * s;
      d(1, 1) = complexd(0.0, 1.0) * epl * c;
      break;
    default:
      throw std::invalid_argument("u3_derivative: index out of range");
  }
  return d;
}

/// Evaluation state shared by residual and Jacobian: per-slot prefix and
/// suffix products of the embedded gate matrices.
struct TemplateEval {
  std::vector<Matrix> prefix;  // prefix[i] = G_{i-1} ... G_0
  std::vector<Matrix> suffix;  // suffix[i] = G_{L-1} ... G_{i+1}
  Matrix total;                // G_{L-1} ... G_0

  void compute(const CircuitTemplate& t, const Eigen::VectorXd& params,
               bool with_suffix = true) {
    const std::size_t count = t.slots.size();
    const Eigen::Index dim = Eigen::Index(1) << t.k;
    std::vector<Matrix> gates(count);
    Eigen::Index p = 0;
    for (std::size_t i = 0; i < count; ++i) {
      Matrix g = Matrix::Identity(dim, dim);
      if (t.slots[i].is_cnot) {
        apply_cnot_inplace(g, t.slots[i].a, t.slots[i].b, t.k);
      } else {
        apply_single_qubit_inplace(g, u3_matrix(params(p), params(p + 1), params(p + 2)),
                                   t.slots[i].a, t.k);
        p += 3;
      }
      gates[i] = std::move(g);
    }
    prefix.assign(count + 1, Matrix());
    prefix[0] = Matrix::Identity(dim, dim);
    for (std::size_t i = 0; i < count; ++i) prefix[i + 1] = gates[i] * prefix[i];
    total = prefix[count];
    if (with_suffix) {
      suffix.assign(count + 1, Matrix());
      suffix[count] = Matrix::Identity(dim, dim);
      for (std::size_t i = count; i-- > 0;) suffix[i] = suffix[i + 1] * gates[i];
    }
  }
};

inline Eigen::VectorXd stack_reim(const Matrix& m) {
  const Eigen::Index entries = m.size();
  Eigen::VectorXd v(2 * entries);
  const complexd* data = m.data();
  for (Eigen::Index i = 0; i < entries; ++i) {
    v(2 * i) = data[i].real();
    v(2 * i + 1) = data[i].imag();
  }
  return v;
}

}  // namespace detail

struct FitOptions {
  int max_iterations = 200;
  double target_error = 1e-10;
  bool fd_jacobian = false;
  int stall_window = 0;  // forwarded to the least-squares driver
  double stall_tolerance = 1e-4;
  double stall_floor = 0.0;
};

struct FitOutcome {
  Eigen::VectorXd params;
  double error = std::numeric_limits<double>::infinity();
  bool ok = false;
};

/// Residual of the phase-aligned difference C(theta) e^{i alpha} - U at fixed
/// alpha, stacked real/imaginary entries.
inline Eigen::VectorXd template_residual(const CircuitTemplate& t, const Matrix& target,
                                         const Eigen::VectorXd& params, double alpha) {
  detail::TemplateEval eval;
  eval.compute(t, params, /*with_suffix=*/false);
  return detail::stack_reim(eval.total * std::exp(complexd(0.0, alpha)) - target);
}

/// Jacobian of template_residual at fixed alpha: analytic per-parameter u3
/// derivatives threaded through prefix/suffix products, or central finite
/// differences of the fixed-phase residual (the two are cross-validated in
/// tests).
inline Eigen::MatrixXd template_jacobian(const CircuitTemplate& t, const Matrix& target,
                                         const Eigen::VectorXd& params, double alpha,
                                         bool fd = false) {
  Eigen::MatrixXd j(2 * target.size(), params.size());
  if (fd) {
    const double h = 1e-6;
    Eigen::VectorXd probe = params;
    for (Eigen::Index p = 0; p < params.size(); ++p) {
      probe(p) = params(p) + h;
      const Eigen::VectorXd hi = template_residual(t, target, probe, alpha);
      probe(p) = params(p) - h;
      const Eigen::VectorXd lo = template_residual(t, target, probe, alpha);
      probe(p) = params(p);
      j.col(p) = (hi - lo) / (2.0 * h);
    }
    return j;
  }
  detail::TemplateEval eval;
  eval.compute(t, params);
  const complexd phase = std::exp(complexd(0.0, alpha));
  Eigen::Index p = 0;
  for (std::size_t i = 0; i < t.slots.size(); ++i) {
    if (t.slots[i].is_cnot) continue;
    for (int which = 0; which < 3; ++which) {
      Matrix d = eval.prefix[i];
      apply_single_qubit_inplace(
          d, detail::u3_derivative(params(p), params(p + 1), params(p + 2), which),
          t.slots[i].a, t.k);
      j.col(p + which) = detail::stack_reim((eval.suffix[i + 1] * d) * phase);
    }
    p += 3;
  }
  return j;
}

/// Minimizes min_alpha ||C(theta) e^{i alpha} - U||_F over theta.  The global
/// phase is eliminated analytically at every evaluation
/// (alpha = arg tr(C^H U)); the Jacobian holds it fixed, analytically by
/// default or by central differences when opts.fd_jacobian is set.
inline FitOutcome gauss_newton_fit(const CircuitTemplate& t, const Matrix& target,
                                   const Eigen::VectorXd& init, const FitOptions& opts = {}) {
  if ((Eigen::Index(1) << t.k) != target.rows() || target.rows() != target.cols())
    throw std::invalid_argument("gauss_newton_fit: target dimension mismatch");

  auto residual = [&](const Eigen::VectorXd& params) -> Eigen::VectorXd {
    detail::TemplateEval eval;
    eval.compute(t, params, /*with_suffix=*/false);
    const double alpha = align_phase(eval.total, target);
    return detail::stack_reim(eval.total * std::exp(complexd(0.0, alpha)) - target);
  };

  auto jacobian = [&](const Eigen::VectorXd& params) -> Eigen::MatrixXd {
    detail::TemplateEval eval;
    eval.compute(t, params, /*with_suffix=*/false);
    const double alpha = align_phase(eval.total, target);
    return template_jacobian(t, target, params, alpha, opts.fd_jacobian);
  };

  LeastSquaresOptions ls;
  ls.max_iterations = opts.max_iterations;
  ls.target_residual = opts.target_error;
  ls.stall_window = opts.stall_window;
  ls.stall_tolerance = opts.stall_tolerance;
  ls.stall_floor = opts.stall_floor;
  const LeastSquaresResult result = damped_least_squares(residual, jacobian, init, ls);
  FitOutcome outcome;
  outcome.params = result.params;
  outcome.error = result.residual_norm;
  outcome.ok = result.ok && std::isfinite(result.residual_norm);
  return outcome;
}

}  // namespace kernpiler
