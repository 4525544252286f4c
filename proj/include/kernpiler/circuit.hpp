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
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "kernpiler/numerics.hpp"

namespace kernpiler {

/// Gates of the target set: CNOT and the parameterized single-qubit u3.
///
/// u3(theta, phi, lambda) uses the standard convention with
/// det = e^{i(phi+lambda)}:
///
///   [ cos(theta/2)              -e^{i lambda} sin(theta/2)      ]
///   [ e^{i phi} sin(theta/2)     e^{i(phi+lambda)} cos(theta/2) ]
struct Gate {
  enum class Kind { Cnot, U3 } kind = Kind::U3;
  int q0 = 0;  // u3: target qubit; cnot: control
  int q1 = 0;  // cnot: target
  double theta = 0.0, phi = 0.0, lambda = 0.0;

  static Gate cnot(int control, int target) {
    if (control == target) throw std::invalid_argument("cnot: control equals target");
    Gate g;
    g.kind = Kind::Cnot;
    g.q0 = control;
    g.q1 = target;
    return g;
  }

  static Gate u3(int qubit, double theta, double phi, double lambda) {
    if (!std::isfinite(theta) || !std::isfinite(phi) || !std::isfinite(lambda))
      throw std::invalid_argument("u3: non-finite angle");
    Gate g;
    g.kind = Kind::U3;
    g.q0 = qubit;
    g.theta = theta;
    g.phi = phi;
    g.lambda = lambda;
    return g;
  }
};

inline Eigen::Matrix2cd u3_matrix(double theta, double phi, double lambda) {
  const double c = std::cos(theta / 2.0);
  const double s = std::sin(theta / 2.0);
  Eigen::Matrix2cd m;
  m(0, 0) = c;
  m(0, 1) = -std::exp(complexd(0.0, lambda)) * s;
  m(1, 0) = std::exp(complexd(0.0, phi)) * s;
  m(1, 1) = std::exp(complexd(0.0, phi + lambda)) * c;
  return m;
}

/// Ordered gate list; gates[0] is applied first.  The realized matrix carries
/// e^{i global_phase} so that circuit identities can be checked exactly
/// instead of only up to phase.
struct Circuit {
  int n = 0;
  std::vector<Gate> gates;
  double global_phase = 0.0;

  Circuit() = default;
  explicit Circuit(int qubits) : n(qubits) {}

  void push(const Gate& g) {
    const int hi = g.kind == Gate::Kind::Cnot ? std::max(g.q0, g.q1) : g.q0;
    const int lo = g.kind == Gate::Kind::Cnot ? std::min(g.q0, g.q1) : g.q0;
    if (lo < 0 || hi >= n) throw std::invalid_argument("circuit: gate qubit out of range");
    gates.push_back(g);
  }

  /// Appends `other` with its qubit j mapped to qubit_map[j].
  void append_mapped(const Circuit& other, std::span<const int> qubit_map) {
    for (const Gate& g : other.gates) {
      Gate mapped = g;
      mapped.q0 = qubit_map[static_cast<std::size_t>(g.q0)];
      if (g.kind == Gate::Kind::Cnot) mapped.q1 = qubit_map[static_cast<std::size_t>(g.q1)];
      push(mapped);
    }
    global_phase += other.global_phase;
  }
};

struct CircuitMetrics {
  long cnot_count = 0;
  long u3_count = 0;
  int depth = 0;
};

/// Gate counts plus as-soon-as-possible depth (a gate occupies all its wires).
inline CircuitMetrics metrics(const Circuit& c) {
  CircuitMetrics m;
  std::vector<int> wire_depth(static_cast<std::size_t>(c.n), 0);
  for (const Gate& g : c.gates) {
    if (g.kind == Gate::Kind::Cnot) {
      ++m.cnot_count;
      const int layer = 1 + std::max(wire_depth[static_cast<std::size_t>(g.q0)],
                                     wire_depth[static_cast<std::size_t>(g.q1)]);
      wire_depth[static_cast<std::size_t>(g.q0)] = layer;
      wire_depth[static_cast<std::size_t>(g.q1)] = layer;
      m.depth = std::max(m.depth, layer);
    } else {
      ++m.u3_count;
      const int layer = 1 + wire_depth[static_cast<std::size_t>(g.q0)];
      wire_depth[static_cast<std::size_t>(g.q0)] = layer;
      m.depth = std::max(m.depth, layer);
    }
  }
  return m;
}

/// m <- embed(g) * m for a single-qubit 2x2 gate on qubit q of n.
inline void apply_single_qubit_inplace(Matrix& m, const Eigen::Matrix2cd& g, int q, int n) {
  const std::size_t dim = std::size_t(1) << n;
  const std::size_t bit = std::size_t(1) << (n - 1 - q);
  for (Eigen::Index col = 0; col < m.cols(); ++col) {
    complexd* data = m.col(col).data();
    for (std::size_t r0 = 0; r0 < dim; ++r0) {
      if (r0 & bit) continue;
      const std::size_t r1 = r0 | bit;
      const complexd a = data[r0];
      const complexd b = data[r1];
      data[r0] = g(0, 0) * a + g(0, 1) * b;
      data[r1] = g(1, 0) * a + g(1, 1) * b;
    }
  }
}

/// m <- embed(CNOT(control, target)) * m.
inline void apply_cnot_inplace(Matrix& m, int control, int target, int n) {
  const std::size_t dim = std::size_t(1) << n;
  const std::size_t cbit = std::size_t(1) << (n - 1 - control);
  const std::size_t tbit = std::size_t(1) << (n - 1 - target);
  for (Eigen::Index col = 0; col < m.cols(); ++col) {
    complexd* data = m.col(col).data();
    for (std::size_t r = 0; r < dim; ++r) {
      if ((r & cbit) && !(r & tbit)) std::swap(data[r], data[r | tbit]);
    }
  }
}

/// Product of gate embeddings in listed order (gates[0] applied first),
/// including the recorded global phase.
inline Matrix circuit_to_matrix(const Circuit& c, int dense_limit = kDenseQubitLimit) {
  if (c.n > dense_limit)
    throw std::invalid_argument("circuit_to_matrix: qubit count exceeds the dense limit");
  const std::size_t dim = std::size_t(1) << c.n;
  Matrix m = Matrix::Identity(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  for (const Gate& g : c.gates) {
    if (g.kind == Gate::Kind::Cnot)
      apply_cnot_inplace(m, g.q0, g.q1, c.n);
    else
      apply_single_qubit_inplace(m, u3_matrix(g.theta, g.phi, g.lambda), g.q0, c.n);
  }
  if (c.global_phase != 0.0) m *= std::exp(complexd(0.0, c.global_phase));
  return m;
}

/// Writes a 2x2 unitary as e^{i phase} * u3(theta, phi, lambda).
/// Assumes m is unitary to working precision.
inline void u3_from_unitary(const Eigen::Matrix2cd& m, double& theta, double& phi,
                            double& lambda, double& phase) {
  const double a00 = std::abs(m(0, 0));
  const double a10 = std::abs(m(1, 0));
  theta = 2.0 * std::atan2(a10, a00);
  if (a00 >= a10) {
    // cos branch dominant: anchor the phase on m00.
    phase = std::arg(m(0, 0));
    phi = (a10 > 1e-300) ? std::arg(m(1, 0)) - phase : 0.0;
    lambda = (a10 > 1e-300) ? std::arg(-m(0, 1)) - phase : std::arg(m(1, 1)) - phase;
  } else {
    // sin branch dominant: anchor on m10 with lambda folded out of m01.
    lambda = 0.0;
    phase = (a00 > 1e-300) ? std::arg(m(0, 0)) : std::arg(-m(0, 1));
    phi = std::arg(m(1, 0)) - phase;
    if (a00 > 1e-300) lambda = std::arg(-m(0, 1)) - phase;
  }
}

}  // namespace kernpiler
