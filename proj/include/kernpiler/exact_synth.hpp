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

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

#include "kernpiler/circuit.hpp"
#include "kernpiler/pauli.hpp"

namespace kernpiler {

namespace detail {

inline constexpr double kPi = std::numbers::pi;

// Basis-change gates taking X/Y into the Z frame and back, written as exact
// u3 gates (no residual phase):
//   X = H Z H                      with H = u3(pi/2, 0, pi)
//   Y = (SH) Z (SH)^dagger         with (SH)^dagger = u3(pi/2, 0, pi/2)
//                                  and  SH = u3(pi/2, pi/2, pi)
inline Gate hadamard(int q) { return Gate::u3(q, kPi / 2.0, 0.0, kPi); }
inline Gate y_to_z(int q) { return Gate::u3(q, kPi / 2.0, 0.0, kPi / 2.0); }
inline Gate z_to_y(int q) { return Gate::u3(q, kPi / 2.0, kPi / 2.0, kPi); }

}  // namespace detail

/// Exact circuit for exp(i * angle * coefficient * P): basis changes into the
/// Z frame, a CNOT chain onto the last support qubit, one Z rotation, and the
/// mirrored undo.  A weight-0 term produces an empty circuit whose phase is
/// recorded in Circuit::global_phase.
inline Circuit pauli_exp_circuit(const PauliTerm& term, double angle) {
  Circuit c(term.num_qubits());
  const double theta = angle * term.coefficient;
  const std::vector<int> qubits = term.paulis.support();
  if (qubits.empty()) {
    c.global_phase = theta;
    return c;
  }
  for (int q : qubits) {
    if (term.paulis.at(q) == Pauli::X) c.push(detail::hadamard(q));
    if (term.paulis.at(q) == Pauli::Y) c.push(detail::y_to_z(q));
  }
  for (std::size_t i = 0; i + 1 < qubits.size(); ++i)
    c.push(Gate::cnot(qubits[i], qubits[i + 1]));
  // exp(i theta Z) = e^{i theta} u3(0, 0, -2 theta) on the chain root.
  c.push(Gate::u3(qubits.back(), 0.0, 0.0, -2.0 * theta));
  c.global_phase += theta;
  for (std::size_t i = qubits.size() - 1; i >= 1; --i)
    c.push(Gate::cnot(qubits[i - 1], qubits[i]));
  for (int q : qubits) {
    if (term.paulis.at(q) == Pauli::X) c.push(detail::hadamard(q));
    if (term.paulis.at(q) == Pauli::Y) c.push(detail::z_to_y(q));
  }
  return c;
}

namespace detail {

/// Fuses maximal runs of single-qubit gates on each wire into one u3 (or
/// nothing, when the run is an identity up to phase).  Returns true if the
/// gate list changed.
inline bool fuse_single_qubit_runs(Circuit& c, double identity_tol) {
  Circuit out(c.n);
  out.global_phase = c.global_phase;
  std::vector<Eigen::Matrix2cd> pending(static_cast<std::size_t>(c.n),
                                        Eigen::Matrix2cd::Identity());
  std::vector<int> run_length(static_cast<std::size_t>(c.n), 0);
  bool changed = false;

  auto flush = [&](int q) {
    auto& m = pending[static_cast<std::size_t>(q)];
    const int len = run_length[static_cast<std::size_t>(q)];
    if (len == 0) return;
    const complexd tr = m(0, 0) + m(1, 1);
    const double delta = std::abs(tr) > 0.0 ? std::arg(tr) : 0.0;
    const double dist_to_identity =
        (m - std::exp(complexd(0.0, delta)) * Eigen::Matrix2cd::Identity()).norm();
    if (dist_to_identity < identity_tol) {
      out.global_phase += delta;
      changed = true;
    } else {
      double theta, phi, lambda, phase;
      u3_from_unitary(m, theta, phi, lambda, phase);
      out.push(Gate::u3(q, theta, phi, lambda));
      out.global_phase += phase;
      if (len > 1) changed = true;
    }
    m = Eigen::Matrix2cd::Identity();
    run_length[static_cast<std::size_t>(q)] = 0;
  };

  for (const Gate& g : c.gates) {
    if (g.kind == Gate::Kind::U3) {
      pending[static_cast<std::size_t>(g.q0)] =
          u3_matrix(g.theta, g.phi, g.lambda) * pending[static_cast<std::size_t>(g.q0)];
      ++run_length[static_cast<std::size_t>(g.q0)];
    } else {
      flush(g.q0);
      flush(g.q1);
      out.push(g);
    }
  }
  for (int q = 0; q < c.n; ++q) flush(q);
  c = std::move(out);
  return changed;
}

/// Cancels pairs of identical CNOTs with no gate between them on either wire.
inline bool cancel_adjacent_cnots(Circuit& c) {
  const std::size_t count = c.gates.size();
  std::vector<bool> removed(count, false);
  // next_on_wire[i] = index of the next gate after i touching wire w.
  std::vector<std::size_t> last_seen(static_cast<std::size_t>(c.n), SIZE_MAX);
  std::vector<std::array<std::size_t, 2>> next_on_wire(count, {SIZE_MAX, SIZE_MAX});
  for (std::size_t i = count; i-- > 0;) {
    const Gate& g = c.gates[i];
    next_on_wire[i][0] = last_seen[static_cast<std::size_t>(g.q0)];
    last_seen[static_cast<std::size_t>(g.q0)] = i;
    if (g.kind == Gate::Kind::Cnot) {
      next_on_wire[i][1] = last_seen[static_cast<std::size_t>(g.q1)];
      last_seen[static_cast<std::size_t>(g.q1)] = i;
    }
  }
  bool changed = false;
  for (std::size_t i = 0; i < count; ++i) {
    if (removed[i] || c.gates[i].kind != Gate::Kind::Cnot) continue;
    const std::size_t j = next_on_wire[i][0];
    if (j == SIZE_MAX || j != next_on_wire[i][1] || removed[j]) continue;
    const Gate& a = c.gates[i];
    const Gate& b = c.gates[j];
    if (b.kind == Gate::Kind::Cnot && a.q0 == b.q0 && a.q1 == b.q1) {
      removed[i] = removed[j] = true;
      changed = true;
    }
  }
  if (changed) {
    Circuit out(c.n);
    out.global_phase = c.global_phase;
    for (std::size_t i = 0; i < count; ++i)
      if (!removed[i]) out.gates.push_back(c.gates[i]);
    c = std::move(out);
  }
  return changed;
}

}  // namespace detail

/// Peephole pass: adjacent identical CNOTs cancel, runs of single-qubit gates
/// fuse into one u3, identity-equivalent u3 gates vanish into the global
/// phase.  Iterated to a fixpoint; the circuit unitary is preserved.
inline Circuit simplify(const Circuit& c, double identity_tol = 1e-12) {
  Circuit out = c;
  for (int pass = 0; pass < 1 + static_cast<int>(c.gates.size()); ++pass) {
    const bool fused = detail::fuse_single_qubit_runs(out, identity_tol);
    const bool cancelled = detail::cancel_adjacent_cnots(out);
    if (!fused && !cancelled) break;
  }
  return out;
}

}  // namespace kernpiler
