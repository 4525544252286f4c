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

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "kernpiler/rng.hpp"

namespace kernpiler {

using complexd = std::complex<double>;
using Matrix = Eigen::MatrixXcd;

/// Maximum qubit count for any dense-matrix realization (2^12 = 4096).
inline constexpr int kDenseQubitLimit = 12;

enum class Pauli : std::uint8_t { I = 0, X = 1, Y = 2, Z = 3 };

inline char pauli_char(Pauli p) { return "IXYZ"[static_cast<int>(p)]; }

/// A length-n tensor product over {I, X, Y, Z}.
///
/// Stored as two bitmask vectors (x part, z part) so that commutation tests
/// and products cost O(n/64) words: I=(0,0), X=(1,0), Y=(1,1), Z=(0,1).
/// Qubit 0 is the leftmost character of the string form and the leftmost
/// (most significant) tensor factor of any matrix realization; this
/// convention is fixed project-wide.
class PauliString {
 public:
  PauliString() = default;

  explicit PauliString(int n) : n_(n), x_(words(n), 0), z_(words(n), 0) {
    if (n < 0) throw std::invalid_argument("PauliString: negative qubit count");
  }

  /// Parses e.g. "XIZY"; leftmost character is qubit 0.
  static PauliString from_string(std::string_view s) {
    PauliString p(static_cast<int>(s.size()));
    for (int q = 0; q < p.n_; ++q) {
      switch (s[static_cast<std::size_t>(q)]) {
        case 'I': break;
        case 'X': p.set(q, Pauli::X); break;
        case 'Y': p.set(q, Pauli::Y); break;
        case 'Z': p.set(q, Pauli::Z); break;
        default:
          throw std::invalid_argument(
              std::string("PauliString: invalid letter '") +
              s[static_cast<std::size_t>(q)] + "' (expected I, X, Y or Z)");
      }
    }
    return p;
  }

  int num_qubits() const { return n_; }

  Pauli at(int q) const {
    check_index(q);
    const int x = bit(x_, q);
    const int z = bit(z_, q);
    if (x && z) return Pauli::Y;
    if (x) return Pauli::X;
    if (z) return Pauli::Z;
    return Pauli::I;
  }

  void set(int q, Pauli p) {
    check_index(q);
    const bool x = p == Pauli::X || p == Pauli::Y;
    const bool z = p == Pauli::Z || p == Pauli::Y;
    assign_bit(x_, q, x);
    assign_bit(z_, q, z);
  }

  bool is_identity() const {
    for (std::size_t w = 0; w < x_.size(); ++w) {
      if (x_[w] | z_[w]) return false;
    }
    return true;
  }

  /// Number of non-identity factors.
  int weight() const {
    int count = 0;
    for (std::size_t w = 0; w < x_.size(); ++w) {
      count += std::popcount(x_[w] | z_[w]);
    }
    return count;
  }

  /// Ascending qubit indices with a non-identity factor.
  std::vector<int> support() const {
    std::vector<int> qubits;
    for (int q = 0; q < n_; ++q) {
      if (bit(x_, q) | bit(z_, q)) qubits.push_back(q);
    }
    return qubits;
  }

  /// Largest supported qubit index, or -1 for the identity.
  int max_index() const {
    for (int q = n_ - 1; q >= 0; --q) {
      if (bit(x_, q) | bit(z_, q)) return q;
    }
    return -1;
  }

  std::string str() const {
    std::string s(static_cast<std::size_t>(n_), 'I');
    for (int q = 0; q < n_; ++q) s[static_cast<std::size_t>(q)] = pauli_char(at(q));
    return s;
  }

  bool operator==(const PauliString& other) const {
    return n_ == other.n_ && x_ == other.x_ && z_ == other.z_;
  }
  bool operator!=(const PauliString& other) const { return !(*this == other); }

  /// Symplectic commutation test: strings commute iff the number of positions
  /// where both are non-identity and differ is even.
  friend bool strings_commute(const PauliString& p, const PauliString& q) {
    require_same_n(p, q);
    int parity = 0;
    for (std::size_t w = 0; w < p.x_.size(); ++w) {
      parity ^= std::popcount((p.x_[w] & q.z_[w]) ^ (p.z_[w] & q.x_[w])) & 1;
    }
    return parity == 0;
  }

  /// P*Q = i^k * R.  Returns (k mod 4, R).
  friend std::pair<int, PauliString> string_product(const PauliString& p,
                                                    const PauliString& q) {
    require_same_n(p, q);
    PauliString r(p.n_);
    int phase = 0;  // exponent of i, mod 4
    for (std::size_t w = 0; w < p.x_.size(); ++w) {
      r.x_[w] = p.x_[w] ^ q.x_[w];
      r.z_[w] = p.z_[w] ^ q.z_[w];
    }
    // Per-qubit phase table for A*B with A,B in {I,X,Y,Z}.
    static constexpr int kPhase[4][4] = {
        // I  X  Y  Z   (columns: right factor)
        {0, 0, 0, 0},   // I *
        {0, 0, 1, 3},   // X * : XY=iZ, XZ=-iY
        {0, 3, 0, 1},   // Y * : YX=-iZ, YZ=iX
        {0, 1, 3, 0},   // Z * : ZX=iY, ZY=-iX
    };
    for (int qb = 0; qb < p.n_; ++qb) {
      phase += kPhase[static_cast<int>(p.at(qb))][static_cast<int>(q.at(qb))];
    }
    return {phase & 3, r};
  }

  std::uint64_t hash() const {
    std::uint64_t h = splitmix64(static_cast<std::uint64_t>(n_));
    for (std::size_t w = 0; w < x_.size(); ++w) {
      h = splitmix64(h ^ x_[w]);
      h = splitmix64(h ^ z_[w]);
    }
    return h;
  }

 private:
  static std::size_t words(int n) { return static_cast<std::size_t>((n + 63) / 64); }

  static int bit(const std::vector<std::uint64_t>& v, int q) {
    return static_cast<int>((v[static_cast<std::size_t>(q) / 64] >> (q % 64)) & 1U);
  }

  static void assign_bit(std::vector<std::uint64_t>& v, int q, bool value) {
    const std::uint64_t mask = 1ULL << (q % 64);
    if (value)
      v[static_cast<std::size_t>(q) / 64] |= mask;
    else
      v[static_cast<std::size_t>(q) / 64] &= ~mask;
  }

  void check_index(int q) const {
    if (q < 0 || q >= n_) throw std::out_of_range("PauliString: qubit index out of range");
  }

  static void require_same_n(const PauliString& p, const PauliString& q) {
    if (p.n_ != q.n_)
      throw std::invalid_argument("PauliString: mismatched qubit counts");
  }

  int n_ = 0;
  std::vector<std::uint64_t> x_;
  std::vector<std::uint64_t> z_;
};

/// A real-weighted Pauli string, the atom of a Hamiltonian.
struct PauliTerm {
  double coefficient = 0.0;
  PauliString paulis;

  PauliTerm() = default;
  PauliTerm(double c, PauliString p) : coefficient(c), paulis(std::move(p)) {
    if (!std::isfinite(coefficient))
      throw std::invalid_argument("PauliTerm: coefficient must be finite");
  }
  static PauliTerm parse(double c, std::string_view s) {
    return PauliTerm(c, PauliString::from_string(s));
  }

  int num_qubits() const { return paulis.num_qubits(); }
  int weight() const { return paulis.weight(); }

  bool operator==(const PauliTerm& other) const {
    return coefficient == other.coefficient && paulis == other.paulis;
  }
};

/// Commutation of the underlying strings; coefficients are real scalars and
/// never affect it.
inline bool commutes(const PauliTerm& p, const PauliTerm& q) {
  return strings_commute(p.paulis, q.paulis);
}

struct PauliProduct {
  complexd phase;  // one of {1, i, -1, -i}
  PauliTerm term;  // coefficient = product of input coefficients
};

/// P*Q = phase * R with R a Pauli string; coefficients multiply.
inline PauliProduct multiply(const PauliTerm& p, const PauliTerm& q) {
  auto [k, r] = string_product(p.paulis, q.paulis);
  static const complexd kUnits[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  PauliProduct out;
  out.phase = kUnits[k];
  out.term = PauliTerm(p.coefficient * q.coefficient, std::move(r));
  return out;
}

inline std::vector<int> support(const PauliTerm& p) { return p.paulis.support(); }

/// H = sum of weighted Pauli strings on n qubits.  All-identity content is
/// normalized into identity_offset (a physically unobservable phase under
/// time evolution), so `terms` never contains an identity string.
struct Hamiltonian {
  int n = 0;
  std::vector<PauliTerm> terms;
  double identity_offset = 0.0;

  Hamiltonian() = default;
  explicit Hamiltonian(int qubits) : n(qubits) {}

  void add_term(double coefficient, const PauliString& p) {
    if (p.num_qubits() != n)
      throw std::invalid_argument("Hamiltonian: term length does not match qubit count");
    if (!std::isfinite(coefficient))
      throw std::invalid_argument("Hamiltonian: non-finite coefficient");
    if (p.is_identity()) {
      identity_offset += coefficient;
      return;
    }
    if (coefficient != 0.0) terms.emplace_back(coefficient, p);
  }

  void add_term(double coefficient, std::string_view s) {
    add_term(coefficient, PauliString::from_string(s));
  }

  bool operator==(const Hamiltonian& other) const {
    return n == other.n && terms == other.terms &&
           identity_offset == other.identity_offset;
  }
};

namespace detail {

/// Applies single-qubit Pauli p to basis state bit b: P|b> = amp |b ^ flip>.
inline void pauli_action(Pauli p, int b, int& flip, complexd& amp) {
  switch (p) {
    case Pauli::I: flip = 0; amp = 1.0; break;
    case Pauli::X: flip = 1; amp = 1.0; break;
    case Pauli::Y: flip = 1; amp = b ? complexd(0, -1) : complexd(0, 1); break;
    case Pauli::Z: flip = 0; amp = b ? -1.0 : 1.0; break;
  }
}

}  // namespace detail

/// Dense realization of a sum of terms restricted to `qubit_order`.
///
/// The result is 2^k x 2^k with k = |qubit_order|; qubit_order[0] maps to the
/// leftmost tensor factor (most significant index bit).  Every term's support
/// must be contained in qubit_order.
inline Matrix to_matrix(std::span<const PauliTerm> terms,
                        std::span<const int> qubit_order,
                        int dense_limit = kDenseQubitLimit) {
  const int k = static_cast<int>(qubit_order.size());
  if (k > dense_limit)
    throw std::invalid_argument("to_matrix: qubit_order exceeds the dense limit");
  std::vector<int> position(64, -1);
  for (int j = 0; j < k; ++j) {
    const int q = qubit_order[static_cast<std::size_t>(j)];
    if (q < 0) throw std::invalid_argument("to_matrix: negative qubit index");
    if (q >= static_cast<int>(position.size())) position.resize(static_cast<std::size_t>(q) + 1, -1);
    position[static_cast<std::size_t>(q)] = j;
  }
  const std::size_t dim = std::size_t(1) << k;
  Matrix m = Matrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  for (const PauliTerm& term : terms) {
    for (int q : term.paulis.support()) {
      if (q >= static_cast<int>(position.size()) || position[static_cast<std::size_t>(q)] < 0)
        throw std::invalid_argument("to_matrix: term support outside qubit_order");
    }
    for (std::size_t col = 0; col < dim; ++col) {
      std::size_t row = col;
      complexd amp = term.coefficient;
      for (int j = 0; j < k; ++j) {
        const Pauli p = term.paulis.at(qubit_order[static_cast<std::size_t>(j)]);
        if (p == Pauli::I) continue;
        const int shift = k - 1 - j;  // qubit_order[0] = most significant bit
        const int b = static_cast<int>((col >> shift) & 1U);
        int flip = 0;
        complexd a;
        detail::pauli_action(p, b, flip, a);
        amp *= a;
        row ^= static_cast<std::size_t>(flip) << shift;
      }
      m(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col)) += amp;
    }
  }
  return m;
}

inline Matrix to_matrix(const std::vector<PauliTerm>& terms,
                        const std::vector<int>& qubit_order,
                        int dense_limit = kDenseQubitLimit) {
  return to_matrix(std::span<const PauliTerm>(terms),
                   std::span<const int>(qubit_order), dense_limit);
}

/// Dense realization of a full Hamiltonian on all n qubits, identity offset
/// included.
inline Matrix to_matrix(const Hamiltonian& h, int dense_limit = kDenseQubitLimit) {
  std::vector<int> order(static_cast<std::size_t>(h.n));
  for (int q = 0; q < h.n; ++q) order[static_cast<std::size_t>(q)] = q;
  Matrix m = to_matrix(h.terms, order, dense_limit);
  if (h.identity_offset != 0.0) {
    m += h.identity_offset * Matrix::Identity(m.rows(), m.cols());
  }
  return m;
}

}  // namespace kernpiler
