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
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "kernpiler/pauli.hpp"

namespace kernpiler {

enum class Topology { Line, Square, Triangular };

inline Topology topology_from_string(const std::string& s) {
  if (s == "line") return Topology::Line;
  if (s == "square") return Topology::Square;
  if (s == "triangular") return Topology::Triangular;
  throw std::invalid_argument("unknown topology: " + s);
}

struct GridSpec {
  int rows = 1;
  int cols = 1;
  Topology topology = Topology::Line;

  int sites() const { return rows * cols; }

  void validate() const {
    if (rows < 1 || cols < 1) throw std::invalid_argument("grid: non-positive dimensions");
    if (topology == Topology::Line && rows != 1 && cols != 1)
      throw std::invalid_argument("grid: line topology requires a 1xN or Nx1 grid");
    if (sites() < 2) throw std::invalid_argument("grid: need at least two sites");
  }
};

struct ModelParams {
  double coupling_j = 1.0;
  double field_h = 1.0;
  double hopping_t = 1.0;
  double onsite_u = 2.0;

  void validate() const {
    if (!std::isfinite(coupling_j) || !std::isfinite(field_h) ||
        !std::isfinite(hopping_t) || !std::isfinite(onsite_u))
      throw std::invalid_argument("model parameters must be finite");
  }
};

/// Nearest-neighbor edges in row-major site order: line chains; square grids
/// add horizontal then vertical bonds; triangular grids add one down-right
/// diagonal per plaquette on top of the square bonds.
inline std::vector<std::pair<int, int>> grid_edges(const GridSpec& g) {
  g.validate();
  std::vector<std::pair<int, int>> edges;
  auto site = [&](int r, int c) { return r * g.cols + c; };
  if (g.topology == Topology::Line) {
    const int length = g.sites();
    for (int i = 0; i + 1 < length; ++i) edges.emplace_back(i, i + 1);
    return edges;
  }
  for (int r = 0; r < g.rows; ++r)
    for (int c = 0; c + 1 < g.cols; ++c) edges.emplace_back(site(r, c), site(r, c + 1));
  for (int r = 0; r + 1 < g.rows; ++r)
    for (int c = 0; c < g.cols; ++c) edges.emplace_back(site(r, c), site(r + 1, c));
  if (g.topology == Topology::Triangular) {
    for (int r = 0; r + 1 < g.rows; ++r)
      for (int c = 0; c + 1 < g.cols; ++c) edges.emplace_back(site(r, c), site(r + 1, c + 1));
  }
  return edges;
}

/// Transverse-field Ising model: sum_edges J Z_i Z_j + sum_sites h X_i.
inline Hamiltonian build_ising(const GridSpec& g, const ModelParams& p = {}) {
  p.validate();
  const auto edges = grid_edges(g);
  Hamiltonian h(g.sites());
  for (auto [a, b] : edges) {
    PauliString s(h.n);
    s.set(a, Pauli::Z);
    s.set(b, Pauli::Z);
    h.add_term(p.coupling_j, s);
  }
  if (p.field_h != 0.0) {
    for (int q = 0; q < h.n; ++q) {
      PauliString s(h.n);
      s.set(q, Pauli::X);
      h.add_term(p.field_h, s);
    }
  }
  return h;
}

/// Heisenberg model: sum_edges J (X_i X_j + Y_i Y_j + Z_i Z_j).
inline Hamiltonian build_heisenberg(const GridSpec& g, const ModelParams& p = {}) {
  p.validate();
  const auto edges = grid_edges(g);
  Hamiltonian h(g.sites());
  for (auto [a, b] : edges) {
    for (Pauli op : {Pauli::X, Pauli::Y, Pauli::Z}) {
      PauliString s(h.n);
      s.set(a, op);
      s.set(b, op);
      h.add_term(p.coupling_j, s);
    }
  }
  return h;
}

/// Fermi-Hubbard model under the Jordan-Wigner mapping with interleaved
/// spins: site s spin-up -> qubit 2s, spin-down -> qubit 2s+1 (row-major site
/// order).  Hopping on edge (i,j) per spin becomes
/// (t/2)(X_a Z..Z X_b + Y_a Z..Z Y_b) with the Z string over qubits between a
/// and b; the onsite term U n_up n_down expands to
/// (U/4)(I - Z_a)(I - Z_b), whose identity component accumulates in
/// Hamiltonian::identity_offset.
inline Hamiltonian build_fermi_hubbard(const GridSpec& g, const ModelParams& p = {}) {
  p.validate();
  const auto edges = grid_edges(g);
  Hamiltonian h(2 * g.sites());
  for (auto [i, j] : edges) {
    for (int spin = 0; spin < 2; ++spin) {
      const int a = 2 * i + spin;
      const int b = 2 * j + spin;
      for (Pauli op : {Pauli::X, Pauli::Y}) {
        PauliString s(h.n);
        s.set(a, op);
        s.set(b, op);
        for (int q = a + 1; q < b; ++q) s.set(q, Pauli::Z);
        h.add_term(p.hopping_t / 2.0, s);
      }
    }
  }
  for (int site = 0; site < g.sites(); ++site) {
    const int up = 2 * site;
    const int down = 2 * site + 1;
    const double quarter = p.onsite_u / 4.0;
    h.identity_offset += quarter;
    PauliString zu(h.n), zd(h.n), zz(h.n);
    zu.set(up, Pauli::Z);
    zd.set(down, Pauli::Z);
    zz.set(up, Pauli::Z);
    zz.set(down, Pauli::Z);
    h.add_term(-quarter, zu);
    h.add_term(-quarter, zd);
    h.add_term(quarter, zz);
  }
  return h;
}

// ---------------------------------------------------------------------------
// JSON ingestion / serialization.
//
// Schema: {"num_qubits": <int>, "terms": [{"coeff": <number>,
//          "pauli": <string over IXYZ of length num_qubits>}, ...]}
// The leftmost pauli character is qubit 0.
// ---------------------------------------------------------------------------

inline Hamiltonian hamiltonian_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("num_qubits") || !j.contains("terms"))
    throw std::invalid_argument("hamiltonian json: expected num_qubits and terms");
  if (!j["num_qubits"].is_number_integer())
    throw std::invalid_argument("hamiltonian json: num_qubits must be an integer");
  const int n = j["num_qubits"].get<int>();
  if (n < 0) throw std::invalid_argument("hamiltonian json: negative num_qubits");
  if (!j["terms"].is_array())
    throw std::invalid_argument("hamiltonian json: terms must be an array");
  Hamiltonian h(n);
  std::size_t index = 0;
  for (const auto& t : j["terms"]) {
    const std::string where = "term " + std::to_string(index);
    if (!t.is_object() || !t.contains("coeff") || !t.contains("pauli"))
      throw std::invalid_argument("hamiltonian json: " + where + ": expected coeff and pauli");
    if (!t["coeff"].is_number())
      throw std::invalid_argument("hamiltonian json: " + where +
                                  ": coeff must be a real number");
    if (!t["pauli"].is_string())
      throw std::invalid_argument("hamiltonian json: " + where + ": pauli must be a string");
    const std::string s = t["pauli"].get<std::string>();
    if (static_cast<int>(s.size()) != n)
      throw std::invalid_argument("hamiltonian json: " + where + ": pauli string length " +
                                  std::to_string(s.size()) + " does not match num_qubits " +
                                  std::to_string(n));
    try {
      h.add_term(t["coeff"].get<double>(), s);
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument("hamiltonian json: " + where + ": " + e.what());
    }
    ++index;
  }
  return h;
}

inline nlohmann::ordered_json hamiltonian_to_json(const Hamiltonian& h) {
  nlohmann::ordered_json j;
  j["num_qubits"] = h.n;
  j["terms"] = nlohmann::ordered_json::array();
  for (const PauliTerm& t : h.terms) {
    j["terms"].push_back({{"coeff", t.coefficient}, {"pauli", t.paulis.str()}});
  }
  if (h.identity_offset != 0.0) {
    j["terms"].push_back(
        {{"coeff", h.identity_offset}, {"pauli", std::string(static_cast<std::size_t>(h.n), 'I')}});
  }
  return j;
}

inline Hamiltonian load_hamiltonian(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open hamiltonian file: " + path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument("hamiltonian json parse error in " + path + ": " + e.what());
  }
  return hamiltonian_from_json(j);
}

inline void save_hamiltonian(const Hamiltonian& h, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write hamiltonian file: " + path);
  out << hamiltonian_to_json(h).dump(2) << "\n";
}

}  // namespace kernpiler
