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
#include <set>
#include <stdexcept>
#include <vector>

#include "kernpiler/pauli.hpp"

namespace kernpiler {

/// A set of Hamiltonian term indices whose joint support fits on at most
/// n_max qubits; the whole partition is later exponentiated as one unitary.
struct Partition {
  std::vector<int> term_indices;  // in placement order
  std::set<int> support_qubits;

  std::vector<int> support_sorted() const {
    return std::vector<int>(support_qubits.begin(), support_qubits.end());
  }
};

/// Sorts term indices ascending by highest supported qubit index, breaking
/// ties by term weight, then by original index (stable).  A weight-0 term has
/// max index -1 and sorts first.
inline std::vector<int> sort_terms(const Hamiltonian& h) {
  std::vector<int> order(h.terms.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    const auto& ta = h.terms[static_cast<std::size_t>(a)].paulis;
    const auto& tb = h.terms[static_cast<std::size_t>(b)].paulis;
    const int ma = ta.max_index();
    const int mb = tb.max_index();
    if (ma != mb) return ma < mb;
    return ta.weight() < tb.weight();
  });
  return order;
}

/// Greedy packing: each sorted term joins the first partition whose support
/// union stays within n_max qubits, otherwise it opens a new partition.
/// Terms heavier than n_max can never join anything and end up alone.
inline std::vector<Partition> greedy_partition(const Hamiltonian& h, int n_max) {
  if (n_max < 1) throw std::invalid_argument("greedy_partition: n_max must be >= 1");
  std::vector<Partition> partitions;
  for (int index : sort_terms(h)) {
    const auto term_support = h.terms[static_cast<std::size_t>(index)].paulis.support();
    bool placed = false;
    for (Partition& part : partitions) {
      std::set<int> joint(part.support_qubits);
      joint.insert(term_support.begin(), term_support.end());
      if (static_cast<int>(joint.size()) <= n_max) {
        part.term_indices.push_back(index);
        part.support_qubits = std::move(joint);
        placed = true;
        break;
      }
    }
    if (!placed) {
      Partition part;
      part.term_indices.push_back(index);
      part.support_qubits.insert(term_support.begin(), term_support.end());
      partitions.push_back(std::move(part));
    }
  }
  return partitions;
}

/// Terms of one partition, in placement order.
inline std::vector<PauliTerm> partition_terms(const Hamiltonian& h, const Partition& p) {
  std::vector<PauliTerm> terms;
  terms.reserve(p.term_indices.size());
  for (int i : p.term_indices) terms.push_back(h.terms[static_cast<std::size_t>(i)]);
  return terms;
}

/// Dense Hermitian realization of a partition on its sorted support.
inline Matrix partition_matrix(const Hamiltonian& h, const Partition& p,
                               int dense_limit = kDenseQubitLimit) {
  return to_matrix(partition_terms(h, p), p.support_sorted(), dense_limit);
}

}  // namespace kernpiler
