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
#include <cstdint>
#include <set>
#include <stdexcept>
#include <vector>

#include "kernpiler/numerics.hpp"
#include "kernpiler/partition.hpp"
#include "kernpiler/rng.hpp"

namespace kernpiler {

struct TrotterConfig {
  double total_time = 1.0;
  int steps = 1;
  int order = 1;  // 1 or 2
  std::uint64_t shuffle_seed = 0;
  int n_max = 3;
  bool alternate_edges = true;

  void validate() const {
    if (steps < 1) throw std::invalid_argument("trotter config: steps must be >= 1");
    if (order != 1 && order != 2) throw std::invalid_argument("trotter config: order must be 1 or 2");
    if (n_max < 1) throw std::invalid_argument("trotter config: n_max must be >= 1");
  }
};

/// One partition exponential exp(i dt H_partition) inside a plan.
struct BlockExp {
  int partition_id = 0;
  double dt = 0.0;
  int group_id = 0;
  int step_index = 0;
  int segment = 0;      // order-2 half: 0 = forward, 1 = reflected
  bool merged = false;  // produced by merge_adjacent; pinned under shuffling
};

/// Graph on partitions; an edge means the two block unitaries do not commute.
struct ConflictGraph {
  int num_vertices = 0;
  std::vector<std::vector<bool>> adjacent;

  bool edge(int a, int b) const { return adjacent[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)]; }

  long edge_count() const {
    long count = 0;
    for (int a = 0; a < num_vertices; ++a)
      for (int b = a + 1; b < num_vertices; ++b)
        if (edge(a, b)) ++count;
    return count;
  }
};

/// Ordered, grouped, merged, shuffled sequence of block exponentials.
struct TrotterPlan {
  std::vector<BlockExp> blocks;
  std::vector<std::vector<int>> groups;  // group_id -> partition ids
  TrotterConfig config;
  ConflictGraph conflicts;  // snapshot used by merging
};

namespace detail {

inline bool cross_terms_all_commute(const Hamiltonian& h, const Partition& a,
                                    const Partition& b) {
  for (int i : a.term_indices)
    for (int j : b.term_indices)
      if (!commutes(h.terms[static_cast<std::size_t>(i)], h.terms[static_cast<std::size_t>(j)]))
        return false;
  return true;
}

inline std::vector<int> joint_support(const Partition& a, const Partition& b) {
  std::set<int> joint(a.support_qubits);
  joint.insert(b.support_qubits.begin(), b.support_qubits.end());
  return std::vector<int>(joint.begin(), joint.end());
}

}  // namespace detail

/// Edge iff the block unitaries do not commute.  On joint supports within the
/// dense limit the commutator is computed exactly (term-level anticommutation
/// is only a sufficient condition and misses cancellations); above it the
/// all-cross-pairs-commute test is used as a conservative fallback.
inline ConflictGraph build_conflict_graph(const std::vector<Partition>& partitions,
                                          const Hamiltonian& h,
                                          int dense_limit = kDenseQubitLimit) {
  ConflictGraph g;
  g.num_vertices = static_cast<int>(partitions.size());
  g.adjacent.assign(partitions.size(), std::vector<bool>(partitions.size(), false));
  for (int a = 0; a < g.num_vertices; ++a) {
    for (int b = a + 1; b < g.num_vertices; ++b) {
      const Partition& pa = partitions[static_cast<std::size_t>(a)];
      const Partition& pb = partitions[static_cast<std::size_t>(b)];
      bool conflict;
      // Disjoint supports always commute; cheap early out.
      std::vector<int> shared;
      std::set_intersection(pa.support_qubits.begin(), pa.support_qubits.end(),
                            pb.support_qubits.begin(), pb.support_qubits.end(),
                            std::back_inserter(shared));
      if (shared.empty()) {
        conflict = false;
      } else {
        const auto joint = detail::joint_support(pa, pb);
        if (static_cast<int>(joint.size()) <= dense_limit) {
          const Matrix ma = to_matrix(partition_terms(h, pa), joint, dense_limit);
          const Matrix mb = to_matrix(partition_terms(h, pb), joint, dense_limit);
          conflict = (ma * mb - mb * ma).norm() > 1e-10;
        } else {
          conflict = !detail::cross_terms_all_commute(h, pa, pb);
        }
      }
      g.adjacent[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] = conflict;
      g.adjacent[static_cast<std::size_t>(b)][static_cast<std::size_t>(a)] = conflict;
    }
  }
  return g;
}

/// Repeatedly extracts a maximal independent set (seeded at the lowest
/// unassigned vertex id, extended greedily in ascending id) and removes it,
/// until every vertex belongs to exactly one group.  Groups are returned in
/// extraction order.
inline std::vector<std::vector<int>> greedy_commuting_groups(const ConflictGraph& g) {
  std::vector<std::vector<int>> groups;
  std::vector<bool> assigned(static_cast<std::size_t>(g.num_vertices), false);
  int remaining = g.num_vertices;
  while (remaining > 0) {
    std::vector<int> group;
    for (int v = 0; v < g.num_vertices; ++v) {
      if (assigned[static_cast<std::size_t>(v)]) continue;
      bool independent = true;
      for (int member : group) {
        if (g.edge(v, member)) {
          independent = false;
          break;
        }
      }
      if (independent) group.push_back(v);
    }
    for (int v : group) assigned[static_cast<std::size_t>(v)] = true;
    remaining -= static_cast<int>(group.size());
    groups.push_back(std::move(group));
  }
  return groups;
}

namespace detail {

/// Group ordering within a step: largest group first, second-largest last,
/// middles in extraction order.  Size ties resolve to extraction order.
inline std::vector<int> edge_ordered_groups(const std::vector<std::vector<int>>& groups) {
  const int count = static_cast<int>(groups.size());
  std::vector<int> order;
  if (count == 0) return order;
  int largest = 0;
  for (int i = 1; i < count; ++i)
    if (groups[static_cast<std::size_t>(i)].size() > groups[static_cast<std::size_t>(largest)].size()) largest = i;
  int second = -1;
  for (int i = 0; i < count; ++i) {
    if (i == largest) continue;
    if (second < 0 ||
        groups[static_cast<std::size_t>(i)].size() > groups[static_cast<std::size_t>(second)].size())
      second = i;
  }
  order.push_back(largest);
  for (int i = 0; i < count; ++i)
    if (i != largest && i != second) order.push_back(i);
  if (second >= 0) order.push_back(second);
  return order;
}

}  // namespace detail

/// Builds the ordered block sequence for N steps.
///
/// Order 1: every step lists the groups edge-ordered; with alternate_edges
/// the group sequence is reversed on odd steps so identical groups meet at
/// step boundaries.  Order 2: each step is the forward half followed by its
/// mirror (dt = t/2N per block); the palindrome is invariant under the odd
/// step reversal.
inline TrotterPlan build_trotter_plan(const std::vector<Partition>& partitions,
                                      const ConflictGraph& graph,
                                      const std::vector<std::vector<int>>& groups,
                                      const TrotterConfig& cfg) {
  cfg.validate();
  std::vector<bool> seen(partitions.size(), false);
  for (const auto& group : groups) {
    for (int p : group) {
      if (p < 0 || p >= static_cast<int>(partitions.size()) || seen[static_cast<std::size_t>(p)])
        throw std::invalid_argument("build_trotter_plan: groups must cover partitions exactly once");
      seen[static_cast<std::size_t>(p)] = true;
    }
  }
  if (std::find(seen.begin(), seen.end(), false) != seen.end())
    throw std::invalid_argument("build_trotter_plan: groups must cover partitions exactly once");

  TrotterPlan plan;
  plan.groups = groups;
  plan.config = cfg;
  plan.conflicts = graph;
  const std::vector<int> base = detail::edge_ordered_groups(groups);
  const double dt = cfg.total_time / cfg.steps / (cfg.order == 2 ? 2.0 : 1.0);
  for (int step = 0; step < cfg.steps; ++step) {
    std::vector<int> seq = base;
    if (cfg.alternate_edges && (step % 2 == 1)) std::reverse(seq.begin(), seq.end());
    auto emit = [&](int group_id, int segment, bool reversed) {
      const auto& members = plan.groups[static_cast<std::size_t>(group_id)];
      for (std::size_t i = 0; i < members.size(); ++i) {
        const std::size_t at = reversed ? members.size() - 1 - i : i;
        BlockExp block;
        block.partition_id = members[at];
        block.dt = dt;
        block.group_id = group_id;
        block.step_index = step;
        block.segment = segment;
        plan.blocks.push_back(block);
      }
    };
    for (int g : seq) emit(g, 0, false);
    if (cfg.order == 2) {
      for (auto it = seq.rbegin(); it != seq.rend(); ++it) emit(*it, 1, true);
    }
  }
  return plan;
}

/// Merges pairs of blocks over the same partition whenever every block
/// between the two occurrences commutes with that partition; the occurrences
/// collapse into one block with summed dt.  Exact: commuting factors slide
/// freely, so the plan unitary is unchanged.
inline TrotterPlan merge_adjacent(const TrotterPlan& plan) {
  TrotterPlan out = plan;
  auto& blocks = out.blocks;
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t i = 0; i < blocks.size() && !changed; ++i) {
      for (std::size_t j = i + 1; j < blocks.size(); ++j) {
        if (blocks[j].partition_id == blocks[i].partition_id) {
          blocks[i].dt += blocks[j].dt;
          blocks[i].merged = true;
          blocks.erase(blocks.begin() + static_cast<std::ptrdiff_t>(j));
          changed = true;
          break;
        }
        if (out.conflicts.edge(blocks[i].partition_id, blocks[j].partition_id)) break;
      }
    }
  }
  return out;
}

/// Shuffles block order inside each contiguous run of one commuting group,
/// independently per (step, group, segment), with the stream seeded by
/// derive_seed(seed, {step, group, segment}).  Merged blocks stay pinned and
/// act as barriers; all permuted blocks commute pairwise, so the plan unitary
/// is unchanged.
inline TrotterPlan shuffle_within_groups(const TrotterPlan& plan, std::uint64_t seed) {
  TrotterPlan out = plan;
  auto& blocks = out.blocks;
  std::size_t start = 0;
  while (start < blocks.size()) {
    std::size_t end = start;
    const BlockExp& first = blocks[start];
    while (end < blocks.size()) {
      const BlockExp& b = blocks[end];
      if (b.merged || b.group_id != first.group_id || b.step_index != first.step_index ||
          b.segment != first.segment)
        break;
      ++end;
    }
    if (first.merged) {
      ++start;
      continue;
    }
    const std::size_t run = end - start;
    if (run > 1) {
      Rng rng(derive_seed(seed, {static_cast<std::uint64_t>(first.step_index),
                                 static_cast<std::uint64_t>(first.group_id),
                                 static_cast<std::uint64_t>(first.segment)}));
      std::vector<BlockExp> window(blocks.begin() + static_cast<std::ptrdiff_t>(start),
                                   blocks.begin() + static_cast<std::ptrdiff_t>(end));
      rng.shuffle(window);
      std::copy(window.begin(), window.end(), blocks.begin() + static_cast<std::ptrdiff_t>(start));
    }
    start = end;
  }
  return out;
}

/// Dense realization of the whole plan (blocks applied in listed order) for
/// verification at small sizes.
inline Matrix plan_to_matrix(const TrotterPlan& plan, const std::vector<Partition>& partitions,
                             const Hamiltonian& h, int dense_limit = kDenseQubitLimit) {
  if (h.n > dense_limit)
    throw std::invalid_argument("plan_to_matrix: qubit count exceeds the dense limit");
  const std::size_t dim = std::size_t(1) << h.n;
  Matrix m = Matrix::Identity(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  for (const BlockExp& block : plan.blocks) {
    const Partition& part = partitions[static_cast<std::size_t>(block.partition_id)];
    const Matrix hblock = partition_matrix(h, part, dense_limit);
    const Matrix ublock = expm_i_hermitian(hblock, block.dt);
    const auto support = part.support_sorted();
    apply_block_inplace(m, ublock, support, h.n);
  }
  return m;
}

// ---------------------------------------------------------------------------
// First-order commutator error bounds.
// ---------------------------------------------------------------------------

struct ErrorBounds {
  double full = 0.0;               // sum over all term pairs
  double partitioned = 0.0;        // sum over cross-partition term pairs
  double reduction = 0.0;          // full - partitioned = dropped intra-partition pairs
  double partitioned_dense = 0.0;  // refinement: dense ||[H_A,H_B]|| per partition pair
};

namespace detail {

/// ||[w_i P_i, w_j P_j]|| is exactly 2|w_i w_j| for anticommuting strings and
/// zero otherwise (the commutator of anticommuting strings is 2 w_i w_j P_i P_j,
/// a unit-spectral-norm string times the scalar).
inline double term_pair_commutator_norm(const PauliTerm& a, const PauliTerm& b) {
  if (commutes(a, b)) return 0.0;
  return 2.0 * std::abs(a.coefficient * b.coefficient);
}

}  // namespace detail

/// Per-step bound scale N * dt^2 / 2 applied to the summed commutator norms.
/// `full` counts every term pair; `partitioned` keeps only cross-partition
/// pairs, so the reduction is exactly the dropped intra-partition content.
/// `partitioned_dense` replaces each cross-partition aggregate with the dense
/// spectral norm of [H_A, H_B] on the joint support (when it fits), which can
/// only be tighter.
inline ErrorBounds estimate_error(const Hamiltonian& h, const std::vector<Partition>& partitions,
                                  const TrotterConfig& cfg, int dense_limit = kDenseQubitLimit) {
  cfg.validate();
  const double dt = cfg.total_time / cfg.steps;
  const double scale = cfg.steps * dt * dt / 2.0;
  ErrorBounds bounds;
  const std::size_t m = h.terms.size();
  std::vector<int> partition_of(m, -1);
  for (std::size_t p = 0; p < partitions.size(); ++p)
    for (int t : partitions[p].term_indices) partition_of[static_cast<std::size_t>(t)] = static_cast<int>(p);
  double full = 0.0;
  double cross = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i + 1; j < m; ++j) {
      const double norm = detail::term_pair_commutator_norm(h.terms[i], h.terms[j]);
      if (norm == 0.0) continue;
      full += norm;
      if (partition_of[i] != partition_of[j]) cross += norm;
    }
  }
  double cross_dense = 0.0;
  for (std::size_t a = 0; a < partitions.size(); ++a) {
    for (std::size_t b = a + 1; b < partitions.size(); ++b) {
      const auto joint = detail::joint_support(partitions[a], partitions[b]);
      if (static_cast<int>(joint.size()) <= dense_limit && !joint.empty()) {
        const Matrix ma = to_matrix(partition_terms(h, partitions[a]), joint, dense_limit);
        const Matrix mb = to_matrix(partition_terms(h, partitions[b]), joint, dense_limit);
        cross_dense += spectral_norm(ma * mb - mb * ma);
      } else {
        for (int i : partitions[a].term_indices)
          for (int j : partitions[b].term_indices)
            cross_dense += detail::term_pair_commutator_norm(
                h.terms[static_cast<std::size_t>(i)], h.terms[static_cast<std::size_t>(j)]);
      }
    }
  }
  bounds.full = scale * full;
  bounds.partitioned = scale * cross;
  bounds.reduction = bounds.full - bounds.partitioned;
  bounds.partitioned_dense = scale * cross_dense;
  return bounds;
}

}  // namespace kernpiler
