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

#include <map>

#include "kernpiler/models.hpp"
#include "kernpiler/schedule.hpp"
#include "test_helpers.hpp"

using namespace kernpiler;

namespace {

Hamiltonian from_strings(const std::vector<std::string>& strings) {
  Hamiltonian h(static_cast<int>(strings.front().size()));
  for (const auto& s : strings) h.add_term(1.0, s);
  return h;
}

std::vector<Partition> singleton_partitions(const Hamiltonian& h) {
  std::vector<Partition> parts;
  for (std::size_t i = 0; i < h.terms.size(); ++i) {
    Partition p;
    p.term_indices.push_back(static_cast<int>(i));
    const auto sup = h.terms[i].paulis.support();
    p.support_qubits.insert(sup.begin(), sup.end());
    parts.push_back(std::move(p));
  }
  return parts;
}

/// Accumulated dt per partition id; merging and shuffling must conserve it.
std::map<int, double> total_dt(const TrotterPlan& plan) {
  std::map<int, double> sums;
  for (const BlockExp& b : plan.blocks) sums[b.partition_id] += b.dt;
  return sums;
}

}  // namespace

TEST_CASE("conflict graph on the four 3-qubit strings") {
  // Five of six pairs anticommute; (XYZ, XZX) commute, so the graph is K4
  // minus that one edge (the matrix oracle below confirms every entry).
  const Hamiltonian h = from_strings({"XYZ", "YZX", "ZXY", "XZX"});
  const auto parts = singleton_partitions(h);
  const ConflictGraph g = build_conflict_graph(parts, h);
  CHECK(g.num_vertices == 4);
  CHECK(g.edge_count() == 5);
  CHECK_FALSE(g.edge(0, 3));
  for (int a = 0; a < 4; ++a) {
    for (int b = a + 1; b < 4; ++b) {
      const Matrix ma = testutil::term_matrix(h.terms[static_cast<std::size_t>(a)]);
      const Matrix mb = testutil::term_matrix(h.terms[static_cast<std::size_t>(b)]);
      CHECK(g.edge(a, b) == !testutil::matrices_commute(ma, mb, 1e-10));
    }
  }
}

TEST_CASE("disjoint supports never conflict") {
  const Hamiltonian h = from_strings({"XXII", "IIZZ"});
  const auto parts = singleton_partitions(h);
  CHECK(build_conflict_graph(parts, h).edge_count() == 0);
}

TEST_CASE("commuting overlapping blocks carry no edge") {
  const Hamiltonian h = from_strings({"ZZ", "XX"});
  const auto parts = singleton_partitions(h);
  CHECK(build_conflict_graph(parts, h).edge_count() == 0);
}

TEST_CASE("block-level cancellation beats the term-level sufficient test") {
  // Every cross pair anticommutes, yet [XX + YY, XY + YX] = 0; the dense
  // commutator must detect the cancellation and omit the edge.
  Hamiltonian h = from_strings({"XX", "YY", "XY", "YX"});
  std::vector<Partition> parts(2);
  parts[0].term_indices = {0, 1};
  parts[0].support_qubits = {0, 1};
  parts[1].term_indices = {2, 3};
  parts[1].support_qubits = {0, 1};
  for (int i : parts[0].term_indices)
    for (int j : parts[1].term_indices)
      CHECK_FALSE(commutes(h.terms[static_cast<std::size_t>(i)],
                           h.terms[static_cast<std::size_t>(j)]));
  const ConflictGraph g = build_conflict_graph(parts, h);
  CHECK(g.edge_count() == 0);
}

TEST_CASE("greedy commuting groups") {
  SECTION("edgeless graph is one group") {
    ConflictGraph g;
    g.num_vertices = 5;
    g.adjacent.assign(5, std::vector<bool>(5, false));
    const auto groups = greedy_commuting_groups(g);
    REQUIRE(groups.size() == 1);
    CHECK(groups[0] == std::vector<int>{0, 1, 2, 3, 4});
  }
  SECTION("complete graph gives singleton groups") {
    ConflictGraph g;
    g.num_vertices = 4;
    g.adjacent.assign(4, std::vector<bool>(4, true));
    for (int v = 0; v < 4; ++v) g.adjacent[static_cast<std::size_t>(v)][static_cast<std::size_t>(v)] = false;
    const auto groups = greedy_commuting_groups(g);
    REQUIRE(groups.size() == 4);
    for (int v = 0; v < 4; ++v) CHECK(groups[static_cast<std::size_t>(v)] == std::vector<int>{v});
  }
  SECTION("path graph 0-1-2 gives {0,2},{1}") {
    ConflictGraph g;
    g.num_vertices = 3;
    g.adjacent.assign(3, std::vector<bool>(3, false));
    g.adjacent[0][1] = g.adjacent[1][0] = true;
    g.adjacent[1][2] = g.adjacent[2][1] = true;
    const auto groups = greedy_commuting_groups(g);
    REQUIRE(groups.size() == 2);
    CHECK(groups[0] == std::vector<int>{0, 2});
    CHECK(groups[1] == std::vector<int>{1});
  }
  SECTION("every vertex lands in exactly one group") {
    const Hamiltonian h = build_heisenberg({5, 2, Topology::Triangular});
    const auto parts = greedy_partition(h, 3);
    const ConflictGraph g = build_conflict_graph(parts, h);
    const auto groups = greedy_commuting_groups(g);
    std::vector<int> seen(parts.size(), 0);
    for (const auto& group : groups)
      for (int v : group) seen[static_cast<std::size_t>(v)] += 1;
    for (int count : seen) CHECK(count == 1);
  }
}

TEST_CASE("within-group blocks commute pairwise at the matrix level") {
  const Hamiltonian h = build_ising({1, 8, Topology::Line});
  const auto parts = greedy_partition(h, 3);
  const ConflictGraph g = build_conflict_graph(parts, h);
  const auto groups = greedy_commuting_groups(g);
  for (const auto& group : groups) {
    for (std::size_t a = 0; a < group.size(); ++a) {
      for (std::size_t b = a + 1; b < group.size(); ++b) {
        const Partition& pa = parts[static_cast<std::size_t>(group[a])];
        const Partition& pb = parts[static_cast<std::size_t>(group[b])];
        const Matrix ma = embed(partition_matrix(h, pa), pa.support_sorted(), h.n);
        const Matrix mb = embed(partition_matrix(h, pb), pb.support_sorted(), h.n);
        CHECK((ma * mb - mb * ma).norm() < 1e-10);
      }
    }
  }
}

TEST_CASE("plan construction") {
  // Two groups: A with 3 partitions, B with 2.
  const Hamiltonian h = from_strings({"XIIII", "IXIII", "IIXII", "ZZZII", "IIZZZ"});
  std::vector<Partition> parts = singleton_partitions(h);
  ConflictGraph g;
  g.num_vertices = 5;
  g.adjacent.assign(5, std::vector<bool>(5, false));
  auto connect = [&](int a, int b) {
    g.adjacent[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] = true;
    g.adjacent[static_cast<std::size_t>(b)][static_cast<std::size_t>(a)] = true;
  };
  connect(0, 3);
  connect(1, 3);
  connect(2, 4);
  const std::vector<std::vector<int>> groups = {{0, 1, 2}, {3, 4}};

  SECTION("order 1, alternation on: edge groups swap on odd steps") {
    TrotterConfig cfg;
    cfg.total_time = 1.0;
    cfg.steps = 2;
    cfg.order = 1;
    const TrotterPlan plan = build_trotter_plan(parts, g, groups, cfg);
    REQUIRE(plan.blocks.size() == 10);
    std::vector<int> step0, step1;
    for (const BlockExp& b : plan.blocks) {
      CHECK(b.dt == Approx(0.5));
      (b.step_index == 0 ? step0 : step1).push_back(b.group_id);
    }
    CHECK(step0 == std::vector<int>{0, 0, 0, 1, 1});
    CHECK(step1 == std::vector<int>{1, 1, 0, 0, 0});
  }
  SECTION("order 1, alternation off: identical steps") {
    TrotterConfig cfg;
    cfg.steps = 2;
    cfg.alternate_edges = false;
    const TrotterPlan plan = build_trotter_plan(parts, g, groups, cfg);
    std::vector<int> step1;
    for (const BlockExp& b : plan.blocks)
      if (b.step_index == 1) step1.push_back(b.group_id);
    CHECK(step1 == std::vector<int>{0, 0, 0, 1, 1});
  }
  SECTION("order 2, N=1 is a palindrome of half steps") {
    TrotterConfig cfg;
    cfg.steps = 1;
    cfg.order = 2;
    const TrotterPlan plan = build_trotter_plan(parts, g, groups, cfg);
    REQUIRE(plan.blocks.size() == 10);
    std::vector<int> ids;
    for (const BlockExp& b : plan.blocks) {
      CHECK(b.dt == Approx(0.5));
      ids.push_back(b.partition_id);
    }
    const std::vector<int> reversed(ids.rbegin(), ids.rend());
    CHECK(ids == reversed);
    CHECK(ids == std::vector<int>{0, 1, 2, 3, 4, 4, 3, 2, 1, 0});
  }
  SECTION("groups must cover partitions") {
    TrotterConfig cfg;
    const std::vector<std::vector<int>> incomplete = {{0, 1, 2}, {3}};
    CHECK_THROWS_AS(build_trotter_plan(parts, g, incomplete, cfg), std::invalid_argument);
  }
}

TEST_CASE("single group plan and full merge collapse") {
  const Hamiltonian h = from_strings({"XII", "IXI"});
  const auto parts = singleton_partitions(h);
  const ConflictGraph g = build_conflict_graph(parts, h);
  const auto groups = greedy_commuting_groups(g);
  REQUIRE(groups.size() == 1);

  SECTION("order 1, N=2 before merging") {
    TrotterConfig cfg;
    cfg.steps = 2;
    const TrotterPlan plan = build_trotter_plan(parts, g, groups, cfg);
    CHECK(plan.blocks.size() == 4);
    for (const BlockExp& b : plan.blocks) CHECK(b.dt == Approx(0.5));
  }
  SECTION("merging collapses everything to dt = t") {
    TrotterConfig cfg;
    cfg.steps = 2;
    const TrotterPlan merged = merge_adjacent(build_trotter_plan(parts, g, groups, cfg));
    REQUIRE(merged.blocks.size() == 2);
    for (const BlockExp& b : merged.blocks) CHECK(b.dt == Approx(1.0));
  }
  SECTION("order 2 single step collapses the same way") {
    TrotterConfig cfg;
    cfg.steps = 1;
    cfg.order = 2;
    const TrotterPlan merged = merge_adjacent(build_trotter_plan(parts, g, groups, cfg));
    REQUIRE(merged.blocks.size() == 2);
    for (const BlockExp& b : merged.blocks) CHECK(b.dt == Approx(1.0));
  }
}

TEST_CASE("merging never crosses a non-commuting block") {
  const Hamiltonian h = from_strings({"XI", "ZI"});
  const auto parts = singleton_partitions(h);
  const ConflictGraph g = build_conflict_graph(parts, h);
  REQUIRE(g.edge(0, 1));
  const std::vector<std::vector<int>> groups = {{0}, {1}};
  TrotterConfig cfg;
  cfg.steps = 2;
  cfg.alternate_edges = false;  // steps [0 1][0 1]: nothing may merge
  const TrotterPlan plan = build_trotter_plan(parts, g, groups, cfg);
  const TrotterPlan merged = merge_adjacent(plan);
  CHECK(merged.blocks.size() == 4);
  // With alternation the boundary pair becomes adjacent and merges.
  cfg.alternate_edges = true;
  const TrotterPlan alt = merge_adjacent(build_trotter_plan(parts, g, groups, cfg));
  CHECK(alt.blocks.size() == 3);
}

TEST_CASE("merge and shuffle preserve the plan unitary exactly") {
  std::mt19937 seeds(2026);
  const std::vector<Hamiltonian> models = {
      build_ising({1, 6, Topology::Line}),
      build_heisenberg({1, 5, Topology::Line}),
      build_heisenberg({2, 2, Topology::Triangular}),
  };
  for (const Hamiltonian& h : models) {
    for (int order : {1, 2}) {
      TrotterConfig cfg;
      cfg.total_time = 0.7;
      cfg.steps = 2;
      cfg.order = order;
      cfg.n_max = 3;
      const auto parts = greedy_partition(h, cfg.n_max);
      const ConflictGraph g = build_conflict_graph(parts, h);
      const auto groups = greedy_commuting_groups(g);
      const TrotterPlan plan = build_trotter_plan(parts, g, groups, cfg);
      const Matrix reference = plan_to_matrix(plan, parts, h);

      const TrotterPlan merged = merge_adjacent(plan);
      CHECK(merged.blocks.size() <= plan.blocks.size());
      CHECK((plan_to_matrix(merged, parts, h) - reference).norm() < 1e-12);

      const TrotterPlan shuffled = shuffle_within_groups(merged, seeds());
      CHECK((plan_to_matrix(shuffled, parts, h) - reference).norm() < 1e-12);

      // Time conservation per partition.
      const auto before = total_dt(plan);
      const auto after = total_dt(merged);
      REQUIRE(before.size() == after.size());
      for (const auto& [partition, dt] : after)
        CHECK(dt == Approx(before.at(partition)).margin(1e-14));
      for (const auto& [partition, dt] : total_dt(shuffled))
        CHECK(dt == Approx(cfg.total_time).margin(1e-12));
    }
  }
}

TEST_CASE("shuffling is deterministic and pins merged blocks") {
  const Hamiltonian h = build_ising({1, 8, Topology::Line});
  TrotterConfig cfg;
  cfg.steps = 3;
  const auto parts = greedy_partition(h, 3);
  const ConflictGraph g = build_conflict_graph(parts, h);
  const auto groups = greedy_commuting_groups(g);
  const TrotterPlan merged = merge_adjacent(build_trotter_plan(parts, g, groups, cfg));

  const TrotterPlan a = shuffle_within_groups(merged, 42);
  const TrotterPlan b = shuffle_within_groups(merged, 42);
  REQUIRE(a.blocks.size() == b.blocks.size());
  for (std::size_t i = 0; i < a.blocks.size(); ++i) {
    CHECK(a.blocks[i].partition_id == b.blocks[i].partition_id);
    CHECK(a.blocks[i].dt == b.blocks[i].dt);
  }
  for (std::size_t i = 0; i < a.blocks.size(); ++i) {
    if (merged.blocks[i].merged) {
      CHECK(a.blocks[i].partition_id == merged.blocks[i].partition_id);
      CHECK(a.blocks[i].dt == merged.blocks[i].dt);
    }
  }
  // Singleton groups shuffle to themselves.
  const Hamiltonian two = from_strings({"XI", "ZI"});
  const auto tparts = singleton_partitions(two);
  const ConflictGraph tg = build_conflict_graph(tparts, two);
  const auto tgroups = greedy_commuting_groups(tg);
  TrotterConfig tcfg;
  tcfg.steps = 2;
  const TrotterPlan tplan = build_trotter_plan(tparts, tg, tgroups, tcfg);
  const TrotterPlan tshuffled = shuffle_within_groups(tplan, 9);
  for (std::size_t i = 0; i < tplan.blocks.size(); ++i)
    CHECK(tshuffled.blocks[i].partition_id == tplan.blocks[i].partition_id);
}

TEST_CASE("trotter error scales as 1/N at order 1 and 1/N^2 at order 2") {
  const Hamiltonian h = build_heisenberg({1, 6, Topology::Line});
  const auto parts = greedy_partition(h, 3);
  const ConflictGraph g = build_conflict_graph(parts, h);
  const auto groups = greedy_commuting_groups(g);
  const Matrix exact = expm_i_hermitian(testutil::hamiltonian_matrix(h), 0.1);

  auto plan_error = [&](int order, int steps) {
    TrotterConfig cfg;
    cfg.total_time = 0.1;
    cfg.steps = steps;
    cfg.order = order;
    cfg.alternate_edges = false;  // pure product formula scaling
    const TrotterPlan plan = build_trotter_plan(parts, g, groups, cfg);
    return phase_aligned_spectral(plan_to_matrix(plan, parts, h), exact);
  };

  const double first_ratio = plan_error(1, 8) / plan_error(1, 4);
  CHECK(first_ratio > 0.35);
  CHECK(first_ratio < 0.65);
  const double second_ratio = plan_error(2, 8) / plan_error(2, 4);
  CHECK(second_ratio > 0.15);
  CHECK(second_ratio < 0.35);
}

TEST_CASE("error bounds") {
  SECTION("fully commuting hamiltonian has zero bounds") {
    const Hamiltonian h = from_strings({"ZZI", "IZZ", "ZIZ"});
    const auto parts = singleton_partitions(h);
    TrotterConfig cfg;
    const ErrorBounds bounds = estimate_error(h, parts, cfg);
    CHECK(bounds.full == 0.0);
    CHECK(bounds.partitioned == 0.0);
    CHECK(bounds.reduction == 0.0);
    CHECK(bounds.partitioned_dense == 0.0);
  }
  SECTION("single partition is exact: partitioned bound vanishes") {
    // One Heisenberg edge: XX, YY, ZZ even commute pairwise, so both bounds
    // vanish; a 3-site chain in one partition keeps full > 0 with
    // partitioned = 0.
    const Hamiltonian edge = build_heisenberg({1, 2, Topology::Line});
    const auto edge_parts = greedy_partition(edge, 3);
    REQUIRE(edge_parts.size() == 1);
    TrotterConfig cfg;
    const ErrorBounds edge_bounds = estimate_error(edge, edge_parts, cfg);
    CHECK(edge_bounds.partitioned == 0.0);
    CHECK(edge_bounds.full == 0.0);

    const Hamiltonian chain = build_heisenberg({1, 3, Topology::Line});
    const auto chain_parts = greedy_partition(chain, 3);
    REQUIRE(chain_parts.size() == 1);
    const ErrorBounds chain_bounds = estimate_error(chain, chain_parts, cfg);
    CHECK(chain_bounds.partitioned == 0.0);
    CHECK(chain_bounds.full > 0.0);
    CHECK(chain_bounds.reduction == Approx(chain_bounds.full));
  }
  SECTION("pairing the four strings drops exactly the intra-pair norms") {
    const Hamiltonian h = from_strings({"XYZ", "YZX", "ZXY", "XZX"});
    std::vector<Partition> parts(2);
    parts[0].term_indices = {0, 1};
    parts[0].support_qubits = {0, 1, 2};
    parts[1].term_indices = {2, 3};
    parts[1].support_qubits = {0, 1, 2};
    TrotterConfig cfg;
    cfg.total_time = 1.0;
    cfg.steps = 1;
    const ErrorBounds bounds = estimate_error(h, parts, cfg);
    // Independent oracle: spectral norms of the dense pair commutators.
    auto pair_norm = [&](int i, int j) {
      const Matrix a = testutil::term_matrix(h.terms[static_cast<std::size_t>(i)]);
      const Matrix b = testutil::term_matrix(h.terms[static_cast<std::size_t>(j)]);
      return spectral_norm(a * b - b * a);
    };
    const double scale = 0.5;  // dt^2 / 2 * N with t = 1, N = 1
    CHECK(bounds.reduction == Approx(scale * (pair_norm(0, 1) + pair_norm(2, 3))).margin(1e-12));
    const double cross =
        pair_norm(0, 2) + pair_norm(0, 3) + pair_norm(1, 2) + pair_norm(1, 3);
    CHECK(bounds.partitioned == Approx(scale * cross).margin(1e-12));
    CHECK(bounds.full == Approx(bounds.partitioned + bounds.reduction).margin(1e-12));
    // The dense refinement catches cross-partition cancellation and is tighter.
    CHECK(bounds.partitioned_dense <= bounds.partitioned + 1e-12);
  }
  SECTION("partitioned <= full with dense refinement tightest, on real models") {
    for (const Hamiltonian& h : {build_ising({1, 10, Topology::Line}),
                                 build_heisenberg({5, 2, Topology::Square})}) {
      const auto parts = greedy_partition(h, 3);
      TrotterConfig cfg;
      cfg.total_time = 0.1;
      cfg.steps = 4;
      const ErrorBounds bounds = estimate_error(h, parts, cfg);
      CHECK(bounds.partitioned <= bounds.full + 1e-12);
      CHECK(bounds.partitioned_dense <= bounds.partitioned + 1e-12);
      CHECK(bounds.reduction == Approx(bounds.full - bounds.partitioned));
      CHECK(bounds.reduction >= 0.0);
    }
  }
}
