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
#include <chrono>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <json.hpp>

#include "kernpiler/exact_synth.hpp"
#include "kernpiler/mcts_synth.hpp"
#include "kernpiler/models.hpp"
#include "kernpiler/partition.hpp"
#include "kernpiler/qasm.hpp"
#include "kernpiler/schedule.hpp"

namespace kernpiler {

enum class Method { Kernpiler, Naive1, Naive2 };

inline Method method_from_string(const std::string& s) {
  if (s == "kernpiler") return Method::Kernpiler;
  if (s == "naive1") return Method::Naive1;
  if (s == "naive2") return Method::Naive2;
  throw std::invalid_argument("unknown method: " + s);
}

inline const char* method_name(Method m) {
  switch (m) {
    case Method::Kernpiler: return "kernpiler";
    case Method::Naive1: return "naive1";
    case Method::Naive2: return "naive2";
  }
  return "?";
}

struct CompileOptions {
  Method method = Method::Kernpiler;
  double time = 1.0;
  int steps = 1;
  int order = 1;
  int n_max = 3;
  std::uint64_t seed = 0;
  bool deterministic = false;
  bool alternate_edges = true;
  bool merge = true;
  bool shuffle = true;
  double target_error = 0.0;  // > 0: grow the step count until the measured
                              // spectral error meets the target
  int max_target_steps = 64;
  int dense_limit = kDenseQubitLimit;
  bool measure_error = true;  // only possible at or below the dense limit
  int threads = 0;            // 0: hardware concurrency
  SynthConfig synth;          // per-block budgets are derived from this base

  TrotterConfig trotter() const {
    TrotterConfig cfg;
    cfg.total_time = time;
    cfg.steps = steps;
    cfg.order = order;
    cfg.shuffle_seed = seed;
    cfg.n_max = n_max;
    cfg.alternate_edges = alternate_edges;
    return cfg;
  }
};

struct CompileReport {
  std::string method;
  int num_qubits = 0;
  long num_terms = 0;
  double time = 0.0;
  int steps = 1;
  int order = 1;
  int group_size = 3;
  std::uint64_t seed = 0;
  long cnot_count = 0;
  long u3_count = 0;
  int depth = 0;
  bool has_measured_error = false;
  double spectral_error = 0.0;
  double frobenius_error = 0.0;
  ErrorBounds predicted_bounds;
  double global_phase_offset = 0.0;
  long num_partitions = 0;
  long num_groups = 0;
  long blocks_synthesized = 0;
  long cache_hits = 0;
  bool all_blocks_converged = true;
  bool deterministic = false;
  long wall_time_ms = 0;
};

inline nlohmann::ordered_json report_to_json(const CompileReport& r) {
  nlohmann::ordered_json j;
  j["schema"] = 1;
  j["method"] = r.method;
  j["num_qubits"] = r.num_qubits;
  j["num_terms"] = r.num_terms;
  j["t"] = r.time;
  j["steps"] = r.steps;
  j["order"] = r.order;
  j["group_size"] = r.group_size;
  j["seed"] = r.seed;
  j["cnot_count"] = r.cnot_count;
  j["u3_count"] = r.u3_count;
  j["depth"] = r.depth;
  if (r.has_measured_error) {
    j["spectral_error"] = r.spectral_error;
    j["frobenius_error"] = r.frobenius_error;
  } else {
    j["spectral_error"] = nullptr;
    j["frobenius_error"] = nullptr;
  }
  j["predicted_bounds"] = {{"full", r.predicted_bounds.full},
                           {"partitioned", r.predicted_bounds.partitioned},
                           {"reduction", r.predicted_bounds.reduction},
                           {"partitioned_dense", r.predicted_bounds.partitioned_dense}};
  j["global_phase_offset"] = r.global_phase_offset;
  j["num_partitions"] = r.num_partitions;
  j["num_groups"] = r.num_groups;
  j["blocks_synthesized"] = r.blocks_synthesized;
  j["all_blocks_converged"] = r.all_blocks_converged;
  j["deterministic"] = r.deterministic;
  j["wall_time_ms"] = r.wall_time_ms;
  return j;
}

struct CompileResult {
  Circuit circuit;
  CompileReport report;
};

namespace detail {

inline std::uint64_t hamiltonian_hash(const Hamiltonian& h) {
  std::uint64_t hash = splitmix64(static_cast<std::uint64_t>(h.n));
  for (const PauliTerm& t : h.terms) {
    hash = splitmix64(hash ^ std::bit_cast<std::uint64_t>(t.coefficient));
    hash = splitmix64(hash ^ t.paulis.hash());
  }
  hash = splitmix64(hash ^ std::bit_cast<std::uint64_t>(h.identity_offset));
  return hash;
}

inline Matrix terms_matrix(const Hamiltonian& h, int dense_limit) {
  std::vector<int> order(static_cast<std::size_t>(h.n));
  for (int q = 0; q < h.n; ++q) order[static_cast<std::size_t>(q)] = q;
  return to_matrix(h.terms, order, dense_limit);
}

}  // namespace detail

/// exp(i t H) on the term content of h (the identity offset is a reported
/// global phase, not part of the comparison target).  Memoized per process;
/// the 10-qubit eigendecompositions behind verification are seconds each.
inline Matrix exact_evolution(const Hamiltonian& h, double t,
                              int dense_limit = kDenseQubitLimit) {
  if (h.n > dense_limit)
    throw std::invalid_argument("exact_evolution: qubit count exceeds the dense limit");
  static std::map<std::pair<std::uint64_t, std::uint64_t>, std::shared_ptr<const Matrix>> memo;
  static std::mutex mutex;
  const auto key = std::make_pair(detail::hamiltonian_hash(h), std::bit_cast<std::uint64_t>(t));
  {
    std::lock_guard<std::mutex> lock(mutex);
    const auto it = memo.find(key);
    if (it != memo.end()) return *it->second;
  }
  Matrix result = expm_i_hermitian(detail::terms_matrix(h, dense_limit), t);
  std::lock_guard<std::mutex> lock(mutex);
  const auto [it, inserted] = memo.emplace(key, std::make_shared<const Matrix>(std::move(result)));
  return *it->second;
}

namespace detail {

/// Per-block search budgets; qubit counts above 3 need a larger CNOT budget
/// and are exploratory.
inline SynthConfig block_synth_config(const SynthConfig& base, int k, std::uint64_t job_seed) {
  SynthConfig cfg = base;
  cfg.seed = job_seed;
  if (k <= 1) {
    cfg.max_cnots = 0;
    cfg.iterations = 1;
  } else if (k == 2) {
    cfg.max_cnots = 3;
    cfg.iterations = std::min(cfg.iterations, 24);
  } else if (k == 3) {
    cfg.max_cnots = std::min(cfg.max_cnots, 19);
  } else {
    // Above three qubits the 19-CNOT bound no longer applies; exploratory.
    cfg.max_cnots = std::max(cfg.max_cnots, 25 * k * k);
    cfg.iterations = std::min(cfg.iterations, 8);
  }
  return cfg;
}

/// Naive full-Trotter baseline: one CNOT-ladder exponential per term, in the
/// Hamiltonian's term order, repeated per step; order 2 reflects each step.
inline Circuit naive_circuit(const Hamiltonian& h, double time, int steps, int order) {
  Circuit c(h.n);
  const double dt = time / steps;
  for (int step = 0; step < steps; ++step) {
    if (order == 1) {
      for (const PauliTerm& term : h.terms) {
        const Circuit ladder = pauli_exp_circuit(term, dt);
        c.gates.insert(c.gates.end(), ladder.gates.begin(), ladder.gates.end());
        c.global_phase += ladder.global_phase;
      }
    } else {
      for (const PauliTerm& term : h.terms) {
        const Circuit ladder = pauli_exp_circuit(term, dt / 2.0);
        c.gates.insert(c.gates.end(), ladder.gates.begin(), ladder.gates.end());
        c.global_phase += ladder.global_phase;
      }
      for (auto it = h.terms.rbegin(); it != h.terms.rend(); ++it) {
        const Circuit ladder = pauli_exp_circuit(*it, dt / 2.0);
        c.gates.insert(c.gates.end(), ladder.gates.begin(), ladder.gates.end());
        c.global_phase += ladder.global_phase;
      }
    }
  }
  return c;
}

struct BlockJob {
  CacheKey key;
  Matrix target;
  int k = 0;
  SynthResult result;
  bool done = false;
};

}  // namespace detail

/// Full pipeline: partition, schedule (conflict graph, groups, plan, merge,
/// shuffle), synthesize blocks (cache-assisted MCTS; exact ladders for
/// single-term blocks and for blocks whose search did not converge), then a
/// final peephole pass.  naive1/naive2 skip everything but the ladders.
inline CompileResult compile(const Hamiltonian& h, const CompileOptions& opts,
                             SynthCache* cache = nullptr) {
  const auto start = std::chrono::steady_clock::now();
  if (opts.order != 1 && opts.order != 2)
    throw std::invalid_argument("compile: order must be 1 or 2");
  if (opts.steps < 1) throw std::invalid_argument("compile: steps must be >= 1");

  if (opts.target_error > 0.0) {
    if (h.n > opts.dense_limit)
      throw std::invalid_argument("compile: target-error search needs measurable errors");
    CompileOptions probe = opts;
    probe.target_error = 0.0;
    for (int steps = opts.steps; steps <= opts.max_target_steps; ++steps) {
      probe.steps = steps;
      CompileResult result = compile(h, probe, cache);
      if (result.report.spectral_error <= opts.target_error) return result;
    }
    throw std::runtime_error("compile: target error not reached within the step limit");
  }

  CompileResult out;
  CompileReport& report = out.report;
  report.method = method_name(opts.method);
  report.num_qubits = h.n;
  report.num_terms = static_cast<long>(h.terms.size());
  report.time = opts.time;
  report.steps = opts.steps;
  report.order = opts.order;
  report.group_size = opts.n_max;
  report.seed = opts.seed;
  report.global_phase_offset = h.identity_offset;
  report.deterministic = opts.deterministic;

  const TrotterConfig tcfg = opts.trotter();

  if (opts.method != Method::Kernpiler) {
    out.circuit = simplify(detail::naive_circuit(h, opts.time, opts.steps,
                                                 opts.method == Method::Naive1 ? 1 : 2));
    // Bounds for the unpartitioned baseline: every term is its own partition.
    std::vector<Partition> singletons;
    for (std::size_t i = 0; i < h.terms.size(); ++i) {
      Partition p;
      p.term_indices.push_back(static_cast<int>(i));
      const auto sup = h.terms[i].paulis.support();
      p.support_qubits.insert(sup.begin(), sup.end());
      singletons.push_back(std::move(p));
    }
    report.predicted_bounds = estimate_error(h, singletons, tcfg, opts.dense_limit);
    report.num_partitions = static_cast<long>(singletons.size());
    report.num_groups = 0;
  } else {
    const std::vector<Partition> partitions = greedy_partition(h, opts.n_max);
    const ConflictGraph graph = build_conflict_graph(partitions, h, opts.dense_limit);
    const std::vector<std::vector<int>> groups = greedy_commuting_groups(graph);
    TrotterPlan plan = build_trotter_plan(partitions, graph, groups, tcfg);
    if (opts.merge) plan = merge_adjacent(plan);
    if (opts.shuffle) plan = shuffle_within_groups(plan, derive_seed(opts.seed, {0x73687566ULL}));
    report.num_partitions = static_cast<long>(partitions.size());
    report.num_groups = static_cast<long>(groups.size());
    report.predicted_bounds = estimate_error(h, partitions, tcfg, opts.dense_limit);

    // Collect distinct multi-term block targets in first-occurrence order.
    std::vector<detail::BlockJob> jobs;
    std::vector<int> block_job(plan.blocks.size(), -1);
    for (std::size_t b = 0; b < plan.blocks.size(); ++b) {
      const BlockExp& block = plan.blocks[b];
      const Partition& part = partitions[static_cast<std::size_t>(block.partition_id)];
      if (part.term_indices.size() < 2) continue;  // single terms go to exact ladders
      const Matrix target =
          expm_i_hermitian(partition_matrix(h, part, opts.dense_limit), block.dt);
      const CacheKey key = cache_fingerprint(target);
      int job_id = -1;
      for (std::size_t j = 0; j < jobs.size(); ++j) {
        if (jobs[j].key == key) {
          job_id = static_cast<int>(j);
          break;
        }
      }
      if (job_id < 0) {
        detail::BlockJob job;
        job.key = key;
        job.target = target;
        job.k = static_cast<int>(part.support_qubits.size());
        if (cache != nullptr) {
          if (const SynthResult* hit = cache->lookup(target); hit != nullptr) {
            job.result = *hit;
            job.done = true;
            ++report.cache_hits;
          }
        }
        jobs.push_back(std::move(job));
        job_id = static_cast<int>(jobs.size()) - 1;
      }
      block_job[b] = job_id;
    }

    // Synthesize pending jobs; each job owns a seed derived from its
    // first-occurrence index, so the worker count never changes the output.
    std::vector<std::size_t> pending;
    for (std::size_t j = 0; j < jobs.size(); ++j)
      if (!jobs[j].done) pending.push_back(j);
    const unsigned hardware = std::max(1u, std::thread::hardware_concurrency());
    const std::size_t workers =
        opts.deterministic ? 1
                           : std::min<std::size_t>(pending.size(),
                                                   opts.threads > 0 ? static_cast<unsigned>(opts.threads)
                                                                    : hardware);
    auto run_job = [&](std::size_t j) {
      detail::BlockJob& job = jobs[j];
      const SynthConfig cfg = detail::block_synth_config(
          opts.synth, job.k, derive_seed(opts.seed, {0x73796e74ULL, j}));
      job.result = synthesize(job.target, cfg);
      job.done = true;
    };
    if (workers <= 1) {
      for (std::size_t j : pending) run_job(j);
    } else {
      std::vector<std::thread> pool;
      std::mutex queue_mutex;
      std::size_t next = 0;
      for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&]() {
          while (true) {
            std::size_t mine;
            {
              std::lock_guard<std::mutex> lock(queue_mutex);
              if (next >= pending.size()) return;
              mine = next++;
            }
            run_job(pending[mine]);
          }
        });
      }
      for (std::thread& worker : pool) worker.join();
    }
    for (const detail::BlockJob& job : jobs) {
      if (cache != nullptr) cache->store(job.target, job.result);
      report.blocks_synthesized += 1;
    }

    // Assemble the circuit in plan order.
    Circuit assembled(h.n);
    for (std::size_t b = 0; b < plan.blocks.size(); ++b) {
      const BlockExp& block = plan.blocks[b];
      const Partition& part = partitions[static_cast<std::size_t>(block.partition_id)];
      if (block_job[b] < 0) {
        const PauliTerm& term = h.terms[static_cast<std::size_t>(part.term_indices.front())];
        const Circuit ladder = pauli_exp_circuit(term, block.dt);
        assembled.gates.insert(assembled.gates.end(), ladder.gates.begin(), ladder.gates.end());
        assembled.global_phase += ladder.global_phase;
        continue;
      }
      const detail::BlockJob& job = jobs[static_cast<std::size_t>(block_job[b])];
      if (job.result.converged) {
        assembled.append_mapped(job.result.circuit, part.support_sorted());
      } else {
        // Best-effort fallback: exact per-term ladders for this block.
        report.all_blocks_converged = false;
        for (int index : part.term_indices) {
          const Circuit ladder =
              pauli_exp_circuit(h.terms[static_cast<std::size_t>(index)], block.dt);
          assembled.gates.insert(assembled.gates.end(), ladder.gates.begin(), ladder.gates.end());
          assembled.global_phase += ladder.global_phase;
        }
      }
    }
    out.circuit = simplify(assembled);
  }

  const CircuitMetrics m = metrics(out.circuit);
  report.cnot_count = m.cnot_count;
  report.u3_count = m.u3_count;
  report.depth = m.depth;

  if (opts.measure_error && h.n <= opts.dense_limit) {
    const Matrix circuit_matrix = circuit_to_matrix(out.circuit, opts.dense_limit);
    const Matrix& exact = exact_evolution(h, opts.time, opts.dense_limit);
    const double alpha = align_phase(circuit_matrix, exact);
    const Matrix diff = circuit_matrix * std::exp(complexd(0.0, alpha)) - exact;
    report.has_measured_error = true;
    report.spectral_error = spectral_norm(diff);
    report.frobenius_error = diff.norm();
  }

  const auto stop = std::chrono::steady_clock::now();
  report.wall_time_ms =
      opts.deterministic
          ? 0
          : std::chrono::duration_cast<std::chrono::milliseconds>(stop - start).count();
  return out;
}

// ---------------------------------------------------------------------------
// analyze / verify
// ---------------------------------------------------------------------------

inline nlohmann::ordered_json analyze(const Hamiltonian& h, const TrotterConfig& cfg,
                                      int dense_limit = kDenseQubitLimit) {
  const std::vector<Partition> partitions = greedy_partition(h, cfg.n_max);
  const ConflictGraph graph = build_conflict_graph(partitions, h, dense_limit);
  const std::vector<std::vector<int>> groups = greedy_commuting_groups(graph);
  const ErrorBounds bounds = estimate_error(h, partitions, cfg, dense_limit);
  nlohmann::ordered_json j;
  j["schema"] = 1;
  j["num_qubits"] = h.n;
  j["num_terms"] = h.terms.size();
  j["group_size"] = cfg.n_max;
  j["partitions"] = nlohmann::ordered_json::array();
  for (const Partition& p : partitions) {
    nlohmann::ordered_json entry;
    entry["terms"] = nlohmann::ordered_json::array();
    for (int t : p.term_indices)
      entry["terms"].push_back(h.terms[static_cast<std::size_t>(t)].paulis.str());
    entry["support"] = p.support_sorted();
    j["partitions"].push_back(entry);
  }
  j["conflict_graph"] = {{"vertices", graph.num_vertices}, {"edges", graph.edge_count()}};
  j["groups"] = nlohmann::ordered_json::array();
  for (const auto& group : groups) j["groups"].push_back(group);
  j["predicted_bounds"] = {{"full", bounds.full},
                           {"partitioned", bounds.partitioned},
                           {"reduction", bounds.reduction},
                           {"partitioned_dense", bounds.partitioned_dense}};
  return j;
}

struct VerifyReport {
  double spectral_error = 0.0;
  double frobenius_error = 0.0;
  CircuitMetrics metrics;
};

/// Min-over-global-phase distance between the circuit and exp(i t H).
inline VerifyReport verify_circuit(const Circuit& c, const Hamiltonian& h, double t,
                                   int dense_limit = kDenseQubitLimit) {
  if (c.n != h.n) throw std::invalid_argument("verify: circuit and hamiltonian qubit counts differ");
  if (h.n > dense_limit) throw std::invalid_argument("verify: qubit count exceeds the dense limit");
  VerifyReport report;
  const Matrix circuit_matrix = circuit_to_matrix(c, dense_limit);
  const Matrix& exact = exact_evolution(h, t, dense_limit);
  const double alpha = align_phase(circuit_matrix, exact);
  const Matrix diff = circuit_matrix * std::exp(complexd(0.0, alpha)) - exact;
  report.spectral_error = spectral_norm(diff);
  report.frobenius_error = diff.norm();
  report.metrics = metrics(c);
  return report;
}

}  // namespace kernpiler
