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
#include <cstdint>
#include <fstream>
#include <limits>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "kernpiler/exact_synth.hpp"
#include "kernpiler/fit.hpp"
#include "kernpiler/rng.hpp"

namespace kernpiler {

struct SynthConfig {
  double epsilon = 1e-8;          // accuracy threshold on the Frobenius error
  int max_cnots = 19;             // rollout terminal length (19 covers 3 qubits)
  double uct_c = 0.5;             // exploration constant
  int iterations = 48;            // search budget
  int gn_restarts = 10;           // random initializations per fit
  int gn_max_iters = 200;
  std::uint64_t seed = 0;
  int early_stop_cnots = -1;      // stop once a winner has <= this many CNOTs (-1: off)
  bool fd_jacobian = false;

  void validate() const {
    if (epsilon <= 0.0) throw std::invalid_argument("synth config: epsilon must be positive");
    if (max_cnots < 0) throw std::invalid_argument("synth config: max_cnots must be >= 0");
    if (iterations < 1) throw std::invalid_argument("synth config: iterations must be >= 1");
    if (gn_restarts < 1) throw std::invalid_argument("synth config: gn_restarts must be >= 1");
  }
};

struct SynthResult {
  Circuit circuit;
  double error = std::numeric_limits<double>::infinity();
  int cnot_count = 0;
  long iterations_used = 0;
  bool converged = false;
};

/// Tree bookkeeping exposed for invariant checks.
struct SearchStats {
  long root_visits = 0;
  long node_count = 0;
  bool visits_conserved = false;  // every node: visits == sum(child visits) + self evals
};

/// UCT(i) = Q_i / N_i + c sqrt(ln N_p / N_i).
inline double uct_score(double q, long n_i, long n_p, double c) {
  if (n_i < 1 || n_p < 1) throw std::invalid_argument("uct_score: visit counts must be >= 1");
  return q / static_cast<double>(n_i) +
         c * std::sqrt(std::log(static_cast<double>(n_p)) / static_cast<double>(n_i));
}

/// Simulation value: -#cnot below the accuracy threshold, -error above it.
inline double reward(double error, int cnot_count, double epsilon) {
  if (error < 0.0) throw std::invalid_argument("reward: error must be non-negative");
  return error < epsilon ? -static_cast<double>(cnot_count) : -error;
}

using CnotSeq = std::vector<std::pair<int, int>>;

namespace detail {

struct SkeletonFit {
  Circuit circuit;
  double error = std::numeric_limits<double>::infinity();
  Eigen::VectorXd params;  // raw template parameters of the best restart
};

/// Fits the full-interleave parameterization of a skeleton.  Restart 0 may be
/// warm-started from a parent skeleton's parameters (new slots randomized);
/// the remaining restarts are fully random, and all end early once the
/// threshold is met.  Returns the simplified circuit with its recomputed
/// error plus the raw parameters for warm-starting children.
inline SkeletonFit fit_skeleton(const CnotSeq& skeleton, const Matrix& target,
                                const SynthConfig& cfg, Rng& rng, int max_restarts,
                                const Eigen::VectorXd* warm_start = nullptr) {
  const int k = log2_dim(target.rows());
  const CircuitTemplate tmpl = interleaved_template(k, skeleton);
  FitOptions opts;
  opts.max_iterations = cfg.gn_max_iters;
  opts.target_error = cfg.epsilon * 1e-2;
  opts.fd_jacobian = cfg.fd_jacobian;
  // Abandon restarts whose residual stops moving: converging tails gain far
  // more than 2% per 20 iterations, stuck local minima gain nothing.
  opts.stall_window = 20;
  opts.stall_tolerance = 0.02;
  SkeletonFit best;
  const int restarts = std::min(max_restarts, cfg.gn_restarts);
  for (int restart = 0; restart < std::max(restarts, 1); ++restart) {
    Eigen::VectorXd init(tmpl.param_count());
    Eigen::Index start = 0;
    if (restart == 0 && warm_start != nullptr && warm_start->size() <= init.size()) {
      init.head(warm_start->size()) = *warm_start;
      start = warm_start->size();
    }
    for (Eigen::Index p = start; p < init.size(); ++p) init(p) = rng.uniform(-kPi, kPi);
    const FitOutcome outcome = gauss_newton_fit(tmpl, target, init, opts);
    if (outcome.ok && outcome.error < best.error) {
      best.error = outcome.error;
      best.params = outcome.params;
    }
    if (best.error < cfg.epsilon) break;
  }
  if (!std::isfinite(best.error)) {
    best.circuit = Circuit(k);
    return best;
  }
  best.circuit = simplify(realize(tmpl, best.params));
  best.error = phase_aligned_frobenius(circuit_to_matrix(best.circuit), target);
  return best;
}

}  // namespace detail

namespace detail {

/// Post-search polish: try removing gates one at a time (CNOTs first, then
/// u3 gates), keeping a removal whenever a warm-started refit stays below the
/// threshold.  The full interleave is deliberately overparameterized for the
/// optimizer's sake, so winners usually carry gates the unitary does not
/// need; this cuts CNOT count, u3 count, and depth.  Deterministic.
inline Circuit prune_fitted_circuit(const Circuit& circuit, const Matrix& target,
                                    const SynthConfig& cfg, Rng& rng) {
  const int k = circuit.n;
  CircuitTemplate tmpl;
  tmpl.k = k;
  std::vector<double> params;
  for (const Gate& g : circuit.gates) {
    if (g.kind == Gate::Kind::Cnot) {
      tmpl.slots.push_back({true, g.q0, g.q1});
    } else {
      tmpl.slots.push_back({false, g.q0, 0});
      tmpl.u3_slots += 1;
      params.push_back(g.theta);
      params.push_back(g.phi);
      params.push_back(g.lambda);
    }
  }
  FitOptions opts;
  opts.max_iterations = cfg.gn_max_iters;
  opts.target_error = cfg.epsilon * 1e-2;
  opts.fd_jacobian = cfg.fd_jacobian;
  opts.stall_window = 20;
  opts.stall_tolerance = 0.02;

  auto param_offset = [&](std::size_t slot) {
    Eigen::Index offset = 0;
    for (std::size_t i = 0; i < slot; ++i)
      if (!tmpl.slots[i].is_cnot) offset += 3;
    return offset;
  };
  // Removes slot `victim` if the remaining template still fits; u3 victims
  // drop their own parameters, CNOT victims keep every parameter.  A CNOT
  // removal changes the structure, so it also gets fresh random restarts.
  auto try_remove = [&](std::size_t victim) {
    CircuitTemplate trial = tmpl;
    const bool is_cnot = tmpl.slots[victim].is_cnot;
    trial.slots.erase(trial.slots.begin() + static_cast<std::ptrdiff_t>(victim));
    Eigen::Index skip_from = -1;
    if (!is_cnot) {
      trial.u3_slots -= 1;
      skip_from = param_offset(victim);
    }
    Eigen::VectorXd init(trial.param_count());
    Eigen::Index at = 0;
    for (Eigen::Index p = 0; p < static_cast<Eigen::Index>(params.size()); ++p) {
      if (skip_from >= 0 && p >= skip_from && p < skip_from + 3) continue;
      init(at++) = params[static_cast<std::size_t>(p)];
    }
    const int attempts = is_cnot ? 3 : 1;
    for (int attempt = 0; attempt < attempts; ++attempt) {
      if (attempt > 0) {
        for (Eigen::Index p = 0; p < init.size(); ++p) init(p) = rng.uniform(-kPi, kPi);
      }
      const FitOutcome outcome = gauss_newton_fit(trial, target, init, opts);
      if (outcome.ok && outcome.error < cfg.epsilon) {
        tmpl = std::move(trial);
        params.assign(outcome.params.data(), outcome.params.data() + outcome.params.size());
        return true;
      }
    }
    return false;
  };

  for (int pass = 0; pass < 3; ++pass) {
    bool removed = false;
    for (bool cnot_phase : {true, false}) {
      std::size_t slot = 0;
      while (slot < tmpl.slots.size()) {
        if (tmpl.slots[slot].is_cnot != cnot_phase) {
          ++slot;
          continue;
        }
        if (try_remove(slot)) {
          removed = true;  // indices shifted; retry the same position
        } else {
          ++slot;
        }
      }
    }
    if (!removed) break;
  }
  Eigen::VectorXd final_params(static_cast<Eigen::Index>(params.size()));
  for (std::size_t p = 0; p < params.size(); ++p)
    final_params(static_cast<Eigen::Index>(p)) = params[p];
  return simplify(realize(tmpl, final_params));
}

inline std::pair<Circuit, double> rollout_impl(const CnotSeq& skeleton, const Matrix& target,
                                               const SynthConfig& cfg, Rng& rng, int length,
                                               const Eigen::VectorXd* warm_start) {
  const int k = log2_dim(target.rows());
  if (static_cast<int>(skeleton.size()) > length)
    throw std::invalid_argument("rollout: skeleton longer than the terminal length");
  CnotSeq seq = skeleton;
  std::vector<std::pair<int, int>> actions;
  for (int c = 0; c < k; ++c)
    for (int t = 0; t < k; ++t)
      if (c != t) actions.emplace_back(c, t);
  while (static_cast<int>(seq.size()) < length) {
    std::pair<int, int> pick;
    do {
      pick = actions[static_cast<std::size_t>(rng.below(actions.size()))];
    } while (!seq.empty() && pick == seq.back());
    seq.push_back(pick);
  }
  const SkeletonFit fit = fit_skeleton(seq, target, cfg, rng, cfg.gn_restarts, warm_start);
  return {fit.circuit, fit.error};
}

}  // namespace detail

/// Simulation stage: complete the skeleton with uniform-random CNOTs (no
/// immediate repeats) up to cfg.max_cnots, interleave u3 gates everywhere,
/// fit over gn_restarts initializations, simplify.
inline std::pair<Circuit, double> rollout(const CnotSeq& skeleton, const Matrix& target,
                                          const SynthConfig& cfg, Rng& rng) {
  return detail::rollout_impl(skeleton, target, cfg, rng, cfg.max_cnots, nullptr);
}

namespace detail {

struct SearchNode {
  CnotSeq skeleton;
  double q_total = 0.0;
  long visits = 0;
  long self_evals = 0;
  int parent = -1;
  std::vector<int> children;
  CnotSeq unexplored;
  bool terminal = false;
  bool evaluated = false;
  double cached_value = 0.0;
  Eigen::VectorXd bare_params;  // best bare-skeleton fit, seeds child fits
  double bare_error = std::numeric_limits<double>::infinity();
};

inline CnotSeq node_actions(int k, const CnotSeq& skeleton, int max_cnots) {
  CnotSeq actions;
  if (static_cast<int>(skeleton.size()) >= max_cnots) return actions;
  for (int c = 0; c < k; ++c) {
    for (int t = 0; t < k; ++t) {
      if (c == t) continue;
      if (!skeleton.empty() && skeleton.back() == std::make_pair(c, t)) continue;
      actions.emplace_back(c, t);
    }
  }
  return actions;
}

struct BestTracker {
  Circuit circuit;
  double error = std::numeric_limits<double>::infinity();
  bool has = false;
  double epsilon;

  explicit BestTracker(double eps) : epsilon(eps) {}

  bool winner() const { return has && error < epsilon; }

  /// Priority: any winner beats any non-winner; among winners fewer CNOTs,
  /// then lower depth; among non-winners lower error.
  void offer(const Circuit& candidate, double cand_error) {
    if (!std::isfinite(cand_error)) return;
    if (!has) {
      circuit = candidate;
      error = cand_error;
      has = true;
      return;
    }
    const bool cand_win = cand_error < epsilon;
    const bool best_win = error < epsilon;
    if (cand_win != best_win) {
      if (cand_win) {
        circuit = candidate;
        error = cand_error;
      }
      return;
    }
    if (!cand_win) {
      if (cand_error < error) {
        circuit = candidate;
        error = cand_error;
      }
      return;
    }
    const CircuitMetrics cm = metrics(candidate);
    const CircuitMetrics bm = metrics(circuit);
    if (cm.cnot_count < bm.cnot_count ||
        (cm.cnot_count == bm.cnot_count && cm.depth < bm.depth)) {
      circuit = candidate;
      error = cand_error;
    }
  }
};

}  // namespace detail

/// MCTS over CNOT-only skeletons.  Selection follows UCT, expansion picks a
/// random unexplored CNOT, and each new node is valued by two fits: its bare
/// skeleton (this is what discovers short circuits) and one random completion
/// to max_cnots (the spec rollout).  Rewards follow the threshold rule and
/// are backpropagated along the path.  The best circuit is re-verified
/// against the target independently of the optimizer before returning.
inline SynthResult synthesize(const Matrix& target, const SynthConfig& cfg,
                              SearchStats* stats = nullptr) {
  cfg.validate();
  const int k = log2_dim(target.rows());
  if (target.rows() != target.cols())
    throw std::invalid_argument("synthesize: target must be square");
  const Eigen::Index dim = target.rows();
  if ((target.adjoint() * target - Matrix::Identity(dim, dim)).norm() > 1e-10)
    throw std::invalid_argument("synthesize: target is not unitary");

  SynthResult result;
  if (k == 0) {
    result.circuit = Circuit(0);
    result.circuit.global_phase = std::arg(target(0, 0));
    result.error = 0.0;
    result.converged = true;
    return result;
  }

  Rng rng(derive_seed(cfg.seed, {0x6d637473ULL}));
  detail::BestTracker best(cfg.epsilon);
  std::vector<detail::SearchNode> nodes(1);
  nodes[0].unexplored = detail::node_actions(k, {}, cfg.max_cnots);
  nodes[0].terminal = nodes[0].unexplored.empty();

  auto evaluate = [&](int node_id) -> double {
    detail::SearchNode& node = nodes[static_cast<std::size_t>(node_id)];
    // Bare-skeleton fit, warm-started from the parent's parameters; its error
    // is the gradient signal that steers the tree toward short solutions.
    const Eigen::VectorXd* warm = nullptr;
    if (node.parent >= 0 && nodes[static_cast<std::size_t>(node.parent)].bare_params.size() > 0)
      warm = &nodes[static_cast<std::size_t>(node.parent)].bare_params;
    const detail::SkeletonFit bare =
        detail::fit_skeleton(node.skeleton, target, cfg, rng, 4, warm);
    node.bare_params = bare.params;
    node.bare_error = bare.error;
    best.offer(bare.circuit, bare.error);
    double value = std::isfinite(bare.error)
                       ? reward(bare.error, static_cast<int>(metrics(bare.circuit).cnot_count),
                                cfg.epsilon)
                       : -std::numeric_limits<double>::max();
    // Simulation: the terminal length shrinks to one below the best winner,
    // so completions always probe for an improvement (a fixed-length rollout
    // would score every simulation identically).
    int roll_length = cfg.max_cnots;
    if (best.winner())
      roll_length = std::min(roll_length, static_cast<int>(metrics(best.circuit).cnot_count) - 1);
    if (static_cast<int>(node.skeleton.size()) < roll_length) {
      const Eigen::VectorXd* roll_warm = node.bare_params.size() > 0 ? &node.bare_params : nullptr;
      auto [roll_circuit, roll_error] =
          detail::rollout_impl(node.skeleton, target, cfg, rng, roll_length, roll_warm);
      best.offer(roll_circuit, roll_error);
      if (std::isfinite(roll_error)) {
        value = std::max(value, reward(roll_error,
                                       static_cast<int>(metrics(roll_circuit).cnot_count),
                                       cfg.epsilon));
      }
    }
    node.evaluated = true;
    node.cached_value = value;
    return value;
  };

  auto backpropagate = [&](int node_id, double value) {
    for (int at = node_id; at != -1; at = nodes[static_cast<std::size_t>(at)].parent) {
      nodes[static_cast<std::size_t>(at)].q_total += value;
      nodes[static_cast<std::size_t>(at)].visits += 1;
    }
  };

  // Root evaluation counts as the first iteration; it is also what resolves
  // targets needing zero CNOTs.
  nodes[0].self_evals = 1;
  backpropagate(0, evaluate(0));
  result.iterations_used = 1;

  auto should_stop = [&]() {
    if (result.iterations_used >= cfg.iterations) return true;
    if (cfg.early_stop_cnots >= 0 && best.winner() &&
        metrics(best.circuit).cnot_count <= cfg.early_stop_cnots)
      return true;
    return false;
  };

  while (!should_stop()) {
    // Selection: descend while fully expanded and non-terminal.
    int node_id = 0;
    while (nodes[static_cast<std::size_t>(node_id)].unexplored.empty() &&
           !nodes[static_cast<std::size_t>(node_id)].children.empty()) {
      const detail::SearchNode& node = nodes[static_cast<std::size_t>(node_id)];
      int best_child = node.children.front();
      double best_score = -std::numeric_limits<double>::infinity();
      for (int child : node.children) {
        const detail::SearchNode& c = nodes[static_cast<std::size_t>(child)];
        const double score = uct_score(c.q_total, c.visits, node.visits, cfg.uct_c);
        if (score > best_score) {
          best_score = score;
          best_child = child;
        }
      }
      node_id = best_child;
    }

    detail::SearchNode& node = nodes[static_cast<std::size_t>(node_id)];
    if (!node.unexplored.empty()) {
      // Expansion: random unexplored action.
      const std::size_t pick = static_cast<std::size_t>(rng.below(node.unexplored.size()));
      const std::pair<int, int> action = node.unexplored[pick];
      node.unexplored.erase(node.unexplored.begin() + static_cast<std::ptrdiff_t>(pick));
      detail::SearchNode child;
      child.skeleton = node.skeleton;
      child.skeleton.push_back(action);
      child.parent = node_id;
      child.unexplored = detail::node_actions(k, child.skeleton, cfg.max_cnots);
      child.terminal = child.unexplored.empty();
      child.self_evals = 1;
      nodes.push_back(std::move(child));
      const int child_id = static_cast<int>(nodes.size()) - 1;
      nodes[static_cast<std::size_t>(node_id)].children.push_back(child_id);
      backpropagate(child_id, evaluate(child_id));
    } else {
      // Terminal (or exhausted) leaf: reuse its cached value.
      detail::SearchNode& leaf = nodes[static_cast<std::size_t>(node_id)];
      const double value = leaf.evaluated ? leaf.cached_value : evaluate(node_id);
      leaf.self_evals += 1;
      backpropagate(node_id, value);
      if (node_id == 0) {
        result.iterations_used += 1;
        break;  // the root has no actions at all; nothing more to search
      }
    }
    result.iterations_used += 1;
  }

  if (best.has) {
    result.circuit = best.circuit;
    if (best.winner() && !result.circuit.gates.empty()) {
      Circuit pruned = detail::prune_fitted_circuit(result.circuit, target, cfg, rng);
      if (phase_aligned_frobenius(circuit_to_matrix(pruned), target) < cfg.epsilon)
        result.circuit = std::move(pruned);
    }
    // Independent re-verification of the optimizer's claim.
    result.error = phase_aligned_frobenius(circuit_to_matrix(result.circuit), target);
    result.cnot_count = static_cast<int>(metrics(result.circuit).cnot_count);
    result.converged = result.error < cfg.epsilon;
  }
  if (stats != nullptr) {
    stats->root_visits = nodes[0].visits;
    stats->node_count = static_cast<long>(nodes.size());
    stats->visits_conserved = true;
    for (const detail::SearchNode& node : nodes) {
      long child_visits = 0;
      for (int child : node.children) child_visits += nodes[static_cast<std::size_t>(child)].visits;
      if (node.visits != child_visits + node.self_evals) stats->visits_conserved = false;
    }
  }
  return result;
}

// ---------------------------------------------------------------------------
// Synthesis cache keyed by a phase-normalized, quantized matrix fingerprint.
// ---------------------------------------------------------------------------

struct CacheKey {
  std::int32_t dim = 0;
  std::vector<std::pair<std::int64_t, std::int64_t>> entries;
  std::uint64_t digest = 0;

  bool operator==(const CacheKey& other) const {
    return dim == other.dim && digest == other.digest && entries == other.entries;
  }
};

/// Phase normalization fixes the first entry of largest magnitude to be real
/// positive; entries are then rounded to a 1e-12 grid.  Phase-rotated copies
/// of a matrix therefore share a fingerprint.
inline CacheKey cache_fingerprint(const Matrix& u) {
  CacheKey key;
  key.dim = static_cast<std::int32_t>(u.rows());
  double max_abs = 0.0;
  for (Eigen::Index i = 0; i < u.size(); ++i) max_abs = std::max(max_abs, std::abs(u.data()[i]));
  complexd anchor(1.0, 0.0);
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    if (std::abs(u.data()[i]) >= max_abs * (1.0 - 1e-9)) {
      anchor = u.data()[i];
      break;
    }
  }
  const complexd rotation = std::abs(anchor) > 0.0 ? std::conj(anchor) / std::abs(anchor)
                                                   : complexd(1.0, 0.0);
  key.entries.reserve(static_cast<std::size_t>(u.size()));
  std::uint64_t digest = splitmix64(static_cast<std::uint64_t>(key.dim));
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    const complexd v = u.data()[i] * rotation;
    const std::int64_t re = std::llround(v.real() * 1e12);
    const std::int64_t im = std::llround(v.imag() * 1e12);
    key.entries.emplace_back(re, im);
    digest = splitmix64(digest ^ static_cast<std::uint64_t>(re));
    digest = splitmix64(digest ^ static_cast<std::uint64_t>(im));
  }
  key.digest = digest;
  return key;
}

/// In-memory cache of synthesized blocks, optionally persisted to a binary
/// file.  Not thread-safe; the compiler consults it from one thread only.
class SynthCache {
 public:
  const SynthResult* lookup(const Matrix& u) const {
    const CacheKey key = cache_fingerprint(u);
    const auto it = buckets_.find(key.digest);
    if (it == buckets_.end()) return nullptr;
    for (const auto& [stored, result] : it->second) {
      if (stored == key) return &result;
    }
    return nullptr;
  }

  void store(const Matrix& u, const SynthResult& result) {
    const CacheKey key = cache_fingerprint(u);
    auto& bucket = buckets_[key.digest];
    for (const auto& [stored, existing] : bucket) {
      if (stored == key) return;  // idempotent
    }
    bucket.emplace_back(key, result);
    ++count_;
  }

  std::size_t size() const { return count_; }

  void save(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write cache file: " + path);
    write_u64(out, kMagic);
    write_u64(out, count_);
    for (const auto& [digest, bucket] : buckets_) {
      for (const auto& [key, result] : bucket) {
        write_u64(out, static_cast<std::uint64_t>(key.dim));
        for (const auto& [re, im] : key.entries) {
          write_u64(out, static_cast<std::uint64_t>(re));
          write_u64(out, static_cast<std::uint64_t>(im));
        }
        write_u64(out, static_cast<std::uint64_t>(result.circuit.n));
        write_u64(out, result.circuit.gates.size());
        for (const Gate& g : result.circuit.gates) {
          write_u64(out, g.kind == Gate::Kind::Cnot ? 1 : 0);
          write_u64(out, static_cast<std::uint64_t>(g.q0));
          write_u64(out, static_cast<std::uint64_t>(g.q1));
          write_f64(out, g.theta);
          write_f64(out, g.phi);
          write_f64(out, g.lambda);
        }
        write_f64(out, result.circuit.global_phase);
        write_f64(out, result.error);
        write_u64(out, static_cast<std::uint64_t>(result.cnot_count));
        write_u64(out, result.converged ? 1 : 0);
      }
    }
  }

  bool load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return false;
    if (read_u64(in) != kMagic) throw std::runtime_error("bad cache file magic: " + path);
    const std::uint64_t entries = read_u64(in);
    for (std::uint64_t e = 0; e < entries; ++e) {
      CacheKey key;
      key.dim = static_cast<std::int32_t>(read_u64(in));
      const std::size_t cells = static_cast<std::size_t>(key.dim) * static_cast<std::size_t>(key.dim);
      key.entries.resize(cells);
      std::uint64_t digest = splitmix64(static_cast<std::uint64_t>(key.dim));
      for (auto& [re, im] : key.entries) {
        re = static_cast<std::int64_t>(read_u64(in));
        im = static_cast<std::int64_t>(read_u64(in));
        digest = splitmix64(digest ^ static_cast<std::uint64_t>(re));
        digest = splitmix64(digest ^ static_cast<std::uint64_t>(im));
      }
      key.digest = digest;
      SynthResult result;
      result.circuit.n = static_cast<int>(read_u64(in));
      const std::uint64_t gate_count = read_u64(in);
      for (std::uint64_t i = 0; i < gate_count; ++i) {
        const bool is_cnot = read_u64(in) == 1;
        const int q0 = static_cast<int>(read_u64(in));
        const int q1 = static_cast<int>(read_u64(in));
        const double theta = read_f64(in);
        const double phi = read_f64(in);
        const double lambda = read_f64(in);
        result.circuit.gates.push_back(is_cnot ? Gate::cnot(q0, q1)
                                               : Gate::u3(q0, theta, phi, lambda));
      }
      result.circuit.global_phase = read_f64(in);
      result.error = read_f64(in);
      result.cnot_count = static_cast<int>(read_u64(in));
      result.converged = read_u64(in) == 1;
      if (!in) throw std::runtime_error("truncated cache file: " + path);
      auto& bucket = buckets_[key.digest];
      bucket.emplace_back(std::move(key), std::move(result));
      ++count_;
    }
    return true;
  }

 private:
  static constexpr std::uint64_t kMagic = 0x4b50435348453031ULL;  // "KPCSHE01"

  static void write_u64(std::ofstream& out, std::uint64_t v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(v));
  }
  static void write_f64(std::ofstream& out, double v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(v));
  }
  static std::uint64_t read_u64(std::ifstream& in) {
    std::uint64_t v = 0;
    in.read(reinterpret_cast<char*>(&v), sizeof(v));
    return v;
  }
  static double read_f64(std::ifstream& in) {
    double v = 0;
    in.read(reinterpret_cast<char*>(&v), sizeof(v));
    return v;
  }

  std::unordered_map<std::uint64_t, std::vector<std::pair<CacheKey, SynthResult>>> buckets_;
  std::size_t count_ = 0;
};

}  // namespace kernpiler
