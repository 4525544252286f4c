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

// Synthesizes one partial-Trotter block of a Heisenberg chain directly with
// the MCTS search and prints the circuit it found.

#include <iostream>

#include "kernpiler/mcts_synth.hpp"
#include "kernpiler/models.hpp"
#include "kernpiler/partition.hpp"
#include "kernpiler/qasm.hpp"

int main() {
  using namespace kernpiler;

  const Hamiltonian h = build_heisenberg({1, 6, Topology::Line});
  const auto partitions = greedy_partition(h, 3);
  const Partition& block = partitions.front();

  std::cout << "block terms:";
  for (int t : block.term_indices)
    std::cout << " " << h.terms[static_cast<std::size_t>(t)].paulis.str();
  std::cout << "\n";

  const Matrix target = expm_i_hermitian(partition_matrix(h, block), 0.1);

  SynthConfig cfg;
  cfg.iterations = 48;
  cfg.seed = 7;
  cfg.early_stop_cnots = 8;
  const SynthResult result = synthesize(target, cfg);

  std::cout << "error=" << result.error << " cnots=" << result.cnot_count
            << " converged=" << (result.converged ? "yes" : "no")
            << " iterations=" << result.iterations_used << "\n\n";
  std::cout << emit_qasm(result.circuit);
  return 0;
}
