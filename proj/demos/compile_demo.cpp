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

// Compiles a 6-qubit Heisenberg chain and compares the partial-Trotter
// pipeline against the per-term ladder baseline at the same step count.

#include <iostream>

#include "kernpiler/compiler.hpp"

int main() {
  using namespace kernpiler;

  const Hamiltonian h = build_heisenberg({1, 6, Topology::Line});

  CompileOptions opts;
  opts.time = 0.1;
  opts.steps = 2;
  opts.order = 1;
  opts.seed = 1;

  for (Method method : {Method::Kernpiler, Method::Naive1}) {
    opts.method = method;
    const CompileResult result = compile(h, opts);
    std::cout << result.report.method << ": cnot=" << result.report.cnot_count
              << " u3=" << result.report.u3_count << " depth=" << result.report.depth
              << " spectral_error=" << result.report.spectral_error << "\n";
  }

  const CompileResult kern = compile(h, opts);
  std::cout << "\nQASM preview (first lines):\n";
  const std::string qasm = emit_qasm(kern.circuit);
  std::cout << qasm.substr(0, qasm.find('\n', 120)) << "\n...\n";
  return 0;
}
