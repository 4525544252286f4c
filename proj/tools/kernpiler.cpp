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

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "kernpiler/compiler.hpp"

namespace {

using namespace kernpiler;

struct SourceArgs {
  std::string model;
  std::string hamiltonian_file;
  int rows = 1;
  int cols = 1;
  std::string topology = "line";

  void attach(CLI::App* cmd) {
    cmd->add_option("--model", model, "generator: ising, heisenberg or fh");
    cmd->add_option("--hamiltonian", hamiltonian_file, "hamiltonian JSON file");
    cmd->add_option("--rows", rows, "grid rows");
    cmd->add_option("--cols", cols, "grid columns");
    cmd->add_option("--topology", topology, "line, square or triangular");
  }

  Hamiltonian build() const {
    if (!hamiltonian_file.empty()) return load_hamiltonian(hamiltonian_file);
    if (model.empty())
      throw CLI::ValidationError("source", "need --model or --hamiltonian");
    GridSpec grid{rows, cols, topology_from_string(topology)};
    ModelParams params;
    if (model == "ising") return build_ising(grid, params);
    if (model == "heisenberg") return build_heisenberg(grid, params);
    if (model == "fh") return build_fermi_hubbard(grid, params);
    throw CLI::ValidationError("--model", "unknown model: " + model);
  }

  std::string label() const {
    if (!hamiltonian_file.empty()) return hamiltonian_file;
    std::ostringstream out;
    out << model << "-" << topology << "-" << rows << "x" << cols;
    return out.str();
  }
};

struct CompileArgs {
  SourceArgs source;
  CompileOptions options;
  std::string method = "kernpiler";
  std::string out_path;
  std::string report_path;
  std::string cache_path;
  bool no_merge = false;
  bool no_shuffle = false;
  bool no_alternate = false;
  bool no_measure = false;

  void attach(CLI::App* cmd) {
    source.attach(cmd);
    cmd->add_option("--time,-t", options.time, "total evolution time");
    cmd->add_option("--steps", options.steps, "number of product-formula steps");
    cmd->add_option("--order", options.order, "product formula order (1 or 2)")
        ->check(CLI::IsMember({1, 2}));
    cmd->add_option("--group-size", options.n_max, "max qubits per partition (1-4)");
    cmd->add_option("--target-error", options.target_error,
                    "grow the step count until the measured spectral error meets this");
    cmd->add_option("--seed", options.seed, "seed for shuffling and synthesis");
    cmd->add_flag("--deterministic", options.deterministic,
                  "single-threaded, bit-reproducible output");
    cmd->add_option("--threads", options.threads, "synthesis worker count (0 = auto)");
    cmd->add_option("--method", method, "kernpiler, naive1 or naive2");
    cmd->add_option("--cache", cache_path, "synthesis cache file");
    cmd->add_option("--out", out_path, "QASM output path");
    cmd->add_option("--report", report_path, "JSON report path");
    cmd->add_flag("--no-merge", no_merge, "disable cross-boundary block merging");
    cmd->add_flag("--no-shuffle", no_shuffle, "disable intra-group shuffling");
    cmd->add_flag("--no-alternate", no_alternate, "disable edge-group alternation");
    cmd->add_flag("--no-measure", no_measure, "skip the dense error measurement");
    cmd->add_option("--synth-iterations", options.synth.iterations, "MCTS budget per block");
  }

  CompileResult run() {
    options.method = method_from_string(method);
    options.merge = !no_merge;
    options.shuffle = !no_shuffle;
    options.alternate_edges = !no_alternate;
    options.measure_error = !no_measure;
    const Hamiltonian h = source.build();
    SynthCache cache;
    SynthCache* cache_ptr = nullptr;
    if (!cache_path.empty()) {
      cache.load(cache_path);
      cache_ptr = &cache;
    }
    CompileResult result = compile(h, options, cache_ptr);
    if (!cache_path.empty()) cache.save(cache_path);
    if (!out_path.empty()) write_qasm(result.circuit, out_path);
    if (!report_path.empty()) {
      std::ofstream out(report_path);
      if (!out) throw std::runtime_error("cannot write report: " + report_path);
      out << report_to_json(result.report).dump(2) << "\n";
    }
    return result;
  }
};

void print_summary(const CompileReport& r, std::ostream& out) {
  out << r.method << ": cnot=" << r.cnot_count << " u3=" << r.u3_count << " depth=" << r.depth;
  if (r.has_measured_error)
    out << " spectral_error=" << r.spectral_error << " frobenius_error=" << r.frobenius_error;
  out << " steps=" << r.steps << "\n";
}

int run_compile(CompileArgs& args) {
  const CompileResult result = args.run();
  print_summary(result.report, std::cout);
  return 0;
}

int run_analyze(SourceArgs& source, CompileArgs& args) {
  const Hamiltonian h = source.build();
  TrotterConfig cfg = args.options.trotter();
  const auto j = analyze(h, cfg);
  if (!args.report_path.empty()) {
    std::ofstream out(args.report_path);
    out << j.dump(2) << "\n";
  } else {
    std::cout << j.dump(2) << "\n";
  }
  return 0;
}

struct VerifyArgs {
  SourceArgs source;
  std::string qasm_path;
  std::string report_path;
  double time = 1.0;
};

int run_verify(VerifyArgs& args) {
  const Hamiltonian h = args.source.build();
  const Circuit c = load_qasm(args.qasm_path);
  const VerifyReport report = verify_circuit(c, h, args.time);
  if (!args.report_path.empty()) {
    // Cross-check the stored counts against the reparsed circuit.
    std::ifstream in(args.report_path);
    if (!in) throw std::runtime_error("cannot open report: " + args.report_path);
    const auto stored = nlohmann::json::parse(in);
    if (stored["cnot_count"].get<long>() != report.metrics.cnot_count ||
        stored["u3_count"].get<long>() != report.metrics.u3_count ||
        stored["depth"].get<int>() != report.metrics.depth) {
      std::cerr << "verify: counts in " << args.report_path
                << " disagree with the reparsed circuit\n";
      return 2;
    }
  }
  std::cout << "spectral_error=" << report.spectral_error
            << " frobenius_error=" << report.frobenius_error
            << " cnot=" << report.metrics.cnot_count << " u3=" << report.metrics.u3_count
            << " depth=" << report.metrics.depth << "\n";
  return 0;
}

struct BenchArgs {
  std::string suite = "sweep";
  std::string model;  // empty: suite default set
  std::string out_path;
  std::string report_path;
  std::string cache_path;
  double time = 1.0;
  int steps = 10;
  int order = 1;
  double target_error = 0.07;
  int qubits = 50;
  int seeds = 5;
  std::uint64_t seed = 0;
  int synth_iterations = 64;
};

struct NamedModel {
  std::string name;
  std::string topology;
  Hamiltonian h;
};

std::vector<NamedModel> spin_benchmarks(const std::string& only) {
  std::vector<NamedModel> models;
  auto want = [&](const std::string& name) { return only.empty() || only == name; };
  if (want("ising")) {
    models.push_back({"ising", "line", build_ising({1, 10, Topology::Line})});
    models.push_back({"ising", "square", build_ising({5, 2, Topology::Square})});
    models.push_back({"ising", "triangular", build_ising({5, 2, Topology::Triangular})});
  }
  if (want("heisenberg")) {
    models.push_back({"heisenberg", "line", build_heisenberg({1, 10, Topology::Line})});
    models.push_back({"heisenberg", "square", build_heisenberg({5, 2, Topology::Square})});
    models.push_back({"heisenberg", "triangular",
                      build_heisenberg({5, 2, Topology::Triangular})});
  }
  return models;
}

void write_output(const std::string& csv, const nlohmann::ordered_json& j,
                  const BenchArgs& args) {
  if (!args.out_path.empty()) {
    std::ofstream out(args.out_path);
    out << csv;
  } else {
    std::cout << csv;
  }
  if (!args.report_path.empty()) {
    std::ofstream out(args.report_path);
    out << j.dump(2) << "\n";
  }
}

/// Group-size sweep: first order, fixed steps, merging/shuffling/alternation
/// off, several seeds per point.
int run_bench_sweep(const BenchArgs& args) {
  std::ostringstream csv;
  csv << "model,topology,n_max,seed,spectral_error,frobenius_error,cnot,u3,depth\n";
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const NamedModel& model : spin_benchmarks(args.model)) {
    for (int n_max = 1; n_max <= 3; ++n_max) {
      for (int s = 0; s < args.seeds; ++s) {
        CompileOptions opts;
        opts.time = args.time;
        opts.steps = args.steps;
        opts.order = 1;
        opts.n_max = n_max;
        opts.seed = args.seed + static_cast<std::uint64_t>(s);
        opts.merge = false;
        opts.shuffle = false;
        opts.alternate_edges = false;
        opts.synth.iterations = args.synth_iterations;
        const CompileResult result = compile(model.h, opts);
        csv << model.name << "," << model.topology << "," << n_max << "," << s << ","
            << result.report.spectral_error << "," << result.report.frobenius_error << ","
            << result.report.cnot_count << "," << result.report.u3_count << ","
            << result.report.depth << "\n";
        rows.push_back(report_to_json(result.report));
      }
    }
  }
  write_output(csv.str(), rows, args);
  return 0;
}

/// Equal-error comparison: smallest step count reaching the target error for
/// each method, then the gate-count and depth ratios.
int run_bench_compare(const BenchArgs& args) {
  std::ostringstream csv;
  csv << "model,topology,method,steps,spectral_error,cnot,u3,depth,"
         "cnot_ratio,depth_ratio\n";
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  SynthCache cache;
  if (!args.cache_path.empty()) cache.load(args.cache_path);
  for (const NamedModel& model : spin_benchmarks(args.model)) {
    CompileOptions base;
    base.time = args.time;
    base.order = args.order;
    base.steps = 1;
    base.target_error = args.target_error;
    base.seed = args.seed;
    base.synth.iterations = args.synth_iterations;
    CompileOptions kern = base;
    kern.method = Method::Kernpiler;
    CompileOptions naive = base;
    naive.method = Method::Naive1;
    const CompileResult rk = compile(model.h, kern, &cache);
    const CompileResult rn = compile(model.h, naive);
    const double cnot_ratio =
        rn.report.cnot_count > 0
            ? static_cast<double>(rk.report.cnot_count) / rn.report.cnot_count
            : 0.0;
    const double depth_ratio =
        rn.report.depth > 0 ? static_cast<double>(rk.report.depth) / rn.report.depth : 0.0;
    for (const CompileResult* r : {&rk, &rn}) {
      csv << model.name << "," << model.topology << "," << r->report.method << ","
          << r->report.steps << "," << r->report.spectral_error << "," << r->report.cnot_count
          << "," << r->report.u3_count << "," << r->report.depth << "," << cnot_ratio << ","
          << depth_ratio << "\n";
      rows.push_back(report_to_json(r->report));
    }
  }
  if (!args.cache_path.empty()) cache.save(args.cache_path);
  write_output(csv.str(), rows, args);
  return 0;
}

/// Large-scale gate-count mode: errors above the dense limit are unmeasurable
/// and reported as null.
int run_bench_scale(const BenchArgs& args) {
  std::ostringstream csv;
  csv << "model,qubits,method,steps,cnot,u3,depth,wall_time_ms\n";
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  std::vector<NamedModel> models;
  auto want = [&](const std::string& name) { return args.model.empty() || args.model == name; };
  if (want("ising")) models.push_back({"ising", "line", build_ising({1, args.qubits, Topology::Line})});
  if (want("heisenberg"))
    models.push_back({"heisenberg", "line", build_heisenberg({1, args.qubits, Topology::Line})});
  if (want("fh"))
    models.push_back({"fh", "line", build_fermi_hubbard({1, (args.qubits + 1) / 2, Topology::Line})});
  SynthCache cache;
  if (!args.cache_path.empty()) cache.load(args.cache_path);
  for (const NamedModel& model : models) {
    for (Method method : {Method::Kernpiler, Method::Naive1}) {
      CompileOptions opts;
      opts.method = method;
      opts.time = args.time;
      opts.steps = args.steps;
      opts.order = args.order;
      opts.seed = args.seed;
      opts.measure_error = false;
      opts.synth.iterations = args.synth_iterations;
      const CompileResult r = compile(model.h, opts, method == Method::Kernpiler ? &cache : nullptr);
      csv << model.name << "," << model.h.n << "," << r.report.method << "," << r.report.steps
          << "," << r.report.cnot_count << "," << r.report.u3_count << "," << r.report.depth
          << "," << r.report.wall_time_ms << "\n";
      rows.push_back(report_to_json(r.report));
    }
  }
  if (!args.cache_path.empty()) cache.save(args.cache_path);
  write_output(csv.str(), rows, args);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"kernpiler: a partial-Trotterization compiler for Hamiltonian simulation"};
  app.require_subcommand(1);

  CompileArgs compile_args;
  CLI::App* compile_cmd = app.add_subcommand("compile", "compile e^{iHt} to a u3/cx circuit");
  compile_args.attach(compile_cmd);

  CompileArgs analyze_args;
  CLI::App* analyze_cmd =
      app.add_subcommand("analyze", "partition/group/bound report without synthesis");
  analyze_args.attach(analyze_cmd);

  VerifyArgs verify_args;
  CLI::App* verify_cmd = app.add_subcommand("verify", "check an emitted QASM file against e^{iHt}");
  verify_args.source.attach(verify_cmd);
  verify_cmd->add_option("--in", verify_args.qasm_path, "QASM file")->required();
  verify_cmd->add_option("--time,-t", verify_args.time, "total evolution time");
  verify_cmd->add_option("--report", verify_args.report_path, "report to cross-check counts");

  BenchArgs bench_args;
  CLI::App* bench_cmd = app.add_subcommand("bench", "benchmark suites (sweep, compare, scale)");
  bench_cmd->add_option("--suite", bench_args.suite, "sweep, compare or scale")->required();
  bench_cmd->add_option("--model", bench_args.model, "restrict to one model");
  CLI::Option* time_opt =
      bench_cmd->add_option("--time,-t", bench_args.time, "total evolution time");
  bench_cmd->add_option("--steps", bench_args.steps, "steps (sweep/scale)");
  bench_cmd->add_option("--order", bench_args.order, "order (compare/scale)");
  bench_cmd->add_option("--target-error", bench_args.target_error, "compare error target");
  bench_cmd->add_option("--qubits", bench_args.qubits, "scale suite size");
  bench_cmd->add_option("--sweep-seeds", bench_args.seeds, "seeds per sweep point");
  bench_cmd->add_option("--seed", bench_args.seed, "base seed");
  bench_cmd->add_option("--cache", bench_args.cache_path, "synthesis cache file");
  bench_cmd->add_option("--out", bench_args.out_path, "CSV output path");
  bench_cmd->add_option("--report", bench_args.report_path, "JSON output path");
  bench_cmd->add_option("--synth-iterations", bench_args.synth_iterations, "MCTS budget per block");

  CLI11_PARSE(app, argc, argv);

  try {
    if (compile_cmd->parsed()) return run_compile(compile_args);
    if (analyze_cmd->parsed()) return run_analyze(analyze_args.source, analyze_args);
    if (verify_cmd->parsed()) return run_verify(verify_args);
    if (bench_cmd->parsed()) {
      if (time_opt->count() == 0) {
        // Per-suite defaults: the sweep wants a perturbative dt with visible
        // error (t/steps = 0.05); the comparison runs the short-time protocol.
        if (bench_args.suite == "sweep") bench_args.time = 0.5;
        if (bench_args.suite == "compare") bench_args.time = 0.1;
      }
      if (bench_args.suite == "sweep") return run_bench_sweep(bench_args);
      if (bench_args.suite == "compare") return run_bench_compare(bench_args);
      if (bench_args.suite == "scale") return run_bench_scale(bench_args);
      std::cerr << "unknown bench suite: " << bench_args.suite << "\n";
      return 2;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
