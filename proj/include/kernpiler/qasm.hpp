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

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>

#include "kernpiler/circuit.hpp"

namespace kernpiler {

namespace detail {

inline std::string format_angle(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace detail

/// OPENQASM 2.0 subset: one quantum register, u3 and cx statements only.
/// Angles carry 17 significant digits so the emission is bit-reproducible.
/// The global phase (not expressible in OPENQASM 2.0) rides in a comment
/// that parse_qasm understands; other tools ignore it.
inline std::string emit_qasm(const Circuit& c) {
  std::ostringstream out;
  out << "OPENQASM 2.0;\n";
  out << "include \"qelib1.inc\";\n";
  out << "// global-phase " << detail::format_angle(c.global_phase) << "\n";
  out << "qreg q[" << c.n << "];\n";
  for (const Gate& g : c.gates) {
    if (g.kind == Gate::Kind::Cnot) {
      out << "cx q[" << g.q0 << "],q[" << g.q1 << "];\n";
    } else {
      out << "u3(" << detail::format_angle(g.theta) << "," << detail::format_angle(g.phi)
          << "," << detail::format_angle(g.lambda) << ") q[" << g.q0 << "];\n";
    }
  }
  return out.str();
}

inline void write_qasm(const Circuit& c, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write qasm file: " + path);
  out << emit_qasm(c);
}

namespace detail {

struct QasmCursor {
  std::string_view text;
  std::size_t pos = 0;
  int line = 1;

  [[noreturn]] void fail(const std::string& message) const {
    throw std::invalid_argument("qasm parse error at line " + std::to_string(line) + ": " +
                                message);
  }

  void skip_space(bool* saw_phase_comment = nullptr, double* phase = nullptr) {
    while (pos < text.size()) {
      const char ch = text[pos];
      if (ch == '\n') {
        ++line;
        ++pos;
      } else if (ch == ' ' || ch == '\t' || ch == '\r') {
        ++pos;
      } else if (ch == '/' && pos + 1 < text.size() && text[pos + 1] == '/') {
        const std::size_t eol = text.find('\n', pos);
        const std::string_view comment =
            text.substr(pos + 2, (eol == std::string_view::npos ? text.size() : eol) - pos - 2);
        if (saw_phase_comment && phase) {
          const std::string_view tag = " global-phase ";
          if (comment.substr(0, tag.size()) == tag) {
            *phase = std::strtod(std::string(comment.substr(tag.size())).c_str(), nullptr);
            *saw_phase_comment = true;
          }
        }
        pos = eol == std::string_view::npos ? text.size() : eol;
      } else {
        break;
      }
    }
  }

  bool consume(std::string_view token) {
    if (text.substr(pos, token.size()) == token) {
      pos += token.size();
      return true;
    }
    return false;
  }

  void expect(std::string_view token, const std::string& what) {
    if (!consume(token)) fail("expected " + what);
  }

  int parse_int() {
    int value = 0;
    const char* begin = text.data() + pos;
    const char* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc()) fail("expected integer");
    pos += static_cast<std::size_t>(ptr - begin);
    return value;
  }

  double parse_double() {
    const std::string rest(text.substr(pos, 64));
    char* end = nullptr;
    const double value = std::strtod(rest.c_str(), &end);
    if (end == rest.c_str()) fail("expected number");
    pos += static_cast<std::size_t>(end - rest.c_str());
    return value;
  }

  int parse_qubit_ref(int n) {
    expect("q[", "qubit reference");
    const int q = parse_int();
    expect("]", "']'");
    if (q < 0 || q >= n) fail("qubit index out of range");
    return q;
  }
};

}  // namespace detail

/// Parses the emitted subset back into a Circuit.
inline Circuit parse_qasm(std::string_view text) {
  detail::QasmCursor cur{text};
  double phase = 0.0;
  bool saw_phase = false;
  cur.skip_space(&saw_phase, &phase);
  cur.expect("OPENQASM 2.0;", "OPENQASM 2.0 header");
  cur.skip_space(&saw_phase, &phase);
  if (cur.consume("include")) {
    cur.skip_space(&saw_phase, &phase);
    cur.expect("\"qelib1.inc\";", "include \"qelib1.inc\";");
    cur.skip_space(&saw_phase, &phase);
  }
  cur.expect("qreg q[", "qreg declaration");
  const int n = cur.parse_int();
  cur.expect("];", "'];'");
  if (n < 0) cur.fail("negative register size");
  Circuit c(n);
  c.global_phase = phase;
  while (true) {
    cur.skip_space(&saw_phase, &phase);
    c.global_phase = phase;
    if (cur.pos >= cur.text.size()) break;
    if (cur.consume("cx")) {
      cur.skip_space();
      const int control = cur.parse_qubit_ref(n);
      cur.skip_space();
      cur.expect(",", "','");
      cur.skip_space();
      const int target = cur.parse_qubit_ref(n);
      cur.skip_space();
      cur.expect(";", "';'");
      c.push(Gate::cnot(control, target));
    } else if (cur.consume("u3")) {
      cur.skip_space();
      cur.expect("(", "'('");
      const double theta = cur.parse_double();
      cur.expect(",", "','");
      const double phi = cur.parse_double();
      cur.expect(",", "','");
      const double lambda = cur.parse_double();
      cur.expect(")", "')'");
      cur.skip_space();
      const int q = cur.parse_qubit_ref(n);
      cur.skip_space();
      cur.expect(";", "';'");
      c.push(Gate::u3(q, theta, phi, lambda));
    } else {
      cur.fail("expected a u3 or cx statement");
    }
  }
  return c;
}

inline Circuit load_qasm(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open qasm file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_qasm(buffer.str());
}

}  // namespace kernpiler
