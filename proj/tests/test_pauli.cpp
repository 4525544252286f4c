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

#include "kernpiler/pauli.hpp"
#include "test_helpers.hpp"

using namespace kernpiler;
using testutil::kron;
using testutil::string_matrix;

namespace {

PauliTerm term(double c, const std::string& s) { return PauliTerm::parse(c, s); }

}  // namespace

TEST_CASE("string parsing and round trip") {
  const PauliString p = PauliString::from_string("IXYZ");
  CHECK(p.num_qubits() == 4);
  CHECK(p.at(0) == Pauli::I);
  CHECK(p.at(1) == Pauli::X);
  CHECK(p.at(2) == Pauli::Y);
  CHECK(p.at(3) == Pauli::Z);
  CHECK(p.str() == "IXYZ");
  CHECK_THROWS_AS(PauliString::from_string("XQ"), std::invalid_argument);
}

TEST_CASE("commutation basics") {
  CHECK_FALSE(commutes(term(1, "X"), term(1, "Z")));
  CHECK(commutes(term(1, "XYZ"), term(1, "XYZ")));
  CHECK_FALSE(commutes(term(1, "XYZ"), term(1, "YZX")));
  CHECK_THROWS_AS(commutes(term(1, "XX"), term(1, "X")), std::invalid_argument);
}

TEST_CASE("commutation of the four 3-qubit strings") {
  // Five of the six pairs anticommute; (XYZ, XZX) overlap on two differing
  // non-identity positions and therefore commute.
  const std::vector<std::string> strings = {"XYZ", "YZX", "ZXY", "XZX"};
  for (std::size_t a = 0; a < strings.size(); ++a) {
    for (std::size_t b = a + 1; b < strings.size(); ++b) {
      const bool expected = testutil::matrices_commute(string_matrix(strings[a]),
                                                       string_matrix(strings[b]));
      CHECK(commutes(term(1, strings[a]), term(1, strings[b])) == expected);
      const bool is_il_pair = strings[a] == "XYZ" && strings[b] == "XZX";
      CHECK(expected == is_il_pair);
    }
  }
}

TEST_CASE("commutes matches the matrix test exhaustively at n<=2") {
  const char letters[] = {'I', 'X', 'Y', 'Z'};
  for (char a0 : letters)
    for (char a1 : letters)
      for (char b0 : letters)
        for (char b1 : letters) {
          const std::string a{a0, a1};
          const std::string b{b0, b1};
          const bool matrix = testutil::matrices_commute(string_matrix(a), string_matrix(b));
          CHECK(commutes(term(1, a), term(1, b)) == matrix);
        }
}

TEST_CASE("commutes matches the matrix test on random strings up to n=4") {
  std::mt19937 rng(12345);
  for (int trial = 0; trial < 300; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 4);
    const PauliString a = testutil::random_string(rng, n);
    const PauliString b = testutil::random_string(rng, n);
    const bool matrix =
        testutil::matrices_commute(string_matrix(a.str()), string_matrix(b.str()));
    CHECK(strings_commute(a, b) == matrix);
  }
}

TEST_CASE("multiply basics") {
  SECTION("XY = iZ") {
    const auto r = multiply(term(1, "X"), term(1, "Y"));
    CHECK(r.phase == complexd(0, 1));
    CHECK(r.term.paulis.str() == "Z");
    CHECK(r.term.coefficient == 1.0);
  }
  SECTION("XI = X") {
    const auto r = multiply(term(2, "X"), term(3, "I"));
    CHECK(r.phase == complexd(1, 0));
    CHECK(r.term.paulis.str() == "X");
    CHECK(r.term.coefficient == 6.0);
  }
  SECTION("XX * ZZ = -YY, against the matrix product") {
    const auto r = multiply(term(1, "XX"), term(1, "ZZ"));
    CHECK(r.phase == complexd(-1, 0));
    CHECK(r.term.paulis.str() == "YY");
    const Matrix product = string_matrix("XX") * string_matrix("ZZ");
    CHECK((product - r.phase * string_matrix(r.term.paulis.str())).norm() < 1e-14);
  }
}

TEST_CASE("multiply agrees with matrix products on random strings") {
  std::mt19937 rng(777);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 3);
    const PauliString a = testutil::random_string(rng, n);
    const PauliString b = testutil::random_string(rng, n);
    const auto r = multiply(PauliTerm(1.0, a), PauliTerm(1.0, b));
    const Matrix lhs = string_matrix(a.str()) * string_matrix(b.str());
    const Matrix rhs = r.phase * string_matrix(r.term.paulis.str());
    CHECK((lhs - rhs).norm() < 1e-13);
  }
}

TEST_CASE("multiply is associative and sign-consistent with commutes") {
  std::mt19937 rng(4242);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 4);
    const PauliTerm a(1.0, testutil::random_string(rng, n));
    const PauliTerm b(1.0, testutil::random_string(rng, n));
    const PauliTerm c(1.0, testutil::random_string(rng, n));

    const auto ab = multiply(a, b);
    const auto ab_c = multiply(ab.term, c);
    const auto bc = multiply(b, c);
    const auto a_bc = multiply(a, bc.term);
    CHECK(ab_c.term.paulis == a_bc.term.paulis);
    CHECK(ab.phase * ab_c.phase == bc.phase * a_bc.phase);

    // PQ = +QP when they commute, -QP otherwise.
    const auto ba = multiply(b, a);
    CHECK(ab.term.paulis == ba.term.paulis);
    const complexd ratio = ab.phase / ba.phase;
    CHECK(ratio == (commutes(a, b) ? complexd(1, 0) : complexd(-1, 0)));
  }
}

TEST_CASE("support and weight") {
  CHECK(term(1, "IXXX").paulis.support() == std::vector<int>{1, 2, 3});
  CHECK(term(1, "IXXX").weight() == 3);
  CHECK(term(1, "IIII").paulis.support().empty());
  CHECK(term(1, "IIII").weight() == 0);
  CHECK(term(1, "IIIXX").paulis.support() == std::vector<int>{3, 4});
  CHECK(term(1, "IXYZ").paulis.max_index() == 3);
  CHECK(term(1, "IIII").paulis.max_index() == -1);
}

TEST_CASE("to_matrix basics") {
  SECTION("single Z") {
    const std::vector<PauliTerm> terms = {term(1, "Z")};
    const std::vector<int> order = {0};
    const Matrix m = to_matrix(terms, order);
    Matrix expected(2, 2);
    expected << 1, 0, 0, -1;
    CHECK((m - expected).norm() < 1e-15);
  }
  SECTION("X + Z") {
    const std::vector<PauliTerm> terms = {term(1, "X"), term(1, "Z")};
    const std::vector<int> order = {0};
    Matrix expected(2, 2);
    expected << 1, 1, 1, -1;
    CHECK((to_matrix(terms, order) - expected).norm() < 1e-15);
  }
  SECTION("0.5 XX on qubits (1,2) of 4") {
    const std::vector<PauliTerm> terms = {term(0.5, "IXXI")};
    const std::vector<int> order = {1, 2};
    const Matrix expected = 0.5 * string_matrix("XX");
    CHECK((to_matrix(terms, order) - expected).norm() < 1e-15);
  }
  SECTION("support outside qubit_order") {
    const std::vector<PauliTerm> terms = {term(1.0, "XXI")};
    const std::vector<int> order = {0};
    CHECK_THROWS_AS(to_matrix(terms, order), std::invalid_argument);
  }
}

TEST_CASE("to_matrix matches the kron oracle on random strings") {
  std::mt19937 rng(99);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 4);
    const PauliString s = testutil::random_string(rng, n);
    const double coeff = std::uniform_real_distribution<double>(-2, 2)(rng);
    const std::vector<PauliTerm> terms = {PauliTerm(coeff, s)};
    std::vector<int> order(static_cast<std::size_t>(n));
    for (int q = 0; q < n; ++q) order[static_cast<std::size_t>(q)] = q;
    CHECK((to_matrix(terms, order) - coeff * string_matrix(s.str())).norm() < 1e-13);
  }
}

TEST_CASE("single-term matrices square to the squared coefficient") {
  std::mt19937 rng(55);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 3);
    const double coeff = std::uniform_real_distribution<double>(-2, 2)(rng);
    const PauliTerm t(coeff, testutil::random_string(rng, n));
    std::vector<int> order(static_cast<std::size_t>(n));
    for (int q = 0; q < n; ++q) order[static_cast<std::size_t>(q)] = q;
    const std::vector<PauliTerm> terms = {t};
    const Matrix m = to_matrix(terms, order);
    CHECK((m - m.adjoint()).norm() < 1e-13);  // Hermitian
    const Matrix identity = Matrix::Identity(m.rows(), m.cols());
    CHECK((m * m - coeff * coeff * identity).norm() < 1e-12);
  }
}

TEST_CASE("hamiltonian normalizes identity content into the offset") {
  Hamiltonian h(2);
  h.add_term(0.5, "ZZ");
  h.add_term(1.25, "II");
  h.add_term(0.0, "II");
  h.add_term(0.0, "XX");
  CHECK(h.terms.size() == 1);
  CHECK(h.identity_offset == 1.25);
  CHECK_THROWS_AS(h.add_term(1.0, "ZZZ"), std::invalid_argument);
  const Matrix m = to_matrix(h);
  CHECK((m - testutil::hamiltonian_matrix(h)).norm() < 1e-14);
}
