// Copyright 2026 The VILMA Authors
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

#include "vilma/core.hpp"
#include "vilma/json_io.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <string_view>
#include <vector>

namespace vilma {

/// Tensor product of single-qubit Pauli letters. Letters are 0=I, 1=X, 2=Y, 3=Z;
/// position q is qubit q (0-based, left to right in the text form).
class PauliString {
  public:
    PauliString() = default;
    explicit PauliString(int num_qubits) : letters_(static_cast<std::size_t>(num_qubits), 0) {
        require(num_qubits > 0, "PauliString needs at least one qubit");
    }

    static PauliString from_text(std::string_view text) {
        require(!text.empty(), "empty Pauli string");
        PauliString p(static_cast<int>(text.size()));
        for (std::size_t q = 0; q < text.size(); ++q) {
            switch (text[q]) {
            case 'I':
                p.letters_[q] = 0;
                break;
            case 'X':
                p.letters_[q] = 1;
                break;
            case 'Y':
                p.letters_[q] = 2;
                break;
            case 'Z':
                p.letters_[q] = 3;
                break;
            default:
                throw ValidationError("invalid Pauli letter '" + std::string(1, text[q]) + "' at position " +
                                      std::to_string(q));
            }
        }
        return p;
    }

    int num_qubits() const { return static_cast<int>(letters_.size()); }
    int letter(int q) const { return letters_[static_cast<std::size_t>(q)]; }
    void set_letter(int q, int a) {
        require(a >= 0 && a < 4, "Pauli letter index out of range");
        letters_[static_cast<std::size_t>(q)] = static_cast<std::uint8_t>(a);
    }

    int weight() const {
        return static_cast<int>(std::count_if(letters_.begin(), letters_.end(), [](auto l) { return l != 0; }));
    }

    Matrix2 factor(int q) const { return pauli_matrix::by_index(letter(q)); }

    std::string text() const {
        std::string s;
        for (auto l : letters_) {
            s.push_back("IXYZ"[l]);
        }
        return s;
    }

    Matrix dense() const {
        Matrix out = Matrix::Identity(1, 1);
        for (int q = 0; q < num_qubits(); ++q) {
            out = kron(out, Matrix(factor(q)));
        }
        return out;
    }

    friend bool operator==(const PauliString &, const PauliString &) = default;
    friend auto operator<=>(const PauliString &, const PauliString &) = default;

  private:
    std::vector<std::uint8_t> letters_;
};

struct PauliTerm {
    cplx coeff;
    PauliString string;
};

/// Weighted sum of Pauli strings. Duplicate strings are merged on insertion.
class Observable {
  public:
    Observable() = default;
    explicit Observable(int num_qubits) : num_qubits_(num_qubits) {
        require(num_qubits > 0, "Observable needs at least one qubit");
    }

    int num_qubits() const { return num_qubits_; }
    const std::vector<PauliTerm> &terms() const { return terms_; }
    std::size_t size() const { return terms_.size(); }

    void add(cplx coeff, const PauliString &p) {
        require(p.num_qubits() == num_qubits_, "Pauli string length " + std::to_string(p.num_qubits()) +
                                                   " does not match observable width " +
                                                   std::to_string(num_qubits_));
        require(std::isfinite(coeff.real()) && std::isfinite(coeff.imag()), "non-finite coefficient");
        for (auto &t : terms_) {
            if (t.string == p) {
                t.coeff += coeff;
                return;
            }
        }
        terms_.push_back({coeff, p});
    }

    void add(cplx coeff, std::string_view text) { add(coeff, PauliString::from_text(text)); }

    /// Pauli strings are Hermitian and linearly independent, so after merging
    /// the sum is Hermitian exactly when every coefficient is real.
    bool is_hermitian(double tol = 1e-12) const {
        return std::all_of(terms_.begin(), terms_.end(),
                           [tol](const PauliTerm &t) { return std::abs(t.coeff.imag()) <= tol; });
    }

    Observable scaled(cplx s) const {
        Observable out(num_qubits_);
        for (const auto &t : terms_) {
            out.terms_.push_back({s * t.coeff, t.string});
        }
        return out;
    }

    Matrix dense() const {
        Matrix out = Matrix::Zero(static_cast<Eigen::Index>(pow2(num_qubits_)),
                                  static_cast<Eigen::Index>(pow2(num_qubits_)));
        for (const auto &t : terms_) {
            out += t.coeff * t.string.dense();
        }
        return out;
    }

    static Observable identity(int num_qubits, cplx coeff = 1.0) {
        Observable o(num_qubits);
        o.add(coeff, PauliString(num_qubits));
        return o;
    }

  private:
    int num_qubits_ = 0;
    std::vector<PauliTerm> terms_;
};

/// Linear combination a·A + b·B of two observables on the same qubits.
inline Observable combine(cplx a, const Observable &A, cplx b, const Observable &B) {
    require(A.num_qubits() == B.num_qubits(), "observable widths differ");
    Observable out(A.num_qubits());
    for (const auto &t : A.terms()) {
        out.add(a * t.coeff, t.string);
    }
    for (const auto &t : B.terms()) {
        out.add(b * t.coeff, t.string);
    }
    return out;
}

// File format: {"num_qubits": N, "terms": [{"coeff": [re, im], "pauli": "XIZY"}, ...]}

inline Observable observable_from_json(const json &doc) {
    require(doc.is_object(), "observable: document must be an object");
    require(doc.contains("num_qubits") && doc["num_qubits"].is_number_integer(),
            "observable: missing integer num_qubits");
    int n = doc["num_qubits"].get<int>();
    require(n > 0, "observable: num_qubits must be positive");
    require(doc.contains("terms") && doc["terms"].is_array(), "observable: missing terms array");
    Observable obs(n);
    std::size_t idx = 0;
    for (const auto &t : doc["terms"]) {
        std::string where = "observable term " + std::to_string(idx++);
        require(t.is_object() && t.contains("pauli") && t["pauli"].is_string() && t.contains("coeff"),
                where + ": needs coeff and pauli");
        PauliString p = PauliString::from_text(t["pauli"].get<std::string>());
        require(p.num_qubits() == n, where + ": string length " + std::to_string(p.num_qubits()) +
                                         " != num_qubits " + std::to_string(n));
        obs.add(complex_from_json(t["coeff"], where), p);
    }
    return obs;
}

inline Observable parse_observable(const std::string &text) {
    return observable_from_json(parse_json(text, "observable"));
}

inline json observable_to_json(const Observable &obs) {
    json terms = json::array();
    for (const auto &t : obs.terms()) {
        terms.push_back({{"coeff", complex_to_json(t.coeff)}, {"pauli", t.string.text()}});
    }
    return {{"num_qubits", obs.num_qubits()}, {"terms", terms}};
}

inline std::string write_observable(const Observable &obs) { return observable_to_json(obs).dump(2) + "\n"; }

/// H = -J [ sum_i (X_i X_{i+1} + Y_i Y_{i+1}) / 2 + B sum_i Z_i ].
inline Observable xx_hamiltonian(int n, double J, double B, bool periodic) {
    require(n >= 2, "xx_hamiltonian needs N >= 2");
    Observable h(n);
    auto bond = [&](int i, int j) {
        for (char letter : {'X', 'Y'}) {
            std::string s(static_cast<std::size_t>(n), 'I');
            s[static_cast<std::size_t>(i)] = letter;
            s[static_cast<std::size_t>(j)] = letter;
            h.add(-J / 2.0, s);
        }
    };
    for (int i = 0; i + 1 < n; ++i) {
        bond(i, i + 1);
    }
    if (periodic) {
        bond(n - 1, 0);
    }
    if (B != 0.0) {
        for (int i = 0; i < n; ++i) {
            std::string s(static_cast<std::size_t>(n), 'I');
            s[static_cast<std::size_t>(i)] = 'Z';
            h.add(-J * B, s);
        }
    }
    return h;
}

/// Tr[rho P] using the permutation-with-phase structure of P (qubit q is bit N-1-q).
inline cplx pauli_expectation(const Matrix &rho, const PauliString &p) {
    const int n = p.num_qubits();
    std::size_t flip = 0;
    for (int q = 0; q < n; ++q) {
        if (p.letter(q) == 1 || p.letter(q) == 2) {
            flip |= pow2(n - 1 - q);
        }
    }
    cplx acc = 0.0;
    const std::size_t dim = pow2(n);
    for (std::size_t c = 0; c < dim; ++c) {
        cplx phase = 1.0;
        for (int q = 0; q < n; ++q) {
            bool bit = (c >> (n - 1 - q)) & 1u;
            switch (p.letter(q)) {
            case 2:
                phase *= bit ? cplx(0, -1) : cplx(0, 1);
                break;
            case 3:
                if (bit) {
                    phase = -phase;
                }
                break;
            default:
                break;
            }
        }
        acc += rho(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(c ^ flip)) * phase;
    }
    return acc;
}

/// Exact Tr[rho O] for a dense N-qubit operator rho.
inline cplx expectation_oracle(const Matrix &rho, const Observable &obs) {
    require(obs.num_qubits() <= 12, "expectation_oracle limited to N <= 12");
    require(rho.rows() == static_cast<Eigen::Index>(pow2(obs.num_qubits())) && rho.cols() == rho.rows(),
            "expectation_oracle: dimension mismatch");
    cplx acc = 0.0;
    for (const auto &t : obs.terms()) {
        acc += t.coeff * pauli_expectation(rho, t.string);
    }
    return acc;
}

}  // namespace vilma
