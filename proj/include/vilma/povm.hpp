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

#include <array>
#include <cmath>
#include <string>

namespace vilma {

/// Four-outcome single-qubit POVM.
struct SingleQubitPOVM {
    std::array<Matrix2, 4> effects;
    std::string label;
};

/// Dual operators D_m paired with a POVM so that A = sum_m Tr[A Pi_m] D_m.
struct DualFrame {
    std::array<Matrix2, 4> duals;
    std::string label;
};

/// Tetrahedron Bloch vectors of the default symmetric IC-POVM.
inline std::array<Eigen::Vector3d, 4> sic_bloch_vectors() {
    const double r2 = std::sqrt(2.0);
    return {Eigen::Vector3d(0.0, 0.0, 1.0), Eigen::Vector3d(2.0 * r2 / 3.0, 0.0, -1.0 / 3.0),
            Eigen::Vector3d(-r2 / 3.0, std::sqrt(2.0 / 3.0), -1.0 / 3.0),
            Eigen::Vector3d(-r2 / 3.0, -std::sqrt(2.0 / 3.0), -1.0 / 3.0)};
}

inline Matrix2 bloch_operator(const Eigen::Vector3d &s, double scale) {
    return Matrix2::Identity() + scale * (s.x() * pauli_matrix::X() + s.y() * pauli_matrix::Y() +
                                          s.z() * pauli_matrix::Z());
}

/// Pi_m = (I + s_m . sigma) / 4.
inline SingleQubitPOVM make_sic_povm() {
    SingleQubitPOVM povm;
    povm.label = "sic";
    auto s = sic_bloch_vectors();
    for (int m = 0; m < 4; ++m) {
        povm.effects[m] = bloch_operator(s[m], 1.0) / 4.0;
    }
    return povm;
}

/// Checks PSD effects summing to identity; throws ValidationError otherwise.
inline void validate_povm(const SingleQubitPOVM &povm, double tol = 1e-12) {
    Matrix2 sum = Matrix2::Zero();
    for (const auto &e : povm.effects) {
        require(max_abs(e - e.adjoint()) <= tol, "POVM effect not Hermitian");
        require(min_eigenvalue(e) >= -tol, "POVM effect not positive semidefinite");
        sum += e;
    }
    require(max_abs(sum - Matrix2::Identity()) <= tol, "POVM effects do not sum to identity");
}

/// D_m = sum_n (F^-1)_{mn} Pi_n with frame matrix F_{mn} = Tr[Pi_m Pi_n].
inline DualFrame compute_duals(const SingleQubitPOVM &povm) {
    validate_povm(povm);
    Eigen::Matrix4d frame;
    for (int m = 0; m < 4; ++m) {
        for (int n = 0; n < 4; ++n) {
            frame(m, n) = (povm.effects[m] * povm.effects[n]).trace().real();
        }
    }
    Eigen::JacobiSVD<Eigen::Matrix4d> svd(frame);
    const auto &sv = svd.singularValues();
    double cond = sv(3) > 0.0 ? sv(0) / sv(3) : INFINITY;
    if (!(cond <= 1e12)) {
        throw ValidationError("POVM is not informationally complete (frame condition number " +
                              std::to_string(cond) + ")");
    }
    Eigen::Matrix4d inv = frame.inverse();
    DualFrame out;
    out.label = povm.label;
    for (int m = 0; m < 4; ++m) {
        out.duals[m] = Matrix2::Zero();
        for (int n = 0; n < 4; ++n) {
            out.duals[m] += inv(m, n) * povm.effects[n];
        }
    }
    return out;
}

inline json povm_to_json(const SingleQubitPOVM &povm) {
    json effects = json::array();
    for (const auto &e : povm.effects) {
        effects.push_back(matrix_to_json(e));
    }
    return {{"label", povm.label}, {"effects", effects}};
}

inline SingleQubitPOVM povm_from_json(const json &doc) {
    require(doc.is_object() && doc.contains("effects") && doc["effects"].is_array() && doc["effects"].size() == 4,
            "POVM: expected object with 4 effects");
    SingleQubitPOVM povm;
    povm.label = doc.value("label", std::string("custom"));
    for (std::size_t m = 0; m < 4; ++m) {
        povm.effects[m] = matrix_from_json(doc["effects"][m], 2, "POVM effect " + std::to_string(m));
    }
    validate_povm(povm, 1e-10);
    return povm;
}

}  // namespace vilma
