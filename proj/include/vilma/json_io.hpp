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

#include "json.hpp"
#include "vilma/core.hpp"

#include <fstream>
#include <sstream>
#include <string>

namespace vilma {

using json = nlohmann::json;

/// Parses a JSON document, reporting syntax errors with their line and column.
inline json parse_json(const std::string &text, const std::string &what) {
    try {
        return json::parse(text);
    } catch (const json::parse_error &e) {
        std::size_t line = 1;
        std::size_t col = 1;
        std::size_t stop = std::min<std::size_t>(e.byte > 0 ? e.byte - 1 : 0, text.size());
        for (std::size_t i = 0; i < stop; ++i) {
            if (text[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        std::size_t begin = text.rfind('\n', stop == 0 ? 0 : stop - 1);
        begin = (begin == std::string::npos || stop == 0) ? 0 : begin + 1;
        std::size_t end = text.find('\n', stop);
        std::string context = text.substr(begin, end == std::string::npos ? std::string::npos : end - begin);
        throw ValidationError(what + ": parse error at line " + std::to_string(line) + ", column " +
                              std::to_string(col) + ": " + context);
    } catch (const json::exception &e) {
        throw ValidationError(what + ": " + e.what());
    }
}

inline std::string read_text_file(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ValidationError("cannot open file: " + path);
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_text_file(const std::string &path, const std::string &text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw ValidationError("cannot write file: " + path);
    }
    out << text;
}

inline json complex_to_json(cplx z) { return json::array({z.real(), z.imag()}); }

inline cplx complex_from_json(const json &j, const std::string &what) {
    if (j.is_number()) {
        return {j.get<double>(), 0.0};
    }
    require(j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number(),
            what + ": expected [re, im]");
    return {j[0].get<double>(), j[1].get<double>()};
}

/// Row-major nested [re, im] arrays.
inline json matrix_to_json(const Matrix &m) {
    json rows = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            row.push_back(complex_to_json(m(r, c)));
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

inline Matrix matrix_from_json(const json &j, Eigen::Index dim, const std::string &what) {
    require(j.is_array() && static_cast<Eigen::Index>(j.size()) == dim,
            what + ": expected " + std::to_string(dim) + " rows");
    Matrix m(dim, dim);
    for (Eigen::Index r = 0; r < dim; ++r) {
        const json &row = j[r];
        require(row.is_array() && static_cast<Eigen::Index>(row.size()) == dim,
                what + ": row " + std::to_string(r) + " must have " + std::to_string(dim) + " entries");
        for (Eigen::Index c = 0; c < dim; ++c) {
            m(r, c) = complex_from_json(row[c], what);
            require(std::isfinite(m(r, c).real()) && std::isfinite(m(r, c).imag()), what + ": non-finite entry");
        }
    }
    return m;
}

}  // namespace vilma
