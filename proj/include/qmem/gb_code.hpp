// Copyright 2026 The qmem Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qmem/gf2.hpp"

namespace qmem {

/// Monomial x^p y^q, standing for the matrix S_l^p (x) S_m^q.
struct PolyTerm {
    int p = 0;  // exponent of x, 0 <= p < l
    int q = 0;  // exponent of y, 0 <= q < m

    bool is_mixed() const { return p > 0 && q > 0; }
    auto operator<=>(const PolyTerm &) const = default;
};

std::string to_string(const PolyTerm &t);

/// (l, m, a(x,y), b(x,y)) identifying a generalized-bicycle code.
struct PolySpec {
    int l = 1;
    int m = 1;
    std::vector<PolyTerm> a;
    std::vector<PolyTerm> b;
    std::string name;  // optional label, e.g. "[72,12,6]"
    std::optional<std::size_t> d_claimed;  // metadata only, never trusted

    std::size_t check_weight() const { return a.size() + b.size(); }
    std::size_t num_data() const { return 2 * static_cast<std::size_t>(l) * static_cast<std::size_t>(m); }
    /// Throws std::invalid_argument describing the first violated invariant.
    void validate() const;
};

/// Parses a polynomial such as "y + y^2 + x^3" or "1 + x*y + x^9*y^2".
/// `column` is the 1-based column of `text` in its source line, used for
/// error positions.
std::vector<PolyTerm> parse_polynomial(std::string_view text, std::size_t line = 1, std::size_t column = 1);

/// Parses a code spec document with keys l, m, a, b (and optional name, d).
PolySpec parse_poly_spec(std::string_view text);
PolySpec load_poly_spec(const std::string &path);
std::string format_polynomial(const std::vector<PolyTerm> &poly);

/// Binary CSS code with paired logical bases: logicals_x row i anticommutes
/// with logicals_z row j exactly when i == j.
struct CssCode {
    std::size_t n = 0;
    std::size_t k = 0;
    std::optional<std::size_t> d_claimed;
    BitMatrix gx;
    BitMatrix gz;
    BitMatrix logicals_x;
    BitMatrix logicals_z;
    std::string name;
};

/// l x l permutation matrix with entry (i, (i+p) mod l) set.
BitMatrix cyclic_power(int l, int p);

/// Matrix of a polynomial: sum over terms of S_l^p (x) S_m^q.
BitMatrix polynomial_matrix(int l, int m, const std::vector<PolyTerm> &poly);

/// Builds Gx = (A | B), Gz = (B^T | A^T) and derives k and paired logical
/// bases. Throws std::logic_error if the CSS commutation check fails.
CssCode build_code(const PolySpec &spec);

/// Builds a CSS code from arbitrary commuting check matrices.
CssCode build_css_code(BitMatrix gx, BitMatrix gz, std::string name = {});

/// Rotated surface code with n = d^2 and k = 1. Throws for even d or d < 3.
CssCode build_surface_code(int d);

struct DistanceBound {
    bool has_logicals = false;
    std::size_t weight = 0;   // minimum logical weight found (upper bound on d)
    bool exact = false;       // true when every logical was enumerated
    std::size_t weight_x = 0;
    std::size_t weight_z = 0;
    bool below_claimed = false;  // a logical lighter than d_claimed was found
};

/// Bounds the code distance from above. Exhaustive and exact for n <= 30,
/// otherwise random information-set sampling with `trials` permutations per
/// logical type.
DistanceBound estimate_distance(const CssCode &code, std::size_t trials, std::uint64_t seed = 1);

/// Built-in catalog of the six benchmark generalized-bicycle codes, labelled
/// by [n,k,d].
std::vector<PolySpec> catalog_specs();
/// Looks up a catalog label. Also knows "[288,12,18]", the large memory
/// block used when a program needs more distance than the table offers.
std::optional<PolySpec> catalog_spec(std::string_view label);

}  // namespace qmem
