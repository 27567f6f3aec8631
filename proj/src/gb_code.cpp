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

#include "qmem/gb_code.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <limits>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>

#include "qmem/kv_config.hpp"
#include "qmem/rng.hpp"

namespace qmem {

std::string to_string(const PolyTerm &t) {
    if (t.p == 0 && t.q == 0) {
        return "1";
    }
    std::string s;
    if (t.p > 0) {
        s += t.p == 1 ? "x" : "x^" + std::to_string(t.p);
    }
    if (t.q > 0) {
        if (!s.empty()) {
            s += "*";
        }
        s += t.q == 1 ? "y" : "y^" + std::to_string(t.q);
    }
    return s;
}

std::string format_polynomial(const std::vector<PolyTerm> &poly) {
    std::string s;
    for (std::size_t i = 0; i < poly.size(); ++i) {
        if (i > 0) {
            s += " + ";
        }
        s += to_string(poly[i]);
    }
    return s;
}

void PolySpec::validate() const {
    if (l < 1 || m < 1) {
        throw std::invalid_argument("PolySpec: l and m must be >= 1");
    }
    if (a.empty() || b.empty()) {
        throw std::invalid_argument("PolySpec: polynomials a and b must be non-empty");
    }
    for (const auto *poly : {&a, &b}) {
        std::set<PolyTerm> seen;
        for (const auto &t : *poly) {
            if (t.p < 0 || t.p >= l || t.q < 0 || t.q >= m) {
                throw std::invalid_argument("PolySpec: term " + to_string(t) + " out of range for l=" +
                                            std::to_string(l) + ", m=" + std::to_string(m));
            }
            if (!seen.insert(t).second) {
                throw std::invalid_argument("PolySpec: duplicate term " + to_string(t));
            }
        }
    }
}

namespace {

class PolyParser {
  public:
    PolyParser(std::string_view text, std::size_t line, std::size_t column)
        : text_(text), line_(line), column_(column) {}

    std::vector<PolyTerm> parse() {
        std::vector<PolyTerm> terms;
        skip_ws();
        if (at_end()) {
            fail("empty polynomial");
        }
        while (true) {
            terms.push_back(term());
            skip_ws();
            if (at_end()) {
                break;
            }
            if (text_[pos_] != '+') {
                fail(std::string("expected '+' but found '") + text_[pos_] + "'");
            }
            ++pos_;
            skip_ws();
        }
        return terms;
    }

  private:
    PolyTerm term() {
        PolyTerm t;
        bool any = false;
        bool seen_x = false;
        bool seen_y = false;
        while (!at_end()) {
            const char c = text_[pos_];
            if (c == '1' && !any) {
                ++pos_;
                any = true;
                break;
            }
            if (c != 'x' && c != 'y') {
                break;
            }
            bool &seen = (c == 'x') ? seen_x : seen_y;
            if (seen) {
                fail(std::string("repeated variable '") + c + "' in term");
            }
            seen = true;
            ++pos_;
            int exp = 1;
            skip_ws();
            if (!at_end() && text_[pos_] == '^') {
                ++pos_;
                skip_ws();
                exp = integer();
            }
            (c == 'x' ? t.p : t.q) = exp;
            any = true;
            skip_ws();
            if (!at_end() && text_[pos_] == '*') {
                ++pos_;
                skip_ws();
                if (at_end() || (text_[pos_] != 'x' && text_[pos_] != 'y')) {
                    fail("expected variable after '*'");
                }
            }
        }
        if (!any) {
            fail(at_end() ? "expected a term" : std::string("unexpected character '") + text_[pos_] + "'");
        }
        return t;
    }

    int integer() {
        const std::size_t start = pos_;
        long long v = 0;
        while (!at_end() && std::isdigit(static_cast<unsigned char>(text_[pos_])) != 0) {
            v = v * 10 + (text_[pos_] - '0');
            if (v > 1'000'000) {
                fail("exponent too large");
            }
            ++pos_;
        }
        if (pos_ == start) {
            fail("expected exponent after '^'");
        }
        return static_cast<int>(v);
    }

    void skip_ws() {
        while (!at_end() && (text_[pos_] == ' ' || text_[pos_] == '\t')) {
            ++pos_;
        }
    }
    bool at_end() const { return pos_ >= text_.size(); }
    [[noreturn]] void fail(const std::string &msg) const { throw ParseError(msg, line_, column_ + pos_); }

    std::string_view text_;
    std::size_t line_;
    std::size_t column_;
    std::size_t pos_ = 0;
};

void check_term_ranges(const std::vector<PolyTerm> &poly, int l, int m, const KvEntry &where) {
    std::set<PolyTerm> seen;
    for (const auto &t : poly) {
        if (t.p >= l || t.q >= m) {
            throw ParseError("term " + to_string(t) + " out of range for l=" + std::to_string(l) +
                                 ", m=" + std::to_string(m),
                             where.line, where.column);
        }
        if (!seen.insert(t).second) {
            throw ParseError("duplicate term " + to_string(t), where.line, where.column);
        }
    }
}

}  // namespace

std::vector<PolyTerm> parse_polynomial(std::string_view text, std::size_t line, std::size_t column) {
    return PolyParser(text, line, column).parse();
}

PolySpec parse_poly_spec(std::string_view text) {
    const KvDocument doc = KvDocument::parse(text);
    PolySpec spec;
    const auto l = doc.get_int("", "l");
    const auto m = doc.get_int("", "m");
    if (!l || !m) {
        throw ParseError("code spec requires keys 'l' and 'm'", 0, 0);
    }
    if (*l < 1 || *m < 1) {
        const KvEntry &bad = doc.require("", *l < 1 ? "l" : "m");
        throw ParseError("l and m must be positive", bad.line, bad.column);
    }
    spec.l = static_cast<int>(*l);
    spec.m = static_cast<int>(*m);
    const KvEntry &a = doc.require("", "a");
    const KvEntry &b = doc.require("", "b");
    spec.a = parse_polynomial(a.value, a.line, a.column);
    spec.b = parse_polynomial(b.value, b.line, b.column);
    check_term_ranges(spec.a, spec.l, spec.m, a);
    check_term_ranges(spec.b, spec.l, spec.m, b);
    if (auto name = doc.get_string("", "name")) {
        spec.name = *name;
    }
    if (auto d = doc.get_int("", "d")) {
        spec.d_claimed = static_cast<std::size_t>(*d);
    }
    return spec;
}

PolySpec load_poly_spec(const std::string &path) {
    std::ifstream in(path);
    if (!in) {
        throw ParseError("cannot open code spec '" + path + "'", 0, 0);
    }
    std::stringstream ss;
    ss << in.rdbuf();
    PolySpec spec = parse_poly_spec(ss.str());
    if (spec.name.empty()) {
        spec.name = path;
    }
    return spec;
}

BitMatrix cyclic_power(int l, int p) {
    if (l < 1 || p < 0 || p >= l) {
        throw std::invalid_argument("cyclic_power: need 0 <= p < l");
    }
    BitMatrix s(static_cast<std::size_t>(l), static_cast<std::size_t>(l));
    for (int i = 0; i < l; ++i) {
        s.set(static_cast<std::size_t>(i), static_cast<std::size_t>((i + p) % l), true);
    }
    return s;
}

BitMatrix polynomial_matrix(int l, int m, const std::vector<PolyTerm> &poly) {
    const auto size = static_cast<std::size_t>(l) * static_cast<std::size_t>(m);
    BitMatrix out(size, size);
    for (const auto &t : poly) {
        out += cyclic_power(l, t.p).kron(cyclic_power(m, t.q));
    }
    return out;
}

namespace {

// Makes logicals_x[i] . logicals_z[j] = delta_ij after row-reducing the X basis.
void pair_logicals(CssCode &code) {
    if (code.k == 0) {
        code.logicals_x = BitMatrix(0, code.n);
        code.logicals_z = BitMatrix(0, code.n);
        return;
    }
    RrefResult red = rref(code.logicals_x);
    BitMatrix lx(0, code.n);
    for (std::size_t i = 0; i < red.rank(); ++i) {
        lx.append_row(red.matrix.row(i));
    }
    const BitMatrix overlap = lx * code.logicals_z.transpose();
    const BitMatrix change = inverse(overlap).transpose();
    code.logicals_x = std::move(lx);
    code.logicals_z = change * code.logicals_z;
}

}  // namespace

CssCode build_css_code(BitMatrix gx, BitMatrix gz, std::string name) {
    if (gx.cols() != gz.cols()) {
        throw std::invalid_argument("build_css_code: Gx and Gz widths differ");
    }
    if (!(gx * gz.transpose()).is_zero()) {
        throw std::logic_error("build_css_code: Gx * Gz^T != 0; checks do not commute");
    }
    CssCode code;
    code.n = gx.cols();
    code.name = std::move(name);
    const std::size_t rx = rank(gx);
    const std::size_t rz = rank(gz);
    code.k = code.n - rx - rz;
    code.logicals_x = quotient_basis(nullspace(gz), gx);
    code.logicals_z = quotient_basis(nullspace(gx), gz);
    if (code.logicals_x.rows() != code.k || code.logicals_z.rows() != code.k) {
        throw std::logic_error("build_css_code: logical basis size disagrees with k");
    }
    code.gx = std::move(gx);
    code.gz = std::move(gz);
    pair_logicals(code);
    return code;
}

CssCode build_code(const PolySpec &spec) {
    spec.validate();
    const BitMatrix a = polynomial_matrix(spec.l, spec.m, spec.a);
    const BitMatrix b = polynomial_matrix(spec.l, spec.m, spec.b);
    CssCode code = build_css_code(a.hconcat(b), b.transpose().hconcat(a.transpose()), spec.name);
    code.d_claimed = spec.d_claimed;
    return code;
}

CssCode build_surface_code(int d) {
    if (d < 3 || d % 2 == 0) {
        throw std::invalid_argument("build_surface_code: distance must be odd and >= 3");
    }
    const auto n = static_cast<std::size_t>(d * d);
    BitMatrix gx(0, n);
    BitMatrix gz(0, n);
    std::vector<std::uint64_t> row(words_for(n));
    // Faces are indexed by their lower-right corner (r, c), 0 <= r, c <= d.
    // X faces are those with (r + c) even; weight-2 X faces sit on the top and
    // bottom edges, weight-2 Z faces on the left and right edges.
    for (int r = 0; r <= d; ++r) {
        for (int c = 0; c <= d; ++c) {
            const bool x_type = (r + c) % 2 == 0;
            const bool top_bottom = (r == 0 || r == d);
            const bool left_right = (c == 0 || c == d);
            if (top_bottom && left_right) {
                continue;
            }
            if (top_bottom && !x_type) {
                continue;
            }
            if (left_right && x_type) {
                continue;
            }
            std::fill(row.begin(), row.end(), 0);
            for (int dr = -1; dr <= 0; ++dr) {
                for (int dc = -1; dc <= 0; ++dc) {
                    const int rr = r + dr;
                    const int cc = c + dc;
                    if (rr < 0 || rr >= d || cc < 0 || cc >= d) {
                        continue;
                    }
                    const auto q = static_cast<std::size_t>(rr * d + cc);
                    row[q / 64] |= std::uint64_t{1} << (q % 64);
                }
            }
            (x_type ? gx : gz).append_row(row);
        }
    }
    CssCode code = build_css_code(std::move(gx), std::move(gz), "surface-d" + std::to_string(d));
    code.d_claimed = static_cast<std::size_t>(d);
    return code;
}

namespace {

std::size_t weight_of(const std::vector<std::uint64_t> &v) { return popcount(v); }

// Exhaustive minimum weight of (stabilizer span + nonzero logical combination),
// using a Gray-code walk over [stabilizer basis ; logical basis]. n <= 64.
std::size_t exhaustive_min_weight(const BitMatrix &stabilizers, const BitMatrix &logicals) {
    const RrefResult red = rref(stabilizers);
    std::vector<std::uint64_t> basis;
    for (std::size_t i = 0; i < red.rank(); ++i) {
        basis.push_back(red.matrix.row(i)[0]);
    }
    const std::size_t n_stab = basis.size();
    for (std::size_t i = 0; i < logicals.rows(); ++i) {
        basis.push_back(logicals.row(i)[0]);
    }
    const std::size_t dim = basis.size();
    if (dim >= 40) {
        throw std::invalid_argument("exhaustive_min_weight: span too large to enumerate");
    }
    std::uint64_t current = 0;
    std::size_t logical_bits = 0;
    std::size_t best = std::numeric_limits<std::size_t>::max();
    std::vector<bool> used(dim, false);
    for (std::uint64_t step = 1; step < (std::uint64_t{1} << dim); ++step) {
        const auto bit = static_cast<std::size_t>(std::countr_zero(step));
        current ^= basis[bit];
        used[bit] = !used[bit];
        if (bit >= n_stab) {
            logical_bits += used[bit] ? 1 : static_cast<std::size_t>(-1);
        }
        if (logical_bits != 0) {
            best = std::min(best, static_cast<std::size_t>(std::popcount(current)));
        }
    }
    return best;
}

// Random information-set search: row-reduce the kernel basis under a random
// column order and keep the lightest reduced row that is a nontrivial logical.
std::size_t sampled_min_weight(const BitMatrix &kernel, const BitMatrix &stabilizers, std::size_t trials,
                               Rng &rng) {
    EchelonBasis stab(stabilizers.cols());
    for (std::size_t i = 0; i < stabilizers.rows(); ++i) {
        stab.insert(stabilizers.row(i));
    }
    const std::size_t n = kernel.cols();
    std::size_t best = std::numeric_limits<std::size_t>::max();
    std::vector<std::size_t> perm(n);
    for (std::size_t t = 0; t < trials; ++t) {
        std::iota(perm.begin(), perm.end(), 0);
        for (std::size_t i = n; i > 1; --i) {
            std::swap(perm[i - 1], perm[rng.below(i)]);
        }
        BitMatrix permuted(kernel.rows(), n);
        for (std::size_t r = 0; r < kernel.rows(); ++r) {
            for (std::size_t c : kernel.row_support(r)) {
                permuted.set(r, perm[c], true);
            }
        }
        const RrefResult red = rref(std::move(permuted));
        std::vector<std::uint64_t> v(words_for(n));
        for (std::size_t r = 0; r < red.rank(); ++r) {
            const std::size_t w = red.matrix.row_weight(r);
            if (w >= best) {
                continue;
            }
            std::fill(v.begin(), v.end(), 0);
            for (std::size_t c = 0; c < n; ++c) {
                if (red.matrix.get(r, perm[c])) {
                    v[c / 64] |= std::uint64_t{1} << (c % 64);
                }
            }
            std::vector<std::uint64_t> probe = v;
            if (!stab.reduce(probe)) {
                best = weight_of(v);
            }
        }
    }
    return best;
}

}  // namespace

DistanceBound estimate_distance(const CssCode &code, std::size_t trials, std::uint64_t seed) {
    DistanceBound out;
    if (code.k == 0) {
        return out;
    }
    out.has_logicals = true;
    if (code.n <= 30) {
        out.weight_x = exhaustive_min_weight(code.gx, code.logicals_x);
        out.weight_z = exhaustive_min_weight(code.gz, code.logicals_z);
        out.exact = true;
    } else {
        Rng rng(seed);
        out.weight_x = sampled_min_weight(nullspace(code.gz), code.gx, trials, rng);
        out.weight_z = sampled_min_weight(nullspace(code.gx), code.gz, trials, rng);
    }
    out.weight = std::min(out.weight_x, out.weight_z);
    out.below_claimed = code.d_claimed.has_value() && out.weight < *code.d_claimed;
    return out;
}

namespace {

PolySpec make_spec(std::string name, std::size_t d, int l, int m, std::string_view a, std::string_view b) {
    PolySpec s;
    s.name = std::move(name);
    s.d_claimed = d;
    s.l = l;
    s.m = m;
    s.a = parse_polynomial(a);
    s.b = parse_polynomial(b);
    return s;
}

}  // namespace

std::vector<PolySpec> catalog_specs() {
    const auto make = make_spec;
    return {
        make("[72,12,6]", 6, 6, 6, "y + y^2 + x^3", "y^3 + x + x^2"),
        make("[90,8,10]", 10, 15, 3, "y + y^2 + x^9", "1 + x^2 + x^7"),
        make("[144,12,12]", 12, 12, 6, "y + y^2 + x^3", "y^3 + x + x^2"),
        make("[128,16,8]", 8, 8, 8, "y + y^2 + y^5 + x^6", "y^2 + x^2 + x^3 + x^7"),
        make("[72,8,10]", 10, 36, 1, "1 + x^9 + x^28 + x^31", "1 + x + x^21 + x^34"),
        make("[96,10,12]", 12, 12, 4, "1 + y + x*y + x^9", "1 + x^2 + x^7 + x^9*y^2"),
    };
}

std::optional<PolySpec> catalog_spec(std::string_view label) {
    for (auto &s : catalog_specs()) {
        if (s.name == label) {
            return s;
        }
    }
    // Large bivariate bicycle memory, selectable but not part of the table.
    if (label == "[288,12,18]") {
        return make_spec("[288,12,18]", 18, 12, 12, "x^3 + y^2 + y^7", "y^3 + x + x^2");
    }
    return std::nullopt;
}

}  // namespace qmem
