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

#include <bit>
#include <set>

#include "gtest/gtest.h"
#include "qmem/kv_config.hpp"

namespace qmem {
namespace {

struct TableRow {
    const char *text;
    std::size_t n, k, w, d;
};

// Rows of the selected-codes table, written out as spec documents.
const TableRow kTable[] = {
    {"l = 6\nm = 6\na = y + y^2 + x^3\nb = y^3 + x + x^2\n", 72, 12, 6, 6},
    {"l = 15\nm = 3\na = y + y^2 + x^9\nb = 1 + x^2 + x^7\n", 90, 8, 6, 10},
    {"l = 12\nm = 6\na = y + y^2 + x^3\nb = y^3 + x + x^2\n", 144, 12, 6, 12},
    {"l = 8\nm = 8\na = y + y^2 + y^5 + x^6\nb = y^2 + x^2 + x^3 + x^7\n", 128, 16, 8, 8},
    {"l = 36\nm = 1\na = 1 + x^9 + x^28 + x^31\nb = 1 + x + x^21 + x^34\n", 72, 8, 8, 10},
    {"l = 12\nm = 4\na = 1 + y + x*y + x^9\nb = 1 + x^2 + x^7 + x^9*y^2\n", 96, 10, 8, 12},
};

std::uint32_t row_mask(const BitMatrix &m, std::size_t r) {
    return static_cast<std::uint32_t>(m.row(r)[0]);
}

// Exhaustive minimum weight of a vector in ker(h) outside rowspace(g), for
// n <= 26. Returns 0 when there is none.
std::size_t brute_force_distance(const BitMatrix &h, const BitMatrix &g) {
    const std::size_t n = h.cols();
    std::set<std::uint32_t> stabilizers;
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << g.rows()); ++mask) {
        std::uint32_t v = 0;
        for (std::size_t r = 0; r < g.rows(); ++r) {
            if ((mask >> r) & 1U) {
                v ^= row_mask(g, r);
            }
        }
        stabilizers.insert(v);
    }
    std::size_t best = 0;
    for (std::uint32_t v = 1; v < (std::uint32_t{1} << n); ++v) {
        const auto w = static_cast<std::size_t>(std::popcount(v));
        if (best && w >= best) {
            continue;
        }
        bool ok = true;
        for (std::size_t r = 0; r < h.rows() && ok; ++r) {
            ok = std::popcount(row_mask(h, r) & v) % 2 == 0;
        }
        if (ok && !stabilizers.count(v)) {
            best = w;
        }
    }
    return best;
}

BitMatrix symplectic(const CssCode &c) { return c.logicals_x * c.logicals_z.transpose(); }

TEST(GbCode, CyclicPowerMatchesDisplayedMatrices) {
    EXPECT_EQ(cyclic_power(3, 1), BitMatrix::from_strings({"010", "001", "100"}));
    EXPECT_EQ(cyclic_power(3, 2), BitMatrix::from_strings({"001", "100", "010"}));
    EXPECT_EQ(cyclic_power(3, 0), BitMatrix::identity(3));
    EXPECT_THROW(cyclic_power(3, 3), std::invalid_argument);
}

TEST(GbCode, SelectedCodesTable) {
    for (const TableRow &row : kTable) {
        const PolySpec spec = parse_poly_spec(row.text);
        const CssCode code = build_code(spec);
        SCOPED_TRACE(row.text);
        EXPECT_EQ(code.n, row.n);
        EXPECT_EQ(code.k, row.k);
        EXPECT_EQ(spec.check_weight(), row.w);
        EXPECT_TRUE((code.gx * code.gz.transpose()).is_zero());
        EXPECT_EQ(code.k, code.n - rank(code.gx) - rank(code.gz));
        for (std::size_t r = 0; r < code.gx.rows(); ++r) {
            EXPECT_EQ(code.gx.row_weight(r), row.w);
            EXPECT_EQ(code.gz.row_weight(r), row.w);
        }
        // Logicals commute with the opposite checks and pair up exactly.
        EXPECT_TRUE((code.gz * code.logicals_x.transpose()).is_zero());
        EXPECT_TRUE((code.gx * code.logicals_z.transpose()).is_zero());
        EXPECT_EQ(symplectic(code), BitMatrix::identity(code.k));
    }
}

TEST(GbCode, CatalogMatchesTable) {
    const auto cat = catalog_specs();
    ASSERT_EQ(cat.size(), 6U);
    for (std::size_t i = 0; i < cat.size(); ++i) {
        const CssCode a = build_code(cat[i]);
        const CssCode b = build_code(parse_poly_spec(kTable[i].text));
        EXPECT_EQ(a.gx, b.gx);
        EXPECT_EQ(a.gz, b.gz);
        EXPECT_EQ(cat[i].d_claimed, kTable[i].d);
    }
    EXPECT_TRUE(catalog_spec("[144,12,12]").has_value());
    EXPECT_FALSE(catalog_spec("[1,2,3]").has_value());
}

TEST(GbCode, LargeMemoryEntry) {
    const auto spec = catalog_spec("[288,12,18]");
    ASSERT_TRUE(spec.has_value());
    const CssCode code = build_code(*spec);
    EXPECT_EQ(code.n, 288U);
    EXPECT_EQ(code.k, 12U);
    EXPECT_TRUE((code.gx * code.gz.transpose()).is_zero());
}

TEST(GbCode, FullyConstrainedCode) {
    const CssCode code = build_code(parse_poly_spec("l = 1\nm = 1\na = 1\nb = 1\n"));
    EXPECT_EQ(code.n, 2U);
    EXPECT_EQ(code.k, 0U);
    EXPECT_FALSE(estimate_distance(code, 10).has_logicals);
}

TEST(GbCode, ToyCodeDistanceIsExact) {
    const CssCode code = build_code(parse_poly_spec("l = 3\nm = 3\na = 1 + x + y\nb = 1 + x^2 + y^2\n"));
    ASSERT_GT(code.k, 0U);
    const DistanceBound db = estimate_distance(code, 1);
    EXPECT_TRUE(db.exact);
    EXPECT_EQ(db.weight_x, brute_force_distance(code.gz, code.gx));
    EXPECT_EQ(db.weight_z, brute_force_distance(code.gx, code.gz));
    EXPECT_EQ(db.weight, std::min(db.weight_x, db.weight_z));
}

TEST(GbCode, SampledBoundOnSmallestTableCode) {
    const CssCode code = build_code(*catalog_spec("[72,12,6]"));
    const DistanceBound db = estimate_distance(code, 200, 7);
    EXPECT_FALSE(db.exact);
    EXPECT_EQ(db.weight, 6U);
    EXPECT_FALSE(db.below_claimed);
}

TEST(GbCode, SurfaceCodes) {
    const CssCode d3 = build_surface_code(3);
    EXPECT_EQ(d3.n, 9U);
    EXPECT_EQ(d3.k, 1U);
    const CssCode d11 = build_surface_code(11);
    EXPECT_EQ(d11.n, 121U);
    EXPECT_EQ(d11.k, 1U);
    EXPECT_EQ(12 * d11.n, 1452U);
    const CssCode d5 = build_surface_code(5);
    EXPECT_EQ(brute_force_distance(d5.gz, d5.gx), 5U);
    EXPECT_EQ(brute_force_distance(d5.gx, d5.gz), 5U);
    EXPECT_EQ(estimate_distance(d5, 1).weight, 5U);
    EXPECT_THROW(build_surface_code(4), std::invalid_argument);
}

TEST(GbCode, PolynomialParsing) {
    const auto terms = parse_polynomial("1 + x*y + x^9*y^2");
    ASSERT_EQ(terms.size(), 3U);
    EXPECT_EQ(terms[1].p, 1);
    EXPECT_EQ(terms[1].q, 1);
    EXPECT_EQ(terms[2].p, 9);
    EXPECT_EQ(terms[2].q, 2);
    EXPECT_EQ(format_polynomial(parse_polynomial("y + y^2 + x^3")), "y + y^2 + x^3");
}

TEST(GbCode, MalformedSpecsReportPosition) {
    try {
        parse_poly_spec("l = 6\nm = 6\na = x^3 + y +\nb = y^3\n");
        FAIL() << "expected a parse error";
    } catch (const ParseError &e) {
        EXPECT_EQ(e.line(), 3U);
        EXPECT_GT(e.column(), 4U);
    }
    EXPECT_THROW(parse_poly_spec("l = 6\nm = 6\na = x^7\nb = y\n"), std::exception);
    EXPECT_THROW(parse_poly_spec("l = 6\nm = 6\na = y + y\nb = x\n"), std::exception);
    EXPECT_THROW(parse_poly_spec("l = 6\na = y\nb = x\n"), std::exception);
}

}  // namespace
}  // namespace qmem
