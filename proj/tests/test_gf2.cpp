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


#include "qmem/gf2.hpp"

#include <set>

#include "gtest/gtest.h"
#include "qmem/gb_code.hpp"
#include "qmem/rng.hpp"

namespace qmem {
namespace {

BitMatrix random_matrix(std::size_t r, std::size_t c, double density, Rng &rng) {
    BitMatrix m(r, c);
    for (std::size_t i = 0; i < r; ++i) {
        for (std::size_t j = 0; j < c; ++j) {
            m.set(i, j, rng.uniform() < density);
        }
    }
    return m;
}

// Row-space size by enumeration of all 2^rows combinations.
std::size_t span_size(const BitMatrix &m) {
    std::set<std::vector<std::uint64_t>> seen;
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << m.rows()); ++mask) {
        std::vector<std::uint64_t> v(m.words_per_row(), 0);
        for (std::size_t r = 0; r < m.rows(); ++r) {
            if ((mask >> r) & 1U) {
                for (std::size_t w = 0; w < v.size(); ++w) {
                    v[w] ^= m.row(r)[w];
                }
            }
        }
        seen.insert(v);
    }
    return seen.size();
}

bool in_kernel(const BitMatrix &m, std::uint64_t v) {
    for (std::size_t r = 0; r < m.rows(); ++r) {
        unsigned parity = 0;
        for (std::size_t c = 0; c < m.cols(); ++c) {
            parity ^= m.get(r, c) & ((v >> c) & 1U);
        }
        if (parity) {
            return false;
        }
    }
    return true;
}

TEST(Gf2, RankSmallCases) {
    EXPECT_EQ(rank(BitMatrix::identity(3)), 3U);
    EXPECT_EQ(rank(BitMatrix(4, 5)), 0U);
    EXPECT_EQ(rank(BitMatrix::from_strings({"110", "011", "101"})), 2U);
}

TEST(Gf2, RankMatchesSpanEnumeration) {
    Rng rng(11);
    for (int trial = 0; trial < 40; ++trial) {
        const std::size_t r = 1 + rng.below(8);
        const std::size_t c = 1 + rng.below(70);
        const BitMatrix m = random_matrix(r, c, 0.4, rng);
        EXPECT_EQ(std::size_t{1} << rank(m), span_size(m)) << m.to_string();
    }
}

TEST(Gf2, RrefIsCanonical) {
    const BitMatrix m = BitMatrix::from_strings({"0110", "1100", "1010"});
    const RrefResult r = rref(m);
    EXPECT_EQ(r.pivot_cols, (std::vector<std::size_t>{0, 1}));
    EXPECT_EQ(r.matrix, BitMatrix::from_strings({"1010", "0110", "0000"}));
}

TEST(Gf2, NullspaceMatchesEnumeration) {
    EXPECT_EQ(nullspace(BitMatrix::identity(4)).rows(), 0U);
    EXPECT_EQ(nullspace(BitMatrix(2, 3)).rows(), 3U);
    Rng rng(5);
    for (int trial = 0; trial < 30; ++trial) {
        const std::size_t r = 1 + rng.below(6);
        const std::size_t c = 1 + rng.below(12);
        const BitMatrix m = random_matrix(r, c, 0.5, rng);
        const BitMatrix ns = nullspace(m);
        std::size_t kernel = 0;
        for (std::uint64_t v = 0; v < (std::uint64_t{1} << c); ++v) {
            kernel += in_kernel(m, v);
        }
        EXPECT_EQ(std::size_t{1} << ns.rows(), kernel);
        EXPECT_EQ(rank(ns), ns.rows());
        EXPECT_TRUE((m * ns.transpose()).is_zero());
    }
}

TEST(Gf2, QuotientBasis) {
    const BitMatrix n = BitMatrix::identity(2);
    const BitMatrix r = BitMatrix::from_strings({"10"});
    const BitMatrix q = quotient_basis(n, r);
    ASSERT_EQ(q.rows(), 1U);
    EXPECT_TRUE(q.get(0, 1));
    EXPECT_THROW(quotient_basis(r, n), std::invalid_argument);
}

TEST(Gf2, InverseRoundTrip) {
    Rng rng(3);
    int tested = 0;
    while (tested < 10) {
        const BitMatrix m = random_matrix(9, 9, 0.5, rng);
        if (rank(m) < 9) {
            EXPECT_THROW(inverse(m), std::invalid_argument);
            continue;
        }
        EXPECT_EQ(m * inverse(m), BitMatrix::identity(9));
        ++tested;
    }
}

TEST(Gf2, KronAndConcat) {
    const BitMatrix a = BitMatrix::from_strings({"10", "11"});
    EXPECT_EQ(a.kron(BitMatrix::identity(2)), BitMatrix::from_strings({"1000", "0100", "1010", "0101"}));
    EXPECT_EQ(a.hconcat(a).cols(), 4U);
    EXPECT_EQ(a.vconcat(a).rows(), 4U);
    EXPECT_EQ(a.transpose(), BitMatrix::from_strings({"11", "01"}));
}

TEST(Gf2, RanksOfSmallGbCode) {
    const CssCode code = build_code(*catalog_spec("[72,12,6]"));
    EXPECT_EQ(rank(code.gx), 30U);
    EXPECT_EQ(nullspace(code.gz).rows(), 42U);
}

}  // namespace
}  // namespace qmem
