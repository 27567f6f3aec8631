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


#include "qmem/bposd.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "gtest/gtest.h"
#include "qmem/rng.hpp"
#include "qmem/sampler.hpp"

namespace qmem {
namespace {

std::vector<std::uint8_t> syndrome_of(const SparseMatrix &h, const std::vector<std::uint8_t> &e) {
    std::vector<std::uint8_t> s(h.rows, 0);
    for (std::size_t c = 0; c < h.cols; ++c) {
        if (e[c]) {
            for (auto r : h.col_rows[c]) {
                s[r] ^= 1;
            }
        }
    }
    return s;
}

DecodingProblem random_problem(std::size_t rows, std::size_t cols, double density, Rng &rng, bool full_rank) {
    BitMatrix h(rows, cols);
    do {
        for (std::size_t r = 0; r < rows; ++r) {
            for (std::size_t c = 0; c < cols; ++c) {
                h.set(r, c, rng.uniform() < density);
            }
        }
    } while (full_rank && rank(h) < rows);
    DecodingProblem p;
    p.h = SparseMatrix::from_dense(h);
    p.obs = SparseMatrix::from_columns(0, std::vector<std::vector<std::uint32_t>>(cols));
    p.priors.resize(cols);
    for (double &x : p.priors) {
        x = 0.01 + 0.2 * rng.uniform();
    }
    return p;
}

// Minimum soft weight over all 2^cols patterns matching `s`; +inf if none.
double brute_force_min(const DecodingProblem &p, const std::vector<std::uint8_t> &s) {
    double best = INFINITY;
    const std::size_t n = p.h.cols;
    for (std::uint32_t mask = 0; mask < (1U << n); ++mask) {
        std::vector<std::uint8_t> e(n);
        for (std::size_t c = 0; c < n; ++c) {
            e[c] = (mask >> c) & 1U;
        }
        if (syndrome_of(p.h, e) == s) {
            best = std::min(best, soft_weight(p.priors, e));
        }
    }
    return best;
}

std::vector<std::uint8_t> random_bits(std::size_t n, Rng &rng) {
    std::vector<std::uint8_t> s(n);
    for (auto &b : s) {
        b = static_cast<std::uint8_t>(rng.below(2));
    }
    return s;
}

TEST(Bp, ZeroSyndrome) {
    Rng rng(1);
    const DecodingProblem p = random_problem(6, 10, 0.4, rng, false);
    const BpResult r = bp_decode(p.h, p.priors, std::vector<std::uint8_t>(6, 0), DecoderConfig{});
    EXPECT_TRUE(r.converged);
    EXPECT_EQ(r.iterations, 0U);
    EXPECT_EQ(std::accumulate(r.hard.begin(), r.hard.end(), 0), 0);
}

TEST(Bp, IsolatedColumn) {
    // Column 2 is the only one with signature {0, 2}.
    const SparseMatrix h = SparseMatrix::from_columns(3, {{0}, {1}, {0, 2}, {1, 2}});
    const std::vector<double> priors{1e-4, 1e-4, 0.1, 1e-4};
    const BpResult r = bp_decode(h, priors, std::vector<std::uint8_t>{1, 0, 1}, DecoderConfig{});
    EXPECT_TRUE(r.converged);
    EXPECT_EQ(r.hard, (std::vector<std::uint8_t>{0, 0, 1, 0}));
}

TEST(Bp, CodeCapacityWeightOne) {
    const CssCode code = build_code(*catalog_spec("[72,12,6]"));
    for (CheckType t : {CheckType::Z, CheckType::X}) {
        const BpOsdDecoder dec(DecodingProblem::code_capacity(code, t, 0.01), DecoderConfig{});
        for (std::size_t q = 0; q < code.n; ++q) {
            std::vector<std::uint8_t> e(code.n, 0);
            e[q] = 1;
            const DecodeResult r = dec.decode(syndrome_of(dec.problem().h, e));
            EXPECT_EQ(r.correction, e) << q;
        }
    }
}

TEST(Osd, OrderZeroIsInformationSetSolution) {
    Rng rng(4);
    for (int trial = 0; trial < 20; ++trial) {
        const DecodingProblem p = random_problem(8, 12, 0.35, rng, true);
        std::vector<double> post(12);
        for (double &x : post) {
            x = rng.uniform() * 4 - 2;
        }
        const auto s = random_bits(8, rng);
        DecoderConfig cfg;
        cfg.osd_order = 0;
        const DecodeResult r = osd_postprocess(p.h, p.priors, s, post, cfg);
        // Independent OSD-0: most reliable (lowest LLR first) independent
        // columns, solved by enumeration over those columns only.
        std::vector<std::size_t> order(12);
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return post[a] < post[b]; });
        const BitMatrix ht = p.h.to_dense().transpose();
        EchelonBasis basis(8);
        std::vector<std::size_t> info;
        for (std::size_t c : order) {
            if (basis.insert(ht.row(c))) {
                info.push_back(c);
            }
        }
        ASSERT_EQ(info.size(), 8U);
        std::vector<std::uint8_t> expect;
        for (std::uint32_t mask = 0; mask < 256; ++mask) {
            std::vector<std::uint8_t> e(12, 0);
            for (std::size_t i = 0; i < 8; ++i) {
                e[info[i]] = (mask >> i) & 1U;
            }
            if (syndrome_of(p.h, e) == s) {
                expect = e;
            }
        }
        EXPECT_EQ(r.correction, expect);
        EXPECT_TRUE(r.used_osd);
    }
}

TEST(Osd, CombinationSweepMatchesBruteForce) {
    Rng rng(9);
    for (int trial = 0; trial < 10; ++trial) {
        // 8 checks, 10 columns: at most two non-pivots, so the sweep is exhaustive.
        const DecodingProblem p = random_problem(8, 10, 0.35, rng, true);
        for (int k = 0; k < 20; ++k) {
            const auto s = random_bits(8, rng);
            std::vector<double> post(p.priors.size());
            for (std::size_t c = 0; c < post.size(); ++c) {
                post[c] = std::log((1 - p.priors[c]) / p.priors[c]);
            }
            const DecodeResult r = osd_postprocess(p.h, p.priors, s, post, DecoderConfig{});
            EXPECT_EQ(syndrome_of(p.h, r.correction), s);
            EXPECT_NEAR(r.soft_weight, brute_force_min(p, s), 1e-9);
        }
    }
}

TEST(Osd, HigherOrderNeverWorse) {
    Rng rng(21);
    const DecodingProblem p = random_problem(30, 60, 0.1, rng, false);
    for (int k = 0; k < 50; ++k) {
        std::vector<std::uint8_t> e(60, 0);
        for (auto &b : e) {
            b = rng.uniform() < 0.08;
        }
        const auto s = syndrome_of(p.h, e);
        std::vector<double> post(60);
        for (double &x : post) {
            x = rng.uniform() * 6 - 3;
        }
        double last = INFINITY;
        for (std::size_t order : {0, 2, 5, 10}) {
            DecoderConfig cfg;
            cfg.osd_order = order;
            const DecodeResult r = osd_postprocess(p.h, p.priors, s, post, cfg);
            EXPECT_EQ(syndrome_of(p.h, r.correction), s);
            EXPECT_LE(r.soft_weight, last + 1e-12);
            last = r.soft_weight;
        }
    }
}

TEST(Osd, UnsatisfiableIsFlagged) {
    const SparseMatrix h = SparseMatrix::from_columns(2, {{0}, {0}});
    const std::vector<double> priors{0.1, 0.1};
    const DecodeResult r = osd_postprocess(h, priors, std::vector<std::uint8_t>{0, 1}, std::vector<double>{1, 1},
                                           DecoderConfig{});
    EXPECT_TRUE(r.unsatisfiable);
}

TEST(BpOsd, DeterministicAndConsistent) {
    Rng rng(33);
    const DecodingProblem p = random_problem(40, 90, 0.08, rng, false);
    const BpOsdDecoder dec(p, DecoderConfig{});
    for (int k = 0; k < 30; ++k) {
        std::vector<std::uint8_t> e(90, 0);
        for (auto &b : e) {
            b = rng.uniform() < 0.1;
        }
        const auto s = syndrome_of(p.h, e);
        const DecodeResult a = dec.decode(s);
        const DecodeResult b = dec.decode(s);
        EXPECT_EQ(a.correction, b.correction);
        EXPECT_EQ(syndrome_of(p.h, a.correction), s);
    }
}

TEST(BpOsd, OsdOnConvergedReachesMinimum) {
    Rng rng(2);
    const DecodingProblem p = random_problem(10, 12, 0.3, rng, true);
    DecoderConfig cfg;
    cfg.osd_on_converged = true;
    const BpOsdDecoder dec(p, cfg);
    for (int k = 0; k < 50; ++k) {
        const auto s = random_bits(10, rng);
        EXPECT_NEAR(dec.decode(s).soft_weight, brute_force_min(p, s), 1e-9);
    }
}

TEST(SplitDecoder, ZeroSyndromeAndSeparation) {
    NoiseParams np;
    np.p = 1e-3;
    const MemoryExperiment e = build_memory_experiment(*catalog_spec("[72,12,6]"), np, 2);
    const std::size_t words = words_for(e.model.num_detectors);
    std::vector<std::uint64_t> syn(words, 0);
    const DecodeResult zero = decode_split(e.model, syn, DecoderConfig{});
    EXPECT_EQ(std::accumulate(zero.predicted_observables.begin(), zero.predicted_observables.end(), 0), 0);
    // Fire one X-check detector only: the Z view must stay untouched.
    const auto &xd = e.model.split[0].detector_ids;
    ASSERT_FALSE(xd.empty());
    syn[xd[0] / 64] |= std::uint64_t{1} << (xd[0] % 64);
    SplitDecoder dec(e.model, DecoderConfig{});
    const DecodeResult r = dec.decode(syn);
    EXPECT_EQ(std::accumulate(r.predicted_observables.begin(), r.predicted_observables.end(), 0), 0);
}

TEST(CodeCapacity, LowFailureRateOnTableCodes) {
    for (const PolySpec &spec : catalog_specs()) {
        const CssCode code = build_code(spec);
        const BpOsdDecoder dec(DecodingProblem::code_capacity(code, CheckType::Z, 1e-3), DecoderConfig{});
        const auto &obs = dec.problem().obs;
        Rng rng(17);
        const std::size_t trials = 100000;
        std::size_t fails = 0;
        for (std::size_t t = 0; t < trials; ++t) {
            std::vector<std::uint8_t> e(code.n, 0);
            bool any = false;
            for (auto &b : e) {
                b = rng.uniform() < 1e-3;
                any = any || b;
            }
            if (!any) {
                continue;
            }
            const DecodeResult r = dec.decode(syndrome_of(dec.problem().h, e));
            std::vector<std::uint8_t> residual(code.n);
            for (std::size_t c = 0; c < code.n; ++c) {
                residual[c] = e[c] ^ r.correction[c];
            }
            fails += std::any_of(obs.row_cols.begin(), obs.row_cols.end(), [&](const auto &cols) {
                unsigned v = 0;
                for (auto c : cols) {
                    v ^= residual[c];
                }
                return v != 0;
            });
        }
        EXPECT_LT(static_cast<double>(fails) / trials, 1e-4) << spec.name;
    }
}

}  // namespace
}  // namespace qmem
