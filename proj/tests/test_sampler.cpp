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


#include "qmem/sampler.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "gtest/gtest.h"
#include "qmem/rng.hpp"

namespace qmem {
namespace {

DetectorModel toy_model(std::vector<Mechanism> mechs, std::size_t dets, std::size_t obs) {
    DetectorModel m;
    m.num_detectors = dets;
    m.num_observables = obs;
    m.mechanisms = std::move(mechs);
    return m;
}

TEST(PerRound, Formula) {
    EXPECT_EQ(per_round_ler(0, 100, 6), 0.0);
    EXPECT_EQ(per_round_ler(100, 100, 6), 1.0);
    const double expect = 1 - std::pow(0.9988, 1.0 / 6);
    EXPECT_NEAR(per_round_ler(120, 100000, 6), expect, 1e-12 * expect);
    EXPECT_NEAR(per_round_ler(120, 100000, 6), 2.0010e-4, 1e-8);
    EXPECT_EQ(per_round_ler(7, 1000, 1), 0.007);
}

TEST(Wilson, KnownValues) {
    const Interval zero = wilson_interval(0, 100);
    EXPECT_EQ(zero.lo, 0.0);
    EXPECT_NEAR(zero.hi, 0.03699, 1e-5);
    const Interval half = wilson_interval(50, 100);
    EXPECT_NEAR(half.lo, 0.40383, 1e-5);
    EXPECT_NEAR(half.hi, 0.59617, 1e-5);
}

TEST(Sample, EdgeProbabilities) {
    const DetectorModel none = toy_model({{0.0, {0, 1}, {0}}}, 3, 1);
    const ShotBatch a = sample(none, 500, 1);
    EXPECT_TRUE(a.syndromes.is_zero());
    const DetectorModel sure = toy_model({{1.0, {0, 2}, {0}}}, 3, 1);
    const ShotBatch b = sample(sure, 500, 1);
    for (std::size_t s = 0; s < 500; ++s) {
        EXPECT_TRUE(b.syndromes.get(s, 0));
        EXPECT_FALSE(b.syndromes.get(s, 1));
        EXPECT_TRUE(b.syndromes.get(s, 2));
        EXPECT_TRUE(b.observable_flips.get(s, 0));
    }
}

TEST(Sample, RatesAndDeterminism) {
    const DetectorModel m = toy_model({{0.02, {0}, {}}, {0.3, {1}, {0}}, {0.001, {0, 1}, {}}}, 2, 1);
    const std::size_t shots = 200000;
    const ShotBatch a = sample(m, shots, 5);
    const ShotBatch b = sample(m, shots, 5);
    EXPECT_EQ(a.syndromes, b.syndromes);
    double c0 = 0, c1 = 0;
    for (std::size_t s = 0; s < shots; ++s) {
        c0 += a.syndromes.get(s, 0);
        c1 += a.syndromes.get(s, 1);
    }
    const double p0 = 0.02 + 0.001 - 2 * 0.02 * 0.001;
    const double p1 = 0.3 + 0.001 - 2 * 0.3 * 0.001;
    EXPECT_NEAR(c0 / shots, p0, 5 * std::sqrt(p0 * (1 - p0) / shots));
    EXPECT_NEAR(c1 / shots, p1, 5 * std::sqrt(p1 * (1 - p1) / shots));
}

TEST(AdaptiveRun, NoiselessStopsAtMaxShots) {
    const DetectorModel m = toy_model({}, 4, 2);
    NullPredictor dec(2);
    StopCondition stop;
    stop.max_shots = 12345;
    const LerResult r = adaptive_run(m, dec, stop, 1, 3);
    EXPECT_EQ(r.shots, 12345U);
    EXPECT_EQ(r.errors, 0U);
    EXPECT_EQ(r.p_L_per_round, 0.0);
}

// The null decoder fails exactly on shots with a nonzero observable flip;
// replay the batches with their documented seeds and count directly.
TEST(AdaptiveRun, NullDecoderCountsRawFlips) {
    const DetectorModel m = toy_model({{0.01, {0}, {0}}, {0.05, {1}, {}}, {0.02, {0, 1}, {1}}}, 2, 2);
    NullPredictor dec(2);
    StopCondition stop;
    stop.min_errors = 200;
    stop.batch_shots = 1000;
    const LerResult r = adaptive_run(m, dec, stop, 42, 1);
    std::uint64_t shots = 0, errors = 0;
    for (std::uint64_t b = 0; errors < 200; ++b) {
        const ShotBatch batch = sample(m, 1000, Rng::stream(42, b)());
        for (std::size_t s = 0; s < 1000; ++s) {
            errors += batch.observable_flips.get(s, 0) || batch.observable_flips.get(s, 1);
        }
        shots += 1000;
    }
    EXPECT_EQ(r.shots, shots);
    EXPECT_EQ(r.errors, errors);
    EXPECT_LE(r.per_round_95.lo, r.p_L_per_round);
    EXPECT_GE(r.per_round_95.hi, r.p_L_per_round);
}

TEST(AdaptiveRun, ThreadCountDoesNotChangeResult) {
    const DetectorModel m = toy_model({{0.003, {0}, {0}}, {0.01, {1}, {}}}, 2, 1);
    StopCondition stop;
    stop.min_errors = 50;
    stop.batch_shots = 512;
    NullPredictor d1(1), d3(1);
    const LerResult one = adaptive_run(m, d1, stop, 9, 2);
    stop.threads = 3;
    const LerResult three = adaptive_run(m, d3, stop, 9, 2);
    EXPECT_EQ(one.shots, three.shots);
    EXPECT_EQ(one.errors, three.errors);
}

TEST(LerCsv, AppendsWithHeader) {
    const auto path = std::filesystem::temp_directory_path() / "qmem_ler_test.csv";
    std::filesystem::remove(path);
    LerResult r;
    r.shots = 1000;
    r.errors = 3;
    r.rounds = 6;
    r.p_L_per_round = per_round_ler(3, 1000, 6);
    r.seed = 77;
    append_ler_csv(path.string(), "[72,12,6]", 1e-3, 10, r);
    append_ler_csv(path.string(), "[72,12,6]", 3e-3, 10, r);
    std::ifstream in(path);
    std::string header, row;
    std::getline(in, header);
    EXPECT_EQ(header, "code,p,t_coherence_s,d,N_s,N_e,p_L,seed");
    int rows = 0;
    while (std::getline(in, row)) {
        ++rows;
        EXPECT_NE(row.find(",77"), std::string::npos);
    }
    EXPECT_EQ(rows, 2);
    std::filesystem::remove(path);
}

}  // namespace
}  // namespace qmem
