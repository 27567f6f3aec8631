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


#include "qmem/schedule.hpp"

#include <cmath>

#include "gtest/gtest.h"
#include "json.hpp"

namespace qmem {
namespace {

MovementSchedule build(const PolySpec &spec, OrderPolicy policy = OrderPolicy::Exhaustive) {
    return schedule_round(spec, layout(spec, LayoutVariant::CollisionFree), CostModel{}, policy);
}

TEST(MoveTime, Formula) {
    const CostModel m;
    EXPECT_EQ(move_time(0, 0, m), 0.0);
    EXPECT_NEAR(move_time(20, 0, m), std::sqrt(6000.0), 1e-12);
    EXPECT_NEAR(move_time(20, 0, m), 77.46, 5e-3);
    EXPECT_NEAR(move_time(10, 10, m), 2 * std::sqrt(3000.0), 1e-12);
    EXPECT_NEAR(move_time(10, 10, m), 109.54, 5e-3);
}

TEST(Schedule, AllTableCodesVerify) {
    for (const PolySpec &spec : catalog_specs()) {
        for (LayoutVariant v : {LayoutVariant::Standard, LayoutVariant::CollisionFree}) {
            const LayoutMap lay = layout(spec, v);
            const MovementSchedule s = schedule_round(spec, lay, CostModel{});
            const VerifyReport r = verify_schedule(s, build_code(spec), lay);
            EXPECT_TRUE(r.ok) << spec.name << ' ' << to_string(v) << ": (" << r.assertion << ") " << r.message;
        }
    }
}

// Published round times, ms.
TEST(Schedule, RoundTimesWithinFifteenPercent) {
    const double published[] = {2.13, 2.57, 2.31, 3.18, 4.16, 3.25};
    const auto specs = catalog_specs();
    for (std::size_t i = 0; i < specs.size(); ++i) {
        const double ms = build(specs[i]).round_time_us / 1000;
        EXPECT_LT(std::abs(ms / published[i] - 1), 0.15) << specs[i].name << ' ' << ms;
    }
}

TEST(Schedule, PulseCountFollowsPhases) {
    for (const PolySpec &spec : catalog_specs()) {
        std::size_t phases = 0;
        for (const auto *poly : {&spec.a, &spec.b}) {
            for (const PolyTerm &t : *poly) {
                phases += relative_positions(t, spec.l, spec.m).size();
            }
        }
        EXPECT_EQ(build(spec).pulse_count(), 2 * phases) << spec.name;
    }
    EXPECT_EQ(build(*catalog_spec("[72,12,6]")).pulse_count(), 24U);
}

TEST(Schedule, ExhaustiveNeverWorseThanSorted) {
    for (const PolySpec &spec : catalog_specs()) {
        const auto best = build(spec);
        EXPECT_TRUE(best.exhaustive);
        EXPECT_LE(best.round_time_us, build(spec, OrderPolicy::SortedHeuristic).round_time_us + 1e-9) << spec.name;
    }
}

TEST(Schedule, BlockRelabelingInvariance) {
    for (const PolySpec &spec : catalog_specs()) {
        PolySpec swapped = spec;
        std::swap(swapped.a, swapped.b);
        EXPECT_NEAR(build(spec).round_time_us, build(swapped).round_time_us, 1e-6) << spec.name;
    }
}

TEST(Schedule, SingleTermCode) {
    const PolySpec spec = parse_poly_spec("l = 1\nm = 1\na = 1\nb = 1\n");
    const MovementSchedule s = build(spec);
    EXPECT_EQ(s.pulse_count(), 4U);  // two per check type
    EXPECT_LT(s.round_time_us, 1000.0);
}

TEST(Schedule, CycleTime) {
    const MovementSchedule s = build(*catalog_spec("[128,16,8]"));
    EXPECT_EQ(cycle_time(s, 1), s.round_time_us);
    EXPECT_DOUBLE_EQ(cycle_time(s, 8), 8 * s.round_time_us);
    MovementSchedule published;
    published.round_time_us = 3180;
    EXPECT_NEAR(cycle_time(published, 8), 25440, 1e-9);
    published.round_time_us = 4160;
    EXPECT_NEAR(cycle_time(published, 10), 41600, 1e-9);
}

TEST(Schedule, DeletedMoveFailsCoverage) {
    const PolySpec spec = *catalog_spec("[72,12,6]");
    const LayoutMap lay = layout(spec, LayoutVariant::CollisionFree);
    MovementSchedule s = schedule_round(spec, lay, CostModel{});
    for (std::size_t i = 0; i < s.steps.size(); ++i) {
        if (std::holds_alternative<MoveStep>(s.steps[i].action)) {
            s.steps.erase(s.steps.begin() + static_cast<long>(i));
            break;
        }
    }
    const VerifyReport r = verify_schedule(s, build_code(spec), lay);
    EXPECT_FALSE(r.ok);
    EXPECT_EQ(r.assertion, 'a');
}

TEST(Schedule, SwappedPhasesFailExclusivity) {
    for (const PolySpec &spec : catalog_specs()) {
        const LayoutMap lay = layout(spec, LayoutVariant::CollisionFree);
        MovementSchedule s = schedule_round(spec, lay, CostModel{});
        long plain = -1, periodic = -1;
        for (std::size_t i = 0; i < s.steps.size(); ++i) {
            if (const auto *p = std::get_if<PulseStep>(&s.steps[i].action)) {
                long &slot = p->periodic ? periodic : plain;
                if (slot < 0) {
                    slot = static_cast<long>(i);
                }
            }
        }
        ASSERT_GE(plain, 0);
        ASSERT_GE(periodic, 0);
        std::swap(s.steps[plain].action, s.steps[periodic].action);
        const VerifyReport r = verify_schedule(s, build_code(spec), lay);
        EXPECT_FALSE(r.ok);
        EXPECT_EQ(r.assertion, 'b') << spec.name << ": " << r.message;
    }
}

TEST(Schedule, JsonExport) {
    const PolySpec spec = *catalog_spec("[72,12,6]");
    const LayoutMap lay = layout(spec, LayoutVariant::CollisionFree);
    const MovementSchedule s = schedule_round(spec, lay, CostModel{});
    const auto doc = nlohmann::json::parse(schedule_to_json(s, lay));
    const auto &j = doc.at("steps");
    EXPECT_EQ(j.size(), s.steps.size());
    EXPECT_DOUBLE_EQ(doc.at("round_time_us").get<double>(), s.round_time_us);
    double total = 0;
    for (const auto &step : j) {
        total += step.at("duration_us").get<double>();
    }
    EXPECT_NEAR(total, s.round_time_us, 1e-6);
}

}  // namespace
}  // namespace qmem
