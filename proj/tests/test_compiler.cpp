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
#include "qmem/compiler.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <sstream>

#include "gtest/gtest.h"
#include "json.hpp"

namespace qmem {
namespace {

ArchConfig two_slot_arch() {
    ArchConfig a = default_arch();
    a.n_blocks = 2;
    a.n_surface = 2;
    return a;
}

void expect_parse_error(const std::string &text, std::size_t line, std::size_t column) {
    try {
        parse_program_text(text);
        ADD_FAILURE() << "no error for:\n" << text;
    } catch (const ParseError &e) {
        EXPECT_EQ(e.line(), line) << text;
        EXPECT_EQ(e.column(), column) << text;
    }
}

TEST(Program, ParsesAndRoundTrips) {
    const Program p = parse_program_text("# demo\nqubits 3\nh 0\ncnot 0 1\nt 2  # inline\nmeta n_rz 4\n");
    EXPECT_EQ(p.n_qubits, 3u);
    ASSERT_EQ(p.ops.size(), 3u);
    EXPECT_EQ(p.ops[1].kind, OpKind::CNOT);
    EXPECT_EQ(p.ops[1].b, 1u);
    EXPECT_EQ(p.n_rz, 4.0);
    std::ostringstream out;
    write_program(out, p);
    const Program q = parse_program_text(out.str());
    ASSERT_EQ(q.ops.size(), p.ops.size());
    for (std::size_t i = 0; i < p.ops.size(); ++i) {
        EXPECT_EQ(q.ops[i].kind, p.ops[i].kind);
        EXPECT_EQ(q.ops[i].a, p.ops[i].a);
        EXPECT_EQ(q.ops[i].b, p.ops[i].b);
    }
}

TEST(Program, ErrorsPointAtTheToken) {
    expect_parse_error("qubits 2\ncnot 0 5\n", 2, 8);
    expect_parse_error("qubits 2\nh 9\n", 2, 3);
    expect_parse_error("qubits 2\nfoo 1\n", 2, 1);
    expect_parse_error("h 0\n", 1, 1);
    expect_parse_error("qubits 2\ncnot 1 1\n", 2, 1);
    EXPECT_THROW(parse_program_text("# nothing\n"), ParseError);
}

TEST(Mapper, SplitsASingleCnot) {
    const Program p = parse_program_text("qubits 2\ncnot 0 1\n");
    const Assignment a = map_qubits(p, 2, 1);
    ASSERT_EQ(a.size(), 2u);
    EXPECT_NE(a[0], a[1]);
}

TEST(Mapper, TriangleMatchesExhaustiveOptimum) {
    const Program p = parse_program_text("qubits 3\ncnot 0 1\ncnot 1 2\ncnot 0 2\ncnot 0 1\n");
    std::size_t best = std::numeric_limits<std::size_t>::max();
    for (unsigned mask = 0; mask < 8; ++mask) {
        Assignment a{mask & 1u, (mask >> 1) & 1u, (mask >> 2) & 1u};
        const auto ones = std::count(a.begin(), a.end(), 1u);
        if (ones > 2 || ones < 1) {
            continue;
        }
        best = std::min(best, monochromatic_weight(p, a));
    }
    const Assignment got = map_qubits(p, 2, 2);
    EXPECT_EQ(monochromatic_weight(p, got), best);
    EXPECT_EQ(best, 1u);
}

TEST(Mapper, RespectsCapacity) {
    const Program p = ghz_program(10);
    const Assignment a = map_qubits(p, 3, 4);
    std::map<std::size_t, int> load;
    for (auto b : a) {
        ASSERT_LT(b, 3u);
        ++load[b];
    }
    for (auto [b, n] : load) EXPECT_LE(n, 4);
    const Assignment free_prog = map_qubits(parse_program_text("qubits 4\nh 0\nt 3\n"), 2, 2);
    EXPECT_EQ(free_prog.size(), 4u);
    EXPECT_THROW(map_qubits(p, 2, 4), std::invalid_argument);
}

TEST(Compile, EmptyProgramCostsNothing) {
    const Program p = parse_program_text("qubits 0\n");
    const CompiledProgram cp = compile(p, default_arch());
    EXPECT_EQ(cp.n_cycles, 0u);
    EXPECT_EQ(cp.cost.spacetime_qubit_seconds, 0.0);
    EXPECT_EQ(cp.cost.time_seconds, 0.0);
    EXPECT_EQ(compile_baseline(p, default_arch()).cost.spacetime_qubit_seconds, 0.0);
}

TEST(Compile, SingleCnotHandTrace) {
    // Loads take 2 LD/ST cycles of 27.5 ms each, i.e. 5 surface cycles of
    // 11 ms, and run in parallel on two blocks; the CNOT adds 2.
    const Program p = parse_program_text("qubits 2\ncnot 0 1\n");
    const CompiledProgram split = schedule(p, {0, 1}, two_slot_arch());
    EXPECT_EQ(split.n_ldst, 2u);
    EXPECT_EQ(split.n_cycles, 7u);
    const CompiledProgram same = schedule(p, {0, 0}, two_slot_arch());
    EXPECT_GT(same.n_cycles, split.n_cycles);
    EXPECT_EQ(same.n_cycles, 12u);
}

TEST(Compile, ComputeOnlyVolume) {
    ArchConfig a = two_slot_arch();
    a.cnot_mode = CnotMode::Transversal;
    const Program p = parse_program_text("qubits 2\ncnot 0 1\n");
    const CompiledProgram cp = schedule(p, {0, 1}, a);
    const auto cnot = std::find_if(cp.timeline.begin(), cp.timeline.end(),
                                   [](const Event &e) { return e.kind == EventKind::Cnot; });
    ASSERT_NE(cnot, cp.timeline.end());
    EXPECT_EQ(cnot->length, 1u);
    // Two cycles of loads billed to LD/ST leave exactly one compute cycle.
    const double expect = 2.0 * 2 * 11 * 11 * a.surface_cycle_s();
    EXPECT_NEAR(cp.cost.breakdown.compute, expect, 1e-9);
}

TEST(Compile, BreakdownIsComplete) {
    for (const Program &p : {ghz_program(12), bv_program(9), adder_program(3), ising_program(6, 2)}) {
        const CompiledProgram cp = compile(p, default_arch());
        EXPECT_NEAR(cp.cost.breakdown.total(), cp.cost.spacetime_qubit_seconds,
                    1e-9 * cp.cost.spacetime_qubit_seconds);
        const CompiledProgram base = compile_baseline(p, default_arch());
        EXPECT_EQ(base.n_ldst, 0u);
        EXPECT_NEAR(base.cost.breakdown.total(), base.cost.spacetime_qubit_seconds,
                    1e-9 * base.cost.spacetime_qubit_seconds);
    }
}

// Ops touching a common qubit must not overlap and must keep program order.
void expect_dependencies_respected(const Program &p, const CompiledProgram &cp) {
    std::map<long, const Event *> by_op;
    for (const auto &e : cp.timeline) {
        if (e.op >= 0 && e.kind != EventKind::Stall) {
            by_op[e.op] = &e;
        }
    }
    std::vector<std::size_t> ready(p.n_qubits, 0);
    for (std::size_t i = 0; i < p.ops.size(); ++i) {
        const Op &op = p.ops[i];
        auto it = by_op.find(static_cast<long>(i));
        if (it == by_op.end()) {
            continue;  // zero-cycle Clifford
        }
        const Event &e = *it->second;
        EXPECT_GE(e.start, ready[op.a]) << "op " << i;
        std::size_t end = e.start + e.length;
        ready[op.a] = std::max(ready[op.a], end);
        if (op.kind == OpKind::CNOT) {
            EXPECT_GE(e.start, ready[op.b]) << "op " << i;
            ready[op.b] = std::max(ready[op.b], end);
        }
    }
}

TEST(Compile, DependenciesRespected) {
    for (const Program &p : {ghz_program(16), bv_program(10), adder_program(4), ising_program(8, 2)}) {
        expect_dependencies_respected(p, compile(p, default_arch()));
        expect_dependencies_respected(p, compile_baseline(p, default_arch()));
    }
}

TEST(Compile, OneTransferPerBlockAtATime) {
    const Program p = ising_program(10, 2);
    const ArchConfig a = default_arch();
    const CompiledProgram cp = compile(p, a);
    std::map<long, std::vector<std::pair<std::size_t, std::size_t>>> spans;
    for (const auto &e : cp.timeline) {
        if (e.kind == EventKind::Load || e.kind == EventKind::Store) {
            spans[e.block].push_back({e.start, e.start + e.length});
        }
    }
    for (auto &[block, v] : spans) {
        std::sort(v.begin(), v.end());
        for (std::size_t i = 1; i < v.size(); ++i) EXPECT_GE(v[i].first, v[i - 1].second) << block;
    }
}

TEST(Baseline, TradesSpaceForTime) {
    const Program p = ghz_program(40);
    const ArchConfig a = default_arch();
    const CompiledProgram h = compile(p, a);
    const CompiledProgram b = compile_baseline(p, a);
    EXPECT_LE(b.cost.time_seconds, h.cost.time_seconds);
    EXPECT_GE(b.cost.space_qubits, h.cost.space_qubits);
}

TEST(Sweep, SinglePointAndCsv) {
    const Program p = ghz_program(8);
    const auto rows = sweep(p, default_arch(), SweepAxis::LdstMultiplier, {1.0});
    ASSERT_EQ(rows.size(), 1u);
    EXPECT_NEAR(rows[0].cost.spacetime_qubit_seconds, compile(p, default_arch()).cost.spacetime_qubit_seconds,
                1e-9);
    std::ostringstream out;
    write_sweep_csv(out, SweepAxis::LdstMultiplier, rows);
    std::string header;
    std::getline(std::istringstream(out.str()) >> std::ws, header);
    EXPECT_NE(header.find("ldst_multiplier"), std::string::npos);
    EXPECT_THROW(parse_sweep_axis("wavelength"), std::invalid_argument);
}

TEST(Sweep, MoreSurfaceSlotsNeverSlower) {
    const Program p = ising_program(16, 2);
    const auto rows = sweep(p, default_arch(), SweepAxis::NSurface, {2, 4, 8});
    ASSERT_EQ(rows.size(), 3u);
    for (std::size_t i = 1; i < rows.size(); ++i) {
        EXPECT_LE(rows[i].cost.time_seconds, rows[i - 1].cost.time_seconds * (1 + 1e-12));
        EXPECT_GT(rows[i].cost.space_qubits, rows[i - 1].cost.space_qubits);
    }
}

TEST(Timeline, JsonShape) {
    const CompiledProgram cp = compile(ghz_program(4), default_arch());
    const auto doc = nlohmann::json::parse(timeline_to_json(cp));
    ASSERT_TRUE(doc.contains("events"));
    EXPECT_EQ(doc["events"].size(), cp.timeline.size());
    EXPECT_EQ(doc["cycles"].get<std::size_t>(), cp.n_cycles);
}

TEST(Fixtures, Shapes) {
    EXPECT_EQ(ghz_program(5).count(OpKind::CNOT), 4u);
    EXPECT_EQ(bv_program(5).count(OpKind::CNOT), 4u);
    EXPECT_GT(ising_program(4, 1, 10).count(OpKind::T), 0u);
    EXPECT_THROW(bv_program(1), std::invalid_argument);
}

}  // namespace
}  // namespace qmem
