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
#include "qmem/arch.hpp"

#include <cmath>
#include <random>

#include "gtest/gtest.h"

namespace qmem {
namespace {

TEST(Footprint, SurfacePatches) {
    // 48 patches of (22 sites x 5 um)^2.
    EXPECT_NEAR(48 * surface_patch_mm2(11, 5.0), 0.5808, 1e-12);
    ArchConfig cfg = default_arch();
    cfg.n_surface = 1;
    cfg.surface_d = 3;
    cfg.cnot_mode = CnotMode::Transversal;  // no routing row
    cfg.n_factories = 1;
    const Footprint fp = footprint(cfg, false);
    EXPECT_NEAR(fp.compute_mm2, 900e-6, 1e-15);
    EXPECT_EQ(fp.memory_mm2, 0.0);
    EXPECT_EQ(fp.ldst_mm2, 0.0);
}

TEST(Footprint, MemoryBlocks) {
    const ArchConfig cfg = default_arch();
    ASSERT_EQ(cfg.n_blocks, 4u);
    const Footprint fp = footprint(cfg);
    // 4 x (12*5 um) x (24*5 um) x 2.
    EXPECT_NEAR(fp.memory_mm2, 4 * 60.0 * 120.0 * 2 * 1e-6, 1e-12);
    EXPECT_LE(fp.memory_mm2, 0.06);
    EXPECT_GT(fp.memory_mm2, 0.055);
}

TEST(Footprint, QubitCounts) {
    ArchConfig cfg = default_arch();
    cfg.n_surface = 6;
    const Footprint ls = footprint(cfg, false);
    const std::size_t factory = cfg.factory.qubit_cost;
    EXPECT_EQ(ls.total_qubits, 12u * 242 + factory);
    cfg.cnot_mode = CnotMode::Transversal;
    const Footprint tv = footprint(cfg, false);
    EXPECT_EQ(tv.total_qubits, 6u * 242 + factory);
    const Footprint h = footprint(cfg, true);
    EXPECT_EQ(h.total_qubits, tv.total_qubits + 4 * (288 + 242));
}

TEST(Cycles, DistanceTimesRound) {
    const ArchConfig cfg = default_arch();
    EXPECT_NEAR(cfg.surface_cycle_s(), 11e-3, 1e-15);
    EXPECT_NEAR(cfg.ldst_cycle_s(), 27.5e-3, 1e-15);
    EXPECT_NEAR(cfg.memory_cycle_s(), 12 * 2.458e-3, 1e-15);
}

TEST(GateCosts, Modes) {
    const GateCostTable ls = GateCostTable::for_mode(CnotMode::LatticeSurgery);
    EXPECT_EQ(ls.clifford1, 0u);
    EXPECT_EQ(ls.cnot, 2u);
    EXPECT_EQ(ls.t, 2u);
    EXPECT_EQ(ls.load, 2u);
    EXPECT_EQ(ls.store, 1u);
    EXPECT_EQ(GateCostTable::for_mode(CnotMode::Transversal).cnot, 1u);
}

TEST(Fidelity, Examples) {
    EXPECT_EQ(program_fidelity(FidelityModel{}), 1.0);
    FidelityModel mem;
    mem.eps_mem = 1e-9;
    mem.n_blocks = 4;
    mem.n_cycles = 1e6;
    EXPECT_NEAR(program_fidelity(mem), 0.99601, 1e-5);
    FidelityModel t;
    t.eps_t = 1e-5;
    t.n_t = 1000;
    EXPECT_NEAR(program_fidelity(t), 0.99005, 1e-5);
}

TEST(Fidelity, MatchesDirectProduct) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> eps(0, 1e-3);
    std::uniform_int_distribution<int> cnt(0, 200);
    for (int trial = 0; trial < 200; ++trial) {
        FidelityModel fm{eps(rng), eps(rng), eps(rng), eps(rng), eps(rng),
                         double(cnt(rng)), double(cnt(rng)), double(cnt(rng)), double(cnt(rng)),
                         double(cnt(rng)), double(cnt(rng))};
        double direct = 1;
        auto mul = [&](double e, double n) {
            for (int i = 0; i < static_cast<int>(n); ++i) direct *= 1 - e;
        };
        mul(fm.eps_mem, fm.n_blocks * fm.n_cycles);
        mul(fm.eps_ldst, fm.n_blocks * fm.n_ldst);
        mul(fm.eps_surface, fm.n_surface * fm.n_cycles);
        mul(fm.eps_rz, fm.n_rz);
        mul(fm.eps_t, fm.n_t);
        EXPECT_NEAR(program_fidelity(fm), direct, 1e-12);
    }
}

TEST(Fidelity, Monotone) {
    FidelityModel base{1e-4, 1e-4, 1e-4, 1e-4, 1e-4, 2, 3, 4, 5, 6, 7};
    const double f0 = program_fidelity(base);
    for (int field = 0; field < 11; ++field) {
        FidelityModel fm = base;
        double *p = &fm.eps_mem + field;
        *p *= 2;
        EXPECT_LE(program_fidelity(fm), f0) << field;
    }
}

TEST(Fidelity, RejectsBadInput) {
    FidelityModel fm;
    fm.eps_mem = 1.5;
    EXPECT_THROW(program_fidelity(fm), std::invalid_argument);
    fm.eps_mem = 0;
    fm.n_t = -1;
    EXPECT_THROW(program_fidelity(fm), std::invalid_argument);
}

FactorySpec every(std::size_t cycles) { return {"f", 100, cycles, 1e-8}; }

TEST(TSupply, ZeroDemand) {
    const SupplyResult r = t_supply(every(3), std::vector<std::size_t>(50, 0));
    EXPECT_EQ(r.total_stall, 0u);
    EXPECT_TRUE(r.start_cycle.empty());
}

TEST(TSupply, DemandOutpacesProduction) {
    // One T per cycle, one state every second cycle: states appear at the
    // ends of cycles 1, 3, 5, ... so request i starts at 2(i+1).
    const SupplyResult r = t_supply(every(2), std::vector<std::size_t>(10, 1));
    ASSERT_EQ(r.start_cycle.size(), 10u);
    std::size_t total = 0;
    for (std::size_t i = 0; i < 10; ++i) {
        EXPECT_EQ(r.start_cycle[i], 2 * (i + 1));
        total += 2 * (i + 1) - i;
        if (i > 0) {
            const std::size_t stall = r.start_cycle[i] - i;
            const std::size_t prev = r.start_cycle[i - 1] - (i - 1);
            EXPECT_EQ(stall - prev, 1u);
        }
    }
    EXPECT_EQ(r.total_stall, total);
}

TEST(TSupply, BurstBelowStock) {
    std::vector<std::size_t> demand(20, 0);
    demand[10] = 3;
    const SupplyResult r = t_supply(every(2), demand, 0);
    EXPECT_EQ(r.total_stall, 0u);
    const SupplyResult pre = t_supply(every(5), {4}, 4);
    EXPECT_EQ(pre.total_stall, 0u);
}

TEST(LdstGroups, DefaultPattern) {
    ArchConfig cfg = default_arch();
    cfg.n_blocks = 2;
    cfg.n_surface = 4;
    auto g = ldst_groups(cfg);
    ASSERT_EQ(g.size(), 2u);
    EXPECT_EQ(g[0], (std::vector<std::size_t>{0, 1}));
    EXPECT_EQ(g[1], (std::vector<std::size_t>{2, 3}));
    cfg.n_blocks = 4;
    cfg.n_surface = 3;
    for (const auto &grp : ldst_groups(cfg)) {
        EXPECT_GE(grp.size(), 1u);
        for (auto s : grp) EXPECT_LT(s, 3u);
    }
    cfg.ldst_assignment = {{0}};
    EXPECT_THROW(ldst_groups(cfg), std::invalid_argument);
}

TEST(ArchConfigFile, ParsesSections) {
    const auto doc = KvDocument::parse(
        "[memory]\ncode = [288,12,18]\nblocks = 2\n"
        "[compute]\nsurface_codes = 8\nd = 13\ncnot = transversal\n"
        "[ldst]\nmultiplier = 2\n"
        "[timing]\nspacing_um = 4\n");
    const ArchConfig cfg = parse_arch_config(doc);
    EXPECT_EQ(cfg.memory_n, 288u);
    EXPECT_EQ(cfg.memory_d, 18u);
    EXPECT_EQ(cfg.n_blocks, 2u);
    EXPECT_EQ(cfg.n_surface, 8u);
    EXPECT_EQ(cfg.surface_d, 13);
    EXPECT_EQ(cfg.ldst_d, 13);
    EXPECT_EQ(cfg.cnot_mode, CnotMode::Transversal);
    EXPECT_EQ(cfg.ldst_multiplier, 2.0);
    EXPECT_EQ(cfg.spacing_um, 4.0);
}

TEST(ArchConfigFile, ErrorsCarryLocation) {
    try {
        parse_arch_config(KvDocument::parse("[compute]\ncnot = teleport\n"));
        FAIL();
    } catch (const ParseError &e) {
        EXPECT_EQ(e.line(), 2u);
    }
    try {
        parse_arch_config(KvDocument::parse("[memory]\n\ncode = [5,1,3]\n"));
        FAIL();
    } catch (const ParseError &e) {
        EXPECT_EQ(e.line(), 3u);
    }
    EXPECT_THROW(parse_arch_config(KvDocument::parse("[memory]\nblocks = 0\n")), std::invalid_argument);
}

ResourceDemand small_program() {
    ResourceDemand d;
    d.n_qubits = 24;
    d.n_cycles = 1e5;
    d.n_ldst = 200;
    d.n_t = 100;
    d.n_surface = 4;
    return d;
}

TEST(SelectResources, TrivialTarget) {
    const auto mems = default_memory_calibration();
    const auto facs = default_factory_catalog();
    const ResourceChoice c = select_resources(small_program(), 0.0, 1e-3, mems, facs);
    EXPECT_TRUE(c.feasible);
    EXPECT_EQ(c.surface_d, 3);
    EXPECT_EQ(c.factory.name, "15to1-small");
    EXPECT_EQ(c.n_blocks, 2u);
}

TEST(SelectResources, PicksConservativeMemoryEntry) {
    std::vector<MemoryCalibration> mems = default_memory_calibration();
    mems.push_back({"[144,12,12]", 144, 12, 12, 1e-3, 1e-6});
    ResourceDemand d = small_program();
    d.n_t = 0;
    d.n_surface = 0;
    d.n_ldst = 0;
    d.n_cycles = 1e6;
    // 2 blocks for 1e6 cycles: 1e-6 per cycle cannot reach 0.99.
    const ResourceChoice c = select_resources(d, 0.99, 1e-3, mems, default_factory_catalog());
    EXPECT_TRUE(c.feasible);
    EXPECT_EQ(c.memory.n, 288u);
}

TEST(SelectResources, TighterTargetNeverLowersDistance) {
    const auto mems = default_memory_calibration();
    const auto facs = default_factory_catalog();
    int prev = 0;
    for (double target : {0.0, 0.5, 0.9, 0.99, 0.995, 0.999}) {
        const ResourceChoice c = select_resources(small_program(), target, 1e-3, mems, facs);
        EXPECT_GE(c.surface_d, prev) << target;
        prev = c.surface_d;
    }
}

TEST(SelectResources, InfeasibleReportsBest) {
    const ResourceChoice c =
        select_resources(small_program(), 1.0, 1e-3, default_memory_calibration(), default_factory_catalog(), 9);
    EXPECT_FALSE(c.feasible);
    EXPECT_GT(c.fidelity, 0.0);
    EXPECT_LT(c.fidelity, 1.0);
}

}  // namespace
}  // namespace qmem
