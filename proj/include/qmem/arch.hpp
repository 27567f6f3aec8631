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
#include <vector>

#include "qmem/gb_code.hpp"
#include "qmem/kv_config.hpp"

namespace qmem {

enum class CnotMode { LatticeSurgery, Transversal };

const char *to_string(CnotMode m);

struct FactorySpec {
    std::string name;
    std::size_t qubit_cost = 0;
    std::size_t cycles_per_state = 1;  // surface-code logical cycles per output state
    double output_error = 0;

    void validate() const;
};

/// Placeholder distillation catalog. Parameters are configuration inputs
/// taken from external literature, not results of this package.
std::vector<FactorySpec> default_factory_catalog();

/// Logical cycles per operation and the code whose cycle time bills them.
struct GateCostTable {
    std::size_t clifford1 = 0;  // surface
    std::size_t cnot = 2;       // surface
    std::size_t t = 2;          // surface
    std::size_t load = 2;       // LD/ST ancilla
    std::size_t store = 1;      // LD/ST ancilla

    static GateCostTable for_mode(CnotMode mode);
};

struct CycleTimes {
    double surface_round_ms = 1.0;
    double ldst_round_ms = 2.5;
    double memory_round_ms = 2.458;  // from the movement scheduler
};

struct ArchConfig {
    PolySpec memory_code;
    std::size_t memory_d = 12;
    std::size_t memory_k = 12;  // logical qubits per block
    std::size_t memory_n = 144;
    std::size_t n_blocks = 4;
    std::size_t n_surface = 4;
    int surface_d = 11;
    int ldst_d = 11;
    /// Surface slots reachable from the LD/ST ancilla of block i. Empty means
    /// the default pattern (see ldst_groups).
    std::vector<std::vector<std::size_t>> ldst_assignment;
    CnotMode cnot_mode = CnotMode::LatticeSurgery;
    FactorySpec factory;
    std::size_t n_factories = 1;
    CycleTimes cycle;
    double ldst_multiplier = 1.0;  // scales the LD/ST round time
    double spacing_um = 5.0;
    double buffer_factor = 2.0;
    /// Per-cycle logical error rates used by the fidelity model.
    double eps_mem = 1e-9;
    double eps_ldst = 1e-9;
    double eps_surface = 1e-9;

    GateCostTable costs() const { return GateCostTable::for_mode(cnot_mode); }
    double surface_cycle_s() const { return surface_d * cycle.surface_round_ms * 1e-3; }
    double ldst_cycle_s() const { return ldst_d * cycle.ldst_round_ms * ldst_multiplier * 1e-3; }
    double memory_cycle_s() const { return static_cast<double>(memory_d) * cycle.memory_round_ms * 1e-3; }
    std::size_t surface_qubits() const { return 2 * static_cast<std::size_t>(surface_d) * surface_d; }
    std::size_t ldst_qubits() const { return 2 * static_cast<std::size_t>(ldst_d) * ldst_d; }
    std::size_t memory_block_qubits() const { return 2 * memory_n; }
    std::size_t routing_patches() const { return cnot_mode == CnotMode::LatticeSurgery ? n_surface : 0; }

    void validate(bool hierarchical = true) const;
};

/// Default: [144,12,12] memory, 4 blocks, 4 surface slots at d=11, the first
/// catalog factory.
ArchConfig default_arch();

/// Surface slots served by each block's LD/ST ancilla. The default gives
/// every ancilla a window of max(2, ceil(S/B)) adjacent slots starting at
/// floor(i*S/B), shifted left at the right edge; with S = 2B it reproduces
/// disjoint pairs.
std::vector<std::vector<std::size_t>> ldst_groups(const ArchConfig &cfg);

/// Reads [memory], [compute], [ldst], [factory] and [timing] sections over
/// the defaults. The memory section accepts a catalog label (code = [n,k,d])
/// or l, m, a, b keys.
ArchConfig parse_arch_config(const KvDocument &doc);
ArchConfig load_arch_config(const std::string &path);

struct Footprint {
    double memory_mm2 = 0;
    double compute_mm2 = 0;
    double ldst_mm2 = 0;
    double factory_mm2 = 0;
    std::size_t total_qubits = 0;

    double total_mm2() const { return memory_mm2 + compute_mm2 + ldst_mm2 + factory_mm2; }
};

/// Area per surface patch (2d)^2 sites, per memory block 2m x 2l sites times
/// buffer_factor, per LD/ST ancilla as a patch of its distance, per factory
/// two sites per qubit. `hierarchical` = false gives the surface-only
/// layout with `n_surface` data patches.
Footprint footprint(const ArchConfig &cfg, bool hierarchical = true);

double surface_patch_mm2(int d, double spacing_um);
double memory_block_mm2(const PolySpec &code, double spacing_um, double buffer_factor);

struct FidelityModel {
    double eps_mem = 0;
    double eps_ldst = 0;
    double eps_surface = 0;
    double eps_rz = 0;
    double eps_t = 0;
    double n_blocks = 0;
    double n_ldst = 0;
    double n_surface = 0;
    double n_cycles = 0;
    double n_rz = 0;
    double n_t = 0;
};

double program_fidelity(const FidelityModel &fm);

/// Per-cycle logical error rate of a memory code at a physical rate.
struct MemoryCalibration {
    std::string label;  // catalog label or [n,k,d]
    std::size_t n = 0;
    std::size_t k = 0;
    std::size_t d = 0;
    double p = 1e-3;
    double eps_per_cycle = 0;
};

/// Fixed conservative entry for the [288,12,18] code at p = 1e-3 (1e-9 per
/// cycle). Measured entries are appended by the caller.
std::vector<MemoryCalibration> default_memory_calibration();

/// Standard surface-code scaling 0.1 (p / 0.01)^((d+1)/2) per logical cycle.
double surface_eps_per_cycle(int d, double p);

/// Counts a program contributes to the fidelity product.
struct ResourceDemand {
    std::size_t n_qubits = 0;
    double n_cycles = 0;
    double n_ldst = 0;
    double n_rz = 0;
    double eps_rz = 0;
    double n_t = 0;
    std::size_t n_surface = 0;
};

struct ResourceChoice {
    bool feasible = false;
    int surface_d = 3;
    MemoryCalibration memory;
    std::size_t n_blocks = 0;
    FactorySpec factory;
    double fidelity = 0;
};

/// Smallest surface distance, then smallest memory distance, then the
/// cheapest factory whose program fidelity reaches `target`. Infeasible
/// targets return the best achievable choice with feasible = false.
ResourceChoice select_resources(const ResourceDemand &demand, double target, double p,
                                const std::vector<MemoryCalibration> &memories,
                                const std::vector<FactorySpec> &factories, int max_surface_d = 51);

struct SupplyResult {
    std::vector<std::size_t> start_cycle;  // per T, in demand order
    std::size_t total_stall = 0;           // sum over T of start - demand cycle
};

/// One factory filling an unbounded queue with a state at the end of every
/// `cycles_per_state`-th cycle. `demand[c]` T gates request a state at
/// cycle c and start as soon as one is queued, first come first served.
SupplyResult t_supply(const FactorySpec &factory, const std::vector<std::size_t> &demand,
                      std::size_t initial_stock = 0);

}  // namespace qmem
