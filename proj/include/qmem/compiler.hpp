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
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "qmem/arch.hpp"

namespace qmem {

enum class OpKind : std::uint8_t { X, Y, Z, H, S, CNOT, T };

const char *to_string(OpKind k);

struct Op {
    OpKind kind = OpKind::H;
    std::uint32_t a = 0;
    std::uint32_t b = 0;  // CNOT target
};

struct Program {
    std::size_t n_qubits = 0;
    std::vector<Op> ops;
    double n_rz = 0;
    double eps_rz = 0;

    void validate() const;
    std::size_t count(OpKind k) const;
};

/// `qubits N` header, one op per line (`cnot a b`, `t a`, `h a`, `s a`,
/// `x a`, `y a`, `z a`), optional `meta n_rz V` / `meta eps_rz V`, `#`
/// comments.
Program parse_program(std::istream &in);
Program parse_program_text(const std::string &text);
void write_program(std::ostream &out, const Program &prog);

struct ProgramProfile {
    double serialization = 0;  // mean inactive/active qubits over ASAP layers
    double t_consumption = 0;  // T count / Clifford count
    std::size_t depth = 0;
};

ProgramProfile profile(const Program &prog);

/// Block per qubit.
using Assignment = std::vector<std::size_t>;

/// Chaitin-style colouring of the CNOT interference graph: simplify by
/// lowest weighted degree, then select the block with the least same-block
/// CNOT weight among blocks with free capacity. Ties go to the lowest index.
Assignment map_qubits(const Program &prog, std::size_t n_blocks, std::size_t capacity);

/// Total CNOT count between qubits sharing a block.
std::size_t monochromatic_weight(const Program &prog, const Assignment &assignment);

enum class EventKind : std::uint8_t { Load, Store, Cnot, TInject, Clifford, Stall };
enum class StallCause : std::uint8_t { None, LoadStore, Routing, Factory, Serial };

const char *to_string(EventKind k);
const char *to_string(StallCause c);

struct Event {
    EventKind kind = EventKind::Stall;
    std::size_t start = 0;   // surface logical cycles
    std::size_t length = 0;  // cycles occupied
    long op = -1;            // program op index, -1 for LD/ST
    std::uint32_t qubit = 0;
    long slot = -1;          // surface slot
    long block = -1;
    StallCause cause = StallCause::None;
};

struct CostBreakdown {
    double memory = 0;
    double ldst = 0;
    double compute = 0;
    double factory = 0;

    double total() const { return memory + ldst + compute + factory; }
};

struct CostReport {
    std::size_t space_qubits = 0;
    double time_seconds = 0;
    double spacetime_qubit_seconds = 0;
    CostBreakdown breakdown;  // qubit-seconds
};

struct CompiledProgram {
    bool hierarchical = true;
    std::vector<Event> timeline;
    std::size_t n_cycles = 0;
    std::size_t n_ldst = 0;
    /// Per cycle: some LD/ST in flight and no compute op running or starting.
    std::vector<std::uint8_t> waiting_on_ldst;
    CostReport cost;
};

/// Hierarchical compilation with greedy loads, one prefetch round per cycle,
/// 1D routing corridor and factory stalls. Throws std::runtime_error with the
/// blocked ops if no progress is possible.
CompiledProgram schedule(const Program &prog, const Assignment &assignment, const ArchConfig &arch);

/// map_qubits + schedule.
CompiledProgram compile(const Program &prog, const ArchConfig &arch);

/// Surface-only baseline: every qubit resident in its own patch.
CompiledProgram compile_baseline(const Program &prog, const ArchConfig &arch);

/// Spacetime volume with idle-compute cycles billed to LD/ST when all
/// compute is waiting on loads or stores.
CostReport cost_report(const CompiledProgram &cp, const ArchConfig &arch, std::size_t n_qubits);

enum class SweepAxis { LdstMultiplier, TargetFidelity, NBlocks, NSurface, CnotMode };

SweepAxis parse_sweep_axis(const std::string &name);
const char *to_string(SweepAxis a);

struct SweepRow {
    double value = 0;
    CostReport cost;
    std::size_t n_cycles = 0;
};

/// Recompiles per value. CnotMode uses 0 = lattice surgery, 1 = transversal;
/// TargetFidelity picks the surface distance with select_resources.
std::vector<SweepRow> sweep(const Program &prog, const ArchConfig &arch, SweepAxis axis,
                            const std::vector<double> &values, bool baseline = false);

void write_sweep_csv(std::ostream &out, SweepAxis axis, const std::vector<SweepRow> &rows);
std::string timeline_to_json(const CompiledProgram &cp);

/// Synthetic fixtures.
Program ghz_program(std::size_t n);
Program bv_program(std::size_t n);
Program adder_program(std::size_t bits);
/// Trotterised transverse-field Ising chain; each rotation is replaced by a
/// Clifford+T sequence with `t_per_rz` T gates.
Program ising_program(std::size_t n, std::size_t steps, std::size_t t_per_rz = 10);

}  // namespace qmem
