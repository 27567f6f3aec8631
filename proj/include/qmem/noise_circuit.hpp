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

#include <array>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "qmem/gb_code.hpp"
#include "qmem/layout.hpp"
#include "qmem/schedule.hpp"

namespace qmem {

enum class MemoryBasis { Z, X };

struct NoiseParams {
    double p = 1e-3;
    double t_coherence_s = 10.0;
    MemoryBasis basis = MemoryBasis::Z;
    bool idle_errors = true;
};

/// Pauli-twirled idle channel probabilities.
struct PauliProbs {
    double px = 0;
    double py = 0;
    double pz = 0;
};

/// Twirl of amplitude + phase damping: p_X = p_Y = (1 - e^{-t/T1}) / 4,
/// p_Z = (1 - e^{-t/T2}) / 2 - (1 - e^{-t/T1}) / 4.
PauliProbs idle_channel(double duration_us, double t1_s, double t2_s);
/// Single coherence time, T1 = T2.
inline PauliProbs idle_channel(double duration_us, double t_coherence_s) {
    return idle_channel(duration_us, t_coherence_s, t_coherence_s);
}

enum class Gate : std::uint8_t { R, H, CZ, CX, M, Err1, Err2 };

/// One circuit instruction. Error channels reference `NoisyCircuit::probs`:
/// Err1 holds (pX, pY, pZ); Err2 holds 15 probabilities for the Paulis
/// P1 (x) P2 in order IX, IY, IZ, XI, XX, ..., ZZ (index 4*a + b - 1 with
/// I=0, X=1, Y=2, Z=3).
struct Instruction {
    Gate gate = Gate::H;
    std::uint32_t q0 = 0;
    std::uint32_t q1 = 0;
    std::uint32_t prob_offset = 0;
};

enum class MeasureKind : std::uint8_t { CheckX, CheckZ, Data };

struct MeasureInfo {
    MeasureKind kind = MeasureKind::Data;
    std::uint32_t index = 0;  // check index within its type, or data column
    std::uint32_t round = 0;
};

struct NoisyCircuit {
    std::size_t num_qubits = 0;
    std::vector<Instruction> instructions;
    std::vector<double> probs;
    std::vector<MeasureInfo> measurements;  // in measurement order
    std::size_t rounds = 0;
    MemoryBasis basis = MemoryBasis::Z;

    std::size_t num_measurements() const { return measurements.size(); }
    void add_gate(Gate g, std::uint32_t a, std::uint32_t b = 0) { instructions.push_back({g, a, b, 0}); }
    void add_err1(std::uint32_t q, PauliProbs p);
    void add_err2(std::uint32_t a, std::uint32_t b, const std::array<double, 15> &p);
    void add_measure(std::uint32_t q, MeasureInfo info);
};

/// Parity-check gates of one layer: (check index, data column) pairs that
/// fire together after `idle_before_us` of movement.
struct CheckLayer {
    double idle_before_us = 0;
    std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;
};

struct CheckHalf {
    CheckType type = CheckType::X;
    std::vector<CheckLayer> layers;
    double idle_after_us = 0;
};

/// Abstract check-measurement round independent of how the gates are
/// physically brought together.
struct CheckRoundPlan {
    std::size_t n_data = 0;
    std::size_t n_xchecks = 0;
    std::size_t n_zchecks = 0;
    std::vector<CheckHalf> halves;
};

/// Converts a movement schedule to a round plan; Move and Transfer durations
/// become idle time before the next pulse.
CheckRoundPlan plan_from_schedule(const MovementSchedule &sched, const LayoutMap &layout);

/// Movement-free plan: each half's check/data incidences are packed into
/// layers greedily (lowest free layer per edge), X half then Z half.
CheckRoundPlan plan_from_code(const CssCode &code);

/// Memory experiment: data reset, `rounds` rounds of the planned check
/// circuit with idle noise, then transversal data readout.
NoisyCircuit build_memory_circuit(const CssCode &code, const CheckRoundPlan &plan, const NoiseParams &noise,
                                  std::size_t rounds);

/// One elementary fault mechanism of a detector model.
struct Mechanism {
    double p = 0;
    std::vector<std::uint32_t> detectors;
    std::vector<std::uint32_t> observables;
};

struct DetectorInfo {
    CheckType type = CheckType::Z;  // which check family produced it
    std::uint32_t check = 0;
    std::uint32_t round = 0;        // rounds index; `rounds` for the final data comparison
    std::vector<std::uint32_t> measurements;
};

/// Decoding view restricted to one check family's detectors.
struct Subproblem {
    CheckType type = CheckType::Z;
    std::vector<std::uint32_t> detector_ids;  // local index -> global detector id
    std::size_t num_observables = 0;
    std::vector<Mechanism> mechanisms;        // local detector indices
};

struct DetectorModel {
    std::size_t num_detectors = 0;
    std::size_t num_observables = 0;
    std::vector<Mechanism> mechanisms;  // deduplicated over full signatures
    std::vector<DetectorInfo> detectors;
    std::vector<std::vector<std::uint32_t>> observables;  // measurement sets
    /// [0] = X-check detectors (flipped by Z-type errors),
    /// [1] = Z-check detectors (flipped by X-type errors).
    std::array<Subproblem, 2> split;
};

/// Detector and observable definitions for a memory circuit.
void define_detectors(const NoisyCircuit &circ, const CssCode &code, std::vector<DetectorInfo> &detectors,
                      std::vector<std::vector<std::uint32_t>> &observables);

/// Propagates every elementary Pauli fault to the detectors and observables
/// it flips (backwards sensitivity sweep) and merges equal signatures with
/// p1 + p2 - 2 p1 p2.
DetectorModel build_detector_model(const NoisyCircuit &circ, const CssCode &code);

/// Full pipeline for a generalized-bicycle memory experiment: code, layout,
/// verified movement schedule, circuit and detector model. Throws
/// std::logic_error if the schedule fails verification.
struct MemoryExperiment {
    CssCode code;
    MovementSchedule schedule;
    NoisyCircuit circuit;
    DetectorModel model;
};

MemoryExperiment build_memory_experiment(const PolySpec &spec, const NoiseParams &noise, std::size_t rounds,
                                         LayoutVariant variant = LayoutVariant::CollisionFree);

/// Line-based export: `R q`, `H q`, `CZ a b`, `CX a b`, `M q`,
/// `ERR1 q pX pY pZ`, `ERR2 a b p1 .. p15`, followed by `DETECTOR m...` and
/// `OBSERVABLE j m...` lines referencing measurement indices.
void write_circuit_text(std::ostream &out, const NoisyCircuit &circ, const std::vector<DetectorInfo> &detectors,
                        const std::vector<std::vector<std::uint32_t>> &observables);

/// Reads the instruction lines written by write_circuit_text (detector lines
/// are skipped). Measurement metadata is not recoverable and is left as Data.
NoisyCircuit read_circuit_text(std::istream &in);

}  // namespace qmem
