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
#include <vector>

#include "qmem/gf2.hpp"
#include "qmem/noise_circuit.hpp"

namespace qmem {

/// Detector and observable outcomes, one row per shot.
struct FrameSample {
    BitMatrix detectors;
    BitMatrix observables;
};

/// Forward Pauli-frame simulation of `circ`, 64 shots per machine word.
/// Each error channel picks at most one of its Pauli components per shot.
/// Independent of the detector-model path and used to cross-check it.
FrameSample simulate_frames(const NoisyCircuit &circ, const std::vector<DetectorInfo> &detectors,
                            const std::vector<std::vector<std::uint32_t>> &observables, std::size_t shots,
                            std::uint64_t seed);

}  // namespace qmem
