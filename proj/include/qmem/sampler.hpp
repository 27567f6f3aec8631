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
#include <memory>
#include <string>

#include "qmem/bposd.hpp"
#include "qmem/gf2.hpp"
#include "qmem/noise_circuit.hpp"

namespace qmem {

struct ShotBatch {
    BitMatrix syndromes;         // shots x detectors
    BitMatrix observable_flips;  // shots x observables
    std::uint64_t seed = 0;
};

/// Fires every mechanism independently in every shot and XORs signatures.
/// Deterministic in (model, shots, seed).
ShotBatch sample(const DetectorModel &model, std::size_t shots, std::uint64_t seed);

/// 1 - (1 - N_e/N_s)^(1/d).
double per_round_ler(std::uint64_t errors, std::uint64_t shots, std::size_t rounds);

struct Interval {
    double lo = 0;
    double hi = 0;
};

/// Wilson score interval for a binomial proportion.
Interval wilson_interval(std::uint64_t errors, std::uint64_t shots, double z = 1.959963984540054);

struct StopCondition {
    std::uint64_t min_errors = 1000;
    std::uint64_t max_shots = 1000000000;
    std::size_t batch_shots = 1024;
    unsigned threads = 1;
};

struct LerResult {
    std::uint64_t shots = 0;
    std::uint64_t errors = 0;
    std::size_t rounds = 1;
    double p_L_per_round = 0;
    Interval per_round_95;  // Wilson interval mapped through per_round_ler
    std::uint64_t seed = 0;
};

/// Predictor that always reports no observable flip.
class NullPredictor : public ObservablePredictor {
  public:
    explicit NullPredictor(std::size_t k) : k_(k) {}
    std::vector<std::uint8_t> predict(std::span<const std::uint64_t>) override { return std::vector<std::uint8_t>(k_, 0); }
    std::unique_ptr<ObservablePredictor> clone() const override { return std::make_unique<NullPredictor>(k_); }

  private:
    std::size_t k_;
};

/// Samples and decodes batches until `min_errors` failures or `max_shots`
/// shots. Batch b uses stream b of `seed`, and batches are tallied in
/// index order, so the result does not depend on the thread count.
LerResult adaptive_run(const DetectorModel &model, ObservablePredictor &decoder, const StopCondition &stop,
                       std::uint64_t seed, std::size_t rounds);

/// Appends (code, p, t_coherence, d, N_s, N_e, p_L, seed); writes the header
/// when the file is new.
void append_ler_csv(const std::string &path, const std::string &code, double p, double t_coherence_s,
                    const LerResult &r);

}  // namespace qmem
