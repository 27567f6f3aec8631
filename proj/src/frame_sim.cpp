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
#include "qmem/frame_sim.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "qmem/rng.hpp"

namespace qmem {

namespace {

// Rows of shot-packed words.
class ShotRows {
  public:
    ShotRows(std::size_t rows, std::size_t words) : words_(words), data_(rows * words, 0) {}
    std::uint64_t *row(std::size_t r) { return data_.data() + r * words_; }
    std::size_t words() const { return words_; }

  private:
    std::size_t words_;
    std::vector<std::uint64_t> data_;
};

// Pauli index 1..3 (X, Y, Z) applied to shot s of qubit q.
void apply_pauli(ShotRows &xs, ShotRows &zs, std::uint32_t q, int pauli, std::size_t shot) {
    const std::uint64_t bit = std::uint64_t{1} << (shot % 64);
    if (pauli == 1 || pauli == 2) {
        xs.row(q)[shot / 64] ^= bit;
    }
    if (pauli == 2 || pauli == 3) {
        zs.row(q)[shot / 64] ^= bit;
    }
}

// Visits the shots where a channel with total probability `total` fires and
// picks a component from the cumulative table.
template <typename F>
void for_each_fire(Rng &rng, std::size_t shots, const double *p, int count, F &&fire) {
    double total = 0;
    for (int i = 0; i < count; ++i) {
        total += p[i];
    }
    if (total <= 0) {
        return;
    }
    if (total > 1 + 1e-12) {
        throw std::invalid_argument("simulate_frames: channel probabilities sum above 1");
    }
    const double log_q = total >= 1 ? -INFINITY : std::log1p(-total);
    std::size_t s = 0;
    while (true) {
        const std::uint64_t skip = total >= 1 ? 0 : rng.geometric_skip(log_q);
        if (skip >= shots - s) {
            return;
        }
        s += skip;
        double u = rng.uniform() * total;
        int k = 0;
        while (k + 1 < count && u >= p[k]) {
            u -= p[k];
            ++k;
        }
        fire(s, k);
        if (++s >= shots) {
            return;
        }
    }
}

}  // namespace

FrameSample simulate_frames(const NoisyCircuit &circ, const std::vector<DetectorInfo> &detectors,
                            const std::vector<std::vector<std::uint32_t>> &observables, std::size_t shots,
                            std::uint64_t seed) {
    const std::size_t words = words_for(shots);
    ShotRows xs(circ.num_qubits, words);
    ShotRows zs(circ.num_qubits, words);
    ShotRows record(circ.num_measurements(), words);
    Rng rng(seed);
    std::size_t m = 0;
    for (const auto &ins : circ.instructions) {
        switch (ins.gate) {
            case Gate::R:
                std::fill_n(xs.row(ins.q0), words, 0);
                std::fill_n(zs.row(ins.q0), words, 0);
                break;
            case Gate::H:
                std::swap_ranges(xs.row(ins.q0), xs.row(ins.q0) + words, zs.row(ins.q0));
                break;
            case Gate::CZ: {
                std::uint64_t *xa = xs.row(ins.q0);
                std::uint64_t *xb = xs.row(ins.q1);
                std::uint64_t *za = zs.row(ins.q0);
                std::uint64_t *zb = zs.row(ins.q1);
                for (std::size_t w = 0; w < words; ++w) {
                    za[w] ^= xb[w];
                    zb[w] ^= xa[w];
                }
                break;
            }
            case Gate::CX: {
                std::uint64_t *xc = xs.row(ins.q0);
                std::uint64_t *xt = xs.row(ins.q1);
                std::uint64_t *zc = zs.row(ins.q0);
                std::uint64_t *zt = zs.row(ins.q1);
                for (std::size_t w = 0; w < words; ++w) {
                    xt[w] ^= xc[w];
                    zc[w] ^= zt[w];
                }
                break;
            }
            case Gate::M:
                std::copy_n(xs.row(ins.q0), words, record.row(m));
                ++m;
                break;
            case Gate::Err1:
                for_each_fire(rng, shots, circ.probs.data() + ins.prob_offset, 3,
                              [&](std::size_t s, int k) { apply_pauli(xs, zs, ins.q0, k + 1, s); });
                break;
            case Gate::Err2:
                for_each_fire(rng, shots, circ.probs.data() + ins.prob_offset, 15, [&](std::size_t s, int k) {
                    const int idx = k + 1;
                    if (idx / 4 != 0) {
                        apply_pauli(xs, zs, ins.q0, idx / 4, s);
                    }
                    if (idx % 4 != 0) {
                        apply_pauli(xs, zs, ins.q1, idx % 4, s);
                    }
                });
                break;
        }
    }

    auto collect = [&](const std::vector<std::uint32_t> &ms, BitMatrix &by_row, std::size_t r) {
        auto out = by_row.row(r);
        for (auto mi : ms) {
            const std::uint64_t *src = record.row(mi);
            for (std::size_t w = 0; w < words; ++w) {
                out[w] ^= src[w];
            }
        }
    };
    BitMatrix det_rows(detectors.size(), shots);
    for (std::size_t d = 0; d < detectors.size(); ++d) {
        collect(detectors[d].measurements, det_rows, d);
    }
    BitMatrix obs_rows(observables.size(), shots);
    for (std::size_t j = 0; j < observables.size(); ++j) {
        collect(observables[j], obs_rows, j);
    }
    return {det_rows.transpose(), obs_rows.transpose()};
}

}  // namespace qmem
