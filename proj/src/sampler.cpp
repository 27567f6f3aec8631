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

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <stdexcept>
#include <thread>

#include "qmem/rng.hpp"

namespace qmem {

ShotBatch sample(const DetectorModel &model, std::size_t shots, std::uint64_t seed) {
    if (shots < 1) {
        throw std::invalid_argument("sample: shots must be >= 1");
    }
    ShotBatch batch{BitMatrix(shots, model.num_detectors), BitMatrix(shots, model.num_observables), seed};
    Rng rng(seed);
    for (const auto &mech : model.mechanisms) {
        if (mech.p <= 0) {
            continue;
        }
        const double log_q = mech.p >= 1 ? -INFINITY : std::log1p(-mech.p);
        std::size_t s = 0;
        while (true) {
            const std::uint64_t skip = mech.p >= 1 ? 0 : rng.geometric_skip(log_q);
            if (skip >= shots - s) {
                break;
            }
            s += skip;
            for (auto d : mech.detectors) {
                batch.syndromes.flip(s, d);
            }
            for (auto o : mech.observables) {
                batch.observable_flips.flip(s, o);
            }
            if (++s >= shots) {
                break;
            }
        }
    }
    return batch;
}

double per_round_ler(std::uint64_t errors, std::uint64_t shots, std::size_t rounds) {
    if (shots < 1 || errors > shots || rounds < 1) {
        throw std::invalid_argument("per_round_ler: need N_s >= 1, 0 <= N_e <= N_s, d >= 1");
    }
    const double frac = static_cast<double>(errors) / static_cast<double>(shots);
    // 1 - (1 - f)^(1/d) evaluated without cancellation for small f.
    return -std::expm1(std::log1p(-frac) / static_cast<double>(rounds));
}

Interval wilson_interval(std::uint64_t errors, std::uint64_t shots, double z) {
    if (shots == 0) {
        return {0, 1};
    }
    const double n = static_cast<double>(shots);
    const double ph = static_cast<double>(errors) / n;
    const double z2 = z * z;
    const double center = (ph + z2 / (2 * n)) / (1 + z2 / n);
    const double half = z * std::sqrt(ph * (1 - ph) / n + z2 / (4 * n * n)) / (1 + z2 / n);
    // The bounds are exact at the extremes; the formula leaves rounding dust.
    return {errors == 0 ? 0.0 : std::max(0.0, center - half), errors == shots ? 1.0 : std::min(1.0, center + half)};
}

namespace {

std::uint64_t count_failures(const ShotBatch &b, ObservablePredictor &dec, std::vector<std::uint8_t> &zero_pred,
                             bool &zero_known) {
    std::uint64_t fails = 0;
    const std::size_t k = b.observable_flips.cols();
    for (std::size_t s = 0; s < b.syndromes.rows(); ++s) {
        const bool trivial = b.syndromes.row_is_zero(s);
        if (trivial && !zero_known) {
            zero_pred = dec.predict(b.syndromes.row(s));
            zero_known = true;
        }
        const std::vector<std::uint8_t> pred = trivial ? zero_pred : dec.predict(b.syndromes.row(s));
        for (std::size_t o = 0; o < k; ++o) {
            if (pred[o] != static_cast<std::uint8_t>(b.observable_flips.get(s, o))) {
                ++fails;
                break;
            }
        }
    }
    return fails;
}

}  // namespace

LerResult adaptive_run(const DetectorModel &model, ObservablePredictor &decoder, const StopCondition &stop,
                       std::uint64_t seed, std::size_t rounds) {
    if (stop.batch_shots < 1 || stop.max_shots < 1) {
        throw std::invalid_argument("adaptive_run: batch_shots and max_shots must be >= 1");
    }
    LerResult res;
    res.rounds = rounds;
    res.seed = seed;
    const unsigned threads = std::max(1U, stop.threads);
    if (model.mechanisms.empty()) {
        // Nothing can fire: every shot is trivially correct.
        res.shots = stop.max_shots;
    }
    std::vector<std::unique_ptr<ObservablePredictor>> workers;
    for (unsigned t = 1; t < threads; ++t) {
        workers.push_back(decoder.clone());
    }
    std::uint64_t next_batch = 0;
    while (res.shots < stop.max_shots && res.errors < stop.min_errors) {
        std::vector<std::uint64_t> sizes;
        std::uint64_t planned = res.shots;
        for (unsigned t = 0; t < threads && planned < stop.max_shots; ++t) {
            const std::uint64_t n = std::min<std::uint64_t>(stop.batch_shots, stop.max_shots - planned);
            sizes.push_back(n);
            planned += n;
        }
        std::vector<std::uint64_t> fails(sizes.size(), 0);
        auto work = [&](std::size_t t, ObservablePredictor &dec) {
            std::vector<std::uint8_t> zero_pred;
            bool zero_known = false;
            const ShotBatch b = sample(model, sizes[t], Rng::stream(seed, next_batch + t)());
            fails[t] = count_failures(b, dec, zero_pred, zero_known);
        };
        if (sizes.size() == 1) {
            work(0, decoder);
        } else {
            std::vector<std::thread> pool;
            for (std::size_t t = 1; t < sizes.size(); ++t) {
                pool.emplace_back(work, t, std::ref(*workers[t - 1]));
            }
            work(0, decoder);
            for (auto &th : pool) {
                th.join();
            }
        }
        for (std::size_t t = 0; t < sizes.size(); ++t) {
            if (res.shots >= stop.max_shots || res.errors >= stop.min_errors) {
                break;
            }
            res.shots += sizes[t];
            res.errors += fails[t];
        }
        next_batch += sizes.size();
    }
    res.p_L_per_round = per_round_ler(res.errors, res.shots, rounds);
    const Interval shot_ci = wilson_interval(res.errors, res.shots);
    res.per_round_95 = {-std::expm1(std::log1p(-shot_ci.lo) / static_cast<double>(rounds)),
                        -std::expm1(std::log1p(-shot_ci.hi) / static_cast<double>(rounds))};
    return res;
}

void append_ler_csv(const std::string &path, const std::string &code, double p, double t_coherence_s,
                    const LerResult &r) {
    const bool fresh = !std::filesystem::exists(path);
    std::ofstream out(path, std::ios::app);
    if (!out) {
        throw std::runtime_error("cannot open " + path);
    }
    if (fresh) {
        out << "code,p,t_coherence_s,d,N_s,N_e,p_L,seed\n";
    }
    out << std::setprecision(10) << '"' << code << '"' << ',' << p << ',' << t_coherence_s << ',' << r.rounds << ','
        << r.shots << ',' << r.errors << ',' << r.p_L_per_round << ',' << r.seed << '\n';
}

}  // namespace qmem
