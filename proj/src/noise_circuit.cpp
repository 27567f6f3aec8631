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

#include "qmem/noise_circuit.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>
#include <stdexcept>
#include <string_view>
#include <unordered_map>

#include "qmem/kv_config.hpp"

namespace qmem {

PauliProbs idle_channel(double duration_us, double t1_s, double t2_s) {
    if (duration_us < 0) {
        throw std::invalid_argument("idle_channel: negative duration");
    }
    if (t1_s <= 0 || t2_s <= 0) {
        throw std::invalid_argument("idle_channel: coherence times must be positive");
    }
    const double t_s = duration_us * 1e-6;
    const double decay1 = -std::expm1(-t_s / t1_s);
    const double decay2 = -std::expm1(-t_s / t2_s);
    const double pxy = decay1 / 4.0;
    return {pxy, pxy, std::max(0.0, decay2 / 2.0 - pxy)};
}

void NoisyCircuit::add_err1(std::uint32_t q, PauliProbs p) {
    if (p.px == 0 && p.py == 0 && p.pz == 0) {
        return;
    }
    for (double v : {p.px, p.py, p.pz}) {
        if (!(v >= 0 && v <= 1)) {
            throw std::invalid_argument("NoisyCircuit: error probability outside [0, 1]");
        }
    }
    instructions.push_back({Gate::Err1, q, 0, static_cast<std::uint32_t>(probs.size())});
    probs.insert(probs.end(), {p.px, p.py, p.pz});
}

void NoisyCircuit::add_err2(std::uint32_t a, std::uint32_t b, const std::array<double, 15> &p) {
    if (std::all_of(p.begin(), p.end(), [](double v) { return v == 0; })) {
        return;
    }
    for (double v : p) {
        if (!(v >= 0 && v <= 1)) {
            throw std::invalid_argument("NoisyCircuit: error probability outside [0, 1]");
        }
    }
    instructions.push_back({Gate::Err2, a, b, static_cast<std::uint32_t>(probs.size())});
    probs.insert(probs.end(), p.begin(), p.end());
}

void NoisyCircuit::add_measure(std::uint32_t q, MeasureInfo info) {
    add_gate(Gate::M, q);
    measurements.push_back(info);
}

CheckRoundPlan plan_from_schedule(const MovementSchedule &sched, const LayoutMap &layout) {
    const std::size_t lm = layout.group_size();
    CheckRoundPlan plan;
    plan.n_data = 2 * lm;
    plan.n_xchecks = lm;
    plan.n_zchecks = lm;
    double pending = 0;
    for (const auto &step : sched.steps) {
        if (const auto *tr = std::get_if<TransferStep>(&step.action)) {
            pending += step.duration_us;
            if (tr->to == TrapKind::AOD) {
                plan.halves.push_back({tr->group, {}, 0});
            } else {
                plan.halves.back().idle_after_us = pending;
                pending = 0;
            }
        } else if (std::holds_alternative<MoveStep>(step.action)) {
            pending += step.duration_us;
        } else if (const auto *pu = std::get_if<PulseStep>(&step.action)) {
            const std::size_t base = pu->group == CheckType::X ? 2 * lm : 3 * lm;
            CheckLayer layer;
            layer.idle_before_us = pending;
            for (const auto &[check, data] : pu->pairs) {
                layer.pairs.emplace_back(static_cast<std::uint32_t>(check - base), static_cast<std::uint32_t>(data));
            }
            plan.halves.back().layers.push_back(std::move(layer));
            pending = step.duration_us;
        }
    }
    return plan;
}

CheckRoundPlan plan_from_code(const CssCode &code) {
    CheckRoundPlan plan;
    plan.n_data = code.n;
    plan.n_xchecks = code.gx.rows();
    plan.n_zchecks = code.gz.rows();
    for (CheckType type : {CheckType::X, CheckType::Z}) {
        const BitMatrix &g = type == CheckType::X ? code.gx : code.gz;
        CheckHalf half{type, {}, 0};
        std::vector<std::vector<bool>> data_busy;
        std::vector<std::vector<bool>> check_busy;
        for (std::size_t c = 0; c < g.rows(); ++c) {
            for (std::size_t d : g.row_support(c)) {
                std::size_t layer = 0;
                while (layer < half.layers.size() && (data_busy[layer][d] || check_busy[layer][c])) {
                    ++layer;
                }
                if (layer == half.layers.size()) {
                    half.layers.emplace_back();
                    data_busy.emplace_back(code.n, false);
                    check_busy.emplace_back(g.rows(), false);
                }
                half.layers[layer].pairs.emplace_back(static_cast<std::uint32_t>(c), static_cast<std::uint32_t>(d));
                data_busy[layer][d] = true;
                check_busy[layer][c] = true;
            }
        }
        plan.halves.push_back(std::move(half));
    }
    return plan;
}

NoisyCircuit build_memory_circuit(const CssCode &code, const CheckRoundPlan &plan, const NoiseParams &noise,
                                  std::size_t rounds) {
    if (rounds < 1) {
        throw std::invalid_argument("build_memory_circuit: rounds must be >= 1");
    }
    if (plan.n_data != code.n || plan.n_xchecks != code.gx.rows() || plan.n_zchecks != code.gz.rows()) {
        throw std::invalid_argument("build_memory_circuit: plan does not match code");
    }
    if (!(noise.p >= 0 && noise.p <= 1)) {
        throw std::invalid_argument("build_memory_circuit: p outside [0, 1]");
    }
    NoisyCircuit c;
    c.rounds = rounds;
    c.basis = noise.basis;
    const auto n = static_cast<std::uint32_t>(plan.n_data);
    const auto nx = static_cast<std::uint32_t>(plan.n_xchecks);
    const auto nz = static_cast<std::uint32_t>(plan.n_zchecks);
    c.num_qubits = n + nx + nz;
    const auto total = static_cast<std::uint32_t>(c.num_qubits);

    const double p = noise.p;
    const PauliProbs dep1{p / 3, p / 3, p / 3};
    const PauliProbs flip{p, 0, 0};
    std::array<double, 15> dep2{};
    dep2.fill(p / 15);
    // A noiseless run (p = 0) also drops idle noise.
    const bool idle = noise.idle_errors && p > 0;

    auto idle_all = [&](double us) {
        if (!idle || us <= 0) {
            return;
        }
        const PauliProbs ip = idle_channel(us, noise.t_coherence_s);
        for (std::uint32_t q = 0; q < total; ++q) {
            c.add_err1(q, ip);
        }
    };
    auto hadamard = [&](std::uint32_t q) {
        c.add_gate(Gate::H, q);
        c.add_err1(q, dep1);
    };

    for (std::uint32_t q = 0; q < n; ++q) {
        c.add_gate(Gate::R, q);
        c.add_err1(q, flip);
    }
    if (noise.basis == MemoryBasis::X) {
        for (std::uint32_t q = 0; q < n; ++q) {
            hadamard(q);
        }
    }

    for (std::size_t r = 0; r < rounds; ++r) {
        for (const auto &half : plan.halves) {
            const bool is_x = half.type == CheckType::X;
            const std::uint32_t base = is_x ? n : n + nx;
            const std::uint32_t count = is_x ? nx : nz;
            for (std::uint32_t a = 0; a < count; ++a) {
                c.add_gate(Gate::R, base + a);
                c.add_err1(base + a, flip);
                hadamard(base + a);
            }
            if (is_x) {
                for (std::uint32_t q = 0; q < n; ++q) {
                    hadamard(q);
                }
            }
            for (const auto &layer : half.layers) {
                idle_all(layer.idle_before_us);
                for (const auto &[check, data] : layer.pairs) {
                    c.add_gate(Gate::CZ, base + check, data);
                    c.add_err2(base + check, data, dep2);
                }
            }
            idle_all(half.idle_after_us);
            if (is_x) {
                for (std::uint32_t q = 0; q < n; ++q) {
                    hadamard(q);
                }
            }
            for (std::uint32_t a = 0; a < count; ++a) {
                hadamard(base + a);
                c.add_err1(base + a, flip);
                c.add_measure(base + a, {is_x ? MeasureKind::CheckX : MeasureKind::CheckZ, a,
                                         static_cast<std::uint32_t>(r)});
            }
        }
    }

    if (noise.basis == MemoryBasis::X) {
        for (std::uint32_t q = 0; q < n; ++q) {
            hadamard(q);
        }
    }
    for (std::uint32_t q = 0; q < n; ++q) {
        c.add_err1(q, flip);
        c.add_measure(q, {MeasureKind::Data, q, static_cast<std::uint32_t>(rounds)});
    }
    return c;
}

void define_detectors(const NoisyCircuit &circ, const CssCode &code, std::vector<DetectorInfo> &detectors,
                      std::vector<std::vector<std::uint32_t>> &observables) {
    detectors.clear();
    observables.clear();
    const std::size_t rounds = circ.rounds;
    // meas[type][check][round] -> measurement index
    std::array<std::vector<std::vector<long>>, 2> meas;
    meas[0].assign(code.gx.rows(), std::vector<long>(rounds, -1));
    meas[1].assign(code.gz.rows(), std::vector<long>(rounds, -1));
    std::vector<long> data_meas(code.n, -1);
    for (std::size_t i = 0; i < circ.measurements.size(); ++i) {
        const auto &mi = circ.measurements[i];
        const auto idx = static_cast<long>(i);
        switch (mi.kind) {
            case MeasureKind::CheckX:
                meas[0].at(mi.index).at(mi.round) = idx;
                break;
            case MeasureKind::CheckZ:
                meas[1].at(mi.index).at(mi.round) = idx;
                break;
            case MeasureKind::Data:
                data_meas.at(mi.index) = idx;
                break;
        }
    }
    const int det_type = circ.basis == MemoryBasis::Z ? 1 : 0;
    for (std::size_t r = 0; r < rounds; ++r) {
        for (int t = 0; t < 2; ++t) {
            if (r == 0 && t != det_type) {
                continue;
            }
            for (std::size_t ch = 0; ch < meas[t].size(); ++ch) {
                DetectorInfo d;
                d.type = t == 0 ? CheckType::X : CheckType::Z;
                d.check = static_cast<std::uint32_t>(ch);
                d.round = static_cast<std::uint32_t>(r);
                if (meas[t][ch][r] < 0 || (r > 0 && meas[t][ch][r - 1] < 0)) {
                    throw std::invalid_argument("define_detectors: circuit is missing a check measurement");
                }
                d.measurements.push_back(static_cast<std::uint32_t>(meas[t][ch][r]));
                if (r > 0) {
                    d.measurements.push_back(static_cast<std::uint32_t>(meas[t][ch][r - 1]));
                }
                detectors.push_back(std::move(d));
            }
        }
    }
    const BitMatrix &final_checks = det_type == 1 ? code.gz : code.gx;
    for (std::size_t ch = 0; ch < final_checks.rows(); ++ch) {
        DetectorInfo d;
        d.type = det_type == 0 ? CheckType::X : CheckType::Z;
        d.check = static_cast<std::uint32_t>(ch);
        d.round = static_cast<std::uint32_t>(rounds);
        for (std::size_t q : final_checks.row_support(ch)) {
            d.measurements.push_back(static_cast<std::uint32_t>(data_meas.at(q)));
        }
        d.measurements.push_back(static_cast<std::uint32_t>(meas[det_type][ch][rounds - 1]));
        detectors.push_back(std::move(d));
    }
    const BitMatrix &logicals = det_type == 1 ? code.logicals_z : code.logicals_x;
    for (std::size_t j = 0; j < logicals.rows(); ++j) {
        std::vector<std::uint32_t> obs;
        for (std::size_t q : logicals.row_support(j)) {
            obs.push_back(static_cast<std::uint32_t>(data_meas.at(q)));
        }
        observables.push_back(std::move(obs));
    }
}

namespace {

struct SignatureHash {
    std::size_t operator()(const std::string &s) const noexcept { return std::hash<std::string>{}(s); }
};

double xor_prob(double a, double b) { return a + b - 2 * a * b; }

class MechanismSet {
  public:
    explicit MechanismSet(std::size_t words) : words_(words) {}

    void add(const std::uint64_t *sig, double p) {
        if (p <= 0) {
            return;
        }
        bool any = false;
        for (std::size_t w = 0; w < words_; ++w) {
            any = any || sig[w] != 0;
        }
        if (!any) {
            return;
        }
        std::string key(reinterpret_cast<const char *>(sig), words_ * sizeof(std::uint64_t));
        auto [it, inserted] = index_.try_emplace(std::move(key), probs_.size());
        if (inserted) {
            probs_.push_back(p);
            order_.push_back(&it->first);
        } else {
            probs_[it->second] = xor_prob(probs_[it->second], p);
        }
    }

    std::size_t size() const { return probs_.size(); }
    double prob(std::size_t i) const { return probs_[i]; }
    const std::uint64_t *signature(std::size_t i) const {
        return reinterpret_cast<const std::uint64_t *>(order_[i]->data());
    }

  private:
    std::size_t words_;
    std::unordered_map<std::string, std::size_t, SignatureHash> index_;
    std::vector<double> probs_;
    std::vector<const std::string *> order_;
};

}  // namespace

DetectorModel build_detector_model(const NoisyCircuit &circ, const CssCode &code) {
    DetectorModel dm;
    define_detectors(circ, code, dm.detectors, dm.observables);
    dm.num_detectors = dm.detectors.size();
    dm.num_observables = dm.observables.size();
    const std::size_t width = dm.num_detectors + dm.num_observables;
    const std::size_t words = words_for(width);

    // Measurement index -> signature bits it contributes to.
    std::vector<std::vector<std::uint32_t>> meas_bits(circ.num_measurements());
    for (std::size_t d = 0; d < dm.detectors.size(); ++d) {
        for (auto m : dm.detectors[d].measurements) {
            meas_bits.at(m).push_back(static_cast<std::uint32_t>(d));
        }
    }
    for (std::size_t j = 0; j < dm.observables.size(); ++j) {
        for (auto m : dm.observables[j]) {
            meas_bits.at(m).push_back(static_cast<std::uint32_t>(dm.num_detectors + j));
        }
    }

    // Sensitivity frames: bit b of xs[q] (zs[q]) is set when the quantity b
    // anticommutes with a Z (X) error on q at the current point.
    std::vector<std::uint64_t> xs(circ.num_qubits * words, 0);
    std::vector<std::uint64_t> zs(circ.num_qubits * words, 0);
    auto xrow = [&](std::uint32_t q) { return xs.data() + static_cast<std::size_t>(q) * words; };
    auto zrow = [&](std::uint32_t q) { return zs.data() + static_cast<std::size_t>(q) * words; };

    MechanismSet set(words);
    std::vector<std::uint64_t> sig(words);
    // Single-qubit Pauli a (I=0, X=1, Y=2, Z=3) on q is detected by z for X,
    // x for Z, both for Y.
    auto accumulate = [&](std::uint32_t q, int pauli) {
        const std::uint64_t *x = xrow(q);
        const std::uint64_t *z = zrow(q);
        for (std::size_t w = 0; w < words; ++w) {
            if (pauli == 1 || pauli == 2) {
                sig[w] ^= z[w];
            }
            if (pauli == 3 || pauli == 2) {
                sig[w] ^= x[w];
            }
        }
    };

    std::size_t meas_index = circ.num_measurements();
    for (auto it = circ.instructions.rbegin(); it != circ.instructions.rend(); ++it) {
        const Instruction &ins = *it;
        switch (ins.gate) {
            case Gate::M: {
                --meas_index;
                std::uint64_t *z = zrow(ins.q0);
                for (auto b : meas_bits[meas_index]) {
                    z[b / 64] ^= std::uint64_t{1} << (b % 64);
                }
                break;
            }
            case Gate::R:
                std::fill_n(xrow(ins.q0), words, 0);
                std::fill_n(zrow(ins.q0), words, 0);
                break;
            case Gate::H:
                std::swap_ranges(xrow(ins.q0), xrow(ins.q0) + words, zrow(ins.q0));
                break;
            case Gate::CZ: {
                std::uint64_t *za = zrow(ins.q0);
                std::uint64_t *zb = zrow(ins.q1);
                const std::uint64_t *xa = xrow(ins.q0);
                const std::uint64_t *xb = xrow(ins.q1);
                for (std::size_t w = 0; w < words; ++w) {
                    za[w] ^= xb[w];
                    zb[w] ^= xa[w];
                }
                break;
            }
            case Gate::CX: {
                std::uint64_t *xt = xrow(ins.q1);
                std::uint64_t *zc = zrow(ins.q0);
                const std::uint64_t *xc = xrow(ins.q0);
                const std::uint64_t *zt = zrow(ins.q1);
                for (std::size_t w = 0; w < words; ++w) {
                    xt[w] ^= xc[w];
                    zc[w] ^= zt[w];
                }
                break;
            }
            case Gate::Err1:
                for (int pauli = 1; pauli <= 3; ++pauli) {
                    std::fill(sig.begin(), sig.end(), 0);
                    accumulate(ins.q0, pauli);
                    set.add(sig.data(), circ.probs[ins.prob_offset + static_cast<std::size_t>(pauli) - 1]);
                }
                break;
            case Gate::Err2:
                for (int k = 1; k < 16; ++k) {
                    std::fill(sig.begin(), sig.end(), 0);
                    accumulate(ins.q0, k / 4);
                    accumulate(ins.q1, k % 4);
                    set.add(sig.data(), circ.probs[ins.prob_offset + static_cast<std::size_t>(k) - 1]);
                }
                break;
            default:
                throw std::invalid_argument("build_detector_model: non-Clifford or unknown instruction");
        }
    }

    dm.mechanisms.reserve(set.size());
    for (std::size_t i = 0; i < set.size(); ++i) {
        Mechanism mech;
        mech.p = set.prob(i);
        const std::uint64_t *s = set.signature(i);
        for (std::size_t w = 0; w < words; ++w) {
            std::uint64_t bits = s[w];
            while (bits != 0) {
                const auto b = static_cast<std::uint32_t>(w * 64 + static_cast<std::size_t>(std::countr_zero(bits)));
                bits &= bits - 1;
                if (b < dm.num_detectors) {
                    mech.detectors.push_back(b);
                } else {
                    mech.observables.push_back(b - static_cast<std::uint32_t>(dm.num_detectors));
                }
            }
        }
        dm.mechanisms.push_back(std::move(mech));
    }

    // Per-family views. Observables belong to the family whose detectors the
    // memory basis makes deterministic.
    const CheckType obs_family = circ.basis == MemoryBasis::Z ? CheckType::Z : CheckType::X;
    for (int t = 0; t < 2; ++t) {
        Subproblem &sp = dm.split[static_cast<std::size_t>(t)];
        sp.type = t == 0 ? CheckType::X : CheckType::Z;
        std::vector<long> local(dm.num_detectors, -1);
        for (std::size_t d = 0; d < dm.num_detectors; ++d) {
            if (dm.detectors[d].type == sp.type) {
                local[d] = static_cast<long>(sp.detector_ids.size());
                sp.detector_ids.push_back(static_cast<std::uint32_t>(d));
            }
        }
        const bool with_obs = sp.type == obs_family;
        sp.num_observables = with_obs ? dm.num_observables : 0;
        const std::size_t lwords = words_for(sp.detector_ids.size() + sp.num_observables);
        MechanismSet local_set(lwords);
        std::vector<std::uint64_t> lsig(lwords);
        for (const auto &mech : dm.mechanisms) {
            std::fill(lsig.begin(), lsig.end(), 0);
            for (auto d : mech.detectors) {
                if (local[d] >= 0) {
                    const auto b = static_cast<std::size_t>(local[d]);
                    lsig[b / 64] ^= std::uint64_t{1} << (b % 64);
                }
            }
            if (with_obs) {
                for (auto o : mech.observables) {
                    const std::size_t b = sp.detector_ids.size() + o;
                    lsig[b / 64] ^= std::uint64_t{1} << (b % 64);
                }
            }
            local_set.add(lsig.data(), mech.p);
        }
        for (std::size_t i = 0; i < local_set.size(); ++i) {
            Mechanism m;
            m.p = local_set.prob(i);
            const std::uint64_t *s = local_set.signature(i);
            for (std::size_t w = 0; w < lwords; ++w) {
                std::uint64_t bits = s[w];
                while (bits != 0) {
                    const auto b = w * 64 + static_cast<std::size_t>(std::countr_zero(bits));
                    bits &= bits - 1;
                    if (b < sp.detector_ids.size()) {
                        m.detectors.push_back(static_cast<std::uint32_t>(b));
                    } else {
                        m.observables.push_back(static_cast<std::uint32_t>(b - sp.detector_ids.size()));
                    }
                }
            }
            sp.mechanisms.push_back(std::move(m));
        }
    }
    return dm;
}

void write_circuit_text(std::ostream &out, const NoisyCircuit &circ, const std::vector<DetectorInfo> &detectors,
                        const std::vector<std::vector<std::uint32_t>> &observables) {
    out << std::setprecision(17);
    for (const auto &ins : circ.instructions) {
        switch (ins.gate) {
            case Gate::R:
                out << "R " << ins.q0 << '\n';
                break;
            case Gate::H:
                out << "H " << ins.q0 << '\n';
                break;
            case Gate::CZ:
                out << "CZ " << ins.q0 << ' ' << ins.q1 << '\n';
                break;
            case Gate::CX:
                out << "CX " << ins.q0 << ' ' << ins.q1 << '\n';
                break;
            case Gate::M:
                out << "M " << ins.q0 << '\n';
                break;
            case Gate::Err1:
                out << "ERR1 " << ins.q0;
                for (int i = 0; i < 3; ++i) {
                    out << ' ' << circ.probs[ins.prob_offset + static_cast<std::size_t>(i)];
                }
                out << '\n';
                break;
            case Gate::Err2:
                out << "ERR2 " << ins.q0 << ' ' << ins.q1;
                for (int i = 0; i < 15; ++i) {
                    out << ' ' << circ.probs[ins.prob_offset + static_cast<std::size_t>(i)];
                }
                out << '\n';
                break;
        }
    }
    for (const auto &d : detectors) {
        out << "DETECTOR";
        for (auto m : d.measurements) {
            out << ' ' << m;
        }
        out << '\n';
    }
    for (std::size_t j = 0; j < observables.size(); ++j) {
        out << "OBSERVABLE " << j;
        for (auto m : observables[j]) {
            out << ' ' << m;
        }
        out << '\n';
    }
}

NoisyCircuit read_circuit_text(std::istream &in) {
    NoisyCircuit c;
    std::string line;
    std::size_t line_no = 0;
    std::uint32_t max_q = 0;
    bool any_q = false;
    auto touch = [&](std::uint32_t q) {
        max_q = std::max(max_q, q);
        any_q = true;
    };
    while (std::getline(in, line)) {
        ++line_no;
        std::istringstream ls(line);
        std::string op;
        if (!(ls >> op)) {
            continue;
        }
        auto need = [&](auto &v) {
            if (!(ls >> v)) {
                throw ParseError("malformed '" + op + "' instruction", line_no, 1);
            }
        };
        std::uint32_t a = 0;
        std::uint32_t b = 0;
        if (op == "R" || op == "H" || op == "M") {
            need(a);
            touch(a);
            if (op == "M") {
                c.add_measure(a, {});
            } else {
                c.add_gate(op == "R" ? Gate::R : Gate::H, a);
            }
        } else if (op == "CZ" || op == "CX") {
            need(a);
            need(b);
            touch(a);
            touch(b);
            c.add_gate(op == "CZ" ? Gate::CZ : Gate::CX, a, b);
        } else if (op == "ERR1") {
            PauliProbs p;
            need(a);
            need(p.px);
            need(p.py);
            need(p.pz);
            touch(a);
            c.add_err1(a, p);
        } else if (op == "ERR2") {
            std::array<double, 15> p{};
            need(a);
            need(b);
            for (auto &v : p) {
                need(v);
            }
            touch(a);
            touch(b);
            c.add_err2(a, b, p);
        } else if (op == "DETECTOR" || op == "OBSERVABLE") {
            continue;
        } else {
            throw ParseError("unsupported instruction '" + op + "'", line_no, 1);
        }
    }
    c.num_qubits = any_q ? static_cast<std::size_t>(max_q) + 1 : 0;
    return c;
}

MemoryExperiment build_memory_experiment(const PolySpec &spec, const NoiseParams &noise, std::size_t rounds,
                                         LayoutVariant variant) {
    MemoryExperiment e;
    e.code = build_code(spec);
    const LayoutMap lay = layout(spec, variant);
    e.schedule = schedule_round(spec, lay, CostModel{});
    const VerifyReport rep = verify_schedule(e.schedule, e.code, lay);
    if (!rep.ok) {
        throw std::logic_error("schedule verification failed (" + std::string(1, rep.assertion) + "): " + rep.message);
    }
    e.circuit = build_memory_circuit(e.code, plan_from_schedule(e.schedule, lay), noise, rounds);
    e.model = build_detector_model(e.circuit, e.code);
    return e;
}

}  // namespace qmem
