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

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace qmem {

const char *to_string(CnotMode m) { return m == CnotMode::LatticeSurgery ? "lattice-surgery" : "transversal"; }

void FactorySpec::validate() const {
    if (qubit_cost == 0 || cycles_per_state == 0 || !(output_error > 0 && output_error <= 1)) {
        throw std::invalid_argument("factory '" + name + "': qubit_cost, cycles_per_state and output_error must be positive");
    }
}

std::vector<FactorySpec> default_factory_catalog() {
    // Placeholder 15-to-1 parameters; replace through the [factory] section.
    return {
        {"15to1-small", 1150, 2, 1e-6},
        {"15to1-medium", 4620, 4, 4.5e-8},
        {"15to1-large", 8000, 4, 1e-11},
    };
}

GateCostTable GateCostTable::for_mode(CnotMode mode) {
    GateCostTable t;
    if (mode == CnotMode::Transversal) {
        t.cnot = 1;
        t.t = 1;
    }
    return t;
}

void ArchConfig::validate(bool hierarchical) const {
    if (hierarchical && n_blocks < 1) {
        throw std::invalid_argument("arch: n_blocks must be >= 1");
    }
    if (n_surface < 1) {
        throw std::invalid_argument("arch: n_surface must be >= 1");
    }
    if (surface_d < 1 || ldst_d < 1 || memory_d < 1 || memory_k < 1) {
        throw std::invalid_argument("arch: distances and memory_k must be positive");
    }
    if (n_factories < 1) {
        throw std::invalid_argument("arch: n_factories must be >= 1");
    }
    if (!(ldst_multiplier > 0) || !(spacing_um > 0) || !(buffer_factor > 0)) {
        throw std::invalid_argument("arch: ldst_multiplier, spacing_um and buffer_factor must be positive");
    }
    factory.validate();
    if (hierarchical) {
        const auto groups = ldst_groups(*this);
        for (const auto &g : groups) {
            if (g.empty()) {
                throw std::invalid_argument("arch: every LD/ST ancilla must serve at least one surface slot");
            }
            for (auto s : g) {
                if (s >= n_surface) {
                    throw std::invalid_argument("arch: LD/ST assignment references a missing surface slot");
                }
            }
        }
    }
}

ArchConfig default_arch() {
    ArchConfig cfg;
    cfg.memory_code = *catalog_spec("[144,12,12]");
    cfg.factory = default_factory_catalog()[1];
    return cfg;
}

std::vector<std::vector<std::size_t>> ldst_groups(const ArchConfig &cfg) {
    if (!cfg.ldst_assignment.empty()) {
        if (cfg.ldst_assignment.size() != cfg.n_blocks) {
            throw std::invalid_argument("arch: ldst assignment needs one entry per memory block");
        }
        return cfg.ldst_assignment;
    }
    const std::size_t s = cfg.n_surface;
    const std::size_t b = cfg.n_blocks;
    std::vector<std::vector<std::size_t>> out(b);
    if (b == 0) {
        return out;
    }
    const std::size_t width = std::min(s, std::max<std::size_t>(2, (s + b - 1) / b));
    for (std::size_t i = 0; i < b; ++i) {
        std::size_t start = i * s / b;
        start = std::min(start, s - width);
        for (std::size_t j = 0; j < width; ++j) {
            out[i].push_back(start + j);
        }
    }
    return out;
}

namespace {

template <typename T>
void read(const KvDocument &doc, const char *sec, const char *key, T &dst) {
    if constexpr (std::is_floating_point_v<T>) {
        if (auto v = doc.get_double(sec, key)) {
            dst = *v;
        }
    } else {
        if (auto v = doc.get_int(sec, key)) {
            const KvEntry *e = doc.find(sec, key);
            if (*v < 0) {
                throw ParseError(std::string(key) + " must be non-negative", e->line, e->column);
            }
            dst = static_cast<T>(*v);
        }
    }
}

}  // namespace

ArchConfig parse_arch_config(const KvDocument &doc) {
    ArchConfig cfg = default_arch();
    if (auto label = doc.get_string("memory", "code")) {
        auto spec = catalog_spec(*label);
        if (!spec) {
            const KvEntry *e = doc.find("memory", "code");
            throw ParseError("unknown catalog code '" + *label + "'", e->line, e->column);
        }
        cfg.memory_code = *spec;
    } else if (doc.has("memory", "l")) {
        std::ostringstream text;
        for (const auto &[key, entry] : doc.sections().at("memory")) {
            if (key == "l" || key == "m" || key == "a" || key == "b") {
                text << key << " = " << entry.value << '\n';
            }
        }
        cfg.memory_code = parse_poly_spec(text.str());
    }
    const CssCode code = build_code(cfg.memory_code);
    cfg.memory_n = code.n;
    cfg.memory_k = code.k;
    cfg.memory_d = cfg.memory_code.d_claimed.value_or(cfg.memory_d);
    read(doc, "memory", "d", cfg.memory_d);
    read(doc, "memory", "blocks", cfg.n_blocks);
    read(doc, "memory", "eps", cfg.eps_mem);
    read(doc, "memory", "buffer_factor", cfg.buffer_factor);

    read(doc, "compute", "surface_codes", cfg.n_surface);
    read(doc, "compute", "d", cfg.surface_d);
    read(doc, "compute", "eps", cfg.eps_surface);
    if (auto mode = doc.get_string("compute", "cnot")) {
        if (*mode == "lattice-surgery") {
            cfg.cnot_mode = CnotMode::LatticeSurgery;
        } else if (*mode == "transversal") {
            cfg.cnot_mode = CnotMode::Transversal;
        } else {
            const KvEntry *e = doc.find("compute", "cnot");
            throw ParseError("cnot must be lattice-surgery or transversal", e->line, e->column);
        }
    }
    cfg.ldst_d = cfg.surface_d;
    read(doc, "ldst", "d", cfg.ldst_d);
    read(doc, "ldst", "eps", cfg.eps_ldst);
    read(doc, "ldst", "multiplier", cfg.ldst_multiplier);

    if (auto name = doc.get_string("factory", "name")) {
        const auto catalog = default_factory_catalog();
        auto it = std::find_if(catalog.begin(), catalog.end(), [&](const FactorySpec &f) { return f.name == *name; });
        if (it != catalog.end()) {
            cfg.factory = *it;
        } else {
            cfg.factory = FactorySpec{*name, 0, 0, 0};
        }
    }
    read(doc, "factory", "qubits", cfg.factory.qubit_cost);
    read(doc, "factory", "cycles_per_state", cfg.factory.cycles_per_state);
    read(doc, "factory", "output_error", cfg.factory.output_error);
    read(doc, "factory", "count", cfg.n_factories);

    read(doc, "timing", "surface_round_ms", cfg.cycle.surface_round_ms);
    read(doc, "timing", "ldst_round_ms", cfg.cycle.ldst_round_ms);
    read(doc, "timing", "memory_round_ms", cfg.cycle.memory_round_ms);
    read(doc, "timing", "spacing_um", cfg.spacing_um);
    cfg.validate();
    return cfg;
}

ArchConfig load_arch_config(const std::string &path) { return parse_arch_config(KvDocument::load(path)); }

double surface_patch_mm2(int d, double spacing_um) {
    const double side = 2.0 * d * spacing_um;
    return side * side * 1e-6;
}

double memory_block_mm2(const PolySpec &code, double spacing_um, double buffer_factor) {
    return (2.0 * code.m * spacing_um) * (2.0 * code.l * spacing_um) * buffer_factor * 1e-6;
}

Footprint footprint(const ArchConfig &cfg, bool hierarchical) {
    cfg.validate(hierarchical);
    Footprint fp;
    const std::size_t patches = cfg.n_surface + cfg.routing_patches();
    fp.compute_mm2 = static_cast<double>(patches) * surface_patch_mm2(cfg.surface_d, cfg.spacing_um);
    fp.factory_mm2 = static_cast<double>(cfg.n_factories * cfg.factory.qubit_cost) * 2.0 * cfg.spacing_um *
                     cfg.spacing_um * 1e-6;
    fp.total_qubits = patches * cfg.surface_qubits() + cfg.n_factories * cfg.factory.qubit_cost;
    if (hierarchical) {
        fp.memory_mm2 = static_cast<double>(cfg.n_blocks) *
                        memory_block_mm2(cfg.memory_code, cfg.spacing_um, cfg.buffer_factor);
        fp.ldst_mm2 = static_cast<double>(cfg.n_blocks) * surface_patch_mm2(cfg.ldst_d, cfg.spacing_um);
        fp.total_qubits += cfg.n_blocks * (cfg.memory_block_qubits() + cfg.ldst_qubits());
    }
    return fp;
}

double program_fidelity(const FidelityModel &fm) {
    for (double e : {fm.eps_mem, fm.eps_ldst, fm.eps_surface, fm.eps_rz, fm.eps_t}) {
        if (!(e >= 0 && e <= 1)) {
            throw std::invalid_argument("program_fidelity: error rates must be in [0, 1]");
        }
    }
    for (double c : {fm.n_blocks, fm.n_ldst, fm.n_surface, fm.n_cycles, fm.n_rz, fm.n_t}) {
        if (!(c >= 0)) {
            throw std::invalid_argument("program_fidelity: counts must be non-negative");
        }
    }
    auto term = [](double eps, double count) { return count == 0 ? 0.0 : count * std::log1p(-eps); };
    return std::exp(term(fm.eps_mem, fm.n_blocks * fm.n_cycles) + term(fm.eps_ldst, fm.n_blocks * fm.n_ldst) +
                    term(fm.eps_surface, fm.n_surface * fm.n_cycles) + term(fm.eps_rz, fm.n_rz) +
                    term(fm.eps_t, fm.n_t));
}

std::vector<MemoryCalibration> default_memory_calibration() {
    return {{"[288,12,18]", 288, 12, 18, 1e-3, 1e-9}};
}

double surface_eps_per_cycle(int d, double p) { return 0.1 * std::pow(p / 0.01, (d + 1) / 2.0); }

ResourceChoice select_resources(const ResourceDemand &demand, double target, double p,
                                const std::vector<MemoryCalibration> &memories,
                                const std::vector<FactorySpec> &factories, int max_surface_d) {
    if (memories.empty() || factories.empty()) {
        throw std::invalid_argument("select_resources: empty memory or factory catalog");
    }
    std::vector<MemoryCalibration> mems = memories;
    std::stable_sort(mems.begin(), mems.end(),
                     [](const MemoryCalibration &a, const MemoryCalibration &b) { return a.d < b.d; });
    std::vector<FactorySpec> facs = factories;
    std::stable_sort(facs.begin(), facs.end(),
                     [](const FactorySpec &a, const FactorySpec &b) { return a.qubit_cost < b.qubit_cost; });

    ResourceChoice best;
    best.fidelity = -1;
    for (int d = 3; d <= max_surface_d; d += 2) {
        for (const auto &mem : mems) {
            const std::size_t blocks = (demand.n_qubits + mem.k - 1) / std::max<std::size_t>(1, mem.k);
            for (const auto &fac : facs) {
                FidelityModel fm;
                fm.eps_mem = mem.eps_per_cycle;
                fm.eps_ldst = surface_eps_per_cycle(d, p);
                fm.eps_surface = surface_eps_per_cycle(d, p);
                fm.eps_rz = demand.eps_rz;
                fm.eps_t = fac.output_error;
                fm.n_blocks = static_cast<double>(blocks);
                fm.n_ldst = demand.n_ldst;
                fm.n_surface = static_cast<double>(demand.n_surface);
                fm.n_cycles = demand.n_cycles;
                fm.n_rz = demand.n_rz;
                fm.n_t = demand.n_t;
                const double f = program_fidelity(fm);
                ResourceChoice c{f >= target, d, mem, blocks, fac, f};
                if (c.feasible) {
                    return c;
                }
                if (f > best.fidelity) {
                    best = c;
                }
            }
        }
    }
    return best;
}

SupplyResult t_supply(const FactorySpec &factory, const std::vector<std::size_t> &demand, std::size_t initial_stock) {
    factory.validate();
    SupplyResult res;
    std::size_t stock = initial_stock;
    std::size_t waiting_from = 0;  // index into the flattened request list
    std::vector<std::size_t> requests;
    for (std::size_t c = 0; c < demand.size(); ++c) {
        requests.insert(requests.end(), demand[c], c);
    }
    res.start_cycle.resize(requests.size());
    std::size_t cycle = 0;
    while (waiting_from < requests.size()) {
        while (waiting_from < requests.size() && requests[waiting_from] <= cycle && stock > 0) {
            res.start_cycle[waiting_from] = cycle;
            res.total_stall += cycle - requests[waiting_from];
            --stock;
            ++waiting_from;
        }
        if ((cycle + 1) % factory.cycles_per_state == 0) {
            ++stock;
        }
        ++cycle;
    }
    return res;
}

}  // namespace qmem
