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

// qmem: command-line front end. Every command that writes files puts them in
// a fresh out/<command>/<name>/ directory next to a manifest.json.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "qmem/arch.hpp"
#include "qmem/bposd.hpp"
#include "qmem/compiler.hpp"
#include "qmem/gb_code.hpp"
#include "qmem/kv_config.hpp"
#include "qmem/layout.hpp"
#include "qmem/noise_circuit.hpp"
#include "qmem/sampler.hpp"
#include "qmem/schedule.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace qmem;

namespace {

constexpr const char *kVersion = "0.1.0";

// Thrown for bad user input that is not a ParseError.
struct InputError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

PolySpec load_spec(const std::string &arg) {
    if (fs::exists(arg)) {
        return load_poly_spec(arg);
    }
    if (auto s = catalog_spec(arg)) {
        return *s;
    }
    throw InputError("'" + arg + "' is neither a spec file nor a catalog label");
}

std::string slug(std::string s) {
    for (char &c : s) {
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '-' && c != '.') {
            c = '_';
        }
    }
    s.erase(0, s.find_first_not_of('_'));
    while (!s.empty() && s.back() == '_') {
        s.pop_back();
    }
    return s.empty() ? "run" : s;
}

std::string spec_label(const PolySpec &s, const std::string &arg) {
    return s.name.empty() ? fs::path(arg).stem().string() : s.name;
}

// Creates out/<command>/<name>, appending -2, -3, ... rather than reusing an
// existing directory.
fs::path fresh_dir(const std::string &root, const std::string &command, const std::string &name) {
    const fs::path base = fs::path(root) / command;
    fs::create_directories(base);
    fs::path dir = base / slug(name);
    for (int i = 2; fs::exists(dir); ++i) {
        dir = base / (slug(name) + "-" + std::to_string(i));
    }
    fs::create_directory(dir);
    return dir;
}

void write_manifest(const fs::path &dir, const std::string &command, const std::vector<std::string> &inputs,
                    std::uint64_t seed, const json &overrides) {
    json m;
    m["command"] = command;
    m["version"] = kVersion;
    m["inputs"] = inputs;
    m["seed"] = seed;
    m["output_dir"] = dir.string();
    m["overrides"] = overrides;
    std::ofstream(dir / "manifest.json") << m.dump(2) << '\n';
}

std::ofstream open_out(const fs::path &p) {
    std::ofstream f(p);
    if (!f) {
        throw std::runtime_error("cannot write " + p.string());
    }
    f << std::setprecision(10);
    return f;
}

LayoutVariant parse_variant(const std::string &v) {
    if (v == "standard") {
        return LayoutVariant::Standard;
    }
    if (v == "collision-free") {
        return LayoutVariant::CollisionFree;
    }
    throw InputError("unknown layout variant '" + v + "'");
}

std::size_t default_rounds(const PolySpec &spec) {
    if (!spec.d_claimed) {
        throw InputError("spec has no d; pass --rounds");
    }
    return *spec.d_claimed;
}

std::vector<double> parse_values(const std::string &text) {
    std::vector<double> out;
    auto num = [&](const std::string &s) {
        std::size_t used = 0;
        double v = 0;
        try {
            v = std::stod(s, &used);
        } catch (const std::exception &) {
            used = 0;
        }
        if (used != s.size() || s.empty()) {
            throw InputError("bad number '" + s + "' in '" + text + "'");
        }
        return v;
    };
    if (text.find(':') != std::string::npos) {
        std::vector<double> parts;
        std::stringstream ss(text);
        for (std::string p; std::getline(ss, p, ':');) {
            parts.push_back(num(p));
        }
        if (parts.size() < 2 || parts.size() > 3) {
            throw InputError("range must be start:stop[:step], got '" + text + "'");
        }
        const double step = parts.size() == 3 ? parts[2] : 1.0;
        if (step <= 0 || parts[1] < parts[0]) {
            throw InputError("empty or reversed range '" + text + "'");
        }
        for (double v = parts[0]; v <= parts[1] + 1e-9 * step; v += step) {
            out.push_back(v);
        }
        return out;
    }
    std::stringstream ss(text);
    for (std::string p; std::getline(ss, p, ',');) {
        out.push_back(num(p));
    }
    return out;
}

// A program file, or a fixture name: ghz:N, bv:N, adder:BITS, ising:N[:STEPS].
Program load_program(const std::string &arg) {
    if (fs::exists(arg)) {
        std::ifstream f(arg);
        return parse_program(f);
    }
    std::vector<std::string> parts;
    std::stringstream ss(arg);
    for (std::string p; std::getline(ss, p, ':');) {
        parts.push_back(p);
    }
    auto arg_at = [&](std::size_t i, std::size_t dflt) -> std::size_t {
        if (i >= parts.size()) {
            return dflt;
        }
        const double v = parse_values(parts[i]).at(0);
        if (v < 1 || v != std::floor(v)) {
            throw InputError("fixture size must be a positive integer in '" + arg + "'");
        }
        return static_cast<std::size_t>(v);
    };
    if (parts.size() >= 2 && parts.size() <= 3) {
        if (parts[0] == "ghz") {
            return ghz_program(arg_at(1, 0));
        }
        if (parts[0] == "bv") {
            return bv_program(arg_at(1, 0));
        }
        if (parts[0] == "adder") {
            return adder_program(arg_at(1, 0));
        }
        if (parts[0] == "ising") {
            return ising_program(arg_at(1, 0), arg_at(2, 1));
        }
    }
    throw InputError("'" + arg + "' is neither a program file nor a fixture (ghz:N, bv:N, adder:B, ising:N[:S])");
}

std::string steps_text(const PolySpec &spec) {
    std::set<std::size_t> counts;
    for (const auto *poly : {&spec.a, &spec.b}) {
        for (const PolyTerm &t : *poly) {
            // The constant term pulses in place and needs no movement step.
            if (t.p != 0 || t.q != 0) {
                counts.insert(relative_positions(t, spec.l, spec.m).size());
            }
        }
    }
    std::string s;
    for (std::size_t c : counts) {
        s += (s.empty() ? "" : " or ") + std::to_string(c);
    }
    return s;
}

// code ---------------------------------------------------------------------

int cmd_code(const std::string &arg, std::size_t trials, std::uint64_t seed) {
    const PolySpec spec = load_spec(arg);
    const CssCode code = build_code(spec);
    std::cout << "n=" << code.n << " k=" << code.k << " w=" << spec.check_weight() << " steps=" << steps_text(spec)
              << '\n';
    std::cout << "a = " << format_polynomial(spec.a) << "\nb = " << format_polynomial(spec.b) << '\n';
    for (const auto *poly : {&spec.a, &spec.b}) {
        for (const PolyTerm &t : *poly) {
            std::cout << "  term " << to_string(t) << ": " << relative_positions(t, spec.l, spec.m).size()
                      << " steps\n";
        }
    }
    if (code.k > 0) {
        const DistanceBound db = estimate_distance(code, trials, seed);
        std::cout << "d" << (db.exact ? "=" : "<=") << db.weight << " (X " << db.weight_x << ", Z " << db.weight_z
                  << (db.exact ? ", exhaustive" : ", " + std::to_string(trials) + " trials, seed " + std::to_string(seed))
                  << ")\n";
        if (db.below_claimed) {
            std::cout << "warning: found a logical lighter than the claimed d=" << *spec.d_claimed << '\n';
        }
    }
    return 0;
}

// layout / schedule -------------------------------------------------------------

int cmd_layout(const std::string &arg, const std::string &variant, double spacing, const std::string &root,
               std::string name) {
    const PolySpec spec = load_spec(arg);
    const LayoutMap lay = layout(spec, parse_variant(variant), spacing);
    if (name.empty()) {
        name = spec_label(spec, arg) + "-" + variant;
    }
    const fs::path dir = fresh_dir(root, "layout", name);
    auto f = open_out(dir / "layout.csv");
    write_layout_csv(f, lay);
    write_manifest(dir, "layout", {arg}, 0, {{"variant", variant}, {"spacing_um", spacing}});
    std::cout << "wrote " << (dir / "layout.csv").string() << " (" << lay.positions.size() << " atoms, "
              << lay.region_rows() << "x" << lay.region_cols() << " data sites)\n";
    return 0;
}

int cmd_schedule(const std::string &arg, const std::string &variant, const std::string &policy, CostModel model,
                 const std::string &root, std::string name) {
    const PolySpec spec = load_spec(arg);
    const CssCode code = build_code(spec);
    const LayoutMap lay = layout(spec, parse_variant(variant), model.spacing_um);
    OrderPolicy pol = OrderPolicy::Exhaustive;
    if (policy == "sorted") {
        pol = OrderPolicy::SortedHeuristic;
    } else if (policy != "exhaustive") {
        throw InputError("unknown policy '" + policy + "'");
    }
    const MovementSchedule sched = schedule_round(spec, lay, model, pol);
    const VerifyReport rep = verify_schedule(sched, code, lay);
    if (!rep.ok) {
        throw std::logic_error(std::string("schedule fails check (") + rep.assertion + ") at step " +
                               std::to_string(rep.step_index) + ": " + rep.message);
    }
    if (name.empty()) {
        name = spec_label(spec, arg) + "-" + variant;
    }
    const fs::path dir = fresh_dir(root, "schedule", name);
    open_out(dir / "schedule.json") << schedule_to_json(sched, lay) << '\n';
    write_manifest(dir, "schedule", {arg}, 0,
                   {{"variant", variant},
                    {"policy", policy},
                    {"spacing_um", model.spacing_um},
                    {"accel_um_per_us2", model.accel_um_per_us2},
                    {"per_round_constant_us", model.per_round_constant_us}});
    const int d = static_cast<int>(spec.d_claimed.value_or(1));
    std::cout << std::fixed << std::setprecision(3) << "steps=" << sched.steps.size()
              << " pulses=" << sched.pulse_count() << " round_ms=" << sched.round_time_us / 1000
              << " cycle_ms=" << cycle_time(sched, d) / 1000 << " (d=" << d << ") verified\n"
              << "wrote " << (dir / "schedule.json").string() << '\n';
    return 0;
}

int cmd_cost_table(std::vector<std::string> args, const std::string &variant, bool as_json) {
    if (args.empty()) {
        for (const PolySpec &s : catalog_specs()) {
            args.push_back(s.name);
        }
    }
    json rows = json::array();
    for (const std::string &arg : args) {
        if (arg.starts_with("-")) {
            throw InputError("unknown option '" + arg + "'");
        }
        const PolySpec spec = load_spec(arg);
        const LayoutMap lay = layout(spec, parse_variant(variant));
        const MovementSchedule sched = schedule_round(spec, lay, CostModel{});
        const int d = static_cast<int>(default_rounds(spec));
        rows.push_back({{"code", spec_label(spec, arg)},
                        {"round_ms", sched.round_time_us / 1000},
                        {"rounds_per_cycle", d},
                        {"cycle_ms", cycle_time(sched, d) / 1000}});
    }
    if (as_json) {
        std::cout << rows.dump(2) << '\n';
        return 0;
    }
    std::cout << std::left << std::setw(14) << "code" << std::right << std::setw(12) << "Round (ms)" << std::setw(16)
              << "Rounds/Cycle" << std::setw(12) << "Cycle (ms)" << '\n'
              << std::fixed;
    for (const auto &r : rows) {
        std::cout << std::left << std::setw(14) << r["code"].get<std::string>() << std::right << std::setw(12)
                  << std::setprecision(3) << r["round_ms"].get<double>() << std::setw(16)
                  << r["rounds_per_cycle"].get<int>() << std::setw(12) << std::setprecision(2)
                  << r["cycle_ms"].get<double>() << '\n';
    }
    return 0;
}

// simulate / sweep / decode-bench --------------------------------------------------

struct SimOptions {
    double t_coherence = 10.0;
    std::size_t rounds = 0;  // 0: the spec's d
    std::string basis = "both";
    StopCondition stop;
    DecoderConfig decoder;
    std::uint64_t seed = 1;
};

json sim_overrides(const SimOptions &o, std::size_t rounds) {
    return {{"t_coherence_s", o.t_coherence},
            {"rounds", rounds},
            {"basis", o.basis},
            {"min_errors", o.stop.min_errors},
            {"max_shots", o.stop.max_shots},
            {"batch_shots", o.stop.batch_shots},
            {"max_iters", o.decoder.max_iters},
            {"osd_order", o.decoder.osd_order}};
}

std::vector<MemoryBasis> bases_for(const std::string &b) {
    if (b == "z") {
        return {MemoryBasis::Z};
    }
    if (b == "x") {
        return {MemoryBasis::X};
    }
    if (b == "both") {
        return {MemoryBasis::Z, MemoryBasis::X};
    }
    throw InputError("basis must be z, x or both");
}

// Runs every requested basis and keeps the worse per-round rate.
LerResult run_point(const PolySpec &spec, double p, const SimOptions &o, std::size_t rounds) {
    LerResult worst;
    bool first = true;
    for (MemoryBasis b : bases_for(o.basis)) {
        NoiseParams np;
        np.p = p;
        np.t_coherence_s = o.t_coherence;
        np.basis = b;
        const MemoryExperiment e = build_memory_experiment(spec, np, rounds);
        SplitDecoder dec(e.model, o.decoder);
        const LerResult r = adaptive_run(e.model, dec, o.stop, o.seed, rounds);
        if (first || r.p_L_per_round > worst.p_L_per_round) {
            worst = r;
        }
        first = false;
    }
    return worst;
}

void print_ler(double p, const LerResult &r) {
    std::cout << std::scientific << std::setprecision(3) << "p=" << p << " N_s=" << r.shots << " N_e=" << r.errors
              << " p_L/round=" << r.p_L_per_round << " 95%=[" << r.per_round_95.lo << ", " << r.per_round_95.hi
              << "]\n"
              << std::defaultfloat;
}

int cmd_simulate(const std::string &arg, const std::vector<double> &ps, const SimOptions &o, const std::string &root,
                 std::string name, const std::string &command) {
    const PolySpec spec = load_spec(arg);
    const std::size_t rounds = o.rounds ? o.rounds : default_rounds(spec);
    for (double p : ps) {
        if (!(p >= 0 && p <= 1)) {
            throw InputError("p must lie in [0, 1]");
        }
    }
    if (name.empty()) {
        name = spec_label(spec, arg);
    }
    const fs::path dir = fresh_dir(root, command, name);
    json ov = sim_overrides(o, rounds);
    ov["p"] = ps;
    write_manifest(dir, command, {arg}, o.seed, ov);
    const std::string csv = (dir / "ler.csv").string();
    for (double p : ps) {
        const LerResult r = run_point(spec, p, o, rounds);
        append_ler_csv(csv, spec_label(spec, arg), p, o.t_coherence, r);
        print_ler(p, r);
    }
    std::cout << "wrote " << csv << '\n';
    return 0;
}

int cmd_decode_bench(const std::string &arg, double p, std::size_t shots, const SimOptions &o,
                     const std::string &root, std::string name) {
    const PolySpec spec = load_spec(arg);
    const std::size_t rounds = o.rounds ? o.rounds : default_rounds(spec);
    NoiseParams np;
    np.p = p;
    np.t_coherence_s = o.t_coherence;
    np.basis = bases_for(o.basis).front();
    const MemoryExperiment e = build_memory_experiment(spec, np, rounds);
    const ShotBatch batch = sample(e.model, shots, o.seed);
    SplitDecoder dec(e.model, o.decoder);
    std::size_t failures = 0, osd = 0, nonconv = 0;
    const auto t0 = std::chrono::steady_clock::now();
    for (std::size_t s = 0; s < shots; ++s) {
        const auto row = batch.syndromes.row(s);
        const DecodeResult r = dec.decode(row);
        osd += r.used_osd;
        nonconv += !r.converged;
        for (std::size_t j = 0; j < e.model.num_observables; ++j) {
            if (r.predicted_observables[j] != batch.observable_flips.get(s, j)) {
                ++failures;
                break;
            }
        }
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (name.empty()) {
        name = spec_label(spec, arg);
    }
    const fs::path dir = fresh_dir(root, "decode-bench", name);
    json ov = sim_overrides(o, rounds);
    ov["p"] = p;
    ov["shots"] = shots;
    write_manifest(dir, "decode-bench", {arg}, o.seed, ov);
    auto f = open_out(dir / "bench.csv");
    f << "code,p,d,shots,failures,osd_calls,bp_nonconverged,mechanisms,seconds,us_per_shot,seed\n"
      << spec_label(spec, arg) << ',' << p << ',' << rounds << ',' << shots << ',' << failures << ',' << osd << ','
      << nonconv << ',' << e.model.mechanisms.size() << ',' << secs << ',' << (shots ? 1e6 * secs / shots : 0.0)
      << ',' << o.seed << '\n';
    std::cout << "shots=" << shots << " failures=" << failures << " osd=" << osd << " bp_nonconverged=" << nonconv
              << " us/shot=" << (shots ? 1e6 * secs / shots : 0.0) << "\nwrote " << (dir / "bench.csv").string()
              << '\n';
    return 0;
}

// compile ---------------------------------------------------------------------

void write_cost_csv(const fs::path &path, const std::string &mode, const CompiledProgram &cp) {
    auto f = open_out(path);
    f << "mode,space_qubits,time_s,spacetime_qubit_s,memory_qubit_s,ldst_qubit_s,compute_qubit_s,factory_qubit_s,"
         "cycles,ldst_ops\n"
      << mode << ',' << cp.cost.space_qubits << ',' << cp.cost.time_seconds << ',' << cp.cost.spacetime_qubit_seconds
      << ',' << cp.cost.breakdown.memory << ',' << cp.cost.breakdown.ldst << ',' << cp.cost.breakdown.compute << ','
      << cp.cost.breakdown.factory << ',' << cp.n_cycles << ',' << cp.n_ldst << '\n';
}

int cmd_compile(const std::string &prog_arg, const std::string &arch_file, bool baseline,
                const std::string &sweep_spec, const std::string &root, std::string name) {
    const Program prog = load_program(prog_arg);
    const ArchConfig arch = arch_file.empty() ? default_arch() : load_arch_config(arch_file);
    if (name.empty()) {
        name = fs::exists(prog_arg) ? fs::path(prog_arg).stem().string() : prog_arg;
    }
    std::vector<std::string> inputs{prog_arg};
    if (!arch_file.empty()) {
        inputs.push_back(arch_file);
    }
    const std::string mode = baseline ? "baseline" : "hierarchical";
    json ov{{"baseline", baseline}};

    if (!sweep_spec.empty()) {
        const auto eq = sweep_spec.find('=');
        if (eq == std::string::npos) {
            throw InputError("--sweep expects axis=values");
        }
        const SweepAxis axis = parse_sweep_axis(sweep_spec.substr(0, eq));
        const std::vector<double> values = parse_values(sweep_spec.substr(eq + 1));
        const auto rows = sweep(prog, arch, axis, values, baseline);
        const fs::path dir = fresh_dir(root, "compile", name + "-" + to_string(axis));
        ov["sweep"] = sweep_spec;
        write_manifest(dir, "compile", inputs, 0, ov);
        auto f = open_out(dir / "sweep.csv");
        write_sweep_csv(f, axis, rows);
        write_sweep_csv(std::cout, axis, rows);
        std::cout << "wrote " << (dir / "sweep.csv").string() << '\n';
        return 0;
    }

    const CompiledProgram cp = baseline ? compile_baseline(prog, arch) : compile(prog, arch);
    const fs::path dir = fresh_dir(root, "compile", name + "-" + mode);
    write_manifest(dir, "compile", inputs, 0, ov);
    open_out(dir / "timeline.json") << timeline_to_json(cp) << '\n';
    write_cost_csv(dir / "cost.csv", mode, cp);
    ArchConfig area_arch = arch;
    if (baseline) {
        area_arch.n_surface = prog.n_qubits;
    }
    const Footprint fp = footprint(area_arch, !baseline);
    std::cout << std::setprecision(6) << mode << ": qubits=" << cp.cost.space_qubits << " cycles=" << cp.n_cycles
              << " time_s=" << cp.cost.time_seconds << " spacetime_qubit_s=" << cp.cost.spacetime_qubit_seconds
              << " area_mm2=" << fp.total_mm2() << '\n'
              << "  breakdown qubit_s: memory=" << cp.cost.breakdown.memory << " ldst=" << cp.cost.breakdown.ldst
              << " compute=" << cp.cost.breakdown.compute << " factory=" << cp.cost.breakdown.factory << '\n'
              << "wrote " << dir.string() << '\n';
    return 0;
}

void add_sim_options(CLI::App *c, SimOptions &o) {
    c->add_option("--t-coherence", o.t_coherence, "coherence time T1 = T2 (s)")->capture_default_str();
    c->add_option("--rounds", o.rounds, "syndrome rounds (default: the spec's d)");
    c->add_option("--basis", o.basis, "memory basis: z, x or both (both reports the worse)")->capture_default_str();
    c->add_option("--min-errors", o.stop.min_errors, "stop after this many logical failures")->capture_default_str();
    c->add_option("--max-shots", o.stop.max_shots, "stop after this many shots")->capture_default_str();
    c->add_option("--batch", o.stop.batch_shots, "shots per batch")->capture_default_str();
    c->add_option("--threads", o.stop.threads, "worker threads (results do not depend on it)")
        ->capture_default_str();
    c->add_option("--max-iters", o.decoder.max_iters, "BP iterations")->capture_default_str();
    c->add_option("--osd-order", o.decoder.osd_order, "OSD combination order")->capture_default_str();
    c->add_option("--seed", o.seed, "RNG seed")->capture_default_str();
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"qmem: qLDPC memory construction, simulation and compilation"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kVersion);
    std::string root = "out";
    std::string name;
    app.add_option("--out", root, "output root directory")->capture_default_str();
    app.add_option("--name", name, "output directory name (default derived from the input)");

    int rc = 0;
    std::string spec_arg;

    auto *code = app.add_subcommand("code", "build a code and report n, k, weight, distance bound, steps/op");
    std::size_t trials = 200;
    std::uint64_t dseed = 1;
    code->add_option("spec", spec_arg, "spec file or catalog label such as [72,12,6]")->required();
    code->add_option("--trials", trials, "distance search permutations per logical type")->capture_default_str();
    code->add_option("--seed", dseed, "distance search seed")->capture_default_str();
    code->callback([&] { rc = cmd_code(spec_arg, trials, dseed); });

    auto *lay = app.add_subcommand("layout", "write atom positions as CSV");
    std::string variant = "collision-free";
    double spacing = 5.0;
    lay->add_option("spec", spec_arg, "spec file or catalog label")->required();
    lay->add_option("--variant", variant, "standard or collision-free")->capture_default_str();
    lay->add_option("--spacing", spacing, "site spacing (um)")->capture_default_str();
    lay->callback([&] { rc = cmd_layout(spec_arg, variant, spacing, root, name); });

    auto *sch = app.add_subcommand("schedule", "build, verify and export one round of check movement");
    std::string policy = "exhaustive";
    CostModel model;
    sch->add_option("spec", spec_arg, "spec file or catalog label")->required();
    sch->add_option("--variant", variant, "standard or collision-free")->capture_default_str();
    sch->add_option("--policy", policy, "exhaustive or sorted term order")->capture_default_str();
    sch->add_option("--spacing", model.spacing_um, "site spacing (um)")->capture_default_str();
    sch->add_option("--accel", model.accel_um_per_us2, "AOD acceleration (um/us^2)")->capture_default_str();
    sch->add_option("--round-constant", model.per_round_constant_us, "additive per-round time (us)")
        ->capture_default_str();
    sch->callback([&] { rc = cmd_schedule(spec_arg, variant, policy, model, root, name); });

    auto *ct = app.add_subcommand("cost-table", "round and cycle times per code (default: the catalog)");
    bool as_json = false;
    // Labels such as [72,12,6] would be split by vector option parsing, so
    // the spec list is taken from the extra arguments.
    ct->allow_extras();
    ct->footer("Positional arguments: spec files or catalog labels.");
    ct->add_option("--variant", variant, "standard or collision-free")->capture_default_str();
    ct->add_flag("--json", as_json, "machine-readable output");
    ct->callback([&] { rc = cmd_cost_table(ct->remaining(), variant, as_json); });

    SimOptions sim;
    double p = 1e-3;
    auto *simc = app.add_subcommand("simulate", "memory experiment: logical error rate per round");
    simc->add_option("spec", spec_arg, "spec file or catalog label")->required();
    simc->add_option("-p,--p", p, "physical error rate")->capture_default_str();
    add_sim_options(simc, sim);
    simc->callback([&] { rc = cmd_simulate(spec_arg, {p}, sim, root, name, "simulate"); });

    auto *sw = app.add_subcommand("sweep", "simulate over a list of physical error rates");
    std::string plist = "3e-3,1e-3,3e-4";
    sw->add_option("spec", spec_arg, "spec file or catalog label")->required();
    sw->add_option("--ps", plist, "comma list or start:stop:step of p values")->capture_default_str();
    add_sim_options(sw, sim);
    sw->callback([&] { rc = cmd_simulate(spec_arg, parse_values(plist), sim, root, name, "sweep"); });

    auto *db = app.add_subcommand("decode-bench", "decode sampled syndromes and report throughput");
    std::size_t shots = 1000;
    db->add_option("spec", spec_arg, "spec file or catalog label")->required();
    db->add_option("-p,--p", p, "physical error rate")->capture_default_str();
    db->add_option("--shots", shots, "shots to decode")->capture_default_str();
    add_sim_options(db, sim);
    db->callback([&] { rc = cmd_decode_bench(spec_arg, p, shots, sim, root, name); });

    auto *cc = app.add_subcommand("compile", "compile a program onto the hierarchical or baseline architecture");
    std::string prog_arg, arch_file, sweep_spec;
    bool baseline = false;
    cc->add_option("program", prog_arg, "program file or fixture (ghz:N, bv:N, adder:B, ising:N[:S])")->required();
    cc->add_option("--arch", arch_file, "architecture config file (default built in)");
    cc->add_flag("--baseline", baseline, "surface-code-only baseline");
    cc->add_option("--sweep", sweep_spec,
                   "axis=values with axis in ldst_multiplier, target_fidelity, n_blocks, n_surface, cnot_mode");
    cc->callback([&] { rc = cmd_compile(prog_arg, arch_file, baseline, sweep_spec, root, name); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int code_rc = app.exit(e);
        return code_rc == 0 ? 0 : 1;
    } catch (const ParseError &e) {
        std::cerr << "parse error: " << e.what() << '\n';
        return 1;
    } catch (const std::invalid_argument &e) {
        std::cerr << "input error: " << e.what() << '\n';
        return 1;
    } catch (const std::ios_base::failure &e) {
        std::cerr << "input error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception &e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return 2;
    }
    return rc;
}
