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
#include "qmem/compiler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include "json.hpp"
#include <sstream>
#include <stdexcept>
#include <tuple>

namespace qmem {

const char *to_string(OpKind k) {
    switch (k) {
        case OpKind::X:
            return "x";
        case OpKind::Y:
            return "y";
        case OpKind::Z:
            return "z";
        case OpKind::H:
            return "h";
        case OpKind::S:
            return "s";
        case OpKind::CNOT:
            return "cnot";
        case OpKind::T:
            return "t";
    }
    return "?";
}

const char *to_string(EventKind k) {
    switch (k) {
        case EventKind::Load:
            return "load";
        case EventKind::Store:
            return "store";
        case EventKind::Cnot:
            return "cnot";
        case EventKind::TInject:
            return "t";
        case EventKind::Clifford:
            return "clifford";
        case EventKind::Stall:
            return "stall";
    }
    return "?";
}

const char *to_string(StallCause c) {
    switch (c) {
        case StallCause::None:
            return "none";
        case StallCause::LoadStore:
            return "ldst";
        case StallCause::Routing:
            return "routing";
        case StallCause::Factory:
            return "factory";
        case StallCause::Serial:
            return "serial";
    }
    return "?";
}

void Program::validate() const {
    for (std::size_t i = 0; i < ops.size(); ++i) {
        const Op &op = ops[i];
        if (op.a >= n_qubits || (op.kind == OpKind::CNOT && op.b >= n_qubits)) {
            throw std::invalid_argument("program: op " + std::to_string(i) + " uses a qubit index >= n_qubits");
        }
        if (op.kind == OpKind::CNOT && op.a == op.b) {
            throw std::invalid_argument("program: op " + std::to_string(i) + " is a CNOT with equal operands");
        }
    }
}

std::size_t Program::count(OpKind k) const {
    return static_cast<std::size_t>(std::count_if(ops.begin(), ops.end(), [&](const Op &o) { return o.kind == k; }));
}

Program parse_program(std::istream &in) {
    Program prog;
    bool have_header = false;
    std::string line;
    std::size_t line_no = 0;
    static const std::map<std::string, OpKind> kinds = {{"x", OpKind::X}, {"y", OpKind::Y},   {"z", OpKind::Z},
                                                        {"h", OpKind::H}, {"s", OpKind::S},   {"t", OpKind::T},
                                                        {"cnot", OpKind::CNOT}};
    while (std::getline(in, line)) {
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string::npos) {
            line.resize(hash);
        }
        std::istringstream ls(line);
        std::string word;
        if (!(ls >> word)) {
            continue;
        }
        const std::size_t col = line.find(word) + 1;
        std::transform(word.begin(), word.end(), word.begin(), [](unsigned char c) { return std::tolower(c); });
        auto fail = [&](const std::string &msg, std::size_t at = 0) { throw ParseError(msg, line_no, at ? at : col); };
        // 1-based column of the k-th whitespace-separated token (k = 0 is the op).
        auto token_col = [&](std::size_t k) {
            std::size_t pos = 0;
            for (std::size_t i = 0;; ++i) {
                pos = line.find_first_not_of(" \t\r", pos);
                if (pos == std::string::npos) {
                    return col;
                }
                if (i == k) {
                    return pos + 1;
                }
                pos = line.find_first_of(" \t\r", pos);
            }
        };
        if (word == "qubits") {
            long long n = -1;
            if (have_header || !(ls >> n) || n < 0) {
                fail("expected a single 'qubits N' header");
            }
            prog.n_qubits = static_cast<std::size_t>(n);
            have_header = true;
        } else if (word == "meta") {
            std::string key;
            double v = 0;
            if (!(ls >> key >> v) || v < 0) {
                fail("expected 'meta n_rz V' or 'meta eps_rz V'");
            }
            if (key == "n_rz") {
                prog.n_rz = v;
            } else if (key == "eps_rz") {
                prog.eps_rz = v;
            } else {
                fail("unknown meta key '" + key + "'");
            }
        } else {
            auto it = kinds.find(word);
            if (it == kinds.end()) {
                fail("unknown operation '" + word + "'");
            }
            if (!have_header) {
                fail("operation before 'qubits N' header");
            }
            Op op{it->second, 0, 0};
            long long a = -1;
            long long b = -1;
            if (!(ls >> a) || a < 0 || (op.kind == OpKind::CNOT && (!(ls >> b) || b < 0))) {
                fail("malformed operands for '" + word + "'", token_col(1));
            }
            std::string extra;
            if (ls >> extra) {
                fail("trailing text after operands", token_col(op.kind == OpKind::CNOT ? 3 : 2));
            }
            op.a = static_cast<std::uint32_t>(a);
            op.b = static_cast<std::uint32_t>(std::max(b, 0LL));
            if (op.a >= prog.n_qubits) {
                fail("qubit index out of range", token_col(1));
            }
            if (op.kind == OpKind::CNOT && op.b >= prog.n_qubits) {
                fail("qubit index out of range", token_col(2));
            }
            if (op.kind == OpKind::CNOT && op.a == op.b) {
                fail("cnot operands must differ");
            }
            prog.ops.push_back(op);
        }
    }
    if (!have_header) {
        throw ParseError("missing 'qubits N' header", line_no + 1, 1);
    }
    return prog;
}

Program parse_program_text(const std::string &text) {
    std::istringstream in(text);
    return parse_program(in);
}

void write_program(std::ostream &out, const Program &prog) {
    out << "qubits " << prog.n_qubits << '\n';
    if (prog.n_rz > 0) {
        out << "meta n_rz " << prog.n_rz << '\n';
    }
    if (prog.eps_rz > 0) {
        out << "meta eps_rz " << prog.eps_rz << '\n';
    }
    for (const auto &op : prog.ops) {
        out << to_string(op.kind) << ' ' << op.a;
        if (op.kind == OpKind::CNOT) {
            out << ' ' << op.b;
        }
        out << '\n';
    }
}

namespace {

bool is_pauli(OpKind k) { return k == OpKind::X || k == OpKind::Y || k == OpKind::Z; }
bool is_two_qubit(OpKind k) { return k == OpKind::CNOT; }

// Dependency structure: each op waits for the previous op on each operand.
struct DepGraph {
    std::vector<std::vector<std::uint32_t>> succ;
    std::vector<std::uint32_t> n_pred;
    std::vector<std::size_t> level;
    std::vector<std::vector<std::uint32_t>> qubit_ops;
};

DepGraph build_deps(const Program &prog) {
    DepGraph g;
    const std::size_t n = prog.ops.size();
    g.succ.resize(n);
    g.n_pred.assign(n, 0);
    g.level.assign(n, 0);
    g.qubit_ops.resize(prog.n_qubits);
    std::vector<long> last(prog.n_qubits, -1);
    for (std::size_t i = 0; i < n; ++i) {
        const Op &op = prog.ops[i];
        std::vector<std::uint32_t> qs{op.a};
        if (is_two_qubit(op.kind)) {
            qs.push_back(op.b);
        }
        for (auto q : qs) {
            if (last[q] >= 0) {
                const auto p = static_cast<std::size_t>(last[q]);
                if (g.succ[p].empty() || g.succ[p].back() != i) {
                    g.succ[p].push_back(static_cast<std::uint32_t>(i));
                    ++g.n_pred[i];
                }
                g.level[i] = std::max(g.level[i], g.level[p] + 1);
            }
            last[q] = static_cast<long>(i);
            g.qubit_ops[q].push_back(static_cast<std::uint32_t>(i));
        }
    }
    return g;
}

}  // namespace

ProgramProfile profile(const Program &prog) {
    prog.validate();
    ProgramProfile pp;
    const DepGraph g = build_deps(prog);
    std::vector<std::vector<std::uint8_t>> touched;
    for (std::size_t i = 0; i < prog.ops.size(); ++i) {
        const std::size_t lv = g.level[i];
        if (touched.size() <= lv) {
            touched.resize(lv + 1, std::vector<std::uint8_t>(prog.n_qubits, 0));
        }
        touched[lv][prog.ops[i].a] = 1;
        if (is_two_qubit(prog.ops[i].kind)) {
            touched[lv][prog.ops[i].b] = 1;
        }
    }
    pp.depth = touched.size();
    double sum = 0;
    for (const auto &layer : touched) {
        const auto active = static_cast<double>(std::count(layer.begin(), layer.end(), 1));
        sum += (static_cast<double>(prog.n_qubits) - active) / active;
    }
    pp.serialization = touched.empty() ? 0 : sum / static_cast<double>(touched.size());
    const auto n_t = static_cast<double>(prog.count(OpKind::T));
    const auto n_cliff = static_cast<double>(prog.ops.size()) - n_t;
    pp.t_consumption = n_cliff > 0 ? n_t / n_cliff : (n_t > 0 ? std::numeric_limits<double>::infinity() : 0);
    return pp;
}

Assignment map_qubits(const Program &prog, std::size_t n_blocks, std::size_t capacity) {
    prog.validate();
    const std::size_t n = prog.n_qubits;
    if (n_blocks * capacity < n) {
        throw std::invalid_argument("map_qubits: " + std::to_string(n) + " qubits exceed " +
                                    std::to_string(n_blocks) + " blocks of capacity " + std::to_string(capacity));
    }
    std::vector<std::map<std::size_t, std::size_t>> w(n);
    for (const auto &op : prog.ops) {
        if (op.kind == OpKind::CNOT) {
            ++w[op.a][op.b];
            ++w[op.b][op.a];
        }
    }
    // Simplify.
    std::vector<std::uint8_t> removed(n, 0);
    std::vector<std::size_t> degree(n, 0);
    for (std::size_t v = 0; v < n; ++v) {
        for (const auto &[u, c] : w[v]) {
            degree[v] += c;
        }
    }
    std::vector<std::size_t> stack;
    for (std::size_t step = 0; step < n; ++step) {
        std::size_t pick = n;
        for (std::size_t v = 0; v < n; ++v) {
            if (!removed[v] && (pick == n || degree[v] < degree[pick])) {
                pick = v;
            }
        }
        removed[pick] = 1;
        stack.push_back(pick);
        for (const auto &[u, c] : w[pick]) {
            if (!removed[u]) {
                degree[u] -= c;
            }
        }
    }
    // Select.
    constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();
    Assignment color(n, kNone);
    std::vector<std::size_t> load(n_blocks, 0);
    while (!stack.empty()) {
        const std::size_t v = stack.back();
        stack.pop_back();
        std::size_t best = kNone;
        std::size_t best_cost = 0;
        for (std::size_t b = 0; b < n_blocks; ++b) {
            if (load[b] >= capacity) {
                continue;
            }
            std::size_t cost = 0;
            for (const auto &[u, c] : w[v]) {
                if (color[u] == b) {
                    cost += c;
                }
            }
            if (best == kNone || cost < best_cost || (cost == best_cost && load[b] < load[best])) {
                best = b;
                best_cost = cost;
            }
        }
        color[v] = best;
        ++load[best];
    }
    return color;
}

std::size_t monochromatic_weight(const Program &prog, const Assignment &assignment) {
    std::size_t total = 0;
    for (const auto &op : prog.ops) {
        if (op.kind == OpKind::CNOT && assignment.at(op.a) == assignment.at(op.b)) {
            ++total;
        }
    }
    return total;
}

namespace {

constexpr std::size_t kNever = std::numeric_limits<std::size_t>::max();

std::size_t cycles_for(double seconds, double cycle_s) {
    return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(seconds / cycle_s - 1e-9)));
}

class Scheduler {
  public:
    Scheduler(const Program &prog, const Assignment &assign, const ArchConfig &arch, bool hierarchical)
        : prog_(prog), assign_(assign), arch_(arch), hier_(hierarchical), deps_(build_deps(prog)) {
        costs_ = arch.costs();
        n_slots_ = hier_ ? arch.n_surface : prog.n_qubits;
        const double sc = arch.surface_cycle_s();
        load_len_ = cycles_for(static_cast<double>(costs_.load) * arch.ldst_cycle_s(), sc);
        store_len_ = cycles_for(static_cast<double>(costs_.store) * arch.ldst_cycle_s(), sc);
        if (hier_) {
            groups_ = ldst_groups(arch);
        }
        const std::size_t nq = prog.n_qubits;
        in_surface_.assign(nq, !hier_);
        slot_of_.assign(nq, -1);
        busy_until_.assign(nq, 0);
        ptr_.assign(nq, 0);
        slot_occ_.assign(n_slots_, -1);
        reserved_.assign(n_slots_, -1);
        if (!hier_) {
            for (std::size_t q = 0; q < nq; ++q) {
                slot_of_[q] = static_cast<long>(q);
                slot_occ_[q] = static_cast<long>(q);
            }
        }
        anc_busy_until_.assign(hier_ ? arch.n_blocks : 0, 0);
        corridor_until_.assign(n_slots_, 0);
        stock_.assign(arch.n_factories, 0);
        port_until_.assign(arch.n_factories, 0);
        for (std::size_t f = 0; f < arch.n_factories; ++f) {
            ports_.push_back(std::min(n_slots_ - 1, (2 * f + 1) * n_slots_ / (2 * arch.n_factories)));
        }
        pending_ = deps_.n_pred;
        state_.assign(prog.ops.size(), 0);
        end_.assign(prog.ops.size(), 0);
        for (std::size_t i = 0; i < prog.ops.size(); ++i) {
            if (pending_[i] == 0) {
                ready_.push_back(static_cast<std::uint32_t>(i));
            }
        }
    }

    CompiledProgram run() {
        CompiledProgram cp;
        cp.hierarchical = hier_;
        const std::size_t total = prog_.ops.size();
        std::size_t idle_cycles = 0;
        const std::size_t horizon = 1000 + 50 * (total + 1) * (load_len_ + store_len_ + costs_.cnot + costs_.t +
                                                               arch_.factory.cycles_per_state);
        for (std::size_t t = 0; done_ < total; ++t) {
            t_ = t;
            if (t > horizon) {
                deadlock();
            }
            const std::size_t before = progress_;
            retire();
            run_free_ops();
            if (hier_) {
                prefetch_loads();
                prefetch_stores();
            }
            bool compute_active = execute();
            run_free_ops();
            for (std::size_t i : running_) {
                compute_active = compute_active || end_[i] > t;
            }
            bool ldst_active = false;
            for (auto u : anc_busy_until_) {
                ldst_active = ldst_active || u > t;
            }
            waiting_.push_back(ldst_active && !compute_active ? 1 : 0);
            for (std::size_t f = 0; f < stock_.size(); ++f) {
                if ((t + 1) % arch_.factory.cycles_per_state == 0) {
                    ++stock_[f];
                }
            }
            const bool in_flight = compute_active || ldst_active;
            const bool factory_wait = std::any_of(ready_.begin(), ready_.end(), [&](std::uint32_t i) {
                return prog_.ops[i].kind == OpKind::T;
            });
            if (progress_ == before && !in_flight && !factory_wait) {
                if (++idle_cycles > 2) {
                    deadlock();
                }
            } else {
                idle_cycles = 0;
            }
        }
        std::size_t last = 0;
        for (std::size_t i = 0; i < total; ++i) {
            last = std::max(last, end_[i]);
        }
        cp.n_cycles = last;
        waiting_.resize(last, 0);
        cp.waiting_on_ldst = std::move(waiting_);
        for (auto &e : stalls_) {
            events_.push_back(e.second);
        }
        std::stable_sort(events_.begin(), events_.end(),
                         [](const Event &a, const Event &b) { return a.start < b.start; });
        cp.timeline = std::move(events_);
        cp.n_ldst = n_ldst_;
        return cp;
    }

  private:
    // Key of the next pending op of q; smaller is sooner.
    using Key = std::tuple<int, int, std::size_t, std::size_t>;

    long next_op(std::size_t q) const {
        const auto &ops = deps_.qubit_ops[q];
        return ptr_[q] < ops.size() ? static_cast<long>(ops[ptr_[q]]) : -1;
    }

    bool resident(std::size_t q) const { return in_surface_[q] && busy_until_[q] <= t_; }

    bool is_ready(std::size_t i) const { return state_[i] == 0 && pending_[i] == 0; }

    Key key(std::size_t q) const {
        const long i = next_op(q);
        if (i < 0) {
            return {2, 1, kNever, kNever};
        }
        const auto op = static_cast<std::size_t>(i);
        const Op &o = prog_.ops[op];
        int partner_resident = 1;
        if (o.kind == OpKind::CNOT) {
            const std::size_t other = o.a == q ? o.b : o.a;
            partner_resident = in_surface_[other] ? 0 : 1;
        }
        return {is_ready(op) ? 0 : 1, partner_resident, deps_.level[op], op};
    }

    bool needs_surface(std::size_t i) const { return !is_pauli(prog_.ops[i].kind); }

    void finish(std::size_t i, std::size_t end) {
        state_[i] = 2;
        end_[i] = end;
        ++done_;
        ++progress_;
        const Op &o = prog_.ops[i];
        ++ptr_[o.a];
        if (is_two_qubit(o.kind)) {
            ++ptr_[o.b];
        }
        for (auto s : deps_.succ[i]) {
            if (--pending_[s] == 0) {
                ready_.push_back(s);
            }
        }
    }

    void retire() {
        std::vector<std::size_t> still;
        for (std::size_t i : running_) {
            if (end_[i] <= t_) {
                finish(i, end_[i]);
            } else {
                still.push_back(i);
            }
        }
        running_ = std::move(still);
        for (auto it = transit_.begin(); it != transit_.end();) {
            if (it->until <= t_) {
                if (it->load) {
                    in_surface_[it->q] = true;
                } else {
                    slot_occ_[static_cast<std::size_t>(slot_of_[it->q])] = -1;
                    slot_of_[it->q] = -1;
                }
                ++progress_;
                it = transit_.erase(it);
            } else {
                ++it;
            }
        }
    }

    void sort_ready() { std::sort(ready_.begin(), ready_.end()); }

    // Paulis are frame updates; H and S take no cycles once resident.
    void run_free_ops() {
        bool changed = true;
        while (changed) {
            changed = false;
            sort_ready();
            for (std::size_t idx = 0; idx < ready_.size(); ++idx) {
                const std::size_t i = ready_[idx];
                const Op &o = prog_.ops[i];
                const bool free_op = is_pauli(o.kind) || ((o.kind == OpKind::H || o.kind == OpKind::S) && resident(o.a));
                if (!free_op) {
                    continue;
                }
                ready_.erase(ready_.begin() + static_cast<long>(idx));
                if (!is_pauli(o.kind)) {
                    events_.push_back({EventKind::Clifford, t_, 0, static_cast<long>(i), o.a, slot_of_[o.a], -1,
                                       StallCause::None});
                }
                finish(i, t_);
                changed = true;
                break;
            }
        }
    }

    // Lowest free slot reachable from block's ancilla; slots freed by a store
    // are held for the qubit the store made room for.
    long free_slot(std::size_t block, long for_qubit = -1) const {
        for (auto s : groups_[block]) {
            if (slot_occ_[s] < 0 && (reserved_[s] < 0 || reserved_[s] == for_qubit)) {
                return static_cast<long>(s);
            }
        }
        return -1;
    }

    void start_transit(std::size_t q, bool load, std::size_t slot) {
        const std::size_t b = assign_[q];
        const std::size_t len = load ? load_len_ : store_len_;
        anc_busy_until_[b] = t_ + len;
        busy_until_[q] = t_ + len;
        if (load) {
            slot_occ_[slot] = static_cast<long>(q);
            slot_of_[q] = static_cast<long>(slot);
        } else {
            in_surface_[q] = false;
        }
        transit_.push_back({q, load, t_ + len});
        events_.push_back({load ? EventKind::Load : EventKind::Store, t_, len, -1, static_cast<std::uint32_t>(q),
                           static_cast<long>(slot), static_cast<long>(b), StallCause::None});
        ++n_ldst_;
        ++progress_;
    }

    // Best memory-resident qubit of block b with work left.
    long best_in_memory(std::size_t b) const {
        long best = -1;
        for (std::size_t q = 0; q < prog_.n_qubits; ++q) {
            if (assign_[q] != b || in_surface_[q] || slot_of_[q] >= 0 || next_op(q) < 0) {
                continue;
            }
            if (best < 0 || key(q) < key(static_cast<std::size_t>(best))) {
                best = static_cast<long>(q);
            }
        }
        return best;
    }

    void prefetch_loads() {
        // Release reservations whose qubit no longer needs one.
        for (std::size_t sl = 0; sl < reserved_.size(); ++sl) {
            const long r = reserved_[sl];
            if (r >= 0 && (slot_of_[static_cast<std::size_t>(r)] >= 0 || next_op(static_cast<std::size_t>(r)) < 0)) {
                reserved_[sl] = -1;
            }
        }
        std::vector<std::pair<Key, std::size_t>> cand;
        for (std::size_t b = 0; b < groups_.size(); ++b) {
            if (anc_busy_until_[b] > t_) {
                continue;
            }
            // A qubit holding a reserved slot goes ahead of the block's queue.
            long q = -1;
            for (auto r : reserved_) {
                if (r >= 0 && assign_[static_cast<std::size_t>(r)] == b && !in_surface_[static_cast<std::size_t>(r)]) {
                    q = r;
                    break;
                }
            }
            if (q < 0) {
                q = best_in_memory(b);
            }
            if (q >= 0) {
                cand.emplace_back(key(static_cast<std::size_t>(q)), static_cast<std::size_t>(q));
            }
        }
        std::sort(cand.begin(), cand.end());
        for (const auto &[k, q] : cand) {
            const long s = free_slot(assign_[q], static_cast<long>(q));
            if (s >= 0) {
                reserved_[static_cast<std::size_t>(s)] = -1;
                start_transit(q, true, static_cast<std::size_t>(s));
            }
        }
    }

    bool holds_reservation(long q) const { return std::find(reserved_.begin(), reserved_.end(), q) != reserved_.end(); }

    bool active(std::size_t q) const {
        const long i = next_op(q);
        return i >= 0 && is_ready(static_cast<std::size_t>(i));
    }

    bool op_resident(std::size_t i) const {
        const Op &o = prog_.ops[i];
        return in_surface_[o.a] && (!is_two_qubit(o.kind) || in_surface_[o.b]);
    }

    // Next-use time of q without the residency preference; stable while no
    // op completes, so stores cannot oscillate.
    std::tuple<int, std::size_t, std::size_t> use_key(std::size_t q) const {
        const long i = next_op(q);
        if (i < 0) {
            return {2, kNever, kNever};
        }
        const auto op = static_cast<std::size_t>(i);
        return {is_ready(op) ? 0 : 1, deps_.level[op], op};
    }

    void prefetch_stores() {
        std::vector<std::pair<Key, std::size_t>> order;
        for (std::size_t b = 0; b < groups_.size(); ++b) {
            const long m = best_in_memory(b);
            if (m >= 0) {
                order.emplace_back(key(static_cast<std::size_t>(m)), b);
            }
        }
        std::sort(order.begin(), order.end());
        for (const auto &[km, b] : order) {
            const long m = best_in_memory(b);
            if (m < 0 || free_slot(b, m) >= 0 || holds_reservation(m)) {
                continue;
            }
            const auto mq = static_cast<std::size_t>(m);
            const auto m_op = static_cast<std::size_t>(next_op(mq));
            const Op &mo = prog_.ops[m_op];
            const bool m_cnot_tiebreak =
                is_ready(m_op) && mo.kind == OpKind::CNOT && in_surface_[mo.a == mq ? mo.b : mo.a];
            long victim = -1;
            for (auto s : groups_[b]) {
                const long r = slot_occ_[s];
                if (r < 0 || reserved_[s] >= 0) {
                    continue;
                }
                const auto rq = static_cast<std::size_t>(r);
                if (!resident(rq) || anc_busy_until_[assign_[rq]] > t_) {
                    continue;
                }
                bool eligible = false;
                if (!active(rq)) {
                    eligible = use_key(mq) < use_key(rq);
                } else if (m_cnot_tiebreak) {
                    // Make room for a CNOT whose partner is resident.
                    const auto r_op = static_cast<std::size_t>(next_op(rq));
                    eligible = !op_resident(r_op) && r_op != m_op && km < key(rq);
                }
                if (eligible && (victim < 0 || use_key(static_cast<std::size_t>(victim)) < use_key(rq))) {
                    victim = r;
                }
            }
            if (victim >= 0) {
                const auto v = static_cast<std::size_t>(victim);
                const auto sl = static_cast<std::size_t>(slot_of_[v]);
                start_transit(v, false, sl);
                reserved_[sl] = m;
            }
        }
    }

    void stall(std::size_t i, StallCause cause) {
        auto it = stalls_.find(i);
        if (it != stalls_.end() && it->second.cause == cause && it->second.start + it->second.length == t_) {
            ++it->second.length;
            return;
        }
        if (it != stalls_.end()) {
            events_.push_back(it->second);
            stalls_.erase(it);
        }
        stalls_.emplace(i, Event{EventKind::Stall, t_, 1, static_cast<long>(i), prog_.ops[i].a, -1, -1, cause});
    }

    void start_op(std::size_t i, std::size_t len, EventKind kind, long slot) {
        const Op &o = prog_.ops[i];
        state_[i] = 1;
        end_[i] = t_ + len;
        busy_until_[o.a] = t_ + len;
        if (is_two_qubit(o.kind)) {
            busy_until_[o.b] = t_ + len;
        }
        running_.push_back(i);
        events_.push_back({kind, t_, len, static_cast<long>(i), o.a, slot, -1, StallCause::None});
        ++progress_;
    }

    bool execute() {
        bool started = false;
        sort_ready();
        std::vector<std::uint32_t> keep;
        const bool ls = arch_.cnot_mode == CnotMode::LatticeSurgery;
        for (std::uint32_t i : ready_) {
            const Op &o = prog_.ops[i];
            const bool two = is_two_qubit(o.kind);
            if (!resident(o.a) || (two && !resident(o.b))) {
                stall(i, StallCause::LoadStore);
                keep.push_back(i);
                continue;
            }
            if (o.kind == OpKind::CNOT) {
                const std::size_t len = costs_.cnot;
                if (ls) {
                    auto lo = static_cast<std::size_t>(std::min(slot_of_[o.a], slot_of_[o.b]));
                    auto hi = static_cast<std::size_t>(std::max(slot_of_[o.a], slot_of_[o.b]));
                    bool free = true;
                    for (std::size_t c = lo; c <= hi; ++c) {
                        free = free && corridor_until_[c] <= t_;
                    }
                    if (!free) {
                        stall(i, StallCause::Routing);
                        keep.push_back(i);
                        continue;
                    }
                    for (std::size_t c = lo; c <= hi; ++c) {
                        corridor_until_[c] = t_ + len;
                    }
                } else {
                    if (serial_until_ > t_) {
                        stall(i, StallCause::Serial);
                        keep.push_back(i);
                        continue;
                    }
                    serial_until_ = t_ + len;
                }
                start_op(i, len, EventKind::Cnot, slot_of_[o.a]);
                started = true;
            } else if (o.kind == OpKind::T) {
                const std::size_t len = costs_.t;
                // Nearest factory port with a state; ties to the lowest index.
                long pick = -1;
                bool any_stock = false;
                const auto col = static_cast<std::size_t>(slot_of_[o.a]);
                for (std::size_t f = 0; f < stock_.size(); ++f) {
                    if (stock_[f] == 0) {
                        continue;
                    }
                    any_stock = true;
                    const bool port_free = ls ? (port_until_[f] <= t_ && corridor_until_[ports_[f]] <= t_)
                                              : serial_until_ <= t_;
                    if (!port_free) {
                        continue;
                    }
                    auto dist = [&](std::size_t g) {
                        return ports_[g] > col ? ports_[g] - col : col - ports_[g];
                    };
                    if (pick < 0 || dist(f) < dist(static_cast<std::size_t>(pick))) {
                        pick = static_cast<long>(f);
                    }
                }
                if (pick < 0) {
                    stall(i, !any_stock ? StallCause::Factory : (ls ? StallCause::Routing : StallCause::Serial));
                    keep.push_back(i);
                    continue;
                }
                const auto f = static_cast<std::size_t>(pick);
                --stock_[f];
                if (ls) {
                    port_until_[f] = t_ + len;
                    corridor_until_[ports_[f]] = t_ + len;
                } else {
                    serial_until_ = t_ + len;
                }
                start_op(i, len, EventKind::TInject, slot_of_[o.a]);
                started = true;
            } else {
                keep.push_back(i);  // H/S waiting on a busy qubit
            }
        }
        ready_ = std::move(keep);
        return started;
    }

    [[noreturn]] void deadlock() const {
        std::ostringstream msg;
        msg << "compiler deadlock at cycle " << t_ << "; blocked ops:";
        for (auto i : ready_) {
            const Op &o = prog_.ops[i];
            msg << ' ' << i << ':' << to_string(o.kind) << '(' << o.a;
            if (is_two_qubit(o.kind)) {
                msg << ',' << o.b;
            }
            msg << ')';
        }
        msg << "; slots:";
        for (std::size_t sl = 0; sl < slot_occ_.size(); ++sl) {
            msg << ' ' << sl << '=' << slot_occ_[sl];
            if (!reserved_.empty() && reserved_[sl] >= 0) {
                msg << "(held for " << reserved_[sl] << ')';
            }
        }
        throw std::runtime_error(msg.str());
    }

    struct Transit {
        std::size_t q;
        bool load;
        std::size_t until;
    };

    const Program &prog_;
    const Assignment &assign_;
    const ArchConfig &arch_;
    bool hier_;
    DepGraph deps_;
    GateCostTable costs_;
    std::size_t n_slots_ = 0;
    std::size_t load_len_ = 1;
    std::size_t store_len_ = 1;
    std::vector<std::vector<std::size_t>> groups_;

    std::size_t t_ = 0;
    std::vector<bool> in_surface_;
    std::vector<long> slot_of_;
    std::vector<std::size_t> busy_until_;
    std::vector<std::size_t> ptr_;
    std::vector<long> slot_occ_;
    std::vector<long> reserved_;
    std::vector<std::size_t> anc_busy_until_;
    std::vector<std::size_t> corridor_until_;
    std::vector<std::size_t> stock_;
    std::vector<std::size_t> port_until_;
    std::vector<std::size_t> ports_;
    std::size_t serial_until_ = 0;

    std::vector<std::uint32_t> pending_;
    std::vector<std::uint8_t> state_;
    std::vector<std::size_t> end_;
    std::vector<std::uint32_t> ready_;
    std::vector<std::size_t> running_;
    std::vector<Transit> transit_;
    std::size_t done_ = 0;
    std::size_t progress_ = 0;
    std::size_t n_ldst_ = 0;
    std::vector<Event> events_;
    std::map<std::size_t, Event> stalls_;
    std::vector<std::uint8_t> waiting_;
};

}  // namespace

CompiledProgram schedule(const Program &prog, const Assignment &assignment, const ArchConfig &arch) {
    prog.validate();
    arch.validate(true);
    if (assignment.size() != prog.n_qubits) {
        throw std::invalid_argument("schedule: assignment size does not match qubit count");
    }
    std::vector<std::size_t> per_block(arch.n_blocks, 0);
    for (auto b : assignment) {
        if (b >= arch.n_blocks) {
            throw std::invalid_argument("schedule: assignment references a missing block");
        }
        if (++per_block[b] > arch.memory_k) {
            throw std::invalid_argument("schedule: block capacity exceeded");
        }
    }
    CompiledProgram cp = Scheduler(prog, assignment, arch, true).run();
    cp.cost = cost_report(cp, arch, prog.n_qubits);
    return cp;
}

CompiledProgram compile(const Program &prog, const ArchConfig &arch) {
    return schedule(prog, map_qubits(prog, arch.n_blocks, arch.memory_k), arch);
}

CompiledProgram compile_baseline(const Program &prog, const ArchConfig &arch) {
    prog.validate();
    ArchConfig base = arch;
    base.n_surface = std::max<std::size_t>(1, prog.n_qubits);
    base.validate(false);
    const Assignment none(prog.n_qubits, 0);
    CompiledProgram cp = Scheduler(prog, none, base, false).run();
    cp.cost = cost_report(cp, arch, prog.n_qubits);
    return cp;
}

CostReport cost_report(const CompiledProgram &cp, const ArchConfig &arch, std::size_t n_qubits) {
    ArchConfig a = arch;
    if (!cp.hierarchical) {
        a.n_surface = std::max<std::size_t>(1, n_qubits);
    }
    CostReport r;
    r.space_qubits = footprint(a, cp.hierarchical).total_qubits;
    const double dt = a.surface_cycle_s();
    const auto compute_q = static_cast<double>((a.n_surface + a.routing_patches()) * a.surface_qubits());
    const auto factory_q = static_cast<double>(a.n_factories * a.factory.qubit_cost);
    const double memory_q = cp.hierarchical ? static_cast<double>(a.n_blocks * a.memory_block_qubits()) : 0.0;
    const double ldst_q = cp.hierarchical ? static_cast<double>(a.n_blocks * a.ldst_qubits()) : 0.0;
    std::size_t waiting = 0;
    for (std::size_t t = 0; t < cp.n_cycles; ++t) {
        waiting += t < cp.waiting_on_ldst.size() && cp.waiting_on_ldst[t] ? 1 : 0;
    }
    const auto cycles = static_cast<double>(cp.n_cycles);
    r.breakdown.memory = memory_q * cycles * dt;
    r.breakdown.factory = factory_q * cycles * dt;
    r.breakdown.ldst = (ldst_q * cycles + compute_q * static_cast<double>(waiting)) * dt;
    r.breakdown.compute = compute_q * static_cast<double>(cp.n_cycles - waiting) * dt;
    r.time_seconds = cycles * dt;
    r.spacetime_qubit_seconds = r.breakdown.total();
    return r;
}

SweepAxis parse_sweep_axis(const std::string &name) {
    if (name == "ldst_multiplier") {
        return SweepAxis::LdstMultiplier;
    }
    if (name == "target_fidelity") {
        return SweepAxis::TargetFidelity;
    }
    if (name == "n_blocks") {
        return SweepAxis::NBlocks;
    }
    if (name == "n_surface") {
        return SweepAxis::NSurface;
    }
    if (name == "cnot_mode") {
        return SweepAxis::CnotMode;
    }
    throw std::invalid_argument("unknown sweep axis '" + name + "'");
}

const char *to_string(SweepAxis a) {
    switch (a) {
        case SweepAxis::LdstMultiplier:
            return "ldst_multiplier";
        case SweepAxis::TargetFidelity:
            return "target_fidelity";
        case SweepAxis::NBlocks:
            return "n_blocks";
        case SweepAxis::NSurface:
            return "n_surface";
        case SweepAxis::CnotMode:
            return "cnot_mode";
    }
    return "?";
}

std::vector<SweepRow> sweep(const Program &prog, const ArchConfig &arch, SweepAxis axis,
                            const std::vector<double> &values, bool baseline) {
    std::vector<SweepRow> rows;
    for (double v : values) {
        ArchConfig a = arch;
        switch (axis) {
            case SweepAxis::LdstMultiplier:
                a.ldst_multiplier = v;
                break;
            case SweepAxis::NBlocks:
                a.n_blocks = static_cast<std::size_t>(std::llround(v));
                break;
            case SweepAxis::NSurface:
                a.n_surface = static_cast<std::size_t>(std::llround(v));
                break;
            case SweepAxis::CnotMode:
                a.cnot_mode = v == 0 ? CnotMode::LatticeSurgery : CnotMode::Transversal;
                break;
            case SweepAxis::TargetFidelity: {
                // Size the distance from a first compile at the configured one.
                const CompiledProgram first = baseline ? compile_baseline(prog, a) : compile(prog, a);
                ResourceDemand dem;
                dem.n_qubits = prog.n_qubits;
                dem.n_cycles = static_cast<double>(first.n_cycles);
                dem.n_ldst = static_cast<double>(first.n_ldst);
                dem.n_rz = prog.n_rz;
                dem.eps_rz = prog.eps_rz;
                dem.n_t = static_cast<double>(prog.count(OpKind::T));
                dem.n_surface = baseline ? prog.n_qubits : a.n_surface;
                std::vector<MemoryCalibration> mems = default_memory_calibration();
                mems.push_back({"configured", a.memory_n, a.memory_k, a.memory_d, 1e-3, a.eps_mem});
                const ResourceChoice c = select_resources(dem, v, 1e-3, mems, default_factory_catalog());
                a.surface_d = c.surface_d;
                a.ldst_d = c.surface_d;
                a.factory = c.factory;
                break;
            }
        }
        const CompiledProgram cp = baseline ? compile_baseline(prog, a) : compile(prog, a);
        rows.push_back({v, cp.cost, cp.n_cycles});
    }
    return rows;
}

void write_sweep_csv(std::ostream &out, SweepAxis axis, const std::vector<SweepRow> &rows) {
    out << to_string(axis)
        << ",space_qubits,time_s,spacetime_qubit_s,memory_qubit_s,ldst_qubit_s,compute_qubit_s,factory_qubit_s,"
           "cycles\n";
    out.precision(10);
    for (const auto &r : rows) {
        out << r.value << ',' << r.cost.space_qubits << ',' << r.cost.time_seconds << ','
            << r.cost.spacetime_qubit_seconds << ',' << r.cost.breakdown.memory << ',' << r.cost.breakdown.ldst << ','
            << r.cost.breakdown.compute << ',' << r.cost.breakdown.factory << ',' << r.n_cycles << '\n';
    }
}

std::string timeline_to_json(const CompiledProgram &cp) {
    nlohmann::json j;
    j["hierarchical"] = cp.hierarchical;
    j["cycles"] = cp.n_cycles;
    j["ldst_ops"] = cp.n_ldst;
    auto &ev = j["events"] = nlohmann::json::array();
    for (const auto &e : cp.timeline) {
        nlohmann::json o{{"kind", to_string(e.kind)}, {"start", e.start}, {"length", e.length}, {"qubit", e.qubit}};
        if (e.op >= 0) {
            o["op"] = e.op;
        }
        if (e.slot >= 0) {
            o["slot"] = e.slot;
        }
        if (e.block >= 0) {
            o["block"] = e.block;
        }
        if (e.kind == EventKind::Stall) {
            o["cause"] = to_string(e.cause);
        }
        ev.push_back(std::move(o));
    }
    return j.dump(1);
}

Program ghz_program(std::size_t n) {
    Program p;
    p.n_qubits = n;
    if (n == 0) {
        return p;
    }
    p.ops.push_back({OpKind::H, 0, 0});
    for (std::size_t i = 0; i + 1 < n; ++i) {
        p.ops.push_back({OpKind::CNOT, static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(i + 1)});
    }
    return p;
}

Program bv_program(std::size_t n) {
    if (n < 2) {
        throw std::invalid_argument("bv_program: need at least 2 qubits");
    }
    Program p;
    p.n_qubits = n;
    const auto anc = static_cast<std::uint32_t>(n - 1);
    p.ops.push_back({OpKind::X, anc, 0});
    for (std::uint32_t q = 0; q < n; ++q) {
        p.ops.push_back({OpKind::H, q, 0});
    }
    for (std::uint32_t q = 0; q < anc; ++q) {
        p.ops.push_back({OpKind::CNOT, q, anc});
    }
    for (std::uint32_t q = 0; q < anc; ++q) {
        p.ops.push_back({OpKind::H, q, 0});
    }
    return p;
}

namespace {

void push_tdg(Program &p, std::uint32_t q) {
    p.ops.push_back({OpKind::Z, q, 0});
    p.ops.push_back({OpKind::S, q, 0});
    p.ops.push_back({OpKind::T, q, 0});
}

// Standard 7-T Toffoli with target c.
void push_toffoli(Program &p, std::uint32_t a, std::uint32_t b, std::uint32_t c) {
    auto cx = [&](std::uint32_t x, std::uint32_t y) { p.ops.push_back({OpKind::CNOT, x, y}); };
    auto t = [&](std::uint32_t x) { p.ops.push_back({OpKind::T, x, 0}); };
    p.ops.push_back({OpKind::H, c, 0});
    cx(b, c);
    push_tdg(p, c);
    cx(a, c);
    t(c);
    cx(b, c);
    push_tdg(p, c);
    cx(a, c);
    t(b);
    t(c);
    p.ops.push_back({OpKind::H, c, 0});
    cx(a, b);
    t(a);
    push_tdg(p, b);
    cx(a, b);
}

}  // namespace

Program adder_program(std::size_t bits) {
    if (bits < 1) {
        throw std::invalid_argument("adder_program: need at least 1 bit");
    }
    // Ripple-carry: carry-in c, a_i, b_i interleaved, carry-out z.
    Program p;
    p.n_qubits = 2 * bits + 2;
    const auto c0 = 0U;
    auto a = [](std::size_t i) { return static_cast<std::uint32_t>(1 + 2 * i); };
    auto b = [](std::size_t i) { return static_cast<std::uint32_t>(2 + 2 * i); };
    const auto z = static_cast<std::uint32_t>(2 * bits + 1);
    auto cx = [&](std::uint32_t x, std::uint32_t y) { p.ops.push_back({OpKind::CNOT, x, y}); };
    auto maj = [&](std::uint32_t c, std::uint32_t bb, std::uint32_t aa) {
        cx(aa, bb);
        cx(aa, c);
        push_toffoli(p, c, bb, aa);
    };
    auto uma = [&](std::uint32_t c, std::uint32_t bb, std::uint32_t aa) {
        push_toffoli(p, c, bb, aa);
        cx(aa, c);
        cx(c, bb);
    };
    maj(c0, b(0), a(0));
    for (std::size_t i = 1; i < bits; ++i) {
        maj(a(i - 1), b(i), a(i));
    }
    cx(a(bits - 1), z);
    for (std::size_t i = bits - 1; i >= 1; --i) {
        uma(a(i - 1), b(i), a(i));
    }
    uma(c0, b(0), a(0));
    return p;
}

Program ising_program(std::size_t n, std::size_t steps, std::size_t t_per_rz) {
    if (n < 2) {
        throw std::invalid_argument("ising_program: need at least 2 qubits");
    }
    Program p;
    p.n_qubits = n;
    p.eps_rz = 1e-10;
    auto rz = [&](std::uint32_t q) {
        for (std::size_t j = 0; j < t_per_rz; ++j) {
            p.ops.push_back({OpKind::T, q, 0});
            p.ops.push_back({OpKind::H, q, 0});
        }
        p.n_rz += 1;
    };
    for (std::size_t s = 0; s < steps; ++s) {
        for (std::uint32_t i = 0; i + 1 < n; ++i) {
            p.ops.push_back({OpKind::CNOT, i, i + 1});
            rz(i + 1);
            p.ops.push_back({OpKind::CNOT, i, i + 1});
        }
        for (std::uint32_t i = 0; i < n; ++i) {
            p.ops.push_back({OpKind::H, i, 0});
            rz(i);
            p.ops.push_back({OpKind::H, i, 0});
        }
    }
    return p;
}

}  // namespace qmem
