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

#include "qmem/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "json.hpp"

namespace qmem {

double move_time(double dx_um, double dy_um, const CostModel &model) {
    if (dx_um < 0 || dy_um < 0) {
        throw std::invalid_argument("move_time: leg lengths must be non-negative");
    }
    return std::sqrt(6.0 * dx_um / model.accel_um_per_us2) + std::sqrt(6.0 * dy_um / model.accel_um_per_us2);
}

std::vector<double> MovementSchedule::per_step_times() const {
    std::vector<double> out;
    out.reserve(steps.size());
    for (const auto &s : steps) {
        out.push_back(s.duration_us);
    }
    return out;
}

std::size_t MovementSchedule::pulse_count() const {
    return static_cast<std::size_t>(std::count_if(steps.begin(), steps.end(), [](const ScheduleStep &s) {
        return std::holds_alternative<PulseStep>(s.action);
    }));
}

namespace {

constexpr std::size_t kMaxExhaustivePhase = 10;
constexpr double kTieEps = 1e-9;

struct PulseNode {
    PolyTerm term;
    DataBlock block;
    GridPos offset;
    bool periodic;
    GridPos site_delta;  // device displacement of the check grid from home
    double billed_row;   // travel coordinates used for timing (sites)
    double billed_col;
};

struct Point {
    double row = 0;
    double col = 0;
};

double leg_time(Point from, Point to, const CostModel &model) {
    return move_time(std::abs(to.col - from.col) * model.spacing_um, std::abs(to.row - from.row) * model.spacing_um,
                     model);
}

QubitGroup block_group(DataBlock b) { return b == DataBlock::A ? QubitGroup::DataA : QubitGroup::DataB; }
QubitGroup check_group(CheckType t) { return t == CheckType::X ? QubitGroup::CheckX : QubitGroup::CheckZ; }

std::vector<std::pair<std::size_t, std::size_t>> geometric_pairs(const LayoutMap &layout, CheckType type,
                                                                 GridPos delta, DataBlock block) {
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    const QubitGroup cg = check_group(type);
    const QubitGroup dg = block_group(block);
    for (std::size_t i = 0; i < layout.group_size(); ++i) {
        const GridPos site = layout.position(cg, i) + delta;
        const long d = layout.data_at(dg, site);
        if (d >= 0) {
            pairs.emplace_back(layout.qubit_id(cg, i), layout.qubit_id(dg, static_cast<std::size_t>(d)));
        }
    }
    return pairs;
}

// Orders the nodes of one half. Returns indices into `nodes`; phase 1 nodes
// are [0, n1), phase 2 nodes [n1, n).
std::vector<std::size_t> order_half(const std::vector<PulseNode> &nodes, std::size_t n1, const CostModel &model,
                                    OrderPolicy policy, bool &exhaustive) {
    const std::size_t n = nodes.size();
    const std::size_t n2 = n - n1;
    std::vector<std::size_t> seq(n);
    std::iota(seq.begin(), seq.end(), 0);
    if (policy == OrderPolicy::SortedHeuristic || n1 > kMaxExhaustivePhase || n2 > kMaxExhaustivePhase) {
        if (policy == OrderPolicy::Exhaustive) {
            exhaustive = false;
        }
        auto key = [&](std::size_t i) { return nodes[i].term.p + nodes[i].term.q; };
        std::stable_sort(seq.begin(), seq.begin() + static_cast<std::ptrdiff_t>(n1),
                         [&](std::size_t x, std::size_t y) { return key(x) < key(y); });
        std::stable_sort(seq.begin() + static_cast<std::ptrdiff_t>(n1), seq.end(),
                         [&](std::size_t x, std::size_t y) { return key(x) < key(y); });
        return seq;
    }

    // Leg times between home (index n) and every node.
    std::vector<Point> pts(n + 1);
    for (std::size_t i = 0; i < n; ++i) {
        pts[i] = {nodes[i].billed_row, nodes[i].billed_col};
    }
    std::vector<double> t((n + 1) * (n + 1));
    for (std::size_t i = 0; i <= n; ++i) {
        for (std::size_t j = 0; j <= n; ++j) {
            t[i * (n + 1) + j] = leg_time(pts[i], pts[j], model);
        }
    }
    auto leg = [&](std::size_t i, std::size_t j) { return t[i * (n + 1) + j]; };
    const std::size_t home = n;

    // Best phase-2 completion (through every periodic node, then home) from
    // each possible phase-1 endpoint.
    std::vector<double> tail_cost(n1, std::numeric_limits<double>::infinity());
    std::vector<std::vector<std::size_t>> tail_order(n1);
    std::vector<std::size_t> p2(n2);
    std::iota(p2.begin(), p2.end(), n1);
    for (std::size_t s = 0; s < n1; ++s) {
        std::vector<std::size_t> perm = p2;
        do {
            double c = 0;
            std::size_t prev = s;
            for (std::size_t v : perm) {
                c += leg(prev, v);
                prev = v;
            }
            c += leg(prev, home);
            if (c < tail_cost[s] - kTieEps) {
                tail_cost[s] = c;
                tail_order[s] = perm;
            }
        } while (std::next_permutation(perm.begin(), perm.end()));
    }

    std::vector<std::size_t> perm(n1);
    std::iota(perm.begin(), perm.end(), 0);
    double best = std::numeric_limits<double>::infinity();
    std::vector<std::size_t> best_seq;
    do {
        double c = 0;
        std::size_t prev = home;
        for (std::size_t v : perm) {
            c += leg(prev, v);
            prev = v;
        }
        c += tail_cost[prev];
        if (c < best - kTieEps) {
            best = c;
            best_seq = perm;
            best_seq.insert(best_seq.end(), tail_order[prev].begin(), tail_order[prev].end());
        }
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best_seq;
}

double emit_half(const PolySpec &spec, const LayoutMap &layout, const CostModel &model, CheckType type,
                 OrderPolicy policy, MovementSchedule &out) {
    const QubitGroup home_group = check_group(type);
    const GridPos home = layout.offset(home_group);
    const double realign = model.realign_for(layout.variant);

    std::vector<PulseNode> phase1;
    std::vector<PulseNode> phase2;
    for (DataBlock block : {DataBlock::A, DataBlock::B}) {
        const GridPos align = layout.offset(block_group(block)) - home;
        for (const auto &term : block_terms(spec, type, block)) {
            const auto offsets = check_offsets(term, type, spec.l, spec.m);
            for (std::size_t v = 0; v < offsets.size(); ++v) {
                const GridPos delta = align + offsets[v] * kInterleave;
                PulseNode node{term,
                               block,
                               offsets[v],
                               v > 0,
                               delta,
                               align.row * realign + offsets[v].row * kInterleave,
                               align.col * realign + offsets[v].col * kInterleave};
                (v == 0 ? phase1 : phase2).push_back(node);
            }
        }
    }
    std::vector<PulseNode> nodes = phase1;
    nodes.insert(nodes.end(), phase2.begin(), phase2.end());
    const std::vector<std::size_t> order = order_half(nodes, phase1.size(), model, policy, out.exhaustive);

    double total = 0;
    auto push = [&](ScheduleStep s) {
        total += s.duration_us;
        out.steps.push_back(std::move(s));
    };
    push({TransferStep{type, TrapKind::AOD}, model.transfer_time_us});
    GridPos at{0, 0};
    Point billed{0, 0};
    auto move_to = [&](GridPos target, Point target_billed) {
        if (target == at) {
            return;
        }
        MoveStep mv{type, target - at, std::abs(target_billed.col - billed.col) * model.spacing_um,
                    std::abs(target_billed.row - billed.row) * model.spacing_um};
        const double dur = move_time(mv.billed_dx_um, mv.billed_dy_um, model);
        push({mv, dur});
        at = target;
        billed = target_billed;
    };
    for (std::size_t idx : order) {
        const PulseNode &node = nodes[idx];
        move_to(node.site_delta, {node.billed_row, node.billed_col});
        PulseStep pulse{type, node.term, node.block, node.offset, node.periodic,
                        geometric_pairs(layout, type, node.site_delta, node.block)};
        for (std::size_t i = 0; i < pulse.pairs.size(); ++i) {
            for (std::size_t j = i + 1; j < pulse.pairs.size(); ++j) {
                if (pulse.pairs[i].first == pulse.pairs[j].first) {
                    throw std::logic_error("schedule_round: a pulse pairs one check with two data atoms");
                }
            }
        }
        push({std::move(pulse), model.gate_time_us});
    }
    move_to({0, 0}, {0, 0});
    push({TransferStep{type, TrapKind::SLM}, model.transfer_time_us});
    return total;
}

}  // namespace

MovementSchedule schedule_round(const PolySpec &spec, const LayoutMap &layout, const CostModel &model,
                                OrderPolicy policy) {
    spec.validate();
    if (layout.l != spec.l || layout.m != spec.m) {
        throw std::invalid_argument("schedule_round: layout does not match spec");
    }
    MovementSchedule sched;
    sched.x_half_us = emit_half(spec, layout, model, CheckType::X, policy, sched);
    sched.z_half_us = emit_half(spec, layout, model, CheckType::Z, policy, sched);
    sched.round_time_us = sched.x_half_us + sched.z_half_us + model.per_round_constant_us;
    return sched;
}

double cycle_time(const MovementSchedule &sched, int rounds) {
    if (rounds < 1) {
        throw std::invalid_argument("cycle_time: rounds must be >= 1");
    }
    return sched.round_time_us * rounds;
}

VerifyReport verify_schedule(const MovementSchedule &sched, const CssCode &code, const LayoutMap &layout) {
    const std::size_t lm = layout.group_size();
    if (code.n != 2 * lm) {
        return {false, 'a', 0, "code and layout sizes differ"};
    }
    std::vector<VerifyReport> failures;  // first failure per assertion
    auto fail = [&](char which, std::size_t step, std::string msg) {
        for (const auto &f : failures) {
            if (f.assertion == which) {
                return;
            }
        }
        failures.push_back({false, which, step, std::move(msg)});
    };

    std::vector<int> cover_x(lm * 2 * lm, 0);
    std::vector<int> cover_z(lm * 2 * lm, 0);
    GridPos delta[2] = {{0, 0}, {0, 0}};
    bool in_aod[2] = {false, false};
    bool seen_periodic[2] = {false, false};
    auto data_col = [&](std::size_t data_id) { return data_id; };  // A then B, same as code columns

    for (std::size_t s = 0; s < sched.steps.size(); ++s) {
        const auto &action = sched.steps[s].action;
        if (const auto *tr = std::get_if<TransferStep>(&action)) {
            const int g = tr->group == CheckType::X ? 0 : 1;
            if (tr->to == TrapKind::AOD) {
                in_aod[g] = true;
                seen_periodic[g] = false;
            } else {
                if (delta[g] != GridPos{0, 0}) {
                    fail('c', s, "check grid not at home when returned to SLM");
                }
                in_aod[g] = false;
            }
        } else if (const auto *mv = std::get_if<MoveStep>(&action)) {
            const int g = mv->group == CheckType::X ? 0 : 1;
            if (!in_aod[g]) {
                fail('c', s, "move of a check grid held in SLM");
            }
            delta[g] = delta[g] + mv->delta;
        } else if (const auto *pu = std::get_if<PulseStep>(&action)) {
            const int g = pu->group == CheckType::X ? 0 : 1;
            if (pu->periodic) {
                seen_periodic[g] = true;
            } else if (seen_periodic[g]) {
                fail('c', s, "non-periodic pulse after a periodic pulse");
            }
            const QubitGroup cg = pu->group == CheckType::X ? QubitGroup::CheckX : QubitGroup::CheckZ;
            const BitMatrix &checks = pu->group == CheckType::X ? code.gx : code.gz;
            auto &cover = pu->group == CheckType::X ? cover_x : cover_z;
            for (std::size_t i = 0; i < lm; ++i) {
                const std::size_t check_id = layout.qubit_id(cg, i);
                const GridPos site = layout.position(cg, i) + delta[g];
                long partner = -1;
                for (QubitGroup dg : {QubitGroup::DataA, QubitGroup::DataB}) {
                    const long d = layout.data_at(dg, site);
                    if (d >= 0) {
                        partner = static_cast<long>(layout.qubit_id(dg, static_cast<std::size_t>(d)));
                    }
                }
                const bool inside = site.row >= 0 && site.row < layout.region_rows() && site.col >= 0 &&
                                    site.col < layout.region_cols();
                const auto rec = std::find_if(pu->pairs.begin(), pu->pairs.end(),
                                              [&](const auto &p) { return p.first == check_id; });
                if (partner < 0) {
                    if (inside) {
                        fail('b', s, "check " + std::to_string(check_id) + " inside the data region without a partner");
                    }
                    if (rec != pu->pairs.end()) {
                        fail('b', s, "recorded pair for check " + std::to_string(check_id) + " is not adjacent");
                    }
                    continue;
                }
                if (rec == pu->pairs.end() || rec->second != static_cast<std::size_t>(partner)) {
                    fail('b', s, "check " + std::to_string(check_id) + " meets data " + std::to_string(partner) +
                                     " which is not its recorded partner");
                }
                const std::size_t col = data_col(static_cast<std::size_t>(partner));
                if (!checks.get(i, col)) {
                    fail('a', s, "pulse realizes pair (" + std::to_string(i) + ", " + std::to_string(col) +
                                     ") absent from the check matrix");
                } else if (++cover[i * 2 * lm + col] > 1) {
                    fail('a', s, "pair (" + std::to_string(i) + ", " + std::to_string(col) + ") realized twice");
                }
            }
        }
    }
    for (int g = 0; g < 2; ++g) {
        if (in_aod[g] || delta[g] != GridPos{0, 0}) {
            fail('c', sched.steps.size(), "check grid did not return home");
        }
    }
    for (int t = 0; t < 2; ++t) {
        const BitMatrix &checks = t == 0 ? code.gx : code.gz;
        const auto &cover = t == 0 ? cover_x : cover_z;
        for (std::size_t i = 0; i < lm; ++i) {
            for (std::size_t c : checks.row_support(i)) {
                if (cover[i * 2 * lm + c] == 0) {
                    fail('a', sched.steps.size(),
                         std::string(t == 0 ? "X" : "Z") + " check entry (" + std::to_string(i) + ", " +
                             std::to_string(c) + ") never realized");
                    break;
                }
            }
        }
    }
    if (failures.empty()) {
        return {};
    }
    std::sort(failures.begin(), failures.end(),
              [](const VerifyReport &x, const VerifyReport &y) { return x.assertion < y.assertion; });
    return failures.front();
}

std::string schedule_to_json(const MovementSchedule &sched, const LayoutMap &layout) {
    using nlohmann::json;
    json steps = json::array();
    for (const auto &s : sched.steps) {
        json j;
        if (const auto *mv = std::get_if<MoveStep>(&s.action)) {
            j = {{"kind", "move"},
                 {"group", mv->group == CheckType::X ? "X" : "Z"},
                 {"d_row_sites", mv->delta.row},
                 {"d_col_sites", mv->delta.col},
                 {"billed_dx_um", mv->billed_dx_um},
                 {"billed_dy_um", mv->billed_dy_um}};
        } else if (const auto *pu = std::get_if<PulseStep>(&s.action)) {
            json pairs = json::array();
            for (const auto &[c, d] : pu->pairs) {
                pairs.push_back({c, d});
            }
            j = {{"kind", "pulse"},
                 {"gate", pu->group == CheckType::X ? "CNOT" : "CZ"},
                 {"group", pu->group == CheckType::X ? "X" : "Z"},
                 {"term", to_string(pu->term)},
                 {"block", pu->block == DataBlock::A ? "A" : "B"},
                 {"offset", {pu->offset.row, pu->offset.col}},
                 {"periodic", pu->periodic},
                 {"pairs", pairs}};
        } else if (const auto *tr = std::get_if<TransferStep>(&s.action)) {
            j = {{"kind", "transfer"},
                 {"group", tr->group == CheckType::X ? "X" : "Z"},
                 {"to", tr->to == TrapKind::AOD ? "AOD" : "SLM"}};
        }
        j["duration_us"] = s.duration_us;
        steps.push_back(std::move(j));
    }
    json doc = {{"l", layout.l},
                {"m", layout.m},
                {"layout", to_string(layout.variant)},
                {"round_time_us", sched.round_time_us},
                {"x_half_us", sched.x_half_us},
                {"z_half_us", sched.z_half_us},
                {"exhaustive_order", sched.exhaustive},
                {"steps", steps}};
    return doc.dump(2);
}

}  // namespace qmem
