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
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "qmem/gb_code.hpp"
#include "qmem/layout.hpp"

namespace qmem {

/// Timing parameters for check-grid movement.
struct CostModel {
    double spacing_um = 5.0;
    double accel_um_per_us2 = 0.02;
    double transfer_time_us = 0.0;
    double gate_time_us = 0.0;
    /// Calibration term added once per round.
    double per_round_constant_us = 0.0;
    /// Fraction of a subgrid realignment hop (moving a check grid between
    /// its A-facing and B-facing pulse sites) billed as travel. Unset means
    /// "from the layout": 1 for the standard layout; 0 for the collision-free
    /// layout, where checks ride in interstitial lanes and the realignment is
    /// absorbed into the lane legs.
    std::optional<double> realign_fraction;

    double realign_for(LayoutVariant v) const {
        return realign_fraction.value_or(v == LayoutVariant::CollisionFree ? 0.0 : 1.0);
    }
};

/// sqrt(6 dx / a) + sqrt(6 dy / a) microseconds for Manhattan legs dx, dy (um).
double move_time(double dx_um, double dy_um, const CostModel &model);

struct MoveStep {
    CheckType group = CheckType::X;
    GridPos delta;       // device sites
    double billed_dx_um = 0;  // horizontal travel billed for this move
    double billed_dy_um = 0;
};

struct PulseStep {
    CheckType group = CheckType::X;
    PolyTerm term;
    DataBlock block = DataBlock::A;
    GridPos offset;     // subgrid offset realized by this pulse
    bool periodic = false;
    /// (check id, data id) using LayoutMap qubit ids.
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
};

enum class TrapKind { AOD, SLM };

struct TransferStep {
    CheckType group = CheckType::X;
    TrapKind to = TrapKind::AOD;
};

struct ScheduleStep {
    std::variant<MoveStep, PulseStep, TransferStep> action;
    double duration_us = 0;
};

struct MovementSchedule {
    std::vector<ScheduleStep> steps;
    double round_time_us = 0;
    double x_half_us = 0;
    double z_half_us = 0;
    bool exhaustive = true;  // every phase ordering was searched

    std::vector<double> per_step_times() const;
    std::size_t pulse_count() const;
};

enum class OrderPolicy {
    Exhaustive,       // minimum total movement over all phase-respecting orders
    SortedHeuristic,  // terms sorted by p + q, as listed
};

/// Builds the parity-check movement schedule for one round: X half then Z
/// half, each visiting every non-periodic offset before any periodic one.
MovementSchedule schedule_round(const PolySpec &spec, const LayoutMap &layout, const CostModel &model,
                                OrderPolicy policy = OrderPolicy::Exhaustive);

/// d rounds of `sched`.
double cycle_time(const MovementSchedule &sched, int rounds);

struct VerifyReport {
    bool ok = true;
    char assertion = 0;  // 'a' coverage, 'b' exclusivity, 'c' home/phase order
    std::size_t step_index = 0;
    std::string message;
};

/// Replays the schedule geometrically and checks (a) every Gx/Gz entry is
/// realized by exactly one pulse pair, (b) at every pulse each moved check is
/// either on its recorded partner's site or outside the data region, and
/// (c) check grids return home and non-periodic pulses precede periodic ones.
VerifyReport verify_schedule(const MovementSchedule &sched, const CssCode &code, const LayoutMap &layout);

/// JSON list of steps with durations.
std::string schedule_to_json(const MovementSchedule &sched, const LayoutMap &layout);

}  // namespace qmem
