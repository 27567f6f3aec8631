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

#include "qmem/layout.hpp"

#include <algorithm>
#include <set>

namespace qmem {

const char *to_string(QubitGroup g) {
    switch (g) {
        case QubitGroup::DataA:
            return "A";
        case QubitGroup::DataB:
            return "B";
        case QubitGroup::CheckX:
            return "X";
        case QubitGroup::CheckZ:
            return "Z";
    }
    return "?";
}

const char *to_string(LayoutVariant v) {
    return v == LayoutVariant::Standard ? "standard" : "collision-free";
}

long LayoutMap::data_at(QubitGroup g, GridPos site) const {
    const GridPos rel = site - offset(g);
    if (rel.row < 0 || rel.col < 0 || rel.row % kInterleave != 0 || rel.col % kInterleave != 0) {
        return -1;
    }
    const int r = rel.row / kInterleave;
    const int c = rel.col / kInterleave;
    if (r >= m || c >= l) {
        return -1;
    }
    return static_cast<long>(c) * m + r;
}

LayoutMap layout(const PolySpec &spec, LayoutVariant variant, double spacing_um) {
    spec.validate();
    LayoutMap map;
    map.l = spec.l;
    map.m = spec.m;
    map.spacing_um = spacing_um;
    map.variant = variant;
    const std::size_t n = map.group_size();
    map.positions.resize(4 * n);
    for (std::size_t g = 0; g < 4; ++g) {
        for (std::size_t i = 0; i < n; ++i) {
            map.positions[g * n + i] = map.subgrid_position(i) * kInterleave + map.subgrid_offsets[g];
        }
    }
    return map;
}

std::vector<GridPos> relative_positions(const PolyTerm &term, int l, int m) {
    std::set<GridPos> out;
    for (int row : {term.q, term.q - m}) {
        for (int col : {term.p, term.p - l}) {
            if ((row == term.q - m && term.q == 0) || (col == term.p - l && term.p == 0)) {
                continue;
            }
            out.insert({row, col});
        }
    }
    return {out.begin(), out.end()};
}

GridPos base_offset(const PolyTerm &term, CheckType type) {
    return type == CheckType::X ? GridPos{term.q, term.p} : GridPos{-term.q, -term.p};
}

std::vector<GridPos> check_offsets(const PolyTerm &term, CheckType type, int l, int m) {
    std::vector<GridPos> rel = relative_positions(term, l, m);
    if (type == CheckType::Z) {
        // Point reflection of the X family.
        for (auto &g : rel) {
            g = g * -1;
        }
        std::sort(rel.begin(), rel.end());
    }
    const GridPos base = base_offset(term, type);
    std::vector<GridPos> out{base};
    for (const auto &g : rel) {
        if (g != base) {
            out.push_back(g);
        }
    }
    return out;
}

const std::vector<PolyTerm> &block_terms(const PolySpec &spec, CheckType type, DataBlock block) {
    const bool use_a = (type == CheckType::X) == (block == DataBlock::A);
    return use_a ? spec.a : spec.b;
}

std::vector<CheckTarget> check_targets(const PolyTerm &term, CheckType type, DataBlock /*block*/,
                                       const PolySpec &spec) {
    const int l = spec.l;
    const int m = spec.m;
    const int sign = type == CheckType::X ? 1 : -1;
    std::vector<CheckTarget> out;
    out.reserve(static_cast<std::size_t>(l * m));
    for (int i = 0; i < l * m; ++i) {
        const int r = i % m;
        const int c = i / m;
        int dr = sign * term.q;
        int dc = sign * term.p;
        if (r + dr >= m) {
            dr -= m;
        } else if (r + dr < 0) {
            dr += m;
        }
        if (c + dc >= l) {
            dc -= l;
        } else if (c + dc < 0) {
            dc += l;
        }
        const int data = (c + dc) * m + (r + dr);
        out.push_back({static_cast<std::size_t>(i), static_cast<std::size_t>(data), GridPos{dr, dc}});
    }
    return out;
}

void write_layout_csv(std::ostream &out, const LayoutMap &map) {
    out << "qubit,group,row_site,col_site,y_um,x_um\n";
    for (std::size_t id = 0; id < map.positions.size(); ++id) {
        const GridPos p = map.positions[id];
        out << id << ',' << to_string(map.group_of(id)) << ',' << p.row << ',' << p.col << ','
            << p.row * map.spacing_um << ',' << p.col * map.spacing_um << '\n';
    }
}

}  // namespace qmem
