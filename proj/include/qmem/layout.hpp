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

#include <array>
#include <cstddef>
#include <ostream>
#include <string>
#include <vector>

#include "qmem/gb_code.hpp"

namespace qmem {

/// Atom site on the device grid. Negative coordinates are buffer sites
/// outside the data region.
struct GridPos {
    int row = 0;
    int col = 0;

    GridPos operator+(GridPos o) const { return {row + o.row, col + o.col}; }
    GridPos operator-(GridPos o) const { return {row - o.row, col - o.col}; }
    GridPos operator*(int s) const { return {row * s, col * s}; }
    auto operator<=>(const GridPos &) const = default;
};

enum class QubitGroup { DataA = 0, DataB = 1, CheckX = 2, CheckZ = 3 };
enum class CheckType { X, Z };
enum class DataBlock { A, B };
enum class LayoutVariant { Standard, CollisionFree };

const char *to_string(QubitGroup g);
const char *to_string(LayoutVariant v);

/// Number of device sites per subgrid step; the four subgrids interleave.
inline constexpr int kInterleave = 2;

/// Placement of every atom of a generalized-bicycle code.
///
/// Qubit ids: A data [0, lm), B data [lm, 2lm), X checks [2lm, 3lm),
/// Z checks [3lm, 4lm). Group member i sits at subgrid position
/// (i mod m, floor(i / m)), i.e. device site 2 * that + subgrid offset.
struct LayoutMap {
    int l = 0;
    int m = 0;
    double spacing_um = 5.0;
    LayoutVariant variant = LayoutVariant::Standard;
    std::array<GridPos, 4> subgrid_offsets{GridPos{0, 0}, GridPos{1, 1}, GridPos{0, 1}, GridPos{1, 0}};
    std::vector<GridPos> positions;

    std::size_t group_size() const { return static_cast<std::size_t>(l) * static_cast<std::size_t>(m); }
    std::size_t qubit_id(QubitGroup g, std::size_t index) const {
        return static_cast<std::size_t>(g) * group_size() + index;
    }
    QubitGroup group_of(std::size_t id) const { return static_cast<QubitGroup>(id / group_size()); }
    GridPos offset(QubitGroup g) const { return subgrid_offsets[static_cast<std::size_t>(g)]; }
    GridPos position(QubitGroup g, std::size_t index) const { return positions[qubit_id(g, index)]; }
    /// Subgrid coordinate of group member i.
    GridPos subgrid_position(std::size_t index) const {
        return {static_cast<int>(index % static_cast<std::size_t>(m)),
                static_cast<int>(index / static_cast<std::size_t>(m))};
    }
    /// Device sites occupied by the data region: [0, rows) x [0, cols).
    int region_rows() const { return kInterleave * m; }
    int region_cols() const { return kInterleave * l; }
    /// Buffer width (sites) needed around the data region for periodic
    /// excursions.
    GridPos buffer_sites() const { return {kInterleave * m, kInterleave * l}; }
    /// Data member of block `g` whose site is `site`, or -1.
    long data_at(QubitGroup g, GridPos site) const;
};

/// Places the four m x l subgrids. The collision-free variant keeps the same
/// pulse sites but routes checks through interstitial lanes (see
/// schedule.hpp), so only its alignment hops differ.
LayoutMap layout(const PolySpec &spec, LayoutVariant variant = LayoutVariant::Standard, double spacing_um = 5.0);

/// Distinct (row, col) offsets from a check to its data partner under term
/// x^p y^q, over all check indices: (q,p), (q,p-l), (q-m,p), (q-m,p-l), with
/// duplicates removed when p or q is zero. Sorted ascending.
std::vector<GridPos> relative_positions(const PolyTerm &term, int l, int m);

/// Non-periodic subgrid offset of a term for the given check type:
/// (q, p) for X checks and the mirrored (-q, -p) for Z checks.
GridPos base_offset(const PolyTerm &term, CheckType type);

/// Offsets for `type` checks in the order they are pulsed: the non-periodic
/// offset first, then the periodic variants ascending.
std::vector<GridPos> check_offsets(const PolyTerm &term, CheckType type, int l, int m);

struct CheckTarget {
    std::size_t check = 0;  // index within the check group
    std::size_t data = 0;   // index within the data block
    GridPos offset;         // subgrid offset from check to data
    bool operator==(const CheckTarget &) const = default;
};

/// Check/data pairs realized by `term` acting on `block` for checks of
/// `type`. X checks use S^p (x) S^q, Z checks its transpose.
std::vector<CheckTarget> check_targets(const PolyTerm &term, CheckType type, DataBlock block, const PolySpec &spec);

/// Terms acting on each data block for the given check type: X checks use
/// (a on A, b on B); Z checks use (b on A, a on B).
const std::vector<PolyTerm> &block_terms(const PolySpec &spec, CheckType type, DataBlock block);

/// CSV with header qubit,group,row_site,col_site,y_um,x_um.
void write_layout_csv(std::ostream &out, const LayoutMap &map);

}  // namespace qmem
