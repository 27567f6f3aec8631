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

#include <bit>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace qmem {

/// Number of 64-bit words needed to hold `bits` bits.
constexpr std::size_t words_for(std::size_t bits) { return (bits + 63) / 64; }

/// Dense bit matrix over GF(2), packed row-major into 64-bit words.
///
/// Bits past `cols()` in the last word of every row are kept at zero so that
/// word-level popcounts and comparisons are exact.
class BitMatrix {
  public:
    BitMatrix() = default;
    BitMatrix(std::size_t rows, std::size_t cols);

    static BitMatrix identity(std::size_t n);
    /// Parses rows of '0'/'1' characters; all rows must have equal length.
    static BitMatrix from_strings(const std::vector<std::string> &rows);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t words_per_row() const { return stride_; }
    bool empty() const { return rows_ == 0 || cols_ == 0; }

    bool get(std::size_t r, std::size_t c) const {
        return (data_[r * stride_ + c / 64] >> (c % 64)) & 1U;
    }
    void set(std::size_t r, std::size_t c, bool v) {
        auto &w = data_[r * stride_ + c / 64];
        const std::uint64_t mask = std::uint64_t{1} << (c % 64);
        w = v ? (w | mask) : (w & ~mask);
    }
    void flip(std::size_t r, std::size_t c) { data_[r * stride_ + c / 64] ^= std::uint64_t{1} << (c % 64); }

    std::span<std::uint64_t> row(std::size_t r) { return {data_.data() + r * stride_, stride_}; }
    std::span<const std::uint64_t> row(std::size_t r) const { return {data_.data() + r * stride_, stride_}; }

    /// row(dst) ^= row(src)
    void xor_row(std::size_t dst, std::size_t src);
    void swap_rows(std::size_t a, std::size_t b);
    std::size_t row_weight(std::size_t r) const;
    bool row_is_zero(std::size_t r) const;
    /// Column indices of the set bits of row r, ascending.
    std::vector<std::size_t> row_support(std::size_t r) const;

    void append_row(std::span<const std::uint64_t> words);
    BitMatrix transpose() const;
    /// Horizontal concatenation (this | other); row counts must match.
    BitMatrix hconcat(const BitMatrix &other) const;
    /// Vertical concatenation; column counts must match.
    BitMatrix vconcat(const BitMatrix &other) const;
    /// Kronecker product over GF(2).
    BitMatrix kron(const BitMatrix &other) const;
    /// Returns this * other over GF(2).
    BitMatrix operator*(const BitMatrix &other) const;
    BitMatrix &operator+=(const BitMatrix &other);
    bool is_zero() const;
    bool operator==(const BitMatrix &other) const = default;

    std::string to_string() const;

  private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::size_t stride_ = 0;
    std::vector<std::uint64_t> data_;
};

/// Result of reducing a matrix to reduced row echelon form.
struct RrefResult {
    BitMatrix matrix;
    std::vector<std::size_t> pivot_cols;  // pivot column of row i, i < rank
    std::size_t rank() const { return pivot_cols.size(); }
};

/// Reduced row echelon form. Pivots are chosen at the lowest available row
/// index for each column scanned left to right, so the result is canonical.
RrefResult rref(BitMatrix m);

std::size_t rank(const BitMatrix &m);

/// Basis of {v : M v = 0}. Rows of the result span the right kernel.
BitMatrix nullspace(const BitMatrix &m);

/// Rows of `n` that extend rowspace(`r`) to rowspace(`n`).
///
/// Scans rows of `n` in order and keeps each one that is independent of
/// rowspace(`r`) plus the rows kept so far. Throws std::invalid_argument when
/// rowspace(`r`) is not contained in rowspace(`n`).
BitMatrix quotient_basis(const BitMatrix &n, const BitMatrix &r);

/// Inverse of a square full-rank matrix; throws std::invalid_argument otherwise.
BitMatrix inverse(const BitMatrix &m);

/// Incremental echelon basis used for repeated membership tests.
class EchelonBasis {
  public:
    explicit EchelonBasis(std::size_t cols) : cols_(cols) {}

    /// Reduces `v` in place against the basis. Returns true if it became zero.
    bool reduce(std::span<std::uint64_t> v) const;
    /// Adds `v` if independent; returns whether it was added.
    bool insert(std::span<const std::uint64_t> v);
    std::size_t size() const { return pivots_.size(); }
    std::size_t cols() const { return cols_; }

  private:
    std::size_t cols_;
    std::vector<std::vector<std::uint64_t>> rows_;
    std::vector<std::size_t> pivots_;
};

inline std::size_t popcount(std::span<const std::uint64_t> words) {
    std::size_t n = 0;
    for (auto w : words) {
        n += static_cast<std::size_t>(std::popcount(w));
    }
    return n;
}

}  // namespace qmem
