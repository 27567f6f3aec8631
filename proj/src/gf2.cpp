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

#include "qmem/gf2.hpp"

#include <algorithm>
#include <stdexcept>

namespace qmem {

BitMatrix::BitMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), stride_(words_for(cols)), data_(rows * words_for(cols), 0) {}

BitMatrix BitMatrix::identity(std::size_t n) {
    BitMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        m.set(i, i, true);
    }
    return m;
}

BitMatrix BitMatrix::from_strings(const std::vector<std::string> &rows) {
    const std::size_t cols = rows.empty() ? 0 : rows.front().size();
    BitMatrix m(rows.size(), cols);
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (rows[r].size() != cols) {
            throw std::invalid_argument("BitMatrix::from_strings: ragged rows");
        }
        for (std::size_t c = 0; c < cols; ++c) {
            if (rows[r][c] == '1') {
                m.set(r, c, true);
            } else if (rows[r][c] != '0') {
                throw std::invalid_argument("BitMatrix::from_strings: expected 0 or 1");
            }
        }
    }
    return m;
}

void BitMatrix::xor_row(std::size_t dst, std::size_t src) {
    std::uint64_t *d = data_.data() + dst * stride_;
    const std::uint64_t *s = data_.data() + src * stride_;
    for (std::size_t w = 0; w < stride_; ++w) {
        d[w] ^= s[w];
    }
}

void BitMatrix::swap_rows(std::size_t a, std::size_t b) {
    if (a == b) {
        return;
    }
    std::swap_ranges(data_.begin() + static_cast<std::ptrdiff_t>(a * stride_),
                     data_.begin() + static_cast<std::ptrdiff_t>((a + 1) * stride_),
                     data_.begin() + static_cast<std::ptrdiff_t>(b * stride_));
}

std::size_t BitMatrix::row_weight(std::size_t r) const { return popcount(row(r)); }

bool BitMatrix::row_is_zero(std::size_t r) const {
    auto words = row(r);
    return std::all_of(words.begin(), words.end(), [](std::uint64_t w) { return w == 0; });
}

std::vector<std::size_t> BitMatrix::row_support(std::size_t r) const {
    std::vector<std::size_t> out;
    auto words = row(r);
    for (std::size_t w = 0; w < words.size(); ++w) {
        std::uint64_t bits = words[w];
        while (bits != 0) {
            out.push_back(w * 64 + static_cast<std::size_t>(std::countr_zero(bits)));
            bits &= bits - 1;
        }
    }
    return out;
}

void BitMatrix::append_row(std::span<const std::uint64_t> words) {
    if (words.size() != stride_) {
        throw std::invalid_argument("BitMatrix::append_row: width mismatch");
    }
    data_.insert(data_.end(), words.begin(), words.end());
    ++rows_;
}

BitMatrix BitMatrix::transpose() const {
    BitMatrix t(cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r) {
        for (std::size_t c : row_support(r)) {
            t.set(c, r, true);
        }
    }
    return t;
}

BitMatrix BitMatrix::hconcat(const BitMatrix &other) const {
    if (rows_ != other.rows_) {
        throw std::invalid_argument("BitMatrix::hconcat: row count mismatch");
    }
    BitMatrix out(rows_, cols_ + other.cols_);
    for (std::size_t r = 0; r < rows_; ++r) {
        for (std::size_t c : row_support(r)) {
            out.set(r, c, true);
        }
        for (std::size_t c : other.row_support(r)) {
            out.set(r, cols_ + c, true);
        }
    }
    return out;
}

BitMatrix BitMatrix::vconcat(const BitMatrix &other) const {
    if (cols_ != other.cols_) {
        throw std::invalid_argument("BitMatrix::vconcat: column count mismatch");
    }
    BitMatrix out = *this;
    out.data_.insert(out.data_.end(), other.data_.begin(), other.data_.end());
    out.rows_ += other.rows_;
    return out;
}

BitMatrix BitMatrix::kron(const BitMatrix &other) const {
    BitMatrix out(rows_ * other.rows_, cols_ * other.cols_);
    for (std::size_t r = 0; r < rows_; ++r) {
        for (std::size_t c : row_support(r)) {
            for (std::size_t r2 = 0; r2 < other.rows_; ++r2) {
                for (std::size_t c2 : other.row_support(r2)) {
                    out.set(r * other.rows_ + r2, c * other.cols_ + c2, true);
                }
            }
        }
    }
    return out;
}

BitMatrix BitMatrix::operator*(const BitMatrix &other) const {
    if (cols_ != other.rows_) {
        throw std::invalid_argument("BitMatrix::operator*: shape mismatch");
    }
    BitMatrix out(rows_, other.cols_);
    for (std::size_t r = 0; r < rows_; ++r) {
        auto dst = out.row(r);
        for (std::size_t k : row_support(r)) {
            auto src = other.row(k);
            for (std::size_t w = 0; w < dst.size(); ++w) {
                dst[w] ^= src[w];
            }
        }
    }
    return out;
}

BitMatrix &BitMatrix::operator+=(const BitMatrix &other) {
    if (rows_ != other.rows_ || cols_ != other.cols_) {
        throw std::invalid_argument("BitMatrix::operator+=: shape mismatch");
    }
    for (std::size_t i = 0; i < data_.size(); ++i) {
        data_[i] ^= other.data_[i];
    }
    return *this;
}

bool BitMatrix::is_zero() const {
    return std::all_of(data_.begin(), data_.end(), [](std::uint64_t w) { return w == 0; });
}

std::string BitMatrix::to_string() const {
    std::string s;
    s.reserve(rows_ * (cols_ + 1));
    for (std::size_t r = 0; r < rows_; ++r) {
        for (std::size_t c = 0; c < cols_; ++c) {
            s.push_back(get(r, c) ? '1' : '0');
        }
        s.push_back('\n');
    }
    return s;
}

RrefResult rref(BitMatrix m) {
    RrefResult res;
    std::size_t pivot_row = 0;
    for (std::size_t c = 0; c < m.cols() && pivot_row < m.rows(); ++c) {
        std::size_t found = m.rows();
        for (std::size_t r = pivot_row; r < m.rows(); ++r) {
            if (m.get(r, c)) {
                found = r;
                break;
            }
        }
        if (found == m.rows()) {
            continue;
        }
        m.swap_rows(pivot_row, found);
        for (std::size_t r = 0; r < m.rows(); ++r) {
            if (r != pivot_row && m.get(r, c)) {
                m.xor_row(r, pivot_row);
            }
        }
        res.pivot_cols.push_back(c);
        ++pivot_row;
    }
    res.matrix = std::move(m);
    return res;
}

std::size_t rank(const BitMatrix &m) {
    // Forward elimination only; cheaper than a full rref.
    BitMatrix work = m;
    std::size_t pivot_row = 0;
    for (std::size_t c = 0; c < work.cols() && pivot_row < work.rows(); ++c) {
        std::size_t found = work.rows();
        for (std::size_t r = pivot_row; r < work.rows(); ++r) {
            if (work.get(r, c)) {
                found = r;
                break;
            }
        }
        if (found == work.rows()) {
            continue;
        }
        work.swap_rows(pivot_row, found);
        for (std::size_t r = pivot_row + 1; r < work.rows(); ++r) {
            if (work.get(r, c)) {
                work.xor_row(r, pivot_row);
            }
        }
        ++pivot_row;
    }
    return pivot_row;
}

BitMatrix nullspace(const BitMatrix &m) {
    const RrefResult red = rref(m);
    std::vector<bool> is_pivot(m.cols(), false);
    for (auto c : red.pivot_cols) {
        is_pivot[c] = true;
    }
    BitMatrix basis(m.cols() - red.rank(), m.cols());
    std::size_t out = 0;
    for (std::size_t free_col = 0; free_col < m.cols(); ++free_col) {
        if (is_pivot[free_col]) {
            continue;
        }
        basis.set(out, free_col, true);
        for (std::size_t i = 0; i < red.rank(); ++i) {
            if (red.matrix.get(i, free_col)) {
                basis.set(out, red.pivot_cols[i], true);
            }
        }
        ++out;
    }
    return basis;
}

bool EchelonBasis::reduce(std::span<std::uint64_t> v) const {
    for (std::size_t i = 0; i < rows_.size(); ++i) {
        const std::size_t p = pivots_[i];
        if ((v[p / 64] >> (p % 64)) & 1U) {
            for (std::size_t w = 0; w < v.size(); ++w) {
                v[w] ^= rows_[i][w];
            }
        }
    }
    return std::all_of(v.begin(), v.end(), [](std::uint64_t w) { return w == 0; });
}

bool EchelonBasis::insert(std::span<const std::uint64_t> v) {
    std::vector<std::uint64_t> work(v.begin(), v.end());
    if (reduce(work)) {
        return false;
    }
    std::size_t pivot = 0;
    for (std::size_t w = 0; w < work.size(); ++w) {
        if (work[w] != 0) {
            pivot = w * 64 + static_cast<std::size_t>(std::countr_zero(work[w]));
            break;
        }
    }
    rows_.push_back(std::move(work));
    pivots_.push_back(pivot);
    return true;
}

BitMatrix quotient_basis(const BitMatrix &n, const BitMatrix &r) {
    if (n.cols() != r.cols()) {
        throw std::invalid_argument("quotient_basis: column count mismatch");
    }
    EchelonBasis span_n(n.cols());
    for (std::size_t i = 0; i < n.rows(); ++i) {
        span_n.insert(n.row(i));
    }
    EchelonBasis basis(n.cols());
    for (std::size_t i = 0; i < r.rows(); ++i) {
        std::vector<std::uint64_t> v(r.row(i).begin(), r.row(i).end());
        if (!span_n.reduce(v)) {
            throw std::invalid_argument("quotient_basis: rowspace(R) is not contained in rowspace(N)");
        }
        basis.insert(r.row(i));
    }
    BitMatrix out(0, n.cols());
    for (std::size_t i = 0; i < n.rows(); ++i) {
        if (basis.insert(n.row(i))) {
            out.append_row(n.row(i));
        }
    }
    return out;
}

BitMatrix inverse(const BitMatrix &m) {
    if (m.rows() != m.cols()) {
        throw std::invalid_argument("inverse: matrix is not square");
    }
    const std::size_t n = m.rows();
    RrefResult red = rref(m.hconcat(BitMatrix::identity(n)));
    if (red.rank() < n || red.pivot_cols[n - 1] != n - 1) {
        throw std::invalid_argument("inverse: matrix is singular");
    }
    BitMatrix inv(n, n);
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t c = 0; c < n; ++c) {
            inv.set(r, c, red.matrix.get(r, n + c));
        }
    }
    return inv;
}

}  // namespace qmem
