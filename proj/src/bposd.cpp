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
#include "qmem/bposd.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace qmem {

SparseMatrix SparseMatrix::from_columns(std::size_t rows, std::vector<std::vector<std::uint32_t>> columns) {
    SparseMatrix s;
    s.rows = rows;
    s.cols = columns.size();
    s.row_cols.resize(rows);
    for (std::size_t c = 0; c < columns.size(); ++c) {
        auto &col = columns[c];
        std::sort(col.begin(), col.end());
        col.erase(std::unique(col.begin(), col.end()), col.end());
        for (auto r : col) {
            if (r >= rows) {
                throw std::out_of_range("SparseMatrix: row index out of range");
            }
            s.row_cols[r].push_back(static_cast<std::uint32_t>(c));
        }
    }
    s.col_rows = std::move(columns);
    return s;
}

SparseMatrix SparseMatrix::from_dense(const BitMatrix &m) {
    std::vector<std::vector<std::uint32_t>> cols(m.cols());
    for (std::size_t r = 0; r < m.rows(); ++r) {
        for (std::size_t c : m.row_support(r)) {
            cols[c].push_back(static_cast<std::uint32_t>(r));
        }
    }
    return from_columns(m.rows(), std::move(cols));
}

BitMatrix SparseMatrix::to_dense() const {
    BitMatrix m(rows, cols);
    for (std::size_t c = 0; c < cols; ++c) {
        for (auto r : col_rows[c]) {
            m.set(r, c, true);
        }
    }
    return m;
}

std::size_t SparseMatrix::nnz() const {
    std::size_t n = 0;
    for (const auto &c : col_rows) {
        n += c.size();
    }
    return n;
}

DecodingProblem DecodingProblem::from_subproblem(const Subproblem &sp) {
    DecodingProblem dp;
    std::vector<std::vector<std::uint32_t>> h_cols;
    std::vector<std::vector<std::uint32_t>> o_cols;
    h_cols.reserve(sp.mechanisms.size());
    o_cols.reserve(sp.mechanisms.size());
    for (const auto &m : sp.mechanisms) {
        h_cols.push_back(m.detectors);
        o_cols.push_back(m.observables);
        dp.priors.push_back(std::clamp(m.p, std::numeric_limits<double>::min(), 0.5));
    }
    dp.h = SparseMatrix::from_columns(sp.detector_ids.size(), std::move(h_cols));
    dp.obs = SparseMatrix::from_columns(sp.num_observables, std::move(o_cols));
    return dp;
}

DecodingProblem DecodingProblem::code_capacity(const CssCode &code, CheckType checks, double p) {
    if (!(p > 0 && p <= 0.5)) {
        throw std::invalid_argument("code_capacity: p must be in (0, 0.5]");
    }
    DecodingProblem dp;
    dp.h = SparseMatrix::from_dense(checks == CheckType::Z ? code.gz : code.gx);
    dp.obs = SparseMatrix::from_dense(checks == CheckType::Z ? code.logicals_z : code.logicals_x);
    dp.priors.assign(code.n, p);
    return dp;
}

void DecoderConfig::validate() const {
    if (max_iters < 1) {
        throw std::invalid_argument("DecoderConfig: max_iters must be >= 1");
    }
    if (!(ms_scale > 0 && ms_scale <= 1)) {
        throw std::invalid_argument("DecoderConfig: ms_scale must be in (0, 1]");
    }
}

namespace {

double llr(double p) { return std::log((1 - p) / p); }

bool satisfies(const SparseMatrix &h, std::span<const std::uint8_t> e, std::span<const std::uint8_t> syndrome) {
    for (std::size_t r = 0; r < h.rows; ++r) {
        std::uint8_t parity = syndrome[r] & 1U;
        for (auto c : h.row_cols[r]) {
            parity ^= e[c];
        }
        if (parity != 0) {
            return false;
        }
    }
    return true;
}

void check_inputs(const SparseMatrix &h, std::span<const double> priors, std::span<const std::uint8_t> syndrome) {
    if (priors.size() != h.cols || syndrome.size() != h.rows) {
        throw std::invalid_argument("decoder: dimension mismatch");
    }
    for (double p : priors) {
        if (!(p > 0 && p <= 0.5)) {
            throw std::invalid_argument("decoder: priors must be in (0, 0.5]");
        }
    }
}

}  // namespace

double soft_weight(std::span<const double> priors, std::span<const std::uint8_t> e) {
    double w = 0;
    for (std::size_t i = 0; i < e.size(); ++i) {
        if (e[i] != 0) {
            w += llr(priors[i]);
        }
    }
    return w;
}

BpResult bp_decode(const SparseMatrix &h, std::span<const double> priors, std::span<const std::uint8_t> syndrome,
                   const DecoderConfig &cfg) {
    cfg.validate();
    check_inputs(h, priors, syndrome);
    const std::size_t n = h.cols;
    BpResult res;
    res.posterior.resize(n);
    res.hard.assign(n, 0);
    std::vector<double> lambda(n);
    for (std::size_t v = 0; v < n; ++v) {
        lambda[v] = llr(priors[v]);
        res.posterior[v] = lambda[v];
        res.hard[v] = lambda[v] < 0;
    }
    if (satisfies(h, res.hard, syndrome)) {
        res.converged = true;
        return res;
    }

    // Edges grouped by check; var_edges maps each column to its edge ids.
    std::vector<std::size_t> row_start(h.rows + 1, 0);
    for (std::size_t r = 0; r < h.rows; ++r) {
        row_start[r + 1] = row_start[r] + h.row_cols[r].size();
    }
    const std::size_t edges = row_start[h.rows];
    std::vector<std::uint32_t> edge_var(edges);
    std::vector<std::size_t> var_start(n + 1, 0);
    for (std::size_t r = 0; r < h.rows; ++r) {
        for (auto c : h.row_cols[r]) {
            ++var_start[c + 1];
        }
    }
    std::partial_sum(var_start.begin(), var_start.end(), var_start.begin());
    std::vector<std::size_t> var_edges(edges);
    {
        std::vector<std::size_t> fill(var_start.begin(), var_start.end() - 1);
        for (std::size_t r = 0; r < h.rows; ++r) {
            for (std::size_t i = 0; i < h.row_cols[r].size(); ++i) {
                const std::size_t e = row_start[r] + i;
                const auto c = h.row_cols[r][i];
                edge_var[e] = c;
                var_edges[fill[c]++] = e;
            }
        }
    }

    std::vector<double> q(edges);
    std::vector<double> msg(edges, 0);
    for (std::size_t e = 0; e < edges; ++e) {
        q[e] = lambda[edge_var[e]];
    }
    for (std::size_t it = 1; it <= cfg.max_iters; ++it) {
        for (std::size_t r = 0; r < h.rows; ++r) {
            bool negative = (syndrome[r] & 1U) != 0;
            double min1 = std::numeric_limits<double>::infinity();
            double min2 = min1;
            std::size_t arg = row_start[r];
            for (std::size_t e = row_start[r]; e < row_start[r + 1]; ++e) {
                const double a = std::fabs(q[e]);
                negative ^= q[e] < 0;
                if (a < min1) {
                    min2 = min1;
                    min1 = a;
                    arg = e;
                } else if (a < min2) {
                    min2 = a;
                }
            }
            for (std::size_t e = row_start[r]; e < row_start[r + 1]; ++e) {
                const bool neg = negative ^ (q[e] < 0);
                const double mag = cfg.ms_scale * (e == arg ? min2 : min1);
                msg[e] = neg ? -mag : mag;
            }
        }
        for (std::size_t v = 0; v < n; ++v) {
            double total = lambda[v];
            for (std::size_t i = var_start[v]; i < var_start[v + 1]; ++i) {
                total += msg[var_edges[i]];
            }
            res.posterior[v] = total;
            res.hard[v] = total < 0;
            for (std::size_t i = var_start[v]; i < var_start[v + 1]; ++i) {
                q[var_edges[i]] = total - msg[var_edges[i]];
            }
        }
        res.iterations = it;
        if (satisfies(h, res.hard, syndrome)) {
            res.converged = true;
            break;
        }
    }
    return res;
}

DecodeResult osd_postprocess(const SparseMatrix &h, std::span<const double> priors,
                             std::span<const std::uint8_t> syndrome, std::span<const double> posterior,
                             const DecoderConfig &cfg) {
    check_inputs(h, priors, syndrome);
    if (posterior.size() != h.cols) {
        throw std::invalid_argument("osd_postprocess: posterior size mismatch");
    }
    const std::size_t n = h.cols;
    const std::size_t rows = h.rows;
    DecodeResult res;
    res.used_osd = true;
    res.correction.assign(n, 0);

    // Most likely flipped first; ties keep column order.
    std::vector<std::uint32_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::uint32_t a, std::uint32_t b) { return posterior[a] < posterior[b]; });

    // Rows of [H permuted | s], reduced to RREF on the permuted columns.
    BitMatrix m(rows, n + 1);
    for (std::size_t j = 0; j < n; ++j) {
        for (auto r : h.col_rows[order[j]]) {
            m.set(r, j, true);
        }
    }
    for (std::size_t r = 0; r < rows; ++r) {
        m.set(r, n, (syndrome[r] & 1U) != 0);
    }
    std::vector<std::size_t> pivots;  // permuted column of pivot row i
    std::vector<std::uint8_t> is_pivot(n, 0);
    for (std::size_t j = 0; j < n && pivots.size() < rows; ++j) {
        const std::size_t rank = pivots.size();
        std::size_t sel = rank;
        while (sel < rows && !m.get(sel, j)) {
            ++sel;
        }
        if (sel == rows) {
            continue;
        }
        m.swap_rows(rank, sel);
        for (std::size_t r = 0; r < rows; ++r) {
            if (r != rank && m.get(r, j)) {
                m.xor_row(r, rank);
            }
        }
        pivots.push_back(j);
        is_pivot[j] = 1;
    }
    const std::size_t rank = pivots.size();
    for (std::size_t r = rank; r < rows; ++r) {
        if (m.get(r, n)) {
            res.unsatisfiable = true;
            break;
        }
    }

    std::vector<double> w(n);  // permuted weights
    for (std::size_t j = 0; j < n; ++j) {
        w[j] = llr(priors[order[j]]);
    }
    std::vector<std::uint8_t> base(rank);
    for (std::size_t i = 0; i < rank; ++i) {
        base[i] = m.get(i, n) ? 1 : 0;
    }
    std::vector<std::size_t> free_cols;
    for (std::size_t j = 0; j < n; ++j) {
        if (!is_pivot[j]) {
            free_cols.push_back(j);
        }
    }
    // Pivot rows touched by each free column.
    std::vector<std::vector<std::uint32_t>> touches(free_cols.size());
    for (std::size_t f = 0; f < free_cols.size(); ++f) {
        for (std::size_t i = 0; i < rank; ++i) {
            if (m.get(i, free_cols[f])) {
                touches[f].push_back(static_cast<std::uint32_t>(i));
            }
        }
    }
    double base_cost = 0;
    for (std::size_t i = 0; i < rank; ++i) {
        if (base[i]) {
            base_cost += w[pivots[i]];
        }
    }
    // Cost change when pivot row i toggles.
    auto delta = [&](std::uint32_t i) { return base[i] ? -w[pivots[i]] : w[pivots[i]]; };

    double best_cost = base_cost;
    std::vector<std::size_t> best;  // indices into free_cols
    if (cfg.osd_order > 0) {
        for (std::size_t f = 0; f < free_cols.size(); ++f) {
            double c = base_cost + w[free_cols[f]];
            for (auto i : touches[f]) {
                c += delta(i);
            }
            if (c < best_cost) {
                best_cost = c;
                best = {f};
            }
        }
    }
    const std::size_t lam = std::min(cfg.osd_order, free_cols.size());
    std::vector<std::uint8_t> toggled(rank, 0);
    for (std::size_t a = 0; a < lam; ++a) {
        for (auto i : touches[a]) {
            toggled[i] ^= 1;
        }
        for (std::size_t b = a + 1; b < lam; ++b) {
            double c = base_cost + w[free_cols[a]] + w[free_cols[b]];
            for (auto i : touches[a]) {
                c += delta(i);
            }
            for (auto i : touches[b]) {
                // Rows touched by both cancel.
                c += toggled[i] ? -delta(i) : delta(i);
            }
            if (c < best_cost) {
                best_cost = c;
                best = {a, b};
            }
        }
        for (auto i : touches[a]) {
            toggled[i] ^= 1;
        }
    }

    std::vector<std::uint8_t> pivot_val = base;
    for (auto f : best) {
        res.correction[order[free_cols[f]]] = 1;
        for (auto i : touches[f]) {
            pivot_val[i] ^= 1;
        }
    }
    for (std::size_t i = 0; i < rank; ++i) {
        res.correction[order[pivots[i]]] = pivot_val[i];
    }
    res.soft_weight = soft_weight(priors, res.correction);
    return res;
}

BpOsdDecoder::BpOsdDecoder(DecodingProblem problem, DecoderConfig cfg) : problem_(std::move(problem)), cfg_(cfg) {
    cfg_.validate();
    if (problem_.priors.size() != problem_.h.cols || problem_.obs.cols != problem_.h.cols) {
        throw std::invalid_argument("BpOsdDecoder: inconsistent problem dimensions");
    }
}

DecodeResult BpOsdDecoder::decode(std::span<const std::uint8_t> syndrome) const {
    const auto &h = problem_.h;
    DecodeResult res;
    if (h.cols == 0) {
        res.converged = std::none_of(syndrome.begin(), syndrome.end(), [](std::uint8_t s) { return s != 0; });
        res.unsatisfiable = !res.converged;
    } else {
        BpResult bp = bp_decode(h, problem_.priors, syndrome, cfg_);
        if (bp.converged && cfg_.use_osd && cfg_.osd_on_converged) {
            const double w_bp = soft_weight(problem_.priors, bp.hard);
            res = osd_postprocess(h, problem_.priors, syndrome, bp.posterior, cfg_);
            if (w_bp <= res.soft_weight) {
                res.correction = std::move(bp.hard);
                res.soft_weight = w_bp;
                res.used_osd = false;
            }
            res.converged = true;
        } else if (bp.converged || !cfg_.use_osd) {
            res.correction = std::move(bp.hard);
            res.converged = bp.converged;
            res.soft_weight = soft_weight(problem_.priors, res.correction);
        } else {
            res = osd_postprocess(h, problem_.priors, syndrome, bp.posterior, cfg_);
        }
    }
    res.predicted_observables.assign(problem_.obs.rows, 0);
    for (std::size_t c = 0; c < res.correction.size(); ++c) {
        if (res.correction[c]) {
            for (auto o : problem_.obs.col_rows[c]) {
                res.predicted_observables[o] ^= 1;
            }
        }
    }
    return res;
}

SplitDecoder::SplitDecoder(const DetectorModel &model, DecoderConfig cfg) : num_observables_(model.num_observables) {
    for (std::size_t v = 0; v < 2; ++v) {
        detector_ids_[v] = model.split[v].detector_ids;
        views_[v] = std::make_shared<const BpOsdDecoder>(DecodingProblem::from_subproblem(model.split[v]), cfg);
    }
}

DecodeResult SplitDecoder::decode_view(std::size_t v, std::span<const std::uint64_t> syndrome) const {
    const auto &ids = detector_ids_[v];
    std::vector<std::uint8_t> local(ids.size());
    for (std::size_t i = 0; i < ids.size(); ++i) {
        local[i] = (syndrome[ids[i] / 64] >> (ids[i] % 64)) & 1U;
    }
    return views_[v]->decode(local);
}

DecodeResult SplitDecoder::decode(std::span<const std::uint64_t> syndrome) const {
    DecodeResult out;
    out.converged = true;
    out.predicted_observables.assign(num_observables_, 0);
    for (std::size_t v = 0; v < 2; ++v) {
        DecodeResult r = decode_view(v, syndrome);
        out.correction.insert(out.correction.end(), r.correction.begin(), r.correction.end());
        out.converged = out.converged && r.converged;
        out.used_osd = out.used_osd || r.used_osd;
        out.unsatisfiable = out.unsatisfiable || r.unsatisfiable;
        out.soft_weight += r.soft_weight;
        for (std::size_t o = 0; o < r.predicted_observables.size(); ++o) {
            out.predicted_observables[o] ^= r.predicted_observables[o];
        }
    }
    return out;
}

std::vector<std::uint8_t> SplitDecoder::predict(std::span<const std::uint64_t> syndrome) {
    std::vector<std::uint8_t> pred(num_observables_, 0);
    for (std::size_t v = 0; v < 2; ++v) {
        if (views_[v]->problem().obs.rows == 0) {
            continue;
        }
        DecodeResult r = decode_view(v, syndrome);
        for (std::size_t o = 0; o < r.predicted_observables.size(); ++o) {
            pred[o] ^= r.predicted_observables[o];
        }
    }
    return pred;
}

std::unique_ptr<ObservablePredictor> SplitDecoder::clone() const { return std::make_unique<SplitDecoder>(*this); }

DecodeResult decode_split(const DetectorModel &model, std::span<const std::uint64_t> syndrome,
                          const DecoderConfig &cfg) {
    return SplitDecoder(model, cfg).decode(syndrome);
}

}  // namespace qmem
