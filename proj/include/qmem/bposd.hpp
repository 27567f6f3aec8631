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
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "qmem/gb_code.hpp"
#include "qmem/gf2.hpp"
#include "qmem/noise_circuit.hpp"

namespace qmem {

/// Column-sparse parity-check matrix with both adjacency directions.
struct SparseMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<std::vector<std::uint32_t>> col_rows;  // per column, ascending
    std::vector<std::vector<std::uint32_t>> row_cols;  // per row, ascending

    static SparseMatrix from_dense(const BitMatrix &m);
    static SparseMatrix from_columns(std::size_t rows, std::vector<std::vector<std::uint32_t>> columns);
    BitMatrix to_dense() const;
    std::size_t nnz() const;
};

/// A decoding instance: checks, per-column priors and the observables each
/// column flips.
struct DecodingProblem {
    SparseMatrix h;
    SparseMatrix obs;  // observables x columns
    std::vector<double> priors;

    static DecodingProblem from_subproblem(const Subproblem &sp);
    /// Independent flips on data qubits: H = Gz with Lz observables for
    /// CheckType::Z, H = Gx with Lx for CheckType::X.
    static DecodingProblem code_capacity(const CssCode &code, CheckType checks, double p);
};

struct DecoderConfig {
    std::size_t max_iters = 10000;
    double ms_scale = 1.0;
    bool use_osd = true;
    std::size_t osd_order = 10;
    /// Also run OSD when BP converges and keep the lighter of the two
    /// corrections. Off in the standard decoder.
    bool osd_on_converged = false;

    void validate() const;
};

struct BpResult {
    std::vector<std::uint8_t> hard;
    std::vector<double> posterior;  // LLR, negative means likely flipped
    bool converged = false;
    std::size_t iterations = 0;
};

struct DecodeResult {
    std::vector<std::uint8_t> correction;
    bool converged = false;
    bool used_osd = false;
    bool unsatisfiable = false;  // syndrome outside the column space of H
    std::vector<std::uint8_t> predicted_observables;
    double soft_weight = 0;  // sum of log((1-p)/p) over the correction
};

/// Flooding min-sum BP. `syndrome` has one byte per row of H.
BpResult bp_decode(const SparseMatrix &h, std::span<const double> priors, std::span<const std::uint8_t> syndrome,
                   const DecoderConfig &cfg);

/// Ordered-statistics post-processing with the combination sweep: every
/// single non-pivot flip, then every pair among the `osd_order` most
/// reliable non-pivot columns. Returns the lowest soft-weight candidate.
DecodeResult osd_postprocess(const SparseMatrix &h, std::span<const double> priors,
                             std::span<const std::uint8_t> syndrome, std::span<const double> posterior,
                             const DecoderConfig &cfg);

/// Sum of log((1-p)/p) over the set bits of `e`.
double soft_weight(std::span<const double> priors, std::span<const std::uint8_t> e);

/// BP, then OSD if BP did not satisfy the syndrome.
class BpOsdDecoder {
  public:
    BpOsdDecoder(DecodingProblem problem, DecoderConfig cfg);
    DecodeResult decode(std::span<const std::uint8_t> syndrome) const;
    const DecodingProblem &problem() const { return problem_; }

  private:
    DecodingProblem problem_;
    DecoderConfig cfg_;
};

/// Maps full detector syndromes to predicted observable flips.
class ObservablePredictor {
  public:
    virtual ~ObservablePredictor() = default;
    /// `syndrome` is a packed row of detector bits.
    virtual std::vector<std::uint8_t> predict(std::span<const std::uint64_t> syndrome) = 0;
    virtual std::unique_ptr<ObservablePredictor> clone() const = 0;
};

/// Decodes the X-check and Z-check views of a detector model separately.
class SplitDecoder : public ObservablePredictor {
  public:
    SplitDecoder(const DetectorModel &model, DecoderConfig cfg);

    /// Both views; predicted observables are the XOR of their contributions.
    DecodeResult decode(std::span<const std::uint64_t> syndrome) const;
    /// Skips views that carry no observables (their contribution is zero).
    std::vector<std::uint8_t> predict(std::span<const std::uint64_t> syndrome) override;
    std::unique_ptr<ObservablePredictor> clone() const override;

  private:
    DecodeResult decode_view(std::size_t v, std::span<const std::uint64_t> syndrome) const;

    std::size_t num_observables_ = 0;
    std::array<std::vector<std::uint32_t>, 2> detector_ids_;
    std::array<std::shared_ptr<const BpOsdDecoder>, 2> views_;
};

DecodeResult decode_split(const DetectorModel &model, std::span<const std::uint64_t> syndrome,
                          const DecoderConfig &cfg);

}  // namespace qmem
