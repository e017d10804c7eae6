#pragma once

// Core data model for spiking GeMM: a bit-packed binary spike matrix, dense
// weight/output matrices, and the tile configuration.
//
// Bit layout: row r occupies words_per_row() consecutive 64-bit words, bit b of
// word w holds column 64*w + b. Column 0 is the "leftmost" character in the
// textual form, so "1011" has columns {0, 2, 3} set. Bits past cols() are
// always zero.

#include <algorithm>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "prosparse/errors.hpp"

namespace prosparse {

// Widest spike tile the detector handles; a tile row must fit one word.
inline constexpr std::size_t max_tile_k = 64;

class SpikeMatrix {
public:
    static constexpr std::size_t word_bits = 64;

    SpikeMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols) {
        detail::require(rows >= 1 && cols >= 1, "spike matrix needs at least one row and one column");
        wpr_ = (cols + word_bits - 1) / word_bits;
        words_.assign(rows * wpr_, 0);
    }

    // Rows given as strings of '0'/'1', column 0 first.
    static SpikeMatrix from_strings(const std::vector<std::string>& rows) {
        detail::require(!rows.empty(), "spike matrix needs at least one row");
        SpikeMatrix m(rows.size(), rows.front().size());
        for (std::size_t r = 0; r < rows.size(); ++r) {
            detail::require(rows[r].size() == m.cols_, "ragged spike rows");
            for (std::size_t c = 0; c < m.cols_; ++c) {
                char ch = rows[r][c];
                detail::require(ch == '0' || ch == '1', "spike rows may only contain '0' and '1'");
                if (ch == '1') m.set(r, c);
            }
        }
        return m;
    }

    static SpikeMatrix pack(const std::vector<std::vector<std::uint8_t>>& cells) {
        detail::require(!cells.empty(), "spike matrix needs at least one row");
        SpikeMatrix m(cells.size(), cells.front().size());
        for (std::size_t r = 0; r < cells.size(); ++r) {
            detail::require(cells[r].size() == m.cols_, "ragged spike rows");
            for (std::size_t c = 0; c < m.cols_; ++c) {
                detail::require(cells[r][c] <= 1, "spike cells must be 0 or 1");
                if (cells[r][c]) m.set(r, c);
            }
        }
        return m;
    }

    std::vector<std::vector<std::uint8_t>> unpack() const {
        std::vector<std::vector<std::uint8_t>> out(rows_, std::vector<std::uint8_t>(cols_, 0));
        for (std::size_t r = 0; r < rows_; ++r)
            for (std::size_t c = 0; c < cols_; ++c) out[r][c] = get(r, c) ? 1 : 0;
        return out;
    }

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::size_t words_per_row() const noexcept { return wpr_; }

    bool get(std::size_t r, std::size_t c) const {
        return (words_[r * wpr_ + c / word_bits] >> (c % word_bits)) & 1u;
    }

    void set(std::size_t r, std::size_t c, bool v = true) {
        detail::require(r < rows_ && c < cols_, "spike index out of range");
        auto& w = words_[r * wpr_ + c / word_bits];
        const auto bit = std::uint64_t{1} << (c % word_bits);
        w = v ? (w | bit) : (w & ~bit);
    }

    std::span<const std::uint64_t> row_words(std::size_t r) const {
        return {words_.data() + r * wpr_, wpr_};
    }

    // Whole row as one word; only valid for matrices at most 64 columns wide.
    std::uint64_t row_word(std::size_t r) const {
        detail::require(cols_ <= word_bits, "row_word needs cols <= 64");
        return words_[r];
    }

    void set_row_word(std::size_t r, std::uint64_t w) {
        detail::require(cols_ <= word_bits, "set_row_word needs cols <= 64");
        const std::uint64_t mask = cols_ == word_bits ? ~std::uint64_t{0} : ((std::uint64_t{1} << cols_) - 1);
        detail::require((w & ~mask) == 0, "row word has bits beyond cols");
        words_[r] = w;
    }

    // Up to 64 bits of row r starting at column `begin`, bit 0 = column `begin`.
    std::uint64_t bits(std::size_t r, std::size_t begin, std::size_t len) const {
        if (len == 0) return 0;
        const std::size_t wi = begin / word_bits;
        const std::size_t off = begin % word_bits;
        const auto* row = words_.data() + r * wpr_;
        std::uint64_t v = row[wi] >> off;
        if (off != 0 && wi + 1 < wpr_) v |= row[wi + 1] << (word_bits - off);
        return len >= word_bits ? v : (v & ((std::uint64_t{1} << len) - 1));
    }

    SpikeMatrix slice(std::size_t row_begin, std::size_t nrows, std::size_t col_begin, std::size_t ncols) const {
        detail::require(row_begin + nrows <= rows_ && col_begin + ncols <= cols_, "slice out of range");
        SpikeMatrix out(nrows, ncols);
        for (std::size_t r = 0; r < nrows; ++r) {
            for (std::size_t w = 0; w < out.wpr_; ++w) {
                const std::size_t begin = col_begin + w * word_bits;
                const std::size_t len = std::min(word_bits, ncols - w * word_bits);
                out.words_[r * out.wpr_ + w] = bits(row_begin + r, begin, len);
            }
        }
        return out;
    }

    std::size_t popcount() const noexcept {
        std::size_t n = 0;
        for (auto w : words_) n += static_cast<std::size_t>(std::popcount(w));
        return n;
    }

    std::vector<std::string> to_strings() const {
        std::vector<std::string> out(rows_, std::string(cols_, '0'));
        for (std::size_t r = 0; r < rows_; ++r)
            for (std::size_t c = 0; c < cols_; ++c)
                if (get(r, c)) out[r][c] = '1';
        return out;
    }

    friend bool operator==(const SpikeMatrix&, const SpikeMatrix&) = default;

private:
    std::size_t rows_;
    std::size_t cols_;
    std::size_t wpr_ = 0;
    std::vector<std::uint64_t> words_;
};

inline std::size_t popcount_row(const SpikeMatrix& m, std::size_t row) {
    detail::require(row < m.rows(), "row index out of range");
    std::size_t n = 0;
    for (auto w : m.row_words(row)) n += static_cast<std::size_t>(std::popcount(w));
    return n;
}

// True iff S_candidate is a subset of S_query (not necessarily proper).
inline bool subset_test(const SpikeMatrix& m, std::size_t candidate, std::size_t query) {
    detail::require(candidate < m.rows() && query < m.rows(), "row index out of range");
    auto c = m.row_words(candidate);
    auto q = m.row_words(query);
    for (std::size_t w = 0; w < c.size(); ++w)
        if ((c[w] & ~q[w]) != 0) return false;
    return true;
}

// Row-major dense matrix; used for both weights and outputs.
template <class T>
class Matrix {
public:
    using value_type = T;

    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, T fill = T{}) : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
    Matrix(std::size_t rows, std::size_t cols, std::vector<T> data) : rows_(rows), cols_(cols), data_(std::move(data)) {
        detail::require(data_.size() == rows * cols, "matrix element count must equal rows * cols");
    }

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }

    T& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    const T& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    std::span<T> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
    std::span<const T> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

    std::span<const T> data() const noexcept { return data_; }

    friend bool operator==(const Matrix&, const Matrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<T> data_;
};

template <class W>
using WeightMatrix = Matrix<W>;

// Accumulator type for a weight type. 8-bit integer weights accumulate into
// 32-bit integers so reordered accumulation stays bit-exact.
template <class W>
struct accumulator {
    using type = W;
};
template <>
struct accumulator<std::int8_t> {
    using type = std::int32_t;
};
template <class W>
using accumulator_t = typename accumulator<W>::type;

template <class W>
using OutputMatrix = Matrix<accumulator_t<W>>;

// Largest K for which 8-bit weights cannot overflow a 32-bit accumulator.
inline constexpr std::size_t max_int8_reduction = std::size_t{1} << 23;

struct TileConfig {
    std::size_t m = 256;
    std::size_t n = 128;
    std::size_t k = 16;

    void validate() const {
        detail::require(m >= 1 && n >= 1 && k >= 1, "tile dimensions must be >= 1");
        detail::require(k <= max_tile_k, "tile k exceeds the detector width (64)");
    }
};

template <class W>
struct GemmProblem {
    SpikeMatrix spikes;
    WeightMatrix<W> weights;
    TileConfig tile{};

    void validate() const {
        tile.validate();
        detail::require(spikes.cols() == weights.rows(), "spike columns must equal weight rows");
        if constexpr (std::is_same_v<W, std::int8_t>)
            detail::require(spikes.cols() <= max_int8_reduction, "reduction dimension too large for 32-bit accumulation");
    }
};

}  // namespace prosparse
