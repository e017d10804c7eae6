#pragma once

// Reference executions of a spiking GeMM.
//
// dense_gemm is the ground truth: O[i,j] = sum_t M[i,t] * W[t,j] with t
// ascending. bitsparse_gemm skips zero spikes and counts one accumulation per
// (spike, n-tile) pair, which is the work a bit-sparse accelerator performs.

#include <bit>
#include <cstddef>
#include <cstdint>

#include "prosparse/spike_matrix.hpp"
#include "prosparse/tiling.hpp"

namespace prosparse {

template <class W>
OutputMatrix<W> dense_gemm(const GemmProblem<W>& p) {
    p.validate();
    using A = accumulator_t<W>;
    const auto& s = p.spikes;
    const auto& w = p.weights;
    OutputMatrix<W> out(s.rows(), w.cols(), A{});
    for (std::size_t i = 0; i < s.rows(); ++i) {
        auto o = out.row(i);
        for (std::size_t t = 0; t < s.cols(); ++t) {
            const A spike = s.get(i, t) ? A{1} : A{0};
            auto wr = w.row(t);
            for (std::size_t j = 0; j < w.cols(); ++j) o[j] += spike * static_cast<A>(wr[j]);
        }
    }
    return out;
}

template <class W>
struct BitSparseResult {
    OutputMatrix<W> output;
    std::uint64_t accumulations = 0;  // weight-row accumulations, one per spike per n-tile
};

template <class W>
BitSparseResult<W> bitsparse_gemm(const GemmProblem<W>& p) {
    p.validate();
    using A = accumulator_t<W>;
    const auto& s = p.spikes;
    const auto& w = p.weights;
    const auto n_tiles = ceil_div(w.cols(), p.tile.n);
    BitSparseResult<W> res{OutputMatrix<W>(s.rows(), w.cols(), A{}), 0};
    for (std::size_t i = 0; i < s.rows(); ++i) {
        auto o = res.output.row(i);
        auto words = s.row_words(i);
        for (std::size_t wi = 0; wi < words.size(); ++wi) {
            for (std::uint64_t bits = words[wi]; bits != 0; bits &= bits - 1) {
                const std::size_t t = wi * 64 + static_cast<std::size_t>(std::countr_zero(bits));
                auto wr = w.row(t);
                for (std::size_t j = 0; j < w.cols(); ++j) o[j] += static_cast<A>(wr[j]);
                res.accumulations += n_tiles;
            }
        }
    }
    return res;
}

}  // namespace prosparse
