#pragma once

// Prefix-reuse execution of a spiking GeMM.
//
// Within a tile, rows are issued in execution order. Each row starts from its
// prefix's contribution in the current k-tile (zero without a prefix), then
// adds one weight row per pattern bit, lowest bit first. The contribution
// buffer is per k-tile: reusing the cross-k-tile output instead would import
// the prefix row's sums from other k-tiles.

#include <algorithm>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "prosparse/dispatcher.hpp"
#include "prosparse/reference_gemm.hpp"
#include "prosparse/tiling.hpp"

namespace prosparse {

struct TileStats {
    std::uint64_t accumulations = 0;  // weight-row accumulations
    std::uint64_t spike_bits = 0;
    std::uint64_t pattern_bits = 0;
    std::uint64_t em_rows = 0;
    std::uint64_t pm_rows = 0;
    std::uint64_t no_prefix_rows = 0;

    TileStats& operator+=(const TileStats& o) {
        accumulations += o.accumulations;
        spike_bits += o.spike_bits;
        pattern_bits += o.pattern_bits;
        em_rows += o.em_rows;
        pm_rows += o.pm_rows;
        no_prefix_rows += o.no_prefix_rows;
        return *this;
    }
};

inline TileStats meta_stats(const TileMeta& meta) {
    TileStats s;
    for (std::size_t i = 0; i < meta.table.size(); ++i) {
        s.spike_bits += meta.popcounts[i];
        s.pattern_bits += static_cast<std::uint64_t>(std::popcount(meta.table[i].pattern));
        switch (meta.table.kind(i)) {
            case PrefixKind::exact_match: ++s.em_rows; break;
            case PrefixKind::partial_match: ++s.pm_rows; break;
            default: ++s.no_prefix_rows; break;
        }
    }
    return s;
}

template <class W>
struct TileExecution {
    Matrix<accumulator_t<W>> contributions;  // m x n
    std::uint64_t accumulations = 0;
};

template <class W>
TileExecution<W> prosparse_execute_tile(const SpikeMatrix& tile, const WeightView<W>& weights, const TileMeta& meta) {
    using A = accumulator_t<W>;
    const std::size_t m = tile.rows();
    detail::require(weights.rows() == tile.cols(), "weight slice rows must equal tile columns");
    detail::require(meta.table.size() == m && meta.order.size() == m, "meta was built for a different tile");

    TileExecution<W> ex{Matrix<A>(m, weights.cols(), A{}), 0};
    std::vector<bool> written(m, false);
    for (const std::size_t r : meta.order.order) {
        const auto& e = meta.table[r];
        auto psum = ex.contributions.row(r);
        if (e.prefix) {
            detail::check_integrity(written[*e.prefix],
                                    "row " + std::to_string(r) + " reads prefix " + std::to_string(*e.prefix) +
                                        " before it is written");
            auto pre = ex.contributions.row(*e.prefix);
            std::copy(pre.begin(), pre.end(), psum.begin());
        }
        // bit scan forward, clear, repeat
        for (std::uint64_t bits = e.pattern; bits != 0; bits &= bits - 1) {
            auto wr = weights.row(static_cast<std::size_t>(std::countr_zero(bits)));
            for (std::size_t j = 0; j < psum.size(); ++j) psum[j] += static_cast<A>(wr[j]);
            ++ex.accumulations;
        }
        written[r] = true;
    }
    return ex;
}

struct RunStatistics {
    TileStats totals;            // per-meta counts; accumulations summed over n-tiles
    std::uint64_t metas = 0;     // (row-tile, k-tile) pairs
    std::uint64_t tile_runs = 0; // (row-tile, k-tile, n-tile) executions
};

struct ExecOptions {
    // Test hook: lets a caller tamper with meta after it is built and validated.
    std::function<void(TileMeta&)> meta_hook;
};

template <class W>
struct ProSparseResult {
    OutputMatrix<W> output;
    RunStatistics stats;
};

template <class W>
ProSparseResult<W> prosparse_gemm(const GemmProblem<W>& p, const ExecOptions& opts = {}) {
    p.validate();
    using A = accumulator_t<W>;
    const auto& s = p.spikes;
    const auto& w = p.weights;
    const auto grid = tile_grid(s.rows(), s.cols(), w.cols(), p.tile);
    ProSparseResult<W> res{OutputMatrix<W>(s.rows(), w.cols(), A{}), {}};

    for (std::size_t rt = 0; rt < grid.row_tiles; ++rt) {
        const std::size_t r0 = rt * p.tile.m;
        const std::size_t rows = std::min(p.tile.m, s.rows() - r0);
        for (std::size_t kt = 0; kt < grid.k_tiles; ++kt) {
            const std::size_t k0 = kt * p.tile.k;
            const std::size_t cols = std::min(p.tile.k, s.cols() - k0);
            const SpikeMatrix tile = s.slice(r0, rows, k0, cols);
            TileMeta meta = build_meta(tile);
            if (opts.meta_hook) opts.meta_hook(meta);

            TileStats ts = meta_stats(meta);
            ts.accumulations = 0;
            for (std::size_t nt = 0; nt < grid.n_tiles; ++nt) {
                const std::size_t n0 = nt * p.tile.n;
                const std::size_t ncols = std::min(p.tile.n, w.cols() - n0);
                auto ex = prosparse_execute_tile(tile, WeightView<W>(w, k0, cols, n0, ncols), meta);
                for (std::size_t i = 0; i < rows; ++i) {
                    auto dst = res.output.row(r0 + i).subspan(n0, ncols);
                    auto src = ex.contributions.row(i);
                    for (std::size_t j = 0; j < ncols; ++j) dst[j] += src[j];
                }
                ts.accumulations += ex.accumulations;
                ++res.stats.tile_runs;
            }
            res.stats.totals += ts;
            ++res.stats.metas;
        }
    }
    return res;
}

}  // namespace prosparse
