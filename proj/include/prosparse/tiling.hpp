#pragma once

// m x n x k tiling of a spiking GeMM.
//
// Iteration order is fixed: row-tile outer, k-tile middle, n-tile inner.
// Edge tiles carry their true extent; detection treats them as if padded with
// zero rows/columns, which cannot change any prefix choice because zero rows
// are never prefixes and zero columns never break a subset relation.

#include <cstddef>
#include <vector>

#include "prosparse/spike_matrix.hpp"

namespace prosparse {

struct TileCoord {
    std::size_t row_tile = 0;
    std::size_t k_tile = 0;
    std::size_t n_tile = 0;
    std::size_t row_begin = 0;
    std::size_t rows = 0;
    std::size_t k_begin = 0;
    std::size_t cols = 0;
    std::size_t n_begin = 0;
    std::size_t n_cols = 0;
};

struct TileGrid {
    std::size_t row_tiles = 0;
    std::size_t k_tiles = 0;
    std::size_t n_tiles = 0;

    std::size_t size() const noexcept { return row_tiles * k_tiles * n_tiles; }
};

inline std::size_t ceil_div(std::size_t a, std::size_t b) { return (a + b - 1) / b; }

inline TileGrid tile_grid(std::size_t M, std::size_t K, std::size_t N, const TileConfig& tile) {
    tile.validate();
    return {ceil_div(M, tile.m), ceil_div(K, tile.k), ceil_div(N, tile.n)};
}

inline std::vector<TileCoord> iterate_tiles(std::size_t M, std::size_t K, std::size_t N, const TileConfig& tile) {
    const auto grid = tile_grid(M, K, N, tile);
    std::vector<TileCoord> out;
    out.reserve(grid.size());
    for (std::size_t rt = 0; rt < grid.row_tiles; ++rt) {
        const std::size_t r0 = rt * tile.m;
        for (std::size_t kt = 0; kt < grid.k_tiles; ++kt) {
            const std::size_t k0 = kt * tile.k;
            for (std::size_t nt = 0; nt < grid.n_tiles; ++nt) {
                const std::size_t n0 = nt * tile.n;
                out.push_back({rt, kt, nt, r0, std::min(tile.m, M - r0), k0, std::min(tile.k, K - k0), n0,
                               std::min(tile.n, N - n0)});
            }
        }
    }
    return out;
}

template <class W>
std::vector<TileCoord> iterate_tiles(const GemmProblem<W>& p) {
    p.validate();
    return iterate_tiles(p.spikes.rows(), p.spikes.cols(), p.weights.cols(), p.tile);
}

// Spike tile for (row_tile, k_tile) at its true extent.
inline SpikeMatrix spike_tile(const SpikeMatrix& spikes, const TileCoord& t) {
    return spikes.slice(t.row_begin, t.rows, t.k_begin, t.cols);
}

// Read-only k x n window into a weight matrix.
template <class W>
class WeightView {
public:
    WeightView(const WeightMatrix<W>& w, std::size_t row_begin, std::size_t rows, std::size_t col_begin,
               std::size_t cols)
        : w_(&w), r0_(row_begin), rows_(rows), c0_(col_begin), cols_(cols) {
        detail::require(row_begin + rows <= w.rows() && col_begin + cols <= w.cols(), "weight view out of range");
    }

    explicit WeightView(const WeightMatrix<W>& w) : WeightView(w, 0, w.rows(), 0, w.cols()) {}

    static WeightView of_tile(const WeightMatrix<W>& w, const TileCoord& t) {
        return WeightView(w, t.k_begin, t.cols, t.n_begin, t.n_cols);
    }

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::span<const W> row(std::size_t r) const { return w_->row(r0_ + r).subspan(c0_, cols_); }

private:
    const WeightMatrix<W>* w_;
    std::size_t r0_, rows_, c0_, cols_;
};

}  // namespace prosparse
