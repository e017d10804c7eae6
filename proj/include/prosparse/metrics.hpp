#pragma once

// Density metrics (bit density vs pro density) and ProSparsity forest shape.
//
// Densities are fractions of the logical matrix cells, never of padded tiles.
// Prefix ratios are given over all rows and over "eligible" rows (those with
// at least two spikes, the only rows that may take a prefix).

#include <algorithm>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <string>
#include <optional>
#include <vector>

#include "prosparse/dispatcher.hpp"
#include "prosparse/oracle.hpp"
#include "prosparse/tiling.hpp"

namespace prosparse {

struct ForestStats {
    std::size_t depth = 0;  // edges on the longest root-to-leaf path
    std::size_t tree_count = 0;
    std::vector<std::size_t> nodes_per_depth;
};

inline ForestStats forest_stats(const PrefixTable& table) {
    const std::size_t m = table.size();
    constexpr std::size_t unknown = static_cast<std::size_t>(-1);
    std::vector<std::size_t> depth(m, unknown);
    std::vector<std::uint8_t> on_path(m, 0);
    std::vector<std::size_t> chain;

    for (std::size_t start = 0; start < m; ++start) {
        std::size_t r = start;
        chain.clear();
        while (depth[r] == unknown) {
            if (on_path[r]) throw integrity_error("prefix table contains a cycle through row " + std::to_string(r));
            on_path[r] = 1;
            chain.push_back(r);
            const auto& p = table[r].prefix;
            if (!p) {
                depth[r] = 0;
                break;
            }
            detail::check_integrity(*p < m, "prefix index out of range");
            r = *p;
        }
        // unwind: each node is one deeper than its parent
        for (auto it = chain.rbegin(); it != chain.rend(); ++it) {
            on_path[*it] = 0;
            if (depth[*it] == unknown) depth[*it] = depth[*table[*it].prefix] + 1;
        }
    }

    ForestStats s;
    for (std::size_t i = 0; i < m; ++i) {
        if (!table[i].prefix) ++s.tree_count;
        s.depth = std::max(s.depth, depth[i]);
    }
    s.nodes_per_depth.assign(m == 0 ? 0 : s.depth + 1, 0);
    for (auto d : depth) ++s.nodes_per_depth[d];
    return s;
}

struct DensityReport {
    std::uint64_t rows = 0;
    std::uint64_t cols = 0;
    std::uint64_t spike_bits = 0;
    std::uint64_t pattern_bits = 0;
    std::uint64_t em_rows = 0;  // row-tile slices, counted per k-tile
    std::uint64_t pm_rows = 0;
    std::uint64_t no_prefix_rows = 0;
    std::uint64_t eligible_rows = 0;

    // Present only when the two-prefix analysis ran.
    std::optional<std::uint64_t> pattern_bits_two;
    std::uint64_t two_prefix_single = 0;
    std::uint64_t two_prefix_double = 0;

    double cells() const noexcept { return static_cast<double>(rows) * static_cast<double>(cols); }
    double bit_density() const noexcept { return spike_bits / cells(); }
    double pro_density() const noexcept { return pattern_bits / cells(); }
    std::optional<double> pro_density_two() const {
        if (!pattern_bits_two) return std::nullopt;
        return *pattern_bits_two / cells();
    }
    // bit / pro; 1.0 when there are no spikes at all
    double reduction() const noexcept {
        if (pattern_bits == 0) return spike_bits == 0 ? 1.0 : std::numeric_limits<double>::infinity();
        return static_cast<double>(spike_bits) / static_cast<double>(pattern_bits);
    }

    std::uint64_t row_slices() const noexcept { return em_rows + pm_rows + no_prefix_rows; }
    static double ratio(std::uint64_t a, std::uint64_t b) { return b == 0 ? 0.0 : static_cast<double>(a) / b; }
    double prefix_ratio_one() const { return ratio(em_rows + pm_rows, row_slices()); }
    double prefix_ratio_one_eligible() const { return ratio(em_rows + pm_rows, eligible_rows); }
    double prefix_ratio_two_single() const { return ratio(two_prefix_single, row_slices()); }
    double prefix_ratio_two_double() const { return ratio(two_prefix_double, row_slices()); }
    double prefix_ratio_two_single_eligible() const { return ratio(two_prefix_single, eligible_rows); }
    double prefix_ratio_two_double_eligible() const { return ratio(two_prefix_double, eligible_rows); }

    DensityReport& operator+=(const DensityReport& o) {
        spike_bits += o.spike_bits;
        pattern_bits += o.pattern_bits;
        em_rows += o.em_rows;
        pm_rows += o.pm_rows;
        no_prefix_rows += o.no_prefix_rows;
        eligible_rows += o.eligible_rows;
        if (o.pattern_bits_two) pattern_bits_two = pattern_bits_two.value_or(0) + *o.pattern_bits_two;
        two_prefix_single += o.two_prefix_single;
        two_prefix_double += o.two_prefix_double;
        return *this;
    }
};

// Accumulated counts of one tile; rows/cols describe the tile itself.
inline DensityReport density_metrics(const SpikeMatrix& tile, const PrefixTable& table) {
    detail::require(table.size() == tile.rows(), "prefix table does not match the tile");
    DensityReport d;
    d.rows = tile.rows();
    d.cols = tile.cols();
    for (std::size_t i = 0; i < tile.rows(); ++i) {
        const auto no = popcount_row(tile, i);
        d.spike_bits += no;
        if (no >= 2) ++d.eligible_rows;
        d.pattern_bits += static_cast<std::uint64_t>(std::popcount(table[i].pattern));
        switch (table.kind(i)) {
            case PrefixKind::exact_match: ++d.em_rows; break;
            case PrefixKind::partial_match: ++d.pm_rows; break;
            default: ++d.no_prefix_rows; break;
        }
    }
    return d;
}

inline void add_two_prefix(DensityReport& d, const oracle::TwoPrefixAnalysis& a) {
    d.pattern_bits_two = d.pattern_bits_two.value_or(0) + a.two_prefix_bits;
    d.two_prefix_single += a.rows_single;
    d.two_prefix_double += a.rows_double;
}

// Whole-matrix metrics under an m x k tiling (n does not affect detection).
inline DensityReport density_metrics(const SpikeMatrix& matrix, const TileConfig& tile, bool with_two_prefix = false) {
    tile.validate();
    DensityReport total;
    total.rows = matrix.rows();
    total.cols = matrix.cols();
    for (const auto& t : iterate_tiles(matrix.rows(), matrix.cols(), 1, tile)) {
        const SpikeMatrix st = spike_tile(matrix, t);
        const TileMeta meta = build_meta(st);
        DensityReport d = density_metrics(st, meta.table);
        if (with_two_prefix) add_two_prefix(d, oracle::two_prefix_analysis(st));
        total += d;
    }
    return total;
}

}  // namespace prosparse
