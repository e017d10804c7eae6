#pragma once

// Reduces each row's subset-index vector to at most one prefix and derives
// the residual pattern (row XOR prefix) that still needs accumulation.

#include <bit>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "prosparse/detector.hpp"

namespace prosparse {

enum class PrefixKind { none, exact_match, partial_match };

inline const char* to_string(PrefixKind k) {
    switch (k) {
        case PrefixKind::exact_match: return "EM";
        case PrefixKind::partial_match: return "PM";
        default: return "none";
    }
}

struct PrefixEntry {
    std::size_t row = 0;
    std::optional<std::size_t> prefix;
    std::uint64_t pattern = 0;  // bit c = column c of the tile

    friend bool operator==(const PrefixEntry&, const PrefixEntry&) = default;
};

// One entry per tile row, ordered by row index.
struct PrefixTable {
    std::size_t width = 0;
    std::vector<PrefixEntry> entries;

    std::size_t size() const noexcept { return entries.size(); }
    const PrefixEntry& operator[](std::size_t i) const { return entries[i]; }

    std::vector<std::optional<std::size_t>> prefixes() const {
        std::vector<std::optional<std::size_t>> out;
        out.reserve(entries.size());
        for (const auto& e : entries) out.push_back(e.prefix);
        return out;
    }

    PrefixKind kind(std::size_t i) const {
        const auto& e = entries[i];
        if (!e.prefix) return PrefixKind::none;
        return e.pattern == 0 ? PrefixKind::exact_match : PrefixKind::partial_match;
    }

    std::size_t pattern_bits() const noexcept {
        std::size_t n = 0;
        for (const auto& e : entries) n += static_cast<std::size_t>(std::popcount(e.pattern));
        return n;
    }

    friend bool operator==(const PrefixTable&, const PrefixTable&) = default;
};

// Pruning rules per row i:
//   1. drop i itself;
//   2. drop equal-popcount (exact match) candidates with a larger index;
//   3. drop zero rows;
//   4. rows with at most one spike take no prefix;
//   5. otherwise take the candidate with the most spikes, ties to the largest index.
inline PrefixTable prune_prefixes(const std::vector<SubsetIndexVector>& si, const PopcountVector& no,
                                  const SpikeMatrix& tile) {
    detail::require(si.size() == tile.rows() && no.size() == tile.rows(), "pruner inputs come from different tiles");
    PrefixTable table{tile.cols(), {}};
    table.entries.reserve(tile.rows());
    for (std::size_t i = 0; i < tile.rows(); ++i) {
        const std::uint64_t row = tile.row_word(i);
        std::optional<std::size_t> best;
        if (no[i] > 1) {
            si[i].matches.for_each_set([&](std::size_t j) {
                if (j == i || no[j] == 0) return;
                if (no[j] == no[i] && j > i) return;
                // ascending j, so >= keeps the largest index among ties
                if (!best || no[j] >= no[*best]) best = j;
            });
        }
        const std::uint64_t pattern = best ? (row ^ tile.row_word(*best)) : row;
        table.entries.push_back({i, best, pattern});
    }
    return table;
}

}  // namespace prosparse
