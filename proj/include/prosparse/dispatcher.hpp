#pragma once

// Temporal side of the tile meta information and its assembly.
//
// The execution order is a stable sort of row indices by popcount. A partial
// match prefix has strictly fewer spikes than its suffix and an exact match
// prefix has the same count and a smaller index, so stability alone puts every
// prefix ahead of its suffix without walking the forest.

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "prosparse/detector.hpp"
#include "prosparse/pruner.hpp"

namespace prosparse {

struct ExecutionOrder {
    std::vector<std::size_t> order;

    std::size_t size() const noexcept { return order.size(); }

    // position[row] = step at which row is issued
    std::vector<std::size_t> positions() const {
        std::vector<std::size_t> pos(order.size());
        for (std::size_t t = 0; t < order.size(); ++t) pos[order[t]] = t;
        return pos;
    }

    friend bool operator==(const ExecutionOrder&, const ExecutionOrder&) = default;
};

inline ExecutionOrder derive_execution_order(const PopcountVector& no) {
    ExecutionOrder eo;
    eo.order.resize(no.size());
    std::iota(eo.order.begin(), eo.order.end(), std::size_t{0});
    std::stable_sort(eo.order.begin(), eo.order.end(), [&](std::size_t a, std::size_t b) { return no[a] < no[b]; });
    return eo;
}

struct ProSparsityForest {
    std::vector<std::optional<std::size_t>> parent;
    std::vector<std::size_t> roots;

    static ProSparsityForest from_table(const PrefixTable& table) {
        ProSparsityForest f;
        f.parent = table.prefixes();
        for (std::size_t i = 0; i < f.parent.size(); ++i)
            if (!f.parent[i]) f.roots.push_back(i);
        return f;
    }
};

struct TileMeta {
    PopcountVector popcounts;
    PrefixTable table;
    ExecutionOrder order;
    ProSparsityForest forest;
};

// Throws integrity_error if the prefix table or order breaks an invariant.
inline void validate_meta(const SpikeMatrix& tile, const TileMeta& meta) {
    using detail::check_integrity;
    const std::size_t m = tile.rows();
    const auto& no = meta.popcounts;
    check_integrity(no.size() == m && meta.table.size() == m && meta.order.size() == m, "meta size mismatch");

    std::vector<bool> seen(m, false);
    for (auto r : meta.order.order) {
        check_integrity(r < m && !seen[r], "execution order is not a permutation");
        seen[r] = true;
    }
    for (std::size_t t = 0; t + 1 < m; ++t) {
        const auto a = meta.order.order[t], b = meta.order.order[t + 1];
        check_integrity(no[a] < no[b] || (no[a] == no[b] && a < b), "execution order is not a stable popcount sort");
    }

    const auto pos = meta.order.positions();
    for (std::size_t i = 0; i < m; ++i) {
        const auto& e = meta.table[i];
        check_integrity(e.row == i, "prefix table out of row order");
        const std::uint64_t row = tile.row_word(i);
        if (!e.prefix) {
            check_integrity(e.pattern == row, "row without prefix must keep its spikes as pattern");
            continue;
        }
        const std::size_t p = *e.prefix;
        check_integrity(p < m && p != i, "prefix index invalid for row " + std::to_string(i));
        const std::uint64_t prow = tile.row_word(p);
        check_integrity((prow & ~row) == 0, "prefix of row " + std::to_string(i) + " is not a subset");
        check_integrity(e.pattern == (row ^ prow), "pattern of row " + std::to_string(i) + " is not row xor prefix");
        check_integrity(no[p] != no[i] || p < i, "exact-match prefix of row " + std::to_string(i) + " has larger index");
        check_integrity(pos[p] < pos[i], "prefix of row " + std::to_string(i) + " is issued after it");
    }
}

inline TileMeta build_meta(const SpikeMatrix& tile) {
    TileMeta meta;
    meta.popcounts = compute_popcounts(tile);
    meta.table = prune_prefixes(detect_subsets(tile), meta.popcounts, tile);
    meta.order = derive_execution_order(meta.popcounts);
    meta.forest = ProSparsityForest::from_table(meta.table);
    validate_meta(tile, meta);
    return meta;
}

}  // namespace prosparse
