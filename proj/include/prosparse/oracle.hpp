#pragma once

// Brute-force ground truth for the prefix engine.
//
// Everything here works on explicit std::set spike sets read cell by cell, so
// it shares no word-level code with the detector/pruner it is used to check.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <iterator>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "prosparse/pruner.hpp"
#include "prosparse/spike_matrix.hpp"

namespace prosparse::oracle {

// O(m^2) pair enumeration stays tractable up to this many rows.
inline constexpr std::size_t max_rows = 4096;

using SpikeSet = std::set<std::size_t>;

inline std::vector<SpikeSet> spike_sets(const SpikeMatrix& tile) {
    std::vector<SpikeSet> sets(tile.rows());
    for (std::size_t r = 0; r < tile.rows(); ++r)
        for (std::size_t c = 0; c < tile.cols(); ++c)
            if (tile.get(r, c)) sets[r].insert(c);
    return sets;
}

inline bool is_subset(const SpikeSet& a, const SpikeSet& b) {
    return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

inline SpikeSet set_intersection(const SpikeSet& a, const SpikeSet& b) {
    SpikeSet out;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::inserter(out, out.end()));
    return out;
}

inline SpikeSet set_difference(const SpikeSet& a, const SpikeSet& b) {
    SpikeSet out;
    std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::inserter(out, out.end()));
    return out;
}

enum class Relation { exact_match, partial_match, intersection, disjoint };

inline const char* to_string(Relation r) {
    switch (r) {
        case Relation::exact_match: return "EM";
        case Relation::partial_match: return "PM";
        case Relation::intersection: return "intersection";
        default: return "disjoint";
    }
}

struct PairRelation {
    std::size_t i = 0;
    std::size_t j = 0;
    Relation kind = Relation::disjoint;
    SpikeSet common;
    // For partial matches: the row whose set is the proper subset.
    std::optional<std::size_t> subset_row;
};

inline PairRelation classify(std::size_t i, std::size_t j, const SpikeSet& si, const SpikeSet& sj) {
    PairRelation rel{i, j, Relation::disjoint, set_intersection(si, sj), std::nullopt};
    const bool a_is_i = rel.common == si;
    const bool a_is_j = rel.common == sj;
    if (rel.common.empty()) {
        rel.kind = Relation::disjoint;
    } else if (a_is_i && a_is_j) {
        rel.kind = Relation::exact_match;
    } else if (a_is_i || a_is_j) {
        rel.kind = Relation::partial_match;
        rel.subset_row = a_is_i ? i : j;
    } else {
        rel.kind = Relation::intersection;
    }
    return rel;
}

// All unordered pairs i < j.
inline std::vector<PairRelation> brute_force_graph(const SpikeMatrix& tile) {
    detail::require(tile.rows() <= max_rows, "tile exceeds the oracle row bound");
    const auto sets = spike_sets(tile);
    std::vector<PairRelation> out;
    out.reserve(tile.rows() * (tile.rows() - 1) / 2);
    for (std::size_t i = 0; i < sets.size(); ++i)
        for (std::size_t j = i + 1; j < sets.size(); ++j) out.push_back(classify(i, j, sets[i], sets[j]));
    return out;
}

// Candidate prefixes of row i: nonempty subsets, exact matches only from
// smaller indices. Rows with fewer than two spikes get none.
inline std::vector<std::size_t> prefix_candidates(const std::vector<SpikeSet>& sets, std::size_t i) {
    std::vector<std::size_t> out;
    if (sets[i].size() < 2) return out;
    for (std::size_t j = 0; j < sets.size(); ++j) {
        if (j == i || sets[j].empty() || !is_subset(sets[j], sets[i])) continue;
        if (sets[j].size() == sets[i].size() && j > i) continue;
        out.push_back(j);
    }
    return out;
}

// Largest set wins, then largest index.
inline std::optional<std::size_t> pick_largest(const std::vector<SpikeSet>& sets, const std::vector<std::size_t>& cands) {
    std::optional<std::size_t> best;
    for (auto j : cands) {
        if (!best || sets[j].size() > sets[*best].size() || (sets[j].size() == sets[*best].size() && j > *best))
            best = j;
    }
    return best;
}

inline std::uint64_t to_word(const SpikeSet& s) {
    std::uint64_t w = 0;
    for (auto c : s) w |= std::uint64_t{1} << c;
    return w;
}

inline PrefixTable oracle_prefix_select(const SpikeMatrix& tile) {
    detail::require(tile.rows() <= max_rows, "tile exceeds the oracle row bound");
    detail::require(tile.cols() <= max_tile_k, "tile is wider than 64 columns");
    const auto sets = spike_sets(tile);
    PrefixTable table{tile.cols(), {}};
    for (std::size_t i = 0; i < sets.size(); ++i) {
        const auto prefix = pick_largest(sets, prefix_candidates(sets, i));
        const SpikeSet residual = prefix ? set_difference(sets[i], sets[*prefix]) : sets[i];
        table.entries.push_back({i, prefix, to_word(residual)});
    }
    return table;
}

struct TwoPrefixRow {
    std::optional<std::size_t> first;
    std::optional<std::size_t> second;
    SpikeSet residual;
};

struct TwoPrefixAnalysis {
    std::vector<TwoPrefixRow> rows;
    std::size_t spike_bits = 0;
    std::size_t one_prefix_bits = 0;  // residual work with the first prefix only
    std::size_t two_prefix_bits = 0;
    std::size_t rows_single = 0;      // rows using exactly one prefix
    std::size_t rows_double = 0;
    std::size_t eligible_rows = 0;    // rows with >= 2 spikes
};

// Greedy second prefix: after the regular first choice, take the candidate
// disjoint from the first prefix that covers the most remaining spikes
// (ties to the largest index).
inline TwoPrefixAnalysis two_prefix_analysis(const SpikeMatrix& tile) {
    detail::require(tile.rows() <= max_rows, "tile exceeds the oracle row bound");
    const auto sets = spike_sets(tile);
    TwoPrefixAnalysis out;
    for (std::size_t i = 0; i < sets.size(); ++i) {
        out.spike_bits += sets[i].size();
        if (sets[i].size() >= 2) ++out.eligible_rows;
        const auto cands = prefix_candidates(sets, i);
        TwoPrefixRow row;
        row.first = pick_largest(sets, cands);
        row.residual = sets[i];
        if (row.first) {
            row.residual = set_difference(sets[i], sets[*row.first]);
            out.one_prefix_bits += row.residual.size();
            std::size_t best_cover = 0;
            for (auto j : cands) {
                if (j == *row.first || !set_intersection(sets[j], sets[*row.first]).empty()) continue;
                const std::size_t cover = set_intersection(sets[j], row.residual).size();
                if (cover > 0 && (cover > best_cover || (cover == best_cover && j > *row.second))) {
                    best_cover = cover;
                    row.second = j;
                }
            }
            if (row.second) row.residual = set_difference(row.residual, sets[*row.second]);
        } else {
            out.one_prefix_bits += sets[i].size();
        }
        out.two_prefix_bits += row.residual.size();
        if (row.second)
            ++out.rows_double;
        else if (row.first)
            ++out.rows_single;
        out.rows.push_back(std::move(row));
    }
    return out;
}

}  // namespace prosparse::oracle
