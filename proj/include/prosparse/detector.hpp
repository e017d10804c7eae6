#pragma once

// Relationship detection for one spike tile.
//
// SubsetCam models the ternary CAM the detector searches: every tile row is
// stored as an entry and a query turns each 1-bit of the query row into a
// don't-care. An entry then matches iff it has no 1 where the query has a 0,
// i.e. iff its spike set is a subset of the query's. One search returns the
// whole subset-index vector for the query.

#include <bit>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "prosparse/bit_vector.hpp"
#include "prosparse/spike_matrix.hpp"

namespace prosparse {

// One ternary search key: bit positions in `care` must equal `value`.
struct TernaryKey {
    std::uint64_t value = 0;
    std::uint64_t care = 0;
};

class SubsetCam {
public:
    explicit SubsetCam(const SpikeMatrix& tile) : width_(tile.cols()) {
        detail::require(tile.cols() <= max_tile_k, "tile is wider than the CAM (64 bits)");
        entries_.reserve(tile.rows());
        for (std::size_t r = 0; r < tile.rows(); ++r) entries_.push_back(tile.row_word(r));
    }

    std::size_t size() const noexcept { return entries_.size(); }
    std::size_t width() const noexcept { return width_; }

    // mask(1011) = X0XX: the query's ones become don't-cares, its zeros must match.
    TernaryKey mask_ones(std::uint64_t query) const {
        const std::uint64_t all = width_ == 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << width_) - 1);
        return {0, all & ~query};
    }

    BitVector search(const TernaryKey& key) const {
        BitVector hits(entries_.size());
        for (std::size_t j = 0; j < entries_.size(); ++j)
            if (((entries_[j] ^ key.value) & key.care) == 0) hits.set(j);
        return hits;
    }

    BitVector subsets_of(std::uint64_t query) const { return search(mask_ones(query)); }

private:
    std::size_t width_;
    std::vector<std::uint64_t> entries_;
};

// Rows j with S_j subset of S_query. The query itself is always present;
// the pruner removes it.
struct SubsetIndexVector {
    std::size_t query = 0;
    BitVector matches;
};

using PopcountVector = std::vector<std::uint32_t>;

inline std::vector<SubsetIndexVector> detect_subsets(const SpikeMatrix& tile) {
    SubsetCam cam(tile);
    std::vector<SubsetIndexVector> out;
    out.reserve(tile.rows());
    for (std::size_t i = 0; i < tile.rows(); ++i) out.push_back({i, cam.subsets_of(tile.row_word(i))});
    return out;
}

inline PopcountVector compute_popcounts(const SpikeMatrix& tile) {
    PopcountVector no(tile.rows());
    for (std::size_t i = 0; i < tile.rows(); ++i) no[i] = static_cast<std::uint32_t>(popcount_row(tile, i));
    return no;
}

}  // namespace prosparse
