#pragma once

// Cycle model of a single ProSparsity processing unit (PPU).
//
// A tile goes through two phases. The ProSparsity phase (detect, prune,
// dispatch) is a stage-deep pipeline issuing one row per cycle, so it takes
// m + prosparsity_stages - 1 cycles. The compute phase issues rows in
// execution order; a row costs max(1, pattern popcount) accumulation cycles
// per PE pass, plus processor_stages - 1 cycles of pipeline fill per tile.
// Exact-match rows still cost one cycle. The prefix load happens in its own
// pipeline stage at no extra cost. With the default five stages on both sides
// a tile of m rows needs m + 4 cycles for its ProSparsity phase and at least
// m + 4 for its compute phase.
//
// The phase of tile t+1 runs under the compute phase of tile t. Only the
// first tile's phase is exposed as long as compute(t) >= phase(t+1), which
// always holds when row counts do not grow from one tile to the next.
//
// Baselines run the same tiling: bit-sparse costs max(1, popcount(row)) per
// row, dense costs k per row. Every mode is charged the same first-tile
// phase in the "total" figures so that total ratios compare like with like;
// "compute" figures exclude it.

#include <algorithm>
#include <array>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "prosparse/dispatcher.hpp"
#include "prosparse/processor.hpp"
#include "prosparse/tiling.hpp"

namespace prosparse {

struct PipelineConfig {
    std::size_t prosparsity_stages = 5;
    std::size_t processor_stages = 5;  // issue, decode, load, execute, write-back
    std::size_t pe_width = 128;  // output columns accumulated per cycle

    void validate() const {
        detail::require(prosparsity_stages >= 1 && processor_stages >= 1, "pipeline stage counts must be >= 1");
        detail::require(pe_width >= 1, "PE width must be >= 1");
    }
};

enum class ExecMode : std::size_t { dense = 0, bitsparse = 1, prosparsity = 2 };
inline constexpr std::array<ExecMode, 3> all_modes{ExecMode::dense, ExecMode::bitsparse, ExecMode::prosparsity};

inline const char* to_string(ExecMode m) {
    switch (m) {
        case ExecMode::dense: return "dense";
        case ExecMode::bitsparse: return "bitsparse";
        default: return "prosparsity";
    }
}

inline std::uint64_t tile_prosparsity_phase_cycles(std::size_t m, const PipelineConfig& cfg = {}) {
    detail::require(m >= 1, "tile needs at least one row");
    return m + cfg.prosparsity_stages - 1;
}

struct ComputeCycles {
    std::vector<std::uint64_t> row_cycles;  // in row-index order, summed over PE passes
    std::uint64_t compute_cycles = 0;       // row cycles + pipeline fill
};

// `pe_passes` is the number of PE-array passes one accumulation needs across
// all n-tiles that share this meta: sum over n-tiles of ceil(n_cols / pe_width).
inline ComputeCycles tile_compute_cycles(const TileMeta& meta, std::size_t tile_cols, ExecMode mode,
                                         std::uint64_t pe_passes, const PipelineConfig& cfg = {}) {
    const std::size_t m = meta.table.size();
    ComputeCycles out;
    out.row_cycles.resize(m);
    std::uint64_t sum = 0;
    for (std::size_t r = 0; r < m; ++r) {
        std::uint64_t base = 0;
        switch (mode) {
            case ExecMode::dense: base = tile_cols; break;
            case ExecMode::bitsparse: base = std::max<std::uint64_t>(1, meta.popcounts[r]); break;
            case ExecMode::prosparsity:
                base = std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::popcount(meta.table[r].pattern)));
                break;
        }
        out.row_cycles[r] = base * pe_passes;
        sum += out.row_cycles[r];
    }
    out.compute_cycles = sum + cfg.processor_stages - 1;
    return out;
}

struct Schedule {
    std::uint64_t total = 0;
    std::uint64_t exposed_phase_cycles = 0;  // phase cycles of tiles t >= 1 not hidden
};

// total = phase[0] + sum_t max(compute[t], phase[t+1]), phase[T] = 0.
inline Schedule schedule_run(const std::vector<std::uint64_t>& phase, const std::vector<std::uint64_t>& compute) {
    detail::require(phase.size() == compute.size(), "phase and compute sequences differ in length");
    Schedule s;
    if (phase.empty()) return s;
    s.total = phase.front();
    for (std::size_t t = 0; t < compute.size(); ++t) {
        const std::uint64_t next = t + 1 < phase.size() ? phase[t + 1] : 0;
        if (next > compute[t]) s.exposed_phase_cycles += next - compute[t];
        s.total += std::max(compute[t], next);
    }
    return s;
}

struct TileCycleReport {
    std::size_t row_tile = 0;
    std::size_t k_tile = 0;
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::uint64_t prosparsity_cycles = 0;          // ProSparsity phase
    std::array<std::uint64_t, 3> compute_cycles{};  // indexed by ExecMode
    std::array<std::uint64_t, 3> accumulations{};   // weight-row accumulations
    std::vector<std::uint64_t> row_cycles;          // prosparsity mode

    std::uint64_t compute(ExecMode m) const { return compute_cycles[static_cast<std::size_t>(m)]; }
};

struct ModeTotals {
    std::uint64_t compute = 0;  // sum of compute phases
    std::uint64_t total = 0;    // scheduled, first-tile phase included
    std::uint64_t accumulations = 0;
};

struct Traffic {
    std::uint64_t spike_bytes = 0;
    std::uint64_t weight_bytes = 0;      // prosparsity mode
    std::uint64_t output_bytes = 0;      // contribution write-back
    std::uint64_t prefix_read_bytes = 0; // prefix partial-sum loads
};

struct RunReport {
    std::vector<TileCycleReport> tiles;
    std::array<ModeTotals, 3> modes{};
    std::uint64_t first_phase_cycles = 0;
    std::uint64_t exposed_phase_cycles = 0;
    Traffic traffic;

    const ModeTotals& mode(ExecMode m) const { return modes[static_cast<std::size_t>(m)]; }

    static double ratio(std::uint64_t a, std::uint64_t b) { return b == 0 ? 1.0 : static_cast<double>(a) / b; }
    // baseline / prosparsity
    double speedup_compute(ExecMode baseline) const {
        return ratio(mode(baseline).compute, mode(ExecMode::prosparsity).compute);
    }
    double speedup_total(ExecMode baseline) const {
        return ratio(mode(baseline).total, mode(ExecMode::prosparsity).total);
    }

    RunReport& operator+=(const RunReport& o);
};

inline RunReport& RunReport::operator+=(const RunReport& o) {
    tiles.insert(tiles.end(), o.tiles.begin(), o.tiles.end());
    for (std::size_t i = 0; i < modes.size(); ++i) {
        modes[i].compute += o.modes[i].compute;
        modes[i].total += o.modes[i].total;
        modes[i].accumulations += o.modes[i].accumulations;
    }
    first_phase_cycles += o.first_phase_cycles;
    exposed_phase_cycles += o.exposed_phase_cycles;
    traffic.spike_bytes += o.traffic.spike_bytes;
    traffic.weight_bytes += o.traffic.weight_bytes;
    traffic.output_bytes += o.traffic.output_bytes;
    traffic.prefix_read_bytes += o.traffic.prefix_read_bytes;
    return *this;
}

// Runs all three modes over the same tiling of an M x K spike matrix feeding
// N output columns. Only the spike pattern matters for cycles.
inline RunReport baseline_and_speedup(const SpikeMatrix& spikes, std::size_t n_cols, const TileConfig& tile,
                                      const PipelineConfig& cfg = {}, std::size_t weight_bytes = 1) {
    tile.validate();
    cfg.validate();
    detail::require(n_cols >= 1, "output needs at least one column");
    const auto grid = tile_grid(spikes.rows(), spikes.cols(), n_cols, tile);

    std::uint64_t pe_passes = 0;
    for (std::size_t nt = 0; nt < grid.n_tiles; ++nt)
        pe_passes += ceil_div(std::min(tile.n, n_cols - nt * tile.n), cfg.pe_width);

    RunReport rep;
    for (std::size_t rt = 0; rt < grid.row_tiles; ++rt) {
        const std::size_t r0 = rt * tile.m;
        const std::size_t rows = std::min(tile.m, spikes.rows() - r0);
        for (std::size_t kt = 0; kt < grid.k_tiles; ++kt) {
            const std::size_t k0 = kt * tile.k;
            const std::size_t cols = std::min(tile.k, spikes.cols() - k0);
            const SpikeMatrix st = spikes.slice(r0, rows, k0, cols);
            const TileMeta meta = build_meta(st);
            const TileStats ms = meta_stats(meta);

            TileCycleReport tr;
            tr.row_tile = rt;
            tr.k_tile = kt;
            tr.rows = rows;
            tr.cols = cols;
            tr.prosparsity_cycles = tile_prosparsity_phase_cycles(rows, cfg);
            for (auto mode : all_modes) {
                auto cc = tile_compute_cycles(meta, cols, mode, pe_passes, cfg);
                tr.compute_cycles[static_cast<std::size_t>(mode)] = cc.compute_cycles;
                if (mode == ExecMode::prosparsity) tr.row_cycles = std::move(cc.row_cycles);
            }
            tr.accumulations[static_cast<std::size_t>(ExecMode::dense)] = std::uint64_t{rows} * cols * grid.n_tiles;
            tr.accumulations[static_cast<std::size_t>(ExecMode::bitsparse)] = ms.spike_bits * grid.n_tiles;
            tr.accumulations[static_cast<std::size_t>(ExecMode::prosparsity)] = ms.pattern_bits * grid.n_tiles;

            rep.traffic.spike_bytes += std::uint64_t{rows} * ceil_div(cols, 8);
            rep.traffic.weight_bytes += ms.pattern_bits * n_cols * weight_bytes;
            rep.traffic.output_bytes += std::uint64_t{rows} * n_cols * 4;
            rep.traffic.prefix_read_bytes += (ms.em_rows + ms.pm_rows) * n_cols * 4;
            rep.tiles.push_back(std::move(tr));
        }
    }

    std::vector<std::uint64_t> phase;
    for (const auto& t : rep.tiles) phase.push_back(t.prosparsity_cycles);
    rep.first_phase_cycles = phase.empty() ? 0 : phase.front();
    for (auto mode : all_modes) {
        const auto mi = static_cast<std::size_t>(mode);
        std::vector<std::uint64_t> compute;
        for (const auto& t : rep.tiles) {
            compute.push_back(t.compute_cycles[mi]);
            rep.modes[mi].compute += t.compute_cycles[mi];
            rep.modes[mi].accumulations += t.accumulations[mi];
        }
        const Schedule s = schedule_run(phase, compute);
        rep.modes[mi].total = s.total;
        if (mode == ExecMode::prosparsity) rep.exposed_phase_cycles = s.exposed_phase_cycles;
    }
    // Each row costs >= 1 cycle and row counts never grow along the tile
    // order, so with a processor pipeline at least as deep as the ProSparsity
    // pipeline every phase after the first is hidden.
    if (cfg.prosparsity_stages <= cfg.processor_stages)
        detail::check_integrity(rep.exposed_phase_cycles == 0, "ProSparsity phase not hidden by the compute phase");
    return rep;
}

template <class W>
RunReport baseline_and_speedup(const GemmProblem<W>& p, const PipelineConfig& cfg = {}) {
    p.validate();
    return baseline_and_speedup(p.spikes, p.weights.cols(), p.tile, cfg, sizeof(W));
}

}  // namespace prosparse
