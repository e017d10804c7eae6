#pragma once

// Analytic benefit/cost model of ProSparsity processing and the tile-size
// design-space sweep.
//
// Per tile, the overhead is m^2 k TCAM bit operations, 2 m log2(m) sorter
// comparisons and m + log2(m) pruner comparisons. The saving is
// dS * m * k * n additions, each worth `flop_to_tcam_ratio` TCAM operations.
// The headline ratio keeps only the TCAM term (it dominates):
//
//     ratio = dS * m * k * n * R / (m^2 * k) = R * dS * n / m
//
// so the break-even increase in sparsity is dS = m / (R * n).

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "prosparse/cycle_sim.hpp"
#include "prosparse/metrics.hpp"

namespace prosparse {

struct CostModelConfig {
    double flop_to_tcam_ratio = 45.0;

    void validate() const { detail::require(flop_to_tcam_ratio > 0.0, "FLOP-to-TCAM ratio must be positive"); }
};

struct OverheadOps {
    std::uint64_t tcam_ops = 0;
    double sorter_ops = 0.0;
    double pruner_ops = 0.0;
};

inline OverheadOps overhead_ops(std::size_t m, std::size_t k) {
    detail::require(m >= 2 && k >= 1, "overhead model needs m >= 2 and k >= 1");
    const double lg = std::log2(static_cast<double>(m));
    return {std::uint64_t{m} * m * k, 2.0 * static_cast<double>(m) * lg, static_cast<double>(m) + lg};
}

inline double breakeven_delta_s(std::size_t m, std::size_t n, const CostModelConfig& cfg = {}) {
    cfg.validate();
    detail::require(m >= 1 && n >= 1, "tile dimensions must be >= 1");
    return static_cast<double>(m) / (cfg.flop_to_tcam_ratio * static_cast<double>(n));
}

inline double benefit_cost_ratio(double delta_s, std::size_t m, std::size_t k, std::size_t n,
                                 const CostModelConfig& cfg = {}) {
    cfg.validate();
    detail::require(delta_s >= 0.0 && delta_s <= 1.0, "delta S must lie in [0, 1]");
    detail::require(m >= 1 && k >= 1 && n >= 1, "tile dimensions must be >= 1");
    const double saved = delta_s * static_cast<double>(m) * static_cast<double>(k) * static_cast<double>(n);
    return saved * cfg.flop_to_tcam_ratio / (static_cast<double>(m) * static_cast<double>(m) * static_cast<double>(k));
}

struct CostReport {
    std::size_t m = 0, k = 0, n = 0;
    double delta_s = 0.0;
    OverheadOps ops;
    double saved_flops = 0.0;
    double ratio = 0.0;       // TCAM term only
    double ratio_full = 0.0;  // sorter and pruner terms included
    double breakeven_delta_s = 0.0;
};

inline CostReport cost_report(std::size_t m, std::size_t k, std::size_t n, double delta_s,
                              const CostModelConfig& cfg = {}) {
    CostReport r;
    r.m = m;
    r.k = k;
    r.n = n;
    r.delta_s = delta_s;
    r.ops = overhead_ops(m, k);
    r.saved_flops = delta_s * static_cast<double>(m) * static_cast<double>(k) * static_cast<double>(n);
    r.ratio = benefit_cost_ratio(delta_s, m, k, n, cfg);
    r.ratio_full = r.saved_flops * cfg.flop_to_tcam_ratio /
                   (static_cast<double>(r.ops.tcam_ops) + r.ops.sorter_ops + r.ops.pruner_ops);
    r.breakeven_delta_s = breakeven_delta_s(m, n, cfg);
    return r;
}

struct DsePoint {
    std::size_t m = 0;
    std::size_t k = 0;
    double bit_density = 0.0;
    double pro_density = 0.0;
    std::uint64_t prosparsity_cycles = 0;  // scheduled totals
    std::uint64_t bitsparse_cycles = 0;
    double relative_latency = 0.0;  // prosparsity / bit-sparse
    bool best = false;              // minimum relative latency in the sweep
};

inline std::vector<DsePoint> dse_sweep(const SpikeMatrix& matrix, const std::vector<std::size_t>& m_values,
                                       const std::vector<std::size_t>& k_values, std::size_t n_cols = 1,
                                       std::size_t tile_n = 128, const PipelineConfig& cfg = {}) {
    detail::require(!m_values.empty() && !k_values.empty(), "sweep needs at least one m and one k");
    std::vector<DsePoint> out;
    for (auto k : k_values) {
        for (auto m : m_values) {
            const TileConfig tile{m, tile_n, k};
            const DensityReport d = density_metrics(matrix, tile);
            const RunReport run = baseline_and_speedup(matrix, n_cols, tile, cfg);
            DsePoint p;
            p.m = m;
            p.k = k;
            p.bit_density = d.bit_density();
            p.pro_density = d.pro_density();
            p.prosparsity_cycles = run.mode(ExecMode::prosparsity).total;
            p.bitsparse_cycles = run.mode(ExecMode::bitsparse).total;
            p.relative_latency = static_cast<double>(p.prosparsity_cycles) / static_cast<double>(p.bitsparse_cycles);
            out.push_back(p);
        }
    }
    std::size_t best = 0;
    for (std::size_t i = 1; i < out.size(); ++i)
        if (out[i].relative_latency < out[best].relative_latency) best = i;
    out[best].best = true;
    return out;
}

struct MonotonicityViolation {
    std::size_t k = 0;
    std::size_t smaller_m = 0;
    std::size_t larger_m = 0;
    double smaller_density = 0.0;
    double larger_density = 0.0;
};

// For each k, every pair of nested m values (one divides the other) must have
// pro density non-increasing in m.
inline std::vector<MonotonicityViolation> check_m_monotonicity(const std::vector<DsePoint>& points) {
    std::vector<MonotonicityViolation> bad;
    for (const auto& a : points) {
        for (const auto& b : points) {
            if (a.k != b.k || a.m >= b.m || b.m % a.m != 0) continue;
            if (b.pro_density > a.pro_density) bad.push_back({a.k, a.m, b.m, a.pro_density, b.pro_density});
        }
    }
    return bad;
}

}  // namespace prosparse
