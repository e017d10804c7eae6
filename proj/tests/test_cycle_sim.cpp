#include <gtest/gtest.h>

#include "test_support.hpp"

using namespace prosparse;
using namespace prosparse::fixtures;

TEST(CycleSim, ProsparsityPhase) {
    EXPECT_EQ(tile_prosparsity_phase_cycles(6), 10u);
    EXPECT_EQ(tile_prosparsity_phase_cycles(256), 260u);
    EXPECT_EQ(tile_prosparsity_phase_cycles(1, PipelineConfig{1, 1, 1}), 1u);
    EXPECT_THROW(tile_prosparsity_phase_cycles(0), usage_error);
}

TEST(CycleSim, CanonicalTileCompute) {
    const auto meta = build_meta(canonical_tile());
    const auto pro = tile_compute_cycles(meta, 4, ExecMode::prosparsity, 1);
    EXPECT_EQ(pro.row_cycles, (std::vector<std::uint64_t>{1, 2, 1, 1, 1, 1}));
    EXPECT_EQ(pro.compute_cycles, 11u);
    EXPECT_EQ(tile_compute_cycles(meta, 4, ExecMode::bitsparse, 1).compute_cycles, 18u);
    EXPECT_EQ(tile_compute_cycles(meta, 4, ExecMode::dense, 1).compute_cycles, 28u);
    EXPECT_EQ(tile_compute_cycles(meta, 4, ExecMode::prosparsity, 3).compute_cycles, 3u * 7u + 4u);
}

TEST(CycleSim, CanonicalRun) {
    const auto rep = baseline_and_speedup(canonical_problem());
    ASSERT_EQ(rep.tiles.size(), 1u);
    EXPECT_EQ(rep.first_phase_cycles, 10u);
    EXPECT_EQ(rep.mode(ExecMode::prosparsity).compute, 11u);
    EXPECT_EQ(rep.mode(ExecMode::bitsparse).compute, 18u);
    EXPECT_EQ(rep.mode(ExecMode::dense).compute, 28u);
    EXPECT_EQ(rep.mode(ExecMode::prosparsity).total, 21u);
    EXPECT_EQ(rep.mode(ExecMode::bitsparse).total, 28u);
    EXPECT_EQ(rep.mode(ExecMode::dense).total, 38u);
    EXPECT_DOUBLE_EQ(rep.speedup_compute(ExecMode::bitsparse), 18.0 / 11.0);
    EXPECT_DOUBLE_EQ(rep.speedup_total(ExecMode::bitsparse), 28.0 / 21.0);
    EXPECT_EQ(rep.mode(ExecMode::prosparsity).accumulations, 6u);
    EXPECT_EQ(rep.mode(ExecMode::bitsparse).accumulations, 14u);
    EXPECT_EQ(rep.mode(ExecMode::dense).accumulations, 24u);
    EXPECT_EQ(rep.exposed_phase_cycles, 0u);
}

TEST(CycleSim, ScheduleOverlapsNextPhase) {
    EXPECT_EQ(schedule_run({10, 10}, {11, 18}).total, 39u);
    EXPECT_EQ(schedule_run({10, 10}, {11, 18}).exposed_phase_cycles, 0u);
    const auto s = schedule_run({10, 20}, {11, 5});
    EXPECT_EQ(s.total, 35u);
    EXPECT_EQ(s.exposed_phase_cycles, 9u);
    EXPECT_EQ(schedule_run({}, {}).total, 0u);
    EXPECT_THROW(schedule_run({1}, {}), usage_error);
}

TEST(CycleSim, PeWidthPasses) {
    SynthRng rng(1);
    const auto s = random_spikes(rng, 8, 16, 0.3);
    const auto meta = build_meta(s);
    std::uint64_t bit_rows = 0;
    for (auto no : meta.popcounts) bit_rows += std::max<std::uint64_t>(1, no);

    const auto wide = baseline_and_speedup(s, 300, TileConfig{8, 128, 16}, PipelineConfig{5, 5, 128});
    EXPECT_EQ(wide.mode(ExecMode::bitsparse).compute, 3 * bit_rows + 4);
    const auto narrow = baseline_and_speedup(s, 300, TileConfig{8, 128, 16}, PipelineConfig{5, 5, 64});
    EXPECT_EQ(narrow.mode(ExecMode::bitsparse).compute, 5 * bit_rows + 4);
}

TEST(CycleSim, DeepProsparsityPipelineMayBeExposed) {
    SpikeMatrix s(8, 4);  // empty rows: one cycle each
    const auto rep = baseline_and_speedup(s, 1, TileConfig{4, 1, 4}, PipelineConfig{20, 1, 128});
    EXPECT_EQ(rep.first_phase_cycles, 23u);
    EXPECT_EQ(rep.exposed_phase_cycles, 23u - 4u);
    EXPECT_EQ(rep.mode(ExecMode::prosparsity).total, 23u + 23u + 4u);
}

TEST(CycleSim, Traffic) {
    const auto rep = baseline_and_speedup(canonical_problem());
    EXPECT_EQ(rep.traffic.spike_bytes, 6u);
    EXPECT_EQ(rep.traffic.weight_bytes, 6u);
    EXPECT_EQ(rep.traffic.output_bytes, 24u);
    EXPECT_EQ(rep.traffic.prefix_read_bytes, 16u);
}

TEST(CycleSimProperties, ModesAreOrderedAndPhasesHidden) {
    SynthRng rng(606);
    for (int iter = 0; iter < 150; ++iter) {
        const std::size_t M = uniform_in(rng, 1, 300), K = uniform_in(rng, 1, 80), N = uniform_in(rng, 1, 300);
        const auto s = iter % 2 ? random_spikes(rng, M, K, density_in(rng, 0.05, 0.6))
                                : random_clustered_spikes(rng, M, K, density_in(rng, 0.05, 0.6));
        const TileConfig tc{uniform_in(rng, 1, 256), uniform_in(rng, 1, 128), uniform_in(rng, 1, 64)};
        const auto rep = baseline_and_speedup(s, N, tc);
        const auto& pro = rep.mode(ExecMode::prosparsity);
        const auto& bit = rep.mode(ExecMode::bitsparse);
        const auto& dense = rep.mode(ExecMode::dense);
        ASSERT_LE(pro.compute, bit.compute);
        ASSERT_LE(bit.compute, dense.compute);
        ASSERT_LE(pro.total, bit.total);
        ASSERT_LE(bit.total, dense.total);
        ASSERT_EQ(rep.exposed_phase_cycles, 0u);
        ASSERT_EQ(pro.total, rep.first_phase_cycles + pro.compute);
    }
}

TEST(CycleSimProperties, AccumulationsMatchExecution) {
    SynthRng rng(707);
    for (int iter = 0; iter < 100; ++iter) {
        const std::size_t M = uniform_in(rng, 1, 100), K = uniform_in(rng, 1, 70), N = uniform_in(rng, 1, 20);
        GemmProblem<std::int8_t> p{random_clustered_spikes(rng, M, K, 0.3), generate_int8_weights(K, N, rng.bits()),
                                   TileConfig{uniform_in(rng, 1, 64), uniform_in(rng, 1, 8), uniform_in(rng, 1, 64)}};
        const auto rep = baseline_and_speedup(p);
        ASSERT_EQ(rep.mode(ExecMode::prosparsity).accumulations, prosparse_gemm(p).stats.totals.accumulations);
        ASSERT_EQ(rep.mode(ExecMode::bitsparse).accumulations, bitsparse_gemm(p).accumulations);
    }
}
