#include <gtest/gtest.h>

#include <bit>

#include "test_support.hpp"

using namespace prosparse;
using namespace prosparse::fixtures;
namespace po = prosparse::oracle;

TEST(Oracle, ClassifyExamples) {
    const po::SpikeSet a{0, 3}, b{0, 1, 3}, c{0, 2}, d{1, 2};
    const auto pm = po::classify(0, 1, a, b);
    EXPECT_EQ(pm.kind, po::Relation::partial_match);
    EXPECT_EQ(pm.subset_row, 0u);
    EXPECT_EQ(pm.common, a);

    EXPECT_EQ(po::classify(0, 1, b, a).subset_row, 1u);
    EXPECT_EQ(po::classify(0, 1, a, a).kind, po::Relation::exact_match);
    EXPECT_EQ(po::classify(0, 1, a, c).kind, po::Relation::intersection);
    EXPECT_EQ(po::classify(0, 1, a, d).kind, po::Relation::disjoint);
    EXPECT_EQ(po::classify(0, 1, {}, {}).kind, po::Relation::disjoint);
}

TEST(Oracle, CanonicalGraph) {
    const auto g = po::brute_force_graph(canonical_tile());
    ASSERT_EQ(g.size(), 15u);
    auto find = [&](std::size_t i, std::size_t j) {
        for (const auto& p : g)
            if (p.i == i && p.j == j) return p;
        ADD_FAILURE() << "missing pair " << i << "," << j;
        return po::PairRelation{};
    };
    EXPECT_EQ(find(4, 5).kind, po::Relation::exact_match);
    EXPECT_EQ(find(0, 2).kind, po::Relation::partial_match);
    EXPECT_EQ(find(0, 2).subset_row, 0u);
    EXPECT_EQ(find(1, 4).subset_row, 1u);
    EXPECT_EQ(find(0, 1).kind, po::Relation::intersection);
    EXPECT_EQ(find(0, 1).common, (po::SpikeSet{0}));
    EXPECT_EQ(find(1, 3).kind, po::Relation::disjoint);
}

TEST(Oracle, RelationsPartitionPairsAndAreSymmetric) {
    SynthRng rng(8);
    for (int iter = 0; iter < 100; ++iter) {
        const auto tile = random_clustered_spikes(rng, uniform_in(rng, 2, 40), uniform_in(rng, 1, 20), 0.3);
        const auto sets = po::spike_sets(tile);
        const auto g = po::brute_force_graph(tile);
        ASSERT_EQ(g.size(), tile.rows() * (tile.rows() - 1) / 2);
        for (const auto& p : g) {
            const auto q = po::classify(p.j, p.i, sets[p.j], sets[p.i]);
            ASSERT_EQ(p.kind, q.kind);
            ASSERT_EQ(p.common, q.common);
            ASSERT_EQ(p.subset_row, q.subset_row);
            const bool ij = subset_test(tile, p.i, p.j), ji = subset_test(tile, p.j, p.i);
            switch (p.kind) {
                case po::Relation::exact_match: ASSERT_TRUE(ij && ji && !sets[p.i].empty()); break;
                case po::Relation::partial_match: ASSERT_NE(ij, ji); break;
                case po::Relation::intersection: ASSERT_TRUE(!ij && !ji); break;
                case po::Relation::disjoint: ASSERT_TRUE(p.common.empty()); break;
            }
        }
    }
}

TEST(Oracle, PrefixSelectCanonical) {
    const auto table = po::oracle_prefix_select(canonical_tile());
    EXPECT_EQ(table.prefixes(), opt({3, -1, 1, -1, 1, 4}));
}

static void expect_tables_equal(const PrefixTable& engine, const PrefixTable& oracle, int iter) {
    ASSERT_EQ(engine.size(), oracle.size());
    for (std::size_t i = 0; i < engine.size(); ++i) {
        ASSERT_EQ(engine[i].prefix, oracle[i].prefix) << "case " << iter << " row " << i;
        ASSERT_EQ(engine[i].pattern, oracle[i].pattern) << "case " << iter << " row " << i;
    }
}

TEST(Oracle, EngineAgreesOnRandomTiles) {
    SynthRng rng(31337);
    for (int iter = 0; iter < 600; ++iter) {
        const std::size_t m = uniform_in(rng, 1, 128), k = uniform_in(rng, 4, 64);
        const double d = density_in(rng, 0.05, 0.6);
        const auto tile = iter % 2 ? random_spikes(rng, m, k, d) : random_clustered_spikes(rng, m, k, d);
        expect_tables_equal(build_meta(tile).table, po::oracle_prefix_select(tile), iter);
        if (HasFatalFailure()) return;
    }
}

TEST(Oracle, EngineAgreesOnDegenerateTiles) {
    const std::vector<SpikeMatrix> tiles{
        SpikeMatrix(7, 16),
        SpikeMatrix::from_strings(std::vector<std::string>(10, "1111")),
        SpikeMatrix::from_strings(std::vector<std::string>(10, "0100")),
        SpikeMatrix::from_strings({"1000", "0100", "0010", "0001"}),
        SpikeMatrix::from_strings({"1100", "1110", "1111", "1000", "0000"}),
    };
    int iter = 0;
    for (const auto& t : tiles) expect_tables_equal(build_meta(t).table, po::oracle_prefix_select(t), iter++);
}

TEST(TwoPrefix, CanonicalTile) {
    const auto a = po::two_prefix_analysis(canonical_tile());
    EXPECT_EQ(a.rows[2].first, 1u);
    EXPECT_EQ(a.rows[2].second, 3u);
    EXPECT_TRUE(a.rows[2].residual.empty());
    EXPECT_EQ(a.rows[0].first, 3u);
    EXPECT_FALSE(a.rows[0].second);
    EXPECT_EQ(a.spike_bits, 14u);
    EXPECT_EQ(a.one_prefix_bits, 6u);
    EXPECT_EQ(a.two_prefix_bits, 5u);
    EXPECT_EQ(a.rows_double, 1u);
    EXPECT_EQ(a.rows_single, 3u);
    EXPECT_EQ(a.eligible_rows, 5u);
}

TEST(TwoPrefix, SecondPrefixIsDisjointFromFirst) {
    // 111100: first prefix 111000, then 011000 overlaps it and 000100 does not
    const auto tile = SpikeMatrix::from_strings({"111100", "111000", "000100", "011000"});
    const auto a = po::two_prefix_analysis(tile);
    EXPECT_EQ(a.rows[0].first, 1u);
    EXPECT_EQ(a.rows[0].second, 2u);
    EXPECT_TRUE(a.rows[0].residual.empty());
}

TEST(TwoPrefix, DensityOrdering) {
    SynthRng rng(555);
    for (int iter = 0; iter < 200; ++iter) {
        const std::size_t m = uniform_in(rng, 1, 128), k = uniform_in(rng, 4, 32);
        const auto tile = random_clustered_spikes(rng, m, k, density_in(rng, 0.05, 0.6));
        const auto a = po::two_prefix_analysis(tile);
        const auto meta = build_meta(tile);
        std::size_t engine_bits = 0;
        for (const auto& e : meta.table.entries) engine_bits += static_cast<std::size_t>(std::popcount(e.pattern));
        ASSERT_EQ(a.one_prefix_bits, engine_bits);
        ASSERT_LE(a.two_prefix_bits, a.one_prefix_bits);
        ASSERT_LE(a.one_prefix_bits, a.spike_bits);
        ASSERT_LE(a.rows_single + a.rows_double, a.eligible_rows);
    }
}

TEST(Forest, CanonicalStats) {
    const auto fs = forest_stats(build_meta(canonical_tile()).table);
    EXPECT_EQ(fs.depth, 2u);
    EXPECT_EQ(fs.tree_count, 2u);
    EXPECT_EQ(fs.nodes_per_depth, (std::vector<std::size_t>{2, 3, 1}));
}

TEST(Forest, ChainAndFlat) {
    const auto chain = forest_stats(build_meta(SpikeMatrix::from_strings(std::vector<std::string>(5, "11"))).table);
    EXPECT_EQ(chain.depth, 4u);
    EXPECT_EQ(chain.tree_count, 1u);

    const auto flat = forest_stats(build_meta(SpikeMatrix::from_strings({"10", "01", "00"})).table);
    EXPECT_EQ(flat.depth, 0u);
    EXPECT_EQ(flat.tree_count, 3u);
    EXPECT_EQ(flat.nodes_per_depth, (std::vector<std::size_t>{3}));
}

TEST(Forest, CycleIsAnIntegrityError) {
    PrefixTable t{2, {{0, 1, 0}, {1, 0, 0}}};
    EXPECT_THROW(forest_stats(t), integrity_error);
    PrefixTable self{2, {{0, 0, 0}}};
    EXPECT_THROW(forest_stats(self), integrity_error);
}

TEST(Density, CanonicalTile) {
    const auto tile = canonical_tile();
    const auto d = density_metrics(tile, build_meta(tile).table);
    EXPECT_DOUBLE_EQ(d.bit_density(), 14.0 / 24.0);
    EXPECT_DOUBLE_EQ(d.pro_density(), 6.0 / 24.0);
    EXPECT_NEAR(d.reduction(), 2.333, 1e-3);
    EXPECT_EQ(d.em_rows, 1u);
    EXPECT_EQ(d.pm_rows, 3u);
    EXPECT_EQ(d.eligible_rows, 5u);

    const auto whole = density_metrics(tile, TileConfig{6, 1, 4}, true);
    ASSERT_TRUE(whole.pro_density_two());
    EXPECT_DOUBLE_EQ(*whole.pro_density_two(), 5.0 / 24.0);
    EXPECT_DOUBLE_EQ(whole.prefix_ratio_one(), 4.0 / 6.0);
    EXPECT_DOUBLE_EQ(whole.prefix_ratio_one_eligible(), 4.0 / 5.0);
    EXPECT_DOUBLE_EQ(whole.prefix_ratio_two_single(), 3.0 / 6.0);
    EXPECT_DOUBLE_EQ(whole.prefix_ratio_two_double(), 1.0 / 6.0);
}

TEST(Density, ZeroMatrix) {
    const auto d = density_metrics(SpikeMatrix(10, 10), TileConfig{4, 1, 4});
    EXPECT_EQ(d.bit_density(), 0.0);
    EXPECT_EQ(d.pro_density(), 0.0);
    EXPECT_EQ(d.reduction(), 1.0);
    EXPECT_EQ(d.prefix_ratio_one_eligible(), 0.0);
}

TEST(Density, ProNeverExceedsBitAcrossTilings) {
    SynthRng rng(12);
    for (int iter = 0; iter < 100; ++iter) {
        const auto s = random_clustered_spikes(rng, uniform_in(rng, 1, 300), uniform_in(rng, 1, 100), 0.3);
        const TileConfig tc{uniform_in(rng, 1, 256), 1, uniform_in(rng, 1, 64)};
        const auto d = density_metrics(s, tc, true);
        ASSERT_LE(d.pattern_bits, d.spike_bits);
        ASSERT_LE(*d.pattern_bits_two, d.pattern_bits);
        ASSERT_EQ(d.row_slices(), s.rows() * ceil_div(s.cols(), tc.k));
    }
}
