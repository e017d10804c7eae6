#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "prosparse_cli.hpp"
#include "test_support.hpp"

using namespace prosparse;
using namespace prosparse::fixtures;
using ojson = nlohmann::ordered_json;

namespace {

struct CliRun {
    int code;
    std::string out;
    std::string err;
    ojson json() const { return ojson::parse(out); }
};

CliRun run_cli(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = cli::run(std::move(args), out, err);
    return {code, out.str(), err.str()};
}

void write_text(const std::filesystem::path& p, const std::string& s) { std::ofstream(p) << s; }

class CliTest : public ::testing::Test {
protected:
    void SetUp() override {
        canon = (dir / "canon.txt").string();
        write_text(canon, io::format_spike_text(canonical_tile()));
        canon_w = (dir / "canon.w.prsp").string();
        io::save_weights(canon_w, canonical_weights());
    }
    std::vector<std::string> canon_args(std::vector<std::string> head) const {
        for (const char* a : {"--spikes", canon.c_str(), "--tile-m", "6", "--tile-k", "4", "--format", "json"})
            head.emplace_back(a);
        return head;
    }
    TempDir dir;
    std::string canon, canon_w;
};

}  // namespace

TEST_F(CliTest, DensityCanonical) {
    const auto r = run_cli(canon_args({"density"}));
    ASSERT_EQ(r.code, 0) << r.err;
    const auto t = r.json()["total"];
    EXPECT_NEAR(t["bit_density"].get<double>(), 0.583, 1e-3);
    EXPECT_DOUBLE_EQ(t["pro_density"].get<double>(), 0.25);
    EXPECT_NEAR(t["reduction"].get<double>(), 2.33, 5e-3);
}

TEST_F(CliTest, DensityWithSingleRowTiles) {
    auto args = canon_args({"density"});
    args[4] = "1";  // --tile-m 1
    const auto r = run_cli(args);
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_DOUBLE_EQ(r.json()["total"]["reduction"].get<double>(), 1.0);
}

TEST_F(CliTest, DensityClusteredCollapse) {
    SynthSpec spec;
    spec.kind = SynthKind::clustered;
    spec.rows = 1024;
    spec.cols = 16;
    spec.base_patterns = 8;
    spec.seed = 21;
    io::save_spike_matrix(dir / "c.prsp", generate(spec));
    const auto r = run_cli({"density", "--spikes", (dir / "c.prsp").string(), "--format", "json"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_GE(r.json()["total"]["reduction"].get<double>(), 2.0);
}

TEST_F(CliTest, TextAndJsonCarryTheSameNumbers) {
    const auto j = run_cli(canon_args({"density"})).json();
    auto args = canon_args({"density"});
    args.back() = "text";
    const auto text = run_cli(args).out;
    for (const auto& [key, v] : j["total"].items())
        if (v.is_number()) {
            EXPECT_NE(text.find(key + ": " + v.dump()), std::string::npos) << key;
        }
}

TEST_F(CliTest, CsvHasOneRowPerLayerPlusTotal) {
    auto args = canon_args({"density"});
    args.back() = "csv";
    const auto r = run_cli(args);
    ASSERT_EQ(r.code, 0);
    EXPECT_EQ(std::count(r.out.begin(), r.out.end(), '\n'), 3);
    EXPECT_NE(r.out.find("\ntotal,"), std::string::npos);
}

TEST_F(CliTest, SimulateCanonical) {
    auto args = canon_args({"simulate", "--weights", canon_w});
    const auto r = run_cli(args);
    ASSERT_EQ(r.code, 0) << r.err;
    const auto l = r.json()["layers"][0];
    EXPECT_EQ(l["first_phase_cycles"], 10);
    EXPECT_EQ(l["modes"]["prosparsity"]["compute"], 11);
    EXPECT_EQ(l["modes"]["bitsparse"]["compute"], 18);
    EXPECT_EQ(l["modes"]["dense"]["compute"], 28);
    EXPECT_EQ(l["modes"]["prosparsity"]["total"], 21);
    EXPECT_NEAR(l["speedup"]["total_vs_bitsparse"].get<double>(), 28.0 / 21.0, 1e-12);
}

TEST_F(CliTest, SimulateTwoTileOverlap) {
    write_text(dir / "two.txt", "1010\n1001\n1011\n0010\n1101\n1101\n1110\n1101\n1011\n0111\n0000\n0000\n");
    const auto r = run_cli({"simulate", "--spikes", (dir / "two.txt").string(), "--tile-m", "6", "--tile-k", "4",
                            "--n-cols", "1", "--tiles", "--format", "json"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto l = r.json()["layers"][0];
    EXPECT_EQ(l["tiles"][0]["prosparsity"], 11);
    EXPECT_EQ(l["tiles"][1]["prosparsity"], 18);
    EXPECT_EQ(l["modes"]["prosparsity"]["total"], 39);
}

TEST_F(CliTest, SimulateEmptyMatrix) {
    io::save_spike_matrix(dir / "z.prsp", SpikeMatrix(300, 40));
    const auto r = run_cli({"simulate", "--spikes", (dir / "z.prsp").string(), "--format", "json"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto t = r.json()["total"];
    EXPECT_EQ(t["modes"]["prosparsity"]["compute"], t["modes"]["bitsparse"]["compute"]);
    EXPECT_DOUBLE_EQ(t["speedup"]["compute_vs_bitsparse"].get<double>(), 1.0);
    EXPECT_DOUBLE_EQ(t["speedup"]["total_vs_bitsparse"].get<double>(), 1.0);
}

TEST_F(CliTest, VerifyCanonical) {
    const auto r = run_cli(canon_args({"verify", "--weights", canon_w}));
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = r.json();
    EXPECT_EQ(j["verdict"], "PASS");
    EXPECT_EQ(j["layers"][0]["max_abs_error"], 0.0);
    EXPECT_EQ(j["layers"][0]["accumulations"]["prosparsity"], 6);
}

TEST_F(CliTest, VerifyDetectsCorruptedPrefixTable) {
    const auto r = run_cli(canon_args({"verify", "--weights", canon_w, "--inject-fault"}));
    EXPECT_EQ(r.code, 1);
    const auto l = r.json()["layers"][0];
    EXPECT_EQ(l["status"], "FAIL");
    ASSERT_TRUE(l["first_mismatch"].is_object());
    // row 0 = 1010 takes prefix 0010; the fault adds weight row 2 twice
    EXPECT_EQ(l["first_mismatch"]["row"], 0);
    EXPECT_EQ(l["first_mismatch"]["expected"], 4.0);
    EXPECT_EQ(l["first_mismatch"]["got"], 7.0);
}

TEST_F(CliTest, VerifyFloatMode) {
    SynthRng rng(17);
    io::save_spike_matrix(dir / "f.prsp", random_clustered_spikes(rng, 200, 90, 0.3));
    io::save_weights(dir / "f.w.prsp", generate_float_weights(90, 40, 4));
    const auto r = run_cli({"verify", "--spikes", (dir / "f.prsp").string(), "--weights", (dir / "f.w.prsp").string(),
                            "--mode", "f32", "--tile-m", "64", "--format", "json"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_LE(r.json()["layers"][0]["max_rel_error"].get<double>(), 1e-5);

    const auto bad = run_cli({"verify", "--spikes", (dir / "f.prsp").string(), "--weights",
                              (dir / "f.w.prsp").string(), "--mode", "int8"});
    EXPECT_EQ(bad.code, 2);
}

TEST_F(CliTest, DseSweeps) {
    SynthSpec spec;
    spec.kind = SynthKind::clustered;
    spec.rows = 512;
    spec.cols = 32;
    spec.flip_probability = 0.02;
    spec.seed = 4;
    io::save_spike_matrix(dir / "d.prsp", generate(spec));
    const std::string path = (dir / "d.prsp").string();

    auto r = run_cli({"dse", "--spikes", path, "--m-list", "32,64,128,256", "--k-list", "16", "--format", "json"});
    ASSERT_EQ(r.code, 0) << r.err;
    auto pts = r.json()["layers"][0]["points"];
    ASSERT_EQ(pts.size(), 4u);
    for (std::size_t i = 1; i < pts.size(); ++i)
        EXPECT_LE(pts[i]["pro_density"].get<double>(), pts[i - 1]["pro_density"].get<double>());
    EXPECT_TRUE(r.json()["monotonic"].get<bool>());

    r = run_cli({"dse", "--spikes", path, "--m-list", "128", "--k-list", "4,8,16,32", "--format", "json"});
    ASSERT_EQ(r.code, 0) << r.err;
    pts = r.json()["layers"][0]["points"];
    ASSERT_EQ(pts.size(), 4u);
    EXPECT_EQ(std::count_if(pts.begin(), pts.end(), [](const auto& p) { return p["best"].template get<bool>(); }), 1);

    r = run_cli({"dse", "--spikes", path, "--m-list", "64", "--k-list", "8", "--format", "csv"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(std::count(r.out.begin(), r.out.end(), '\n'), 2);

    EXPECT_EQ(run_cli({"dse", "--spikes", path, "--k-list", "65"}).code, 2);
}

TEST_F(CliTest, OracleCanonical) {
    const auto r = run_cli(canon_args({"oracle"}));
    ASSERT_EQ(r.code, 0) << r.err;
    const auto l = r.json()["layers"][0];
    EXPECT_TRUE(l["equal"].get<bool>());
    EXPECT_DOUBLE_EQ(l["one_prefix"]["pro_density"].get<double>(), 0.25);
    EXPECT_LE(l["two_prefix"]["pro_density"].get<double>(), 0.25);
    EXPECT_EQ(l["forest"]["max_depth"], 2);
    EXPECT_EQ(l["forest"]["trees"], 2);

    const auto bad = run_cli(canon_args({"oracle", "--inject-fault"}));
    EXPECT_EQ(bad.code, 1);
    EXPECT_EQ(bad.json()["layers"][0]["first_difference"]["row"], 0);
}

TEST_F(CliTest, OracleRandomBatch) {
    SynthRng rng(101);
    io::save_spike_matrix(dir / "o.prsp", random_clustered_spikes(rng, 640, 48, 0.25));
    const auto r = run_cli({"oracle", "--spikes", (dir / "o.prsp").string(), "--tile-m", "64", "--format", "json"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(r.json()["layers"][0]["tiles_checked"], 30);
}

TEST_F(CliTest, Cost) {
    auto r = run_cli({"cost", "--delta-s", "0.1335", "--format", "json"});
    ASSERT_EQ(r.code, 0) << r.err;
    auto j = r.json();
    EXPECT_NEAR(j["ratio"].get<double>(), 3.0, 0.05);
    EXPECT_NEAR(j["breakeven_delta_s"].get<double>(), 0.0444, 1e-4);
    EXPECT_EQ(j["ops"]["tcam"], 1048576);

    r = run_cli({"cost", "--tile-m", "128", "--delta-s", "0.1", "--format", "json"});
    EXPECT_NEAR(r.json()["breakeven_delta_s"].get<double>(), 0.0222, 1e-4);

    const double be = 256.0 / (45.0 * 128.0);
    std::ostringstream s;
    s.precision(17);
    s << be;
    r = run_cli({"cost", "--delta-s", s.str(), "--format", "json"});
    EXPECT_NEAR(r.json()["ratio"].get<double>(), 1.0, 1e-12);

    r = run_cli(canon_args({"cost"}));
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(r.json()["delta_s_source"], "measured");
    EXPECT_NEAR(r.json()["delta_s"].get<double>(), 8.0 / 24.0, 1e-12);

    EXPECT_EQ(run_cli({"cost"}).code, 2);
    EXPECT_EQ(run_cli({"cost", "--delta-s", "2"}).code, 2);
}

TEST_F(CliTest, GenRoundTrip) {
    const auto out = (dir / "gen").string();
    const auto r = run_cli({"gen", "--kind", "clustered", "--rows", "300", "--cols", "20", "--bases", "5", "--flip",
                            "0.01", "--seed", "9", "--out", out});
    ASSERT_EQ(r.code, 0) << r.err;
    SynthSpec spec;
    spec.kind = SynthKind::clustered;
    spec.rows = 300;
    spec.cols = 20;
    spec.base_patterns = 5;
    spec.flip_probability = 0.01;
    spec.seed = 9;
    EXPECT_EQ(io::load_spike_matrix(dir / "gen" / "synthetic.prsp"), generate(spec));

    const auto layers = io::load_manifest(dir / "gen" / "manifest.json");
    ASSERT_EQ(layers.size(), 1u);
    EXPECT_EQ(layers[0].N, 128u);
    EXPECT_EQ(run_cli({"verify", "--manifest", (dir / "gen" / "manifest.json").string()}).code, 0);
}

TEST_F(CliTest, GenIsDeterministic) {
    for (const char* d : {"a", "b"})
        ASSERT_EQ(run_cli({"gen", "--density", "0.3", "--seed", "77", "--out", (dir / d).string()}).code, 0);
    EXPECT_EQ(io::read_file(dir / "a" / "synthetic.prsp"), io::read_file(dir / "b" / "synthetic.prsp"));
    EXPECT_EQ(io::read_file(dir / "a" / "synthetic.w.prsp"), io::read_file(dir / "b" / "synthetic.w.prsp"));
}

TEST_F(CliTest, GenRejectsBadDensityBeforeWriting) {
    const auto r = run_cli({"gen", "--density", "1.5", "--out", (dir / "never").string()});
    EXPECT_EQ(r.code, 2);
    EXPECT_FALSE(std::filesystem::exists(dir / "never"));
}

TEST_F(CliTest, ExitCodes) {
    EXPECT_EQ(run_cli({"density", "--spikes", (dir / "missing.prsp").string()}).code, 3);
    write_text(dir / "junk.prsp", "XXXXjunkjunkjunkjunk");
    const auto junk = run_cli({"density", "--spikes", (dir / "junk.prsp").string()});
    EXPECT_EQ(junk.code, 3);
    EXPECT_NE(junk.err.find("byte offset 0"), std::string::npos);
    EXPECT_EQ(run_cli({"density"}).code, 2);
    EXPECT_EQ(run_cli({}).code, 2);
    EXPECT_EQ(run_cli({"density", "--no-such-flag"}).code, 2);
    EXPECT_EQ(run_cli(canon_args({"density", "--tile-k", "65"})).code, 2);
    EXPECT_EQ(run_cli({"density", "--spikes", canon, "--manifest", canon}).code, 2);
    EXPECT_EQ(run_cli({"--help"}).code, 0);
}

TEST_F(CliTest, OutWritesReportFile) {
    auto args = canon_args({"density"});
    args.push_back("--out");
    args.push_back((dir / "report.json").string());
    const auto r = run_cli(args);
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_TRUE(r.out.empty());
    std::ifstream f(dir / "report.json");
    EXPECT_EQ(ojson::parse(f)["command"], "density");
}

TEST_F(CliTest, Deterministic) {
    SynthRng rng(5);
    io::save_spike_matrix(dir / "s.prsp", random_spikes(rng, 100, 30, 0.3));
    for (const char* cmd : {"density", "simulate", "oracle", "verify"}) {
        std::vector<std::string> a{cmd, "--spikes", (dir / "s.prsp").string(), "--seed", "3", "--format", "json"};
        EXPECT_EQ(run_cli(a).out, run_cli(a).out) << cmd;
    }
}
