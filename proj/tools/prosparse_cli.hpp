#pragma once

// The `prosparse` command-line tool. Lives in a header so the test suite can
// drive it in-process; main.cpp only forwards argv.
//
// Every command builds one JSON report. Text and CSV output are rendered from
// that same document, so all three formats carry identical numbers.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "prosparse/prosparse.hpp"

namespace prosparse::cli {

using json = nlohmann::ordered_json;

enum ExitCode : int { exit_ok = 0, exit_failed = 1, exit_usage = 2, exit_io = 3 };

inline constexpr double float_tolerance = 1e-5;

// ---------------------------------------------------------------- rendering

inline std::string scalar_text(const json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_null()) return "-";
    return v.dump();
}

inline void render_text(const json& j, std::ostream& os, int indent = 0) {
    const std::string pad(static_cast<std::size_t>(indent), ' ');
    for (const auto& [key, v] : j.items()) {
        if (v.is_object()) {
            os << pad << key << ":\n";
            render_text(v, os, indent + 2);
        } else if (v.is_array() && !v.empty() && v.front().is_object()) {
            for (std::size_t i = 0; i < v.size(); ++i) {
                os << pad << key << "[" << i << "]:\n";
                render_text(v[i], os, indent + 2);
            }
        } else if (v.is_array()) {
            os << pad << key << ": [";
            for (std::size_t i = 0; i < v.size(); ++i) os << (i ? ", " : "") << scalar_text(v[i]);
            os << "]\n";
        } else {
            os << pad << key << ": " << scalar_text(v) << "\n";
        }
    }
}

inline void flatten(const json& j, const std::string& prefix, std::vector<std::pair<std::string, std::string>>& out) {
    for (const auto& [key, v] : j.items()) {
        const std::string name = prefix.empty() ? key : prefix + "." + key;
        if (v.is_object()) {
            flatten(v, name, out);
        } else if (v.is_array()) {
            std::string s;
            for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ";" : "") + (v[i].is_object() ? v[i].dump() : scalar_text(v[i]));
            out.emplace_back(name, s);
        } else {
            out.emplace_back(name, v.is_null() ? "" : scalar_text(v));
        }
    }
}

inline std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
    return q + "\"";
}

inline void render_csv(const std::vector<json>& rows, std::ostream& os) {
    std::vector<std::string> header;
    std::vector<std::vector<std::pair<std::string, std::string>>> flat;
    for (const auto& r : rows) {
        flat.emplace_back();
        flatten(r, "", flat.back());
        for (const auto& [k, v] : flat.back())
            if (std::find(header.begin(), header.end(), k) == header.end()) header.push_back(k);
    }
    for (std::size_t i = 0; i < header.size(); ++i) os << (i ? "," : "") << csv_field(header[i]);
    os << "\n";
    for (const auto& f : flat) {
        for (std::size_t i = 0; i < header.size(); ++i) {
            auto it = std::find_if(f.begin(), f.end(), [&](const auto& p) { return p.first == header[i]; });
            os << (i ? "," : "") << (it == f.end() ? "" : csv_field(it->second));
        }
        os << "\n";
    }
}

struct Report {
    json doc;
    std::vector<json> table;  // CSV rows
    int exit_code = exit_ok;
};

inline void emit(const Report& r, const std::string& format, const std::string& out_path, std::ostream& out) {
    std::ostringstream s;
    if (format == "json")
        s << r.doc.dump(2) << "\n";
    else if (format == "csv")
        render_csv(r.table, s);
    else
        render_text(r.doc, s);
    if (out_path.empty()) {
        out << s.str();
        return;
    }
    std::ofstream f(out_path);
    if (!f) throw io_error("cannot open " + out_path + " for writing");
    f << s.str();
    if (!f) throw io_error("write failed: " + out_path);
}

// Infinity and NaN have no JSON spelling.
inline json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

// ------------------------------------------------------------------- inputs

struct Options {
    std::string manifest;
    std::string spikes;
    std::string weights;
    std::size_t n_cols = 0;  // output columns when no weights are given; 0 = tile n
    TileConfig tile{};
    std::string mode = "int8";
    std::uint64_t seed = 0;
    std::string format = "text";
    std::string out;
    PipelineConfig pipeline{};
};

struct Layer {
    std::string name;
    SpikeMatrix spikes;
    std::optional<io::AnyWeights> weights;
    std::size_t n_cols;
};

inline std::size_t weight_rows(const io::AnyWeights& w) {
    return std::visit([](const auto& m) { return m.rows(); }, w);
}
inline std::size_t weight_cols(const io::AnyWeights& w) {
    return std::visit([](const auto& m) { return m.cols(); }, w);
}

inline std::vector<Layer> load_layers(const Options& o) {
    std::vector<Layer> layers;
    if (!o.manifest.empty()) {
        for (const auto& lt : io::load_manifest(o.manifest)) {
            std::optional<io::AnyWeights> w;
            if (lt.weights) w = io::load_weights(*lt.weights);
            layers.push_back({lt.name, io::load_spikes_any(lt.spikes), std::move(w), lt.N});
        }
        return layers;
    }
    if (o.spikes.empty()) throw usage_error("give --manifest or --spikes");
    Layer l{std::filesystem::path(o.spikes).stem().string(), io::load_spikes_any(o.spikes), std::nullopt,
            o.n_cols ? o.n_cols : o.tile.n};
    if (!o.weights.empty()) {
        l.weights = io::load_weights(o.weights);
        if (weight_rows(*l.weights) != l.spikes.cols())
            throw format_error("weight file has " + std::to_string(weight_rows(*l.weights)) + " rows, spike matrix has " +
                                   std::to_string(l.spikes.cols()) + " columns",
                               8);
        if (o.n_cols && o.n_cols != weight_cols(*l.weights))
            throw usage_error("--n-cols disagrees with the weight file's column count");
        l.n_cols = weight_cols(*l.weights);
    }
    layers.push_back(std::move(l));
    return layers;
}

inline json tile_json(const TileConfig& t) { return {{"m", t.m}, {"n", t.n}, {"k", t.k}}; }

// ------------------------------------------------------------------- verify

struct Mismatch {
    std::size_t row = 0, col = 0;
    double expected = 0.0, got = 0.0;
};

struct VerifyOutcome {
    bool pass = true;
    json doc;
};

// Replaces the pattern of the first row that has a prefix with the full row,
// which double counts the prefix's spikes. Fires once per run.
inline ExecOptions fault_injection(bool enabled, std::shared_ptr<bool> fired) {
    ExecOptions opts;
    if (!enabled) return opts;
    opts.meta_hook = [fired](TileMeta& meta) {
        if (*fired) return;
        for (std::size_t i = 0; i < meta.table.size(); ++i) {
            auto& e = meta.table.entries[i];
            if (!e.prefix) continue;
            std::uint64_t row = e.pattern;
            for (std::size_t p = *e.prefix;;) {  // rebuild the row word along the prefix chain
                row |= meta.table[p].pattern;
                if (!meta.table[p].prefix) break;
                p = *meta.table[p].prefix;
            }
            e.pattern = row;
            *fired = true;
            return;
        }
    };
    return opts;
}

template <class W>
VerifyOutcome verify_layer(const Layer& l, const WeightMatrix<W>& w, const TileConfig& tile, bool inject) {
    GemmProblem<W> p{l.spikes, w, tile};
    const auto dense = dense_gemm(p);
    const auto bits = bitsparse_gemm(p);
    auto fired = std::make_shared<bool>(false);
    const auto pro = prosparse_gemm(p, fault_injection(inject, fired));

    const std::size_t M = dense.rows(), N = dense.cols();
    constexpr bool exact = std::is_integral_v<W>;

    // Float mode scales the error by sum |w| over the row's spikes, which
    // bounds every partial sum either order can produce.
    std::vector<double> scale;
    if constexpr (!exact) {
        scale.assign(M * N, 0.0);
        for (std::size_t i = 0; i < M; ++i)
            for (std::size_t t = 0; t < l.spikes.cols(); ++t)
                if (l.spikes.get(i, t))
                    for (std::size_t j = 0; j < N; ++j) scale[i * N + j] += std::fabs(static_cast<double>(w(t, j)));
    }

    auto compare = [&](const OutputMatrix<W>& got, std::uint64_t& mismatches, double& max_err,
                       std::optional<Mismatch>& first) {
        for (std::size_t i = 0; i < M; ++i)
            for (std::size_t j = 0; j < N; ++j) {
                const double ref = static_cast<double>(dense(i, j)), val = static_cast<double>(got(i, j));
                double err = 0.0;
                bool bad = false;
                if constexpr (exact) {
                    bad = got(i, j) != dense(i, j);
                    err = std::fabs(val - ref);
                } else {
                    const double s = std::max(std::fabs(ref), scale[i * N + j]);
                    err = s > 0.0 ? std::fabs(val - ref) / s : (val == ref ? 0.0 : INFINITY);
                    bad = !(err <= float_tolerance);
                }
                max_err = std::max(max_err, err);
                if (bad) {
                    ++mismatches;
                    if (!first) first = Mismatch{i, j, ref, val};
                }
            }
    };

    std::uint64_t pro_bad = 0, bit_bad = 0;
    double pro_err = 0.0, bit_err = 0.0;
    std::optional<Mismatch> pro_first, bit_first;
    compare(pro.output, pro_bad, pro_err, pro_first);
    compare(bits.output, bit_bad, bit_err, bit_first);

    VerifyOutcome o;
    o.pass = pro_bad == 0 && bit_bad == 0;
    o.doc = {{"name", l.name},
             {"M", M},
             {"K", l.spikes.cols()},
             {"N", N},
             {"mode", exact ? "int8" : "f32"},
             {"status", o.pass ? "PASS" : "FAIL"},
             {"prosparsity_mismatches", pro_bad},
             {"bitsparse_mismatches", bit_bad},
             {exact ? "max_abs_error" : "max_rel_error", number(std::max(pro_err, bit_err))},
             {"accumulations", {{"bitsparse", bits.accumulations}, {"prosparsity", pro.stats.totals.accumulations}}},
             {"first_mismatch", nullptr}};
    if (inject) o.doc["fault_injected"] = *fired;
    const auto& first = pro_first ? pro_first : bit_first;
    if (first)
        o.doc["first_mismatch"] = {{"engine", pro_first ? "prosparsity" : "bitsparse"},
                                   {"row", first->row},
                                   {"col", first->col},
                                   {"expected", first->expected},
                                   {"got", first->got}};
    return o;
}

template <class W>
WeightMatrix<W> convert_weights(const io::AnyWeights& any) {
    if (const auto* m = std::get_if<WeightMatrix<W>>(&any)) return *m;
    if constexpr (std::is_same_v<W, float>) {
        const auto& src = std::get<WeightMatrix<std::int8_t>>(any);
        WeightMatrix<float> out(src.rows(), src.cols());
        for (std::size_t r = 0; r < src.rows(); ++r)
            for (std::size_t c = 0; c < src.cols(); ++c) out(r, c) = static_cast<float>(src(r, c));
        return out;
    } else {
        throw usage_error("float32 weights cannot run in int8 mode; pass --mode f32");
    }
}

inline Report cmd_verify(const Options& o, bool inject) {
    Report r;
    r.doc = {{"command", "verify"}, {"tile", tile_json(o.tile)}, {"mode", o.mode}};
    if (o.mode == "f32") r.doc["tolerance"] = float_tolerance;
    bool all = true;
    json layers = json::array();
    for (const auto& l : load_layers(o)) {
        VerifyOutcome v;
        const bool synthetic = !l.weights;
        const std::uint64_t wseed = o.seed;
        if (o.mode == "f32") {
            const auto w = synthetic ? generate_float_weights(l.spikes.cols(), l.n_cols, wseed)
                                     : convert_weights<float>(*l.weights);
            v = verify_layer(l, w, o.tile, inject);
        } else {
            const auto w = synthetic ? generate_int8_weights(l.spikes.cols(), l.n_cols, wseed)
                                     : convert_weights<std::int8_t>(*l.weights);
            v = verify_layer(l, w, o.tile, inject);
        }
        v.doc["weights"] = synthetic ? "synthetic seed " + std::to_string(wseed) : "file";
        all = all && v.pass;
        layers.push_back(v.doc);
        r.table.push_back(v.doc);
    }
    r.doc["layers"] = layers;
    r.doc["verdict"] = all ? "PASS" : "FAIL";
    r.exit_code = all ? exit_ok : exit_failed;
    return r;
}

// ------------------------------------------------------------------ density

inline json density_json(const DensityReport& d, double cells) {
    const double rows = static_cast<double>(d.row_slices());
    auto frac = [&](std::uint64_t v) { return rows > 0 ? static_cast<double>(v) / rows : 0.0; };
    return {{"spike_bits", d.spike_bits},
            {"pattern_bits", d.pattern_bits},
            {"bit_density", number(d.spike_bits / cells)},
            {"pro_density", number(d.pattern_bits / cells)},
            {"reduction", number(d.reduction())},
            {"row_slices", d.row_slices()},
            {"em_fraction", frac(d.em_rows)},
            {"pm_fraction", frac(d.pm_rows)},
            {"no_prefix_fraction", frac(d.no_prefix_rows)},
            {"prefix_ratio_eligible", d.prefix_ratio_one_eligible()}};
}

inline Report cmd_density(const Options& o) {
    Report r;
    r.doc = {{"command", "density"}, {"tile", tile_json(o.tile)}};
    json layers = json::array();
    DensityReport total;
    double cells = 0.0;
    for (const auto& l : load_layers(o)) {
        const auto d = density_metrics(l.spikes, o.tile);
        json j = {{"name", l.name}, {"M", l.spikes.rows()}, {"K", l.spikes.cols()}};
        j.update(density_json(d, d.cells()));
        layers.push_back(j);
        r.table.push_back(j);
        total += d;
        cells += d.cells();
    }
    json t = {{"name", "total"}};
    t.update(density_json(total, cells));
    r.doc["layers"] = layers;
    r.doc["total"] = t;
    r.table.push_back(t);
    return r;
}

// ----------------------------------------------------------------- simulate

inline json run_json(const RunReport& rep) {
    json modes;
    for (auto m : all_modes) {
        const auto& t = rep.mode(m);
        modes[to_string(m)] = {{"compute", t.compute}, {"total", t.total}, {"accumulations", t.accumulations}};
    }
    return {{"first_phase_cycles", rep.first_phase_cycles},
            {"exposed_phase_cycles", rep.exposed_phase_cycles},
            {"modes", modes},
            {"speedup",
             {{"compute_vs_bitsparse", rep.speedup_compute(ExecMode::bitsparse)},
              {"total_vs_bitsparse", rep.speedup_total(ExecMode::bitsparse)},
              {"compute_vs_dense", rep.speedup_compute(ExecMode::dense)},
              {"total_vs_dense", rep.speedup_total(ExecMode::dense)}}},
            {"traffic",
             {{"spike_bytes", rep.traffic.spike_bytes},
              {"weight_bytes", rep.traffic.weight_bytes},
              {"output_bytes", rep.traffic.output_bytes},
              {"prefix_read_bytes", rep.traffic.prefix_read_bytes}}}};
}

inline Report cmd_simulate(const Options& o, bool per_tile) {
    o.pipeline.validate();
    Report r;
    r.doc = {{"command", "simulate"},
             {"tile", tile_json(o.tile)},
             {"pipeline",
              {{"prosparsity_stages", o.pipeline.prosparsity_stages},
               {"processor_stages", o.pipeline.processor_stages},
               {"pe_width", o.pipeline.pe_width}}}};
    json layers = json::array();
    RunReport total;
    for (const auto& l : load_layers(o)) {
        const std::size_t wbytes = l.weights && std::holds_alternative<WeightMatrix<float>>(*l.weights) ? 4 : 1;
        const auto rep = baseline_and_speedup(l.spikes, l.n_cols, o.tile, o.pipeline, wbytes);
        json j = {{"name", l.name}, {"M", l.spikes.rows()}, {"K", l.spikes.cols()}, {"N", l.n_cols}};
        j.update(run_json(rep));
        if (per_tile) {
            json tiles = json::array();
            for (const auto& t : rep.tiles)
                tiles.push_back({{"row_tile", t.row_tile},
                                 {"k_tile", t.k_tile},
                                 {"rows", t.rows},
                                 {"cols", t.cols},
                                 {"prosparsity_phase", t.prosparsity_cycles},
                                 {"dense", t.compute(ExecMode::dense)},
                                 {"bitsparse", t.compute(ExecMode::bitsparse)},
                                 {"prosparsity", t.compute(ExecMode::prosparsity)}});
            j["tiles"] = tiles;
        }
        layers.push_back(j);
        json row = j;
        row.erase("tiles");
        r.table.push_back(row);
        total += rep;
    }
    json t = {{"name", "total"}};
    t.update(run_json(total));
    r.doc["layers"] = layers;
    r.doc["total"] = t;
    r.table.push_back(t);
    return r;
}

// ---------------------------------------------------------------------- dse

inline Report cmd_dse(const Options& o, const std::vector<std::size_t>& m_list, const std::vector<std::size_t>& k_list,
                      std::ostream& err) {
    for (auto m : m_list) detail::require(m >= 1, "m values must be >= 1");
    for (auto k : k_list) detail::require(k >= 1 && k <= max_tile_k, "k values must lie in [1, 64]");
    Report r;
    r.doc = {{"command", "dse"}, {"tile_n", o.tile.n}, {"m_list", m_list}, {"k_list", k_list}};
    json layers = json::array();
    bool monotonic = true;
    for (const auto& l : load_layers(o)) {
        const auto pts = dse_sweep(l.spikes, m_list, k_list, l.n_cols, o.tile.n, o.pipeline);
        json points = json::array();
        for (const auto& p : pts) {
            json j = {{"m", p.m},
                      {"k", p.k},
                      {"bit_density", p.bit_density},
                      {"pro_density", p.pro_density},
                      {"prosparsity_cycles", p.prosparsity_cycles},
                      {"bitsparse_cycles", p.bitsparse_cycles},
                      {"relative_latency", p.relative_latency},
                      {"best", p.best}};
            points.push_back(j);
            json row = {{"layer", l.name}};
            row.update(j);
            r.table.push_back(row);
        }
        json violations = json::array();
        for (const auto& v : check_m_monotonicity(pts)) {
            violations.push_back({{"k", v.k},
                                  {"smaller_m", v.smaller_m},
                                  {"larger_m", v.larger_m},
                                  {"smaller_density", v.smaller_density},
                                  {"larger_density", v.larger_density}});
            err << "monotonicity violated in layer '" << l.name << "' at k=" << v.k << ": m=" << v.larger_m
                << " has pro density " << v.larger_density << " > " << v.smaller_density << " at m=" << v.smaller_m
                << "\n";
        }
        monotonic = monotonic && violations.empty();
        layers.push_back({{"name", l.name}, {"points", points}, {"violations", violations}});
    }
    r.doc["layers"] = layers;
    r.doc["monotonic"] = monotonic;
    r.exit_code = monotonic ? exit_ok : exit_failed;
    return r;
}

// ------------------------------------------------------------------- oracle

inline Report cmd_oracle(const Options& o, bool inject) {
    detail::require(o.tile.m <= oracle::max_rows, "tile m exceeds the oracle bound of 4096 rows");
    Report r;
    r.doc = {{"command", "oracle"}, {"tile", tile_json(o.tile)}};
    json layers = json::array();
    bool all = true;
    bool injected = false;
    for (const auto& l : load_layers(o)) {
        std::size_t tiles = 0, max_depth = 0, trees = 0;
        json first = nullptr;
        for (const auto& t : iterate_tiles(l.spikes.rows(), l.spikes.cols(), 1, o.tile)) {
            const SpikeMatrix st = spike_tile(l.spikes, t);
            PrefixTable engine = build_meta(st).table;
            if (inject && !injected) {
                for (auto& e : engine.entries)
                    if (e.prefix) {
                        e.prefix.reset();
                        e.pattern = st.row_word(e.row);
                        injected = true;
                        break;
                    }
            }
            const PrefixTable ref = oracle::oracle_prefix_select(st);
            ++tiles;
            const auto fs = forest_stats(ref);
            max_depth = std::max(max_depth, fs.depth);
            trees += fs.tree_count;
            if (!first.is_null()) continue;
            for (std::size_t i = 0; i < st.rows(); ++i) {
                if (engine[i].prefix == ref[i].prefix && engine[i].pattern == ref[i].pattern) continue;
                auto pj = [](const std::optional<std::size_t>& p) { return p ? json(*p) : json(nullptr); };
                first = {{"row_tile", t.row_tile},
                         {"k_tile", t.k_tile},
                         {"row", t.row_begin + i},
                         {"engine_prefix", pj(engine[i].prefix)},
                         {"oracle_prefix", pj(ref[i].prefix)},
                         {"engine_pattern", engine[i].pattern},
                         {"oracle_pattern", ref[i].pattern}};
                break;
            }
        }
        const auto d = density_metrics(l.spikes, o.tile, true);
        const bool equal = first.is_null();
        all = all && equal;
        json j = {{"name", l.name},
                  {"tiles_checked", tiles},
                  {"equal", equal},
                  {"first_difference", first},
                  {"one_prefix",
                   {{"pro_density", d.pro_density()},
                    {"prefix_ratio", d.prefix_ratio_one()},
                    {"prefix_ratio_eligible", d.prefix_ratio_one_eligible()}}},
                  {"two_prefix",
                   {{"pro_density", number(d.pro_density_two().value_or(NAN))},
                    {"single_ratio", d.prefix_ratio_two_single()},
                    {"double_ratio", d.prefix_ratio_two_double()},
                    {"single_ratio_eligible", d.prefix_ratio_two_single_eligible()},
                    {"double_ratio_eligible", d.prefix_ratio_two_double_eligible()}}},
                  {"forest", {{"max_depth", max_depth}, {"trees", trees}}}};
        layers.push_back(j);
        r.table.push_back(j);
    }
    r.doc["layers"] = layers;
    r.doc["verdict"] = all ? "PASS" : "FAIL";
    r.exit_code = all ? exit_ok : exit_failed;
    return r;
}

// --------------------------------------------------------------------- cost

inline Report cmd_cost(const Options& o, std::optional<double> delta_s, double flop_ratio) {
    const CostModelConfig cfg{flop_ratio};
    cfg.validate();
    std::string source = "flag";
    if (!delta_s) {
        if (o.manifest.empty() && o.spikes.empty()) throw usage_error("cost needs --delta-s or spike inputs to measure it");
        DensityReport total;
        double cells = 0.0;
        for (const auto& l : load_layers(o)) {
            const auto d = density_metrics(l.spikes, o.tile);
            total += d;
            cells += d.cells();
        }
        delta_s = (static_cast<double>(total.spike_bits) - static_cast<double>(total.pattern_bits)) / cells;
        source = "measured";
    }
    const auto c = cost_report(o.tile.m, o.tile.k, o.tile.n, *delta_s, cfg);
    Report r;
    r.doc = {{"command", "cost"},
             {"m", c.m},
             {"k", c.k},
             {"n", c.n},
             {"delta_s", c.delta_s},
             {"delta_s_source", source},
             {"flop_to_tcam_ratio", cfg.flop_to_tcam_ratio},
             {"ops", {{"tcam", c.ops.tcam_ops}, {"sorter", c.ops.sorter_ops}, {"pruner", c.ops.pruner_ops}}},
             {"saved_flops", c.saved_flops},
             {"ratio", c.ratio},
             {"ratio_full", c.ratio_full},
             {"breakeven_delta_s", c.breakeven_delta_s},
             {"beneficial", c.ratio > 1.0}};
    r.table.push_back(r.doc);
    return r;
}

// ---------------------------------------------------------------------- gen

struct GenOptions {
    std::string kind = "bernoulli";
    std::size_t rows = 256;
    std::size_t cols = 16;
    double density = 0.3;
    std::size_t bases = 8;
    double flip = 0.0;
    std::size_t n_cols = 128;
    std::string name = "synthetic";
};

inline Report cmd_gen(const Options& o, const GenOptions& g) {
    SynthSpec spec;
    spec.kind = g.kind == "clustered" ? SynthKind::clustered : SynthKind::bernoulli;
    spec.rows = g.rows;
    spec.cols = g.cols;
    spec.density = g.density;
    spec.base_patterns = g.bases;
    spec.flip_probability = g.flip;
    spec.seed = o.seed;
    spec.validate();
    detail::require(g.n_cols >= 1, "--n-cols must be >= 1");
    detail::require(!o.out.empty(), "gen needs --out DIR");
    detail::require(!g.name.empty() && g.name.find_first_of("/\\") == std::string::npos,
                    "--name must be a plain file stem");

    const SpikeMatrix s = generate(spec);
    const std::filesystem::path dir(o.out);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw io_error("cannot create " + dir.string() + ": " + ec.message());

    io::LayerTrace lt{g.name, dir / (g.name + ".prsp"), dir / (g.name + ".w.prsp"), g.rows, g.cols, g.n_cols};
    io::save_spike_matrix(lt.spikes, s);
    // weight seed is derived so spikes and weights are not drawn from one stream
    const std::uint64_t wseed = o.seed ^ 0x9e3779b97f4a7c15ULL;
    if (o.mode == "f32")
        io::save_weights(*lt.weights, generate_float_weights(g.cols, g.n_cols, wseed));
    else
        io::save_weights(*lt.weights, generate_int8_weights(g.cols, g.n_cols, wseed));
    const auto manifest = dir / "manifest.json";
    {
        std::ofstream f(manifest);
        if (!f) throw io_error("cannot open " + manifest.string() + " for writing");
        f << io::manifest_json({lt}, dir).dump(2) << "\n";
        if (!f) throw io_error("write failed: " + manifest.string());
    }

    Report r;
    r.doc = {{"command", "gen"},
             {"kind", g.kind},
             {"rows", g.rows},
             {"cols", g.cols},
             {"n_cols", g.n_cols},
             {"density", g.density},
             {"bases", g.bases},
             {"flip", g.flip},
             {"seed", o.seed},
             {"weight_mode", o.mode},
             {"bit_density", static_cast<double>(s.popcount()) / (static_cast<double>(g.rows) * g.cols)},
             {"files",
              {{"spikes", lt.spikes.string()}, {"weights", lt.weights->string()}, {"manifest", manifest.string()}}}};
    r.table.push_back(r.doc);
    return r;
}

// --------------------------------------------------------------------- main

inline int run(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Product-sparsity spiking GeMM toolkit", "prosparse"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "prosparse 0.1.0");

    Options o;
    GenOptions g;
    bool inject = false, per_tile = false;
    std::vector<std::size_t> m_list{32, 64, 128, 256}, k_list{4, 8, 16, 32};
    std::optional<double> delta_s;
    double flop_ratio = 45.0;

    auto add_common = [&](CLI::App* sub, bool inputs) {
        if (inputs) {
            auto* man = sub->add_option("--manifest", o.manifest, "layer manifest (JSON)");
            auto* sp = sub->add_option("--spikes", o.spikes, "spike matrix (.prsp, or .txt for text)");
            man->excludes(sp);
            sub->add_option("--weights", o.weights, "weight matrix (.prsp)")->needs(sp);
            sub->add_option("--n-cols", o.n_cols, "output columns when no weight file is given");
        }
        sub->add_option("--tile-m", o.tile.m, "rows per tile")->capture_default_str();
        sub->add_option("--tile-n", o.tile.n, "output columns per tile")->capture_default_str();
        sub->add_option("--tile-k", o.tile.k, "spike columns per tile (<= 64)")->capture_default_str();
        sub->add_option("--mode", o.mode, "numeric mode")->check(CLI::IsMember({"int8", "f32"}))->capture_default_str();
        sub->add_option("--seed", o.seed, "seed for synthetic data")->capture_default_str();
        sub->add_option("--format", o.format, "report format")
            ->check(CLI::IsMember({"text", "json", "csv"}))
            ->capture_default_str();
        sub->add_option("--out", o.out, "write the report here instead of stdout");
    };

    auto* verify = app.add_subcommand("verify", "check prosparsity and bit-sparse GeMM against dense");
    add_common(verify, true);
    verify->add_flag("--inject-fault", inject)->group("");

    auto* density = app.add_subcommand("density", "bit and pro density per layer");
    add_common(density, true);

    auto* simulate = app.add_subcommand("simulate", "cycle model for dense, bit-sparse and prosparsity");
    add_common(simulate, true);
    simulate->add_option("--pe-width", o.pipeline.pe_width, "output columns per PE pass")->capture_default_str();
    simulate->add_option("--prosparsity-stages", o.pipeline.prosparsity_stages)->capture_default_str();
    simulate->add_option("--processor-stages", o.pipeline.processor_stages)->capture_default_str();
    simulate->add_flag("--tiles", per_tile, "include per-tile cycles");

    auto* dse = app.add_subcommand("dse", "sweep tile sizes m and k");
    add_common(dse, true);
    dse->add_option("--m-list", m_list, "m values")->delimiter(',')->capture_default_str();
    dse->add_option("--k-list", k_list, "k values")->delimiter(',')->capture_default_str();

    auto* orc = app.add_subcommand("oracle", "compare prefix selection with the brute-force oracle");
    add_common(orc, true);
    orc->add_flag("--inject-fault", inject)->group("");

    auto* cost = app.add_subcommand("cost", "benefit-cost ratio of prefix detection");
    add_common(cost, true);
    cost->add_option("--delta-s", delta_s, "sparsity gain in [0, 1]; measured from inputs when omitted");
    cost->add_option("--flop-ratio", flop_ratio, "energy of one FLOP in TCAM ops")->capture_default_str();

    auto* gen = app.add_subcommand("gen", "write a synthetic layer (spikes, weights, manifest) to --out DIR");
    add_common(gen, false);
    gen->add_option("--kind", g.kind)->check(CLI::IsMember({"bernoulli", "clustered"}))->capture_default_str();
    gen->add_option("--rows", g.rows)->capture_default_str();
    gen->add_option("--cols", g.cols)->capture_default_str();
    gen->add_option("--density", g.density)->capture_default_str();
    gen->add_option("--bases", g.bases, "clustered base patterns")->capture_default_str();
    gen->add_option("--flip", g.flip, "clustered bit-flip probability")->capture_default_str();
    gen->add_option("--n-cols", g.n_cols, "weight columns")->capture_default_str();
    gen->add_option("--name", g.name, "layer name and file stem")->capture_default_str();

    std::reverse(args.begin(), args.end());
    try {
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? exit_ok : exit_usage;
    }

    try {
        Report r;
        if (*gen) {
            r = cmd_gen(o, g);
            emit(r, o.format, "", out);
            return r.exit_code;
        }
        o.tile.validate();
        if (*verify)
            r = cmd_verify(o, inject);
        else if (*density)
            r = cmd_density(o);
        else if (*simulate)
            r = cmd_simulate(o, per_tile);
        else if (*dse)
            r = cmd_dse(o, m_list, k_list, err);
        else if (*orc)
            r = cmd_oracle(o, inject);
        else
            r = cmd_cost(o, delta_s, flop_ratio);
        emit(r, o.format, o.out, out);
        return r.exit_code;
    } catch (const usage_error& e) {
        err << "error: " << e.what() << "\n";
        return exit_usage;
    } catch (const format_error& e) {
        err << "error: " << e.what() << " (byte offset " << e.offset() << ")\n";
        return exit_io;
    } catch (const io_error& e) {
        err << "error: " << e.what() << "\n";
        return exit_io;
    } catch (const integrity_error& e) {
        err << "internal consistency check failed: " << e.what() << "\n";
        return exit_failed;
    }
}

inline int run(int argc, char** argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    return run(std::vector<std::string>(argv + 1, argv + argc), out, err);
}

}  // namespace prosparse::cli
