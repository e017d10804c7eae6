#pragma once

// Layer manifest: a JSON document
//
//   {"layers": [{"name": "fc1", "spikes": "fc1.prsp", "weights": "fc1.w.prsp",
//                "M": 256, "K": 16, "N": 128}, ...]}
//
// "weights" is optional. Relative paths resolve against the manifest's
// directory. Loading checks that every referenced file exists and that its
// header agrees with the declared dimensions.

#include <cstddef>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "prosparse/io.hpp"

namespace prosparse::io {

struct LayerTrace {
    std::string name;
    std::filesystem::path spikes;
    std::optional<std::filesystem::path> weights;
    std::size_t M = 0;
    std::size_t K = 0;
    std::size_t N = 0;
};

namespace wire {

inline std::size_t positive_dim(const nlohmann::json& layer, const char* key, const std::string& name) {
    if (!layer.contains(key) || !layer[key].is_number_unsigned() || layer[key].get<std::size_t>() == 0)
        throw format_error("layer '" + name + "': \"" + key + "\" must be a positive integer", 0);
    return layer[key].get<std::size_t>();
}

}  // namespace wire

inline void validate_layer(const LayerTrace& l) {
    if (!std::filesystem::exists(l.spikes)) throw io_error("layer '" + l.name + "': missing spike file " + l.spikes.string());
    if (l.spikes.extension() == ".txt") {
        const SpikeMatrix s = load_spikes_any(l.spikes);
        if (s.rows() != l.M || s.cols() != l.K)
            throw format_error("layer '" + l.name + "': spike file is " + std::to_string(s.rows()) + "x" +
                                   std::to_string(s.cols()) + ", manifest declares " + std::to_string(l.M) + "x" +
                                   std::to_string(l.K),
                               0);
    } else {
        const PrspHeader h = peek_header(l.spikes);
        if (h.kind != PayloadKind::spike) throw format_error("layer '" + l.name + "': spike file holds weights", 5);
        if (h.rows != l.M || h.cols != l.K)
            throw format_error("layer '" + l.name + "': spike file is " + std::to_string(h.rows) + "x" +
                                   std::to_string(h.cols) + ", manifest declares " + std::to_string(l.M) + "x" +
                                   std::to_string(l.K),
                               8);
    }
    if (l.weights) {
        if (!std::filesystem::exists(*l.weights))
            throw io_error("layer '" + l.name + "': missing weight file " + l.weights->string());
        const PrspHeader h = peek_header(*l.weights);
        if (h.kind == PayloadKind::spike) throw format_error("layer '" + l.name + "': weight file holds spikes", 5);
        if (h.rows != l.K || h.cols != l.N)
            throw format_error("layer '" + l.name + "': weight file is " + std::to_string(h.rows) + "x" +
                                   std::to_string(h.cols) + ", expected K x N = " + std::to_string(l.K) + "x" +
                                   std::to_string(l.N),
                               8);
    }
}

inline std::vector<LayerTrace> parse_manifest(const nlohmann::json& doc, const std::filesystem::path& base_dir) {
    if (!doc.is_object() || !doc.contains("layers") || !doc["layers"].is_array())
        throw format_error("manifest needs a top-level \"layers\" list", 0);
    std::vector<LayerTrace> out;
    std::set<std::string> names;
    for (const auto& layer : doc["layers"]) {
        if (!layer.is_object() || !layer.contains("name") || !layer["name"].is_string())
            throw format_error("manifest layer without a string \"name\"", 0);
        LayerTrace l;
        l.name = layer["name"].get<std::string>();
        if (!names.insert(l.name).second) throw format_error("duplicate layer name '" + l.name + "'", 0);
        if (!layer.contains("spikes") || !layer["spikes"].is_string())
            throw format_error("layer '" + l.name + "': missing \"spikes\" path", 0);
        l.spikes = base_dir / layer["spikes"].get<std::string>();
        if (layer.contains("weights") && !layer["weights"].is_null()) {
            if (!layer["weights"].is_string()) throw format_error("layer '" + l.name + "': \"weights\" must be a path", 0);
            l.weights = base_dir / layer["weights"].get<std::string>();
        }
        l.M = wire::positive_dim(layer, "M", l.name);
        l.K = wire::positive_dim(layer, "K", l.name);
        l.N = wire::positive_dim(layer, "N", l.name);
        validate_layer(l);
        out.push_back(std::move(l));
    }
    return out;
}

inline std::vector<LayerTrace> load_manifest(const std::filesystem::path& path) {
    std::ifstream f(path);
    if (!f) throw io_error("cannot open manifest " + path.string());
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(f);
    } catch (const nlohmann::json::parse_error& e) {
        throw format_error(std::string("manifest is not valid JSON: ") + e.what(), e.byte);
    }
    return parse_manifest(doc, path.parent_path());
}

inline nlohmann::json manifest_json(const std::vector<LayerTrace>& layers, const std::filesystem::path& base_dir) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& l : layers) {
        nlohmann::json j{{"name", l.name},
                         {"spikes", std::filesystem::relative(l.spikes, base_dir).generic_string()},
                         {"M", l.M},
                         {"K", l.K},
                         {"N", l.N}};
        if (l.weights) j["weights"] = std::filesystem::relative(*l.weights, base_dir).generic_string();
        arr.push_back(std::move(j));
    }
    return nlohmann::json{{"layers", arr}};
}

}  // namespace prosparse::io
