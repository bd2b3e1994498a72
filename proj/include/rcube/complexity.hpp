#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "rcube/common.hpp"

namespace rcube {

// One convolutional layer of an n-D network, described by the quantities the
// cost model needs: output feature-map extent per axis, kernel extent per
// axis, channel counts. Transposed convolutions cost the same given their
// output extents, so they share the record. Pooling and similar layers carry
// no multiplies and are simply omitted from model files.
struct LayerSpec {
    enum class Kind { conv, transposed_conv };
    Kind kind = Kind::conv;
    std::size_t n = 0;                      // spatial dimensionality (1..4)
    std::vector<std::uint64_t> feature_map; // output extent per axis, n entries
    std::vector<std::uint64_t> kernel;      // kernel extent per axis, n entries
    std::uint64_t c_in = 0;
    std::uint64_t c_out = 0;

    void validate() const {
        if (n < 1 || n > 4) throw domain_error("layer dimensionality must be 1..4");
        if (feature_map.size() != n || kernel.size() != n)
            throw domain_error("layer extent lists must have n entries");
        for (auto v : feature_map)
            if (v == 0) throw domain_error("feature map extents must be positive");
        for (auto v : kernel)
            if (v == 0) throw domain_error("kernel extents must be positive");
        if (c_in == 0 || c_out == 0) throw domain_error("channel counts must be positive");
    }

    std::uint64_t feature_cells() const {
        std::uint64_t acc = 1;
        for (auto v : feature_map) acc *= v;
        return acc;
    }

    std::uint64_t kernel_cells() const {
        std::uint64_t acc = 1;
        for (auto v : kernel) acc *= v;
        return acc;
    }

    // Multiply count: output cells x kernel taps x input channels x output
    // channels.
    std::uint64_t flops() const { return feature_cells() * kernel_cells() * c_in * c_out; }

    std::uint64_t params() const { return kernel_cells() * c_in * c_out; }
};

struct ModelSpec {
    std::string name;
    std::string note;
    std::vector<LayerSpec> layers;

    void validate() const {
        if (layers.empty()) throw domain_error("model has no layers");
        for (const auto& l : layers) l.validate();
    }
};

inline std::uint64_t flops(const ModelSpec& m) {
    m.validate();
    std::uint64_t acc = 0;
    for (const auto& l : m.layers) acc += l.flops();
    return acc;
}

struct SpaceCost {
    std::uint64_t params = 0;         // learned weights
    std::uint64_t feature_cells = 0;  // activation storage, channels included
};

inline SpaceCost space(const ModelSpec& m) {
    m.validate();
    SpaceCost s;
    for (const auto& l : m.layers) {
        s.params += l.params();
        s.feature_cells += l.feature_cells() * l.c_out;
    }
    return s;
}

inline LayerSpec layer_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw schema_error("layer entry must be a JSON object");
    LayerSpec l;
    const std::string kind = j.value("kind", "conv");
    if (kind == "conv")
        l.kind = LayerSpec::Kind::conv;
    else if (kind == "transposed_conv")
        l.kind = LayerSpec::Kind::transposed_conv;
    else
        throw schema_error("unknown layer kind '" + kind + "'");
    if (!j.contains("n") || !j.at("n").is_number_unsigned())
        throw schema_error("layer missing integer 'n'");
    l.n = j.at("n").get<std::size_t>();
    for (const char* key : {"I", "K"}) {
        if (!j.contains(key) || !j.at(key).is_array())
            throw schema_error(std::string("layer missing array '") + key + "'");
        for (const auto& v : j.at(key)) {
            if (!v.is_number_unsigned()) throw schema_error(std::string("layer '") + key + "' entries must be non-negative integers");
            (key[0] == 'I' ? l.feature_map : l.kernel).push_back(v.get<std::uint64_t>());
        }
    }
    if (!j.contains("c_in") || !j.contains("c_out"))
        throw schema_error("layer missing 'c_in'/'c_out'");
    l.c_in = j.at("c_in").get<std::uint64_t>();
    l.c_out = j.at("c_out").get<std::uint64_t>();
    l.validate();
    return l;
}

inline ModelSpec model_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw schema_error("model document must be a JSON object");
    ModelSpec m;
    if (j.contains("name")) m.name = j.at("name").get<std::string>();
    if (j.contains("note")) m.note = j.at("note").get<std::string>();
    if (!j.contains("layers") || !j.at("layers").is_array())
        throw schema_error("model document needs a 'layers' array");
    for (const auto& lj : j.at("layers")) m.layers.push_back(layer_from_json(lj));
    m.validate();
    return m;
}

struct ModelCost {
    std::string name;
    std::uint64_t flops = 0;
    SpaceCost space;
};

inline std::vector<ModelCost> compare(const std::vector<ModelSpec>& models) {
    std::vector<ModelCost> out;
    for (const auto& m : models) out.push_back({m.name, flops(m), space(m)});
    return out;
}

}  // namespace rcube
