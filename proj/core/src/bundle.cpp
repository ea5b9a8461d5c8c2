#include "convbound/bundle.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <string>

#include <json.hpp>

#include "convbound/linalg.hpp"
#include "convbound/rng.hpp"

namespace convbound {

namespace {

using nlohmann::json;

// Payloads up to this many bytes are stored inline as base64.
constexpr std::size_t kInlineLimit = 1 << 16;

constexpr char kBase64Alphabet[] =
    "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

std::string base64_encode(const std::vector<std::uint8_t>& bytes) {
    std::string out;
    out.reserve((bytes.size() + 2) / 3 * 4);
    std::size_t i = 0;
    for (; i + 3 <= bytes.size(); i += 3) {
        const std::uint32_t v = (bytes[i] << 16) | (bytes[i + 1] << 8) | bytes[i + 2];
        out.push_back(kBase64Alphabet[(v >> 18) & 63]);
        out.push_back(kBase64Alphabet[(v >> 12) & 63]);
        out.push_back(kBase64Alphabet[(v >> 6) & 63]);
        out.push_back(kBase64Alphabet[v & 63]);
    }
    const std::size_t rest = bytes.size() - i;
    if (rest == 1) {
        const std::uint32_t v = bytes[i] << 16;
        out.push_back(kBase64Alphabet[(v >> 18) & 63]);
        out.push_back(kBase64Alphabet[(v >> 12) & 63]);
        out.push_back('=');
        out.push_back('=');
    } else if (rest == 2) {
        const std::uint32_t v = (bytes[i] << 16) | (bytes[i + 1] << 8);
        out.push_back(kBase64Alphabet[(v >> 18) & 63]);
        out.push_back(kBase64Alphabet[(v >> 12) & 63]);
        out.push_back(kBase64Alphabet[(v >> 6) & 63]);
        out.push_back('=');
    }
    return out;
}

int base64_value(char c) {
    if (c >= 'A' && c <= 'Z') return c - 'A';
    if (c >= 'a' && c <= 'z') return c - 'a' + 26;
    if (c >= '0' && c <= '9') return c - '0' + 52;
    if (c == '+') return 62;
    if (c == '/') return 63;
    return -1;
}

std::vector<std::uint8_t> base64_decode(const std::string& text) {
    if (text.size() % 4 != 0) {
        throw ParseError("base64 payload length must be a multiple of 4");
    }
    std::vector<std::uint8_t> out;
    out.reserve(text.size() / 4 * 3);
    for (std::size_t i = 0; i < text.size(); i += 4) {
        int vals[4];
        int pad = 0;
        for (std::size_t k = 0; k < 4; ++k) {
            const char c = text[i + k];
            if (c == '=') {
                vals[k] = 0;
                ++pad;
            } else {
                vals[k] = base64_value(c);
                if (vals[k] < 0 || pad > 0) {
                    throw ParseError("invalid base64 payload");
                }
            }
        }
        const std::uint32_t v =
            (vals[0] << 18) | (vals[1] << 12) | (vals[2] << 6) | vals[3];
        out.push_back((v >> 16) & 0xff);
        if (pad < 2) out.push_back((v >> 8) & 0xff);
        if (pad < 1) out.push_back(v & 0xff);
    }
    return out;
}

void append_le_doubles(std::vector<std::uint8_t>& out, const std::vector<double>& values) {
    for (double v : values) {
        const std::uint64_t bits = std::bit_cast<std::uint64_t>(v);
        for (int b = 0; b < 8; ++b) {
            out.push_back(static_cast<std::uint8_t>((bits >> (8 * b)) & 0xff));
        }
    }
}

std::vector<double> read_le_doubles(const std::uint8_t* bytes, std::size_t count) {
    std::vector<double> out(count);
    for (std::size_t i = 0; i < count; ++i) {
        std::uint64_t bits = 0;
        for (int b = 7; b >= 0; --b) {
            bits = (bits << 8) | bytes[i * 8 + static_cast<std::size_t>(b)];
        }
        out[i] = std::bit_cast<double>(bits);
    }
    return out;
}

const char* kind_string(LayerKind kind) { return layer_kind_name(kind); }

LayerKind parse_kind(const std::string& s) {
    if (s == "fully_connected") return LayerKind::fully_connected;
    if (s == "standard_conv") return LayerKind::standard_conv;
    if (s == "depthwise_conv") return LayerKind::depthwise_conv;
    if (s == "pointwise_conv") return LayerKind::pointwise_conv;
    throw ParseError("unknown layer kind '" + s + "'");
}

Activation parse_activation(const std::string& s) {
    if (s == "relu") return Activation::relu;
    if (s == "identity") return Activation::identity;
    throw ParseError("unknown activation '" + s + "'");
}

// Shape of the payload a layer expects: (rows, cols) of the stored matrix.
std::pair<std::size_t, std::size_t> payload_shape(const LayerSpec& layer) {
    switch (layer.kind) {
        case LayerKind::fully_connected: return {layer.d_out, layer.d_in};
        case LayerKind::standard_conv: return {layer.c_out, layer.spatial_k};
        case LayerKind::depthwise_conv: return {layer.c_in, layer.spatial_k};
        case LayerKind::pointwise_conv: return {layer.c_out, layer.c_in};
    }
    return {0, 0};
}

LayerWeight weight_from_matrix(const LayerSpec& layer, DenseMatrix m) {
    switch (layer.kind) {
        case LayerKind::fully_connected: return m;
        case LayerKind::standard_conv:
            return make_standard_weight(std::move(m), layer.spatial_k, layer.c_in);
        case LayerKind::depthwise_conv: return make_depthwise_weight(std::move(m));
        case LayerKind::pointwise_conv: return make_pointwise_weight(std::move(m));
    }
    throw DomainError("unreachable layer kind");
}

const DenseMatrix& weight_matrix(const LayerWeight& w) {
    if (std::holds_alternative<DenseMatrix>(w)) {
        return std::get<DenseMatrix>(w);
    }
    return std::get<ConvWeight>(w).filters;
}

}  // namespace

NetBundle load_bundle(const std::filesystem::path& manifest_path) {
    std::ifstream in(manifest_path);
    if (!in) {
        throw IoError("cannot open " + manifest_path.string());
    }
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::exception& e) {
        throw ParseError("manifest " + manifest_path.string() + ": " + e.what());
    }

    NetBundle bundle;
    try {
        bundle.spec.input_dim = doc.at("input_dim").get<std::size_t>();
        for (const json& jl : doc.at("layers")) {
            LayerSpec layer;
            layer.kind = parse_kind(jl.at("kind").get<std::string>());
            layer.d_in = jl.at("d_in").get<std::size_t>();
            layer.d_out = jl.at("d_out").get<std::size_t>();
            layer.spatial_k = jl.value("k", std::size_t{0});
            layer.stride = jl.value("stride", std::size_t{1});
            layer.c_in = jl.value("c_in", std::size_t{1});
            layer.c_out = jl.value("c_out", std::size_t{1});
            layer.spatial_h = jl.value("h", std::size_t{0});
            layer.spatial_w = jl.value("w", std::size_t{0});
            layer.kernel_h = jl.value("kh", std::size_t{0});
            layer.kernel_w = jl.value("kw", std::size_t{0});
            layer.lipschitz = jl.value("lipschitz", 1.0);
            layer.activation = parse_activation(jl.value("activation", std::string("relu")));
            bundle.spec.layers.push_back(layer);
        }
        if (!doc.contains("weights")) {
            throw ParseError("manifest has no weights section");
        }
    } catch (const json::exception& e) {
        throw ParseError("manifest " + manifest_path.string() + ": " + e.what());
    }

    const auto violations = validate(bundle.spec);
    if (!violations.empty()) {
        throw ParseError("manifest layer " + std::to_string(violations[0].layer) + ": " +
                         violations[0].message);
    }

    const json& jw = doc.at("weights");
    if (jw.size() != bundle.spec.layers.size()) {
        throw ShapeMismatch("manifest declares " + std::to_string(jw.size()) +
                            " payloads for " + std::to_string(bundle.spec.layers.size()) +
                            " layers");
    }

    for (std::size_t i = 0; i < bundle.spec.layers.size(); ++i) {
        const LayerSpec& layer = bundle.spec.layers[i];
        const json& entry = jw[i];
        std::size_t rows = 0;
        std::size_t cols = 0;
        std::vector<std::uint8_t> bytes;
        try {
            rows = entry.at("rows").get<std::size_t>();
            cols = entry.at("cols").get<std::size_t>();
            if (entry.contains("data")) {
                bytes = base64_decode(entry.at("data").get<std::string>());
            } else {
                const auto file = manifest_path.parent_path() /
                                  entry.at("file").get<std::string>();
                const std::size_t offset = entry.value("offset", std::size_t{0});
                std::ifstream payload(file, std::ios::binary);
                if (!payload) {
                    throw IoError("cannot open payload " + file.string());
                }
                payload.seekg(static_cast<std::streamoff>(offset));
                bytes.resize(rows * cols * 8);
                payload.read(reinterpret_cast<char*>(bytes.data()),
                             static_cast<std::streamsize>(bytes.size()));
                if (payload.gcount() != static_cast<std::streamsize>(bytes.size())) {
                    throw IoError("payload " + file.string() + " truncated at layer " +
                                  std::to_string(i + 1));
                }
            }
        } catch (const json::exception& e) {
            throw ParseError("weights entry " + std::to_string(i + 1) + ": " + e.what());
        }

        const auto [want_rows, want_cols] = payload_shape(layer);
        if (rows != want_rows || cols != want_cols) {
            throw ShapeMismatch("layer " + std::to_string(i + 1) + ": payload is " +
                                std::to_string(rows) + "x" + std::to_string(cols) +
                                ", layer expects " + std::to_string(want_rows) + "x" +
                                std::to_string(want_cols));
        }
        if (bytes.size() != rows * cols * 8) {
            throw ShapeMismatch("layer " + std::to_string(i + 1) + ": payload holds " +
                                std::to_string(bytes.size() / 8) + " values, expected " +
                                std::to_string(rows * cols));
        }
        std::vector<double> values = read_le_doubles(bytes.data(), rows * cols);
        for (double v : values) {
            if (!std::isfinite(v)) {
                throw NonFiniteWeight("layer " + std::to_string(i + 1) +
                                      " payload contains a non-finite value");
            }
        }
        bundle.weights.push_back(
            weight_from_matrix(layer, DenseMatrix(rows, cols, std::move(values))));
    }
    return bundle;
}

void save_bundle(const NetBundle& bundle, const std::filesystem::path& manifest_path) {
    const auto violations = validate(bundle.spec);
    if (!violations.empty()) {
        throw DomainError("refusing to save invalid bundle: layer " +
                          std::to_string(violations[0].layer) + ": " + violations[0].message);
    }
    if (bundle.weights.size() != bundle.spec.layers.size()) {
        throw DimensionMismatch("expected one weight per layer");
    }
    for (std::size_t i = 0; i < bundle.spec.layers.size(); ++i) {
        check_weight_shape(bundle.spec.layers[i], bundle.weights[i], i + 1);
    }

    std::size_t total_bytes = 0;
    for (const LayerWeight& w : bundle.weights) {
        total_bytes += weight_matrix(w).size() * 8;
    }
    const bool inline_payload = total_bytes <= kInlineLimit;

    json doc;
    doc["input_dim"] = bundle.spec.input_dim;
    doc["layers"] = json::array();
    for (const LayerSpec& layer : bundle.spec.layers) {
        json jl;
        jl["kind"] = kind_string(layer.kind);
        jl["d_in"] = layer.d_in;
        jl["d_out"] = layer.d_out;
        jl["k"] = layer.spatial_k;
        jl["stride"] = layer.stride;
        jl["c_in"] = layer.c_in;
        jl["c_out"] = layer.c_out;
        if (layer.is_2d()) {
            jl["h"] = layer.spatial_h;
            jl["w"] = layer.spatial_w;
            jl["kh"] = layer.kernel_h;
            jl["kw"] = layer.kernel_w;
        }
        jl["lipschitz"] = layer.lipschitz;
        jl["activation"] = activation_name(layer.activation);
        doc["layers"].push_back(jl);
    }

    doc["weights"] = json::array();
    std::vector<std::uint8_t> sidecar;
    const std::string sidecar_name = manifest_path.stem().string() + ".weights.bin";
    for (const LayerWeight& w : bundle.weights) {
        const DenseMatrix& m = weight_matrix(w);
        json entry;
        entry["rows"] = m.rows();
        entry["cols"] = m.cols();
        if (inline_payload) {
            std::vector<std::uint8_t> bytes;
            bytes.reserve(m.size() * 8);
            append_le_doubles(bytes, m.data());
            entry["data"] = base64_encode(bytes);
        } else {
            entry["file"] = sidecar_name;
            entry["offset"] = sidecar.size();
            append_le_doubles(sidecar, m.data());
        }
        doc["weights"].push_back(entry);
    }

    if (!inline_payload) {
        std::ofstream payload(manifest_path.parent_path() / sidecar_name, std::ios::binary);
        if (!payload) {
            throw IoError("cannot write payload next to " + manifest_path.string());
        }
        payload.write(reinterpret_cast<const char*>(sidecar.data()),
                      static_cast<std::streamsize>(sidecar.size()));
        if (!payload) {
            throw IoError("failed writing payload next to " + manifest_path.string());
        }
    }

    std::ofstream out(manifest_path);
    if (!out) {
        throw IoError("cannot write " + manifest_path.string());
    }
    out << doc.dump(2) << "\n";
    if (!out) {
        throw IoError("failed writing " + manifest_path.string());
    }
}

NetBundle gen_weights(const NetworkSpec& spec, std::uint64_t seed, ScaleMode mode,
                      double sigma) {
    require_valid(spec);
    if (mode == ScaleMode::gaussian && !(sigma > 0.0)) {
        throw DomainError("gaussian scale needs sigma > 0");
    }
    SplitMix64 rng(seed);
    NetBundle bundle;
    bundle.spec = spec;
    for (const LayerSpec& layer : spec.layers) {
        const auto [rows, cols] = payload_shape(layer);
        std::vector<double> values(rows * cols);
        for (double& v : values) {
            v = rng.next_gaussian();
        }
        DenseMatrix m(rows, cols, std::move(values));
        if (mode == ScaleMode::unit_frobenius) {
            const double f = frobenius_norm(m);
            if (f > 0.0) {
                m = scale(m, 1.0 / f);
            }
        } else {
            m = scale(m, sigma);
        }
        bundle.weights.push_back(weight_from_matrix(layer, std::move(m)));
    }
    return bundle;
}

}  // namespace convbound
