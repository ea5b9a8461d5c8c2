#pragma once

#include <cstdint>
#include <filesystem>

#include "convbound/network.hpp"

namespace convbound {

// A network description plus one weight payload per layer. The on-disk form
// is a JSON manifest with raw little-endian float64 payloads, either inline
// (base64) or in a sidecar file referenced by name and byte offset.
struct NetBundle {
    NetworkSpec spec;
    std::vector<LayerWeight> weights;
};

NetBundle load_bundle(const std::filesystem::path& manifest_path);

// Writes the manifest (and a sidecar payload file when the total payload
// exceeds the inline threshold). load(save(b)) reproduces b bit for bit.
void save_bundle(const NetBundle& bundle, const std::filesystem::path& manifest_path);

enum class ScaleMode { unit_frobenius, gaussian };

// Deterministic random weights for a validated spec: one SplitMix64 stream
// seeded with `seed`, layers filled in order. unit_frobenius rescales every
// layer to Frobenius norm 1; gaussian fills N(0, sigma^2) entries.
NetBundle gen_weights(const NetworkSpec& spec, std::uint64_t seed, ScaleMode mode,
                      double sigma = 1.0);

}  // namespace convbound
