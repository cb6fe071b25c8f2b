#pragma once

#include <string>

#include "lrm/backbone.hpp"
#include "lrm/param_store.hpp"
#include "lrm/subspace.hpp"

namespace lrm {

// The full trainable state: backbone parameters theta and subspace basis beta,
// held jointly in one flat store so the outer optimizer updates both.
struct Model {
    BackboneConfig cfg;
    size_t k = 2;
    SubspaceInit init_mode = SubspaceInit::ortho;
    ParamLayout layout;
    ParamStore store;

    // Read-only view of the subspace basis as a k x q matrix.
    Matrix subspace_matrix() const {
        auto B = store.values("subspace.B");
        return Matrix(k, cfg.modulation_dim, std::vector<double>(B.begin(), B.end()));
    }
};

Model make_model(const BackboneConfig& cfg, size_t k, SubspaceInit init_mode, uint64_t seed);

// "LRMC" checkpoint: magic, format version u32, backbone config counts as
// u32s, k as u32, init mode as u32, omega0 as f64 (the one non-integral
// config field), a manifest of named slices (count, then name/offset/length
// per slice), then the joint parameter buffer as little-endian f64.
void write_checkpoint(const std::string& path, const Model& model);
Model read_checkpoint(const std::string& path);

// "LRML" latent codes: magic, u32 q, u32 k, u32 T, then v and Phi row-major
// as little-endian f64.
void write_latents(const std::string& path, const LatentCodes& codes, size_t k);
LatentCodes read_latents(const std::string& path);

}  // namespace lrm
