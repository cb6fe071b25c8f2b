#pragma once

#include <cstdint>
#include <vector>

#include "lrm/checkpoint.hpp"
#include "lrm/video.hpp"

namespace lrm {

struct FitConfig {
    size_t fit_steps = 100;
    double fit_lr = 1e-2;
    // 0 = full coordinate grid every step (the default); otherwise N pixels
    // per frame per step, drawn from the seeded stream.
    size_t coord_subsample = 0;
    bool share_coords = true;
    uint64_t seed = 0;
};

struct FitResult {
    LatentCodes codes;
    VideoTensor reconstruction;            // rendered from the final codes, clamped at export
    std::vector<double> loss_curve;        // mean-over-frames loss per fit step
    std::vector<double> per_frame_loss;    // final full-grid MSE per frame
    size_t fit_steps_used = 0;
};

// Frozen-backbone encoding: gradient descent on v and Phi only. theta and
// beta are asserted bitwise unchanged before returning.
FitResult fit_video(const Model& model, const VideoTensor& video, const FitConfig& cfg);

struct CompressionStats {
    size_t original_values = 0;  // T*H*W
    size_t code_values = 0;      // q + T*k
    double ratio = 0.0;          // original / code, exact
};

// Latent-only accounting: the shared backbone is amortized across the whole
// dataset and therefore excluded from the per-video code size.
CompressionStats compression_stats(size_t frames, size_t height, size_t width, size_t q, size_t k);

}  // namespace lrm
