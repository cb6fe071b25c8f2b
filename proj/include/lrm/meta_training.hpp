#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lrm/checkpoint.hpp"
#include "lrm/optim.hpp"
#include "lrm/video.hpp"

namespace lrm {

enum class MetaOrder { first, second };

MetaOrder meta_order_from_string(const std::string& s);
std::string to_string(MetaOrder order);

struct TrainConfig {
    size_t inner_steps = 3;
    double inner_lr = 1e-2;
    double outer_lr = 1e-4;
    size_t outer_iters = 1500;
    size_t batch_videos = 2;
    size_t coord_subsample = 512;  // N pixels per frame per step
    double lambda_ortho = 1.0;
    MetaOrder meta_order = MetaOrder::first;
    uint64_t seed = 0;
    // Frames of one video share the coordinate subsample within a step by
    // default; per-frame independent subsampling sits behind this flag.
    bool share_coords = true;
    size_t checkpoint_every = 0;  // 0 = final write only

    void validate() const;
};

// One evaluation of the training objective: total = recon + lambda * ortho.
struct LossReport {
    double reconstruction = 0.0;
    double orthogonality = 0.0;
    double total = 0.0;
    size_t iteration = 0;
};

// Inner loop: plain gradient descent on v and Phi from zero, minimizing the
// mean over frames of the subsampled reconstruction term. The orthogonality
// term has no code dependence and is excluded. stream_seed scopes the
// coordinate subsampling; two calls with equal arguments are identical.
LatentCodes inner_adapt(const Model& model, const VideoTensor& video, const TrainConfig& cfg,
                        uint64_t stream_seed);

// Gradient of the full objective w.r.t. theta and beta at inner-adapted
// codes, averaged over the batch, written into model.store grads.
// meta_order=first treats the adapted codes as constants; meta_order=second
// differentiates through the unrolled inner loop (adjoint recursion with
// forward-mode Hessian-vector products).
LossReport compute_outer_gradient(Model& model, const std::vector<const VideoTensor*>& batch,
                                  const TrainConfig& cfg, size_t iteration);

// Matching scalar evaluation (no gradients): the finite-difference target for
// the second-order check. Same seeds, same subsampling, same objective.
double outer_objective(Model& model, const std::vector<const VideoTensor*>& batch,
                       const TrainConfig& cfg, size_t iteration);

// compute_outer_gradient followed by one Adam step.
LossReport outer_step(Model& model, const std::vector<const VideoTensor*>& batch,
                      const TrainConfig& cfg, AdamState& adam, size_t iteration);

struct TrainResult {
    std::vector<LossReport> loss_curve;
};

// Full training: outer_iters steps over shuffled batches. Writes the loss
// curve CSV (iteration, recon, ortho, total) and checkpoints to
// checkpoint_path ("" = no file output; curve still returned).
TrainResult train(Model& model, const std::vector<VideoTensor>& dataset, const TrainConfig& cfg,
                  const std::string& checkpoint_path, const std::string& loss_csv_path);

}  // namespace lrm
