#include "lrm/meta_training.hpp"

#include <cmath>
#include <cstring>
#include <stdexcept>
#include <type_traits>

#include "lrm/csv.hpp"
#include "lrm/dual.hpp"
#include "lrm/threading.hpp"

namespace lrm {

MetaOrder meta_order_from_string(const std::string& s) {
    if (s == "first") return MetaOrder::first;
    if (s == "second") return MetaOrder::second;
    throw std::invalid_argument("unknown meta_order: " + s + " (expected first|second)");
}

std::string to_string(MetaOrder order) { return order == MetaOrder::first ? "first" : "second"; }

void TrainConfig::validate() const {
    if (!(inner_lr > 0.0) || !(outer_lr > 0.0))
        throw std::invalid_argument("TrainConfig: learning rates must be > 0");
    if (coord_subsample < 1) throw std::invalid_argument("TrainConfig: coord_subsample must be >= 1");
    if (!(lambda_ortho >= 0.0)) throw std::invalid_argument("TrainConfig: lambda_ortho must be >= 0");
    if (batch_videos < 1) throw std::invalid_argument("TrainConfig: batch_videos must be >= 1");
}

namespace {

constexpr uint64_t kOuterCoordSalt = 0x00AAFFu;

// One coordinate subsample: packed (x,y) pairs plus pixel indices for target
// gathering. N >= H*W degenerates to the full grid.
struct CoordSample {
    std::vector<double> coords;
    std::vector<size_t> indices;
};

CoordSample sample_coords(const std::vector<double>& grid, size_t n_pixels, size_t n, uint64_t seed) {
    CoordSample cs;
    if (n >= n_pixels) {
        cs.indices.resize(n_pixels);
        for (size_t i = 0; i < n_pixels; ++i) cs.indices[i] = i;
    } else {
        Rng rng(seed);
        cs.indices = rng.sample_indices(n_pixels, n);
    }
    cs.coords.resize(cs.indices.size() * 2);
    for (size_t i = 0; i < cs.indices.size(); ++i) {
        cs.coords[i * 2 + 0] = grid[cs.indices[i] * 2 + 0];
        cs.coords[i * 2 + 1] = grid[cs.indices[i] * 2 + 1];
    }
    return cs;
}

std::vector<CoordSample> step_samples(const std::vector<double>& grid, size_t n_pixels,
                                      const TrainConfig& cfg, size_t frames, uint64_t stream_seed,
                                      size_t step) {
    std::vector<CoordSample> samples;
    if (cfg.share_coords) {
        samples.push_back(sample_coords(grid, n_pixels, cfg.coord_subsample,
                                        Rng::mix(stream_seed, step)));
    } else {
        for (size_t t = 0; t < frames; ++t)
            samples.push_back(sample_coords(grid, n_pixels, cfg.coord_subsample,
                                            Rng::mix(Rng::mix(stream_seed, step), 0x1000 + t)));
    }
    return samples;
}

// Mean over frames of the per-frame reconstruction term at the given codes.
// Accumulates (+=) gradients w.r.t. the joint parameters (theta and beta,
// through both the backbone and the m = v + B phi composition), v, and Phi.
// Per-frame scratch buffers reduced in frame order keep results independent
// of the thread count.
template <typename S>
S video_recon_grads(const BackboneConfig& cfg, const ParamLayout& lay, const S* params,
                    const VideoTensor& video, const std::vector<CoordSample>& samples, size_t k,
                    const S* v, const S* phi, S* grad_params, S* grad_v, S* grad_phi) {
    const size_t T = video.frames;
    const size_t q = cfg.modulation_dim;
    const S* B = params + lay.subspace_B;
    const S weight = S(1.0 / static_cast<double>(T));

    std::vector<S> losses(T, S{});
    std::vector<std::vector<S>> gm_per_frame(T);
    std::vector<std::vector<S>> gp_per_frame;
    const bool want_params = grad_params != nullptr;
    if (want_params) gp_per_frame.assign(T, {});

    const auto run_frame = [&](size_t t) {
        const CoordSample& cs = samples.size() == 1 ? samples[0] : samples[t];
        const size_t n = cs.indices.size();
        std::vector<double> targets(n);
        const double* frame = video.frame(t);
        for (size_t i = 0; i < n; ++i) targets[i] = frame[cs.indices[i]];

        std::vector<S> m(q);
        for (size_t j = 0; j < q; ++j) m[j] = v[j];
        for (size_t i = 0; i < k; ++i) {
            const S c = phi[t * k + i];
            const S* brow = B + i * q;
            for (size_t j = 0; j < q; ++j) m[j] += c * brow[j];
        }

        gm_per_frame[t].assign(q, S{});
        S* gp = nullptr;
        if (want_params) {
            gp_per_frame[t].assign(lay.total, S{});
            gp = gp_per_frame[t].data();
        }
        losses[t] = backbone_recon_grads(cfg, lay, params, cs.coords.data(), targets.data(), n,
                                         m.data(), gp, gm_per_frame[t].data(), weight);
    };

    if constexpr (std::is_same_v<S, double>) {
        parallel_for(T, run_frame);
    } else {
        for (size_t t = 0; t < T; ++t) run_frame(t);
    }

    S total{};
    for (size_t t = 0; t < T; ++t) {
        total += losses[t];
        const S* gm = gm_per_frame[t].data();
        if (grad_v != nullptr)
            for (size_t j = 0; j < q; ++j) grad_v[j] += gm[j];
        if (grad_phi != nullptr) {
            for (size_t i = 0; i < k; ++i) {
                S acc{};
                const S* brow = B + i * q;
                for (size_t j = 0; j < q; ++j) acc += brow[j] * gm[j];
                grad_phi[t * k + i] += acc;
            }
        }
        if (want_params) {
            const S* gp = gp_per_frame[t].data();
            for (size_t i = 0; i < lay.total; ++i) grad_params[i] += gp[i];
            // composition path: dL/dB[i][j] += phi_t[i] * g_m[j]
            for (size_t i = 0; i < k; ++i) {
                const S c = phi[t * k + i];
                S* gB = grad_params + lay.subspace_B + i * q;
                for (size_t j = 0; j < q; ++j) gB[j] += c * gm[j];
            }
        }
    }
    return total;
}

// Inner loop on S-typed codes with the parameter buffer held fixed. Optionally
// records the codes before each step (flattened v followed by Phi) for the
// second-order adjoint pass.
template <typename S>
S inner_adapt_generic(const BackboneConfig& cfg, const ParamLayout& lay, const S* params,
                      const VideoTensor& video, const TrainConfig& tc, uint64_t stream_seed,
                      std::vector<S>& v, std::vector<S>& phi,
                      std::vector<std::vector<S>>* trajectory) {
    const size_t q = cfg.modulation_dim;
    const size_t k = (lay.total - lay.subspace_B) / q;
    const size_t T = video.frames;
    const std::vector<double> grid = make_coord_grid(video.height, video.width);

    v.assign(q, S{});
    phi.assign(T * k, S{});
    S last_loss{};
    for (size_t step = 0; step < tc.inner_steps; ++step) {
        if (trajectory != nullptr) {
            std::vector<S> snapshot(v);
            snapshot.insert(snapshot.end(), phi.begin(), phi.end());
            trajectory->push_back(std::move(snapshot));
        }
        const auto samples = step_samples(grid, video.frame_size(), tc, T, stream_seed, step);
        std::vector<S> gv(q, S{});
        std::vector<S> gphi(T * k, S{});
        last_loss = video_recon_grads<S>(cfg, lay, params, video, samples, k, v.data(), phi.data(),
                                         nullptr, gv.data(), gphi.data());
        if (!std::isfinite(value_of(last_loss)))
            throw std::runtime_error("inner_adapt: non-finite loss at inner step " +
                                     std::to_string(step));
        const S lr = S(tc.inner_lr);
        for (size_t i = 0; i < q; ++i) v[i] -= lr * gv[i];
        for (size_t i = 0; i < T * k; ++i) phi[i] -= lr * gphi[i];
    }
    return last_loss;
}

}  // namespace

LatentCodes inner_adapt(const Model& model, const VideoTensor& video, const TrainConfig& cfg,
                        uint64_t stream_seed) {
    std::vector<double> v, phi;
    inner_adapt_generic<double>(model.cfg, model.layout, model.store.values().data(), video, cfg,
                                stream_seed, v, phi, nullptr);
    LatentCodes codes;
    codes.v = std::move(v);
    codes.phi = Matrix(video.frames, model.k, std::move(phi));
    return codes;
}

namespace {

uint64_t video_stream_seed(const TrainConfig& cfg, size_t iteration, size_t video_index) {
    return Rng::mix(Rng::mix(cfg.seed, 0xA0A0 + iteration), video_index + 1);
}

// First-order path: gradients w.r.t. theta and beta at the adapted codes,
// codes treated as constants.
double first_order_video_grad(const Model& model, const VideoTensor& video, const TrainConfig& cfg,
                              uint64_t stream, std::vector<double>& grad) {
    std::vector<double> v, phi;
    inner_adapt_generic<double>(model.cfg, model.layout, model.store.values().data(), video, cfg,
                                stream, v, phi, nullptr);
    const std::vector<double> grid = make_coord_grid(video.height, video.width);
    const auto outer = step_samples(grid, video.frame_size(), cfg, video.frames, stream,
                                    kOuterCoordSalt);
    return video_recon_grads<double>(model.cfg, model.layout, model.store.values().data(), video,
                                     outer, model.k, v.data(), phi.data(), grad.data(), nullptr,
                                     nullptr);
}

// Second-order path: backpropagation through the unrolled inner loop.
// The adjoint on the codes is advanced with Hessian-vector products obtained
// by re-running the gradient computation on dual numbers, probing along the
// adjoint. One dual pass per inner step yields both H_cc*lambda (code-code)
// and H_pc*lambda (parameter-code) exactly.
double second_order_video_grad(const Model& model, const VideoTensor& video, const TrainConfig& cfg,
                               uint64_t stream, std::vector<double>& grad) {
    const BackboneConfig& bc = model.cfg;
    const ParamLayout& lay = model.layout;
    const double* params = model.store.values().data();
    const size_t q = bc.modulation_dim;
    const size_t k = model.k;
    const size_t T = video.frames;
    const std::vector<double> grid = make_coord_grid(video.height, video.width);

    std::vector<std::vector<double>> trajectory;
    std::vector<double> v, phi;
    inner_adapt_generic<double>(bc, lay, params, video, cfg, stream, v, phi, &trajectory);

    // Outer loss, its parameter gradient, and the initial adjoint on codes.
    const auto outer = step_samples(grid, video.frame_size(), cfg, T, stream, kOuterCoordSalt);
    std::vector<double> lambda_v(q, 0.0), lambda_phi(T * k, 0.0);
    const double outer_loss =
        video_recon_grads<double>(bc, lay, params, video, outer, k, v.data(), phi.data(),
                                  grad.data(), lambda_v.data(), lambda_phi.data());

    std::vector<Dual> dual_params(lay.total);
    for (size_t i = 0; i < lay.total; ++i) dual_params[i] = Dual(params[i], 0.0);

    for (size_t step = cfg.inner_steps; step-- > 0;) {
        const std::vector<double>& c = trajectory[step];
        std::vector<Dual> dv(q), dphi(T * k);
        for (size_t i = 0; i < q; ++i) dv[i] = Dual(c[i], lambda_v[i]);
        for (size_t i = 0; i < T * k; ++i) dphi[i] = Dual(c[q + i], lambda_phi[i]);

        const auto samples = step_samples(grid, video.frame_size(), cfg, T, stream, step);
        std::vector<Dual> gp(lay.total, Dual{});
        std::vector<Dual> gv(q, Dual{});
        std::vector<Dual> gphi(T * k, Dual{});
        video_recon_grads<Dual>(bc, lay, dual_params.data(), video, samples, k, dv.data(),
                                dphi.data(), gp.data(), gv.data(), gphi.data());

        // grad += -lr * H_pc lambda ; lambda -= lr * H_cc lambda
        for (size_t i = 0; i < lay.total; ++i) grad[i] -= cfg.inner_lr * gp[i].d;
        for (size_t i = 0; i < q; ++i) lambda_v[i] -= cfg.inner_lr * gv[i].d;
        for (size_t i = 0; i < T * k; ++i) lambda_phi[i] -= cfg.inner_lr * gphi[i].d;
    }
    return outer_loss;
}

}  // namespace

LossReport compute_outer_gradient(Model& model, const std::vector<const VideoTensor*>& batch,
                                  const TrainConfig& cfg, size_t iteration) {
    cfg.validate();
    if (batch.empty()) throw std::invalid_argument("compute_outer_gradient: empty batch");
    model.store.zero_grads();
    std::vector<double>& grad = model.store.grads();

    double recon_sum = 0.0;
    for (size_t vi = 0; vi < batch.size(); ++vi) {
        const uint64_t stream = video_stream_seed(cfg, iteration, vi);
        if (cfg.meta_order == MetaOrder::first)
            recon_sum += first_order_video_grad(model, *batch[vi], cfg, stream, grad);
        else
            recon_sum += second_order_video_grad(model, *batch[vi], cfg, stream, grad);
    }
    const double inv_b = 1.0 / static_cast<double>(batch.size());
    for (double& g : grad) g *= inv_b;

    const OrthoPenalty ortho = ortho_penalty(model.subspace_matrix());
    if (cfg.lambda_ortho != 0.0) {
        auto gB = model.store.grads("subspace.B");
        for (size_t i = 0; i < gB.size(); ++i) gB[i] += cfg.lambda_ortho * ortho.grad.data[i];
    }

    LossReport report;
    report.reconstruction = recon_sum * inv_b;
    report.orthogonality = ortho.penalty;
    report.total = report.reconstruction + cfg.lambda_ortho * report.orthogonality;
    report.iteration = iteration;
    return report;
}

double outer_objective(Model& model, const std::vector<const VideoTensor*>& batch,
                       const TrainConfig& cfg, size_t iteration) {
    if (batch.empty()) throw std::invalid_argument("outer_objective: empty batch");
    double recon_sum = 0.0;
    for (size_t vi = 0; vi < batch.size(); ++vi) {
        const uint64_t stream = video_stream_seed(cfg, iteration, vi);
        std::vector<double> v, phi;
        inner_adapt_generic<double>(model.cfg, model.layout, model.store.values().data(),
                                    *batch[vi], cfg, stream, v, phi, nullptr);
        const std::vector<double> grid = make_coord_grid(batch[vi]->height, batch[vi]->width);
        const auto outer = step_samples(grid, batch[vi]->frame_size(), cfg, batch[vi]->frames,
                                        stream, kOuterCoordSalt);
        recon_sum += video_recon_grads<double>(model.cfg, model.layout,
                                               model.store.values().data(), *batch[vi], outer,
                                               model.k, v.data(), phi.data(), nullptr, nullptr,
                                               nullptr);
    }
    const double recon = recon_sum / static_cast<double>(batch.size());
    const OrthoPenalty ortho = ortho_penalty(model.subspace_matrix());
    return recon + cfg.lambda_ortho * ortho.penalty;
}

LossReport outer_step(Model& model, const std::vector<const VideoTensor*>& batch,
                      const TrainConfig& cfg, AdamState& adam, size_t iteration) {
    const LossReport report = compute_outer_gradient(model, batch, cfg, iteration);
    adam_step(model.store, adam);
    return report;
}

TrainResult train(Model& model, const std::vector<VideoTensor>& dataset, const TrainConfig& cfg,
                  const std::string& checkpoint_path, const std::string& loss_csv_path) {
    cfg.validate();
    if (dataset.empty()) throw std::invalid_argument("train: empty dataset");

    AdamState adam(model.store.size(), cfg.outer_lr);
    TrainResult result;
    std::string csv = "iteration,recon,ortho,total\n";

    std::vector<size_t> order(dataset.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    Rng shuffle_rng(Rng::mix(cfg.seed, 0x50FF1E));

    size_t iter = 0;
    while (iter < cfg.outer_iters) {
        shuffle_rng.shuffle(order);
        for (size_t start = 0; start < order.size() && iter < cfg.outer_iters;
             start += cfg.batch_videos) {
            std::vector<const VideoTensor*> batch;
            for (size_t i = start; i < std::min(order.size(), start + cfg.batch_videos); ++i)
                batch.push_back(&dataset[order[i]]);
            const LossReport report = outer_step(model, batch, cfg, adam, iter);
            result.loss_curve.push_back(report);
            csv += std::to_string(report.iteration) + "," + fmt_double(report.reconstruction) +
                   "," + fmt_double(report.orthogonality) + "," + fmt_double(report.total) + "\n";
            ++iter;
            if (cfg.checkpoint_every != 0 && !checkpoint_path.empty() &&
                iter % cfg.checkpoint_every == 0) {
                write_checkpoint(checkpoint_path, model);
                if (!loss_csv_path.empty()) write_text_file(loss_csv_path, csv);
            }
        }
    }

    if (!checkpoint_path.empty()) write_checkpoint(checkpoint_path, model);
    if (!loss_csv_path.empty()) write_text_file(loss_csv_path, csv);
    return result;
}

}  // namespace lrm
