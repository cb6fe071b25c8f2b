#include "lrm/inference.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "lrm/threading.hpp"

namespace lrm {

namespace {

struct CoordSample {
    std::vector<double> coords;
    std::vector<size_t> indices;
};

CoordSample sample_coords(const std::vector<double>& grid, size_t n_pixels, size_t n, uint64_t seed) {
    CoordSample cs;
    if (n == 0 || n >= n_pixels) {
        cs.indices.resize(n_pixels);
        for (size_t i = 0; i < n_pixels; ++i) cs.indices[i] = i;
        cs.coords = grid;
        return cs;
    }
    Rng rng(seed);
    cs.indices = rng.sample_indices(n_pixels, n);
    cs.coords.resize(n * 2);
    for (size_t i = 0; i < n; ++i) {
        cs.coords[i * 2 + 0] = grid[cs.indices[i] * 2 + 0];
        cs.coords[i * 2 + 1] = grid[cs.indices[i] * 2 + 1];
    }
    return cs;
}

}  // namespace

FitResult fit_video(const Model& model, const VideoTensor& video, const FitConfig& cfg) {
    video.validate();
    const BackboneConfig& bc = model.cfg;
    const ParamLayout& lay = model.layout;
    const size_t q = bc.modulation_dim;
    const size_t k = model.k;
    const size_t T = video.frames;
    const double* params = model.store.values().data();
    const double* B = params + lay.subspace_B;

    // Frozen-backbone contract: snapshot, compare bitwise on exit.
    const std::vector<double> snapshot = model.store.values();

    const std::vector<double> grid = make_coord_grid(video.height, video.width);

    FitResult result;
    result.codes.v.assign(q, 0.0);
    result.codes.phi = Matrix(T, k);
    result.fit_steps_used = cfg.fit_steps;

    std::vector<double>& v = result.codes.v;
    std::vector<double>& phi = result.codes.phi.data;

    std::vector<std::vector<double>> gm(T, std::vector<double>(q));
    std::vector<double> losses(T);

    for (size_t step = 0; step < cfg.fit_steps; ++step) {
        CoordSample shared;
        std::vector<CoordSample> per_frame;
        if (cfg.share_coords) {
            shared = sample_coords(grid, video.frame_size(), cfg.coord_subsample,
                                   Rng::mix(cfg.seed, step));
        } else {
            per_frame.resize(T);
            for (size_t t = 0; t < T; ++t)
                per_frame[t] = sample_coords(grid, video.frame_size(), cfg.coord_subsample,
                                             Rng::mix(Rng::mix(cfg.seed, step), 0x1000 + t));
        }

        parallel_for(T, [&](size_t t) {
            const CoordSample& cs = cfg.share_coords ? shared : per_frame[t];
            const size_t n = cs.indices.size();
            std::vector<double> targets(n);
            const double* frame = video.frame(t);
            for (size_t i = 0; i < n; ++i) targets[i] = frame[cs.indices[i]];

            std::vector<double> m(q);
            for (size_t j = 0; j < q; ++j) m[j] = v[j];
            for (size_t i = 0; i < k; ++i) {
                const double c = phi[t * k + i];
                const double* brow = B + i * q;
                for (size_t j = 0; j < q; ++j) m[j] += c * brow[j];
            }
            std::fill(gm[t].begin(), gm[t].end(), 0.0);
            losses[t] = backbone_recon_grads<double>(bc, lay, params, cs.coords.data(),
                                                     targets.data(), n, m.data(), nullptr,
                                                     gm[t].data());
        });

        // reduce in frame order; mean-over-frames objective
        const double invT = 1.0 / static_cast<double>(T);
        double loss = 0.0;
        std::vector<double> gv(q, 0.0);
        for (size_t t = 0; t < T; ++t) {
            loss += losses[t] * invT;
            for (size_t j = 0; j < q; ++j) gv[j] += gm[t][j] * invT;
            for (size_t i = 0; i < k; ++i) {
                double acc = 0.0;
                const double* brow = B + i * q;
                for (size_t j = 0; j < q; ++j) acc += brow[j] * gm[t][j];
                phi[t * k + i] -= cfg.fit_lr * acc * invT;
            }
        }
        if (!std::isfinite(loss))
            throw std::runtime_error("fit_video: non-finite loss at fit step " + std::to_string(step));
        for (size_t j = 0; j < q; ++j) v[j] -= cfg.fit_lr * gv[j];
        result.loss_curve.push_back(loss);
    }

    // Reconstruction from the final codes; clamped only at this export.
    result.reconstruction = VideoTensor(T, video.height, video.width);
    result.per_frame_loss.assign(T, 0.0);
    parallel_for(T, [&](size_t t) {
        std::vector<double> m(q);
        for (size_t j = 0; j < q; ++j) m[j] = v[j];
        for (size_t i = 0; i < k; ++i) {
            const double c = phi[t * k + i];
            const double* brow = B + i * q;
            for (size_t j = 0; j < q; ++j) m[j] += c * brow[j];
        }
        const std::vector<double> rendered = render_frame(bc, lay, params, m, video.height, video.width);
        double* out = result.reconstruction.frame(t);
        const double* target = video.frame(t);
        double mse = 0.0;
        for (size_t i = 0; i < rendered.size(); ++i) {
            out[i] = std::clamp(rendered[i], 0.0, 1.0);
            const double r = out[i] - target[i];
            mse += r * r;
        }
        result.per_frame_loss[t] = mse / static_cast<double>(rendered.size());
    });

    if (model.store.values() != snapshot)
        throw std::logic_error("fit_video: frozen-backbone contract violated (theta/beta changed)");
    return result;
}

CompressionStats compression_stats(size_t frames, size_t height, size_t width, size_t q, size_t k) {
    if (frames == 0 || height == 0 || width == 0 || q == 0 || k == 0)
        throw std::invalid_argument("compression_stats: dimensions must be positive");
    CompressionStats stats;
    stats.original_values = frames * height * width;
    stats.code_values = q + frames * k;
    stats.ratio = static_cast<double>(stats.original_values) / static_cast<double>(stats.code_values);
    return stats;
}

}  // namespace lrm
