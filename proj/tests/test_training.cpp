#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "lrm/grad_check.hpp"
#include "lrm/meta_training.hpp"
#include "lrm/phantom.hpp"
#include "oracles.hpp"

using namespace lrm;

namespace {

Model tiny_model(uint64_t seed = 5, size_t q = 2, size_t k = 1) {
    BackboneConfig cfg;
    cfg.hidden_width = 2;
    cfg.hidden_layers = 1;
    cfg.omega0 = 1.9;
    cfg.modulation_dim = q;
    Model model = make_model(cfg, k, SubspaceInit::basic, seed);
    Rng rng(seed + 7);
    for (auto& w : model.store.values("mod.W")) w = rng.uniform(-0.6, 0.6);
    return model;
}

VideoTensor tiny_video(size_t frames, size_t side, uint64_t seed) {
    VideoTensor v(frames, side, side);
    Rng rng(seed);
    for (double& x : v.data) x = rng.uniform(0.0, 1.0);
    return v;
}

TrainConfig tiny_train_config() {
    TrainConfig cfg;
    cfg.inner_steps = 1;
    cfg.inner_lr = 0.05;
    cfg.outer_lr = 1e-3;
    cfg.coord_subsample = 1 << 20;  // full grid: keeps FD perfectly aligned
    cfg.lambda_ortho = 1.0;
    cfg.meta_order = MetaOrder::second;
    cfg.seed = 3;
    return cfg;
}

}  // namespace

TEST_CASE("inner_adapt with zero steps leaves the codes at zero") {
    Model model = tiny_model();
    const VideoTensor video = tiny_video(2, 3, 1);
    TrainConfig cfg = tiny_train_config();
    cfg.inner_steps = 0;
    const LatentCodes codes = inner_adapt(model, video, cfg, 9);
    for (double x : codes.v) CHECK(x == 0.0);
    for (double x : codes.phi.data) CHECK(x == 0.0);
    CHECK(codes.phi.rows == video.frames);
    CHECK(codes.phi.cols == model.k);
}

TEST_CASE("one inner step equals the closed-form gradient step from zero codes") {
    Model model = tiny_model(11);
    const VideoTensor video = tiny_video(2, 2, 2);
    TrainConfig cfg = tiny_train_config();
    cfg.inner_steps = 1;
    const LatentCodes codes = inner_adapt(model, video, cfg, 21);

    // independent route: finite differences of the full-grid inner objective
    // at zero codes; update must be exactly -lr * grad
    const size_t q = model.cfg.modulation_dim;
    const size_t n_codes = q + video.frames * model.k;
    auto objective = [&](const std::vector<double>& c) {
        const std::vector<double> grid = make_coord_grid(video.height, video.width);
        const Matrix B = model.subspace_matrix();
        double loss = 0.0;
        for (size_t t = 0; t < video.frames; ++t) {
            std::vector<double> phi_t(model.k);
            for (size_t i = 0; i < model.k; ++i) phi_t[i] = c[q + t * model.k + i];
            std::vector<double> m(c.begin(), c.begin() + static_cast<long>(q));
            for (size_t i = 0; i < model.k; ++i)
                for (size_t j = 0; j < q; ++j) m[j] += phi_t[i] * B.at(i, j);
            std::vector<double> out(video.frame_size());
            backbone_forward(model.cfg, model.layout, model.store.values().data(), grid.data(),
                             video.frame_size(), m.data(), out.data());
            double frame_loss = 0.0;
            for (size_t i = 0; i < out.size(); ++i) {
                const double r = out[i] - video.frame(t)[i];
                frame_loss += r * r;
            }
            loss += frame_loss / static_cast<double>(out.size());
        }
        return loss / static_cast<double>(video.frames);
    };
    const auto fd = finite_diff_grad(objective, std::vector<double>(n_codes, 0.0), 1e-6);
    for (size_t i = 0; i < q; ++i)
        CHECK(codes.v[i] == doctest::Approx(-cfg.inner_lr * fd[i]).epsilon(1e-6));
    for (size_t i = 0; i < video.frames * model.k; ++i)
        CHECK(codes.phi.data[i] == doctest::Approx(-cfg.inner_lr * fd[q + i]).epsilon(1e-6));
}

TEST_CASE("inner adaptation decreases the full-grid loss on phantom videos") {
    Model model = tiny_model(13, 8, 2);
    TrainConfig cfg = tiny_train_config();
    cfg.inner_steps = 3;
    cfg.inner_lr = 1e-3;

    size_t improved = 0;
    const size_t total = 20;
    for (size_t i = 0; i < total; ++i) {
        PhantomConfig pc;
        pc.frames = 3;
        pc.height = 12;
        pc.width = 12;
        pc.period = 8.0 + static_cast<double>(i % 5);
        pc.seed = 100 + i;
        pc.sigma = 0.02;
        const PhantomVideo pv = generate_phantom(pc);

        auto full_loss = [&](const LatentCodes& codes) {
            const Matrix B = model.subspace_matrix();
            const std::vector<double> grid = make_coord_grid(pc.height, pc.width);
            double loss = 0.0;
            for (size_t t = 0; t < pc.frames; ++t) {
                std::vector<double> m = codes.v;
                for (size_t a = 0; a < model.k; ++a)
                    for (size_t j = 0; j < model.cfg.modulation_dim; ++j)
                        m[j] += codes.phi.at(t, a) * B.at(a, j);
                std::vector<double> out(pv.video.frame_size());
                backbone_forward(model.cfg, model.layout, model.store.values().data(), grid.data(),
                                 out.size(), m.data(), out.data());
                double fl = 0.0;
                for (size_t px = 0; px < out.size(); ++px) {
                    const double r = out[px] - pv.video.frame(t)[px];
                    fl += r * r;
                }
                loss += fl / static_cast<double>(out.size());
            }
            return loss / static_cast<double>(pc.frames);
        };

        LatentCodes zero;
        zero.v.assign(model.cfg.modulation_dim, 0.0);
        zero.phi = Matrix(pc.frames, model.k);
        const LatentCodes adapted = inner_adapt(model, pv.video, cfg, 50 + i);
        if (full_loss(adapted) <= full_loss(zero)) ++improved;
    }
    CHECK(improved >= 19);  // >= 95%
}

TEST_CASE("inner_adapt reports the step index on non-finite loss") {
    Model model = tiny_model();
    model.store.values("out.b")[0] = std::numeric_limits<double>::infinity();
    const VideoTensor video = tiny_video(1, 2, 3);
    TrainConfig cfg = tiny_train_config();
    CHECK_THROWS_WITH_AS(inner_adapt(model, video, cfg, 1),
                         "inner_adapt: non-finite loss at inner step 0", std::runtime_error);
}

TEST_CASE("inner adaptation is permutation-equivariant over frames") {
    Model model = tiny_model(17, 4, 2);
    TrainConfig cfg = tiny_train_config();
    cfg.inner_steps = 2;

    VideoTensor video = tiny_video(3, 4, 23);
    VideoTensor permuted(3, 4, 4);
    const size_t perm[3] = {2, 0, 1};
    for (size_t t = 0; t < 3; ++t)
        for (size_t i = 0; i < video.frame_size(); ++i)
            permuted.frame(t)[i] = video.frame(perm[t])[i];

    const LatentCodes a = inner_adapt(model, video, cfg, 31);
    const LatentCodes b = inner_adapt(model, permuted, cfg, 31);
    // equality up to summation order: the frame-mean gradient for v is
    // accumulated in frame order, so permutation shuffles the rounding
    for (size_t j = 0; j < a.v.size(); ++j) CHECK(b.v[j] == doctest::Approx(a.v[j]).epsilon(1e-12));
    for (size_t t = 0; t < 3; ++t)
        for (size_t j = 0; j < model.k; ++j)
            CHECK(b.phi.at(t, j) == doctest::Approx(a.phi.at(perm[t], j)).epsilon(1e-12));
}

TEST_CASE("second-order outer gradient matches finite differences through the inner loop") {
    Model model = tiny_model(19);
    CHECK(model.store.size() <= 200);  // tiny-model regime
    const VideoTensor video = tiny_video(1, 2, 29);
    TrainConfig cfg = tiny_train_config();

    for (size_t inner_steps : {1u, 3u}) {
        CAPTURE(inner_steps);
        cfg.inner_steps = inner_steps;
        const std::vector<const VideoTensor*> batch = {&video};
        compute_outer_gradient(model, batch, cfg, 4);
        const std::vector<double> analytic = model.store.grads();

        Model probe = model;
        auto f = [&](const std::vector<double>& x) {
            probe.store.values() = x;
            return outer_objective(probe, batch, cfg, 4);
        };
        const auto fd = finite_diff_grad(f, model.store.values(), 1e-6);
        CHECK(max_relative_error(analytic, fd) < 1e-4);
    }
}

TEST_CASE("second-order gradient with a 2-video batch and k=2 matches finite differences") {
    Model model = tiny_model(23, 3, 2);
    const VideoTensor v1 = tiny_video(2, 2, 31);
    const VideoTensor v2 = tiny_video(2, 2, 37);
    TrainConfig cfg = tiny_train_config();
    cfg.inner_steps = 2;
    const std::vector<const VideoTensor*> batch = {&v1, &v2};
    compute_outer_gradient(model, batch, cfg, 0);
    const std::vector<double> analytic = model.store.grads();

    Model probe = model;
    auto f = [&](const std::vector<double>& x) {
        probe.store.values() = x;
        return outer_objective(probe, batch, cfg, 0);
    };
    const auto fd = finite_diff_grad(f, model.store.values(), 1e-6);
    CHECK(max_relative_error(analytic, fd) < 1e-4);
}

TEST_CASE("lambda_ortho = 0 leaves beta with only the reconstruction-path gradient") {
    Model model = tiny_model(29);
    const VideoTensor video = tiny_video(1, 2, 41);
    TrainConfig cfg = tiny_train_config();
    const std::vector<const VideoTensor*> batch = {&video};

    cfg.lambda_ortho = 0.0;
    compute_outer_gradient(model, batch, cfg, 2);
    const std::vector<double> without = model.store.grads();

    cfg.lambda_ortho = 1.0;
    compute_outer_gradient(model, batch, cfg, 2);
    const std::vector<double> with = model.store.grads();

    const auto& slice = model.store.get("subspace.B");
    const OrthoPenalty pen = ortho_penalty(model.subspace_matrix());
    for (size_t i = 0; i < model.store.size(); ++i) {
        if (i >= slice.offset && i < slice.offset + slice.length)
            CHECK(with[i] == doctest::Approx(without[i] + pen.grad.data[i - slice.offset]));
        else
            CHECK(with[i] == without[i]);
    }
}

TEST_CASE("loss report satisfies the total decomposition identity") {
    Model model = tiny_model(31);
    const VideoTensor video = tiny_video(2, 3, 43);
    TrainConfig cfg = tiny_train_config();
    cfg.lambda_ortho = 0.7;
    const std::vector<const VideoTensor*> batch = {&video};
    const LossReport report = compute_outer_gradient(model, batch, cfg, 5);
    CHECK(std::abs(report.total - (report.reconstruction + cfg.lambda_ortho * report.orthogonality)) <
          1e-12);
    CHECK(report.iteration == 5);
}

TEST_CASE("outer_step runs are deterministic for a fixed seed") {
    auto run = [] {
        Model model = tiny_model(37);
        const VideoTensor video = tiny_video(2, 3, 47);
        TrainConfig cfg = tiny_train_config();
        cfg.meta_order = MetaOrder::first;
        AdamState adam(model.store.size(), cfg.outer_lr);
        std::vector<LossReport> reports;
        for (size_t iter = 0; iter < 5; ++iter)
            reports.push_back(outer_step(model, {&video}, cfg, adam, iter));
        return std::make_pair(model.store.values(), reports);
    };
    const auto a = run();
    const auto b = run();
    CHECK(a.first == b.first);
    for (size_t i = 0; i < a.second.size(); ++i) {
        CHECK(a.second[i].reconstruction == b.second[i].reconstruction);
        CHECK(a.second[i].orthogonality == b.second[i].orthogonality);
        CHECK(a.second[i].total == b.second[i].total);
    }
}

TEST_CASE("train with zero outer iterations returns the initialization") {
    Model model = tiny_model(41);
    const std::vector<double> before = model.store.values();
    std::vector<VideoTensor> dataset;
    dataset.push_back(tiny_video(2, 3, 53));
    TrainConfig cfg = tiny_train_config();
    cfg.outer_iters = 0;
    const TrainResult result = train(model, dataset, cfg, "", "");
    CHECK(result.loss_curve.empty());
    CHECK(model.store.values() == before);
}

TEST_CASE("train rejects an empty dataset and empty batches are errors") {
    Model model = tiny_model(43);
    TrainConfig cfg = tiny_train_config();
    CHECK_THROWS_AS(train(model, {}, cfg, "", ""), std::invalid_argument);
    AdamState adam(model.store.size());
    CHECK_THROWS_AS(outer_step(model, {}, cfg, adam, 0), std::invalid_argument);
}

TEST_CASE("training reduces the loss on a small phantom problem") {
    BackboneConfig bc;
    bc.hidden_width = 16;
    bc.hidden_layers = 2;
    bc.omega0 = 10.0;
    bc.modulation_dim = 16;
    Model model = make_model(bc, 2, SubspaceInit::ortho, 3);

    std::vector<VideoTensor> dataset;
    for (size_t i = 0; i < 2; ++i) {
        PhantomConfig pc;
        pc.frames = 4;
        pc.height = 16;
        pc.width = 16;
        pc.period = 8;
        pc.seed = i;
        dataset.push_back(generate_phantom(pc).video);
    }
    TrainConfig cfg;
    cfg.inner_steps = 2;
    cfg.inner_lr = 1e-2;
    cfg.outer_lr = 1e-3;
    cfg.outer_iters = 60;
    cfg.batch_videos = 2;
    cfg.coord_subsample = 64;
    cfg.lambda_ortho = 1.0;
    cfg.seed = 7;
    const TrainResult result = train(model, dataset, cfg, "", "");

    double early = 0.0, late = 0.0;
    for (size_t i = 0; i < 10; ++i) {
        early += result.loss_curve[i].total;
        late += result.loss_curve[result.loss_curve.size() - 10 + i].total;
    }
    CHECK(late < early);
}
