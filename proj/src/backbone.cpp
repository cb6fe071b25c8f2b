#include "lrm/backbone.hpp"

namespace lrm {

ParamLayout make_param_layout(const BackboneConfig& cfg, size_t k) {
    cfg.validate();
    ParamLayout lay;
    size_t off = 0;
    for (size_t l = 0; l < cfg.hidden_layers; ++l) {
        ParamLayout::LayerRef ref;
        ref.fan_in = (l == 0) ? cfg.in_dim : cfg.hidden_width;
        ref.W = off;
        off += cfg.hidden_width * ref.fan_in;
        ref.b = off;
        off += cfg.hidden_width;
        lay.layers.push_back(ref);
    }
    lay.out_W = off;
    off += cfg.out_dim * cfg.hidden_width;
    lay.out_b = off;
    off += cfg.out_dim;
    lay.mod_W = off;
    off += cfg.shift_dim() * cfg.modulation_dim;
    lay.theta_size = off;
    lay.subspace_B = off;
    off += k * cfg.modulation_dim;
    lay.total = off;
    return lay;
}

void add_param_slices(ParamStore& store, const BackboneConfig& cfg, size_t k) {
    for (size_t l = 0; l < cfg.hidden_layers; ++l) {
        const size_t fan_in = (l == 0) ? cfg.in_dim : cfg.hidden_width;
        const std::string base = "layer" + std::to_string(l);
        store.add_slice(base + ".W", cfg.hidden_width * fan_in);
        store.add_slice(base + ".b", cfg.hidden_width);
    }
    store.add_slice("out.W", cfg.out_dim * cfg.hidden_width);
    store.add_slice("out.b", cfg.out_dim);
    store.add_slice("mod.W", cfg.shift_dim() * cfg.modulation_dim);
    store.add_slice("subspace.B", k * cfg.modulation_dim);
}

void init_backbone_params(ParamStore& store, const BackboneConfig& cfg, Rng& rng) {
    for (size_t l = 0; l < cfg.hidden_layers; ++l) {
        const size_t fan_in = (l == 0) ? cfg.in_dim : cfg.hidden_width;
        const std::string base = "layer" + std::to_string(l);
        auto W = store.values(base + ".W");
        const double bound = (l == 0) ? 1.0 / static_cast<double>(cfg.in_dim)
                                      : std::sqrt(6.0 / static_cast<double>(fan_in)) / cfg.omega0;
        for (double& w : W) w = rng.uniform(-bound, bound);
        auto b = store.values(base + ".b");
        for (double& x : b) x = 0.0;
    }
    {
        auto W = store.values("out.W");
        const double bound = std::sqrt(6.0 / static_cast<double>(cfg.hidden_width)) / cfg.omega0;
        for (double& w : W) w = rng.uniform(-bound, bound);
        auto b = store.values("out.b");
        for (double& x : b) x = 0.0;
    }
    {
        auto W = store.values("mod.W");
        const double bound = 1.0 / std::sqrt(static_cast<double>(cfg.modulation_dim));
        for (double& w : W) w = rng.uniform(-bound, bound);
    }
}

std::vector<double> make_coord_grid(size_t height, size_t width) {
    if (height < 1 || width < 1) throw std::invalid_argument("make_coord_grid: empty grid");
    std::vector<double> coords(height * width * 2);
    for (size_t i = 0; i < height; ++i) {
        const double y = (2.0 * static_cast<double>(i) + 1.0) / static_cast<double>(height) - 1.0;
        for (size_t j = 0; j < width; ++j) {
            const double x = (2.0 * static_cast<double>(j) + 1.0) / static_cast<double>(width) - 1.0;
            coords[(i * width + j) * 2 + 0] = x;
            coords[(i * width + j) * 2 + 1] = y;
        }
    }
    return coords;
}

std::vector<double> render_frame(const BackboneConfig& cfg, const ParamLayout& lay,
                                 const double* params, const std::vector<double>& m,
                                 size_t height, size_t width) {
    if (m.size() != cfg.modulation_dim)
        throw std::invalid_argument("render_frame: modulation vector has wrong length");
    const std::vector<double> coords = make_coord_grid(height, width);
    std::vector<double> out(height * width);
    backbone_forward(cfg, lay, params, coords.data(), height * width, m.data(), out.data());
    return out;
}

}  // namespace lrm
