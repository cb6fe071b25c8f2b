#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "lrm/dual.hpp"
#include "lrm/param_store.hpp"
#include "lrm/rng.hpp"

namespace lrm {

// Shared coordinate network: a sine-activated MLP whose hidden pre-activations
// are shifted per layer by a slice of W_mod * m (shift-only FiLM). The final
// layer is affine with no sine and no shift.
//
//   h_0 = sin(omega0 * (W_0 x + b_0 + shift_0(m)))
//   h_l = sin(omega0 * (W_l h_{l-1} + b_l + shift_l(m)))   l = 1..L-1
//   y   = W_out h_{L-1} + b_out
struct BackboneConfig {
    size_t hidden_width = 64;
    size_t hidden_layers = 3;
    double omega0 = 30.0;
    size_t modulation_dim = 256;  // q
    size_t in_dim = 2;
    size_t out_dim = 1;

    size_t shift_dim() const { return hidden_layers * hidden_width; }

    void validate() const {
        if (hidden_layers < 1) throw std::invalid_argument("BackboneConfig: hidden_layers must be >= 1");
        if (hidden_width < 1) throw std::invalid_argument("BackboneConfig: hidden_width must be >= 1");
        if (!(omega0 > 0.0)) throw std::invalid_argument("BackboneConfig: omega0 must be > 0");
        if (modulation_dim < 1) throw std::invalid_argument("BackboneConfig: modulation_dim must be >= 1");
        if (in_dim < 1 || out_dim < 1) throw std::invalid_argument("BackboneConfig: bad in/out dims");
    }
};

// Offsets of the named parameter slices in the flat joint buffer that holds
// both the backbone weights (theta) and the subspace basis (beta).
struct ParamLayout {
    struct LayerRef {
        size_t W = 0;
        size_t b = 0;
        size_t fan_in = 0;
    };
    std::vector<LayerRef> layers;  // hidden sine layers; layers[0] takes coords
    size_t out_W = 0;
    size_t out_b = 0;
    size_t mod_W = 0;       // shift_dim x q, row-major
    size_t theta_size = 0;  // backbone parameter count (everything above)
    size_t subspace_B = 0;  // k x q, row-major
    size_t total = 0;
};

ParamLayout make_param_layout(const BackboneConfig& cfg, size_t k);

// Registers the named slices on an empty store, in layout order.
void add_param_slices(ParamStore& store, const BackboneConfig& cfg, size_t k);

// SIREN initialization: layer 0 uniform in [-1/in_dim, 1/in_dim], deeper and
// output layers uniform in [-sqrt(6/fan_in)/omega0, +sqrt(6/fan_in)/omega0],
// biases zero. W_mod gets small uniform entries in [-1/sqrt(q), 1/sqrt(q)]:
// episodes start at m = 0, so the backbone is unmodulated at episode start
// regardless of W_mod, but a zero W_mod would be an exact stationary point
// (no gradient ever reaches the codes or W_mod itself), so it starts nonzero.
void init_backbone_params(ParamStore& store, const BackboneConfig& cfg, Rng& rng);

// Pixel centers mapped affinely to [-1,1]: x = (2j+1)/W - 1, y = (2i+1)/H - 1.
// Row-major over pixels, interleaved (x, y).
std::vector<double> make_coord_grid(size_t height, size_t width);

namespace detail {

constexpr size_t kCoordChunk = 512;

// shift = W_mod * m
template <typename S>
void compute_shift(const BackboneConfig& cfg, const ParamLayout& lay, const S* p, const S* m, S* shift) {
    const size_t q = cfg.modulation_dim;
    const S* wm = p + lay.mod_W;
    for (size_t r = 0; r < cfg.shift_dim(); ++r) {
        S acc{};
        const S* row = wm + r * q;
        for (size_t j = 0; j < q; ++j) acc += row[j] * m[j];
        shift[r] = acc;
    }
}

template <typename S>
struct ChunkWorkspace {
    std::vector<std::vector<S>> pre;   // per layer: chunk * width pre-activations
    std::vector<std::vector<S>> act;   // per layer: chunk * width activations
    std::vector<S> out;                // chunk * out_dim
    std::vector<S> delta, delta_next;  // chunk * width

    void resize(const BackboneConfig& cfg, size_t chunk) {
        pre.assign(cfg.hidden_layers, std::vector<S>(chunk * cfg.hidden_width));
        act.assign(cfg.hidden_layers, std::vector<S>(chunk * cfg.hidden_width));
        out.assign(chunk * cfg.out_dim, S{});
        delta.assign(chunk * cfg.hidden_width, S{});
        delta_next.assign(chunk * cfg.hidden_width, S{});
    }
};

// Forward over one chunk of coords, keeping activations for the backward pass.
template <typename S>
void forward_chunk(const BackboneConfig& cfg, const ParamLayout& lay, const S* p, const S* shift,
                   const double* coords, size_t n, ChunkWorkspace<S>& ws) {
    using std::sin;
    const size_t d = cfg.hidden_width;
    const S w0 = S(cfg.omega0);
    for (size_t l = 0; l < cfg.hidden_layers; ++l) {
        const auto& ref = lay.layers[l];
        const S* W = p + ref.W;
        const S* b = p + ref.b;
        const S* sh = shift + l * d;
        const size_t fin = ref.fan_in;
        S* pre = ws.pre[l].data();
        S* act = ws.act[l].data();
        for (size_t i = 0; i < n; ++i) {
            S* prow = pre + i * d;
            if (l == 0) {
                const double* x = coords + i * cfg.in_dim;
                for (size_t j = 0; j < d; ++j) {
                    S acc = b[j] + sh[j];
                    const S* wrow = W + j * fin;
                    for (size_t t = 0; t < fin; ++t) acc += wrow[t] * S(x[t]);
                    prow[j] = acc;
                }
            } else {
                const S* h = ws.act[l - 1].data() + i * d;
                for (size_t j = 0; j < d; ++j) {
                    S acc = b[j] + sh[j];
                    const S* wrow = W + j * fin;
                    for (size_t t = 0; t < fin; ++t) acc += wrow[t] * h[t];
                    prow[j] = acc;
                }
            }
            S* arow = act + i * d;
            for (size_t j = 0; j < d; ++j) arow[j] = sin(w0 * prow[j]);
        }
    }
    const S* Wout = p + lay.out_W;
    const S* bout = p + lay.out_b;
    for (size_t i = 0; i < n; ++i) {
        const S* h = ws.act[cfg.hidden_layers - 1].data() + i * d;
        for (size_t o = 0; o < cfg.out_dim; ++o) {
            S acc = bout[o];
            const S* wrow = Wout + o * d;
            for (size_t t = 0; t < d; ++t) acc += wrow[t] * h[t];
            ws.out[i * cfg.out_dim + o] = acc;
        }
    }
}

// Backward over one chunk given dL/dy per output. Accumulates theta grads
// (if grad_p != nullptr), the shift gradient (always, into dshift), and
// coordinate gradients (if grad_coords != nullptr).
template <typename S>
void backward_chunk(const BackboneConfig& cfg, const ParamLayout& lay, const S* p,
                    const double* coords, size_t n, const S* dout, ChunkWorkspace<S>& ws,
                    S* grad_p, S* dshift, double* grad_coords) {
    using std::cos;
    const size_t d = cfg.hidden_width;
    const S w0 = S(cfg.omega0);

    const S* Wout = p + lay.out_W;
    for (size_t i = 0; i < n; ++i) {
        S* del = ws.delta.data() + i * d;
        for (size_t j = 0; j < d; ++j) del[j] = S{};
        const S* h = ws.act[cfg.hidden_layers - 1].data() + i * d;
        for (size_t o = 0; o < cfg.out_dim; ++o) {
            const S g = dout[i * cfg.out_dim + o];
            const S* wrow = Wout + o * d;
            if (grad_p != nullptr) {
                S* gw = grad_p + lay.out_W + o * d;
                for (size_t t = 0; t < d; ++t) gw[t] += g * h[t];
                grad_p[lay.out_b + o] += g;
            }
            for (size_t t = 0; t < d; ++t) del[t] += wrow[t] * g;
        }
    }

    for (size_t l = cfg.hidden_layers; l-- > 0;) {
        const auto& ref = lay.layers[l];
        const S* W = p + ref.W;
        const size_t fin = ref.fan_in;
        S* dsh = dshift + l * d;
        for (size_t i = 0; i < n; ++i) {
            S* del = ws.delta.data() + i * d;
            const S* pre = ws.pre[l].data() + i * d;
            // through the sine: e = delta .* omega0 * cos(omega0 * a)
            for (size_t j = 0; j < d; ++j) del[j] = del[j] * (w0 * cos(w0 * pre[j]));
            for (size_t j = 0; j < d; ++j) dsh[j] += del[j];

            if (l == 0) {
                const double* x = coords + i * cfg.in_dim;
                if (grad_p != nullptr) {
                    S* gb = grad_p + ref.b;
                    for (size_t j = 0; j < d; ++j) {
                        S* gw = grad_p + ref.W + j * fin;
                        for (size_t t = 0; t < fin; ++t) gw[t] += del[j] * S(x[t]);
                        gb[j] += del[j];
                    }
                }
                if (grad_coords != nullptr) {
                    double* gx = grad_coords + i * cfg.in_dim;
                    for (size_t j = 0; j < d; ++j) {
                        const S* wrow = W + j * fin;
                        for (size_t t = 0; t < fin; ++t) gx[t] += value_of(wrow[t] * del[j]);
                    }
                }
            } else {
                const S* h = ws.act[l - 1].data() + i * d;
                S* dnext = ws.delta_next.data() + i * d;
                for (size_t t = 0; t < fin; ++t) dnext[t] = S{};
                if (grad_p != nullptr) {
                    S* gb = grad_p + ref.b;
                    for (size_t j = 0; j < d; ++j) {
                        S* gw = grad_p + ref.W + j * fin;
                        const S dj = del[j];
                        for (size_t t = 0; t < fin; ++t) gw[t] += dj * h[t];
                        gb[j] += dj;
                    }
                }
                for (size_t j = 0; j < d; ++j) {
                    const S* wrow = W + j * fin;
                    const S dj = del[j];
                    for (size_t t = 0; t < fin; ++t) dnext[t] += wrow[t] * dj;
                }
            }
        }
        if (l > 0) std::swap(ws.delta, ws.delta_next);
    }
}

// Finishes a backward pass: fold the accumulated dshift into W_mod and
// modulation gradients. grad_m += W_mod^T dshift; grad(W_mod) += dshift m^T.
template <typename S>
void fold_shift_grad(const BackboneConfig& cfg, const ParamLayout& lay, const S* p, const S* m,
                     const S* dshift, S* grad_p, S* grad_m) {
    const size_t q = cfg.modulation_dim;
    const S* wm = p + lay.mod_W;
    for (size_t r = 0; r < cfg.shift_dim(); ++r) {
        const S ds = dshift[r];
        if (grad_p != nullptr) {
            S* gw = grad_p + lay.mod_W + r * q;
            for (size_t j = 0; j < q; ++j) gw[j] += ds * m[j];
        }
        if (grad_m != nullptr) {
            const S* row = wm + r * q;
            for (size_t j = 0; j < q; ++j) grad_m[j] += row[j] * ds;
        }
    }
}

}  // namespace detail

// Predicted intensities for n coordinates under modulation m.
// coords is interleaved (x, y) of length n*in_dim; out has length n*out_dim.
template <typename S>
void backbone_forward(const BackboneConfig& cfg, const ParamLayout& lay, const S* p,
                      const double* coords, size_t n, const S* m, S* out) {
    if (n == 0) throw std::invalid_argument("backbone_forward: empty coords");
    std::vector<S> shift(cfg.shift_dim());
    detail::compute_shift(cfg, lay, p, m, shift.data());
    detail::ChunkWorkspace<S> ws;
    const size_t chunk = std::min(detail::kCoordChunk, n);
    ws.resize(cfg, chunk);
    for (size_t start = 0; start < n; start += chunk) {
        const size_t c = std::min(chunk, n - start);
        detail::forward_chunk(cfg, lay, p, shift.data(), coords + start * cfg.in_dim, c, ws);
        for (size_t i = 0; i < c * cfg.out_dim; ++i) out[start * cfg.out_dim + i] = ws.out[i];
    }
}

// Gradients of the mean-squared reconstruction term L = (1/n) sum_i r_i^2
// for given residuals r = prediction - target. Accumulates (+=) into
// grad_p (theta, nullable), grad_m (length q, nullable) and grad_coords
// (length n*in_dim, nullable).
template <typename S>
void backbone_backward(const BackboneConfig& cfg, const ParamLayout& lay, const S* p,
                       const double* coords, size_t n, const S* m, const S* residuals,
                       S* grad_p, S* grad_m, double* grad_coords = nullptr) {
    if (n == 0) throw std::invalid_argument("backbone_backward: empty coords");
    std::vector<S> shift(cfg.shift_dim());
    detail::compute_shift(cfg, lay, p, m, shift.data());
    std::vector<S> dshift(cfg.shift_dim(), S{});
    detail::ChunkWorkspace<S> ws;
    const size_t chunk = std::min(detail::kCoordChunk, n);
    ws.resize(cfg, chunk);
    std::vector<S> dout(chunk * cfg.out_dim);
    const S scale = S(2.0 / static_cast<double>(n));
    for (size_t start = 0; start < n; start += chunk) {
        const size_t c = std::min(chunk, n - start);
        const double* cc = coords + start * cfg.in_dim;
        detail::forward_chunk(cfg, lay, p, shift.data(), cc, c, ws);
        for (size_t i = 0; i < c * cfg.out_dim; ++i)
            dout[i] = scale * residuals[start * cfg.out_dim + i];
        detail::backward_chunk(cfg, lay, p, cc, c, dout.data(), ws, grad_p, dshift.data(),
                               grad_coords == nullptr ? nullptr : grad_coords + start * cfg.in_dim);
    }
    detail::fold_shift_grad(cfg, lay, p, m, dshift.data(), grad_p, grad_m);
}

// Fused forward + backward for the reconstruction term against targets z:
// returns weight * (1/n) sum_i (y_i - z_i)^2 and accumulates the matching
// gradients as above. The weight carries the mean-over-frames factor.
template <typename S>
S backbone_recon_grads(const BackboneConfig& cfg, const ParamLayout& lay, const S* p,
                       const double* coords, const double* targets, size_t n, const S* m,
                       S* grad_p, S* grad_m, S weight = S(1.0)) {
    if (n == 0) throw std::invalid_argument("backbone_recon_grads: empty coords");
    std::vector<S> shift(cfg.shift_dim());
    detail::compute_shift(cfg, lay, p, m, shift.data());
    std::vector<S> dshift(cfg.shift_dim(), S{});
    detail::ChunkWorkspace<S> ws;
    const size_t chunk = std::min(detail::kCoordChunk, n);
    ws.resize(cfg, chunk);
    std::vector<S> dout(chunk * cfg.out_dim);
    const S scale = weight * S(2.0 / static_cast<double>(n));
    S loss{};
    for (size_t start = 0; start < n; start += chunk) {
        const size_t c = std::min(chunk, n - start);
        const double* cc = coords + start * cfg.in_dim;
        detail::forward_chunk(cfg, lay, p, shift.data(), cc, c, ws);
        for (size_t i = 0; i < c * cfg.out_dim; ++i) {
            const S r = ws.out[i] - S(targets[start * cfg.out_dim + i]);
            loss += r * r;
            dout[i] = scale * r;
        }
        if (grad_p != nullptr || grad_m != nullptr)
            detail::backward_chunk(cfg, lay, p, cc, c, dout.data(), ws, grad_p, dshift.data(),
                                   static_cast<double*>(nullptr));
    }
    if (grad_p != nullptr || grad_m != nullptr)
        detail::fold_shift_grad(cfg, lay, p, m, dshift.data(), grad_p, grad_m);
    return loss * weight * S(1.0 / static_cast<double>(n));
}

// Forward over the full normalized pixel grid, row-major height x width.
// Values are raw network outputs; clamping to [0,1] happens only at export.
std::vector<double> render_frame(const BackboneConfig& cfg, const ParamLayout& lay,
                                 const double* params, const std::vector<double>& m,
                                 size_t height, size_t width);

}  // namespace lrm
