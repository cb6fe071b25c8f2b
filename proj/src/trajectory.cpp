#include "lrm/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "lrm/pca.hpp"

namespace lrm {

Matrix cosine_similarity_matrix(const Matrix& phi) {
    const size_t T = phi.rows;
    std::vector<double> norms(T);
    for (size_t t = 0; t < T; ++t) {
        double s = 0.0;
        const double* row = phi.row(t);
        for (size_t j = 0; j < phi.cols; ++j) s += row[j] * row[j];
        norms[t] = std::sqrt(s);
        if (norms[t] == 0.0)
            throw std::runtime_error("cosine_similarity_matrix: zero-norm row at frame " +
                                     std::to_string(t));
    }
    Matrix C(T, T);
    for (size_t i = 0; i < T; ++i) {
        C.at(i, i) = 1.0;
        for (size_t j = i + 1; j < T; ++j) {
            double s = 0.0;
            const double* a = phi.row(i);
            const double* b = phi.row(j);
            for (size_t c = 0; c < phi.cols; ++c) s += a[c] * b[c];
            const double value = s / (norms[i] * norms[j]);
            C.at(i, j) = value;
            C.at(j, i) = value;
        }
    }
    return C;
}

MotionDirections motion_directions(const Matrix& phi) {
    if (phi.rows < 2) throw std::invalid_argument("motion_directions: need at least 2 frames");
    MotionDirections out;
    std::vector<double> rows;
    for (size_t t = 0; t + 1 < phi.rows; ++t) {
        double nn = 0.0;
        const double* a = phi.row(t);
        const double* b = phi.row(t + 1);
        for (size_t j = 0; j < phi.cols; ++j) {
            const double d = b[j] - a[j];
            nn += d * d;
        }
        nn = std::sqrt(nn);
        if (nn < 1e-12) {
            out.dropped.push_back(t);
            continue;
        }
        for (size_t j = 0; j < phi.cols; ++j) rows.push_back((b[j] - a[j]) / nn);
    }
    const size_t kept = rows.size() / phi.cols;
    if (kept == 0)
        throw std::runtime_error("motion_directions: all frame-to-frame differences are zero "
                                 "(degenerate trajectory)");
    out.directions = Matrix(kept, phi.cols, std::move(rows));
    return out;
}

std::vector<double> moving_average_detrend(const std::vector<double>& series, size_t window) {
    const size_t T = series.size();
    const size_t half = window / 2;
    std::vector<double> out(T);
    for (size_t t = 0; t < T; ++t) {
        const size_t lo = t >= half ? t - half : 0;
        const size_t hi = std::min(T - 1, t + half);
        double mean = 0.0;
        for (size_t i = lo; i <= hi; ++i) mean += series[i];
        mean /= static_cast<double>(hi - lo + 1);
        out[t] = series[t] - mean;
    }
    return out;
}

namespace {

// Solves the (order+1)x(order+1) normal equations for the center weight row
// of the least-squares polynomial fit. Returns convolution weights w_j,
// j = -half..half, such that smoothed = sum_j w_j y[t+j].
std::vector<double> savgol_weights(size_t window, size_t order) {
    const size_t m = order + 1;
    const long half = static_cast<long>(window / 2);
    // A = V^T V with V[j][p] = j^p
    std::vector<double> A(m * m, 0.0);
    for (long j = -half; j <= half; ++j) {
        double powers[32];
        powers[0] = 1.0;
        for (size_t p = 1; p < 2 * m; ++p) powers[p] = powers[p - 1] * static_cast<double>(j);
        for (size_t r = 0; r < m; ++r)
            for (size_t c = 0; c < m; ++c) A[r * m + c] += powers[r + c];
    }
    // Solve A x = e0 by Gaussian elimination with partial pivoting.
    std::vector<double> x(m, 0.0);
    std::vector<double> rhs(m, 0.0);
    rhs[0] = 1.0;
    for (size_t col = 0; col < m; ++col) {
        size_t pivot = col;
        for (size_t r = col + 1; r < m; ++r)
            if (std::abs(A[r * m + col]) > std::abs(A[pivot * m + col])) pivot = r;
        if (pivot != col) {
            for (size_t c = 0; c < m; ++c) std::swap(A[col * m + c], A[pivot * m + c]);
            std::swap(rhs[col], rhs[pivot]);
        }
        const double d = A[col * m + col];
        if (d == 0.0) throw std::runtime_error("savgol_filter: singular normal equations");
        for (size_t r = col + 1; r < m; ++r) {
            const double f = A[r * m + col] / d;
            for (size_t c = col; c < m; ++c) A[r * m + c] -= f * A[col * m + c];
            rhs[r] -= f * rhs[col];
        }
    }
    for (size_t col = m; col-- > 0;) {
        double s = rhs[col];
        for (size_t c = col + 1; c < m; ++c) s -= A[col * m + c] * x[c];
        x[col] = s / A[col * m + col];
    }
    // w_j = sum_p x_p j^p
    std::vector<double> w(window);
    for (long j = -half; j <= half; ++j) {
        double acc = 0.0;
        double jp = 1.0;
        for (size_t p = 0; p < m; ++p) {
            acc += x[p] * jp;
            jp *= static_cast<double>(j);
        }
        w[static_cast<size_t>(j + half)] = acc;
    }
    return w;
}

// Mirror padding about the edge samples: index -1 -> 1, T -> T-2.
size_t mirror_index(long i, long T) {
    while (i < 0 || i >= T) {
        if (i < 0) i = -i;
        if (i >= T) i = 2 * (T - 1) - i;
    }
    return static_cast<size_t>(i);
}

}  // namespace

std::vector<double> savgol_filter(const std::vector<double>& series, size_t window, size_t order) {
    const size_t T = series.size();
    if (T == 0) return {};
    if (order > 10) throw std::invalid_argument("savgol_filter: order too large");
    if (window > T) window = T;
    if (window % 2 == 0) window -= 1;
    if (window < order + 1) throw std::invalid_argument("savgol_filter: window must exceed order");
    if (window == 1) return series;

    const std::vector<double> w = savgol_weights(window, order);
    const long half = static_cast<long>(window / 2);
    std::vector<double> out(T);
    for (long t = 0; t < static_cast<long>(T); ++t) {
        double acc = 0.0;
        for (long j = -half; j <= half; ++j)
            acc += w[static_cast<size_t>(j + half)] * series[mirror_index(t + j, static_cast<long>(T))];
        out[static_cast<size_t>(t)] = acc;
    }
    return out;
}

PhaseSignal extract_signal(const Matrix& phi, const SignalOptions& opts) {
    const size_t T = phi.rows;
    const MotionDirections dirs = motion_directions(phi);

    PhaseSignal signal;
    // PCA of the motion directions; if every step points (numerically) the
    // same way the centered covariance carries only rounding noise, and the
    // mean direction is the answer. Rows are unit vectors, so the spread
    // threshold is absolute.
    std::vector<double> mean_dir(dirs.directions.cols, 0.0);
    for (size_t r = 0; r < dirs.directions.rows; ++r)
        for (size_t c = 0; c < dirs.directions.cols; ++c) mean_dir[c] += dirs.directions.at(r, c);
    for (double& m : mean_dir) m /= static_cast<double>(dirs.directions.rows);
    double spread = 0.0;
    for (size_t r = 0; r < dirs.directions.rows; ++r)
        for (size_t c = 0; c < dirs.directions.cols; ++c) {
            const double d = dirs.directions.at(r, c) - mean_dir[c];
            spread += d * d;
        }
    spread /= static_cast<double>(dirs.directions.rows);
    if (dirs.directions.rows == 1 || spread < 1e-18) {
        const double nn = norm2(mean_dir);
        signal.direction = mean_dir;
        for (double& x : signal.direction) x /= nn;
        normalize_sign(signal.direction);
    } else {
        signal.direction = pca_first_component(dirs.directions);
    }

    signal.raw.resize(T);
    for (size_t t = 0; t < T; ++t) {
        double s = 0.0;
        const double* row = phi.row(t);
        for (size_t j = 0; j < phi.cols; ++j) s += row[j] * signal.direction[j];
        signal.raw[t] = s;
    }

    size_t detrend_window = opts.detrend_window;
    if (detrend_window == 0) {
        detrend_window = T / 2;
        if (detrend_window % 2 == 0) detrend_window += 1;
    }
    signal.detrended = moving_average_detrend(signal.raw, detrend_window);

    if (T < opts.savgol_window)
        throw std::invalid_argument("extract_signal: series shorter than the smoothing window");
    signal.filtered = savgol_filter(signal.detrended, opts.savgol_window, opts.savgol_order);
    return signal;
}

std::vector<std::pair<size_t, double>> peaks_with_prominence(const std::vector<double>& series) {
    const size_t T = series.size();
    std::vector<std::pair<size_t, double>> peaks;
    if (T < 3) return peaks;

    size_t i = 1;
    while (i + 1 < T) {
        if (series[i - 1] < series[i]) {
            // scan across a possible plateau
            size_t ahead = i + 1;
            while (ahead < T && series[ahead] == series[i]) ++ahead;
            if (ahead < T && series[ahead] < series[i]) {
                const size_t peak = (i + ahead - 1) / 2;
                // prominence: walk out to higher terrain (or the border),
                // base = the minimum en route; prominence over the higher base
                double left_min = series[peak];
                for (size_t j = peak; j-- > 0;) {
                    if (series[j] > series[peak]) break;
                    left_min = std::min(left_min, series[j]);
                }
                double right_min = series[peak];
                for (size_t j = peak + 1; j < T; ++j) {
                    if (series[j] > series[peak]) break;
                    right_min = std::min(right_min, series[j]);
                }
                peaks.emplace_back(peak, series[peak] - std::max(left_min, right_min));
                i = ahead;
                continue;
            }
            i = ahead;
            continue;
        }
        ++i;
    }
    return peaks;
}

PhaseDetection detect_extrema(const PhaseSignal& signal, double prominence_frac) {
    const std::vector<double>& s = signal.filtered;
    if (s.size() < 3) throw std::invalid_argument("detect_extrema: need at least 3 samples");

    double mean = 0.0;
    for (double x : s) mean += x;
    mean /= static_cast<double>(s.size());
    double var = 0.0;
    for (double x : s) var += (x - mean) * (x - mean);
    var /= static_cast<double>(s.size());
    const double threshold = prominence_frac * std::sqrt(var);

    PhaseDetection det;
    det.prominence_threshold = threshold;
    for (const auto& [idx, prom] : peaks_with_prominence(s))
        if (prom >= threshold) det.es_indices.push_back(idx);

    std::vector<double> negated(s.size());
    for (size_t i = 0; i < s.size(); ++i) negated[i] = -s[i];
    for (const auto& [idx, prom] : peaks_with_prominence(negated))
        if (prom >= threshold) det.ed_indices.push_back(idx);
    return det;
}

double frame_mae(const std::vector<size_t>& detected, const std::vector<size_t>& labeled,
                 double empty_penalty) {
    if (labeled.empty()) throw std::invalid_argument("frame_mae: labeled set must be non-empty");
    if (detected.empty()) return empty_penalty;
    double total = 0.0;
    for (size_t l : labeled) {
        double best = std::numeric_limits<double>::infinity();
        for (size_t d : detected)
            best = std::min(best, std::abs(static_cast<double>(d) - static_cast<double>(l)));
        total += best;
    }
    return total / static_cast<double>(labeled.size());
}

WalkResult latent_walk(const Model& model, const LatentCodes& codes, size_t n_samples,
                       double overshoot, size_t height, size_t width) {
    if (n_samples < 2) throw std::invalid_argument("latent_walk: need at least 2 samples");
    const Matrix& phi = codes.phi;
    const size_t k = phi.cols;
    if (k != model.k) throw std::invalid_argument("latent_walk: Phi rank does not match model");

    WalkResult walk;
    walk.axis = pca_first_component(phi);  // throws on degenerate Phi
    walk.mean_phi.assign(k, 0.0);
    for (size_t t = 0; t < phi.rows; ++t)
        for (size_t j = 0; j < k; ++j) walk.mean_phi[j] += phi.at(t, j);
    for (double& m : walk.mean_phi) m /= static_cast<double>(phi.rows);

    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (size_t t = 0; t < phi.rows; ++t) {
        double proj = 0.0;
        for (size_t j = 0; j < k; ++j) proj += (phi.at(t, j) - walk.mean_phi[j]) * walk.axis[j];
        lo = std::min(lo, proj);
        hi = std::max(hi, proj);
    }
    const double center = 0.5 * (lo + hi);
    const double half = 0.5 * (hi - lo) * overshoot;

    walk.phi_samples = Matrix(n_samples, k);
    const double* params = model.store.values().data();
    const double* B = params + model.layout.subspace_B;
    const size_t q = model.cfg.modulation_dim;
    for (size_t s = 0; s < n_samples; ++s) {
        const double alpha =
            center - half + 2.0 * half * static_cast<double>(s) / static_cast<double>(n_samples - 1);
        walk.alphas.push_back(alpha);
        std::vector<double> phi_s(k);
        for (size_t j = 0; j < k; ++j) {
            phi_s[j] = walk.mean_phi[j] + alpha * walk.axis[j];
            walk.phi_samples.at(s, j) = phi_s[j];
        }
        std::vector<double> m(q);
        for (size_t j = 0; j < q; ++j) m[j] = codes.v[j];
        for (size_t i = 0; i < k; ++i) {
            const double c = phi_s[i];
            const double* brow = B + i * q;
            for (size_t j = 0; j < q; ++j) m[j] += c * brow[j];
        }
        walk.frames.push_back(render_frame(model.cfg, model.layout, params, m, height, width));
    }
    return walk;
}

}  // namespace lrm
