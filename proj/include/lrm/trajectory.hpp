#pragma once

#include <cstddef>
#include <vector>

#include "lrm/checkpoint.hpp"
#include "lrm/matrix.hpp"

namespace lrm {

// Pairwise cosine similarities of the frame vectors: C[i][j] =
// <phi_i, phi_j> / (||phi_i|| ||phi_j||). Symmetric with unit diagonal.
// A zero-norm row is an error naming the frame.
Matrix cosine_similarity_matrix(const Matrix& phi);

// Normalized frame-to-frame steps d_t = (phi_{t+1} - phi_t) / ||.||.
// Steps with norm < 1e-12 are dropped and their indices reported.
struct MotionDirections {
    Matrix directions;             // rows are unit vectors
    std::vector<size_t> dropped;   // step indices removed as (near) zero
};

MotionDirections motion_directions(const Matrix& phi);

struct SignalOptions {
    size_t detrend_window = 0;  // 0 = T/2 rounded odd
    size_t savgol_window = 7;
    size_t savgol_order = 2;
};

// Raw projection, detrended and filtered series, and the principal motion
// direction they came from.
struct PhaseSignal {
    std::vector<double> raw;        // s_t = <phi_t, p>
    std::vector<double> detrended;  // raw minus centered moving average
    std::vector<double> filtered;   // Savitzky-Golay smoothed
    std::vector<double> direction;  // p, unit vector in R^k
};

// p = first principal component of the motion directions (all-identical
// directions degenerate to that direction itself); s = phi p; baseline wander
// removed by centered moving-average subtraction (window shrinks at the
// edges); Savitzky-Golay smoothing with mirror padding.
PhaseSignal extract_signal(const Matrix& phi, const SignalOptions& opts = {});

// Savitzky-Golay filter: local least-squares polynomial fit of the given
// order over an odd window, exact on polynomials up to the fit order at
// interior points. Mirror padding at the edges; window clamped to the series
// length (and reduced to odd if needed).
std::vector<double> savgol_filter(const std::vector<double>& series, size_t window, size_t order);

// Centered moving-average subtraction; the window shrinks near the edges.
std::vector<double> moving_average_detrend(const std::vector<double>& series, size_t window);

struct PhaseDetection {
    std::vector<size_t> ed_indices;  // valleys of the filtered signal
    std::vector<size_t> es_indices;  // peaks of the filtered signal
    double prominence_threshold = 0.0;
};

// Peaks and valleys of the filtered signal with topographic prominence >=
// prominence_frac * stddev. Prominence follows the standard contour
// definition: height above the higher of the two bracketing minima (walking
// outwards until higher terrain or the signal border).
PhaseDetection detect_extrema(const PhaseSignal& signal, double prominence_frac);

// All local maxima (plateau-aware) with their prominences; detect_extrema is
// this plus thresholding, and the brute-force oracle in the tests recomputes
// it by definition.
std::vector<std::pair<size_t, double>> peaks_with_prominence(const std::vector<double>& series);

// Mean over labeled frames of the distance to the closest detected frame.
// Empty detections score the configured penalty (one full video length) so
// failures stay visible.
double frame_mae(const std::vector<size_t>& detected, const std::vector<size_t>& labeled,
                 double empty_penalty);

struct WalkResult {
    std::vector<double> alphas;
    Matrix phi_samples;                       // n_samples x k
    std::vector<std::vector<double>> frames;  // rendered intensities, raw
    std::vector<double> axis;                 // first principal component of Phi rows
    std::vector<double> mean_phi;
};

// Walk along the first principal axis of the fitted Phi rows: sample
// phi(alpha) = mean(Phi) + alpha * axis for alpha evenly spaced over the
// observed projection range scaled by `overshoot` about its center, and
// render each sample through the frozen backbone.
WalkResult latent_walk(const Model& model, const LatentCodes& codes, size_t n_samples,
                       double overshoot, size_t height, size_t width);

}  // namespace lrm
