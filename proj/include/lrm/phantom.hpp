#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lrm/video.hpp"

namespace lrm {

// Synthetic cardiac phantom: a soft-edged bright disk whose radius oscillates
// as r(t) = r0 + A*sin(2*pi*t/P + phase), centered at a slowly drifting
// point, over a dark background, with multiplicative speckle.
struct PhantomConfig {
    size_t frames = 32;        // T
    size_t height = 64;        // H
    size_t width = 64;         // W
    double period = 16.0;      // P in frames, may be non-integer, > 2
    double base_radius = 0.25; // r0, fraction of min(H,W)
    double amplitude = 0.10;   // A, fraction of min(H,W), 0 < A < r0
    double phase = 0.0;        // radians
    double drift = 0.0;        // pixels/frame, direction drawn from seed
    double sigma = 0.0;        // speckle strength
    uint64_t seed = 0;

    void validate() const;
};

struct PhantomVideo {
    VideoTensor video;
    std::vector<size_t> ed_frames;  // maximal radius, sin = +1
    std::vector<size_t> es_frames;  // minimal radius, sin = -1
};

// Ground truth = nearest integer frames of the exact sine extrema within
// [0, T). An amplitude of zero yields a static disk with empty ground truth.
PhantomVideo generate_phantom(const PhantomConfig& cfg);

// One manifest row per generated video.
struct PhantomRecord {
    std::string path;
    PhantomConfig cfg;
    std::vector<size_t> ed_frames;
    std::vector<size_t> es_frames;
};

// CSV with header path,frames,height,width,period,phase,drift,sigma,seed,ed,es
// where ed/es are semicolon-joined frame indices.
void write_manifest(const std::string& path, const std::vector<PhantomRecord>& records);
std::vector<PhantomRecord> read_manifest(const std::string& path);

// Default acceptance suite: randomized periods in [period_min, period_max],
// phases sampled so every labeled extremum stays at least `margin` frames
// away from the temporal boundaries (endpoint extrema are not detectable as
// interior extrema, which would poison the MAE for reasons unrelated to the
// pipeline under test).
struct SuiteConfig {
    size_t n_videos = 16;
    size_t frames = 32;
    size_t height = 64;
    size_t width = 64;
    double period_min = 10.0;
    double period_max = 20.0;
    double sigma = 0.05;
    double drift_max = 0.1;
    double margin = 1.5;
    uint64_t seed = 1;
};

std::vector<PhantomConfig> sample_suite_configs(const SuiteConfig& suite);

// Midpoint-threshold disk area estimate on one rendered frame; used to read
// radii back out of reconstructions.
double estimate_disk_radius(const double* frame, size_t height, size_t width);

}  // namespace lrm
