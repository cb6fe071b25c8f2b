#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace lrm {

// T x H x W intensity volume, 64-bit floats in [0,1].
struct VideoTensor {
    size_t frames = 0;  // T
    size_t height = 0;  // H
    size_t width = 0;   // W
    std::vector<double> data;

    VideoTensor() = default;
    VideoTensor(size_t t, size_t h, size_t w) : frames(t), height(h), width(w), data(t * h * w, 0.0) {}

    double& at(size_t t, size_t i, size_t j) { return data[(t * height + i) * width + j]; }
    double at(size_t t, size_t i, size_t j) const { return data[(t * height + i) * width + j]; }

    const double* frame(size_t t) const { return data.data() + t * height * width; }
    double* frame(size_t t) { return data.data() + t * height * width; }

    size_t frame_size() const { return height * width; }
    size_t size() const { return data.size(); }

    // Throws unless every value is finite and within [0,1].
    void validate() const;
};

// "LRMV" format: magic, format version u32, T,H,W u32, little-endian f64
// data, CRC32 trailer over all preceding bytes.
void write_video(const std::string& path, const VideoTensor& video);
VideoTensor read_video(const std::string& path);

}  // namespace lrm
