#pragma once

#include "lrm/video.hpp"

namespace lrm {

// 10*log10(1/MSE) at data range 1.0. Identical inputs give +infinity
// (serialized as "inf" in CSV output).
double psnr(const VideoTensor& a, const VideoTensor& b);

// Volumetric SSIM with a cubic box window (default 7x7x7), C1 = 0.01^2,
// C2 = 0.03^2 at data range 1.0, averaged over all valid window positions.
// Throws if any dimension is smaller than the window.
double ssim3d(const VideoTensor& a, const VideoTensor& b, size_t window = 7);

}  // namespace lrm
