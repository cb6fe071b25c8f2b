#include "lrm/video.hpp"

#include <cmath>
#include <stdexcept>

#include "lrm/io_common.hpp"

namespace lrm {

namespace {
constexpr char kMagic[4] = {'L', 'R', 'M', 'V'};
constexpr uint32_t kVersion = 1;
}  // namespace

void VideoTensor::validate() const {
    if (data.size() != frames * height * width)
        throw std::invalid_argument("VideoTensor: data length does not match T*H*W");
    for (double v : data)
        if (!std::isfinite(v) || v < 0.0 || v > 1.0)
            throw std::invalid_argument("VideoTensor: value outside [0,1]");
}

void write_video(const std::string& path, const VideoTensor& video) {
    video.validate();
    std::vector<uint8_t> out;
    out.reserve(20 + video.data.size() * 8 + 4);
    bin::put_bytes(out, kMagic, 4);
    bin::put_u32(out, kVersion);
    bin::put_u32(out, static_cast<uint32_t>(video.frames));
    bin::put_u32(out, static_cast<uint32_t>(video.height));
    bin::put_u32(out, static_cast<uint32_t>(video.width));
    for (double v : video.data) bin::put_f64(out, v);
    bin::put_u32(out, crc32(out.data(), out.size()));
    bin::write_file(path, out);
}

VideoTensor read_video(const std::string& path) {
    bin::Reader r(bin::read_file(path), path);
    r.expect_magic(kMagic, "LRMV");
    const uint32_t version = r.u32();
    if (version != kVersion)
        throw IoError(IoError::Kind::bad_version,
                      path + ": unsupported LRMV version " + std::to_string(version));
    VideoTensor video;
    video.frames = r.u32();
    video.height = r.u32();
    video.width = r.u32();
    const size_t n = video.frames * video.height * video.width;
    if (r.size() < r.pos() + n * 8 + 4)
        throw IoError(IoError::Kind::truncated, path + ": truncated file");
    video.data.resize(n);
    for (double& v : video.data) v = r.f64();
    const uint32_t expected = crc32(r.data(), r.pos());
    const uint32_t stored = r.u32();
    if (expected != stored)
        throw IoError(IoError::Kind::crc_mismatch, path + ": CRC mismatch (corrupted file)");
    return video;
}

}  // namespace lrm
