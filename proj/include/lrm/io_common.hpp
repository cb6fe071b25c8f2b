#pragma once

#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace lrm {

// File-format errors carry a kind so callers and tests can tell a bad magic
// from a truncated file from a failed checksum.
struct IoError : std::runtime_error {
    enum class Kind { open_failed, bad_magic, bad_version, truncated, crc_mismatch, malformed };
    Kind kind;
    IoError(Kind k, const std::string& msg) : std::runtime_error(msg), kind(k) {}
};

// CRC-32 (IEEE 802.3, reflected polynomial 0xEDB88320).
uint32_t crc32(const uint8_t* data, size_t len, uint32_t seed = 0);

namespace bin {

// All on-disk integers and floats are little-endian. The helpers below write
// through byte buffers so the formats are identical on any host.

inline void put_u32(std::vector<uint8_t>& out, uint32_t v) {
    out.push_back(static_cast<uint8_t>(v & 0xff));
    out.push_back(static_cast<uint8_t>((v >> 8) & 0xff));
    out.push_back(static_cast<uint8_t>((v >> 16) & 0xff));
    out.push_back(static_cast<uint8_t>((v >> 24) & 0xff));
}

inline void put_u64(std::vector<uint8_t>& out, uint64_t v) {
    put_u32(out, static_cast<uint32_t>(v & 0xffffffffULL));
    put_u32(out, static_cast<uint32_t>(v >> 32));
}

inline void put_f64(std::vector<uint8_t>& out, double d) {
    uint64_t bits;
    std::memcpy(&bits, &d, 8);
    put_u64(out, bits);
}

inline void put_bytes(std::vector<uint8_t>& out, const void* p, size_t n) {
    const uint8_t* b = static_cast<const uint8_t*>(p);
    out.insert(out.end(), b, b + n);
}

// Sequential reader over a whole-file buffer; throws truncated on overrun.
class Reader {
public:
    Reader(std::vector<uint8_t> buf, std::string path)
        : buf_(std::move(buf)), path_(std::move(path)) {}

    uint32_t u32() {
        need(4);
        uint32_t v = static_cast<uint32_t>(buf_[pos_]) | (static_cast<uint32_t>(buf_[pos_ + 1]) << 8) |
                     (static_cast<uint32_t>(buf_[pos_ + 2]) << 16) |
                     (static_cast<uint32_t>(buf_[pos_ + 3]) << 24);
        pos_ += 4;
        return v;
    }

    uint64_t u64() {
        const uint64_t lo = u32();
        const uint64_t hi = u32();
        return lo | (hi << 32);
    }

    double f64() {
        const uint64_t bits = u64();
        double d;
        std::memcpy(&d, &bits, 8);
        return d;
    }

    void bytes(void* dst, size_t n) {
        need(n);
        std::memcpy(dst, buf_.data() + pos_, n);
        pos_ += n;
    }

    std::string str(size_t n) {
        need(n);
        std::string s(reinterpret_cast<const char*>(buf_.data() + pos_), n);
        pos_ += n;
        return s;
    }

    size_t pos() const { return pos_; }
    size_t size() const { return buf_.size(); }
    const uint8_t* data() const { return buf_.data(); }
    const std::string& path() const { return path_; }

    void expect_magic(const char magic[4], const std::string& format) {
        need(4);
        if (std::memcmp(buf_.data() + pos_, magic, 4) != 0)
            throw IoError(IoError::Kind::bad_magic, path_ + ": not a " + format + " file (bad magic)");
        pos_ += 4;
    }

private:
    void need(size_t n) {
        if (pos_ + n > buf_.size())
            throw IoError(IoError::Kind::truncated, path_ + ": truncated file");
    }

    std::vector<uint8_t> buf_;
    size_t pos_ = 0;
    std::string path_;
};

std::vector<uint8_t> read_file(const std::string& path);

// Atomic write: temp file in the same directory, then rename.
void write_file(const std::string& path, const std::vector<uint8_t>& bytes);

}  // namespace bin
}  // namespace lrm
