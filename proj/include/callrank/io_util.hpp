#pragma once

#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace callrank {

class BinaryWriter {
public:
    explicit BinaryWriter(const std::string& path)
        : out_(path, std::ios::binary) {
        if (!out_) throw std::runtime_error("cannot open for writing: " + path);
    }

    void u8(uint8_t v) { out_.write(reinterpret_cast<const char*>(&v), 1); }
    void u32(uint32_t v) {
        uint8_t b[4] = {uint8_t(v), uint8_t(v >> 8), uint8_t(v >> 16), uint8_t(v >> 24)};
        out_.write(reinterpret_cast<const char*>(b), 4);
    }
    void u64(uint64_t v) {
        u32(uint32_t(v));
        u32(uint32_t(v >> 32));
    }
    void f32(float v) {
        uint32_t bits;
        static_assert(sizeof(bits) == sizeof(v));
        std::memcpy(&bits, &v, 4);
        u32(bits);
    }
    void f64(double v) {
        uint64_t bits;
        std::memcpy(&bits, &v, 8);
        u64(bits);
    }
    void str(const std::string& s) {
        u32(uint32_t(s.size()));
        out_.write(s.data(), std::streamsize(s.size()));
    }
    void magic(const char m[4]) { out_.write(m, 4); }

    void close() {
        out_.close();
        if (!out_) throw std::runtime_error("write failed on close");
    }

private:
    std::ofstream out_;
};

class BinaryReader {
public:
    explicit BinaryReader(const std::string& path)
        : in_(path, std::ios::binary) {
        if (!in_) throw std::runtime_error("cannot open for reading: " + path);
    }

    uint8_t u8() {
        uint8_t v;
        read(&v, 1);
        return v;
    }
    uint32_t u32() {
        uint8_t b[4];
        read(b, 4);
        return uint32_t(b[0]) | uint32_t(b[1]) << 8 | uint32_t(b[2]) << 16 | uint32_t(b[3]) << 24;
    }
    uint64_t u64() {
        uint64_t lo = u32();
        uint64_t hi = u32();
        return lo | (hi << 32);
    }
    float f32() {
        uint32_t bits = u32();
        float v;
        std::memcpy(&v, &bits, 4);
        return v;
    }
    double f64() {
        uint64_t bits = u64();
        double v;
        std::memcpy(&v, &bits, 8);
        return v;
    }
    std::string str() {
        uint32_t n = u32();
        std::string s(n, '\0');
        if (n) read(s.data(), n);
        return s;
    }
    void expect_magic(const char m[4], const std::string& what) {
        char got[4];
        read(got, 4);
        if (std::memcmp(got, m, 4) != 0)
            throw std::runtime_error("bad magic, not a " + what + " file");
    }

private:
    void read(void* dst, size_t n) {
        in_.read(reinterpret_cast<char*>(dst), std::streamsize(n));
        if (!in_) throw std::runtime_error("truncated file");
    }
    std::ifstream in_;
};

// FNV-1a over a file's bytes, used for run manifests.
inline uint64_t file_digest(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open for digest: " + path);
    uint64_t h = 1469598103934665603ull;
    char buf[1 << 16];
    while (in) {
        in.read(buf, sizeof(buf));
        for (std::streamsize i = 0; i < in.gcount(); ++i) {
            h ^= uint8_t(buf[i]);
            h *= 1099511628211ull;
        }
    }
    return h;
}

}  // namespace callrank
