#pragma once

// Little-endian binary serialization helpers shared by all index dumps.
// Every format starts with a 4-byte magic string followed by a u32 version.

#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "chtnr/types.hpp"

namespace chtnr {

class BinaryWriter {
  public:
    explicit BinaryWriter(std::ostream& out) : out_(out) {}

    void u32(uint32_t v) {
        unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                              static_cast<unsigned char>(v >> 16), static_cast<unsigned char>(v >> 24)};
        out_.write(reinterpret_cast<const char*>(b), 4);
    }

    void u64(uint64_t v) {
        unsigned char b[8];
        for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
        out_.write(reinterpret_cast<const char*>(b), 8);
    }

    void magic(const char m[4]) { out_.write(m, 4); }

    void u32_array(const std::vector<uint32_t>& a) {
        u64(a.size());
        for (uint32_t v : a) u32(v);
    }

    void u64_array(const std::vector<uint64_t>& a) {
        u64(a.size());
        for (uint64_t v : a) u64(v);
    }

    void check(const std::string& what) const {
        require(static_cast<bool>(out_), "write failed: " + what);
    }

  private:
    std::ostream& out_;
};

class BinaryReader {
  public:
    explicit BinaryReader(std::istream& in) : in_(in) {}

    uint32_t u32() {
        unsigned char b[4];
        read(b, 4, "u32");
        return static_cast<uint32_t>(b[0]) | static_cast<uint32_t>(b[1]) << 8 |
               static_cast<uint32_t>(b[2]) << 16 | static_cast<uint32_t>(b[3]) << 24;
    }

    uint64_t u64() {
        unsigned char b[8];
        read(b, 8, "u64");
        uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= static_cast<uint64_t>(b[i]) << (8 * i);
        return v;
    }

    void expect_magic(const char m[4], const std::string& format) {
        char got[4];
        read(got, 4, "magic");
        require(std::memcmp(got, m, 4) == 0, "bad magic bytes: not a " + format + " file");
    }

    uint32_t expect_version(uint32_t want, const std::string& format) {
        uint32_t v = u32();
        require(v == want, "unsupported " + format + " version " + std::to_string(v));
        return v;
    }

    std::vector<uint32_t> u32_array() {
        uint64_t size = u64();
        std::vector<uint32_t> a(size);
        for (uint64_t i = 0; i < size; ++i) a[i] = u32();
        return a;
    }

    std::vector<uint64_t> u64_array() {
        uint64_t size = u64();
        std::vector<uint64_t> a(size);
        for (uint64_t i = 0; i < size; ++i) a[i] = u64();
        return a;
    }

  private:
    void read(void* dst, size_t n, const char* what) {
        in_.read(reinterpret_cast<char*>(dst), static_cast<std::streamsize>(n));
        require(in_.gcount() == static_cast<std::streamsize>(n),
                std::string("read failed (truncated file?): ") + what);
    }

    std::istream& in_;
};

} // namespace chtnr
