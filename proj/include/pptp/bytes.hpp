#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pptp/errors.hpp"

namespace pptp {

using Bytes = std::vector<uint8_t>;
using Hash32 = std::array<uint8_t, 32>;

// Multi-byte integers are big-endian everywhere in the canonical layouts.
void put_u8(Bytes& out, uint8_t v);
void put_u32(Bytes& out, uint32_t v);
void put_u64(Bytes& out, uint64_t v);
void put_raw(Bytes& out, std::span<const uint8_t> data);
// u32 length prefix followed by the bytes.
void put_var(Bytes& out, std::span<const uint8_t> data);

// Sequential reader over a buffer. Getters throw ParseError on underrun;
// decoders that must map malformed input to a clean failure catch it at
// their boundary.
class ByteReader {
public:
    explicit ByteReader(std::span<const uint8_t> data) : data_(data) {}

    uint8_t u8();
    uint32_t u32();
    uint64_t u64();
    std::span<const uint8_t> take(size_t n);
    Bytes var();  // u32 length prefix + payload
    template <size_t N>
    std::array<uint8_t, N> arr() {
        auto s = take(N);
        std::array<uint8_t, N> out;
        std::copy(s.begin(), s.end(), out.begin());
        return out;
    }

    size_t remaining() const { return data_.size() - pos_; }
    bool done() const { return pos_ == data_.size(); }
    // Canonical decoders reject trailing garbage.
    void expect_end() const;

private:
    std::span<const uint8_t> data_;
    size_t pos_ = 0;
};

std::string to_hex(std::span<const uint8_t> data);
Bytes from_hex(std::string_view hex);  // throws ParseError

}  // namespace pptp
