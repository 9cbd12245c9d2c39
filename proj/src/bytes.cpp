#include "pptp/bytes.hpp"

#include <algorithm>

namespace pptp {

void put_u8(Bytes& out, uint8_t v) { out.push_back(v); }

void put_u32(Bytes& out, uint32_t v) {
    for (int shift = 24; shift >= 0; shift -= 8) {
        out.push_back(static_cast<uint8_t>(v >> shift));
    }
}

void put_u64(Bytes& out, uint64_t v) {
    for (int shift = 56; shift >= 0; shift -= 8) {
        out.push_back(static_cast<uint8_t>(v >> shift));
    }
}

void put_raw(Bytes& out, std::span<const uint8_t> data) {
    out.insert(out.end(), data.begin(), data.end());
}

void put_var(Bytes& out, std::span<const uint8_t> data) {
    if (data.size() > 0xFFFFFFFFull) {
        throw Error("put_var: payload too large");
    }
    put_u32(out, static_cast<uint32_t>(data.size()));
    put_raw(out, data);
}

uint8_t ByteReader::u8() {
    if (remaining() < 1) throw ParseError("unexpected end of input");
    return data_[pos_++];
}

uint32_t ByteReader::u32() {
    if (remaining() < 4) throw ParseError("unexpected end of input");
    uint32_t v = 0;
    for (int i = 0; i < 4; i++) v = (v << 8) | data_[pos_++];
    return v;
}

uint64_t ByteReader::u64() {
    if (remaining() < 8) throw ParseError("unexpected end of input");
    uint64_t v = 0;
    for (int i = 0; i < 8; i++) v = (v << 8) | data_[pos_++];
    return v;
}

std::span<const uint8_t> ByteReader::take(size_t n) {
    if (remaining() < n) throw ParseError("unexpected end of input");
    auto s = data_.subspan(pos_, n);
    pos_ += n;
    return s;
}

Bytes ByteReader::var() {
    uint32_t len = u32();
    auto s = take(len);
    return Bytes(s.begin(), s.end());
}

void ByteReader::expect_end() const {
    if (!done()) throw ParseError("trailing bytes after canonical encoding");
}

std::string to_hex(std::span<const uint8_t> data) {
    static const char* digits = "0123456789abcdef";
    std::string out;
    out.reserve(data.size() * 2);
    for (uint8_t b : data) {
        out.push_back(digits[b >> 4]);
        out.push_back(digits[b & 0x0F]);
    }
    return out;
}

static int hex_nibble(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
}

Bytes from_hex(std::string_view hex) {
    if (hex.size() % 2 != 0) throw ParseError("odd-length hex string");
    Bytes out;
    out.reserve(hex.size() / 2);
    for (size_t i = 0; i < hex.size(); i += 2) {
        int hi = hex_nibble(hex[i]);
        int lo = hex_nibble(hex[i + 1]);
        if (hi < 0 || lo < 0) throw ParseError("invalid hex digit");
        out.push_back(static_cast<uint8_t>((hi << 4) | lo));
    }
    return out;
}

}  // namespace pptp
