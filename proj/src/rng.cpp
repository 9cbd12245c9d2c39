#include "pptp/rng.hpp"

#include <sodium.h>

#include <cstring>

namespace pptp {

namespace {
void ensure_sodium() {
    if (sodium_init() < 0) throw Error("libsodium initialization failed");
}
}  // namespace

Rng Rng::system() {
    ensure_sodium();
    Rng r;
    r.deterministic_ = false;
    return r;
}

Rng Rng::deterministic(std::span<const uint8_t> seed) {
    ensure_sodium();
    Rng r;
    r.deterministic_ = true;
    crypto_hash_sha256(r.key_.data(), seed.data(), seed.size());
    return r;
}

Rng Rng::deterministic(uint64_t seed) {
    Bytes b;
    put_u64(b, seed);
    return deterministic(b);
}

void Rng::refill() {
    // ChaCha20 keystream blocks; the 8-byte nonce carries the block counter.
    uint8_t nonce[crypto_stream_chacha20_NONCEBYTES] = {0};
    for (int i = 0; i < 8; i++) nonce[i] = static_cast<uint8_t>(block_ >> (8 * i));
    std::memset(buf_.data(), 0, buf_.size());
    crypto_stream_chacha20(buf_.data(), buf_.size(), nonce, key_.data());
    block_++;
    avail_ = buf_.size();
}

void Rng::fill(std::span<uint8_t> out) {
    if (!deterministic_) {
        randombytes_buf(out.data(), out.size());
        return;
    }
    size_t off = 0;
    while (off < out.size()) {
        if (avail_ == 0) refill();
        size_t n = std::min(avail_, out.size() - off);
        std::memcpy(out.data() + off, buf_.data() + (buf_.size() - avail_), n);
        avail_ -= n;
        off += n;
    }
}

uint64_t Rng::next_u64() {
    uint8_t b[8];
    fill(b);
    uint64_t v = 0;
    for (int i = 0; i < 8; i++) v = (v << 8) | b[i];
    return v;
}

uint64_t Rng::below(uint64_t bound) {
    if (bound == 0) throw Error("Rng::below: zero bound");
    // Rejection sampling over the largest multiple of bound.
    uint64_t limit = UINT64_MAX - (UINT64_MAX % bound);
    for (;;) {
        uint64_t v = next_u64();
        if (v < limit || limit == 0) return v % bound;
    }
}

uint64_t Rng::between(uint64_t lo, uint64_t hi) {
    if (lo > hi) throw Error("Rng::between: empty range");
    uint64_t span = hi - lo;
    if (span == UINT64_MAX) return next_u64();
    return lo + below(span + 1);
}

Rng Rng::fork(std::string_view label, uint64_t index) const {
    if (!deterministic_) return system();
    Bytes material;
    put_raw(material, std::span<const uint8_t>(key_.data(), key_.size()));
    material.insert(material.end(), label.begin(), label.end());
    put_u64(material, index);
    return deterministic(material);
}

}  // namespace pptp
