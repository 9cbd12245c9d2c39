#include "pptp/group.hpp"

#include <sodium.h>

#include <algorithm>
#include <cstring>

namespace pptp {

namespace {

struct SodiumInit {
    SodiumInit() {
        if (sodium_init() < 0) std::abort();
    }
};
const SodiumInit sodium_init_once;

// Group order, little-endian: q = 2^252 + 27742317777372353535851937790883648493.
constexpr std::array<uint8_t, 32> kOrderLe = {
    0xed, 0xd3, 0xf5, 0x5c, 0x1a, 0x63, 0x12, 0x58, 0xd6, 0x9c, 0xf7,
    0xa2, 0xde, 0xf9, 0xde, 0x14, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00,
    0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x10};

// true iff le < q (both little-endian).
bool scalar_canonical(const uint8_t* le) {
    for (int i = 31; i >= 0; i--) {
        if (le[i] < kOrderLe[i]) return true;
        if (le[i] > kOrderLe[i]) return false;
    }
    return false;  // equal to q
}

}  // namespace

Scalar Scalar::from_u64(uint64_t v) {
    Scalar s;
    for (int i = 0; i < 8; i++) s.le_[i] = static_cast<uint8_t>(v >> (8 * i));
    return s;
}

Scalar Scalar::reduce_wide(std::span<const uint8_t> wide64) {
    if (wide64.size() != 64) throw Error("reduce_wide expects 64 bytes");
    Scalar s;
    crypto_core_ristretto255_scalar_reduce(s.le_.data(), wide64.data());
    return s;
}

Scalar Scalar::random(Rng& rng) {
    std::array<uint8_t, 64> wide;
    rng.fill(wide);
    return reduce_wide(wide);
}

std::optional<Scalar> Scalar::from_be_bytes(std::span<const uint8_t> be32) {
    if (be32.size() != 32) return std::nullopt;
    Scalar s;
    for (int i = 0; i < 32; i++) s.le_[i] = be32[31 - i];
    if (!scalar_canonical(s.le_.data())) return std::nullopt;
    return s;
}

std::array<uint8_t, 32> Scalar::to_be_bytes() const {
    std::array<uint8_t, 32> be;
    for (int i = 0; i < 32; i++) be[i] = le_[31 - i];
    return be;
}

Scalar Scalar::add(const Scalar& o) const {
    Scalar r;
    crypto_core_ristretto255_scalar_add(r.le_.data(), le_.data(), o.le_.data());
    return r;
}

Scalar Scalar::sub(const Scalar& o) const {
    Scalar r;
    crypto_core_ristretto255_scalar_sub(r.le_.data(), le_.data(), o.le_.data());
    return r;
}

Scalar Scalar::mul(const Scalar& o) const {
    Scalar r;
    crypto_core_ristretto255_scalar_mul(r.le_.data(), le_.data(), o.le_.data());
    return r;
}

Scalar Scalar::negate() const {
    Scalar r;
    crypto_core_ristretto255_scalar_negate(r.le_.data(), le_.data());
    return r;
}

Scalar Scalar::invert() const {
    Scalar r;
    if (crypto_core_ristretto255_scalar_invert(r.le_.data(), le_.data()) != 0) {
        throw Error("cannot invert zero scalar");
    }
    return r;
}

bool Scalar::is_zero() const {
    uint8_t acc = 0;
    for (uint8_t b : le_) acc |= b;
    return acc == 0;
}

GroupElement GroupElement::base() {
    GroupElement g;
    Scalar one = Scalar::one();
    crypto_scalarmult_ristretto255_base(g.enc_.data(), one.le_data());
    return g;
}

std::optional<GroupElement> GroupElement::from_bytes(std::span<const uint8_t> enc32) {
    if (enc32.size() != 32) return std::nullopt;
    GroupElement g;
    std::copy(enc32.begin(), enc32.end(), g.enc_.begin());
    if (crypto_core_ristretto255_is_valid_point(g.enc_.data()) != 1) return std::nullopt;
    return g;
}

GroupElement GroupElement::from_uniform(std::span<const uint8_t> wide64) {
    if (wide64.size() != 64) throw Error("from_uniform expects 64 bytes");
    GroupElement g;
    crypto_core_ristretto255_from_hash(g.enc_.data(), wide64.data());
    return g;
}

GroupElement GroupElement::add(const GroupElement& o) const {
    if (is_identity()) return o;
    if (o.is_identity()) return *this;
    GroupElement r;
    if (crypto_core_ristretto255_add(r.enc_.data(), enc_.data(), o.enc_.data()) != 0) {
        throw Error("group add on invalid encoding");
    }
    return r;
}

GroupElement GroupElement::sub(const GroupElement& o) const {
    if (o.is_identity()) return *this;
    GroupElement r;
    if (crypto_core_ristretto255_sub(r.enc_.data(), enc_.data(), o.enc_.data()) != 0) {
        throw Error("group sub on invalid encoding");
    }
    return r;
}

GroupElement GroupElement::mul(const Scalar& s) const {
    if (s.is_zero() || is_identity()) return identity();
    GroupElement r;
    if (crypto_scalarmult_ristretto255(r.enc_.data(), s.le_data(), enc_.data()) != 0) {
        // Only reachable when the product is the identity, which cannot
        // happen for a nonzero scalar in a prime-order group unless the
        // input encoding was invalid.
        throw Error("scalar multiplication failed");
    }
    return r;
}

bool GroupElement::is_identity() const {
    uint8_t acc = 0;
    for (uint8_t b : enc_) acc |= b;
    return acc == 0;
}

GroupElement multi_scalar_mul(std::span<const Scalar> s, std::span<const GroupElement> p) {
    if (s.size() != p.size()) throw Error("multi_scalar_mul: length mismatch");
    GroupElement acc = GroupElement::identity();
    for (size_t i = 0; i < s.size(); i++) {
        if (s[i].is_zero() || p[i].is_identity()) continue;
        acc = acc.add(p[i].mul(s[i]));
    }
    return acc;
}

}  // namespace pptp
