#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>

#include "pptp/group.hpp"
#include "pptp/rng.hpp"

namespace pptp {

/*
 * Additively homomorphic Pedersen commitments over ristretto255, the PRF
 * deriving per-(user, period) commitment randomness, evidence hashing, and
 * detached signatures for board entries.
 *
 * Canonical encodings, normative for hashing and signing:
 *   - group elements / commitments: 32-byte ristretto255 encoding
 *   - scalars: 32-byte big-endian, values < group order
 */

struct ComParams {
    GroupElement g;  // value base
    GroupElement h;  // blinding base, hashed from g's encoding

    bool operator==(const ComParams&) const = default;
};

// Only the 128-bit level is supported; anything else throws
// UnsupportedParameter. Deterministic: two calls return identical params.
ComParams com_setup(unsigned security_bits);

struct Commitment {
    GroupElement point;

    const std::array<uint8_t, 32>& bytes() const { return point.bytes(); }
    static std::optional<Commitment> from_bytes(std::span<const uint8_t> enc32);
    bool operator==(const Commitment&) const = default;
};

// v*G + r*H. Tallied as one commitment operation.
Commitment commit(const ComParams& p, const Scalar& v, const Scalar& r);
Commitment commit_u64(const ComParams& p, uint64_t v, const Scalar& r);
// Group addition of commitments (not tallied).
Commitment com_add(const Commitment& a, const Commitment& b);

struct RetailerKey {
    static constexpr size_t kBytes = 16;  // 128-bit PRF key
    std::array<uint8_t, kBytes> bytes{};

    bool operator==(const RetailerKey&) const = default;
};

RetailerKey prf_keygen(unsigned security_bits, Rng& rng);

// Slot secret for (user, period): keyed hash over the pair encoded as two
// fixed-width 64-bit big-endian integers, output reduced into the scalar
// field.
Scalar prf_eval(const RetailerKey& key, uint64_t user, uint64_t period);

// 32-byte digest of a canonical serialization (SHA-256).
Hash32 hash_bytes(std::span<const uint8_t> message);

struct VerifyKey {
    std::array<uint8_t, 32> bytes{};
    bool operator==(const VerifyKey&) const = default;
    auto operator<=>(const VerifyKey&) const = default;
};

struct SigningKey {
    std::array<uint8_t, 64> bytes{};
};

struct SigKeyPair {
    SigningKey sk;
    VerifyKey vk;
};

using Signature = std::array<uint8_t, 64>;

SigKeyPair sig_keygen(Rng& rng);
SigKeyPair sig_keygen_from_seed(std::span<const uint8_t> seed32);
Signature sign(const SigningKey& sk, std::span<const uint8_t> message);
bool verify_sig(const VerifyKey& vk, std::span<const uint8_t> message,
                std::span<const uint8_t> signature);

}  // namespace pptp
