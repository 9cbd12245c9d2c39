#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "pptp/bytes.hpp"
#include "pptp/rng.hpp"

namespace pptp {

// Scalar in Z_q, q the order of the ristretto255 group. Stored in the
// little-endian form the arithmetic wants; the canonical external encoding
// is 32-byte big-endian and rejects values >= q.
class Scalar {
public:
    static constexpr size_t kBytes = 32;

    Scalar() : le_{} {}

    static Scalar zero() { return Scalar(); }
    static Scalar one() { return from_u64(1); }
    static Scalar from_u64(uint64_t v);
    // Reduce a 64-byte little-endian value mod q.
    static Scalar reduce_wide(std::span<const uint8_t> wide64);
    static Scalar random(Rng& rng);

    static std::optional<Scalar> from_be_bytes(std::span<const uint8_t> be32);
    std::array<uint8_t, 32> to_be_bytes() const;

    Scalar add(const Scalar& o) const;
    Scalar sub(const Scalar& o) const;
    Scalar mul(const Scalar& o) const;
    Scalar negate() const;
    // Multiplicative inverse; throws on zero.
    Scalar invert() const;

    bool is_zero() const;
    bool operator==(const Scalar& o) const { return le_ == o.le_; }

    const uint8_t* le_data() const { return le_.data(); }
    uint8_t* le_data() { return le_.data(); }

private:
    std::array<uint8_t, 32> le_;
};

// Group element in canonical 32-byte ristretto255 encoding. The identity is
// the all-zero string; equality is byte equality (encodings are canonical).
class GroupElement {
public:
    static constexpr size_t kBytes = 32;

    GroupElement() : enc_{} {}

    static GroupElement identity() { return GroupElement(); }
    static GroupElement base();
    // Validating decoder; nullopt for non-canonical or off-group strings.
    static std::optional<GroupElement> from_bytes(std::span<const uint8_t> enc32);
    // Hash-to-group over 64 uniform bytes.
    static GroupElement from_uniform(std::span<const uint8_t> wide64);

    GroupElement add(const GroupElement& o) const;
    GroupElement sub(const GroupElement& o) const;
    GroupElement mul(const Scalar& s) const;

    bool is_identity() const;
    bool operator==(const GroupElement& o) const { return enc_ == o.enc_; }

    const std::array<uint8_t, 32>& bytes() const { return enc_; }

private:
    std::array<uint8_t, 32> enc_;
};

// Sum of s[i] * p[i]. Zero scalars and identity points are skipped.
GroupElement multi_scalar_mul(std::span<const Scalar> s, std::span<const GroupElement> p);

}  // namespace pptp
