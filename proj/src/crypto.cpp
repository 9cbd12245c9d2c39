#include "pptp/crypto.hpp"

#include <sodium.h>

#include <cstring>

#include "pptp/counters.hpp"
#include "pptp/errors.hpp"

namespace pptp {

namespace {
constexpr char kGeneratorTag[] = "pptp/v1/pedersen-h";
}

ComParams com_setup(unsigned security_bits) {
    if (security_bits != 128) {
        throw UnsupportedParameter("com_setup: only the 128-bit level is supported");
    }
    ComParams p;
    p.g = GroupElement::base();
    // Second generator with unknown discrete log relative to g: hash the
    // tagged encoding of g onto the group.
    Bytes material(kGeneratorTag, kGeneratorTag + sizeof(kGeneratorTag) - 1);
    put_raw(material, p.g.bytes());
    std::array<uint8_t, 64> wide;
    crypto_hash_sha512(wide.data(), material.data(), material.size());
    p.h = GroupElement::from_uniform(wide);
    return p;
}

std::optional<Commitment> Commitment::from_bytes(std::span<const uint8_t> enc32) {
    auto pt = GroupElement::from_bytes(enc32);
    if (!pt) return std::nullopt;
    return Commitment{*pt};
}

Commitment commit(const ComParams& p, const Scalar& v, const Scalar& r) {
    ops::add_commits();
    return Commitment{p.g.mul(v).add(p.h.mul(r))};
}

Commitment commit_u64(const ComParams& p, uint64_t v, const Scalar& r) {
    return commit(p, Scalar::from_u64(v), r);
}

Commitment com_add(const Commitment& a, const Commitment& b) {
    return Commitment{a.point.add(b.point)};
}

RetailerKey prf_keygen(unsigned security_bits, Rng& rng) {
    if (security_bits != 128) {
        throw UnsupportedParameter("prf_keygen: only the 128-bit level is supported");
    }
    RetailerKey k;
    rng.fill(k.bytes);
    return k;
}

Scalar prf_eval(const RetailerKey& key, uint64_t user, uint64_t period) {
    Bytes input;
    put_u64(input, user);
    put_u64(input, period);
    crypto_auth_hmacsha512_state st;
    crypto_auth_hmacsha512_init(&st, key.bytes.data(), key.bytes.size());
    crypto_auth_hmacsha512_update(&st, input.data(), input.size());
    std::array<uint8_t, 64> mac;
    crypto_auth_hmacsha512_final(&st, mac.data());
    return Scalar::reduce_wide(mac);
}

Hash32 hash_bytes(std::span<const uint8_t> message) {
    Hash32 out;
    crypto_hash_sha256(out.data(), message.data(), message.size());
    return out;
}

SigKeyPair sig_keygen(Rng& rng) {
    std::array<uint8_t, 32> seed;
    rng.fill(seed);
    return sig_keygen_from_seed(seed);
}

SigKeyPair sig_keygen_from_seed(std::span<const uint8_t> seed32) {
    if (seed32.size() != 32) throw Error("sig_keygen_from_seed expects 32 bytes");
    SigKeyPair kp;
    crypto_sign_seed_keypair(kp.vk.bytes.data(), kp.sk.bytes.data(), seed32.data());
    return kp;
}

Signature sign(const SigningKey& sk, std::span<const uint8_t> message) {
    Signature sig;
    crypto_sign_detached(sig.data(), nullptr, message.data(), message.size(), sk.bytes.data());
    return sig;
}

bool verify_sig(const VerifyKey& vk, std::span<const uint8_t> message,
                std::span<const uint8_t> signature) {
    if (signature.size() != 64) return false;
    return crypto_sign_verify_detached(signature.data(), message.data(), message.size(),
                                       vk.bytes.data()) == 0;
}

}  // namespace pptp
