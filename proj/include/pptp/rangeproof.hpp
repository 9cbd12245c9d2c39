#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "pptp/crypto.hpp"

namespace pptp {

/*
 * Non-interactive zero-knowledge range proofs for statements
 * (c, vmax): "c commits to some v in [0, vmax]".
 *
 * The underlying system proves bit-decomposed ranges [0, 2^nb) over vector
 * Pedersen commitments with a logarithmic inner-product argument, no trusted
 * setup. Arbitrary inclusive bounds are handled by proving both
 * v in [0, 2^nb) and vmax - v in [0, 2^nb) with nb = bitlen(vmax) rounded to
 * a power of two; the second commitment is vmax*G - c, which the verifier
 * derives itself. Several statements over the same bound aggregate into one
 * proof that grows logarithmically, not linearly.
 *
 * Transcripts are bound to the full statement (all commitments and the
 * bound), so a proof verifies only against the exact commitment and vmax it
 * was produced for.
 */

struct ZkParams {
    ComParams com;
    uint32_t max_bits = 0;  // largest supported bitlen of vmax, <= 64
    GroupElement u;         // inner-product base
    std::vector<GroupElement> gv;
    std::vector<GroupElement> hv;

    // Upper bound on statements per aggregated proof; generator vectors are
    // provisioned for it at setup.
    static constexpr uint32_t kMaxBatch = 16;

    bool operator==(const ZkParams&) const = default;
};

// Deterministic in (com, max_bits); max_bits must be in [1, 64].
ZkParams zk_setup(const ComParams& com, uint32_t max_bits);

struct RangeProof {
    uint64_t vmax = 0;
    uint32_t stmt_count = 0;  // committed statements covered by this proof
    uint32_t nbits = 0;       // padded per-statement bit width
    Hash32 statement_digest{};

    GroupElement a_commit, s_commit, t1_commit, t2_commit;
    Scalar taux, mu, t_hat;
    std::vector<GroupElement> ipa_l;
    std::vector<GroupElement> ipa_r;
    Scalar ipa_a, ipa_b;

    Bytes to_bytes() const;
    static std::optional<RangeProof> from_bytes(std::span<const uint8_t> data);
    size_t serialized_size() const;

    bool operator==(const RangeProof&) const = default;
};

RangeProof zk_prove(const ZkParams& zk, const Commitment& c, uint64_t vmax, uint64_t v,
                    const Scalar& r, Rng& rng);
bool zk_verify(const ZkParams& zk, const Commitment& c, uint64_t vmax, const RangeProof& proof);

struct BatchStatement {
    Commitment c;
    uint64_t vmax = 0;
    uint64_t v = 0;
    Scalar r;
};

// Aggregated proof over up to ZkParams::kMaxBatch statements sharing one
// bound; mixed bounds or an out-of-range member are prover errors.
RangeProof zk_prove_batch(const ZkParams& zk, std::span<const BatchStatement> statements,
                          Rng& rng);
bool zk_verify_batch(const ZkParams& zk, std::span<const Commitment> cs, uint64_t vmax,
                     const RangeProof& proof);

struct RangeStatement {
    Commitment c;
    uint64_t vmax = 0;
};

// Checks many independent (statement, proof) pairs at once by folding their
// verification equations into a single random linear combination over the
// shared generators; falls back to per-proof verification when the combined
// check fails. Result is identical to verifying each proof individually.
bool zk_verify_many(const ZkParams& zk, std::span<const RangeStatement> statements,
                    std::span<const RangeProof> proofs);
// Index of the first failing pair, or nullopt when all verify.
std::optional<size_t> zk_first_invalid(const ZkParams& zk,
                                       std::span<const RangeStatement> statements,
                                       std::span<const RangeProof> proofs);

// Padded bit width used for a bound (smallest power of two >= bitlen(vmax),
// minimum 1).
uint32_t range_bits_for(uint64_t vmax);

}  // namespace pptp
