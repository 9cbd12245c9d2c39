#pragma once

#include <optional>
#include <utility>

#include "pptp/bulletin.hpp"
#include "pptp/params.hpp"

namespace pptp {

/*
 * Flat-evidence protocol: the retailer commits to every user's truncated
 * reading, range-proves each against the per-user cap and the homomorphic
 * sum against the network threshold, and posts a digest of the whole package
 * to the board. Every client re-derives its own commitment, folds the list,
 * and checks all n+1 proofs.
 *
 * When the truncated sum exceeds the network threshold no sum proof exists;
 * the evidence is flagged peak and carries none, and bills for that period
 * are only acceptable at the penalty rate.
 */

struct BaselineEvidence {
    uint32_t period = 0;
    bool peak = false;
    Commitment c_star;
    std::optional<RangeProof> pi_star;  // absent iff peak
    std::vector<std::pair<Commitment, RangeProof>> users;  // ascending user index

    Bytes to_bytes() const;
    static std::optional<BaselineEvidence> from_bytes(std::span<const uint8_t> data);
    Hash32 digest() const;
};

// Commitments + proofs only; nothing posted. evidence_gen wraps this and
// appends the digest entry for (cycle, period).
BaselineEvidence build_baseline_evidence(const SystemParams& params, const RetailerKey& key,
                                         std::span<const uint64_t> x, uint32_t period, Rng& rng,
                                         unsigned threads = 0);

BaselineEvidence evidence_gen(const SystemParams& params, const RetailerKey& key,
                              std::span<const uint64_t> x, uint64_t cycle, uint32_t period,
                              Board& board, Rng& rng, unsigned threads = 0);

bool verify_consistency(const BaselineEvidence& evidence, const Board& board, uint64_t cycle);
bool verify_commitment(const SystemParams& params, uint64_t x_i, const Scalar& r_i,
                       const BaselineEvidence& evidence, uint64_t user_index);
bool verify_sum(const SystemParams& params, const BaselineEvidence& evidence);
bool verify_range_proofs(const SystemParams& params, const BaselineEvidence& evidence);

// Conjunction of the four checks for one user.
bool evidence_vrf(const SystemParams& params, uint64_t user_index, const Scalar& r_i,
                  uint64_t x_i, const BaselineEvidence& evidence, uint32_t period,
                  const Board& board, uint64_t cycle);

}  // namespace pptp
