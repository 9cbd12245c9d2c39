#pragma once

#include <gmpxx.h>

#include <functional>
#include <optional>

#include "pptp/merkle.hpp"

namespace pptp {

/*
 * Auditor-free variant: every user spot-checks z uniformly chosen peers'
 * inclusion and range proofs and publishes re-checkable fraud material when
 * one fails, plus the exact detection-probability calculator for that
 * process (hypergeometric draws without replacement).
 */

struct AuditPlan {
    uint64_t checker = 0;
    std::vector<uint64_t> targets;  // distinct, never the checker itself
};

// Uniform sample of z peers without replacement; deterministic in the rng.
AuditPlan pick_targets(uint64_t checker, uint64_t n, uint64_t z, Rng& rng);

struct SpotOutcome {
    enum class Kind { Clean, Fraud } kind = Kind::Clean;
    std::optional<uint64_t> fraud_target;
    std::optional<FraudProof> fraud;
    std::vector<uint64_t> unavailable;  // peers the retailer refused to serve
};

using FetchProof = std::function<std::optional<std::pair<InclusionProof, RangeProof>>(uint64_t)>;

// Checks every target: the first cryptographic failure wins and produces
// publishable material; fetch failures are collected separately as
// availability complaints rather than fraud.
SpotOutcome spot_check(const SystemParams& params, uint32_t period, const AuditPlan& plan,
                       const FetchProof& fetch, const Commitment& posted_root);

// Board payload for a spot-check fraud entry (kind Fraud).
struct SpotFraudEntry {
    VerifyKey vk;
    uint64_t cycle = 0;
    uint32_t period = 0;
    uint64_t target = 0;
    FraudProof fraud;

    Bytes payload() const;
    static std::optional<SpotFraudEntry> from_payload(std::span<const uint8_t> data);
};

uint64_t publish_spot_fraud(Board& board, uint64_t cycle, uint32_t period, uint64_t target,
                            const FraudProof& fraud, const SigKeyPair& keys);
uint64_t publish_unavailable(Board& board, uint64_t cycle, uint32_t period, uint64_t target,
                             const SigKeyPair& keys);

// After the spot checks, wait out the publication window and reject if any
// valid fraud entry for the period appeared. Returns true when clean.
bool await_fraud_window(const SystemParams& params, const Board& board, uint64_t cycle,
                        uint64_t period, uint64_t timeout_ms, Clock& clock);

// P[U = u] for U hypergeometric: u bad draws among z draws without
// replacement from a population of n-1 peers containing f bad ones.
// C(f,u) * C(n-f-1, z-u) / C(n-1, z), exact.
mpq_class hypergeom_pmf(uint64_t n, uint64_t f, uint64_t z, uint64_t u);

struct MissProbability {
    mpq_class bound;  // ((n-f-1)/(n-1))^(h*z)
    mpq_class exact;  // (prod_{i<z} (n-f-1-i)/(n-1-i))^h
};

// Probability that h independent checkers all miss every one of the f bad
// leaves, as the closed-form bound and the exact product.
MissProbability miss_probability_bound(uint64_t n, uint64_t f, uint64_t h, uint64_t z);

}  // namespace pptp
