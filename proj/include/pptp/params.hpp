#pragma once

#include <vector>

#include "pptp/crypto.hpp"
#include "pptp/pricing.hpp"
#include "pptp/rangeproof.hpp"

namespace pptp {

// Everything public that verifiers need: commitment and proof-system
// parameters, the tariff, the authorized auditor registry and the quorum
// configuration. Serializes round-trip; generator vectors are re-derived on
// load.
struct SystemParams {
    ComParams com;
    ZkParams zk;
    PriceSchedule sched;
    std::vector<VerifyKey> auditors;
    uint32_t f = 0;          // tolerated dishonest auditors
    uint64_t timeout_ms = 5000;

    Bytes to_bytes() const;
    static SystemParams from_bytes(std::span<const uint8_t> data);
    bool operator==(const SystemParams&) const = default;
};

struct Initialized {
    SystemParams params;
    RetailerKey retailer_key;
};

// Sets up commitments and the proof system at the given security level and
// draws the retailer's PRF key, which stays private to the retailer role.
Initialized initialize(unsigned security_bits, const PriceSchedule& sched, Rng& rng);

// Slot secrets r_{i,t} for all n users of one period; deterministic in the key.
std::vector<Scalar> slot_secret_gen(const SystemParams& params, const RetailerKey& key,
                                    uint32_t period, uint64_t n);

}  // namespace pptp
