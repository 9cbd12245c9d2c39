#include "pptp/baseline.hpp"

#include "pptp/errors.hpp"
#include "pptp/parallel.hpp"

namespace pptp {

Bytes BaselineEvidence::to_bytes() const {
    Bytes b;
    put_u8(b, 1);
    put_u32(b, period);
    put_u8(b, peak ? 1 : 0);
    put_raw(b, c_star.bytes());
    if (!peak) {
        put_var(b, pi_star ? pi_star->to_bytes() : Bytes{});
    }
    put_u32(b, static_cast<uint32_t>(users.size()));
    for (const auto& [c, pi] : users) {
        put_raw(b, c.bytes());
        put_var(b, pi.to_bytes());
    }
    return b;
}

std::optional<BaselineEvidence> BaselineEvidence::from_bytes(std::span<const uint8_t> data) {
    try {
        ByteReader r(data);
        if (r.u8() != 1) return std::nullopt;
        BaselineEvidence e;
        e.period = r.u32();
        e.peak = r.u8() != 0;
        auto c_star = Commitment::from_bytes(r.take(32));
        if (!c_star) return std::nullopt;
        e.c_star = *c_star;
        if (!e.peak) {
            Bytes pi = r.var();
            auto parsed = RangeProof::from_bytes(pi);
            if (!parsed) return std::nullopt;
            e.pi_star = std::move(parsed);
        }
        uint32_t n = r.u32();
        if (n > 10'000'000) return std::nullopt;
        e.users.reserve(n);
        for (uint32_t i = 0; i < n; i++) {
            auto c = Commitment::from_bytes(r.take(32));
            auto pi = RangeProof::from_bytes(r.var());
            if (!c || !pi) return std::nullopt;
            e.users.emplace_back(*c, std::move(*pi));
        }
        r.expect_end();
        return e;
    } catch (const ParseError&) {
        return std::nullopt;
    }
}

Hash32 BaselineEvidence::digest() const { return hash_bytes(to_bytes()); }

BaselineEvidence build_baseline_evidence(const SystemParams& params, const RetailerKey& key,
                                         std::span<const uint64_t> x, uint32_t period, Rng& rng,
                                         unsigned threads) {
    if (period >= params.sched.k) throw Error("period index out of range");
    const uint64_t n = x.size();
    const uint64_t delta = params.sched.delta[period];
    const uint64_t gamma = params.sched.gamma[period];
    for (uint64_t xi : x) {
        if (xi > delta) throw WitnessOutOfRange("measurement exceeds the per-user cap");
    }

    std::vector<Scalar> secrets = slot_secret_gen(params, key, period, n);

    BaselineEvidence evidence;
    evidence.period = period;
    evidence.users.resize(n);

    // Per-user commitments and proofs; prover randomness is forked per user
    // so the parallel schedule cannot change the output.
    std::vector<Commitment> cs(n);
    for (uint64_t i = 0; i < n; i++) {
        cs[i] = commit_u64(params.com, x[i], secrets[i]);
    }
    std::vector<Rng> rngs;
    rngs.reserve(n);
    for (uint64_t i = 0; i < n; i++) rngs.push_back(rng.fork("leaf-proof", i));
    parallel_for(n, threads, [&](size_t i) {
        evidence.users[i] = {cs[i],
                             zk_prove(params.zk, cs[i], delta, x[i], secrets[i], rngs[i])};
    });

    uint64_t x_star = 0;
    Scalar r_star;
    for (uint64_t i = 0; i < n; i++) {
        x_star += x[i];
        r_star = r_star.add(secrets[i]);
    }
    evidence.c_star = commit_u64(params.com, x_star, r_star);
    if (x_star > gamma) {
        evidence.peak = true;  // no sum proof exists above the threshold
    } else {
        Rng sum_rng = rng.fork("sum-proof");
        evidence.pi_star = zk_prove(params.zk, evidence.c_star, gamma, x_star, r_star, sum_rng);
    }
    return evidence;
}

BaselineEvidence evidence_gen(const SystemParams& params, const RetailerKey& key,
                              std::span<const uint64_t> x, uint64_t cycle, uint32_t period,
                              Board& board, Rng& rng, unsigned threads) {
    BaselineEvidence evidence = build_baseline_evidence(params, key, x, period, rng, threads);
    Hash32 digest = evidence.digest();
    board.append(EntryKind::Digest, cycle, period, Bytes(digest.begin(), digest.end()));
    return evidence;
}

bool verify_consistency(const BaselineEvidence& evidence, const Board& board, uint64_t cycle) {
    auto entries = board.read_kind(cycle, evidence.period, EntryKind::Digest);
    if (entries.empty()) return false;
    Hash32 digest = evidence.digest();
    Bytes expect(digest.begin(), digest.end());
    // the first digest posted for the period is the binding one
    return entries.front().payload == expect;
}

bool verify_commitment(const SystemParams& params, uint64_t x_i, const Scalar& r_i,
                       const BaselineEvidence& evidence, uint64_t user_index) {
    if (user_index >= evidence.users.size()) return false;
    Commitment mine = commit_u64(params.com, x_i, r_i);
    return mine == evidence.users[user_index].first;
}

bool verify_sum(const SystemParams& params, const BaselineEvidence& evidence) {
    if (evidence.period >= params.sched.k) return false;
    Commitment fold{GroupElement::identity()};
    for (const auto& [c, _] : evidence.users) fold = com_add(fold, c);
    if (!(fold == evidence.c_star)) return false;
    if (evidence.peak) return !evidence.pi_star.has_value();
    if (!evidence.pi_star) return false;
    return zk_verify(params.zk, evidence.c_star, params.sched.gamma[evidence.period],
                     *evidence.pi_star);
}

bool verify_range_proofs(const SystemParams& params, const BaselineEvidence& evidence) {
    if (evidence.period >= params.sched.k) return false;
    const uint64_t delta = params.sched.delta[evidence.period];
    std::vector<RangeStatement> statements;
    std::vector<RangeProof> proofs;
    statements.reserve(evidence.users.size());
    proofs.reserve(evidence.users.size());
    for (const auto& [c, pi] : evidence.users) {
        statements.push_back({c, delta});
        proofs.push_back(pi);
    }
    return zk_verify_many(params.zk, statements, proofs);
}

bool evidence_vrf(const SystemParams& params, uint64_t user_index, const Scalar& r_i,
                  uint64_t x_i, const BaselineEvidence& evidence, uint32_t period,
                  const Board& board, uint64_t cycle) {
    if (evidence.period != period) return false;
    return verify_consistency(evidence, board, cycle) &&
           verify_commitment(params, x_i, r_i, evidence, user_index) &&
           verify_sum(params, evidence) && verify_range_proofs(params, evidence);
}

}  // namespace pptp
