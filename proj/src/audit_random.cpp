#include "pptp/audit_random.hpp"

#include <algorithm>
#include <numeric>

#include "pptp/errors.hpp"

namespace pptp {

AuditPlan pick_targets(uint64_t checker, uint64_t n, uint64_t z, Rng& rng) {
    if (n == 0 || checker >= n) throw Error("checker index out of range");
    if (z > n - 1) throw Error("cannot sample more peers than exist");
    std::vector<uint64_t> pool;
    pool.reserve(n - 1);
    for (uint64_t i = 0; i < n; i++) {
        if (i != checker) pool.push_back(i);
    }
    // partial Fisher-Yates: the first z slots become the sample
    for (uint64_t i = 0; i < z; i++) {
        uint64_t j = i + rng.below(pool.size() - i);
        std::swap(pool[i], pool[j]);
    }
    pool.resize(z);
    return {checker, std::move(pool)};
}

SpotOutcome spot_check(const SystemParams& params, uint32_t period, const AuditPlan& plan,
                       const FetchProof& fetch, const Commitment& posted_root) {
    if (period >= params.sched.k) throw Error("period index out of range");
    const uint64_t delta = params.sched.delta[period];
    SpotOutcome outcome;
    for (uint64_t target : plan.targets) {
        auto served = fetch(target);
        if (!served) {
            outcome.unavailable.push_back(target);
            continue;
        }
        auto& [inclusion, range] = *served;
        if (!verify_inclusion(inclusion) || !(inclusion.root() == posted_root) ||
            inclusion.level != 0) {
            FraudProof fraud;
            fraud.kind = FraudProof::Kind::Inclusion;
            fraud.binding = inclusion;
            outcome.kind = SpotOutcome::Kind::Fraud;
            outcome.fraud_target = target;
            outcome.fraud = std::move(fraud);
            return outcome;
        }
        if (!zk_verify(params.zk, inclusion.leaf(), delta, range)) {
            FraudProof fraud;
            fraud.kind = FraudProof::Kind::LeafRange;
            fraud.binding = inclusion;
            fraud.range_proof = range;
            outcome.kind = SpotOutcome::Kind::Fraud;
            outcome.fraud_target = target;
            outcome.fraud = std::move(fraud);
            return outcome;
        }
    }
    return outcome;
}

Bytes SpotFraudEntry::payload() const {
    Bytes b;
    put_raw(b, vk.bytes);
    put_u64(b, cycle);
    put_u32(b, period);
    put_u64(b, target);
    put_var(b, fraud.to_bytes());
    return b;
}

std::optional<SpotFraudEntry> SpotFraudEntry::from_payload(std::span<const uint8_t> data) {
    try {
        ByteReader r(data);
        SpotFraudEntry e;
        e.vk.bytes = r.arr<32>();
        e.cycle = r.u64();
        e.period = r.u32();
        e.target = r.u64();
        auto fraud = FraudProof::from_bytes(r.var());
        if (!fraud) return std::nullopt;
        e.fraud = std::move(*fraud);
        r.expect_end();
        return e;
    } catch (const ParseError&) {
        return std::nullopt;
    }
}

uint64_t publish_spot_fraud(Board& board, uint64_t cycle, uint32_t period, uint64_t target,
                            const FraudProof& fraud, const SigKeyPair& keys) {
    SpotFraudEntry entry{keys.vk, cycle, period, target, fraud};
    Bytes payload = entry.payload();
    Signature sig = sign(keys.sk, payload);
    return board.append(EntryKind::Fraud, cycle, period, std::move(payload),
                        Bytes(sig.begin(), sig.end()));
}

uint64_t publish_unavailable(Board& board, uint64_t cycle, uint32_t period, uint64_t target,
                             const SigKeyPair& keys) {
    Bytes payload;
    put_raw(payload, keys.vk.bytes);
    put_u64(payload, cycle);
    put_u32(payload, period);
    put_u64(payload, target);
    Signature sig = sign(keys.sk, payload);
    return board.append(EntryKind::Unavailable, cycle, period, std::move(payload),
                        Bytes(sig.begin(), sig.end()));
}

bool await_fraud_window(const SystemParams& params, const Board& board, uint64_t cycle,
                        uint64_t period, uint64_t timeout_ms, Clock& clock) {
    clock.sleep_ms(timeout_ms);
    std::optional<Commitment> root = board_root(board, cycle, period);
    if (!root) return false;
    const uint64_t delta = params.sched.delta[period];
    for (const auto& entry : board.read_kind(cycle, period, EntryKind::Fraud)) {
        auto spot = SpotFraudEntry::from_payload(entry.payload);
        if (spot && verify_fraud_proof(params, *root, delta, spot->fraud)) return false;
    }
    return true;
}

mpq_class hypergeom_pmf(uint64_t n, uint64_t f, uint64_t z, uint64_t u) {
    if (n == 0) throw Error("empty population");
    if (f > n - 1 || z > n - 1) throw Error("f and z must not exceed n-1");
    if (u > std::min(f, z)) throw Error("u exceeds min(f, z)");
    if (z - u > (n - 1) - f) return mpq_class(0);

    mpz_class good, rest, all;
    mpz_bin_uiui(good.get_mpz_t(), f, u);
    mpz_bin_uiui(rest.get_mpz_t(), n - 1 - f, z - u);
    mpz_bin_uiui(all.get_mpz_t(), n - 1, z);
    mpq_class result(good * rest, all);
    result.canonicalize();
    return result;
}

MissProbability miss_probability_bound(uint64_t n, uint64_t f, uint64_t h, uint64_t z) {
    if (n < 2) throw Error("need at least two users");
    if (f > n - 1 || z > n - 1) throw Error("f and z must not exceed n-1");

    MissProbability out;
    mpq_class ratio(mpz_class(n - 1 - f), mpz_class(n - 1));
    ratio.canonicalize();
    mpz_class bound_num, bound_den;
    mpz_pow_ui(bound_num.get_mpz_t(), ratio.get_num().get_mpz_t(),
               static_cast<unsigned long>(h * z));
    mpz_pow_ui(bound_den.get_mpz_t(), ratio.get_den().get_mpz_t(),
               static_cast<unsigned long>(h * z));
    out.bound = mpq_class(bound_num, bound_den);
    out.bound.canonicalize();

    mpq_class per_checker(1);
    for (uint64_t i = 0; i < z; i++) {
        if (n - 1 - f < i + 1 && f > 0) {
            // more draws than good leaves: a bad one is guaranteed
            per_checker = 0;
            break;
        }
        per_checker *= mpq_class(mpz_class(n - f - i - 1), mpz_class(n - i - 1));
    }
    per_checker.canonicalize();
    mpz_class exact_num, exact_den;
    mpz_pow_ui(exact_num.get_mpz_t(), per_checker.get_num().get_mpz_t(),
               static_cast<unsigned long>(h));
    mpz_pow_ui(exact_den.get_mpz_t(), per_checker.get_den().get_mpz_t(),
               static_cast<unsigned long>(h));
    out.exact = mpq_class(exact_num, exact_den);
    out.exact.canonicalize();
    return out;
}

}  // namespace pptp
