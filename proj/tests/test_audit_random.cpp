#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>
#include <set>

#include "helpers.hpp"
#include "pptp/audit_random.hpp"

using namespace pptp;
using pptp::testing::make_system;

namespace {

// Full tree fixture with optional bad leaves (value above the cap, proof for
// a different statement).
struct SpotFixture {
    pptp::testing::TestSystem sys;
    Rng rng = Rng::deterministic(61);
    std::vector<uint64_t> x;
    std::vector<Scalar> secrets;
    CommitTree tree;
    std::vector<RangeProof> proofs;
    std::vector<bool> bad;

    SpotFixture(uint64_t n, std::vector<uint64_t> bad_leaves = {})
        : sys(make_system(n, 2, n * 10 - 1, 10)) {
        bad.assign(n, false);
        for (uint64_t b : bad_leaves) bad[b] = true;
        secrets = slot_secret_gen(sys.params, sys.key, 0, n);
        std::vector<Commitment> leaves;
        for (uint64_t i = 0; i < n; i++) {
            uint64_t value = bad[i] ? 11 + i : rng.below(11);
            x.push_back(value);
            leaves.push_back(commit_u64(sys.params.com, value, secrets[i]));
            uint64_t proven = bad[i] ? 10 : value;
            Commitment stmt = bad[i] ? commit_u64(sys.params.com, proven, secrets[i]) : leaves[i];
            proofs.push_back(zk_prove(sys.params.zk, stmt, 10, proven, secrets[i], rng));
        }
        tree = build_tree(leaves);
    }

    FetchProof fetch() {
        return [this](uint64_t j) -> std::optional<std::pair<InclusionProof, RangeProof>> {
            return std::make_pair(inclusion_proof(tree, j), proofs[j]);
        };
    }
};

}  // namespace

TEST_CASE("pick_targets edge cases and distinctness") {
    Rng rng = Rng::deterministic(62);
    AuditPlan all = pick_targets(3, 6, 5, rng);
    CHECK(all.targets.size() == 5);
    std::set<uint64_t> unique(all.targets.begin(), all.targets.end());
    CHECK(unique.size() == 5);
    CHECK(unique.count(3) == 0);

    AuditPlan none = pick_targets(0, 6, 0, rng);
    CHECK(none.targets.empty());

    CHECK_THROWS_AS(pick_targets(0, 6, 6, rng), Error);
    CHECK_THROWS_AS(pick_targets(9, 6, 1, rng), Error);
}

TEST_CASE("pick_targets marginals are uniform") {
    const uint64_t n = 11, z = 3, trials = 10000;
    Rng rng = Rng::deterministic(63);
    std::map<uint64_t, uint64_t> hits;
    for (uint64_t t = 0; t < trials; t++) {
        AuditPlan plan = pick_targets(0, n, z, rng);
        for (uint64_t j : plan.targets) hits[j]++;
    }
    CHECK(hits.count(0) == 0);
    // each peer should appear with frequency z/(n-1) = 0.3
    double expect = static_cast<double>(trials) * z / (n - 1);
    double sigma = std::sqrt(expect * (1.0 - static_cast<double>(z) / (n - 1)));
    for (uint64_t j = 1; j < n; j++) {
        double got = static_cast<double>(hits[j]);
        CHECK(std::abs(got - expect) <= 3.0 * sigma);
    }
}

TEST_CASE("spot_check clean run") {
    SpotFixture f(6);
    Rng rng = Rng::deterministic(64);
    AuditPlan plan = pick_targets(0, 6, 5, rng);
    SpotOutcome out = spot_check(f.sys.params, 0, plan, f.fetch(), f.tree.root());
    CHECK(out.kind == SpotOutcome::Kind::Clean);
    CHECK(out.unavailable.empty());
}

TEST_CASE("spot_check flags an out-of-range target with publishable material") {
    SpotFixture f(6, {4});
    Rng rng = Rng::deterministic(65);
    AuditPlan plan;
    plan.checker = 0;
    plan.targets = {1, 4, 2};
    SpotOutcome out = spot_check(f.sys.params, 0, plan, f.fetch(), f.tree.root());
    CHECK(out.kind == SpotOutcome::Kind::Fraud);
    CHECK(out.fraud_target == 4);
    REQUIRE(out.fraud.has_value());
    CHECK(verify_fraud_proof(f.sys.params, f.tree.root(), 10, *out.fraud));
}

TEST_CASE("spot_check flags a broken inclusion path") {
    SpotFixture f(6);
    auto fetch = [&](uint64_t j) -> std::optional<std::pair<InclusionProof, RangeProof>> {
        InclusionProof proof = inclusion_proof(f.tree, j);
        if (j == 2) proof.siblings[0] = proof.path.back();  // corrupt the path
        return std::make_pair(proof, f.proofs[j]);
    };
    AuditPlan plan{0, {1, 2}};
    SpotOutcome out = spot_check(f.sys.params, 0, plan, fetch, f.tree.root());
    CHECK(out.kind == SpotOutcome::Kind::Fraud);
    CHECK(out.fraud_target == 2);
    REQUIRE(out.fraud.has_value());
    CHECK(out.fraud->kind == FraudProof::Kind::Inclusion);
    CHECK(verify_fraud_proof(f.sys.params, f.tree.root(), 10, *out.fraud));
}

TEST_CASE("fetch refusal becomes an availability complaint, not fraud") {
    SpotFixture f(5);
    auto fetch = [&](uint64_t j) -> std::optional<std::pair<InclusionProof, RangeProof>> {
        if (j == 3) return std::nullopt;
        return std::make_pair(inclusion_proof(f.tree, j), f.proofs[j]);
    };
    AuditPlan plan{0, {3, 1}};
    SpotOutcome out = spot_check(f.sys.params, 0, plan, fetch, f.tree.root());
    CHECK(out.kind == SpotOutcome::Kind::Clean);
    CHECK(out.unavailable == std::vector<uint64_t>{3});

    // complaint and fraud entries land on the board under their own kinds
    MemoryBoard board;
    Rng rng = Rng::deterministic(66);
    SigKeyPair kp = sig_keygen(rng);
    publish_unavailable(board, 0, 0, 3, kp);
    CHECK(board.read_kind(0, 0, EntryKind::Unavailable).size() == 1);
}

TEST_CASE("no false accusations across many honest trials") {
    SpotFixture f(4);
    const int trials = 10000;
    Rng rng = Rng::deterministic(67);
    FetchProof fetch = f.fetch();
    for (int t = 0; t < trials; t++) {
        AuditPlan plan = pick_targets(t % 4, 4, 1, rng);
        SpotOutcome out = spot_check(f.sys.params, 0, plan, fetch, f.tree.root());
        REQUIRE(out.kind == SpotOutcome::Kind::Clean);
    }
}

TEST_CASE("await_fraud_window rejects once valid fraud is posted") {
    SpotFixture f(6, {2});
    MemoryBoard board;
    auto rb = f.tree.root().bytes();
    board.append(EntryKind::Root, 0, 0, Bytes(rb.begin(), rb.end()));

    FakeClock clock;
    CHECK(await_fraud_window(f.sys.params, board, 0, 0, 100, clock));

    AuditPlan plan{0, {2}};
    SpotOutcome out = spot_check(f.sys.params, 0, plan, f.fetch(), f.tree.root());
    REQUIRE(out.fraud.has_value());
    Rng rng = Rng::deterministic(68);
    SigKeyPair kp = sig_keygen(rng);
    publish_spot_fraud(board, 0, 0, *out.fraud_target, *out.fraud, kp);
    CHECK(!await_fraud_window(f.sys.params, board, 0, 0, 100, clock));
}

TEST_CASE("hypergeometric pmf: exact values and normalization") {
    CHECK(hypergeom_pmf(10, 0, 4, 0) == mpq_class(1));

    // n=10, f=3, z=4: cross-check against exhaustive enumeration of all
    // C(9,4) target sets
    uint64_t n = 10, f = 3, z = 4;
    std::map<uint64_t, uint64_t> counts;
    uint64_t total = 0;
    // peers are 1..9, bad ones are 1..3
    std::vector<uint64_t> peers = {1, 2, 3, 4, 5, 6, 7, 8, 9};
    for (size_t a = 0; a < 9; a++)
        for (size_t b = a + 1; b < 9; b++)
            for (size_t c = b + 1; c < 9; c++)
                for (size_t d = c + 1; d < 9; d++) {
                    uint64_t bad = (peers[a] <= 3) + (peers[b] <= 3) + (peers[c] <= 3) +
                                   (peers[d] <= 3);
                    counts[bad]++;
                    total++;
                }
    mpq_class sum = 0;
    for (uint64_t u = 0; u <= std::min(f, z); u++) {
        mpq_class pmf = hypergeom_pmf(n, f, z, u);
        mpq_class expect(mpz_class(counts[u]), mpz_class(total));
        expect.canonicalize();
        CHECK(pmf == expect);
        sum += pmf;
    }
    CHECK(sum == mpq_class(1));

    CHECK_THROWS_AS(hypergeom_pmf(10, 3, 4, 5), Error);
    CHECK_THROWS_AS(hypergeom_pmf(10, 10, 4, 1), Error);
}

TEST_CASE("miss probability: closed form, exact product, monotonicity") {
    SUBCASE("degenerate cases are certain misses") {
        CHECK(miss_probability_bound(10, 3, 0, 4).exact == mpq_class(1));
        CHECK(miss_probability_bound(10, 3, 5, 0).exact == mpq_class(1));
        CHECK(miss_probability_bound(10, 0, 5, 4).exact == mpq_class(1));
        CHECK(miss_probability_bound(10, 0, 5, 4).bound == mpq_class(1));
    }
    SUBCASE("exact product never exceeds the closed-form bound") {
        for (uint64_t n : {5ull, 12ull, 30ull}) {
            for (uint64_t f = 0; f < n - 1; f += 3) {
                for (uint64_t z = 0; z < n - 1; z += 2) {
                    auto mp = miss_probability_bound(n, f, 3, z);
                    CHECK(mp.exact <= mp.bound);
                }
            }
        }
    }
    SUBCASE("exact formula matches the pmf at u=0 raised to h") {
        auto mp = miss_probability_bound(10, 3, 2, 4);
        mpq_class p0 = hypergeom_pmf(10, 3, 4, 0);
        CHECK(mp.exact == p0 * p0);
    }
    SUBCASE("monotone in h, z and f") {
        auto base = miss_probability_bound(20, 4, 3, 3);
        CHECK(miss_probability_bound(20, 4, 4, 3).exact <= base.exact);
        CHECK(miss_probability_bound(20, 4, 3, 4).exact <= base.exact);
        CHECK(miss_probability_bound(20, 5, 3, 3).exact <= base.exact);
    }
}

TEST_CASE("sampling monte carlo tracks the exact product") {
    // small instance so the miss event actually occurs
    const uint64_t n = 12, f = 2, h = 2, z = 2;
    auto mp = miss_probability_bound(n, f, h, z);
    const uint64_t trials = 20000;
    Rng rng = Rng::deterministic(69);
    uint64_t misses = 0;
    for (uint64_t t = 0; t < trials; t++) {
        bool detected = false;
        for (uint64_t checker = 0; checker < h; checker++) {
            AuditPlan plan = pick_targets(checker + f, n, z, rng);
            for (uint64_t target : plan.targets) {
                if (target < f) detected = true;  // bad leaves are 0..f-1
            }
        }
        if (!detected) misses++;
    }
    double exact = mp.exact.get_d();
    double sigma = std::sqrt(exact * (1 - exact) / static_cast<double>(trials));
    double rate = static_cast<double>(misses) / static_cast<double>(trials);
    CHECK(rate <= mp.bound.get_d() + 3 * sigma);
    CHECK(std::abs(rate - exact) <= 3 * sigma);
}
