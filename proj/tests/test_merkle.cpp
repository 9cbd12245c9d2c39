#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <bit>

#include "helpers.hpp"
#include "pptp/counters.hpp"
#include "pptp/merkle.hpp"

using namespace pptp;
using pptp::testing::make_system;

namespace {

std::vector<Commitment> random_leaves(const ComParams& com, size_t n, Rng& rng,
                                      std::vector<uint64_t>* values = nullptr,
                                      std::vector<Scalar>* secrets = nullptr) {
    std::vector<Commitment> leaves;
    for (size_t i = 0; i < n; i++) {
        uint64_t v = rng.below(1000);
        Scalar r = Scalar::random(rng);
        if (values) values->push_back(v);
        if (secrets) secrets->push_back(r);
        leaves.push_back(commit_u64(com, v, r));
    }
    return leaves;
}

struct MerkleSession {
    pptp::testing::TestSystem sys;
    MemoryBoard board;
    Rng rng = Rng::deterministic(51);
    std::vector<uint64_t> x;
    std::vector<Scalar> secrets;
    MerkleEvidence evidence;
    std::vector<SigKeyPair> auditors;
    uint64_t cycle = 0;
    uint32_t period = 0;

    MerkleSession(uint64_t n, uint64_t gamma, uint64_t delta, std::vector<uint64_t> xs,
                  uint32_t f = 1)
        : sys(make_system(n, 3, gamma, delta)), x(std::move(xs)) {
        for (uint32_t a = 0; a < f + 1; a++) {
            auditors.push_back(sig_keygen(rng));
            sys.params.auditors.push_back(auditors.back().vk);
        }
        sys.params.f = f;
        sys.params.timeout_ms = 1000;
        evidence = evidence_gen_merkle(sys.params, sys.key, x, cycle, period, board, rng);
        secrets = slot_secret_gen(sys.params, sys.key, period, x.size());
    }

    void run_auditors() {
        for (const auto& kp : auditors) {
            evidence_vrf_merkle_auditor(sys.params, evidence.auditor, period, board, cycle, kp);
        }
    }

    bool user_accepts(uint64_t i, Clock& clock) {
        return evidence_vrf_merkle_user(sys.params, secrets[i], x[i], evidence.users[i], period,
                                        board, cycle, clock);
    }
};

}  // namespace

TEST_CASE("tree shapes: node counts and roots") {
    ComParams com = com_setup(128);
    Rng rng = Rng::deterministic(52);

    SUBCASE("single leaf is its own root") {
        auto leaves = random_leaves(com, 1, rng);
        CommitTree tree = build_tree(leaves);
        CHECK(tree.node_count() == 1);
        CHECK(tree.root() == leaves[0]);
    }
    SUBCASE("power of two: 2n-1 nodes") {
        auto leaves = random_leaves(com, 8, rng);
        CommitTree tree = build_tree(leaves);
        CHECK(tree.node_count() == 15);
        CHECK(tree.levels.size() == 4);
    }
    SUBCASE("seven leaves: left-aligned with a lone child") {
        auto leaves = random_leaves(com, 7, rng);
        CommitTree tree = build_tree(leaves);
        CHECK(tree.levels[0].size() == 7);
        CHECK(tree.levels[1].size() == 4);
        CHECK(tree.levels[2].size() == 2);
        CHECK(tree.levels[3].size() == 1);
        // the lone 7th leaf propagates unchanged (missing child = identity)
        CHECK(tree.levels[1][3] == leaves[6]);
    }
    SUBCASE("root equals the homomorphic fold of all leaves") {
        std::vector<uint64_t> values;
        std::vector<Scalar> secrets;
        auto leaves = random_leaves(com, 8, rng, &values, &secrets);
        CommitTree tree = build_tree(leaves);
        uint64_t vsum = 0;
        Scalar rsum;
        for (size_t i = 0; i < 8; i++) {
            vsum += values[i];
            rsum = rsum.add(secrets[i]);
        }
        CHECK(tree.root() == commit_u64(com, vsum, rsum));
    }
    SUBCASE("empty input is rejected") {
        CHECK_THROWS_AS(build_tree(std::vector<Commitment>{}), Error);
    }
}

TEST_CASE("inclusion proofs: size law and verification") {
    ComParams com = com_setup(128);
    Rng rng = Rng::deterministic(53);

    for (size_t n : {2u, 8u, 64u}) {
        auto leaves = random_leaves(com, n, rng);
        CommitTree tree = build_tree(leaves);
        size_t m = static_cast<size_t>(std::bit_width(n) - 1);
        for (uint64_t i = 0; i < n; i++) {
            InclusionProof proof = inclusion_proof(tree, i);
            CHECK(proof.commitment_count() == 2 * m + 1);
            CHECK(proof.root() == tree.root());
            CHECK(verify_inclusion(proof));
        }
    }

    // non-power-of-two sizes stay at or below the bound
    for (size_t n : {3u, 7u, 13u}) {
        auto leaves = random_leaves(com, n, rng);
        CommitTree tree = build_tree(leaves);
        size_t bound = 2 * static_cast<size_t>(std::bit_width(n - 1)) + 1;
        for (uint64_t i = 0; i < n; i++) {
            InclusionProof proof = inclusion_proof(tree, i);
            CHECK(proof.commitment_count() <= bound);
            CHECK(verify_inclusion(proof));
        }
    }

    // single-user tree: proof is just the root
    auto leaf = random_leaves(com, 1, rng);
    CommitTree tiny = build_tree(leaf);
    InclusionProof proof = inclusion_proof(tiny, 0);
    CHECK(proof.commitment_count() == 1);
    CHECK(verify_inclusion(proof));

    CHECK_THROWS_AS(inclusion_proof(tiny, 1), Error);
}

TEST_CASE("inclusion verification rejects structural damage") {
    ComParams com = com_setup(128);
    Rng rng = Rng::deterministic(54);
    auto leaves = random_leaves(com, 8, rng);
    CommitTree tree = build_tree(leaves);
    InclusionProof good = inclusion_proof(tree, 3);
    REQUIRE(verify_inclusion(good));

    InclusionProof bad_sibling = good;
    bad_sibling.siblings[1] = leaves[0];
    CHECK(!verify_inclusion(bad_sibling));

    InclusionProof truncated = good;
    truncated.path.pop_back();
    truncated.siblings.pop_back();
    CHECK(!verify_inclusion(truncated));

    InclusionProof dropped = good;
    dropped.siblings[0] = std::nullopt;
    CHECK(!verify_inclusion(dropped));

    InclusionProof serial = good;
    auto bytes = serial.to_bytes();
    auto back = InclusionProof::from_bytes(bytes);
    REQUIRE(back.has_value());
    CHECK(*back == good);
}

TEST_CASE("honest merkle run: users and auditors agree") {
    MerkleSession s(4, 30, 10, {1, 2, 3, 4});
    CHECK(s.evidence.root == commit_u64(s.sys.params.com, 10, [&] {
              Scalar sum;
              for (auto& r : s.secrets) sum = sum.add(r);
              return sum;
          }()));
    s.run_auditors();
    FakeClock clock;
    for (uint64_t i = 0; i < 4; i++) CHECK(s.user_accepts(i, clock));

    // auditor reports landed on the board as OK
    auto reports = s.board.read_kind(0, 0, EntryKind::Report);
    CHECK(reports.size() == 2);
}

TEST_CASE("single user tree end to end") {
    MerkleSession s(1, 9, 10, {7});
    s.run_auditors();
    FakeClock clock;
    CHECK(s.user_accepts(0, clock));
}

TEST_CASE("sum at the threshold still proves; above it flags peak") {
    MerkleSession exact(3, 12, 10, {4, 4, 4});
    CHECK(!exact.evidence.users[0].peak);
    REQUIRE(exact.evidence.users[0].pi_star.has_value());
    exact.run_auditors();
    FakeClock clock;
    CHECK(exact.user_accepts(1, clock));

    MerkleSession over(3, 11, 10, {4, 4, 4});
    CHECK(over.evidence.users[0].peak);
    CHECK(!over.evidence.users[0].pi_star.has_value());
    over.run_auditors();
    CHECK(over.user_accepts(1, clock));
}

TEST_CASE("forged board root fails consistency for every user") {
    MerkleSession s(4, 30, 10, {1, 2, 3, 4});
    // overwrite: a fresh board with a different root entry
    MemoryBoard forged;
    Commitment wrong = commit_u64(s.sys.params.com, 99, Scalar::from_u64(5));
    forged.append(EntryKind::Root, 0, 0, Bytes(wrong.bytes().begin(), wrong.bytes().end()));
    FakeClock clock;
    for (uint64_t i = 0; i < 4; i++) {
        CHECK(!evidence_vrf_merkle_user(s.sys.params, s.secrets[i], s.x[i], s.evidence.users[i],
                                        0, forged, 0, clock));
    }
}

TEST_CASE("audit detects an out-of-range leaf and users reject via the report") {
    MerkleSession s(4, 39, 10, {1, 2, 3, 4});

    // retailer swaps in an over-cap leaf with a proof for the wrong statement
    uint64_t bad_value = 15;
    Scalar r2 = s.secrets[2];
    Commitment bad_leaf = commit_u64(s.sys.params.com, bad_value, r2);
    Rng rng = Rng::deterministic(55);
    RangeProof bad_proof = zk_prove(s.sys.params.zk,
                                    commit_u64(s.sys.params.com, 10, r2), 10, 10, r2, rng);

    std::vector<Commitment> leaves;
    for (auto& [c, _] : s.evidence.auditor.leaves) leaves.push_back(c);
    leaves[2] = bad_leaf;
    CommitTree tampered_tree = build_tree(leaves);

    MerkleAuditorView tampered = s.evidence.auditor;
    tampered.leaves[2] = {bad_leaf, bad_proof};
    tampered.upper_levels.clear();
    for (size_t l = 1; l < tampered_tree.levels.size(); l++) {
        tampered.upper_levels.push_back(tampered_tree.levels[l]);
    }

    MemoryBoard board;
    auto root_bytes = tampered_tree.root().bytes();
    board.append(EntryKind::Root, 0, 0, Bytes(root_bytes.begin(), root_bytes.end()));

    AuditorReport report = audit_tree(s.sys.params, tampered, tampered_tree.root(), 0,
                                      s.auditors[0].vk);
    CHECK(report.verdict == AuditorReport::Verdict::Fraud);
    REQUIRE(report.fraud.has_value());
    CHECK(report.fraud->kind == FraudProof::Kind::LeafRange);
    CHECK(verify_fraud_proof(s.sys.params, tampered_tree.root(), 10, *report.fraud));

    publish_report(board, report, s.auditors[0].sk);
    FakeClock clock;
    QuorumResult q = await_quorum(s.sys.params, board, 0, 0, 1, 1000, clock);
    CHECK(q.kind == QuorumResult::Kind::FraudDetected);
}

TEST_CASE("audit detects a corrupted inner node") {
    MerkleSession s(8, 70, 10, {1, 2, 3, 4, 5, 6, 7, 8});
    MerkleAuditorView tampered = s.evidence.auditor;
    tampered.upper_levels[0][1] =
        com_add(tampered.upper_levels[0][1], commit_u64(s.sys.params.com, 1, Scalar::zero()));
    // keep levels above consistent with the corrupted node so it is the
    // highest inconsistency
    tampered.upper_levels[1][0] =
        com_add(tampered.upper_levels[0][0], tampered.upper_levels[0][1]);
    tampered.upper_levels[2][0] =
        com_add(tampered.upper_levels[1][0], tampered.upper_levels[1][1]);

    AuditorReport report = audit_tree(s.sys.params, tampered, tampered.root(), 0,
                                      s.auditors[0].vk);
    CHECK(report.verdict == AuditorReport::Verdict::Fraud);
    REQUIRE(report.fraud.has_value());
    CHECK(report.fraud->kind == FraudProof::Kind::NodeSum);
    CHECK(verify_fraud_proof(s.sys.params, tampered.root(), 10, *report.fraud));
}

TEST_CASE("malformed auditor views produce an empty verdict") {
    MerkleSession s(4, 30, 10, {1, 2, 3, 4});
    MerkleAuditorView chopped = s.evidence.auditor;
    chopped.upper_levels.pop_back();
    AuditorReport report =
        audit_tree(s.sys.params, chopped, s.evidence.root, 0, s.auditors[0].vk);
    CHECK(report.verdict == AuditorReport::Verdict::Empty);

    // root that disagrees with the board
    AuditorReport mismatch = audit_tree(
        s.sys.params, s.evidence.auditor,
        commit_u64(s.sys.params.com, 1, Scalar::from_u64(1)), 0, s.auditors[0].vk);
    CHECK(mismatch.verdict == AuditorReport::Verdict::Empty);
}

TEST_CASE("every single corrupted node is detected by someone") {
    MerkleSession s(8, 70, 10, {1, 2, 3, 4, 5, 6, 7, 8});
    Commitment poison = commit_u64(s.sys.params.com, 1, Scalar::from_u64(99));

    CommitTree honest;
    honest.levels.emplace_back();
    for (auto& [c, _] : s.evidence.auditor.leaves) honest.levels[0].push_back(c);
    for (auto& level : s.evidence.auditor.upper_levels) honest.levels.push_back(level);

    for (size_t level = 0; level < honest.levels.size(); level++) {
        for (size_t idx = 0; idx < honest.levels[level].size(); idx++) {
            CommitTree corrupt = honest;
            corrupt.levels[level][idx] = com_add(corrupt.levels[level][idx], poison);

            MerkleAuditorView view = s.evidence.auditor;
            view.upper_levels.clear();
            for (size_t l = 1; l < corrupt.levels.size(); l++) {
                view.upper_levels.push_back(corrupt.levels[l]);
            }
            if (level == 0) view.leaves[idx].first = corrupt.levels[0][idx];

            AuditorReport report =
                audit_tree(s.sys.params, view, corrupt.levels.back()[0], 0, s.auditors[0].vk);
            bool auditor_caught = report.verdict != AuditorReport::Verdict::Ok;

            // users on the corrupted path check against the corrupted root
            bool some_user_caught = false;
            for (uint64_t u = 0; u < 8; u++) {
                MerkleUserView uv = s.evidence.users[u];
                uv.proof = node_inclusion_proof(corrupt, 0, u);
                MemoryBoard board;
                auto rb = corrupt.levels.back()[0].bytes();
                board.append(EntryKind::Root, 0, 0, Bytes(rb.begin(), rb.end()));
                for (const auto& kp : s.auditors) {
                    AuditorReport r = audit_tree(s.sys.params, view, corrupt.levels.back()[0],
                                                 0, kp.vk);
                    publish_report(board, r, kp.sk);
                }
                FakeClock clock;
                if (!evidence_vrf_merkle_user(s.sys.params, s.secrets[u], s.x[u], uv, 0, board,
                                              0, clock)) {
                    some_user_caught = true;
                }
            }
            CHECK((auditor_caught || some_user_caught));
        }
    }
}

TEST_CASE("quorum semantics") {
    MerkleSession s(3, 20, 10, {1, 2, 3}, 1);
    FakeClock clock;

    SUBCASE("not enough approvals times out") {
        AuditorReport r = audit_tree(s.sys.params, s.evidence.auditor, s.evidence.root, 0,
                                     s.auditors[0].vk);
        publish_report(s.board, r, s.auditors[0].sk);
        QuorumResult q = await_quorum(s.sys.params, s.board, 0, 0, 1, 500, clock);
        CHECK(q.kind == QuorumResult::Kind::Timeout);
    }
    SUBCASE("two distinct registered approvals accept") {
        s.run_auditors();
        QuorumResult q = await_quorum(s.sys.params, s.board, 0, 0, 1, 500, clock);
        CHECK(q.kind == QuorumResult::Kind::Accept);
    }
    SUBCASE("unregistered approvals never count") {
        Rng rng = Rng::deterministic(56);
        for (int i = 0; i < 3; i++) {
            SigKeyPair stranger = sig_keygen(rng);
            AuditorReport r = audit_tree(s.sys.params, s.evidence.auditor, s.evidence.root, 0,
                                         stranger.vk);
            publish_report(s.board, r, stranger.sk);
        }
        QuorumResult q = await_quorum(s.sys.params, s.board, 0, 0, 1, 500, clock);
        CHECK(q.kind == QuorumResult::Kind::Timeout);
    }
    SUBCASE("a valid fraud report wins over any number of approvals") {
        s.run_auditors();
        // craft real fraud material against a tampered root
        MerkleSession t(3, 20, 10, {1, 2, 3});
        std::vector<Commitment> leaves;
        for (auto& [c, _] : t.evidence.auditor.leaves) leaves.push_back(c);
        Scalar r1 = t.secrets[1];
        leaves[1] = commit_u64(t.sys.params.com, 15, r1);
        CommitTree bad_tree = build_tree(leaves);
        Rng rng = Rng::deterministic(57);
        RangeProof wrong = zk_prove(t.sys.params.zk, commit_u64(t.sys.params.com, 9, r1), 10, 9,
                                    r1, rng);

        // the fraud must re-check against the root this board carries
        MemoryBoard board;
        auto rb = bad_tree.root().bytes();
        board.append(EntryKind::Root, 0, 0, Bytes(rb.begin(), rb.end()));
        for (const auto& kp : s.auditors) {
            AuditorReport ok;
            ok.cycle = 0;
            ok.period = 0;
            ok.verdict = AuditorReport::Verdict::Ok;
            ok.vk = kp.vk;
            publish_report(board, ok, kp.sk);
        }
        SigKeyPair whistleblower = sig_keygen(rng);
        AuditorReport fraud_report;
        fraud_report.cycle = 0;
        fraud_report.period = 0;
        fraud_report.vk = whistleblower.vk;
        fraud_report.verdict = AuditorReport::Verdict::Fraud;
        FraudProof fp;
        fp.kind = FraudProof::Kind::LeafRange;
        fp.binding = inclusion_proof(bad_tree, 1);
        fp.range_proof = wrong;
        fraud_report.fraud = fp;
        publish_report(board, fraud_report, whistleblower.sk);

        QuorumResult q = await_quorum(s.sys.params, board, 0, 0, 1, 500, clock);
        CHECK(q.kind == QuorumResult::Kind::FraudDetected);
    }
    SUBCASE("an invalid fraud report is ignored") {
        s.run_auditors();
        // fraud material whose range proof actually verifies: not fraud
        AuditorReport bogus;
        bogus.cycle = 0;
        bogus.period = 0;
        bogus.vk = s.auditors[0].vk;
        bogus.verdict = AuditorReport::Verdict::Fraud;
        FraudProof fp;
        fp.kind = FraudProof::Kind::LeafRange;
        CommitTree tree;
        tree.levels.emplace_back();
        for (auto& [c, _] : s.evidence.auditor.leaves) tree.levels[0].push_back(c);
        for (auto& level : s.evidence.auditor.upper_levels) tree.levels.push_back(level);
        fp.binding = inclusion_proof(tree, 1);
        fp.range_proof = s.evidence.auditor.leaves[1].second;  // valid proof
        bogus.fraud = fp;
        // separate key so the OK report from auditor 0 is not displaced
        Rng rng = Rng::deterministic(58);
        SigKeyPair troll = sig_keygen(rng);
        bogus.vk = troll.vk;
        publish_report(s.board, bogus, troll.sk);

        QuorumResult q = await_quorum(s.sys.params, s.board, 0, 0, 1, 500, clock);
        CHECK(q.kind == QuorumResult::Kind::Accept);
    }
}

TEST_CASE("view serialization round trips") {
    MerkleSession s(5, 40, 10, {1, 2, 3, 4, 5});
    auto user_bytes = s.evidence.users[2].to_bytes();
    auto user_back = MerkleUserView::from_bytes(user_bytes);
    REQUIRE(user_back.has_value());
    CHECK(user_back->proof == s.evidence.users[2].proof);

    auto auditor_bytes = s.evidence.auditor.to_bytes();
    auto auditor_back = MerkleAuditorView::from_bytes(auditor_bytes);
    REQUIRE(auditor_back.has_value());
    CHECK(auditor_back->root() == s.evidence.root);
    CHECK(!MerkleAuditorView::from_bytes(std::span(auditor_bytes).first(10)).has_value());
}

TEST_CASE("merkle operation tallies match the cost table") {
    const uint64_t n = 8;
    auto before = ops::snapshot();
    MerkleSession s(n, 70, 10, {1, 2, 3, 4, 5, 6, 7, 8});
    auto server = ops::snapshot() - before;
    CHECK(server.commits == 2 * n - 1);
    CHECK(server.proves == n + 1);
    CHECK(server.verifies == 0);

    s.run_auditors();
    // the two auditors each checked n leaf proofs
    // (tallied inside run_auditors)
    before = ops::snapshot();
    AuditorReport r = audit_tree(s.sys.params, s.evidence.auditor, s.evidence.root, 0,
                                 s.auditors[0].vk);
    CHECK(r.verdict == AuditorReport::Verdict::Ok);
    auto auditor = ops::snapshot() - before;
    CHECK(auditor.commits == 0);
    CHECK(auditor.verifies == n);

    before = ops::snapshot();
    FakeClock clock;
    CHECK(s.user_accepts(3, clock));
    auto client = ops::snapshot() - before;
    CHECK(client.commits == 1);
    CHECK(client.verifies == 1);
    CHECK(client.proves == 0);
}
