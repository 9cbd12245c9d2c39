#include "pptp/merkle.hpp"

#include <set>

#include "pptp/audit_random.hpp"
#include "pptp/counters.hpp"
#include "pptp/errors.hpp"
#include "pptp/parallel.hpp"

namespace pptp {

namespace {

uint64_t level_width(uint64_t n_leaves, uint32_t level) {
    uint64_t w = n_leaves;
    for (uint32_t l = 0; l < level && w > 1; l++) w = (w + 1) / 2;
    return w;
}

uint32_t level_count(uint64_t n_leaves) {
    uint32_t levels = 1;
    uint64_t w = n_leaves;
    while (w > 1) {
        w = (w + 1) / 2;
        levels++;
    }
    return levels;
}

}  // namespace

uint64_t CommitTree::node_count() const {
    uint64_t total = 0;
    for (const auto& level : levels) total += level.size();
    return total;
}

CommitTree build_tree(std::span<const Commitment> leaves) {
    if (leaves.empty()) throw Error("tree needs at least one leaf");
    CommitTree tree;
    tree.levels.emplace_back(leaves.begin(), leaves.end());
    while (tree.levels.back().size() > 1) {
        const auto& below = tree.levels.back();
        std::vector<Commitment> level((below.size() + 1) / 2);
        for (size_t j = 0; j < level.size(); j++) {
            Commitment node = below[2 * j];
            if (2 * j + 1 < below.size()) node = com_add(node, below[2 * j + 1]);
            level[j] = node;
        }
        ops::add_commits(level.size());  // node derivations are commitment computations
        tree.levels.push_back(std::move(level));
    }
    return tree;
}

size_t InclusionProof::commitment_count() const {
    size_t count = path.size();
    for (const auto& s : siblings) {
        if (s) count++;
    }
    return count;
}

Bytes InclusionProof::to_bytes() const {
    Bytes b;
    put_u8(b, 1);
    put_u64(b, n_leaves);
    put_u32(b, level);
    put_u64(b, index);
    put_u32(b, static_cast<uint32_t>(path.size()));
    for (const auto& c : path) put_raw(b, c.bytes());
    for (const auto& s : siblings) {
        put_u8(b, s ? 1 : 0);
        if (s) put_raw(b, s->bytes());
    }
    return b;
}

std::optional<InclusionProof> InclusionProof::from_bytes(std::span<const uint8_t> data) {
    try {
        ByteReader r(data);
        if (r.u8() != 1) return std::nullopt;
        InclusionProof p;
        p.n_leaves = r.u64();
        p.level = r.u32();
        p.index = r.u64();
        uint32_t path_len = r.u32();
        if (path_len == 0 || path_len > 80) return std::nullopt;
        for (uint32_t i = 0; i < path_len; i++) {
            auto c = Commitment::from_bytes(r.take(32));
            if (!c) return std::nullopt;
            p.path.push_back(*c);
        }
        for (uint32_t i = 0; i + 1 < path_len; i++) {
            if (r.u8() != 0) {
                auto c = Commitment::from_bytes(r.take(32));
                if (!c) return std::nullopt;
                p.siblings.emplace_back(*c);
            } else {
                p.siblings.emplace_back(std::nullopt);
            }
        }
        r.expect_end();
        return p;
    } catch (const ParseError&) {
        return std::nullopt;
    }
}

InclusionProof node_inclusion_proof(const CommitTree& tree, uint32_t level, uint64_t index) {
    if (level >= tree.levels.size() || index >= tree.levels[level].size()) {
        throw Error("node position out of range");
    }
    InclusionProof proof;
    proof.n_leaves = tree.leaf_count();
    proof.level = level;
    proof.index = index;
    uint64_t idx = index;
    for (uint32_t l = level; l < tree.levels.size(); l++) {
        proof.path.push_back(tree.levels[l][idx]);
        if (l + 1 < tree.levels.size()) {
            uint64_t sib = idx ^ 1;
            if (sib < tree.levels[l].size()) {
                proof.siblings.emplace_back(tree.levels[l][sib]);
            } else {
                proof.siblings.emplace_back(std::nullopt);
            }
        }
        idx >>= 1;
    }
    return proof;
}

InclusionProof inclusion_proof(const CommitTree& tree, uint64_t leaf_index) {
    return node_inclusion_proof(tree, 0, leaf_index);
}

bool verify_inclusion(const InclusionProof& proof) {
    if (proof.n_leaves == 0 || proof.path.empty()) return false;
    uint32_t total_levels = level_count(proof.n_leaves);
    if (proof.level >= total_levels) return false;
    if (proof.path.size() != total_levels - proof.level) return false;
    if (proof.siblings.size() + 1 != proof.path.size()) return false;
    if (proof.index >= level_width(proof.n_leaves, proof.level)) return false;

    uint64_t idx = proof.index;
    for (size_t step = 0; step + 1 < proof.path.size(); step++) {
        uint32_t l = proof.level + static_cast<uint32_t>(step);
        uint64_t sib = idx ^ 1;
        bool expect_sibling = sib < level_width(proof.n_leaves, l);
        if (expect_sibling != proof.siblings[step].has_value()) return false;
        Commitment parent = proof.path[step];
        if (proof.siblings[step]) parent = com_add(parent, *proof.siblings[step]);
        if (!(parent == proof.path[step + 1])) return false;
        idx >>= 1;
    }
    return true;
}

Bytes FraudProof::to_bytes() const {
    Bytes b;
    put_u8(b, 1);
    put_u8(b, static_cast<uint8_t>(kind));
    put_var(b, binding.to_bytes());
    put_u8(b, range_proof ? 1 : 0);
    if (range_proof) put_var(b, range_proof->to_bytes());
    put_u8(b, child_left ? 1 : 0);
    if (child_left) put_raw(b, child_left->bytes());
    put_u8(b, child_right ? 1 : 0);
    if (child_right) put_raw(b, child_right->bytes());
    return b;
}

std::optional<FraudProof> FraudProof::from_bytes(std::span<const uint8_t> data) {
    try {
        ByteReader r(data);
        if (r.u8() != 1) return std::nullopt;
        FraudProof f;
        uint8_t kind = r.u8();
        if (kind < 1 || kind > 3) return std::nullopt;
        f.kind = static_cast<Kind>(kind);
        auto binding = InclusionProof::from_bytes(r.var());
        if (!binding) return std::nullopt;
        f.binding = std::move(*binding);
        if (r.u8() != 0) {
            auto rp = RangeProof::from_bytes(r.var());
            if (!rp) return std::nullopt;
            f.range_proof = std::move(*rp);
        }
        if (r.u8() != 0) {
            auto c = Commitment::from_bytes(r.take(32));
            if (!c) return std::nullopt;
            f.child_left = *c;
        }
        if (r.u8() != 0) {
            auto c = Commitment::from_bytes(r.take(32));
            if (!c) return std::nullopt;
            f.child_right = *c;
        }
        r.expect_end();
        return f;
    } catch (const ParseError&) {
        return std::nullopt;
    }
}

bool verify_fraud_proof(const SystemParams& params, const Commitment& board_root, uint64_t delta,
                        const FraudProof& fraud) {
    switch (fraud.kind) {
        case FraudProof::Kind::LeafRange: {
            if (fraud.binding.level != 0 || !fraud.range_proof) return false;
            if (!verify_inclusion(fraud.binding)) return false;
            if (!(fraud.binding.root() == board_root)) return false;
            // the material is valid exactly when the served proof fails
            return !zk_verify(params.zk, fraud.binding.leaf(), delta, *fraud.range_proof);
        }
        case FraudProof::Kind::NodeSum: {
            if (fraud.binding.level == 0 || !fraud.child_left) return false;
            if (!verify_inclusion(fraud.binding)) return false;
            if (!(fraud.binding.root() == board_root)) return false;
            Commitment expect = *fraud.child_left;
            if (fraud.child_right) expect = com_add(expect, *fraud.child_right);
            return !(expect == fraud.binding.leaf());
        }
        case FraudProof::Kind::Inclusion: {
            // served proof that fails structurally or hangs off a foreign root
            return !verify_inclusion(fraud.binding) || !(fraud.binding.root() == board_root);
        }
    }
    return false;
}

Bytes MerkleUserView::to_bytes() const {
    Bytes b;
    put_u8(b, 1);
    put_u32(b, period);
    put_u8(b, peak ? 1 : 0);
    put_var(b, proof.to_bytes());
    if (!peak) put_var(b, pi_star ? pi_star->to_bytes() : Bytes{});
    return b;
}

std::optional<MerkleUserView> MerkleUserView::from_bytes(std::span<const uint8_t> data) {
    try {
        ByteReader r(data);
        if (r.u8() != 1) return std::nullopt;
        MerkleUserView v;
        v.period = r.u32();
        v.peak = r.u8() != 0;
        auto proof = InclusionProof::from_bytes(r.var());
        if (!proof) return std::nullopt;
        v.proof = std::move(*proof);
        if (!v.peak) {
            auto pi = RangeProof::from_bytes(r.var());
            if (!pi) return std::nullopt;
            v.pi_star = std::move(*pi);
        }
        r.expect_end();
        return v;
    } catch (const ParseError&) {
        return std::nullopt;
    }
}

CommitTree MerkleAuditorView::to_tree() const {
    CommitTree tree;
    std::vector<Commitment> leaf_row;
    leaf_row.reserve(leaves.size());
    for (const auto& [c, _] : leaves) leaf_row.push_back(c);
    tree.levels.push_back(std::move(leaf_row));
    for (const auto& level : upper_levels) tree.levels.push_back(level);
    return tree;
}

Bytes MerkleAuditorView::to_bytes() const {
    Bytes b;
    put_u8(b, 1);
    put_u32(b, period);
    put_u8(b, peak ? 1 : 0);
    put_u32(b, static_cast<uint32_t>(leaves.size()));
    for (const auto& [c, pi] : leaves) {
        put_raw(b, c.bytes());
        put_var(b, pi.to_bytes());
    }
    put_u32(b, static_cast<uint32_t>(upper_levels.size()));
    for (const auto& level : upper_levels) {
        put_u32(b, static_cast<uint32_t>(level.size()));
        for (const auto& c : level) put_raw(b, c.bytes());
    }
    if (!peak) put_var(b, pi_star ? pi_star->to_bytes() : Bytes{});
    return b;
}

std::optional<MerkleAuditorView> MerkleAuditorView::from_bytes(std::span<const uint8_t> data) {
    try {
        ByteReader r(data);
        if (r.u8() != 1) return std::nullopt;
        MerkleAuditorView v;
        v.period = r.u32();
        v.peak = r.u8() != 0;
        uint32_t n = r.u32();
        if (n == 0 || n > 10'000'000) return std::nullopt;
        for (uint32_t i = 0; i < n; i++) {
            auto c = Commitment::from_bytes(r.take(32));
            auto pi = RangeProof::from_bytes(r.var());
            if (!c || !pi) return std::nullopt;
            v.leaves.emplace_back(*c, std::move(*pi));
        }
        uint32_t levels = r.u32();
        if (levels > 80) return std::nullopt;
        for (uint32_t l = 0; l < levels; l++) {
            uint32_t len = r.u32();
            if (len > n) return std::nullopt;
            std::vector<Commitment> row;
            row.reserve(len);
            for (uint32_t j = 0; j < len; j++) {
                auto c = Commitment::from_bytes(r.take(32));
                if (!c) return std::nullopt;
                row.push_back(*c);
            }
            v.upper_levels.push_back(std::move(row));
        }
        if (v.upper_levels.empty() && n > 1) return std::nullopt;
        if (!v.peak) {
            auto pi = RangeProof::from_bytes(r.var());
            if (!pi) return std::nullopt;
            v.pi_star = std::move(*pi);
        }
        r.expect_end();
        return v;
    } catch (const ParseError&) {
        return std::nullopt;
    }
}

MerkleEvidence build_merkle_evidence(const SystemParams& params, const RetailerKey& key,
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
    std::vector<Commitment> leaves(n);
    for (uint64_t i = 0; i < n; i++) leaves[i] = commit_u64(params.com, x[i], secrets[i]);

    std::vector<RangeProof> leaf_proofs(n);
    std::vector<Rng> rngs;
    rngs.reserve(n);
    for (uint64_t i = 0; i < n; i++) rngs.push_back(rng.fork("leaf-proof", i));
    parallel_for(n, threads, [&](size_t i) {
        leaf_proofs[i] = zk_prove(params.zk, leaves[i], delta, x[i], secrets[i], rngs[i]);
    });

    CommitTree tree = build_tree(leaves);

    uint64_t x_star = 0;
    Scalar r_star;
    for (uint64_t i = 0; i < n; i++) {
        x_star += x[i];
        r_star = r_star.add(secrets[i]);
    }

    MerkleEvidence evidence;
    evidence.root = tree.root();
    bool peak = x_star > gamma;
    std::optional<RangeProof> pi_star;
    if (!peak) {
        Rng sum_rng = rng.fork("sum-proof");
        pi_star = zk_prove(params.zk, tree.root(), gamma, x_star, r_star, sum_rng);
    }

    evidence.users.reserve(n);
    for (uint64_t i = 0; i < n; i++) {
        MerkleUserView view;
        view.period = period;
        view.peak = peak;
        view.proof = inclusion_proof(tree, i);
        view.pi_star = pi_star;
        evidence.users.push_back(std::move(view));
    }

    evidence.auditor.period = period;
    evidence.auditor.peak = peak;
    for (uint64_t i = 0; i < n; i++) {
        evidence.auditor.leaves.emplace_back(leaves[i], leaf_proofs[i]);
    }
    for (size_t l = 1; l < tree.levels.size(); l++) {
        evidence.auditor.upper_levels.push_back(tree.levels[l]);
    }
    evidence.auditor.pi_star = pi_star;
    return evidence;
}

MerkleEvidence evidence_gen_merkle(const SystemParams& params, const RetailerKey& key,
                                   std::span<const uint64_t> x, uint64_t cycle, uint32_t period,
                                   Board& board, Rng& rng, unsigned threads) {
    MerkleEvidence evidence = build_merkle_evidence(params, key, x, period, rng, threads);
    const auto& root = evidence.root.bytes();
    board.append(EntryKind::Root, cycle, period, Bytes(root.begin(), root.end()));
    return evidence;
}

std::optional<Commitment> board_root(const Board& board, uint64_t cycle, uint64_t period) {
    auto entries = board.read_kind(cycle, period, EntryKind::Root);
    if (entries.empty()) return std::nullopt;
    return Commitment::from_bytes(entries.front().payload);
}

Bytes AuditorReport::payload() const {
    Bytes b;
    put_raw(b, vk.bytes);
    put_u64(b, cycle);
    put_u32(b, period);
    put_u8(b, static_cast<uint8_t>(verdict));
    put_var(b, fraud ? fraud->to_bytes() : Bytes{});
    return b;
}

std::optional<AuditorReport> AuditorReport::from_payload(std::span<const uint8_t> data) {
    try {
        ByteReader r(data);
        AuditorReport rep;
        rep.vk.bytes = r.arr<32>();
        rep.cycle = r.u64();
        rep.period = r.u32();
        uint8_t verdict = r.u8();
        if (verdict < 1 || verdict > 3) return std::nullopt;
        rep.verdict = static_cast<Verdict>(verdict);
        Bytes fraud = r.var();
        if (!fraud.empty()) {
            auto parsed = FraudProof::from_bytes(fraud);
            if (!parsed) return std::nullopt;
            rep.fraud = std::move(*parsed);
        }
        r.expect_end();
        return rep;
    } catch (const ParseError&) {
        return std::nullopt;
    }
}

AuditorReport audit_tree(const SystemParams& params, const MerkleAuditorView& view,
                         const Commitment& posted_root, uint64_t cycle, const VerifyKey& vk) {
    AuditorReport report;
    report.cycle = cycle;
    report.period = view.period;
    report.vk = vk;
    report.verdict = AuditorReport::Verdict::Empty;

    if (view.period >= params.sched.k || view.leaves.empty()) return report;
    const uint64_t n = view.leaves.size();
    if (view.upper_levels.size() + 1 != level_count(n)) return report;
    for (size_t l = 0; l < view.upper_levels.size(); l++) {
        if (view.upper_levels[l].size() != level_width(n, static_cast<uint32_t>(l + 1))) {
            return report;
        }
    }
    if (!(view.root() == posted_root)) return report;

    CommitTree tree = view.to_tree();

    // Structure first, scanning from the root down so the first mismatch has
    // a link-consistent path above it.
    for (size_t l = tree.levels.size(); l-- > 1;) {
        for (uint64_t j = 0; j < tree.levels[l].size(); j++) {
            Commitment expect = tree.levels[l - 1][2 * j];
            if (2 * j + 1 < tree.levels[l - 1].size()) {
                expect = com_add(expect, tree.levels[l - 1][2 * j + 1]);
            }
            if (expect == tree.levels[l][j]) continue;
            FraudProof fraud;
            fraud.kind = FraudProof::Kind::NodeSum;
            fraud.binding = node_inclusion_proof(tree, static_cast<uint32_t>(l), j);
            fraud.child_left = tree.levels[l - 1][2 * j];
            if (2 * j + 1 < tree.levels[l - 1].size()) {
                fraud.child_right = tree.levels[l - 1][2 * j + 1];
            }
            report.verdict = AuditorReport::Verdict::Fraud;
            report.fraud = std::move(fraud);
            return report;
        }
    }

    const uint64_t delta = params.sched.delta[view.period];
    std::vector<RangeStatement> statements;
    std::vector<RangeProof> proofs;
    statements.reserve(n);
    proofs.reserve(n);
    for (const auto& [c, pi] : view.leaves) {
        statements.push_back({c, delta});
        proofs.push_back(pi);
    }
    if (auto bad = zk_first_invalid(params.zk, statements, proofs)) {
        FraudProof fraud;
        fraud.kind = FraudProof::Kind::LeafRange;
        fraud.binding = inclusion_proof(tree, *bad);
        fraud.range_proof = view.leaves[*bad].second;
        report.verdict = AuditorReport::Verdict::Fraud;
        report.fraud = std::move(fraud);
        return report;
    }

    report.verdict = AuditorReport::Verdict::Ok;
    return report;
}

uint64_t publish_report(Board& board, const AuditorReport& report, const SigningKey& sk) {
    Bytes payload = report.payload();
    Signature sig = sign(sk, payload);
    return board.append(EntryKind::Report, report.cycle, report.period, std::move(payload),
                        Bytes(sig.begin(), sig.end()));
}

QuorumResult await_quorum(const SystemParams& params, const Board& board, uint64_t cycle,
                          uint64_t period, uint32_t f, uint64_t timeout_ms, Clock& clock,
                          uint64_t poll_ms) {
    if (period >= params.sched.k) return {QuorumResult::Kind::Timeout, std::nullopt};
    const uint64_t delta = params.sched.delta[period];
    const uint64_t deadline = clock.now_ms() + timeout_ms;

    for (;;) {
        std::optional<Commitment> root = board_root(board, cycle, period);

        // Fraud wins over any number of approvals, but only after re-checking.
        if (root) {
            for (const auto& entry : board.read_kind(cycle, period, EntryKind::Report)) {
                auto report = AuditorReport::from_payload(entry.payload);
                if (!report || report->verdict != AuditorReport::Verdict::Fraud ||
                    !report->fraud) {
                    continue;
                }
                if (verify_fraud_proof(params, *root, delta, *report->fraud)) {
                    return {QuorumResult::Kind::FraudDetected, report->fraud};
                }
            }
            for (const auto& entry : board.read_kind(cycle, period, EntryKind::Fraud)) {
                auto spot = SpotFraudEntry::from_payload(entry.payload);
                if (!spot) continue;
                if (verify_fraud_proof(params, *root, delta, spot->fraud)) {
                    return {QuorumResult::Kind::FraudDetected, std::move(spot->fraud)};
                }
            }
        }

        std::set<VerifyKey> approvals;
        for (const auto& entry : board.read_kind(cycle, period, EntryKind::Report)) {
            auto report = AuditorReport::from_payload(entry.payload);
            if (!report || report->verdict != AuditorReport::Verdict::Ok) continue;
            bool registered = false;
            for (const auto& vk : params.auditors) {
                if (vk == report->vk) registered = true;
            }
            if (registered) approvals.insert(report->vk);
        }
        if (approvals.size() >= static_cast<size_t>(f) + 1) {
            return {QuorumResult::Kind::Accept, std::nullopt};
        }

        if (clock.now_ms() >= deadline) return {QuorumResult::Kind::Timeout, std::nullopt};
        clock.sleep_ms(poll_ms);
    }
}

bool evidence_vrf_merkle_user(const SystemParams& params, const Scalar& r_i, uint64_t x_i,
                              const MerkleUserView& view, uint32_t period, const Board& board,
                              uint64_t cycle, Clock& clock) {
    if (view.period != period || period >= params.sched.k) return false;

    // VerifyConsistency: the inclusion proof must hang off the posted root.
    std::optional<Commitment> root = board_root(board, cycle, period);
    if (!root || !(view.proof.root() == *root)) return false;

    // VerifyCommitment
    if (view.proof.level != 0) return false;
    Commitment mine = commit_u64(params.com, x_i, r_i);
    if (!(mine == view.proof.leaf())) return false;

    // VerifyInclusionProof
    if (!verify_inclusion(view.proof)) return false;

    // VerifySum over the root
    if (view.peak) {
        if (view.pi_star) return false;
    } else {
        if (!view.pi_star ||
            !zk_verify(params.zk, view.proof.root(), params.sched.gamma[period],
                       *view.pi_star)) {
            return false;
        }
    }

    QuorumResult quorum = await_quorum(params, board, cycle, period, params.f,
                                       params.timeout_ms, clock);
    return quorum.kind == QuorumResult::Kind::Accept;
}

bool evidence_vrf_merkle_auditor(const SystemParams& params, const MerkleAuditorView& view,
                                 uint32_t period, Board& board, uint64_t cycle,
                                 const SigKeyPair& keys) {
    AuditorReport report;
    std::optional<Commitment> root = board_root(board, cycle, period);
    if (!root || view.period != period) {
        report.cycle = cycle;
        report.period = period;
        report.vk = keys.vk;
        report.verdict = AuditorReport::Verdict::Empty;
    } else {
        report = audit_tree(params, view, *root, cycle, keys.vk);
    }
    publish_report(board, report, keys.sk);
    return report.verdict == AuditorReport::Verdict::Ok;
}

}  // namespace pptp
