#pragma once

#include <functional>
#include <optional>
#include <utility>

#include "pptp/bulletin.hpp"
#include "pptp/clock.hpp"
#include "pptp/params.hpp"

namespace pptp {

/*
 * Tree-evidence protocol. Leaves commit to the users' truncated readings;
 * every inner node is the group sum of its children, so the root commits to
 * the network sum and one range proof over the root replaces the n proofs a
 * client would otherwise check. Clients verify only their own leaf's path;
 * auditors check every leaf proof and the tree structure, then publish
 * signed verdicts that clients wait for.
 */

// Left-aligned binary tree; level 0 holds the leaves in user order, missing
// right children contribute the identity (commit of zero under zero
// randomness).
struct CommitTree {
    std::vector<std::vector<Commitment>> levels;

    uint64_t leaf_count() const { return levels.empty() ? 0 : levels.front().size(); }
    uint64_t node_count() const;
    const Commitment& root() const { return levels.back().front(); }
};

// Derived-node computations are tallied as commitment operations.
CommitTree build_tree(std::span<const Commitment> leaves);

// Path from one node up to the root plus the sibling of every path node.
// level 0 speaks about a leaf; fraud proofs reuse higher levels.
struct InclusionProof {
    uint64_t n_leaves = 0;
    uint32_t level = 0;
    uint64_t index = 0;
    std::vector<Commitment> path;                    // node, parent, ..., root
    std::vector<std::optional<Commitment>> siblings; // one per non-root path node

    const Commitment& leaf() const { return path.front(); }
    const Commitment& root() const { return path.back(); }
    size_t commitment_count() const;

    Bytes to_bytes() const;
    static std::optional<InclusionProof> from_bytes(std::span<const uint8_t> data);
    bool operator==(const InclusionProof&) const = default;
};

InclusionProof inclusion_proof(const CommitTree& tree, uint64_t leaf_index);
InclusionProof node_inclusion_proof(const CommitTree& tree, uint32_t level, uint64_t index);

// Structural validity: sibling pattern matches (n, level, index) and every
// parent is the sum of the children presented.
bool verify_inclusion(const InclusionProof& proof);

// Self-contained, re-checkable material justifying a rejection.
struct FraudProof {
    enum class Kind : uint8_t {
        LeafRange = 1,  // leaf bound to the root, served range proof fails
        NodeSum = 2,    // inner node bound to the root differs from its children's sum
        Inclusion = 3,  // served inclusion proof is broken or detached from the root
    };
    Kind kind = Kind::LeafRange;
    InclusionProof binding;
    std::optional<RangeProof> range_proof;   // LeafRange
    std::optional<Commitment> child_left;    // NodeSum
    std::optional<Commitment> child_right;   // NodeSum; absent for lone children

    Bytes to_bytes() const;
    static std::optional<FraudProof> from_bytes(std::span<const uint8_t> data);
};

// Re-checks fraud material against the posted root and the period's
// per-user cap. Invalid material must be ignored by verifiers.
bool verify_fraud_proof(const SystemParams& params, const Commitment& board_root, uint64_t delta,
                        const FraudProof& fraud);

struct MerkleUserView {
    uint32_t period = 0;
    bool peak = false;
    InclusionProof proof;
    std::optional<RangeProof> pi_star;  // over the root, absent iff peak

    Bytes to_bytes() const;
    static std::optional<MerkleUserView> from_bytes(std::span<const uint8_t> data);
};

struct MerkleAuditorView {
    uint32_t period = 0;
    bool peak = false;
    std::vector<std::pair<Commitment, RangeProof>> leaves;
    std::vector<std::vector<Commitment>> upper_levels;  // levels above the leaves
    std::optional<RangeProof> pi_star;

    const Commitment& root() const {
        return upper_levels.empty() ? leaves.front().first : upper_levels.back().front();
    }
    CommitTree to_tree() const;

    Bytes to_bytes() const;
    static std::optional<MerkleAuditorView> from_bytes(std::span<const uint8_t> data);
};

struct MerkleEvidence {
    Commitment root;
    std::vector<MerkleUserView> users;
    MerkleAuditorView auditor;
};

MerkleEvidence build_merkle_evidence(const SystemParams& params, const RetailerKey& key,
                                     std::span<const uint64_t> x, uint32_t period, Rng& rng,
                                     unsigned threads = 0);

// Builds the evidence and posts the root commitment for (cycle, period).
MerkleEvidence evidence_gen_merkle(const SystemParams& params, const RetailerKey& key,
                                   std::span<const uint64_t> x, uint64_t cycle, uint32_t period,
                                   Board& board, Rng& rng, unsigned threads = 0);

// Root commitment posted for (cycle, period), if any.
std::optional<Commitment> board_root(const Board& board, uint64_t cycle, uint64_t period);

struct AuditorReport {
    uint64_t cycle = 0;
    uint32_t period = 0;
    enum class Verdict : uint8_t { Ok = 1, Fraud = 2, Empty = 3 } verdict = Verdict::Empty;
    std::optional<FraudProof> fraud;
    VerifyKey vk;

    // Canonical payload (verify key first) and its signature.
    Bytes payload() const;
    static std::optional<AuditorReport> from_payload(std::span<const uint8_t> data);
};

// Full-tree audit: root against the board, every inner node against its
// children, every leaf proof against the cap. Malformed views yield Empty.
AuditorReport audit_tree(const SystemParams& params, const MerkleAuditorView& view,
                         const Commitment& posted_root, uint64_t cycle, const VerifyKey& vk);

uint64_t publish_report(Board& board, const AuditorReport& report, const SigningKey& sk);

struct QuorumResult {
    enum class Kind { Accept, FraudDetected, Timeout } kind = Kind::Timeout;
    std::optional<FraudProof> fraud;
};

// Polls the board until a re-checkable fraud proof appears (wins over any
// number of approvals), f+1 distinct registered auditors have approved, or
// the deadline passes.
QuorumResult await_quorum(const SystemParams& params, const Board& board, uint64_t cycle,
                          uint64_t period, uint32_t f, uint64_t timeout_ms, Clock& clock,
                          uint64_t poll_ms = 20);

bool evidence_vrf_merkle_user(const SystemParams& params, const Scalar& r_i, uint64_t x_i,
                              const MerkleUserView& view, uint32_t period, const Board& board,
                              uint64_t cycle, Clock& clock);

bool evidence_vrf_merkle_auditor(const SystemParams& params, const MerkleAuditorView& view,
                                 uint32_t period, Board& board, uint64_t cycle,
                                 const SigKeyPair& keys);

}  // namespace pptp
