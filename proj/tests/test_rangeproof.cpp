#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>

#include "pptp/counters.hpp"
#include "pptp/rangeproof.hpp"

using namespace pptp;

namespace {

struct Fixture {
    ComParams com = com_setup(128);
    ZkParams zk = zk_setup(com, 64);
    Rng rng = Rng::deterministic(77);

    std::pair<Commitment, Scalar> make(uint64_t v) {
        Scalar r = Scalar::random(rng);
        return {commit_u64(com, v, r), r};
    }
};

}  // namespace

TEST_CASE("zk_setup determinism and parameter envelope") {
    ComParams com = com_setup(128);
    ZkParams a = zk_setup(com, 64);
    ZkParams b = zk_setup(com, 64);
    CHECK(a == b);
    CHECK(zk_setup(com, 32).max_bits == 32);
    CHECK_THROWS_AS(zk_setup(com, 128), UnsupportedParameter);
    CHECK_THROWS_AS(zk_setup(com, 0), UnsupportedParameter);
}

TEST_CASE("range_bits_for pads to powers of two") {
    CHECK(range_bits_for(0) == 1);
    CHECK(range_bits_for(1) == 1);
    CHECK(range_bits_for(2) == 2);
    CHECK(range_bits_for(5) == 4);
    CHECK(range_bits_for(255) == 8);
    CHECK(range_bits_for(256) == 16);
    CHECK(range_bits_for(UINT64_MAX) == 64);
}

TEST_CASE("prove/verify round trip including the boundaries") {
    Fixture f;
    const uint64_t vmax = 13;  // not a power-of-two boundary
    for (uint64_t v : {uint64_t(0), uint64_t(7), vmax}) {
        auto [c, r] = f.make(v);
        RangeProof p = zk_prove(f.zk, c, vmax, v, r, f.rng);
        CHECK(zk_verify(f.zk, c, vmax, p));
    }
}

TEST_CASE("prover refuses false statements and foreign commitments") {
    Fixture f;
    auto [c, r] = f.make(14);
    CHECK_THROWS_AS(zk_prove(f.zk, c, 13, 14, r, f.rng), WitnessOutOfRange);

    auto [c2, r2] = f.make(5);
    CHECK_THROWS_AS(zk_prove(f.zk, c2, 13, 5, r, f.rng), CommitmentMismatch);
    CHECK_THROWS_AS(zk_prove(f.zk, c2, 13, 6, r2, f.rng), CommitmentMismatch);
}

TEST_CASE("verification is bound to the exact statement") {
    Fixture f;
    auto [c, r] = f.make(9);
    RangeProof p = zk_prove(f.zk, c, 20, 9, r, f.rng);
    REQUIRE(zk_verify(f.zk, c, 20, p));

    auto [c2, r2] = f.make(9);
    CHECK(!zk_verify(f.zk, c2, 20, p));  // different commitment
    CHECK(!zk_verify(f.zk, c, 21, p));   // different bound
}

TEST_CASE("proofs are randomized") {
    Fixture f;
    auto [c, r] = f.make(3);
    RangeProof p1 = zk_prove(f.zk, c, 10, 3, r, f.rng);
    RangeProof p2 = zk_prove(f.zk, c, 10, 3, r, f.rng);
    CHECK(p1.to_bytes() != p2.to_bytes());
    CHECK(zk_verify(f.zk, c, 10, p1));
    CHECK(zk_verify(f.zk, c, 10, p2));
}

TEST_CASE("serialization round trip and malformed input handling") {
    Fixture f;
    auto [c, r] = f.make(1000);
    RangeProof p = zk_prove(f.zk, c, 4096, 1000, r, f.rng);
    Bytes ser = p.to_bytes();
    CHECK(ser.size() == p.serialized_size());

    auto back = RangeProof::from_bytes(ser);
    REQUIRE(back.has_value());
    CHECK(*back == p);
    CHECK(zk_verify(f.zk, c, 4096, *back));

    // truncation and trailing garbage both fail cleanly
    CHECK(!RangeProof::from_bytes(std::span(ser).first(ser.size() - 1)).has_value());
    Bytes extended = ser;
    extended.push_back(0);
    CHECK(!RangeProof::from_bytes(extended).has_value());
}

TEST_CASE("single-byte mutations never verify") {
    Fixture f;
    auto [c, r] = f.make(500);
    const uint64_t vmax = 900;
    RangeProof p = zk_prove(f.zk, c, vmax, 500, r, f.rng);
    Bytes ser = p.to_bytes();
    Rng mut = Rng::deterministic(31337);

    int tried = 0;
    for (int i = 0; i < 300; i++) {
        Bytes twisted = ser;
        size_t pos = mut.below(twisted.size());
        uint8_t delta = static_cast<uint8_t>(mut.between(1, 255));
        twisted[pos] ^= delta;
        auto parsed = RangeProof::from_bytes(twisted);
        if (!parsed) continue;  // malformed encodings already count as rejected
        tried++;
        CHECK(!zk_verify(f.zk, c, vmax, *parsed));
    }
    // at least some mutations must have survived parsing to be meaningful
    CHECK(tried > 0);

    // mutate the commitment
    for (int i = 0; i < 50; i++) {
        auto enc = c.bytes();
        enc[mut.below(32)] ^= static_cast<uint8_t>(mut.between(1, 255));
        auto c2 = Commitment::from_bytes(enc);
        if (!c2) continue;
        CHECK(!zk_verify(f.zk, *c2, vmax, p));
    }
    // mutate the bound
    for (uint64_t nearby : {vmax - 1, vmax + 1, vmax ^ 0x10, uint64_t(1), uint64_t(0)}) {
        CHECK(!zk_verify(f.zk, c, nearby, p));
    }
}

TEST_CASE("batch proofs: aggregation, size, refusals") {
    Fixture f;
    const uint64_t vmax = 50;

    std::vector<BatchStatement> batch;
    for (uint64_t v : {3ull, 0ull, 50ull, 27ull}) {
        Scalar r = Scalar::random(f.rng);
        batch.push_back({commit_u64(f.com, v, r), vmax, v, r});
    }
    RangeProof agg = zk_prove_batch(f.zk, batch, f.rng);
    std::vector<Commitment> cs;
    for (auto& b : batch) cs.push_back(b.c);
    CHECK(zk_verify_batch(f.zk, cs, vmax, agg));

    // wrong order / wrong member rejected
    std::swap(cs[0], cs[1]);
    CHECK(!zk_verify_batch(f.zk, cs, vmax, agg));
    std::swap(cs[0], cs[1]);
    CHECK(!zk_verify_batch(f.zk, cs, vmax - 1, agg));

    // one member out of range -> prover refuses
    auto bad = batch;
    bad[2].v = vmax + 1;
    bad[2].c = commit_u64(f.com, vmax + 1, bad[2].r);
    CHECK_THROWS_AS(zk_prove_batch(f.zk, bad, f.rng), WitnessOutOfRange);

    // mixed bounds refused
    auto mixed = batch;
    mixed[1].vmax = vmax + 1;
    CHECK_THROWS_AS(zk_prove_batch(f.zk, mixed, f.rng), Error);

    // aggregate of 8 is much smaller than 8 singles
    std::vector<BatchStatement> eight;
    for (uint64_t v = 0; v < 8; v++) {
        Scalar r = Scalar::random(f.rng);
        eight.push_back({commit_u64(f.com, v, r), vmax, v, r});
    }
    RangeProof agg8 = zk_prove_batch(f.zk, eight, f.rng);
    RangeProof single = zk_prove(f.zk, eight[0].c, vmax, 0, eight[0].r, f.rng);
    std::vector<Commitment> eight_cs;
    for (auto& b : eight) eight_cs.push_back(b.c);
    CHECK(zk_verify_batch(f.zk, eight_cs, vmax, agg8));
    CHECK(agg8.serialized_size() < 8 * single.serialized_size());
}

TEST_CASE("zk_verify_many folds honest batches and isolates bad members") {
    Fixture f;
    std::vector<RangeStatement> statements;
    std::vector<RangeProof> proofs;
    for (uint64_t v = 0; v < 12; v++) {
        auto [c, r] = f.make(v);
        statements.push_back({c, 15});
        proofs.push_back(zk_prove(f.zk, c, 15, v, r, f.rng));
    }
    CHECK(zk_verify_many(f.zk, statements, proofs));
    CHECK(!zk_first_invalid(f.zk, statements, proofs).has_value());

    std::swap(proofs[4], proofs[7]);  // proofs no longer match their statements
    CHECK(!zk_verify_many(f.zk, statements, proofs));
    auto idx = zk_first_invalid(f.zk, statements, proofs);
    REQUIRE(idx.has_value());
    CHECK(*idx == 4);
}

TEST_CASE("completeness over random statements incl. 64-bit bounds") {
    Fixture f;
    for (int i = 0; i < 60; i++) {
        uint64_t vmax = f.rng.next_u64();
        if (vmax == 0) vmax = 1;
        uint64_t v = f.rng.between(0, vmax);
        Scalar r = Scalar::random(f.rng);
        Commitment c = commit_u64(f.com, v, r);
        RangeProof p = zk_prove(f.zk, c, vmax, v, r, f.rng);
        CHECK(zk_verify(f.zk, c, vmax, p));
    }
}

TEST_CASE("verification is stateless and order independent") {
    Fixture f;
    std::vector<std::pair<RangeStatement, RangeProof>> items;
    for (uint64_t v = 0; v < 6; v++) {
        auto [c, r] = f.make(v * 3);
        items.push_back({{c, 40}, zk_prove(f.zk, c, 40, v * 3, r, f.rng)});
    }
    std::vector<bool> forward, backward;
    for (auto& [st, pr] : items) forward.push_back(zk_verify(f.zk, st.c, st.vmax, pr));
    std::reverse(items.begin(), items.end());
    for (auto& [st, pr] : items) backward.push_back(zk_verify(f.zk, st.c, st.vmax, pr));
    std::reverse(backward.begin(), backward.end());
    CHECK(forward == backward);
    CHECK(std::all_of(forward.begin(), forward.end(), [](bool b) { return b; }));
}

TEST_CASE("prove and verify are tallied per statement") {
    Fixture f;
    auto [c, r] = f.make(2);
    auto before = ops::snapshot();
    RangeProof p = zk_prove(f.zk, c, 10, 2, r, f.rng);
    (void)zk_verify(f.zk, c, 10, p);
    std::vector<RangeStatement> sts = {{c, 10}, {c, 10}, {c, 10}};
    std::vector<RangeProof> prs = {p, p, p};
    (void)zk_verify_many(f.zk, sts, prs);
    auto d = ops::snapshot() - before;
    CHECK(d.proves == 1);
    CHECK(d.verifies == 4);
}
