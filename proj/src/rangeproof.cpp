#include "pptp/rangeproof.hpp"

#include <sodium.h>

#include <bit>
#include <map>
#include <mutex>

#include "pptp/counters.hpp"
#include "pptp/errors.hpp"

namespace pptp {

namespace {

constexpr char kDomain[] = "pptp/v1/rangeproof";
constexpr char kStatementTag[] = "pptp/v1/range-stmt";
constexpr char kGeneratorTag[] = "pptp/v1/bp-gen";

// Fiat-Shamir transcript over an incrementally hashed SHA-512 state.
class Transcript {
public:
    explicit Transcript(std::string_view domain) {
        crypto_hash_sha512_init(&st_);
        absorb("domain", {reinterpret_cast<const uint8_t*>(domain.data()), domain.size()});
    }

    void absorb(std::string_view label, std::span<const uint8_t> data) {
        append_frame(label, data);
    }

    void absorb_u64(std::string_view label, uint64_t v) {
        Bytes b;
        put_u64(b, v);
        absorb(label, b);
    }

    void absorb_point(std::string_view label, const GroupElement& p) { absorb(label, p.bytes()); }

    void absorb_scalar(std::string_view label, const Scalar& s) { absorb(label, s.to_be_bytes()); }

    Scalar challenge(std::string_view label) {
        append_frame(label, {});
        crypto_hash_sha512_state fork = st_;
        std::array<uint8_t, 64> digest;
        crypto_hash_sha512_final(&fork, digest.data());
        // Feed the digest back so successive challenges differ.
        append_frame("chain", digest);
        return Scalar::reduce_wide(digest);
    }

private:
    void append_frame(std::string_view label, std::span<const uint8_t> data) {
        Bytes frame;
        put_u32(frame, static_cast<uint32_t>(label.size()));
        frame.insert(frame.end(), label.begin(), label.end());
        put_u32(frame, static_cast<uint32_t>(data.size()));
        frame.insert(frame.end(), data.begin(), data.end());
        crypto_hash_sha512_update(&st_, frame.data(), frame.size());
    }

    crypto_hash_sha512_state st_;
};

uint32_t next_pow2(uint32_t v) {
    return v <= 1 ? 1 : std::bit_ceil(v);
}

Bytes statement_bytes(std::span<const Commitment> cs, uint64_t vmax) {
    Bytes b;
    put_u64(b, vmax);
    put_u32(b, static_cast<uint32_t>(cs.size()));
    for (const auto& c : cs) put_raw(b, c.bytes());
    return b;
}

Hash32 statement_digest(std::span<const Commitment> cs, uint64_t vmax) {
    Bytes b(kStatementTag, kStatementTag + sizeof(kStatementTag) - 1);
    put_raw(b, statement_bytes(cs, vmax));
    return hash_bytes(b);
}

// The bit-range statements behind an inclusive-bound statement list: for
// each commitment c, both c and vmax*G - c, padded with identities to a
// power-of-two count.
std::vector<GroupElement> expand_statements(const ZkParams& zk, std::span<const Commitment> cs,
                                            uint64_t vmax) {
    GroupElement vmax_g = zk.com.g.mul(Scalar::from_u64(vmax));
    std::vector<GroupElement> vs;
    vs.reserve(next_pow2(static_cast<uint32_t>(2 * cs.size())));
    for (const auto& c : cs) {
        vs.push_back(c.point);
        vs.push_back(vmax_g.sub(c.point));
    }
    while (!std::has_single_bit(vs.size())) vs.push_back(GroupElement::identity());
    return vs;
}

Scalar inner_product(std::span<const Scalar> a, std::span<const Scalar> b) {
    Scalar acc;
    for (size_t i = 0; i < a.size(); i++) acc = acc.add(a[i].mul(b[i]));
    return acc;
}

// Single multi-scalar-multiplication accumulator for one verification
// equation (or a random linear combination of several). Coefficients on the
// shared generator vectors merge indexwise.
struct VerifyAccum {
    explicit VerifyAccum(const ZkParams& zk) : zk_(&zk) {}

    void add_gv(size_t i, const Scalar& s) {
        if (gv_.size() <= i) gv_.resize(i + 1);
        gv_[i] = gv_[i].add(s);
    }
    void add_hv(size_t i, const Scalar& s) {
        if (hv_.size() <= i) hv_.resize(i + 1);
        hv_[i] = hv_[i].add(s);
    }
    void add_g(const Scalar& s) { g_ = g_.add(s); }
    void add_h(const Scalar& s) { h_ = h_.add(s); }
    void add_u(const Scalar& s) { u_ = u_.add(s); }
    void add_point(const Scalar& s, const GroupElement& p) { dynamic_.emplace_back(s, p); }

    bool holds() const {
        GroupElement acc = GroupElement::identity();
        for (size_t i = 0; i < gv_.size(); i++) {
            if (!gv_[i].is_zero()) acc = acc.add(zk_->gv[i].mul(gv_[i]));
        }
        for (size_t i = 0; i < hv_.size(); i++) {
            if (!hv_[i].is_zero()) acc = acc.add(zk_->hv[i].mul(hv_[i]));
        }
        if (!g_.is_zero()) acc = acc.add(zk_->com.g.mul(g_));
        if (!h_.is_zero()) acc = acc.add(zk_->com.h.mul(h_));
        if (!u_.is_zero()) acc = acc.add(zk_->u.mul(u_));
        for (const auto& [s, p] : dynamic_) {
            if (!s.is_zero() && !p.is_identity()) acc = acc.add(p.mul(s));
        }
        return acc.is_identity();
    }

private:
    const ZkParams* zk_;
    std::vector<Scalar> gv_, hv_;
    Scalar g_, h_, u_;
    std::vector<std::pair<Scalar, GroupElement>> dynamic_;
};

struct Challenges {
    Scalar y, z, x, w;
    std::vector<Scalar> u;  // one per reduction round
};

// Replays the transcript against the proof, recovering all challenges.
// Returns false on structural mismatch (wrong round count, zero challenge).
bool replay_transcript(const ZkParams& zk, std::span<const Commitment> cs, uint64_t vmax,
                       std::span<const GroupElement> vs, uint32_t nbits, const RangeProof& p,
                       Challenges& out) {
    size_t n_total = static_cast<size_t>(nbits) * vs.size();
    size_t rounds = static_cast<size_t>(std::countr_zero(n_total));
    if (p.ipa_l.size() != rounds || p.ipa_r.size() != rounds) return false;

    Transcript t(kDomain);
    t.absorb("statement", statement_bytes(cs, vmax));
    t.absorb_u64("nbits", nbits);
    t.absorb_u64("m", vs.size());
    for (const auto& v : vs) t.absorb_point("V", v);
    t.absorb_point("A", p.a_commit);
    t.absorb_point("S", p.s_commit);
    out.y = t.challenge("y");
    out.z = t.challenge("z");
    if (out.y.is_zero() || out.z.is_zero()) return false;
    t.absorb_point("T1", p.t1_commit);
    t.absorb_point("T2", p.t2_commit);
    out.x = t.challenge("x");
    t.absorb_scalar("taux", p.taux);
    t.absorb_scalar("mu", p.mu);
    t.absorb_scalar("t_hat", p.t_hat);
    out.w = t.challenge("w");
    out.u.clear();
    out.u.reserve(rounds);
    for (size_t k = 0; k < rounds; k++) {
        t.absorb_point("L", p.ipa_l[k]);
        t.absorb_point("R", p.ipa_r[k]);
        Scalar uk = t.challenge("u");
        if (uk.is_zero()) return false;
        out.u.push_back(uk);
    }
    return true;
}

// Appends both verification equations for one proof, scaled by independent
// weights, to the accumulators. Returns false if the proof is structurally
// inconsistent with the statement.
bool accumulate_equations(const ZkParams& zk, std::span<const Commitment> cs, uint64_t vmax,
                          const RangeProof& p, const Scalar& w1, const Scalar& w2,
                          VerifyAccum& acc) {
    if (cs.empty() || cs.size() > ZkParams::kMaxBatch) return false;
    if (p.vmax != vmax || p.stmt_count != cs.size()) return false;
    if (p.nbits != range_bits_for(vmax)) return false;
    if (p.statement_digest != statement_digest(cs, vmax)) return false;
    uint32_t nb = p.nbits;
    if (nb > next_pow2(zk.max_bits)) return false;

    auto vs = expand_statements(zk, cs, vmax);
    size_t m = vs.size();
    size_t n_total = static_cast<size_t>(nb) * m;
    if (n_total > zk.gv.size()) return false;

    Challenges ch;
    if (!replay_transcript(zk, cs, vmax, vs, nb, p, ch)) return false;

    const Scalar one = Scalar::one();
    const Scalar z = ch.z;
    Scalar z_sq = z.mul(z);

    // z^(2+j) per statement.
    std::vector<Scalar> zs(m);
    zs[0] = z_sq;
    for (size_t j = 1; j < m; j++) zs[j] = zs[j - 1].mul(z);

    // sum of y^i, and y^-i powers for the h side.
    Scalar y_inv = ch.y.invert();
    Scalar sum_y;
    {
        Scalar yp = one;
        for (size_t i = 0; i < n_total; i++) {
            sum_y = sum_y.add(yp);
            yp = yp.mul(ch.y);
        }
    }

    // delta(y,z) = (z - z^2) * <1, y^N> - sum_j z^(3+j) * (2^nb - 1)
    uint64_t full = nb >= 64 ? ~0ull : ((1ull << nb) - 1);
    Scalar two_nb = Scalar::from_u64(full);
    Scalar delta = z.sub(z_sq).mul(sum_y);
    for (size_t j = 0; j < m; j++) {
        delta = delta.sub(zs[j].mul(z).mul(two_nb));
    }

    // Equation 1: t_hat*G + taux*H - sum_j z^(2+j) V_j - delta*G - x*T1 - x^2*T2 == 0
    acc.add_g(w1.mul(p.t_hat.sub(delta)));
    acc.add_h(w1.mul(p.taux));
    for (size_t j = 0; j < m; j++) {
        if (vs[j].is_identity()) continue;
        acc.add_point(w1.mul(zs[j]).negate(), vs[j]);
    }
    acc.add_point(w1.mul(ch.x).negate(), p.t1_commit);
    acc.add_point(w1.mul(ch.x).mul(ch.x).negate(), p.t2_commit);

    // Equation 2: the folded inner-product relation.
    size_t rounds = ch.u.size();
    std::vector<Scalar> u_inv(rounds);
    for (size_t k = 0; k < rounds; k++) u_inv[k] = ch.u[k].invert();

    // s_i = prod over rounds of u_k or u_k^-1 depending on the bit of i
    // consumed in round k (most significant first); s reversed is s inverted.
    std::vector<Scalar> s(n_total);
    for (size_t i = 0; i < n_total; i++) {
        Scalar si = one;
        for (size_t k = 0; k < rounds; k++) {
            bool hi = (i >> (rounds - 1 - k)) & 1;
            si = si.mul(hi ? ch.u[k] : u_inv[k]);
        }
        s[i] = si;
    }

    Scalar a_w = w2.mul(p.ipa_a);
    Scalar b_w = w2.mul(p.ipa_b);
    Scalar z_w = w2.mul(z);
    Scalar yi = one;  // y^-i
    for (size_t i = 0; i < n_total; i++) {
        acc.add_gv(i, a_w.mul(s[i]).add(z_w));
        // d_i = z^(2+j) * 2^(i mod nb) for the statement j owning slot i
        Scalar d_i = zs[i / nb].mul(Scalar::from_u64(1ull << (i % nb)));
        Scalar h_coeff = b_w.mul(s[n_total - 1 - i]).mul(yi).sub(z_w).sub(w2.mul(d_i).mul(yi));
        acc.add_hv(i, h_coeff);
        yi = yi.mul(y_inv);
    }
    acc.add_h(w2.mul(p.mu));
    acc.add_point(w2.negate(), p.a_commit);
    acc.add_point(w2.mul(ch.x).negate(), p.s_commit);
    acc.add_u(w2.mul(ch.w).mul(p.ipa_a.mul(p.ipa_b).sub(p.t_hat)));
    for (size_t k = 0; k < rounds; k++) {
        acc.add_point(w2.mul(ch.u[k]).mul(ch.u[k]).negate(), p.ipa_l[k]);
        acc.add_point(w2.mul(u_inv[k]).mul(u_inv[k]).negate(), p.ipa_r[k]);
    }
    return true;
}

bool verify_impl(const ZkParams& zk, std::span<const Commitment> cs, uint64_t vmax,
                 const RangeProof& p) {
    // The two equations must hold independently, so they are checked with
    // unit weights in separate accumulators; verification stays
    // deterministic for a single proof.
    VerifyAccum eq1(zk), eq2(zk);
    Scalar one = Scalar::one();
    if (!accumulate_equations(zk, cs, vmax, p, one, Scalar::zero(), eq1)) return false;
    if (!accumulate_equations(zk, cs, vmax, p, Scalar::zero(), one, eq2)) return false;
    return eq1.holds() && eq2.holds();
}

struct ProveInput {
    uint64_t v;
    Scalar gamma;
};

RangeProof prove_impl(const ZkParams& zk, std::span<const Commitment> cs, uint64_t vmax,
                      std::span<const ProveInput> witnesses, Rng& rng) {
    uint32_t nb = range_bits_for(vmax);
    if (std::bit_width(vmax) > zk.max_bits) {
        throw UnsupportedParameter("range bound exceeds the configured bit width");
    }
    if (cs.empty()) throw Error("empty statement list");
    if (cs.size() > ZkParams::kMaxBatch) {
        throw UnsupportedParameter("too many statements in one aggregated proof");
    }

    auto vs = expand_statements(zk, cs, vmax);
    size_t m = vs.size();
    size_t n_total = static_cast<size_t>(nb) * m;
    if (n_total > zk.gv.size()) throw UnsupportedParameter("aggregation exceeds generator supply");

    // Bit statements: (v_j, gamma_j) and (vmax - v_j, -gamma_j), zero pads.
    std::vector<ProveInput> bits_stmts;
    bits_stmts.reserve(m);
    for (const auto& w : witnesses) {
        bits_stmts.push_back({w.v, w.gamma});
        bits_stmts.push_back({vmax - w.v, w.gamma.negate()});
    }
    while (bits_stmts.size() < m) bits_stmts.push_back({0, Scalar::zero()});

    const Scalar one = Scalar::one();
    Scalar neg_one = one.negate();

    std::vector<Scalar> a_l(n_total), a_r(n_total);
    for (size_t j = 0; j < m; j++) {
        for (uint32_t i = 0; i < nb; i++) {
            bool bit = (bits_stmts[j].v >> i) & 1;
            a_l[j * nb + i] = bit ? one : Scalar::zero();
            a_r[j * nb + i] = bit ? Scalar::zero() : neg_one;
        }
    }

    Scalar alpha = Scalar::random(rng);
    Scalar rho = Scalar::random(rng);
    std::vector<Scalar> s_l(n_total), s_r(n_total);
    for (size_t i = 0; i < n_total; i++) {
        s_l[i] = Scalar::random(rng);
        s_r[i] = Scalar::random(rng);
    }

    auto vector_commit = [&](const Scalar& blind, std::span<const Scalar> left,
                             std::span<const Scalar> right) {
        GroupElement acc = zk.com.h.mul(blind);
        for (size_t i = 0; i < n_total; i++) {
            if (!left[i].is_zero()) acc = acc.add(zk.gv[i].mul(left[i]));
            if (!right[i].is_zero()) acc = acc.add(zk.hv[i].mul(right[i]));
        }
        return acc;
    };

    GroupElement a_commit = vector_commit(alpha, a_l, a_r);
    GroupElement s_commit = vector_commit(rho, s_l, s_r);

    Transcript t(kDomain);
    t.absorb("statement", statement_bytes(cs, vmax));
    t.absorb_u64("nbits", nb);
    t.absorb_u64("m", m);
    for (const auto& v : vs) t.absorb_point("V", v);
    t.absorb_point("A", a_commit);
    t.absorb_point("S", s_commit);
    Scalar y = t.challenge("y");
    Scalar z = t.challenge("z");
    if (y.is_zero() || z.is_zero()) throw Error("degenerate transcript challenge");

    Scalar z_sq = z.mul(z);
    std::vector<Scalar> zs(m);
    zs[0] = z_sq;
    for (size_t j = 1; j < m; j++) zs[j] = zs[j - 1].mul(z);

    // l(X) = (a_l - z) + s_l X ; r(X) = y^N o (a_r + z + s_r X) + d
    std::vector<Scalar> l0(n_total), r0(n_total), r1(n_total);
    {
        Scalar yp = one;
        for (size_t i = 0; i < n_total; i++) {
            l0[i] = a_l[i].sub(z);
            Scalar d_i = zs[i / nb].mul(Scalar::from_u64(1ull << (i % nb)));
            r0[i] = yp.mul(a_r[i].add(z)).add(d_i);
            r1[i] = yp.mul(s_r[i]);
            yp = yp.mul(y);
        }
    }

    Scalar t1 = inner_product(l0, r1).add(inner_product(s_l, r0));
    Scalar t2 = inner_product(s_l, r1);

    Scalar tau1 = Scalar::random(rng);
    Scalar tau2 = Scalar::random(rng);
    GroupElement t1_commit = zk.com.g.mul(t1).add(zk.com.h.mul(tau1));
    GroupElement t2_commit = zk.com.g.mul(t2).add(zk.com.h.mul(tau2));

    t.absorb_point("T1", t1_commit);
    t.absorb_point("T2", t2_commit);
    Scalar x = t.challenge("x");

    std::vector<Scalar> l_vec(n_total), r_vec(n_total);
    for (size_t i = 0; i < n_total; i++) {
        l_vec[i] = l0[i].add(x.mul(s_l[i]));
        r_vec[i] = r0[i].add(x.mul(r1[i]));
    }
    Scalar t_hat = inner_product(l_vec, r_vec);
    Scalar taux = tau2.mul(x).mul(x).add(tau1.mul(x));
    for (size_t j = 0; j < m; j++) taux = taux.add(zs[j].mul(bits_stmts[j].gamma));
    Scalar mu = alpha.add(rho.mul(x));

    t.absorb_scalar("taux", taux);
    t.absorb_scalar("mu", mu);
    t.absorb_scalar("t_hat", t_hat);
    Scalar w = t.challenge("w");
    GroupElement u_eff = zk.u.mul(w);

    // Inner-product argument over (gv, hv') with hv'_i = y^-i hv_i.
    std::vector<GroupElement> g_cur(zk.gv.begin(), zk.gv.begin() + n_total);
    std::vector<GroupElement> h_cur(n_total);
    {
        Scalar y_inv = y.invert();
        Scalar yp = one;
        for (size_t i = 0; i < n_total; i++) {
            h_cur[i] = zk.hv[i].mul(yp);
            yp = yp.mul(y_inv);
        }
    }

    RangeProof proof;
    proof.vmax = vmax;
    proof.stmt_count = static_cast<uint32_t>(cs.size());
    proof.nbits = nb;
    proof.statement_digest = statement_digest(cs, vmax);
    proof.a_commit = a_commit;
    proof.s_commit = s_commit;
    proof.t1_commit = t1_commit;
    proof.t2_commit = t2_commit;
    proof.taux = taux;
    proof.mu = mu;
    proof.t_hat = t_hat;

    std::vector<Scalar> l_cur = std::move(l_vec);
    std::vector<Scalar> r_cur = std::move(r_vec);
    while (l_cur.size() > 1) {
        size_t half = l_cur.size() / 2;
        auto lo = [&](auto& v) { return std::span(v).first(half); };
        auto hi = [&](auto& v) { return std::span(v).subspan(half); };

        Scalar c_l = inner_product(lo(l_cur), hi(r_cur));
        Scalar c_r = inner_product(hi(l_cur), lo(r_cur));

        GroupElement cap_l = u_eff.mul(c_l);
        GroupElement cap_r = u_eff.mul(c_r);
        for (size_t i = 0; i < half; i++) {
            if (!l_cur[i].is_zero()) cap_l = cap_l.add(g_cur[half + i].mul(l_cur[i]));
            if (!r_cur[half + i].is_zero()) cap_l = cap_l.add(h_cur[i].mul(r_cur[half + i]));
            if (!l_cur[half + i].is_zero()) cap_r = cap_r.add(g_cur[i].mul(l_cur[half + i]));
            if (!r_cur[i].is_zero()) cap_r = cap_r.add(h_cur[half + i].mul(r_cur[i]));
        }

        t.absorb_point("L", cap_l);
        t.absorb_point("R", cap_r);
        Scalar u_k = t.challenge("u");
        if (u_k.is_zero()) throw Error("degenerate transcript challenge");
        Scalar u_k_inv = u_k.invert();

        proof.ipa_l.push_back(cap_l);
        proof.ipa_r.push_back(cap_r);

        for (size_t i = 0; i < half; i++) {
            l_cur[i] = u_k.mul(l_cur[i]).add(u_k_inv.mul(l_cur[half + i]));
            r_cur[i] = u_k_inv.mul(r_cur[i]).add(u_k.mul(r_cur[half + i]));
            g_cur[i] = g_cur[i].mul(u_k_inv).add(g_cur[half + i].mul(u_k));
            h_cur[i] = h_cur[i].mul(u_k).add(h_cur[half + i].mul(u_k_inv));
        }
        l_cur.resize(half);
        r_cur.resize(half);
        g_cur.resize(half);
        h_cur.resize(half);
    }
    proof.ipa_a = l_cur[0];
    proof.ipa_b = r_cur[0];
    return proof;
}

void check_witness(const ZkParams& zk, const Commitment& c, uint64_t vmax, uint64_t v,
                   const Scalar& r) {
    if (v > vmax) throw WitnessOutOfRange("witness exceeds the range bound");
    GroupElement expect = zk.com.g.mul(Scalar::from_u64(v)).add(zk.com.h.mul(r));
    if (!(expect == c.point)) {
        throw CommitmentMismatch("commitment does not open to the given witness");
    }
}

}  // namespace

uint32_t range_bits_for(uint64_t vmax) {
    uint32_t bw = static_cast<uint32_t>(std::bit_width(vmax));
    return next_pow2(bw == 0 ? 1 : bw);
}

ZkParams zk_setup(const ComParams& com, uint32_t max_bits) {
    if (max_bits == 0 || max_bits > 64) {
        throw UnsupportedParameter("zk_setup: bit width must be in [1, 64]");
    }

    struct CacheKey {
        std::array<uint8_t, 32> g, h;
        uint32_t bits;
        auto operator<=>(const CacheKey&) const = default;
    };
    static std::mutex cache_mutex;
    static std::map<CacheKey, ZkParams> cache;

    CacheKey key{com.g.bytes(), com.h.bytes(), max_bits};
    {
        std::lock_guard lock(cache_mutex);
        auto it = cache.find(key);
        if (it != cache.end()) return it->second;
    }

    ZkParams p;
    p.com = com;
    p.max_bits = max_bits;

    size_t count = 2ull * ZkParams::kMaxBatch * next_pow2(max_bits);
    auto derive = [&](char which, uint32_t index) {
        Bytes material(kGeneratorTag, kGeneratorTag + sizeof(kGeneratorTag) - 1);
        put_raw(material, com.g.bytes());
        put_raw(material, com.h.bytes());
        put_u8(material, static_cast<uint8_t>(which));
        put_u32(material, index);
        std::array<uint8_t, 64> wide;
        crypto_hash_sha512(wide.data(), material.data(), material.size());
        return GroupElement::from_uniform(wide);
    };

    p.u = derive('U', 0);
    p.gv.reserve(count);
    p.hv.reserve(count);
    for (uint32_t i = 0; i < count; i++) {
        p.gv.push_back(derive('G', i));
        p.hv.push_back(derive('H', i));
    }

    std::lock_guard lock(cache_mutex);
    cache.emplace(key, p);
    return p;
}

RangeProof zk_prove(const ZkParams& zk, const Commitment& c, uint64_t vmax, uint64_t v,
                    const Scalar& r, Rng& rng) {
    check_witness(zk, c, vmax, v, r);
    ops::add_proves();
    ProveInput w{v, r};
    return prove_impl(zk, std::span(&c, 1), vmax, std::span(&w, 1), rng);
}

bool zk_verify(const ZkParams& zk, const Commitment& c, uint64_t vmax, const RangeProof& proof) {
    ops::add_verifies();
    return verify_impl(zk, std::span(&c, 1), vmax, proof);
}

RangeProof zk_prove_batch(const ZkParams& zk, std::span<const BatchStatement> statements,
                          Rng& rng) {
    if (statements.empty()) throw Error("zk_prove_batch: empty batch");
    uint64_t vmax = statements[0].vmax;
    for (const auto& st : statements) {
        if (st.vmax != vmax) throw Error("zk_prove_batch: mixed bounds in one batch");
        check_witness(zk, st.c, vmax, st.v, st.r);
    }
    ops::add_proves();
    std::vector<Commitment> cs;
    std::vector<ProveInput> ws;
    for (const auto& st : statements) {
        cs.push_back(st.c);
        ws.push_back({st.v, st.r});
    }
    return prove_impl(zk, cs, vmax, ws, rng);
}

bool zk_verify_batch(const ZkParams& zk, std::span<const Commitment> cs, uint64_t vmax,
                     const RangeProof& proof) {
    ops::add_verifies();
    if (cs.empty()) return false;
    return verify_impl(zk, cs, vmax, proof);
}

bool zk_verify_many(const ZkParams& zk, std::span<const RangeStatement> statements,
                    std::span<const RangeProof> proofs) {
    if (statements.size() != proofs.size()) return false;
    ops::add_verifies(statements.size());
    if (statements.empty()) return true;
    if (statements.size() == 1) {
        return verify_impl(zk, std::span(&statements[0].c, 1), statements[0].vmax, proofs[0]);
    }

    // Random linear combination of all verification equations; a single
    // failing proof survives the fold with negligible probability.
    Rng weights = Rng::system();
    VerifyAccum acc(zk);
    bool structural_ok = true;
    for (size_t i = 0; i < statements.size() && structural_ok; i++) {
        Scalar w1 = Scalar::random(weights);
        Scalar w2 = Scalar::random(weights);
        structural_ok = accumulate_equations(zk, std::span(&statements[i].c, 1),
                                             statements[i].vmax, proofs[i], w1, w2, acc);
    }
    if (structural_ok && acc.holds()) return true;

    for (size_t i = 0; i < statements.size(); i++) {
        if (!verify_impl(zk, std::span(&statements[i].c, 1), statements[i].vmax, proofs[i])) {
            return false;
        }
    }
    return true;
}

std::optional<size_t> zk_first_invalid(const ZkParams& zk,
                                       std::span<const RangeStatement> statements,
                                       std::span<const RangeProof> proofs) {
    if (statements.size() != proofs.size()) {
        throw Error("zk_first_invalid: length mismatch");
    }
    if (zk_verify_many(zk, statements, proofs)) return std::nullopt;
    for (size_t i = 0; i < statements.size(); i++) {
        if (!verify_impl(zk, std::span(&statements[i].c, 1), statements[i].vmax, proofs[i])) {
            return i;
        }
    }
    return std::nullopt;
}

Bytes RangeProof::to_bytes() const {
    Bytes out;
    put_u8(out, 1);  // layout version
    put_u64(out, vmax);
    put_u32(out, stmt_count);
    put_u32(out, nbits);
    put_raw(out, statement_digest);
    put_raw(out, a_commit.bytes());
    put_raw(out, s_commit.bytes());
    put_raw(out, t1_commit.bytes());
    put_raw(out, t2_commit.bytes());
    put_raw(out, taux.to_be_bytes());
    put_raw(out, mu.to_be_bytes());
    put_raw(out, t_hat.to_be_bytes());
    put_u32(out, static_cast<uint32_t>(ipa_l.size()));
    for (size_t k = 0; k < ipa_l.size(); k++) {
        put_raw(out, ipa_l[k].bytes());
        put_raw(out, ipa_r[k].bytes());
    }
    put_raw(out, ipa_a.to_be_bytes());
    put_raw(out, ipa_b.to_be_bytes());
    return out;
}

std::optional<RangeProof> RangeProof::from_bytes(std::span<const uint8_t> data) {
    try {
        ByteReader r(data);
        if (r.u8() != 1) return std::nullopt;
        RangeProof p;
        p.vmax = r.u64();
        p.stmt_count = r.u32();
        p.nbits = r.u32();
        p.statement_digest = r.arr<32>();

        auto point = [&]() -> std::optional<GroupElement> {
            return GroupElement::from_bytes(r.take(32));
        };
        auto scalar = [&]() -> std::optional<Scalar> {
            return Scalar::from_be_bytes(r.take(32));
        };

        auto a = point(), s = point(), t1 = point(), t2 = point();
        if (!a || !s || !t1 || !t2) return std::nullopt;
        p.a_commit = *a;
        p.s_commit = *s;
        p.t1_commit = *t1;
        p.t2_commit = *t2;
        auto taux = scalar(), mu = scalar(), t_hat = scalar();
        if (!taux || !mu || !t_hat) return std::nullopt;
        p.taux = *taux;
        p.mu = *mu;
        p.t_hat = *t_hat;

        uint32_t rounds = r.u32();
        if (rounds > 16) return std::nullopt;
        for (uint32_t k = 0; k < rounds; k++) {
            auto l = point(), rr = point();
            if (!l || !rr) return std::nullopt;
            p.ipa_l.push_back(*l);
            p.ipa_r.push_back(*rr);
        }
        auto ia = scalar(), ib = scalar();
        if (!ia || !ib) return std::nullopt;
        p.ipa_a = *ia;
        p.ipa_b = *ib;
        r.expect_end();
        return p;
    } catch (const ParseError&) {
        return std::nullopt;
    }
}

size_t RangeProof::serialized_size() const {
    return 1 + 8 + 4 + 4 + 32 + 4 * 32 + 3 * 32 + 4 + ipa_l.size() * 64 + 2 * 32;
}

}  // namespace pptp
