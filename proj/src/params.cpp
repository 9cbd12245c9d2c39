#include "pptp/params.hpp"

#include "pptp/errors.hpp"

namespace pptp {

Bytes SystemParams::to_bytes() const {
    Bytes b;
    put_u8(b, 1);
    put_raw(b, com.g.bytes());
    put_raw(b, com.h.bytes());
    put_u32(b, zk.max_bits);
    put_var(b, sched.to_bytes());
    put_u32(b, static_cast<uint32_t>(auditors.size()));
    for (const auto& vk : auditors) put_raw(b, vk.bytes);
    put_u32(b, f);
    put_u64(b, timeout_ms);
    return b;
}

SystemParams SystemParams::from_bytes(std::span<const uint8_t> data) {
    ByteReader r(data);
    if (r.u8() != 1) throw ParseError("unknown params version");
    SystemParams p;
    auto g = GroupElement::from_bytes(r.take(32));
    auto h = GroupElement::from_bytes(r.take(32));
    if (!g || !h) throw ParseError("invalid generator encoding");
    p.com = {*g, *h};
    uint32_t max_bits = r.u32();
    Bytes sched_bytes = r.var();
    p.sched = PriceSchedule::from_bytes(sched_bytes);
    uint32_t n_auditors = r.u32();
    if (n_auditors > 4096) throw ParseError("implausible auditor count");
    for (uint32_t i = 0; i < n_auditors; i++) {
        VerifyKey vk;
        vk.bytes = r.arr<32>();
        p.auditors.push_back(vk);
    }
    p.f = r.u32();
    p.timeout_ms = r.u64();
    r.expect_end();
    p.zk = zk_setup(p.com, max_bits);
    return p;
}

Initialized initialize(unsigned security_bits, const PriceSchedule& sched, Rng& rng) {
    sched.validate();
    Initialized out;
    out.params.com = com_setup(security_bits);
    out.params.zk = zk_setup(out.params.com, 64);
    out.params.sched = sched;
    out.retailer_key = prf_keygen(security_bits, rng);
    return out;
}

std::vector<Scalar> slot_secret_gen(const SystemParams& params, const RetailerKey& key,
                                    uint32_t period, uint64_t n) {
    if (period >= params.sched.k) throw Error("period index out of range");
    std::vector<Scalar> secrets;
    secrets.reserve(n);
    for (uint64_t i = 0; i < n; i++) secrets.push_back(prf_eval(key, i, period));
    return secrets;
}

}  // namespace pptp
