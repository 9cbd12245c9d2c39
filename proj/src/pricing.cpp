#include "pptp/pricing.hpp"

#include <algorithm>

#include "pptp/errors.hpp"

namespace pptp {

namespace {

uint64_t checked_mul_add(uint64_t acc, uint64_t a, uint64_t b) {
    unsigned __int128 r = static_cast<unsigned __int128>(a) * b + acc;
    if (r > UINT64_MAX) throw Error("billing overflow");
    return static_cast<uint64_t>(r);
}

void check_period(uint32_t t, const PriceSchedule& sched) {
    if (t >= sched.k) throw Error("period index out of range");
}

}  // namespace

void PriceSchedule::validate() const {
    if (k == 0) throw Error("schedule needs at least one period");
    if (n == 0) throw Error("schedule needs at least one user");
    if (alpha.size() != k || beta.size() != k || gamma.size() != k || delta.size() != k) {
        throw Error("schedule arrays must have one entry per period");
    }
    for (uint32_t t = 0; t < k; t++) {
        if (beta[t] > alpha[t]) throw Error("beta must not exceed alpha");
        if (delta[t] == 0) throw Error("per-user cap must be positive");
        unsigned __int128 cap = static_cast<unsigned __int128>(n) * delta[t] - 1;
        if (gamma[t] > cap) throw Error("gamma must stay below n*delta");
    }
}

Bytes PriceSchedule::to_bytes() const {
    Bytes out;
    put_u32(out, k);
    put_u64(out, n);
    for (const auto* v : {&alpha, &beta, &gamma, &delta}) {
        for (uint64_t x : *v) put_u64(out, x);
    }
    return out;
}

PriceSchedule PriceSchedule::from_bytes(std::span<const uint8_t> data) {
    ByteReader r(data);
    PriceSchedule s;
    s.k = r.u32();
    s.n = r.u64();
    if (s.k > 100000) throw ParseError("implausible period count");
    for (auto* v : {&s.alpha, &s.beta, &s.gamma, &s.delta}) {
        v->resize(s.k);
        for (uint32_t t = 0; t < s.k; t++) (*v)[t] = r.u64();
    }
    r.expect_end();
    s.validate();
    return s;
}

MeasurementRecord MeasurementRecord::make(uint64_t user, uint32_t period, uint64_t raw_y,
                                          const PriceSchedule& sched) {
    check_period(period, sched);
    return {user, period, raw_y, truncate(raw_y, sched.delta[period])};
}

uint64_t truncate(uint64_t raw_y, uint64_t delta) { return std::min(raw_y, delta); }

uint64_t price(uint64_t x_i, uint64_t x_star, uint32_t t, const PriceSchedule& sched) {
    check_period(t, sched);
    // strict comparisons on both thresholds
    if (x_star > sched.gamma[t] || x_i > sched.delta[t]) return sched.alpha[t];
    return sched.beta[t];
}

uint64_t price_rtpibr(uint64_t y_i, uint32_t t, const PriceSchedule& sched) {
    check_period(t, sched);
    return y_i > sched.gamma[t] ? sched.alpha[t] : sched.beta[t];
}

Bill compute_bill(std::span<const uint64_t> x, std::span<const uint64_t> x_star,
                  const PriceSchedule& sched) {
    if (x.size() != sched.k || x_star.size() != sched.k) {
        throw Error("measurement vectors must have one entry per period");
    }
    Bill bill;
    bill.lines.reserve(sched.k);
    for (uint32_t t = 0; t < sched.k; t++) {
        uint64_t rate = price(x[t], x_star[t], t, sched);
        bill.lines.push_back({rate, x[t]});
        bill.total = checked_mul_add(bill.total, rate, x[t]);
    }
    return bill;
}

bool verify_bill(const Bill& bill, std::span<const uint64_t> own_x,
                 std::span<const uint64_t> x_star, const PriceSchedule& sched) {
    if (own_x.size() != sched.k || x_star.size() != sched.k) return false;
    Bill expect = compute_bill(own_x, x_star, sched);
    return bill.lines == expect.lines && bill.total == expect.total;
}

uint64_t worst_case_bill(std::span<const uint64_t> own_x,
                         std::span<const uint64_t> honest_x_star, uint64_t n_adversarial,
                         const PriceSchedule& sched) {
    if (own_x.size() != sched.k || honest_x_star.size() != sched.k) {
        throw Error("measurement vectors must have one entry per period");
    }
    if (n_adversarial > sched.n) throw Error("more adversaries than users");
    uint64_t total = 0;
    for (uint32_t t = 0; t < sched.k; t++) {
        unsigned __int128 inflated =
            static_cast<unsigned __int128>(honest_x_star[t]) +
            static_cast<unsigned __int128>(n_adversarial) * sched.delta[t];
        unsigned __int128 cap = static_cast<unsigned __int128>(sched.n) * sched.delta[t];
        uint64_t worst_star = static_cast<uint64_t>(std::min(inflated, cap));
        uint64_t rate = price(own_x[t], worst_star, t, sched);
        total = checked_mul_add(total, rate, own_x[t]);
    }
    return total;
}

uint64_t retailer_cost(std::span<const uint64_t> total_demand, std::span<const uint64_t> cost_a) {
    if (total_demand.size() != cost_a.size()) {
        throw Error("demand and cost vectors must align");
    }
    unsigned __int128 total = 0;
    for (size_t t = 0; t < total_demand.size(); t++) {
        unsigned __int128 s = total_demand[t];
        total += static_cast<unsigned __int128>(cost_a[t]) * s * s;
        if (total > UINT64_MAX) throw Error("cost overflow");
    }
    return static_cast<uint64_t>(total);
}

}  // namespace pptp
