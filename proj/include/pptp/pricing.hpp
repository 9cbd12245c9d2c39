#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pptp/bytes.hpp"

namespace pptp {

/*
 * Tariff model. All quantities are nonnegative integers: energy in rounded
 * kWh steps, money in rate*step units. Rates per period come in pairs
 * (alpha = penalty rate, beta = normal rate); the penalty applies when the
 * network-wide truncated demand exceeds gamma or the user's own demand
 * exceeds delta, both strictly.
 */

struct PriceSchedule {
    uint32_t k = 0;   // periods per operational cycle
    uint64_t n = 0;   // users
    std::vector<uint64_t> alpha;
    std::vector<uint64_t> beta;
    std::vector<uint64_t> gamma;  // network demand threshold
    std::vector<uint64_t> delta;  // per-user demand cap

    // Enforces beta_t <= alpha_t and gamma_t <= n*delta_t - 1; throws Error.
    void validate() const;

    Bytes to_bytes() const;
    static PriceSchedule from_bytes(std::span<const uint8_t> data);
    bool operator==(const PriceSchedule&) const = default;
};

struct MeasurementRecord {
    uint64_t user = 0;
    uint32_t period = 0;
    uint64_t raw_y = 0;
    uint64_t truncated_x = 0;

    static MeasurementRecord make(uint64_t user, uint32_t period, uint64_t raw_y,
                                  const PriceSchedule& sched);
};

struct BillLine {
    uint64_t rate = 0;
    uint64_t x_used = 0;
    bool operator==(const BillLine&) const = default;
};

struct Bill {
    uint64_t user = 0;
    std::vector<BillLine> lines;  // one per period
    uint64_t total = 0;
    bool operator==(const Bill&) const = default;
};

uint64_t truncate(uint64_t raw_y, uint64_t delta);

// Network-demand rule: alpha_t iff x_star > gamma_t or x_i > delta_t.
uint64_t price(uint64_t x_i, uint64_t x_star, uint32_t t, const PriceSchedule& sched);

// Inclining-block rule on the user's own reading only (simulator baseline);
// gamma here acts as the individual threshold.
uint64_t price_rtpibr(uint64_t y_i, uint32_t t, const PriceSchedule& sched);

Bill compute_bill(std::span<const uint64_t> x, std::span<const uint64_t> x_star,
                  const PriceSchedule& sched);

bool verify_bill(const Bill& bill, std::span<const uint64_t> own_x,
                 std::span<const uint64_t> x_star, const PriceSchedule& sched);

// Worst admissible bill when n_adversarial colluding users all report the
// per-user cap; anything above this total is detectably wrong.
uint64_t worst_case_bill(std::span<const uint64_t> own_x,
                         std::span<const uint64_t> honest_x_star, uint64_t n_adversarial,
                         const PriceSchedule& sched);

// Per-period quadratic supply cost a_t * s_t^2 summed over the cycle.
uint64_t retailer_cost(std::span<const uint64_t> total_demand, std::span<const uint64_t> cost_a);

}  // namespace pptp
