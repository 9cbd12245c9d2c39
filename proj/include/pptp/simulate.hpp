#pragma once

#include <string>
#include <vector>

#include "pptp/pricing.hpp"

namespace pptp {

/*
 * Small load scheduler: places each household's controllable loads on top of
 * its must-run profile under a chosen strategy, then prices the resulting
 * demand under four schemes (flat, fixed peak window, inclining block rate,
 * network-demand rule) and reports the supplier's quadratic cost.
 */

struct ControllableLoad {
    uint32_t duration = 1;  // consecutive periods
    uint64_t demand = 0;    // per period
    uint32_t start = 0;     // used by the fixed-start strategy
};

struct DemandProfile {
    std::vector<uint64_t> must_run;  // one entry per period
    std::vector<ControllableLoad> loads;
};

struct Strategy {
    enum class Kind { FixedStart, AllAtPeriod, SplitHalf } kind = Kind::FixedStart;
    uint32_t period_a = 0;  // AllAtPeriod start; first half for SplitHalf
    uint32_t period_b = 0;  // second half for SplitHalf

    static Strategy fixed_start() { return {Kind::FixedStart, 0, 0}; }
    static Strategy all_at(uint32_t p) { return {Kind::AllAtPeriod, p, 0}; }
    static Strategy split_half(uint32_t a, uint32_t b) { return {Kind::SplitHalf, a, b}; }
};

struct SimOptions {
    uint64_t naive_rate = 1;
    std::vector<uint32_t> peak_periods;    // fixed peak window for peak-load pricing
    std::vector<uint64_t> rtpibr_gamma;    // per-period individual threshold
    std::vector<uint64_t> cost_a;          // quadratic supply cost coefficients
};

struct SchemeCost {
    std::string scheme;
    uint64_t user_cost = 0;      // summed over all users
    uint64_t retailer_cost = 0;  // depends on demand only
};

struct SimulationResult {
    std::vector<std::vector<uint64_t>> demand;  // n x k raw readings
    std::vector<SchemeCost> costs;
};

SimulationResult simulate_loads(std::span<const DemandProfile> profiles, const Strategy& strategy,
                                const PriceSchedule& sched, const SimOptions& options);

// scheme,user_cost,retailer_cost rows with a header line.
std::string costs_to_csv(const std::vector<SchemeCost>& costs);

}  // namespace pptp
