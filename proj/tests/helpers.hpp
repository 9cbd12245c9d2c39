#pragma once

#include "pptp/params.hpp"

namespace pptp::testing {

// Uniform schedule: same rates and thresholds in every period.
inline PriceSchedule uniform_schedule(uint64_t n, uint32_t k, uint64_t alpha, uint64_t beta,
                                      uint64_t gamma, uint64_t delta) {
    PriceSchedule s;
    s.k = k;
    s.n = n;
    s.alpha.assign(k, alpha);
    s.beta.assign(k, beta);
    s.gamma.assign(k, gamma);
    s.delta.assign(k, delta);
    s.validate();
    return s;
}

struct TestSystem {
    SystemParams params;
    RetailerKey key;
};

inline TestSystem make_system(uint64_t n, uint32_t k, uint64_t gamma, uint64_t delta,
                              uint64_t seed = 7) {
    Rng rng = Rng::deterministic(seed);
    auto init = initialize(128, uniform_schedule(n, k, 5, 2, gamma, delta), rng);
    return {init.params, init.retailer_key};
}

}  // namespace pptp::testing
