#include "pptp/simulate.hpp"

#include <algorithm>
#include <sstream>

#include "pptp/errors.hpp"

namespace pptp {

namespace {

void place_load(std::vector<uint64_t>& row, const ControllableLoad& load, uint32_t start,
                uint32_t k) {
    if (load.duration == 0 || load.duration > k) throw Error("infeasible load duration");
    if (start + load.duration > k) throw Error("load does not fit before cycle end");
    for (uint32_t t = start; t < start + load.duration; t++) row[t] += load.demand;
}

uint64_t safe_add_mul(uint64_t acc, uint64_t rate, uint64_t amount) {
    unsigned __int128 r = static_cast<unsigned __int128>(rate) * amount + acc;
    if (r > UINT64_MAX) throw Error("cost overflow");
    return static_cast<uint64_t>(r);
}

}  // namespace

SimulationResult simulate_loads(std::span<const DemandProfile> profiles, const Strategy& strategy,
                                const PriceSchedule& sched, const SimOptions& options) {
    if (profiles.empty()) throw Error("no demand profiles");
    const uint32_t k = sched.k;
    if (options.rtpibr_gamma.size() != k || options.cost_a.size() != k) {
        throw Error("simulator options must cover every period");
    }

    SimulationResult result;
    result.demand.reserve(profiles.size());
    for (size_t i = 0; i < profiles.size(); i++) {
        const DemandProfile& prof = profiles[i];
        if (prof.must_run.size() != k) throw Error("must-run profile must cover every period");
        std::vector<uint64_t> row = prof.must_run;
        for (const ControllableLoad& load : prof.loads) {
            uint32_t start = load.start;
            switch (strategy.kind) {
                case Strategy::Kind::FixedStart: start = load.start; break;
                case Strategy::Kind::AllAtPeriod: start = strategy.period_a; break;
                case Strategy::Kind::SplitHalf:
                    start = (i < profiles.size() / 2) ? strategy.period_a : strategy.period_b;
                    break;
            }
            place_load(row, load, start, k);
        }
        result.demand.push_back(std::move(row));
    }

    const size_t n = result.demand.size();
    std::vector<uint64_t> total(k, 0);
    for (const auto& row : result.demand) {
        for (uint32_t t = 0; t < k; t++) total[t] += row[t];
    }
    uint64_t supply_cost = retailer_cost(total, options.cost_a);

    // flat rate
    uint64_t naive_cost = 0;
    for (const auto& row : result.demand) {
        for (uint32_t t = 0; t < k; t++) {
            naive_cost = safe_add_mul(naive_cost, options.naive_rate, row[t]);
        }
    }

    // fixed peak window
    std::vector<bool> is_peak(k, false);
    for (uint32_t p : options.peak_periods) {
        if (p >= k) throw Error("peak period out of range");
        is_peak[p] = true;
    }
    uint64_t peak_cost = 0;
    for (const auto& row : result.demand) {
        for (uint32_t t = 0; t < k; t++) {
            peak_cost = safe_add_mul(peak_cost, is_peak[t] ? sched.alpha[t] : sched.beta[t],
                                     row[t]);
        }
    }

    // inclining block rate on own demand: gamma acts as individual threshold
    PriceSchedule rtpibr_sched = sched;
    rtpibr_sched.gamma = options.rtpibr_gamma;
    uint64_t rtpibr_cost = 0;
    for (const auto& row : result.demand) {
        for (uint32_t t = 0; t < k; t++) {
            rtpibr_cost = safe_add_mul(rtpibr_cost, price_rtpibr(row[t], t, rtpibr_sched),
                                       row[t]);
        }
    }

    // network-demand rule over truncated readings
    std::vector<uint64_t> x_star(k, 0);
    std::vector<std::vector<uint64_t>> truncated(n, std::vector<uint64_t>(k, 0));
    for (size_t i = 0; i < n; i++) {
        for (uint32_t t = 0; t < k; t++) {
            truncated[i][t] = truncate(result.demand[i][t], sched.delta[t]);
            x_star[t] += truncated[i][t];
        }
    }
    uint64_t network_cost = 0;
    for (size_t i = 0; i < n; i++) {
        network_cost += compute_bill(truncated[i], x_star, sched).total;
    }

    result.costs = {
        {"naive", naive_cost, supply_cost},
        {"peak_load", peak_cost, supply_cost},
        {"rtpibr", rtpibr_cost, supply_cost},
        {"network", network_cost, supply_cost},
    };
    return result;
}

std::string costs_to_csv(const std::vector<SchemeCost>& costs) {
    std::ostringstream out;
    out << "scheme,user_cost,retailer_cost\n";
    for (const auto& c : costs) {
        out << c.scheme << ',' << c.user_cost << ',' << c.retailer_cost << '\n';
    }
    return out.str();
}

}  // namespace pptp
