#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "pptp/pricing.hpp"
#include "pptp/simulate.hpp"

namespace pptp {

// Plain-text configuration document: one `key = value [value ...]` per line,
// `#` starts a comment, keys may repeat. Order is preserved because repeated
// keys (profiles, loads) group positionally.
class ConfigDoc {
public:
    static ConfigDoc parse(std::string_view text);
    static ConfigDoc load(const std::string& path);

    bool has(std::string_view key) const;
    const std::vector<std::string>& get(std::string_view key) const;  // first occurrence

    std::string get_str(std::string_view key) const;
    std::string get_str_or(std::string_view key, std::string fallback) const;
    uint64_t get_u64(std::string_view key) const;
    uint64_t get_u64_or(std::string_view key, uint64_t fallback) const;
    std::vector<uint64_t> get_u64s(std::string_view key) const;

    const std::vector<std::pair<std::string, std::vector<std::string>>>& entries() const {
        return entries_;
    }

private:
    std::vector<std::pair<std::string, std::vector<std::string>>> entries_;
};

// Schedule, simulator options, household profiles and the three reference
// scheduling scenarios, all from one document.
struct PricingConfig {
    PriceSchedule sched;
    SimOptions options;
    std::vector<DemandProfile> profiles;
    uint32_t scenario_evening = 0;
    uint32_t scenario_midnight = 0;
    uint32_t scenario_split_a = 0;
    uint32_t scenario_split_b = 0;
};

PricingConfig load_pricing_config(const ConfigDoc& doc);

uint64_t parse_u64(std::string_view token);

}  // namespace pptp
