#include "pptp/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "pptp/errors.hpp"

namespace pptp {

uint64_t parse_u64(std::string_view token) {
    uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
    if (ec != std::errc() || ptr != token.data() + token.size()) {
        throw ConfigError("not an unsigned integer: '" + std::string(token) + "'");
    }
    return v;
}

ConfigDoc ConfigDoc::parse(std::string_view text) {
    ConfigDoc doc;
    size_t line_no = 0;
    std::istringstream in{std::string(text)};
    std::string line;
    while (std::getline(in, line)) {
        line_no++;
        if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
        std::istringstream ls(line);
        std::string key;
        if (!(ls >> key)) continue;
        std::string eq;
        if (!(ls >> eq) || eq != "=") {
            throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'");
        }
        std::vector<std::string> values;
        std::string tok;
        while (ls >> tok) values.push_back(tok);
        doc.entries_.emplace_back(std::move(key), std::move(values));
    }
    return doc;
}

ConfigDoc ConfigDoc::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse(buf.str());
}

bool ConfigDoc::has(std::string_view key) const {
    for (const auto& [k, _] : entries_) {
        if (k == key) return true;
    }
    return false;
}

const std::vector<std::string>& ConfigDoc::get(std::string_view key) const {
    for (const auto& [k, v] : entries_) {
        if (k == key) return v;
    }
    throw ConfigError("missing config key: " + std::string(key));
}

std::string ConfigDoc::get_str(std::string_view key) const {
    const auto& v = get(key);
    if (v.size() != 1) throw ConfigError("expected a single value for " + std::string(key));
    return v[0];
}

std::string ConfigDoc::get_str_or(std::string_view key, std::string fallback) const {
    return has(key) ? get_str(key) : std::move(fallback);
}

uint64_t ConfigDoc::get_u64(std::string_view key) const { return parse_u64(get_str(key)); }

uint64_t ConfigDoc::get_u64_or(std::string_view key, uint64_t fallback) const {
    return has(key) ? get_u64(key) : fallback;
}

std::vector<uint64_t> ConfigDoc::get_u64s(std::string_view key) const {
    const auto& toks = get(key);
    std::vector<uint64_t> out;
    out.reserve(toks.size());
    for (const auto& t : toks) out.push_back(parse_u64(t));
    return out;
}

namespace {

std::vector<uint64_t> per_period(const ConfigDoc& doc, std::string_view key, uint32_t k) {
    std::vector<uint64_t> v = doc.get_u64s(key);
    if (v.size() == 1) v.assign(k, v[0]);
    if (v.size() != k) {
        throw ConfigError(std::string(key) + " needs one value per period (or a single one)");
    }
    return v;
}

}  // namespace

PricingConfig load_pricing_config(const ConfigDoc& doc) {
    PricingConfig cfg;
    cfg.sched.k = static_cast<uint32_t>(doc.get_u64("k"));
    cfg.sched.n = doc.get_u64("n");
    cfg.sched.alpha = per_period(doc, "alpha", cfg.sched.k);
    cfg.sched.beta = per_period(doc, "beta", cfg.sched.k);
    cfg.sched.gamma = per_period(doc, "gamma", cfg.sched.k);
    cfg.sched.delta = per_period(doc, "delta", cfg.sched.k);
    cfg.sched.validate();

    cfg.options.naive_rate = doc.get_u64_or("naive_rate", 1);
    if (doc.has("peak_periods")) {
        for (uint64_t p : doc.get_u64s("peak_periods")) {
            cfg.options.peak_periods.push_back(static_cast<uint32_t>(p));
        }
    }
    cfg.options.rtpibr_gamma = per_period(doc, "rtpibr_gamma", cfg.sched.k);
    cfg.options.cost_a = per_period(doc, "cost_a", cfg.sched.k);

    // Profiles: a must_run line opens a profile, load lines attach to it,
    // replicate expands it into that many identical households.
    DemandProfile current;
    bool open = false;
    uint64_t replicate = 1;
    auto flush = [&]() {
        if (!open) return;
        for (uint64_t i = 0; i < replicate; i++) cfg.profiles.push_back(current);
        current = DemandProfile{};
        replicate = 1;
        open = false;
    };
    for (const auto& [key, toks] : doc.entries()) {
        if (key == "must_run") {
            flush();
            open = true;
            for (const auto& t : toks) current.must_run.push_back(parse_u64(t));
            if (current.must_run.size() != cfg.sched.k) {
                throw ConfigError("must_run needs one value per period");
            }
        } else if (key == "load") {
            if (!open) throw ConfigError("load line before any must_run profile");
            if (toks.size() != 3) throw ConfigError("load = duration demand start");
            current.loads.push_back({static_cast<uint32_t>(parse_u64(toks[0])),
                                     parse_u64(toks[1]),
                                     static_cast<uint32_t>(parse_u64(toks[2]))});
        } else if (key == "replicate") {
            if (!open) throw ConfigError("replicate line before any must_run profile");
            replicate = parse_u64(toks.at(0));
        }
    }
    flush();

    cfg.scenario_evening = static_cast<uint32_t>(doc.get_u64_or("scenario_evening", 0));
    cfg.scenario_midnight = static_cast<uint32_t>(doc.get_u64_or("scenario_midnight", 0));
    if (doc.has("scenario_split")) {
        auto v = doc.get_u64s("scenario_split");
        if (v.size() != 2) throw ConfigError("scenario_split = first second");
        cfg.scenario_split_a = static_cast<uint32_t>(v[0]);
        cfg.scenario_split_b = static_cast<uint32_t>(v[1]);
    }
    return cfg;
}

}  // namespace pptp
