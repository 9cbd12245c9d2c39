#include "pptp/counters.hpp"

#include <atomic>

namespace pptp::ops {

namespace {
std::atomic<uint64_t> g_commits{0};
std::atomic<uint64_t> g_proves{0};
std::atomic<uint64_t> g_verifies{0};
}  // namespace

void add_commits(uint64_t n) { g_commits.fetch_add(n, std::memory_order_relaxed); }
void add_proves(uint64_t n) { g_proves.fetch_add(n, std::memory_order_relaxed); }
void add_verifies(uint64_t n) { g_verifies.fetch_add(n, std::memory_order_relaxed); }

OpCounts snapshot() {
    return {g_commits.load(std::memory_order_relaxed),
            g_proves.load(std::memory_order_relaxed),
            g_verifies.load(std::memory_order_relaxed)};
}

void reset() {
    g_commits.store(0, std::memory_order_relaxed);
    g_proves.store(0, std::memory_order_relaxed);
    g_verifies.store(0, std::memory_order_relaxed);
}

}  // namespace pptp::ops
