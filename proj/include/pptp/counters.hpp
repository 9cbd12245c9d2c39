#pragma once

#include <cstdint>

namespace pptp::ops {

// Process-wide tallies of the protocol-level primitive invocations, used by
// the benchmark and cost-accounting tests. Commitment computations cover
// both fresh Pedersen commitments and tree-node derivations; internal
// arithmetic inside the proof system is not tallied.
struct OpCounts {
    uint64_t commits = 0;
    uint64_t proves = 0;
    uint64_t verifies = 0;

    OpCounts operator-(const OpCounts& o) const {
        return {commits - o.commits, proves - o.proves, verifies - o.verifies};
    }
};

void add_commits(uint64_t n = 1);
void add_proves(uint64_t n = 1);
void add_verifies(uint64_t n = 1);

OpCounts snapshot();
void reset();

}  // namespace pptp::ops
