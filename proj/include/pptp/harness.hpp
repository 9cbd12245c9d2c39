#pragma once

#include <map>
#include <memory>
#include <thread>

#include "pptp/audit_random.hpp"
#include "pptp/baseline.hpp"
#include "pptp/clock.hpp"
#include "pptp/config.hpp"
#include "pptp/merkle.hpp"
#include "pptp/wire.hpp"

namespace pptp {

/*
 * Simulated deployment: one retailer process/thread, n meter clients, f+1
 * auditors, all sharing a bulletin board. The same retailer core backs an
 * in-process driver (tests, tamper scenarios) and a TCP loopback server, so
 * a seeded scenario produces identical verdicts and board contents in both.
 */

enum class Variant { Baseline, Merkle };
Variant variant_from_string(std::string_view s);
std::string to_string(Variant v);

struct TamperSpec {
    enum class Scenario {
        None = 0,
        InflateSum,
        SubstituteLeaf,
        OutOfRangeLeaf,
        ForgeRoot,
        DesyncDigest,
        Overbill,
    };
    Scenario scenario = Scenario::None;
    uint64_t target_user = 0;
    uint32_t target_period = 0;
    uint64_t magnitude = 3;

    bool active() const { return scenario != Scenario::None; }
};
TamperSpec::Scenario scenario_from_string(std::string_view s);
std::string to_string(TamperSpec::Scenario s);

struct HarnessConfig {
    PriceSchedule sched;
    Variant variant = Variant::Merkle;
    uint32_t f = 1;
    uint64_t timeout_ms = 10000;
    uint64_t seed = 42;
    uint64_t cycles = 1;
    std::string host = "127.0.0.1";
    uint16_t port = 0;
    std::string board_path;  // empty = in-memory board
    unsigned threads = 0;
    TamperSpec tamper;
};

HarnessConfig load_harness_config(const ConfigDoc& doc);

// Deterministic key material and measurements, all derived from the seed.
RetailerKey derive_retailer_key(uint64_t seed);
SigKeyPair derive_auditor_keys(uint64_t seed, uint32_t auditor_index);
uint64_t synthetic_measurement(uint64_t seed, uint64_t cycle, uint32_t period, uint64_t user,
                               uint64_t delta);

// Per-cycle statement the retailer sends each user: quantities, the claimed
// network sums, the rates, and the total.
struct BillStatement {
    uint64_t user = 0;
    uint64_t cycle = 0;
    struct Line {
        uint64_t x_used = 0;
        uint64_t claimed_x_star = 0;
        uint64_t rate = 0;
        bool peak = false;
        bool operator==(const Line&) const = default;
    };
    std::vector<Line> lines;
    uint64_t total = 0;

    Bytes to_bytes() const;
    static std::optional<BillStatement> from_bytes(std::span<const uint8_t> data);
};

// Client-side acceptance rule: quantities match the meter's own truncated
// readings, the peak flags match the verified evidence, claimed sums sit on
// the right side of the threshold, every rate follows the price rule, and
// the total adds up.
bool check_bill_statement(const SystemParams& params, const BillStatement& bill,
                          std::span<const uint64_t> own_x, std::span<const uint8_t> peak_flags);

// Retailer state machine shared by the in-process driver and the TCP server.
class RetailerCore {
public:
    RetailerCore(const HarnessConfig& cfg, std::shared_ptr<Board> board);

    const SystemParams& params() const { return params_; }
    const HarnessConfig& config() const { return cfg_; }

    Scalar slot_secret(uint64_t user, uint32_t period) const;
    // Records a reading; generates and posts the period's evidence once all
    // n readings of (cycle, period) have arrived.
    void submit(uint64_t cycle, uint32_t period, uint64_t user, uint64_t raw_y);

    bool period_ready(uint64_t cycle, uint32_t period) const;
    std::optional<Bytes> user_evidence(uint64_t cycle, uint32_t period, uint64_t user) const;
    std::optional<Bytes> auditor_evidence(uint64_t cycle, uint32_t period) const;
    std::optional<BillStatement> bill(uint64_t cycle, uint64_t user) const;
    std::optional<std::pair<InclusionProof, RangeProof>> inclusion(uint64_t cycle,
                                                                   uint32_t period,
                                                                   uint64_t target) const;

private:
    struct PeriodState {
        std::map<uint64_t, uint64_t> raw;      // user -> raw reading
        std::vector<uint64_t> truncated;       // by user, once complete
        bool generated = false;
        bool peak = false;
        uint64_t claimed_x_star = 0;
        std::optional<BaselineEvidence> baseline;
        std::optional<MerkleEvidence> merkle;
    };

    void generate_locked(uint64_t cycle, uint32_t period, PeriodState& st);

    HarnessConfig cfg_;
    SystemParams params_;
    RetailerKey key_;
    std::shared_ptr<Board> board_;
    mutable std::mutex mutex_;
    std::map<std::pair<uint64_t, uint32_t>, PeriodState> periods_;
};

struct ScenarioResult {
    std::vector<bool> user_verdicts;     // accept / reject per user
    std::vector<bool> auditor_verdicts;  // audit outcome per auditor
    bool fraud_reported = false;         // any fraud-claiming entry on the board
    std::vector<BulletinEntry> board_entries;

    bool all_users_accept() const;
};

// Runs the whole scenario in one process against the configured board.
ScenarioResult run_inprocess_scenario(const HarnessConfig& cfg);

// Expected-detection oracle for a tamper scenario: which users must reject.
bool scenario_detected(const HarnessConfig& cfg, const ScenarioResult& result);

class RetailerServer {
public:
    RetailerServer(const HarnessConfig& cfg, std::shared_ptr<Board> board);
    ~RetailerServer();

    void start();
    void stop();
    uint16_t port() const;
    const RetailerCore& core() const { return core_; }

private:
    void serve_connection(int fd);

    RetailerCore core_;
    std::unique_ptr<TcpListener> listener_;
    std::thread accept_thread_;
    std::mutex conn_mutex_;
    std::vector<std::thread> conn_threads_;
    std::vector<int> conn_fds_;
    std::atomic<bool> running_{false};
};

struct ClientOutcome {
    bool accepted = false;
    int exit_code = 2;  // 0 accept, 1 reject, 2 protocol error, 3 board unreachable
    std::string detail;
};

// Full client session over TCP: submit readings, collect slot secrets and
// evidence, verify every period, fetch and check the bill.
ClientOutcome run_client_session(const HarnessConfig& cfg, uint64_t user, const std::string& host,
                                 uint16_t port, Board& board, Clock& clock);

// Auditor session over TCP: fetch the auditor view each period, audit, and
// publish the signed report. Returns one verdict per period-audit (true=OK).
std::vector<bool> run_auditor_session(const HarnessConfig& cfg, uint32_t auditor_index,
                                      const std::string& host, uint16_t port, Board& board);

}  // namespace pptp
