#pragma once

#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "pptp/bytes.hpp"
#include "pptp/crypto.hpp"

namespace pptp {

/*
 * Append-only tamper-evident public board. Entries are hash-chained; report
 * kinds must carry a signature by the key embedded in the first 32 payload
 * bytes, and at most one report per (signer, cycle, period, kind) is
 * accepted. The board checks chain integrity and signatures only; protocol
 * semantics (who is an authorized auditor, what a fraud proof means) live
 * with the verifiers.
 */

enum class EntryKind : uint8_t {
    Digest = 1,       // hash of a period's evidence
    Root = 2,         // root commitment of a period's tree
    Report = 3,       // signed auditor verdict
    Fraud = 4,        // signed fraud proof from a spot check
    Unavailable = 5,  // signed unavailability complaint
    Schedule = 6,     // published tariff for a cycle
};

bool kind_requires_signature(EntryKind kind);

struct BulletinEntry {
    uint64_t index = 0;
    EntryKind kind = EntryKind::Digest;
    uint64_t cycle = 0;
    uint64_t period = 0;
    Bytes payload;
    Bytes signature;  // empty for unsigned kinds
    Hash32 prev_hash{};
    Hash32 entry_hash{};

    Bytes to_bytes() const;
    static BulletinEntry from_bytes(std::span<const uint8_t> data);  // throws ParseError
    bool operator==(const BulletinEntry&) const = default;
};

// hash(index || kind || cycle || period || payload || prev_hash)
Hash32 compute_entry_hash(const BulletinEntry& e);

// Recomputes every hash, link, index and required signature.
bool verify_chain(std::span<const BulletinEntry> entries);

class Board {
public:
    virtual ~Board() = default;

    // Returns the assigned index; throws BoardError on a bad signature,
    // duplicate report, or malformed payload.
    virtual uint64_t append(EntryKind kind, uint64_t cycle, uint64_t period, Bytes payload,
                            Bytes signature = {}) = 0;
    // Entries with index in [from, to).
    virtual std::vector<BulletinEntry> read_range(uint64_t from, uint64_t to) const = 0;
    virtual std::vector<BulletinEntry> read_kind(uint64_t cycle, uint64_t period,
                                                 EntryKind kind) const = 0;
    virtual uint64_t size() const = 0;
};

class MemoryBoard final : public Board {
public:
    uint64_t append(EntryKind kind, uint64_t cycle, uint64_t period, Bytes payload,
                    Bytes signature = {}) override;
    std::vector<BulletinEntry> read_range(uint64_t from, uint64_t to) const override;
    std::vector<BulletinEntry> read_kind(uint64_t cycle, uint64_t period,
                                         EntryKind kind) const override;
    uint64_t size() const override;

    std::vector<BulletinEntry> all() const;

private:
    mutable std::mutex mutex_;
    std::vector<BulletinEntry> entries_;
};

// Single-file log: 8-byte magic, then length-prefixed canonical entries.
// Appends are serialized per process by a mutex and across processes by an
// exclusive file lock; readers pick up entries appended by other processes.
class FileBoard final : public Board {
public:
    explicit FileBoard(const std::string& path);
    ~FileBoard() override;

    uint64_t append(EntryKind kind, uint64_t cycle, uint64_t period, Bytes payload,
                    Bytes signature = {}) override;
    std::vector<BulletinEntry> read_range(uint64_t from, uint64_t to) const override;
    std::vector<BulletinEntry> read_kind(uint64_t cycle, uint64_t period,
                                         EntryKind kind) const override;
    uint64_t size() const override;

    static constexpr char kMagic[8] = {'P', 'P', 'T', 'P', 'B', 'R', 'D', '1'};

private:
    void refresh_locked() const;

    std::string path_;
    int fd_ = -1;
    mutable std::mutex mutex_;
    mutable std::vector<BulletinEntry> cache_;
    mutable uint64_t scanned_offset_ = 0;
};

// Parses a board file; returns entries or an error message. Used by the
// `board verify` command and the mutation tests.
struct BoardFileCheck {
    bool ok = false;
    std::string error;
    std::vector<BulletinEntry> entries;
};
BoardFileCheck check_board_file(const std::string& path);

}  // namespace pptp
