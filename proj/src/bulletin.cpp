#include "pptp/bulletin.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <sys/stat.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <fstream>

namespace pptp {

namespace {

bool valid_kind(uint8_t k) {
    return k >= static_cast<uint8_t>(EntryKind::Digest) &&
           k <= static_cast<uint8_t>(EntryKind::Schedule);
}

// Validates kind/signature policy and dedup against existing entries, then
// links and hashes the new entry.
BulletinEntry seal_entry(std::span<const BulletinEntry> existing, EntryKind kind, uint64_t cycle,
                         uint64_t period, Bytes payload, Bytes signature) {
    if (kind_requires_signature(kind)) {
        if (payload.size() < 32) throw BoardError("signed payload must embed a verify key");
        VerifyKey vk;
        std::copy_n(payload.begin(), 32, vk.bytes.begin());
        if (!verify_sig(vk, payload, signature)) throw BoardError("invalid signature");
        for (const auto& e : existing) {
            if (e.kind != kind || e.cycle != cycle || e.period != period) continue;
            if (e.payload.size() >= 32 && std::equal(vk.bytes.begin(), vk.bytes.end(),
                                                     e.payload.begin())) {
                throw BoardError("duplicate report for this signer and period");
            }
        }
    } else if (!signature.empty()) {
        throw BoardError("unexpected signature for unsigned kind");
    }

    BulletinEntry e;
    e.index = existing.size();
    e.kind = kind;
    e.cycle = cycle;
    e.period = period;
    e.payload = std::move(payload);
    e.signature = std::move(signature);
    e.prev_hash = existing.empty() ? Hash32{} : existing.back().entry_hash;
    e.entry_hash = compute_entry_hash(e);
    return e;
}

std::vector<BulletinEntry> filter_kind(const std::vector<BulletinEntry>& entries, uint64_t cycle,
                                       uint64_t period, EntryKind kind) {
    std::vector<BulletinEntry> out;
    for (const auto& e : entries) {
        if (e.kind == kind && e.cycle == cycle && e.period == period) out.push_back(e);
    }
    return out;
}

std::vector<BulletinEntry> slice_range(const std::vector<BulletinEntry>& entries, uint64_t from,
                                       uint64_t to) {
    std::vector<BulletinEntry> out;
    for (uint64_t i = from; i < to && i < entries.size(); i++) out.push_back(entries[i]);
    return out;
}

}  // namespace

bool kind_requires_signature(EntryKind kind) {
    switch (kind) {
        case EntryKind::Report:
        case EntryKind::Fraud:
        case EntryKind::Unavailable:
            return true;
        default:
            return false;
    }
}

Hash32 compute_entry_hash(const BulletinEntry& e) {
    Bytes b;
    put_u64(b, e.index);
    put_u8(b, static_cast<uint8_t>(e.kind));
    put_u64(b, e.cycle);
    put_u64(b, e.period);
    put_raw(b, e.payload);
    put_raw(b, e.prev_hash);
    return hash_bytes(b);
}

Bytes BulletinEntry::to_bytes() const {
    Bytes b;
    put_u64(b, index);
    put_u8(b, static_cast<uint8_t>(kind));
    put_u64(b, cycle);
    put_u64(b, period);
    put_var(b, payload);
    put_var(b, signature);
    put_raw(b, prev_hash);
    put_raw(b, entry_hash);
    return b;
}

BulletinEntry BulletinEntry::from_bytes(std::span<const uint8_t> data) {
    ByteReader r(data);
    BulletinEntry e;
    e.index = r.u64();
    uint8_t kind = r.u8();
    if (!valid_kind(kind)) throw ParseError("unknown entry kind");
    e.kind = static_cast<EntryKind>(kind);
    e.cycle = r.u64();
    e.period = r.u64();
    e.payload = r.var();
    e.signature = r.var();
    e.prev_hash = r.arr<32>();
    e.entry_hash = r.arr<32>();
    r.expect_end();
    return e;
}

bool verify_chain(std::span<const BulletinEntry> entries) {
    Hash32 prev{};
    for (size_t i = 0; i < entries.size(); i++) {
        const BulletinEntry& e = entries[i];
        if (e.index != i) return false;
        if (e.prev_hash != prev) return false;
        if (compute_entry_hash(e) != e.entry_hash) return false;
        if (kind_requires_signature(e.kind)) {
            if (e.payload.size() < 32) return false;
            VerifyKey vk;
            std::copy_n(e.payload.begin(), 32, vk.bytes.begin());
            if (!verify_sig(vk, e.payload, e.signature)) return false;
        } else if (!e.signature.empty()) {
            return false;
        }
        prev = e.entry_hash;
    }
    return true;
}

uint64_t MemoryBoard::append(EntryKind kind, uint64_t cycle, uint64_t period, Bytes payload,
                             Bytes signature) {
    std::lock_guard lock(mutex_);
    entries_.push_back(
        seal_entry(entries_, kind, cycle, period, std::move(payload), std::move(signature)));
    return entries_.back().index;
}

std::vector<BulletinEntry> MemoryBoard::read_range(uint64_t from, uint64_t to) const {
    std::lock_guard lock(mutex_);
    return slice_range(entries_, from, to);
}

std::vector<BulletinEntry> MemoryBoard::read_kind(uint64_t cycle, uint64_t period,
                                                  EntryKind kind) const {
    std::lock_guard lock(mutex_);
    return filter_kind(entries_, cycle, period, kind);
}

uint64_t MemoryBoard::size() const {
    std::lock_guard lock(mutex_);
    return entries_.size();
}

std::vector<BulletinEntry> MemoryBoard::all() const {
    std::lock_guard lock(mutex_);
    return entries_;
}

FileBoard::FileBoard(const std::string& path) : path_(path) {
    fd_ = ::open(path.c_str(), O_RDWR | O_CREAT, 0644);
    if (fd_ < 0) throw BoardError("cannot open board file: " + path);
    struct stat st{};
    if (fstat(fd_, &st) != 0) throw BoardError("cannot stat board file");
    if (st.st_size == 0) {
        if (::write(fd_, kMagic, sizeof(kMagic)) != sizeof(kMagic)) {
            throw BoardError("cannot initialize board file");
        }
    }
    std::lock_guard lock(mutex_);
    scanned_offset_ = 0;
    refresh_locked();
}

FileBoard::~FileBoard() {
    if (fd_ >= 0) ::close(fd_);
}

// Re-reads anything beyond the scanned offset; callers hold mutex_.
void FileBoard::refresh_locked() const {
    struct stat st{};
    if (fstat(fd_, &st) != 0) throw BoardError("cannot stat board file");
    uint64_t file_size = static_cast<uint64_t>(st.st_size);
    if (scanned_offset_ == 0) {
        char magic[sizeof(kMagic)];
        if (pread(fd_, magic, sizeof(magic), 0) != static_cast<ssize_t>(sizeof(magic)) ||
            std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
            throw BoardError("bad board file magic");
        }
        scanned_offset_ = sizeof(kMagic);
    }
    while (scanned_offset_ + 4 <= file_size) {
        uint8_t len_raw[4];
        if (pread(fd_, len_raw, 4, static_cast<off_t>(scanned_offset_)) != 4) {
            throw BoardError("short read on board file");
        }
        uint32_t len = (uint32_t(len_raw[0]) << 24) | (uint32_t(len_raw[1]) << 16) |
                       (uint32_t(len_raw[2]) << 8) | uint32_t(len_raw[3]);
        if (scanned_offset_ + 4 + len > file_size) break;  // partial tail write in flight
        Bytes buf(len);
        if (pread(fd_, buf.data(), len, static_cast<off_t>(scanned_offset_ + 4)) !=
            static_cast<ssize_t>(len)) {
            throw BoardError("short read on board file");
        }
        BulletinEntry e = BulletinEntry::from_bytes(buf);
        Hash32 expect_prev = cache_.empty() ? Hash32{} : cache_.back().entry_hash;
        if (e.index != cache_.size() || e.prev_hash != expect_prev ||
            compute_entry_hash(e) != e.entry_hash) {
            throw BoardError("board file chain corruption detected");
        }
        cache_.push_back(std::move(e));
        scanned_offset_ += 4 + len;
    }
}

uint64_t FileBoard::append(EntryKind kind, uint64_t cycle, uint64_t period, Bytes payload,
                           Bytes signature) {
    std::lock_guard lock(mutex_);
    if (flock(fd_, LOCK_EX) != 0) throw BoardError("cannot lock board file");
    try {
        refresh_locked();
        BulletinEntry e =
            seal_entry(cache_, kind, cycle, period, std::move(payload), std::move(signature));
        Bytes rec;
        Bytes body = e.to_bytes();
        put_u32(rec, static_cast<uint32_t>(body.size()));
        put_raw(rec, body);
        if (lseek(fd_, 0, SEEK_END) < 0 ||
            ::write(fd_, rec.data(), rec.size()) != static_cast<ssize_t>(rec.size())) {
            throw BoardError("board file write failed");
        }
        scanned_offset_ += rec.size();
        cache_.push_back(std::move(e));
        flock(fd_, LOCK_UN);
        return cache_.back().index;
    } catch (...) {
        flock(fd_, LOCK_UN);
        throw;
    }
}

std::vector<BulletinEntry> FileBoard::read_range(uint64_t from, uint64_t to) const {
    std::lock_guard lock(mutex_);
    refresh_locked();
    return slice_range(cache_, from, to);
}

std::vector<BulletinEntry> FileBoard::read_kind(uint64_t cycle, uint64_t period,
                                                EntryKind kind) const {
    std::lock_guard lock(mutex_);
    refresh_locked();
    return filter_kind(cache_, cycle, period, kind);
}

uint64_t FileBoard::size() const {
    std::lock_guard lock(mutex_);
    refresh_locked();
    return cache_.size();
}

BoardFileCheck check_board_file(const std::string& path) {
    BoardFileCheck result;
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        result.error = "cannot open file";
        return result;
    }
    Bytes data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (data.size() < sizeof(FileBoard::kMagic) ||
        std::memcmp(data.data(), FileBoard::kMagic, sizeof(FileBoard::kMagic)) != 0) {
        result.error = "bad magic";
        return result;
    }
    size_t off = sizeof(FileBoard::kMagic);
    try {
        while (off < data.size()) {
            if (off + 4 > data.size()) throw ParseError("truncated length prefix");
            uint32_t len = (uint32_t(data[off]) << 24) | (uint32_t(data[off + 1]) << 16) |
                           (uint32_t(data[off + 2]) << 8) | uint32_t(data[off + 3]);
            off += 4;
            if (off + len > data.size()) throw ParseError("truncated entry");
            result.entries.push_back(
                BulletinEntry::from_bytes(std::span(data).subspan(off, len)));
            off += len;
        }
    } catch (const ParseError& e) {
        result.error = e.what();
        return result;
    }
    if (!verify_chain(result.entries)) {
        result.error = "hash chain or signature verification failed";
        return result;
    }
    result.ok = true;
    return result;
}

}  // namespace pptp
