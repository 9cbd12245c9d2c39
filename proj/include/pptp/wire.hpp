#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "pptp/bytes.hpp"

namespace pptp {

/*
 * Simulation wire protocol, plaintext over loopback: 4-byte big-endian
 * payload length, 1-byte message type, payload. Channel security is out of
 * scope here; a real deployment would tunnel this.
 */

enum class MsgType : uint8_t {
    SubmitMeasurement = 1,
    SlotSecret = 2,
    EvidenceUser = 3,
    EvidenceAuditor = 4,
    Bill = 5,
    QueryInclusion = 6,
    InclusionResp = 7,
    Error = 8,
};

struct WireMessage {
    MsgType type;
    Bytes payload;
};

// Error payload: u32 code, u32-prefixed message.
enum class WireError : uint32_t {
    NotReady = 1,   // poll again later
    BadRequest = 2,
    Internal = 3,
};

constexpr size_t kMaxFrameBytes = 256ull << 20;

void write_frame(int fd, MsgType type, std::span<const uint8_t> payload);
// nullopt on orderly EOF; throws NetError on I/O failure or malformed frame.
std::optional<WireMessage> read_frame(int fd);

Bytes make_error_payload(WireError code, std::string_view message);
std::pair<WireError, std::string> parse_error_payload(std::span<const uint8_t> payload);

class TcpListener {
public:
    // port 0 binds an ephemeral port
    TcpListener(const std::string& host, uint16_t port);
    ~TcpListener();
    TcpListener(const TcpListener&) = delete;
    TcpListener& operator=(const TcpListener&) = delete;

    // -1 once closed
    int accept_client();
    void close_listener();
    uint16_t port() const { return port_; }

private:
    int fd_ = -1;
    uint16_t port_ = 0;
};

class TcpConn {
public:
    static TcpConn connect(const std::string& host, uint16_t port);
    explicit TcpConn(int fd) : fd_(fd) {}
    ~TcpConn();
    TcpConn(TcpConn&& o) noexcept : fd_(o.fd_) { o.fd_ = -1; }
    TcpConn& operator=(TcpConn&&) noexcept;
    TcpConn(const TcpConn&) = delete;
    TcpConn& operator=(const TcpConn&) = delete;

    int fd() const { return fd_; }
    // lockstep request/response
    WireMessage call(MsgType type, std::span<const uint8_t> payload);

private:
    int fd_ = -1;
};

}  // namespace pptp
