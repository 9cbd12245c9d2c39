#include "pptp/wire.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <sys/socket.h>
#include <unistd.h>

#include <csignal>
#include <cstring>

#include "pptp/errors.hpp"

namespace pptp {

namespace {

struct IgnoreSigpipe {
    IgnoreSigpipe() { std::signal(SIGPIPE, SIG_IGN); }
};
const IgnoreSigpipe ignore_sigpipe;

void write_all(int fd, const uint8_t* data, size_t len) {
    while (len > 0) {
        ssize_t sent = ::send(fd, data, len, MSG_NOSIGNAL);
        if (sent <= 0) throw NetError("socket write failed");
        data += sent;
        len -= static_cast<size_t>(sent);
    }
}

// false on clean EOF at a frame boundary
bool read_all(int fd, uint8_t* data, size_t len, bool allow_eof) {
    size_t got = 0;
    while (got < len) {
        ssize_t r = ::recv(fd, data + got, len - got, 0);
        if (r == 0) {
            if (allow_eof && got == 0) return false;
            throw NetError("unexpected connection close");
        }
        if (r < 0) throw NetError("socket read failed");
        got += static_cast<size_t>(r);
    }
    return true;
}

sockaddr_in make_addr(const std::string& host, uint16_t port) {
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(port);
    if (inet_pton(AF_INET, host.c_str(), &addr.sin_addr) != 1) {
        throw NetError("invalid IPv4 address: " + host);
    }
    return addr;
}

}  // namespace

void write_frame(int fd, MsgType type, std::span<const uint8_t> payload) {
    if (payload.size() > kMaxFrameBytes) throw NetError("frame too large");
    uint8_t header[5];
    uint32_t len = static_cast<uint32_t>(payload.size());
    header[0] = static_cast<uint8_t>(len >> 24);
    header[1] = static_cast<uint8_t>(len >> 16);
    header[2] = static_cast<uint8_t>(len >> 8);
    header[3] = static_cast<uint8_t>(len);
    header[4] = static_cast<uint8_t>(type);
    write_all(fd, header, sizeof(header));
    if (!payload.empty()) write_all(fd, payload.data(), payload.size());
}

std::optional<WireMessage> read_frame(int fd) {
    uint8_t header[5];
    if (!read_all(fd, header, sizeof(header), true)) return std::nullopt;
    uint32_t len = (uint32_t(header[0]) << 24) | (uint32_t(header[1]) << 16) |
                   (uint32_t(header[2]) << 8) | uint32_t(header[3]);
    if (len > kMaxFrameBytes) throw NetError("oversized frame");
    uint8_t type = header[4];
    if (type < 1 || type > 8) throw NetError("unknown message type");
    WireMessage msg;
    msg.type = static_cast<MsgType>(type);
    msg.payload.resize(len);
    if (len > 0) read_all(fd, msg.payload.data(), len, false);
    return msg;
}

Bytes make_error_payload(WireError code, std::string_view message) {
    Bytes b;
    put_u32(b, static_cast<uint32_t>(code));
    put_var(b, {reinterpret_cast<const uint8_t*>(message.data()), message.size()});
    return b;
}

std::pair<WireError, std::string> parse_error_payload(std::span<const uint8_t> payload) {
    ByteReader r(payload);
    auto code = static_cast<WireError>(r.u32());
    Bytes msg = r.var();
    return {code, std::string(msg.begin(), msg.end())};
}

TcpListener::TcpListener(const std::string& host, uint16_t port) {
    fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
    if (fd_ < 0) throw NetError("cannot create socket");
    int one = 1;
    setsockopt(fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
    sockaddr_in addr = make_addr(host, port);
    if (bind(fd_, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0) {
        ::close(fd_);
        throw NetError("cannot bind " + host + ":" + std::to_string(port));
    }
    if (listen(fd_, 64) != 0) {
        ::close(fd_);
        throw NetError("cannot listen");
    }
    socklen_t len = sizeof(addr);
    getsockname(fd_, reinterpret_cast<sockaddr*>(&addr), &len);
    port_ = ntohs(addr.sin_port);
}

TcpListener::~TcpListener() { close_listener(); }

int TcpListener::accept_client() {
    if (fd_ < 0) return -1;
    int client = ::accept(fd_, nullptr, nullptr);
    if (client >= 0) {
        int one = 1;
        setsockopt(client, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
    }
    return client;
}

void TcpListener::close_listener() {
    if (fd_ >= 0) {
        ::shutdown(fd_, SHUT_RDWR);
        ::close(fd_);
        fd_ = -1;
    }
}

TcpConn TcpConn::connect(const std::string& host, uint16_t port) {
    int fd = ::socket(AF_INET, SOCK_STREAM, 0);
    if (fd < 0) throw NetError("cannot create socket");
    sockaddr_in addr = make_addr(host, port);
    if (::connect(fd, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0) {
        ::close(fd);
        throw NetError("cannot connect to " + host + ":" + std::to_string(port));
    }
    int one = 1;
    setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
    return TcpConn(fd);
}

TcpConn::~TcpConn() {
    if (fd_ >= 0) ::close(fd_);
}

TcpConn& TcpConn::operator=(TcpConn&& o) noexcept {
    if (this != &o) {
        if (fd_ >= 0) ::close(fd_);
        fd_ = o.fd_;
        o.fd_ = -1;
    }
    return *this;
}

WireMessage TcpConn::call(MsgType type, std::span<const uint8_t> payload) {
    write_frame(fd_, type, payload);
    auto reply = read_frame(fd_);
    if (!reply) throw NetError("server closed the connection");
    return *reply;
}

}  // namespace pptp
