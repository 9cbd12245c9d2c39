#pragma once

#include <atomic>
#include <cstdint>

namespace pptp {

// Injectable time source so timeout behavior is testable without waiting.
class Clock {
public:
    virtual ~Clock() = default;
    virtual uint64_t now_ms() = 0;
    virtual void sleep_ms(uint64_t ms) = 0;
};

class SystemClock final : public Clock {
public:
    uint64_t now_ms() override;
    void sleep_ms(uint64_t ms) override;
};

// Manual clock: sleeping advances time instantly.
class FakeClock final : public Clock {
public:
    explicit FakeClock(uint64_t start_ms = 0) : now_(start_ms) {}
    uint64_t now_ms() override { return now_.load(); }
    void sleep_ms(uint64_t ms) override { now_ += ms; }
    void advance_ms(uint64_t ms) { now_ += ms; }

private:
    std::atomic<uint64_t> now_;
};

}  // namespace pptp
