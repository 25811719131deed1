#pragma once

#include <atomic>
#include <chrono>

namespace taas::util {

/// Time source, in seconds since an arbitrary epoch.
class Clock {
public:
    virtual ~Clock() = default;
    virtual double now_s() const = 0;
};

/// Externally driven clock. The simulation advances it explicitly, so every
/// component that reads time sees the same deterministic instant.
class VirtualClock final : public Clock {
public:
    explicit VirtualClock(double start_s = 0.0) : t_(start_s) {}

    double now_s() const override { return t_.load(std::memory_order_acquire); }

    void set(double t_s) { t_.store(t_s, std::memory_order_release); }

    void advance(double dt_s) {
        t_.store(now_s() + dt_s, std::memory_order_release);
    }

private:
    std::atomic<double> t_;
};

/// Real time, for running agents against the socket transport.
class WallClock final : public Clock {
public:
    WallClock() : start_(std::chrono::steady_clock::now()) {}

    double now_s() const override {
        const auto dt = std::chrono::steady_clock::now() - start_;
        return std::chrono::duration<double>(dt).count();
    }

private:
    std::chrono::steady_clock::time_point start_;
};

} // namespace taas::util
