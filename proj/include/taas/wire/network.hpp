#pragma once

#include <chrono>
#include <functional>
#include <memory>
#include <optional>
#include <string>

namespace taas::wire {

/// One frame observed in flight, for wire-capture tests and debugging.
struct TapEvent {
    std::string server_address; ///< listener address the stream belongs to
    bool client_to_server = true;
    std::string frame;
};

using Tap = std::function<void(const TapEvent&)>;

/// A bidirectional, ordered frame stream between one client and one server.
class Stream {
public:
    virtual ~Stream() = default;

    /// Returns false (and transmits nothing) once the stream is closed.
    virtual bool send(const std::string& frame) = 0;

    /// Blocks for the next frame. Drains frames queued before closure, then
    /// returns nullopt.
    virtual std::optional<std::string> recv() = 0;

    /// As recv(), but gives up after `timeout` and returns nullopt while the
    /// stream is still open (distinguish via is_closed()).
    virtual std::optional<std::string> recv_for(std::chrono::milliseconds timeout) = 0;

    /// Idempotent. Unblocks both ends.
    virtual void close() = 0;

    virtual bool is_closed() const = 0;

    /// Address of the listener this stream was dialed to / accepted from.
    virtual std::string server_address() const = 0;
};

class Listener {
public:
    virtual ~Listener() = default;

    /// Blocks for the next incoming stream; nullptr once closed.
    virtual std::unique_ptr<Stream> accept() = 0;

    virtual void close() = 0;

    /// The bound address (with the actual port for tcp:host:0 binds).
    virtual std::string address() const = 0;
};

/// Transport factory addressed by locator strings. Locator syntax:
///   mem:<name>        in-process channel
///   tcp:<host>:<port> stream socket
class Network {
public:
    virtual ~Network() = default;

    /// Throws AddressInUse or ConfigError.
    virtual std::unique_ptr<Listener> listen(const std::string& address) = 0;

    /// Throws Unreachable or ConfigError.
    virtual std::unique_ptr<Stream> dial(const std::string& address) = 0;

    /// Number of currently open connections (dialed streams not yet closed).
    virtual std::size_t open_connection_count() const = 0;

    virtual void set_tap(Tap tap) = 0;
};

/// Dispatches to a transport by locator scheme.
class Router final : public Network {
public:
    void add_scheme(std::string scheme, std::shared_ptr<Network> net);

    std::unique_ptr<Listener> listen(const std::string& address) override;
    std::unique_ptr<Stream> dial(const std::string& address) override;
    std::size_t open_connection_count() const override;
    void set_tap(Tap tap) override;

private:
    Network& resolve(const std::string& address) const;

    std::vector<std::pair<std::string, std::shared_ptr<Network>>> schemes_;
};

std::shared_ptr<Network> make_mem_network();
std::shared_ptr<Network> make_tcp_network();

/// mem: plus tcp: behind one router, the default fabric for mixed use.
std::shared_ptr<Network> make_default_network();

} // namespace taas::wire
