#pragma once

#include <chrono>
#include <memory>
#include <string>

#include "taas/json.hpp"
#include "taas/wire/envelope.hpp"
#include "taas/wire/manifest.hpp"
#include "taas/wire/network.hpp"

namespace taas::wire {

struct ConnectOptions {
    std::string client_name = "taas-client";
    /// Wall-clock guard on each call; the virtual clock never blocks, so this
    /// only trips on a genuinely wedged peer.
    std::chrono::milliseconds call_timeout{10000};
};

class ConnectionImpl;

/// A client connection with request/response correlation. Safe to call from
/// several threads at once; each caller gets the response matching its
/// request id.
class Connection {
public:
    Connection() = default;
    ~Connection();
    Connection(Connection&&) noexcept;
    Connection& operator=(Connection&&) noexcept;
    Connection(const Connection&) = delete;
    Connection& operator=(const Connection&) = delete;

    /// Dials, runs the initialize exchange, and starts the reader.
    /// Throws Unreachable or RpcError (initialize rejected).
    static Connection connect(Network& net, const std::string& address,
                              ConnectOptions options = {});

    /// Raw request/response. Throws ConnectionClosed, RpcTimeout, RpcError.
    Json call(const std::string& method, const Json& params);

    ToolManifest list_tools();

    /// Invokes a tool and unwraps its result. Unknown tools surface as
    /// RpcError with code() == kMethodNotFound; tool failures as ToolError.
    Json call_tool(const std::string& name, const Json& args);

    /// Idempotent; in-flight calls complete with ConnectionClosed.
    void close();

    bool is_open() const;

    std::string address() const;

private:
    explicit Connection(std::shared_ptr<ConnectionImpl> impl);

    std::shared_ptr<ConnectionImpl> impl_;
};

} // namespace taas::wire
