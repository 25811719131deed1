#pragma once

#include <functional>
#include <map>
#include <memory>
#include <string>

#include "taas/json.hpp"
#include "taas/wire/manifest.hpp"
#include "taas/wire/network.hpp"

namespace taas::wire {

/// Executes one tool call. Runs on a server dispatch thread; a thrown
/// exception becomes a tool-level error payload for the caller.
using ToolHandler = std::function<Json(const Json& args)>;

using HandlerMap = std::map<std::string, ToolHandler>;

struct ServerOptions {
    /// Test hook: refuse initialize exchanges (connects fail cleanly).
    bool accept_initialize = true;
};

class ServerImpl;

/// A running MCP-style server. The manifest reported by tools/list is always
/// generated from the registered handlers, including tools added after
/// startup.
class ServerHandle {
public:
    ServerHandle() = default;
    ~ServerHandle();
    ServerHandle(ServerHandle&&) noexcept;
    ServerHandle& operator=(ServerHandle&&) noexcept;
    ServerHandle(const ServerHandle&) = delete;
    ServerHandle& operator=(const ServerHandle&) = delete;

    /// Registers an additional tool on the live server. Throws ToolCollision
    /// if the name is taken.
    void add_tool(ToolSpec spec, ToolHandler handler);

    ToolManifest manifest() const;

    std::string address() const;

    /// Stops accepting, closes every live connection, joins workers.
    /// Idempotent.
    void shutdown();

    bool running() const;

private:
    friend ServerHandle serve(Network&, const std::string&, ToolManifest,
                              HandlerMap, ServerOptions);
    explicit ServerHandle(std::shared_ptr<ServerImpl> impl);

    std::shared_ptr<ServerImpl> impl_;
};

/// Binds `address` and serves the given tools. Every manifest entry must
/// have a handler and vice versa (ManifestMismatch otherwise); the bound
/// address must be free (AddressInUse otherwise).
ServerHandle serve(Network& net, const std::string& address,
                   ToolManifest manifest, HandlerMap handlers,
                   ServerOptions options = {});

} // namespace taas::wire
