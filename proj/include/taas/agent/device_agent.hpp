#pragma once

#include <mutex>
#include <optional>
#include <string>

#include "taas/agent/executor.hpp"
#include "taas/util/clock.hpp"
#include "taas/wire/network.hpp"
#include "taas/wire/server.hpp"

namespace taas::agent {

/// The per-device autonomous agent. Exposes the three baseline tools
/// (report_resource, receive_task, report_performance) through its agent
/// server and can extend that set at runtime. Execution is simulated in
/// virtual time read from the injected clock, so the same agent runs under
/// the simulator's clock or a wall clock unchanged.
///
/// Termination and resource reclamation are driven through the local
/// control-plane methods; they are deliberately not wire tools.
class DeviceAgent {
public:
    DeviceAgent(DeviceProfile profile, const util::Clock& clock);

    /// Starts the agent MCP server at `address`.
    void serve(wire::Network& net, const std::string& address);
    void stop();
    std::string address() const;

    /// Registers an extra tool on the live agent server.
    void extend_capability(wire::ToolSpec spec, wire::ToolHandler handler);

    // Tool implementations (exposed over the wire, callable directly in tests).

    /// Need-driven resource report: the reply carries cpu_ghz only when the
    /// query mentions CPU, available_storage_gb only when it mentions
    /// storage.
    Json report_resource(const std::string& query);

    /// Accepts when free storage covers the subtask; accepted work starts
    /// executing immediately at the fair-share rate.
    Json receive_task(const SubtaskAssignment& assignment);

    Json report_performance();

    // Local control plane.

    void terminate_task(const std::string& task_id);

    /// Releases the storage reservation of a finished (completed or
    /// terminated) task. Idempotent.
    void release_task(const std::string& task_id);

    // Introspection.

    double available_storage_gb() const;
    double reserved_mb() const;
    ExecState device_state() const;
    const DeviceProfile& profile() const { return profile_; }

private:
    Json snapshot_locked(double now);

    DeviceProfile profile_;
    const util::Clock& clock_;
    mutable std::mutex m_;
    Executor executor_;
    std::map<std::string, double> reserved_by_task_;
    std::optional<wire::ServerHandle> server_;
};

} // namespace taas::agent
