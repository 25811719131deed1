#pragma once

#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "taas/events.hpp"
#include "taas/nlu/parser.hpp"
#include "taas/registry/history_store.hpp"
#include "taas/registry/registry.hpp"
#include "taas/trust/report.hpp"
#include "taas/util/clock.hpp"
#include "taas/wire/connection.hpp"
#include "taas/wire/server.hpp"

namespace taas::svc {

struct MonitorPolicy {
    double report_interval_s = 1.0;
    double min_speed_fraction = 0.5; ///< of the declared speed
    double min_accuracy = 0.95;

    void validate() const;
    Json to_json() const;
    static MonitorPolicy from_json(const Json& j);
};

struct ServiceConfig {
    MonitorPolicy monitor;
    /// Wall-clock guard for per-device resource queries during fan-out.
    int fanout_timeout_ms = 2000;

    static ServiceConfig from_json(const Json& j);
    static ServiceConfig load(const std::filesystem::path& path);
};

/// How the service reaches back into devices for termination and resource
/// release. These are control-plane callbacks wired by the host process;
/// the devices' wire surface stays the three baseline tools.
struct MonitorHooks {
    std::function<void(const std::string& device_id, const std::string& task_id)>
        terminate;
    std::function<void(const std::string& device_id, const std::string& task_id)>
        release;
};

enum class EvalStage { Interpreted, HistoryDone, ResourcesDone, Reported };

/// Recorded pipeline trace of one evaluate_trust run: the candidate set can
/// only shrink stage over stage.
struct EvaluationTrace {
    std::string request_id;
    nlu::TaskRequirements requirements;
    std::vector<std::string> candidates;
    std::vector<std::string> history_survivors;
    std::vector<std::string> reported;
    std::vector<EvalStage> stages;
};

struct MonitorEvent {
    double t = 0;
    std::string task_id;
    std::string device_id;
    std::string subtask_id;
    std::string verdict; ///< ok | degraded | completed | unreachable
    double measured_speed_mbps = 0; ///< instantaneous share speed
    double mean_speed_mbps = 0;     ///< over the subtask's busy interval
    std::optional<double> running_accuracy;
    double processed_mb = 0;
    double assigned_mb = 0;
    std::optional<double> finished_at_s;
};

struct MonitoredCollaborator {
    std::string device_id;
    std::string agent_address;
    std::string subtask_id;
    std::optional<double> declared_speed_mbps; ///< calibrated on first sample when absent
    double assigned_mb = 0;
};

/// The central server-side agent. Serves exactly one tool, evaluate_trust,
/// runs the need-driven evaluation pipeline against the registry/history
/// state, monitors executions, and writes performance records back.
class TrustService {
public:
    TrustService(registry::Registry& registry, registry::HistoryStore& history,
                 trust::TrustGates gates, nlu::KeywordMap keywords,
                 wire::Network& net, const util::Clock& clock,
                 ServiceConfig config = {}, MonitorHooks hooks = {},
                 EventSink events = nullptr);

    /// Starts the trust service MCP server.
    void start(const std::string& address);
    void stop();
    std::string address() const;

    /// The evaluate_trust pipeline (also the wire tool's implementation):
    /// parse -> candidates by task type -> per-candidate history gate ->
    /// resource fan-out to survivors -> assessments -> semantic report.
    /// Devices that fail the historical gate are never contacted; resource
    /// queries name only the required dimensions. All evaluation
    /// connections are closed before returning.
    trust::TrustReport evaluate(const nlu::TaskDescription& desc);

    // Execution monitoring.

    void begin_monitoring(const std::string& task_id, const std::string& task_type,
                          std::vector<MonitoredCollaborator> collaborators,
                          std::optional<MonitorPolicy> policy = std::nullopt);

    void extend_monitoring(const std::string& task_id,
                           std::vector<MonitoredCollaborator> collaborators);

    /// Samples every due collaborator via report_performance, judges
    /// degradation, terminates degraded collaborators, and appends one
    /// performance record per finished subtask.
    std::vector<MonitorEvent> poll_monitors(double now_s);

    /// Closes the task's monitoring connections and releases collaborator
    /// reservations. Idempotent.
    void reclaim(const std::string& task_id);

    bool task_active(const std::string& task_id) const;

    const std::vector<EvaluationTrace>& evaluation_traces() const {
        return eval_traces_;
    }

    std::size_t open_monitor_connections() const;

private:
    struct MonitoredEntry {
        MonitoredCollaborator info;
        std::optional<wire::Connection> conn;
        bool finished = false;
        bool recorded = false;
    };

    struct MonitoredTask {
        std::string task_type;
        MonitorPolicy policy;
        double next_due_s = 0;
        std::vector<MonitoredEntry> entries;
    };

    std::string resource_query(const nlu::TaskRequirements& req) const;
    std::optional<trust::ResourceSnapshot> fetch_snapshot(
        const registry::DeviceRecord& device, const nlu::TaskRequirements& req,
        double now_s);
    void emit(Json event);
    MonitorEvent sample_entry(const std::string& task_id, MonitoredTask& task,
                              MonitoredEntry& entry, double now_s);
    void record_outcome(const std::string& task_id, const MonitoredTask& task,
                        MonitoredEntry& entry, const MonitorEvent& ev,
                        registry::Outcome outcome);

    registry::Registry& registry_;
    registry::HistoryStore& history_;
    trust::TrustGates gates_;
    nlu::KeywordMap keywords_;
    wire::Network& net_;
    const util::Clock& clock_;
    ServiceConfig config_;
    MonitorHooks hooks_;
    EventSink events_;

    std::optional<wire::ServerHandle> server_;
    mutable std::mutex m_;
    std::map<std::string, MonitoredTask> monitored_;
    std::vector<EvaluationTrace> eval_traces_;
    int next_request_ = 1;
};

} // namespace taas::svc
