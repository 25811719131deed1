#include "taas/agent/device_agent.hpp"

#include <algorithm>
#include <cctype>

#include "taas/util/errors.hpp"

namespace taas::agent {

namespace {

bool mentions(const std::string& query, const std::string& word) {
    auto lower = [](std::string s) {
        std::transform(s.begin(), s.end(), s.begin(),
                       [](unsigned char c) { return std::tolower(c); });
        return s;
    };
    return lower(query).find(lower(word)) != std::string::npos;
}

} // namespace

DeviceAgent::DeviceAgent(DeviceProfile profile, const util::Clock& clock)
    : profile_(profile), clock_(clock), executor_(std::move(profile)) {}

void DeviceAgent::serve(wire::Network& net, const std::string& address) {
    wire::ToolManifest manifest{
        profile_.device_id,
        {wire::ToolSpec{"report_resource",
                        "Report the device's current resource state",
                        Json{{"type", "object"},
                             {"properties",
                              Json{{"query", Json{{"type", "string"}}}}}}},
         wire::ToolSpec{"receive_task",
                        "Accept a subtask assignment for execution",
                        Json{{"type", "object"},
                             {"properties",
                              Json{{"task_id", Json{{"type", "string"}}},
                                   {"subtask_id", Json{{"type", "string"}}},
                                   {"task_type", Json{{"type", "string"}}},
                                   {"data_size_mb", Json{{"type", "number"}}},
                                   {"required_accuracy", Json{{"type", "number"}}}}}}},
         wire::ToolSpec{"report_performance",
                        "Report execution progress and quality",
                        Json{{"type", "object"}}}}};

    wire::HandlerMap handlers{
        {"report_resource",
         [this](const Json& args) {
             return report_resource(args.value("query", std::string{}));
         }},
        {"receive_task",
         [this](const Json& args) {
             return receive_task(SubtaskAssignment::from_json(args));
         }},
        {"report_performance", [this](const Json&) { return report_performance(); }},
    };

    server_.emplace(wire::serve(net, address, std::move(manifest), std::move(handlers)));
}

void DeviceAgent::stop() {
    if (server_) server_->shutdown();
}

std::string DeviceAgent::address() const {
    return server_ ? server_->address() : "";
}

void DeviceAgent::extend_capability(wire::ToolSpec spec, wire::ToolHandler handler) {
    if (!server_) throw Error("agent is not serving");
    server_->add_tool(std::move(spec), std::move(handler));
}

Json DeviceAgent::report_resource(const std::string& query) {
    std::lock_guard lk(m_);
    executor_.advance_to(clock_.now_s());
    const bool want_cpu = query.empty() || mentions(query, "cpu");
    const bool want_storage = query.empty() || mentions(query, "storage");
    Json out{{"device_id", profile_.device_id}};
    if (want_cpu) out["cpu_ghz"] = profile_.cpu_ghz;
    if (want_storage) {
        double reserved = 0;
        for (const auto& [task, mb] : reserved_by_task_) reserved += mb;
        out["available_storage_gb"] = profile_.total_storage_gb - reserved / 1024.0;
    }
    return out;
}

Json DeviceAgent::receive_task(const SubtaskAssignment& assignment) {
    if (assignment.data_size_mb <= 0) {
        throw ToolError("data_size_mb must be > 0");
    }
    if (!profile_.task_types.count(assignment.task_type)) {
        return Json{{"accepted", false},
                    {"device_id", profile_.device_id},
                    {"reason", "unsupported task type: " + assignment.task_type}};
    }
    std::lock_guard lk(m_);
    const double now = clock_.now_s();
    executor_.advance_to(now);

    double reserved = 0;
    for (const auto& [task, mb] : reserved_by_task_) reserved += mb;
    const double available_mb = profile_.total_storage_gb * 1024.0 - reserved;
    if (available_mb + 1e-9 < assignment.data_size_mb) {
        return Json{{"accepted", false},
                    {"device_id", profile_.device_id},
                    {"reason", "insufficient storage"}};
    }

    reserved_by_task_[assignment.task_id] += assignment.data_size_mb;
    executor_.start(assignment, now);

    const double base = executor_.effective_speed(assignment.task_type);
    const double share =
        base / static_cast<double>(std::max<std::size_t>(1, executor_.executing_count()));
    const double estimate = share > 0 ? assignment.data_size_mb / share : -1;
    return Json{{"accepted", true},
                {"device_id", profile_.device_id},
                {"estimated_completion_s", estimate}};
}

Json DeviceAgent::snapshot_locked(double now) {
    executor_.advance_to(now);
    double progress = 0;
    double speed = 0;
    double mass = 0;
    Json rows = Json::array();
    bool any_executing = false;
    bool any_completed = false;
    bool any_terminated = false;
    for (const auto& sub : executor_.subtasks()) {
        progress += sub.processed_mb;
        speed += sub.current_speed_mbps;
        mass += sub.accuracy_mass;
        any_executing |= sub.state == ExecState::Executing;
        any_completed |= sub.state == ExecState::Completed;
        any_terminated |= sub.state == ExecState::Terminated;
        Json row{{"task_id", sub.assignment.task_id},
                 {"subtask_id", sub.assignment.subtask_id},
                 {"task_type", sub.assignment.task_type},
                 {"state", to_string(sub.state)},
                 {"assigned_mb", sub.assignment.data_size_mb},
                 {"processed_mb", sub.processed_mb},
                 {"current_speed_mbps", sub.current_speed_mbps},
                 {"running_accuracy", sub.running_accuracy()},
                 {"started_at_s", sub.started_at_s},
                 {"mean_speed_mbps", sub.mean_speed_mbps(now)}};
        if (sub.finished_at_s) row["finished_at_s"] = *sub.finished_at_s;
        rows.push_back(row);
    }
    const char* state = any_executing    ? "executing"
                        : any_completed  ? "completed"
                        : any_terminated ? "terminated"
                                         : "idle";
    Json out{{"device_id", profile_.device_id},
             {"state", state},
             {"progress_mb", progress},
             {"current_speed_mbps", speed},
             {"subtasks", rows}};
    out["running_accuracy"] = progress > 0 ? Json(mass / progress) : Json(nullptr);
    return out;
}

Json DeviceAgent::report_performance() {
    std::lock_guard lk(m_);
    return snapshot_locked(clock_.now_s());
}

void DeviceAgent::terminate_task(const std::string& task_id) {
    std::lock_guard lk(m_);
    executor_.terminate_task(task_id, clock_.now_s());
}

void DeviceAgent::release_task(const std::string& task_id) {
    std::lock_guard lk(m_);
    executor_.advance_to(clock_.now_s());
    executor_.drop_task(task_id);
    reserved_by_task_.erase(task_id);
}

double DeviceAgent::available_storage_gb() const {
    std::lock_guard lk(m_);
    double reserved = 0;
    for (const auto& [task, mb] : reserved_by_task_) reserved += mb;
    return profile_.total_storage_gb - reserved / 1024.0;
}

double DeviceAgent::reserved_mb() const {
    std::lock_guard lk(m_);
    double reserved = 0;
    for (const auto& [task, mb] : reserved_by_task_) reserved += mb;
    return reserved;
}

ExecState DeviceAgent::device_state() const {
    std::lock_guard lk(m_);
    bool any_completed = false;
    bool any_terminated = false;
    for (const auto& sub : executor_.subtasks()) {
        if (sub.state == ExecState::Executing) return ExecState::Executing;
        any_completed |= sub.state == ExecState::Completed;
        any_terminated |= sub.state == ExecState::Terminated;
    }
    if (any_completed) return ExecState::Completed;
    if (any_terminated) return ExecState::Terminated;
    return reserved_by_task_.empty() ? ExecState::Idle : ExecState::Reserved;
}

} // namespace taas::agent
