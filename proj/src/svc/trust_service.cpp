#include "taas/svc/trust_service.hpp"

#include <algorithm>
#include <fstream>
#include <future>

#include "taas/trust/assess.hpp"

namespace taas::svc {

void MonitorPolicy::validate() const {
    if (report_interval_s <= 0) throw ConfigError("report interval must be > 0");
    if (min_speed_fraction <= 0 || min_speed_fraction > 1) {
        throw ConfigError("min_speed_fraction must be within (0, 1]");
    }
    if (min_accuracy <= 0 || min_accuracy > 1) {
        throw ConfigError("min_accuracy must be within (0, 1]");
    }
}

Json MonitorPolicy::to_json() const {
    return Json{{"report_interval_s", report_interval_s},
                {"min_speed_fraction", min_speed_fraction},
                {"min_accuracy", min_accuracy}};
}

MonitorPolicy MonitorPolicy::from_json(const Json& j) {
    MonitorPolicy p;
    p.report_interval_s = j.value("report_interval_s", p.report_interval_s);
    p.min_speed_fraction = j.value("min_speed_fraction", p.min_speed_fraction);
    p.min_accuracy = j.value("min_accuracy", p.min_accuracy);
    p.validate();
    return p;
}

ServiceConfig ServiceConfig::from_json(const Json& j) {
    ServiceConfig c;
    if (j.contains("monitor")) c.monitor = MonitorPolicy::from_json(j.at("monitor"));
    c.fanout_timeout_ms = j.value("fanout_timeout_ms", c.fanout_timeout_ms);
    return c;
}

ServiceConfig ServiceConfig::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in.is_open()) throw ConfigError("cannot open service config: " + path.string());
    return from_json(Json::parse(in));
}

TrustService::TrustService(registry::Registry& registry,
                           registry::HistoryStore& history, trust::TrustGates gates,
                           nlu::KeywordMap keywords, wire::Network& net,
                           const util::Clock& clock, ServiceConfig config,
                           MonitorHooks hooks, EventSink events)
    : registry_(registry), history_(history), gates_(std::move(gates)),
      keywords_(std::move(keywords)), net_(net), clock_(clock),
      config_(std::move(config)), hooks_(std::move(hooks)),
      events_(std::move(events)) {
    gates_.validate();
    config_.monitor.validate();
}

void TrustService::start(const std::string& address) {
    wire::ToolManifest manifest{
        "trust-service",
        {wire::ToolSpec{
            "evaluate_trust",
            "Evaluate task-specific trust of potential collaborators for a "
            "task description",
            Json{{"type", "object"},
                 {"properties",
                  Json{{"description", Json{{"type", "string"}}},
                       {"owner_id", Json{{"type", "string"}}},
                       {"data_size_mb", Json{{"type", "number"}}}}},
                 {"required", Json::array({"description"})}}}}};
    wire::HandlerMap handlers{
        {"evaluate_trust", [this](const Json& args) {
             nlu::TaskDescription desc;
             desc.text = args.at("description").get<std::string>();
             desc.owner_id = args.value("owner_id", std::string{});
             desc.data_size_mb = args.value("data_size_mb", 0.0);
             return evaluate(desc).to_json();
         }}};
    server_.emplace(wire::serve(net_, address, std::move(manifest), std::move(handlers)));
}

void TrustService::stop() {
    if (server_) server_->shutdown();
}

std::string TrustService::address() const {
    return server_ ? server_->address() : registry_.trust_service_address();
}

void TrustService::emit(Json event) {
    if (!events_) return;
    event["t"] = clock_.now_s();
    events_(event);
}

std::string TrustService::resource_query(const nlu::TaskRequirements& req) const {
    const bool storage = req.resources.min_storage_gb.has_value();
    const bool cpu = req.resources.min_cpu_class.has_value();
    if (storage && cpu) {
        return "Can you provide your available storage capacity and CPU information?";
    }
    if (storage) return "Can you provide your available storage capacity?";
    return "Can you provide your CPU information?";
}

std::optional<trust::ResourceSnapshot> TrustService::fetch_snapshot(
    const registry::DeviceRecord& device, const nlu::TaskRequirements& req,
    double now_s) {
    try {
        wire::ConnectOptions opts;
        opts.client_name = "trust-service";
        opts.call_timeout = std::chrono::milliseconds(config_.fanout_timeout_ms);
        auto conn = wire::Connection::connect(net_, device.agent_address, opts);
        const Json reply = conn.call_tool(
            "report_resource", Json{{"query", resource_query(req)}});
        conn.close();

        trust::ResourceSnapshot snap;
        snap.device_id = device.device_id;
        snap.captured_at_s = now_s;
        if (reply.contains("cpu_ghz")) snap.cpu_ghz = reply.at("cpu_ghz").get<double>();
        if (reply.contains("available_storage_gb")) {
            snap.available_storage_gb = reply.at("available_storage_gb").get<double>();
        }
        return snap;
    } catch (const std::exception& e) {
        emit(Json{{"ev", "candidate_unreachable"},
                  {"device", device.device_id},
                  {"error", e.what()}});
        return std::nullopt;
    }
}

trust::TrustReport TrustService::evaluate(const nlu::TaskDescription& desc) {
    const double now = clock_.now_s();
    EvaluationTrace trace;
    {
        std::lock_guard lk(m_);
        trace.request_id = "eval-" + std::to_string(next_request_++);
    }

    // Stage 1: task goal interpretation.
    const nlu::TaskRequirements req =
        nlu::parse(desc, registry_.known_task_types(), keywords_);
    trace.requirements = req;
    trace.stages.push_back(EvalStage::Interpreted);
    emit(Json{{"ev", "eval_requirements"},
              {"request", trace.request_id},
              {"requirements", req.to_json()}});

    // Stage 2: candidates by supported task type, then the historical gate.
    const auto candidates = registry_.devices_supporting(req.task_type);
    for (const auto& c : candidates) trace.candidates.push_back(c.device_id);
    emit(Json{{"ev", "eval_candidates"},
              {"request", trace.request_id},
              {"devices", trace.candidates}});

    registry::HistoryQuery query;
    query.task_type = req.task_type;
    query.window_s = req.history_window_s;
    query.dimensions = req.history_dims.any()
                           ? req.history_dims
                           : HistoryDimensions{true, true}; // gate still needs samples

    struct Survivor {
        registry::DeviceRecord device;
        trust::HistoricalAssessment historical;
    };
    std::vector<Survivor> survivors;
    for (const auto& device : candidates) {
        const auto records = history_.query(query, device.device_id, now);
        auto assessment = trust::assess_history(device.device_id, records, req, gates_);
        emit(Json{{"ev", "history_gate"},
                  {"request", trace.request_id},
                  {"device", device.device_id},
                  {"trustworthy", assessment.trustworthy},
                  {"samples", assessment.sample_count}});
        if (assessment.trustworthy) {
            trace.history_survivors.push_back(device.device_id);
            survivors.push_back({device, std::move(assessment)});
        }
    }
    trace.stages.push_back(EvalStage::HistoryDone);

    // Stage 3: need-driven resource collection, only for gate survivors and
    // only when the task imposes resource requirements.
    std::vector<std::optional<trust::ResourceSnapshot>> snapshots(survivors.size());
    if (req.resources.any()) {
        std::vector<std::future<std::optional<trust::ResourceSnapshot>>> futures;
        futures.reserve(survivors.size());
        for (const auto& s : survivors) {
            emit(Json{{"ev", "resource_contact"},
                      {"request", trace.request_id},
                      {"device", s.device.device_id},
                      {"address", s.device.agent_address}});
            futures.push_back(std::async(std::launch::async, [this, &s, &req, now] {
                return fetch_snapshot(s.device, req, now);
            }));
        }
        for (std::size_t i = 0; i < futures.size(); ++i) {
            snapshots[i] = futures[i].get();
            if (snapshots[i]) {
                emit(Json{{"ev", "resource_reply"},
                          {"request", trace.request_id},
                          {"device", survivors[i].device.device_id}});
            }
        }
    }
    trace.stages.push_back(EvalStage::ResourcesDone);

    // Stage 4: assemble the report.
    trust::TrustReport report;
    for (std::size_t i = 0; i < survivors.size(); ++i) {
        if (req.resources.any() && !snapshots[i]) {
            continue; // unreachable during collection: dropped
        }
        trust::TrustReportEntry entry;
        entry.device_id = survivors[i].device.device_id;
        entry.historical = survivors[i].historical;
        trust::ResourceSnapshot snap;
        snap.device_id = entry.device_id;
        snap.captured_at_s = now;
        if (snapshots[i]) snap = *snapshots[i];
        entry.resource = trust::assess_resources(snap, req, gates_);
        auto [his, res] = trust::render_semantic(entry.historical, entry.resource, req);
        entry.semantic_his = std::move(his);
        entry.semantic_res = std::move(res);
        entry.agent_address = survivors[i].device.agent_address;
        trace.reported.push_back(entry.device_id);
        report.entries.push_back(std::move(entry));
    }
    trace.stages.push_back(EvalStage::Reported);
    emit(Json{{"ev", "eval_report"},
              {"request", trace.request_id},
              {"devices", trace.reported}});

    {
        std::lock_guard lk(m_);
        eval_traces_.push_back(std::move(trace));
    }
    return report;
}

void TrustService::begin_monitoring(const std::string& task_id,
                                    const std::string& task_type,
                                    std::vector<MonitoredCollaborator> collaborators,
                                    std::optional<MonitorPolicy> policy) {
    std::lock_guard lk(m_);
    MonitoredTask task;
    task.task_type = task_type;
    task.policy = policy.value_or(config_.monitor);
    task.policy.validate();
    task.next_due_s = clock_.now_s();
    std::sort(collaborators.begin(), collaborators.end(),
              [](const MonitoredCollaborator& a, const MonitoredCollaborator& b) {
                  return a.subtask_id < b.subtask_id;
              });
    for (auto& c : collaborators) {
        task.entries.push_back(MonitoredEntry{std::move(c), std::nullopt, false, false});
    }
    monitored_[task_id] = std::move(task);
}

void TrustService::extend_monitoring(const std::string& task_id,
                                     std::vector<MonitoredCollaborator> collaborators) {
    std::lock_guard lk(m_);
    auto it = monitored_.find(task_id);
    if (it == monitored_.end()) return;
    for (auto& c : collaborators) {
        it->second.entries.push_back(
            MonitoredEntry{std::move(c), std::nullopt, false, false});
    }
    std::sort(it->second.entries.begin(), it->second.entries.end(),
              [](const MonitoredEntry& a, const MonitoredEntry& b) {
                  return a.info.subtask_id < b.info.subtask_id;
              });
}

MonitorEvent TrustService::sample_entry(const std::string& task_id, MonitoredTask& task,
                                        MonitoredEntry& entry, double now_s) {
    MonitorEvent ev;
    ev.t = now_s;
    ev.task_id = task_id;
    ev.device_id = entry.info.device_id;
    ev.subtask_id = entry.info.subtask_id;
    ev.assigned_mb = entry.info.assigned_mb;

    Json reply;
    try {
        if (!entry.conn || !entry.conn->is_open()) {
            wire::ConnectOptions opts;
            opts.client_name = "trust-service-monitor";
            entry.conn =
                wire::Connection::connect(net_, entry.info.agent_address, opts);
        }
        reply = entry.conn->call_tool("report_performance", Json::object());
    } catch (const std::exception&) {
        ev.verdict = "unreachable";
        return ev;
    }

    const Json* row = nullptr;
    for (const auto& r : reply.value("subtasks", Json::array())) {
        if (r.value("subtask_id", std::string{}) == entry.info.subtask_id) {
            row = &r;
            break;
        }
    }
    if (!row) {
        ev.verdict = "unreachable"; // agent no longer knows the subtask
        return ev;
    }

    ev.processed_mb = row->value("processed_mb", 0.0);
    ev.measured_speed_mbps = row->value("current_speed_mbps", 0.0);
    ev.mean_speed_mbps = row->value("mean_speed_mbps", 0.0);
    if (ev.processed_mb > 0) {
        ev.running_accuracy = row->value("running_accuracy", 0.0);
    }
    if (row->contains("finished_at_s")) {
        ev.finished_at_s = row->at("finished_at_s").get<double>();
    }
    const std::string state = row->value("state", std::string{});
    if (state == "completed") {
        ev.verdict = "completed";
        return ev;
    }
    if (state != "executing") {
        ev.verdict = "unreachable";
        return ev;
    }

    // Calibrate the expectation on first contact when nothing was declared.
    if (!entry.info.declared_speed_mbps && ev.measured_speed_mbps > 0) {
        entry.info.declared_speed_mbps = ev.measured_speed_mbps;
    }
    const double declared = entry.info.declared_speed_mbps.value_or(0.0);
    const bool speed_bad =
        declared > 0 &&
        ev.measured_speed_mbps < task.policy.min_speed_fraction * declared;
    const bool accuracy_bad =
        ev.running_accuracy && *ev.running_accuracy < task.policy.min_accuracy;
    ev.verdict = (speed_bad || accuracy_bad) ? "degraded" : "ok";
    return ev;
}

void TrustService::record_outcome(const std::string& task_id, const MonitoredTask& task,
                                  MonitoredEntry& entry, const MonitorEvent& ev,
                                  registry::Outcome outcome) {
    if (entry.recorded) return;
    registry::PerformanceRecord rec;
    rec.timestamp_s = ev.t;
    rec.task_type = task.task_type;
    rec.device_id = entry.info.device_id;
    rec.processing_speed_mbps = std::max(0.0, ev.mean_speed_mbps);
    rec.completion_accuracy = std::clamp(ev.running_accuracy.value_or(0.0), 0.0, 1.0);
    rec.outcome = outcome;
    history_.append(rec);
    entry.recorded = true;
    entry.finished = true;
}

std::vector<MonitorEvent> TrustService::poll_monitors(double now_s) {
    std::lock_guard lk(m_);
    std::vector<MonitorEvent> events;
    for (auto& [task_id, task] : monitored_) {
        if (now_s + 1e-9 < task.next_due_s) continue;
        task.next_due_s += task.policy.report_interval_s;
        if (task.next_due_s <= now_s) task.next_due_s = now_s + task.policy.report_interval_s;

        for (auto& entry : task.entries) {
            if (entry.finished) continue;
            MonitorEvent ev = sample_entry(task_id, task, entry, now_s);
            emit(Json{{"ev", "monitor_sample"},
                      {"task", task_id},
                      {"device", ev.device_id},
                      {"subtask", ev.subtask_id},
                      {"verdict", ev.verdict},
                      {"speed_mbps", ev.measured_speed_mbps},
                      {"processed_mb", ev.processed_mb}});

            if (ev.verdict == "completed") {
                record_outcome(task_id, task, entry, ev, registry::Outcome::Completed);
            } else if (ev.verdict == "degraded") {
                if (hooks_.terminate) {
                    hooks_.terminate(entry.info.device_id, task_id);
                }
                record_outcome(task_id, task, entry, ev, registry::Outcome::Terminated);
            } else if (ev.verdict == "unreachable") {
                if (hooks_.terminate) {
                    hooks_.terminate(entry.info.device_id, task_id);
                }
                record_outcome(task_id, task, entry, ev, registry::Outcome::Failed);
            }
            events.push_back(std::move(ev));
        }
    }
    return events;
}

void TrustService::reclaim(const std::string& task_id) {
    std::lock_guard lk(m_);
    auto it = monitored_.find(task_id);
    if (it == monitored_.end()) return;
    for (auto& entry : it->second.entries) {
        if (entry.conn) entry.conn->close();
        if (hooks_.release) hooks_.release(entry.info.device_id, task_id);
    }
    emit(Json{{"ev", "reclaim"}, {"task", task_id}});
    monitored_.erase(it);
}

bool TrustService::task_active(const std::string& task_id) const {
    std::lock_guard lk(m_);
    return monitored_.count(task_id) > 0;
}

std::size_t TrustService::open_monitor_connections() const {
    std::lock_guard lk(m_);
    std::size_t n = 0;
    for (const auto& [task_id, task] : monitored_) {
        for (const auto& entry : task.entries) {
            if (entry.conn && entry.conn->is_open()) ++n;
        }
    }
    return n;
}

} // namespace taas::svc
