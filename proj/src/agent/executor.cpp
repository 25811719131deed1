#include "taas/agent/executor.hpp"

#include <algorithm>
#include <limits>

#include "taas/util/errors.hpp"

namespace taas::agent {

namespace {
constexpr double kEps = 1e-9;
}

const char* to_string(ExecState s) {
    switch (s) {
    case ExecState::Idle: return "idle";
    case ExecState::Reserved: return "reserved";
    case ExecState::Executing: return "executing";
    case ExecState::Completed: return "completed";
    case ExecState::Terminated: return "terminated";
    }
    return "idle";
}

Json SubtaskAssignment::to_json() const {
    return Json{{"task_id", task_id},
                {"subtask_id", subtask_id},
                {"task_type", task_type},
                {"data_size_mb", data_size_mb},
                {"required_accuracy", required_accuracy}};
}

SubtaskAssignment SubtaskAssignment::from_json(const Json& j) {
    SubtaskAssignment a;
    a.task_id = j.at("task_id").get<std::string>();
    a.subtask_id = j.at("subtask_id").get<std::string>();
    a.task_type = j.at("task_type").get<std::string>();
    a.data_size_mb = j.at("data_size_mb").get<double>();
    a.required_accuracy = j.value("required_accuracy", 0.0);
    return a;
}

std::set<std::string> DeviceProfile::supported_types() const {
    std::set<std::string> types;
    for (const auto& [type, model] : task_types) types.insert(type);
    return types;
}

void DeviceProfile::validate() const {
    if (device_id.empty()) throw ConfigError("device profile needs an id");
    if (cpu_ghz < 0 || total_storage_gb < 0) {
        throw ConfigError("device quantities must be >= 0: " + device_id);
    }
    if (task_types.empty()) {
        throw ConfigError("device supports no task types: " + device_id);
    }
    for (const auto& [type, model] : task_types) {
        if (model.nominal_speed_mbps <= 0) {
            throw ConfigError("nominal speed must be > 0: " + device_id + "/" + type);
        }
        if (model.accuracy < 0 || model.accuracy > 1) {
            throw ConfigError("accuracy must be within [0, 1]: " + device_id + "/" + type);
        }
    }
    double last = -std::numeric_limits<double>::infinity();
    for (const auto& ev : fault_plan) {
        if (ev.time_s < last) throw ConfigError("fault plan must be time-ordered");
        last = ev.time_s;
    }
}

Json DeviceProfile::to_json() const {
    Json types = Json::object();
    for (const auto& [type, model] : task_types) {
        types[type] = Json{{"nominal_speed_mbps", model.nominal_speed_mbps},
                           {"accuracy", model.accuracy}};
    }
    Json faults = Json::array();
    for (const auto& ev : fault_plan) {
        Json f{{"time_s", ev.time_s}};
        if (ev.speed_mbps) f["speed_mbps"] = *ev.speed_mbps;
        if (ev.accuracy) f["accuracy"] = *ev.accuracy;
        faults.push_back(f);
    }
    return Json{{"device_id", device_id},
                {"cpu_ghz", cpu_ghz},
                {"total_storage_gb", total_storage_gb},
                {"task_types", types},
                {"fault_plan", faults}};
}

DeviceProfile DeviceProfile::from_json(const Json& j) {
    DeviceProfile p;
    p.device_id = j.at("device_id").get<std::string>();
    p.cpu_ghz = j.at("cpu_ghz").get<double>();
    p.total_storage_gb = j.at("total_storage_gb").get<double>();
    for (const auto& [type, model] : j.at("task_types").items()) {
        TaskTypeModel m;
        m.nominal_speed_mbps = model.at("nominal_speed_mbps").get<double>();
        m.accuracy = model.at("accuracy").get<double>();
        p.task_types[type] = m;
    }
    for (const auto& f : j.value("fault_plan", Json::array())) {
        FaultEvent ev;
        ev.time_s = f.at("time_s").get<double>();
        if (f.contains("speed_mbps")) ev.speed_mbps = f.at("speed_mbps").get<double>();
        if (f.contains("accuracy")) ev.accuracy = f.at("accuracy").get<double>();
        p.fault_plan.push_back(ev);
    }
    p.validate();
    return p;
}

Executor::Executor(DeviceProfile profile) : profile_(std::move(profile)) {
    profile_.validate();
}

double Executor::effective_speed(const std::string& task_type) const {
    if (speed_override_) return *speed_override_;
    auto it = profile_.task_types.find(task_type);
    return it != profile_.task_types.end() ? it->second.nominal_speed_mbps : 0.0;
}

double Executor::effective_accuracy(const std::string& task_type) const {
    if (accuracy_override_) return *accuracy_override_;
    auto it = profile_.task_types.find(task_type);
    return it != profile_.task_types.end() ? it->second.accuracy : 0.0;
}

std::size_t Executor::executing_count() const {
    return static_cast<std::size_t>(
        std::count_if(subs_.begin(), subs_.end(), [](const SubtaskRun& s) {
            return s.state == ExecState::Executing;
        }));
}

void Executor::apply_due_faults() {
    while (next_fault_ < profile_.fault_plan.size() &&
           profile_.fault_plan[next_fault_].time_s <= now_ + kEps) {
        const FaultEvent& ev = profile_.fault_plan[next_fault_];
        if (ev.speed_mbps) speed_override_ = ev.speed_mbps;
        if (ev.accuracy) accuracy_override_ = ev.accuracy;
        ++next_fault_;
    }
}

void Executor::refresh_current_speeds() {
    const std::size_t n = executing_count();
    for (auto& sub : subs_) {
        sub.current_speed_mbps =
            sub.state == ExecState::Executing && n > 0
                ? effective_speed(sub.assignment.task_type) / static_cast<double>(n)
                : 0.0;
    }
}

void Executor::advance_to(double t) {
    apply_due_faults();
    while (now_ < t - kEps) {
        // Segment ends at the next fault, the earliest completion, or t.
        double seg_end = t;
        if (next_fault_ < profile_.fault_plan.size()) {
            seg_end = std::min(seg_end,
                               std::max(profile_.fault_plan[next_fault_].time_s, now_));
        }

        const std::size_t n = executing_count();
        if (n > 0) {
            for (const auto& sub : subs_) {
                if (sub.state != ExecState::Executing) continue;
                const double rate =
                    effective_speed(sub.assignment.task_type) / static_cast<double>(n);
                if (rate <= 0) continue;
                const double remaining = sub.assignment.data_size_mb - sub.processed_mb;
                seg_end = std::min(seg_end, now_ + remaining / rate);
            }
        }

        const double dt = seg_end - now_;
        if (dt > 0 && n > 0) {
            for (auto& sub : subs_) {
                if (sub.state != ExecState::Executing) continue;
                const double rate =
                    effective_speed(sub.assignment.task_type) / static_cast<double>(n);
                const double gain = rate * dt;
                sub.processed_mb += gain;
                sub.accuracy_mass += gain * effective_accuracy(sub.assignment.task_type);
            }
        }
        now_ = seg_end;

        bool changed = false;
        for (auto& sub : subs_) {
            if (sub.state != ExecState::Executing) continue;
            if (sub.processed_mb >= sub.assignment.data_size_mb - kEps) {
                sub.processed_mb = sub.assignment.data_size_mb;
                sub.state = ExecState::Completed;
                sub.finished_at_s = now_;
                changed = true;
            }
        }
        const std::size_t fault_mark = next_fault_;
        apply_due_faults();
        changed = changed || next_fault_ != fault_mark;

        if (dt <= 0 && !changed) break; // nothing can move anymore
    }
    if (t > now_) now_ = t;
    refresh_current_speeds();
}

void Executor::start(const SubtaskAssignment& assignment, double now) {
    advance_to(now);
    SubtaskRun run;
    run.assignment = assignment;
    run.state = ExecState::Executing;
    run.started_at_s = now_;
    subs_.push_back(run);
    refresh_current_speeds();
}

void Executor::terminate_task(const std::string& task_id, double now) {
    advance_to(now);
    for (auto& sub : subs_) {
        if (sub.assignment.task_id == task_id && sub.state == ExecState::Executing) {
            sub.state = ExecState::Terminated;
            sub.finished_at_s = now;
        }
    }
    refresh_current_speeds();
}

void Executor::drop_task(const std::string& task_id) {
    std::erase_if(subs_, [&](const SubtaskRun& s) {
        return s.assignment.task_id == task_id;
    });
    refresh_current_speeds();
}

} // namespace taas::agent
