#pragma once

#include <optional>
#include <string>
#include <vector>

#include "taas/agent/profile.hpp"

namespace taas::agent {

enum class ExecState { Idle, Reserved, Executing, Completed, Terminated };

const char* to_string(ExecState s);

struct SubtaskAssignment {
    std::string task_id;
    std::string subtask_id;
    std::string task_type;
    double data_size_mb = 0;
    double required_accuracy = 0;

    Json to_json() const;
    static SubtaskAssignment from_json(const Json& j);
};

/// Execution record of one accepted subtask.
struct SubtaskRun {
    SubtaskAssignment assignment;
    ExecState state = ExecState::Executing;
    double started_at_s = 0;
    double processed_mb = 0;
    double accuracy_mass = 0; ///< integral of accuracy over processed MB
    double current_speed_mbps = 0;
    std::optional<double> finished_at_s;

    double running_accuracy() const {
        return processed_mb > 0 ? accuracy_mass / processed_mb : 0.0;
    }

    /// Mean speed over the busy interval, for performance records.
    double mean_speed_mbps(double now_s) const {
        const double end = finished_at_s.value_or(now_s);
        const double busy = end - started_at_s;
        return busy > 0 ? processed_mb / busy : 0.0;
    }
};

/// Virtual-time execution model. Concurrent subtasks share the device
/// equally: a subtask of type T runs at nominal_speed(T) / n_active. The
/// fault plan rewrites speed/accuracy from its event times onward. All
/// progress is integrated analytically segment by segment, so completion
/// times are exact, not tick-quantized.
class Executor {
public:
    explicit Executor(DeviceProfile profile);

    /// Integrates execution up to `t` (monotone; earlier times are no-ops).
    void advance_to(double t);

    /// Starts a subtask at time `now` (caller advances first).
    void start(const SubtaskAssignment& assignment, double now);

    /// Executing subtasks of `task_id` become Terminated; progress keeps
    /// its value at `now`.
    void terminate_task(const std::string& task_id, double now);

    /// Drops every subtask of `task_id` from the active set.
    void drop_task(const std::string& task_id);

    const std::vector<SubtaskRun>& subtasks() const { return subs_; }
    std::vector<SubtaskRun>& subtasks() { return subs_; }

    const DeviceProfile& profile() const { return profile_; }

    double now() const { return now_; }

    /// Device-wide effective values at the current time.
    double effective_speed(const std::string& task_type) const;
    double effective_accuracy(const std::string& task_type) const;

    std::size_t executing_count() const;

private:
    void apply_due_faults();
    void refresh_current_speeds();

    DeviceProfile profile_;
    std::vector<SubtaskRun> subs_;
    std::size_t next_fault_ = 0;
    std::optional<double> speed_override_;
    std::optional<double> accuracy_override_;
    double now_ = 0;
};

} // namespace taas::agent
