#pragma once

#include <optional>
#include <string>
#include <vector>

#include "taas/events.hpp"
#include "taas/nlu/requirements.hpp"
#include "taas/trust/report.hpp"
#include "taas/util/clock.hpp"
#include "taas/wire/connection.hpp"
#include "taas/wire/network.hpp"

namespace taas::owner {

/// The task as its owner knows it, before any wire interaction.
struct TaskSpec {
    std::string task_id;
    std::string task_type;
    double data_size_mb = 0;
    double required_accuracy = 0;
    bool want_fast = false;
    bool want_accurate = false;
    double history_window_s = 604800;
    std::string owner_id;

    void validate() const;

    Json to_json() const;
    static TaskSpec from_json(const Json& j);
};

/// Renders the canonical description sentence for a task. Deterministic;
/// parse(render(spec)) reproduces the spec's requirement content.
nlu::TaskDescription render_description(const TaskSpec& spec);

class NoCollaborators : public Error {
public:
    using Error::Error;
};

struct SelectionDecision {
    std::vector<std::string> selected; ///< ordered by (mean speed desc, id)
    struct Excluded {
        std::string device_id;
        std::string reason;
    };
    std::vector<Excluded> excluded;
};

/// Final selection over a trust report: keep every entry satisfying the
/// spec-implied resource requirements at the strictest level ("fast" means
/// the CPU class must be high). Throws NoCollaborators when nothing
/// qualifies. Pure function of (report, spec).
SelectionDecision select(const trust::TrustReport& report, const TaskSpec& spec);

/// Integer-MB proportional split (largest remainder, sum preserved).
/// Weights must be positive; equal weights give an equal split.
std::vector<double> proportional_split(double total_mb,
                                       const std::vector<double>& weights);

/// One collaborator as the owner tracks it during a task.
struct Collaborator {
    std::string device_id;
    std::string agent_address;
    double weight = 1.0; ///< split weight; historical mean speed when known
    bool weight_known = false;
};

struct Assignment {
    std::string device_id;
    std::string subtask_id;
    double size_mb = 0;
    bool accepted = false;
    std::string reject_reason;
    double estimated_completion_s = 0;
};

/// Drives the owner side of a task over the wire: trust evaluation, task
/// splitting and assignment, reassignment after a termination, teardown.
class TaskOwner {
public:
    TaskOwner(std::string owner_id, wire::Network& net,
              std::string trust_service_address, const util::Clock& clock,
              EventSink events = nullptr);

    ~TaskOwner();

    /// Renders the description, connects to the trust service, verifies the
    /// evaluate_trust tool is offered, and invokes it.
    trust::TrustReport evaluate_via_service(const TaskSpec& spec);

    /// Splits spec.data_size_mb across the collaborators proportionally to
    /// their weights and delivers each piece via receive_task. Rejected
    /// amounts are redistributed among acceptors. Returns every attempt;
    /// throws NoCollaborators when nothing was accepted.
    std::vector<Assignment> split_and_assign(const TaskSpec& spec,
                                             const std::vector<Collaborator>& collabs);

    /// Reassigns the unprocessed part of a terminated subtask to the
    /// remaining collaborators. Empty result means no capacity was left
    /// (task failure).
    std::vector<Assignment> reassign(const TaskSpec& spec, double unprocessed_mb,
                                     const std::vector<Collaborator>& remaining);

    /// Closes every connection the owner holds for the task.
    void close_all();

    std::size_t open_connections() const;

private:
    wire::Connection& connection_for(const Collaborator& collab);
    Assignment deliver(const TaskSpec& spec, const Collaborator& collab,
                       double size_mb);
    void emit(Json event);

    std::string owner_id_;
    wire::Network& net_;
    std::string trust_service_address_;
    const util::Clock& clock_;
    EventSink events_;
    std::vector<std::pair<std::string, wire::Connection>> agent_conns_;
    std::optional<wire::Connection> service_conn_;
    int next_subtask_ = 1;
};

} // namespace taas::owner
