#include "taas/owner/task_owner.hpp"

#include <algorithm>
#include <cmath>

#include "taas/util/format.hpp"

namespace taas::owner {

void TaskSpec::validate() const {
    if (task_id.empty()) throw ConfigError("task needs an id");
    if (task_type.empty()) throw ConfigError("task needs a type: " + task_id);
    if (data_size_mb <= 0) throw ConfigError("task data size must be > 0: " + task_id);
    if (required_accuracy < 0 || required_accuracy > 1) {
        throw ConfigError("required accuracy must be within [0, 1]: " + task_id);
    }
    if (history_window_s <= 0) throw ConfigError("history window must be > 0: " + task_id);
}

Json TaskSpec::to_json() const {
    Json quals = Json::array();
    if (want_fast) quals.push_back("fast");
    if (want_accurate) quals.push_back("accurate");
    return Json{{"task_id", task_id},
                {"task_type", task_type},
                {"data_size_mb", data_size_mb},
                {"required_accuracy", required_accuracy},
                {"qualifiers", quals},
                {"history_window_s", history_window_s},
                {"owner_id", owner_id}};
}

TaskSpec TaskSpec::from_json(const Json& j) {
    TaskSpec s;
    s.task_id = j.at("task_id").get<std::string>();
    s.task_type = j.at("task_type").get<std::string>();
    s.data_size_mb = j.at("data_size_mb").get<double>();
    s.required_accuracy = j.value("required_accuracy", 0.0);
    for (const auto& q : j.value("qualifiers", Json::array())) {
        const auto name = q.get<std::string>();
        if (name == "fast") s.want_fast = true;
        else if (name == "accurate") s.want_accurate = true;
        else throw ConfigError("unknown qualifier: " + name);
    }
    s.history_window_s = j.value("history_window_s", 604800.0);
    s.owner_id = j.value("owner_id", std::string{});
    s.validate();
    return s;
}

namespace {

std::string size_phrase(double mb) {
    if (mb >= 1024 && std::fmod(mb, 1024.0) == 0) {
        return util::format_quantity(mb / 1024.0) + " GB";
    }
    return util::format_quantity(mb) + " MB";
}

std::string window_phrase(double seconds) {
    if (seconds == 604800) return "past week";
    if (seconds >= 86400 && std::fmod(seconds, 86400.0) == 0) {
        return "past " + util::format_quantity(seconds / 86400.0) + " days";
    }
    if (seconds >= 3600 && std::fmod(seconds, 3600.0) == 0) {
        return "past " + util::format_quantity(seconds / 3600.0) + " hours";
    }
    return "past " + util::format_quantity(seconds) + " seconds";
}

} // namespace

nlu::TaskDescription render_description(const TaskSpec& spec) {
    spec.validate();
    std::string text = "I have a " + size_phrase(spec.data_size_mb) + " " +
                       spec.task_type +
                       " task that requires collaborative assistance for completion.";
    if (spec.want_fast || spec.want_accurate) {
        std::string quals;
        if (spec.want_fast && spec.want_accurate) quals = "fast and accurate";
        else if (spec.want_fast) quals = "fast";
        else quals = "accurate";
        text += " I am looking for collaborators who have demonstrated consistently " +
                quals + " task execution over the " +
                window_phrase(spec.history_window_s);
    } else if (spec.history_window_s != 604800) {
        text += " I am looking for collaborators who have demonstrated consistent "
                "task execution over the " +
                window_phrase(spec.history_window_s);
    }
    nlu::TaskDescription desc;
    desc.text = text;
    desc.owner_id = spec.owner_id;
    desc.data_size_mb = spec.data_size_mb;
    return desc;
}

SelectionDecision select(const trust::TrustReport& report, const TaskSpec& spec) {
    SelectionDecision decision;
    struct Ranked {
        std::string device_id;
        double speed;
    };
    std::vector<Ranked> kept;

    for (const auto& entry : report.entries) {
        std::string reason;
        if (spec.want_fast) {
            if (!entry.resource.cpu_class) {
                reason = "excluded due to missing CPU information";
            } else if (*entry.resource.cpu_class != CpuClass::High) {
                reason = "excluded due to its " +
                         std::string(to_string(*entry.resource.cpu_class)) +
                         " CPU processing speed";
            }
        }
        if (reason.empty() && entry.resource.storage_sufficient &&
            !*entry.resource.storage_sufficient) {
            reason = "excluded due to insufficient available storage";
        }
        if (reason.empty()) {
            kept.push_back(
                {entry.device_id, entry.historical.mean_speed_mbps.value_or(0.0)});
        } else {
            decision.excluded.push_back({entry.device_id, reason});
        }
    }

    std::sort(kept.begin(), kept.end(), [](const Ranked& a, const Ranked& b) {
        if (a.speed != b.speed) return a.speed > b.speed;
        return a.device_id < b.device_id;
    });
    for (const auto& r : kept) decision.selected.push_back(r.device_id);

    if (decision.selected.empty()) {
        throw NoCollaborators("no collaborator satisfies the task requirements: " +
                              spec.task_id);
    }
    return decision;
}

std::vector<double> proportional_split(double total_mb,
                                       const std::vector<double>& weights) {
    if (weights.empty()) return {};
    double weight_sum = 0;
    for (double w : weights) {
        if (w <= 0) throw ConfigError("split weights must be > 0");
        weight_sum += w;
    }
    const auto total = static_cast<long long>(std::llround(total_mb));

    std::vector<double> shares(weights.size());
    std::vector<long long> floors(weights.size());
    long long assigned = 0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        shares[i] = static_cast<double>(total) * weights[i] / weight_sum;
        floors[i] = static_cast<long long>(std::floor(shares[i]));
        assigned += floors[i];
    }
    // Hand out the remainder by largest fractional part; ties go to the
    // earlier (already deterministically ordered) collaborator.
    std::vector<std::size_t> order(weights.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return (shares[a] - std::floor(shares[a])) > (shares[b] - std::floor(shares[b]));
    });
    for (std::size_t i = 0; assigned < total; ++i) {
        floors[order[i % order.size()]] += 1;
        ++assigned;
    }
    std::vector<double> out(weights.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = static_cast<double>(floors[i]);
    return out;
}

TaskOwner::TaskOwner(std::string owner_id, wire::Network& net,
                     std::string trust_service_address, const util::Clock& clock,
                     EventSink events)
    : owner_id_(std::move(owner_id)), net_(net),
      trust_service_address_(std::move(trust_service_address)), clock_(clock),
      events_(std::move(events)) {}

TaskOwner::~TaskOwner() { close_all(); }

void TaskOwner::emit(Json event) {
    if (!events_) return;
    event["t"] = clock_.now_s();
    event["owner_id"] = owner_id_;
    events_(event);
}

trust::TrustReport TaskOwner::evaluate_via_service(const TaskSpec& spec) {
    const nlu::TaskDescription desc = render_description(spec);
    if (!service_conn_) {
        service_conn_ = wire::Connection::connect(net_, trust_service_address_,
                                                  {.client_name = owner_id_});
    }
    const auto manifest = service_conn_->list_tools();
    if (!manifest.has_tool("evaluate_trust")) {
        throw Error("trust service does not offer evaluate_trust");
    }
    emit(Json{{"ev", "evaluate_trust_call"},
              {"task", spec.task_id},
              {"description", desc.text}});
    const Json result = service_conn_->call_tool(
        "evaluate_trust", Json{{"description", desc.text},
                               {"owner_id", desc.owner_id},
                               {"data_size_mb", desc.data_size_mb}});
    auto report = trust::TrustReport::from_json(result);
    emit(Json{{"ev", "trust_report"},
              {"task", spec.task_id},
              {"entries", static_cast<int>(report.entries.size())}});
    return report;
}

wire::Connection& TaskOwner::connection_for(const Collaborator& collab) {
    for (auto& [id, conn] : agent_conns_) {
        if (id == collab.device_id && conn.is_open()) return conn;
    }
    agent_conns_.emplace_back(
        collab.device_id,
        wire::Connection::connect(net_, collab.agent_address,
                                  {.client_name = owner_id_}));
    return agent_conns_.back().second;
}

Assignment TaskOwner::deliver(const TaskSpec& spec, const Collaborator& collab,
                              double size_mb) {
    Assignment out;
    out.device_id = collab.device_id;
    out.size_mb = size_mb;
    out.subtask_id = spec.task_id + "/st" + std::to_string(next_subtask_++);

    emit(Json{{"ev", "assign_attempt"},
              {"task", spec.task_id},
              {"device", collab.device_id},
              {"subtask", out.subtask_id},
              {"size_mb", size_mb}});
    try {
        wire::Connection& conn = connection_for(collab);
        const Json reply = conn.call_tool(
            "receive_task", Json{{"task_id", spec.task_id},
                                 {"subtask_id", out.subtask_id},
                                 {"task_type", spec.task_type},
                                 {"data_size_mb", size_mb},
                                 {"required_accuracy", spec.required_accuracy}});
        out.accepted = reply.value("accepted", false);
        out.reject_reason = reply.value("reason", std::string{});
        out.estimated_completion_s = reply.value("estimated_completion_s", 0.0);
    } catch (const TransportError& e) {
        out.accepted = false;
        out.reject_reason = e.what();
    } catch (const ToolError& e) {
        out.accepted = false;
        out.reject_reason = e.what();
    }
    emit(Json{{"ev", "assign_result"},
              {"task", spec.task_id},
              {"device", collab.device_id},
              {"subtask", out.subtask_id},
              {"accepted", out.accepted},
              {"reason", out.reject_reason}});
    return out;
}

std::vector<Assignment> TaskOwner::split_and_assign(
    const TaskSpec& spec, const std::vector<Collaborator>& collabs) {
    if (collabs.empty()) {
        throw NoCollaborators("no collaborators to assign: " + spec.task_id);
    }
    std::vector<double> weights;
    for (const auto& c : collabs) weights.push_back(c.weight);
    const std::vector<double> pieces = proportional_split(spec.data_size_mb, weights);

    std::vector<Assignment> attempts;
    std::vector<Collaborator> acceptors;
    double rejected_mb = 0;
    for (std::size_t i = 0; i < collabs.size(); ++i) {
        if (pieces[i] <= 0) continue;
        Assignment a = deliver(spec, collabs[i], pieces[i]);
        if (a.accepted) {
            acceptors.push_back(collabs[i]);
        } else {
            rejected_mb += pieces[i];
        }
        attempts.push_back(std::move(a));
    }

    // Redistribute rejected work among acceptors until it sticks or nobody
    // will take it.
    int rounds = 0;
    while (rejected_mb > 0 && !acceptors.empty() && rounds < 4) {
        ++rounds;
        std::vector<double> aw;
        for (const auto& c : acceptors) aw.push_back(c.weight);
        const std::vector<double> extra = proportional_split(rejected_mb, aw);
        rejected_mb = 0;
        std::vector<Collaborator> next_acceptors;
        for (std::size_t i = 0; i < acceptors.size(); ++i) {
            if (extra[i] <= 0) {
                next_acceptors.push_back(acceptors[i]);
                continue;
            }
            Assignment a = deliver(spec, acceptors[i], extra[i]);
            if (a.accepted) {
                next_acceptors.push_back(acceptors[i]);
            } else {
                rejected_mb += extra[i];
            }
            attempts.push_back(std::move(a));
        }
        acceptors = std::move(next_acceptors);
    }

    bool any = false;
    for (const auto& a : attempts) any |= a.accepted;
    if (!any || rejected_mb > 0) {
        if (!any) {
            throw NoCollaborators("every collaborator rejected the task: " +
                                  spec.task_id);
        }
        throw NoCollaborators("task data could not be fully placed: " + spec.task_id);
    }
    return attempts;
}

std::vector<Assignment> TaskOwner::reassign(const TaskSpec& spec, double unprocessed_mb,
                                            const std::vector<Collaborator>& remaining) {
    if (unprocessed_mb <= 0) return {};
    if (remaining.empty()) return {};
    std::vector<double> weights;
    for (const auto& c : remaining) weights.push_back(c.weight);
    const std::vector<double> pieces = proportional_split(unprocessed_mb, weights);

    std::vector<Assignment> attempts;
    double rejected_mb = 0;
    std::vector<Collaborator> acceptors;
    for (std::size_t i = 0; i < remaining.size(); ++i) {
        if (pieces[i] <= 0) continue;
        Assignment a = deliver(spec, remaining[i], pieces[i]);
        if (a.accepted) acceptors.push_back(remaining[i]);
        else rejected_mb += pieces[i];
        attempts.push_back(std::move(a));
    }
    int rounds = 0;
    while (rejected_mb > 0 && !acceptors.empty() && rounds < 4) {
        ++rounds;
        std::vector<double> aw;
        for (const auto& c : acceptors) aw.push_back(c.weight);
        const std::vector<double> extra = proportional_split(rejected_mb, aw);
        rejected_mb = 0;
        for (std::size_t i = 0; i < acceptors.size(); ++i) {
            if (extra[i] <= 0) continue;
            Assignment a = deliver(spec, acceptors[i], extra[i]);
            if (!a.accepted) rejected_mb += extra[i];
            attempts.push_back(std::move(a));
        }
    }
    if (rejected_mb > 0) {
        // Marker row: this much work found no taker. The caller fails the task.
        attempts.push_back(Assignment{"", "", rejected_mb, false, "unplaced", 0});
    }
    return attempts;
}

void TaskOwner::close_all() {
    if (service_conn_) {
        service_conn_->close();
        service_conn_.reset();
    }
    for (auto& [id, conn] : agent_conns_) conn.close();
    agent_conns_.clear();
}

std::size_t TaskOwner::open_connections() const {
    std::size_t n = service_conn_ && service_conn_->is_open() ? 1 : 0;
    for (const auto& [id, conn] : agent_conns_) {
        if (conn.is_open()) ++n;
    }
    return n;
}

} // namespace taas::owner
