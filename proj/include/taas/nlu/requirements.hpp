#pragma once

#include <optional>
#include <set>
#include <string>

#include "taas/core_types.hpp"
#include "taas/json.hpp"

namespace taas::nlu {

struct TaskDescription {
    std::string text;
    std::string owner_id;
    double data_size_mb = 0;
};

/// Resource thresholds a task imposes on collaborators. Only fields that
/// trace back to a phrase in the description are ever set.
struct ResourceRequirements {
    std::optional<double> min_storage_gb;
    std::optional<CpuClass> min_cpu_class;

    bool any() const { return min_storage_gb.has_value() || min_cpu_class.has_value(); }

    bool operator==(const ResourceRequirements&) const = default;
};

/// The computable form of a natural-language task description.
struct TaskRequirements {
    std::string task_type;
    double history_window_s = 604800; // "past week"
    HistoryDimensions history_dims;
    ResourceRequirements resources;

    bool any_dimension() const { return history_dims.any() || resources.any(); }

    Json to_json() const;
    static TaskRequirements from_json(const Json& j);

    bool operator==(const TaskRequirements&) const = default;
};

} // namespace taas::nlu
