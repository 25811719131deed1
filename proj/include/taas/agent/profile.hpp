#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "taas/json.hpp"

namespace taas::agent {

struct TaskTypeModel {
    double nominal_speed_mbps = 1.0;
    double accuracy = 1.0;
};

/// Scripted behavior change: from `time_s` on, the device runs at the given
/// speed and/or accuracy (device-wide, all task types). Models degradation
/// and crashes without any wall-clock machinery.
struct FaultEvent {
    double time_s = 0;
    std::optional<double> speed_mbps;
    std::optional<double> accuracy;
};

struct DeviceProfile {
    std::string device_id;
    double cpu_ghz = 1.0;
    double total_storage_gb = 1.0;
    std::map<std::string, TaskTypeModel> task_types;
    std::vector<FaultEvent> fault_plan; // applied in time order

    std::set<std::string> supported_types() const;

    void validate() const;

    Json to_json() const;
    static DeviceProfile from_json(const Json& j);
};

} // namespace taas::agent
