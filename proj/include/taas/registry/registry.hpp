#pragma once

#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "taas/json.hpp"

namespace taas::registry {

struct DeviceRecord {
    std::string device_id;
    std::string agent_address;
    std::set<std::string> supported_task_types;

    Json to_json() const;
    static DeviceRecord from_json(const Json& j);

    bool operator==(const DeviceRecord&) const = default;
};

/// The central server's device registry: who exists, where its agent server
/// lives, and which task types it supports. Registration hands back the
/// trust service address and establishes no session.
class Registry {
public:
    explicit Registry(std::string trust_service_address);

    /// Re-registration replaces the address and task-type set.
    /// Throws ConfigError on an empty task-type set or malformed address.
    std::string register_device(DeviceRecord rec);

    bool deregister(const std::string& device_id);

    /// Devices whose supported set contains `task_type`, ordered by id.
    std::vector<DeviceRecord> devices_supporting(const std::string& task_type) const;

    std::optional<DeviceRecord> find(const std::string& device_id) const;

    bool contains(const std::string& device_id) const;

    std::vector<DeviceRecord> all() const;

    /// Union of every device's supported types (the known vocabulary).
    std::set<std::string> known_task_types() const;

    std::string trust_service_address() const { return trust_service_address_; }

    Json snapshot_json() const;

private:
    std::string trust_service_address_;
    mutable std::mutex m_;
    std::map<std::string, DeviceRecord> devices_;
};

} // namespace taas::registry
