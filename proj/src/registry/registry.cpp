#include "taas/registry/registry.hpp"

#include "taas/util/errors.hpp"

namespace taas::registry {

namespace {

bool valid_locator(const std::string& address) {
    return (address.rfind("mem:", 0) == 0 && address.size() > 4) ||
           (address.rfind("tcp:", 0) == 0 && address.find(':', 4) != std::string::npos);
}

} // namespace

Json DeviceRecord::to_json() const {
    return Json{{"device_id", device_id},
                {"agent_address", agent_address},
                {"supported_task_types", supported_task_types}};
}

DeviceRecord DeviceRecord::from_json(const Json& j) {
    DeviceRecord r;
    r.device_id = j.at("device_id").get<std::string>();
    r.agent_address = j.at("agent_address").get<std::string>();
    for (const auto& t : j.at("supported_task_types")) {
        r.supported_task_types.insert(t.get<std::string>());
    }
    return r;
}

Registry::Registry(std::string trust_service_address)
    : trust_service_address_(std::move(trust_service_address)) {}

std::string Registry::register_device(DeviceRecord rec) {
    if (rec.device_id.empty()) {
        throw ConfigError("device_id must be non-empty");
    }
    if (rec.supported_task_types.empty()) {
        throw ConfigError("device must register at least one supported task type: " +
                          rec.device_id);
    }
    if (!valid_locator(rec.agent_address)) {
        throw ConfigError("malformed agent address: " + rec.agent_address);
    }
    std::lock_guard lk(m_);
    devices_[rec.device_id] = std::move(rec);
    return trust_service_address_;
}

bool Registry::deregister(const std::string& device_id) {
    std::lock_guard lk(m_);
    return devices_.erase(device_id) > 0;
}

std::vector<DeviceRecord> Registry::devices_supporting(const std::string& task_type) const {
    std::lock_guard lk(m_);
    std::vector<DeviceRecord> out;
    for (const auto& [id, rec] : devices_) {
        if (rec.supported_task_types.count(task_type)) {
            out.push_back(rec);
        }
    }
    return out; // map iteration is already id-ordered
}

std::optional<DeviceRecord> Registry::find(const std::string& device_id) const {
    std::lock_guard lk(m_);
    auto it = devices_.find(device_id);
    if (it == devices_.end()) return std::nullopt;
    return it->second;
}

bool Registry::contains(const std::string& device_id) const {
    std::lock_guard lk(m_);
    return devices_.count(device_id) > 0;
}

std::vector<DeviceRecord> Registry::all() const {
    std::lock_guard lk(m_);
    std::vector<DeviceRecord> out;
    for (const auto& [id, rec] : devices_) out.push_back(rec);
    return out;
}

std::set<std::string> Registry::known_task_types() const {
    std::lock_guard lk(m_);
    std::set<std::string> types;
    for (const auto& [id, rec] : devices_) {
        types.insert(rec.supported_task_types.begin(), rec.supported_task_types.end());
    }
    return types;
}

Json Registry::snapshot_json() const {
    Json devices = Json::array();
    for (const auto& rec : all()) devices.push_back(rec.to_json());
    return Json{{"trust_service_address", trust_service_address_},
                {"devices", devices}};
}

} // namespace taas::registry
