#include "taas/trust/report.hpp"

namespace taas::trust {

Json TrustReportEntry::to_json() const {
    return Json{{"device_id", device_id},
                {"historical", historical.to_json()},
                {"resource", resource.to_json()},
                {"semantic_his", semantic_his},
                {"semantic_res", semantic_res},
                {"agent_address", agent_address}};
}

TrustReportEntry TrustReportEntry::from_json(const Json& j) {
    TrustReportEntry e;
    e.device_id = j.at("device_id").get<std::string>();
    e.historical = HistoricalAssessment::from_json(j.at("historical"));
    e.resource = ResourceAssessment::from_json(j.at("resource"));
    e.semantic_his = j.at("semantic_his").get<std::string>();
    e.semantic_res = j.at("semantic_res").get<std::string>();
    e.agent_address = j.at("agent_address").get<std::string>();
    return e;
}

const TrustReportEntry* TrustReport::find(const std::string& device_id) const {
    for (const auto& e : entries) {
        if (e.device_id == device_id) return &e;
    }
    return nullptr;
}

Json TrustReport::to_json() const {
    Json arr = Json::array();
    for (const auto& e : entries) arr.push_back(e.to_json());
    return Json{{"entries", arr}};
}

TrustReport TrustReport::from_json(const Json& j) {
    TrustReport r;
    for (const auto& e : j.at("entries")) {
        r.entries.push_back(TrustReportEntry::from_json(e));
    }
    return r;
}

} // namespace taas::trust
