#pragma once

#include <string>
#include <vector>

#include "taas/trust/assess.hpp"

namespace taas::trust {

/// One evaluated collaborator candidate: assessments, their semantic
/// renderings, and the address of the device's agent server.
struct TrustReportEntry {
    std::string device_id;
    HistoricalAssessment historical;
    ResourceAssessment resource;
    std::string semantic_his;
    std::string semantic_res;
    std::string agent_address;

    Json to_json() const;
    static TrustReportEntry from_json(const Json& j);
};

/// Output of evaluate_trust: entries only for devices that passed the
/// historical gate, ordered by device id.
struct TrustReport {
    std::vector<TrustReportEntry> entries;

    const TrustReportEntry* find(const std::string& device_id) const;

    Json to_json() const;
    static TrustReport from_json(const Json& j);
};

} // namespace taas::trust
