#pragma once

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "taas/nlu/requirements.hpp"
#include "taas/registry/history_store.hpp"
#include "taas/trust/gates.hpp"

namespace taas::trust {

/// A device's self-reported resource state at evaluation time. Fields are
/// optional because a need-driven query only asks for what the task needs.
struct ResourceSnapshot {
    std::string device_id;
    std::optional<double> cpu_ghz;
    std::optional<double> available_storage_gb;
    double captured_at_s = 0;
};

/// Task-specific historical trustworthiness for one device. Only requested
/// dimensions are populated.
struct HistoricalAssessment {
    std::string device_id;
    std::string task_type;
    std::optional<double> mean_speed_mbps;
    std::optional<double> mean_accuracy;
    bool trustworthy = false;
    int sample_count = 0;

    Json to_json() const;
    static HistoricalAssessment from_json(const Json& j);
};

/// Task-specific resource trustworthiness for one device. Only requested
/// dimensions are populated.
struct ResourceAssessment {
    std::string device_id;
    std::optional<CpuClass> cpu_class;
    std::optional<double> cpu_ghz;
    std::optional<bool> storage_sufficient;
    std::optional<double> available_storage_gb;
    std::optional<double> required_storage_gb;
    bool trustworthy = true;

    Json to_json() const;
    static ResourceAssessment from_json(const Json& j);
};

/// Aggregates the requested dimensions over (already filtered) records and
/// applies the historical trust gate. Empty input yields an untrustworthy
/// assessment with sample_count 0 — a brand-new device has no standing.
HistoricalAssessment assess_history(const std::string& device_id,
                                    std::span<const registry::PerformanceRecord> records,
                                    const nlu::TaskRequirements& req,
                                    const TrustGates& gates);

/// Applies the task's resource thresholds to a snapshot. A CPU class floor
/// is met only by that class or better; storage is sufficient when the
/// available amount is at least the requirement.
ResourceAssessment assess_resources(const ResourceSnapshot& snapshot,
                                    const nlu::TaskRequirements& req,
                                    const TrustGates& gates);

/// Renders the assessments as fixed-template sentences, byte-reproducible
/// across runs. Omitted dimensions produce no clause.
std::pair<std::string, std::string> render_semantic(const HistoricalAssessment& his,
                                                    const ResourceAssessment& res,
                                                    const nlu::TaskRequirements& req);

} // namespace taas::trust
