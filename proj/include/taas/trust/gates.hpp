#pragma once

#include <filesystem>

#include "taas/core_types.hpp"
#include "taas/json.hpp"

namespace taas::trust {

/// Thresholds behind the historical trust gate and the CPU speed classes.
/// Defaults reproduce the reference behaviors (2 GHz is moderate, 6 GHz is
/// high); all of them are configuration, not discovery.
struct TrustGates {
    int min_samples = 3;
    double min_accuracy = 0.95;
    double min_speed_mbps = 5.0;
    double cpu_low_below_ghz = 1.5;  ///< below this: low
    double cpu_high_from_ghz = 4.0;  ///< at or above this: high

    void validate() const;

    Json to_json() const;
    static TrustGates from_json(const Json& j);
    static TrustGates load(const std::filesystem::path& path);
};

CpuClass classify_cpu(double cpu_ghz, const TrustGates& gates);

} // namespace taas::trust
