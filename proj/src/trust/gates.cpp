#include "taas/trust/gates.hpp"

#include <fstream>

#include "taas/util/errors.hpp"

namespace taas::trust {

void TrustGates::validate() const {
    if (min_samples < 0) throw ConfigError("min_samples must be >= 0");
    if (min_accuracy < 0 || min_accuracy > 1) {
        throw ConfigError("min_accuracy must be within [0, 1]");
    }
    if (min_speed_mbps < 0) throw ConfigError("min_speed_mbps must be >= 0");
    if (cpu_low_below_ghz <= 0 || cpu_high_from_ghz <= cpu_low_below_ghz) {
        throw ConfigError("cpu class boundaries must satisfy 0 < low < high");
    }
}

Json TrustGates::to_json() const {
    return Json{{"min_samples", min_samples},
                {"min_accuracy", min_accuracy},
                {"min_speed_mbps", min_speed_mbps},
                {"cpu_low_below_ghz", cpu_low_below_ghz},
                {"cpu_high_from_ghz", cpu_high_from_ghz}};
}

TrustGates TrustGates::from_json(const Json& j) {
    TrustGates g;
    g.min_samples = j.value("min_samples", g.min_samples);
    g.min_accuracy = j.value("min_accuracy", g.min_accuracy);
    g.min_speed_mbps = j.value("min_speed_mbps", g.min_speed_mbps);
    g.cpu_low_below_ghz = j.value("cpu_low_below_ghz", g.cpu_low_below_ghz);
    g.cpu_high_from_ghz = j.value("cpu_high_from_ghz", g.cpu_high_from_ghz);
    g.validate();
    return g;
}

TrustGates TrustGates::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in.is_open()) throw ConfigError("cannot open gates config: " + path.string());
    return from_json(Json::parse(in));
}

CpuClass classify_cpu(double cpu_ghz, const TrustGates& gates) {
    if (cpu_ghz < gates.cpu_low_below_ghz) return CpuClass::Low;
    if (cpu_ghz < gates.cpu_high_from_ghz) return CpuClass::Moderate;
    return CpuClass::High;
}

} // namespace taas::trust
