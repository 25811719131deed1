#pragma once

#include <string>

#include "taas/util/errors.hpp"

namespace taas {

/// Which historical performance dimensions an evaluation should touch.
/// Dimensions that are not requested must never be computed, transmitted,
/// or rendered.
struct HistoryDimensions {
    bool processing_speed = false;
    bool completion_accuracy = false;

    bool any() const { return processing_speed || completion_accuracy; }

    bool operator==(const HistoryDimensions&) const = default;
};

enum class CpuClass { Low, Moderate, High };

inline const char* to_string(CpuClass c) {
    switch (c) {
    case CpuClass::Low: return "low";
    case CpuClass::Moderate: return "moderate";
    case CpuClass::High: return "high";
    }
    return "low";
}

inline CpuClass cpu_class_from_string(const std::string& s) {
    if (s == "low") return CpuClass::Low;
    if (s == "moderate") return CpuClass::Moderate;
    if (s == "high") return CpuClass::High;
    throw ConfigError("unknown cpu class: " + s);
}

} // namespace taas
