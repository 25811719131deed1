#pragma once

#include <functional>

#include "taas/json.hpp"

namespace taas {

/// Structured event consumer (trace log). Events are JSON objects with at
/// least {"t": <virtual seconds>, "ev": <name>}.
using EventSink = std::function<void(const Json&)>;

} // namespace taas
