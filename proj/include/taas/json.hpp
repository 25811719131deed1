#pragma once

#include <json.hpp>

namespace taas {

using Json = nlohmann::json;

} // namespace taas
