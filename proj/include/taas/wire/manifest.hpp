#pragma once

#include <string>
#include <vector>

#include "taas/json.hpp"

namespace taas::wire {

struct ToolSpec {
    std::string name;
    std::string description;
    Json input_schema = Json::object();

    Json to_json() const;
    static ToolSpec from_json(const Json& j);

    bool operator==(const ToolSpec&) const = default;
};

/// A server's advertised tool set. Always derived from the live handler
/// registry, never maintained by hand, so listing and dispatch cannot
/// disagree.
struct ToolManifest {
    std::string server_name;
    std::vector<ToolSpec> tools;

    bool has_tool(const std::string& name) const;
    /// Throws ConfigError if two tools share a name.
    void validate() const;

    Json to_json() const;
    static ToolManifest from_json(const Json& j);

    bool operator==(const ToolManifest&) const = default;
};

} // namespace taas::wire
