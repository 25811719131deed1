#include "taas/wire/manifest.hpp"

#include <set>

#include "taas/util/errors.hpp"

namespace taas::wire {

Json ToolSpec::to_json() const {
    return Json{{"name", name},
                {"description", description},
                {"input_schema", input_schema}};
}

ToolSpec ToolSpec::from_json(const Json& j) {
    ToolSpec t;
    t.name = j.at("name").get<std::string>();
    t.description = j.value("description", std::string{});
    t.input_schema = j.value("input_schema", Json::object());
    return t;
}

bool ToolManifest::has_tool(const std::string& name) const {
    for (const auto& t : tools) {
        if (t.name == name) return true;
    }
    return false;
}

void ToolManifest::validate() const {
    std::set<std::string> seen;
    for (const auto& t : tools) {
        if (t.name.empty()) {
            throw ConfigError("tool name must be non-empty");
        }
        if (!seen.insert(t.name).second) {
            throw ConfigError("duplicate tool name in manifest: " + t.name);
        }
    }
}

Json ToolManifest::to_json() const {
    Json arr = Json::array();
    for (const auto& t : tools) {
        arr.push_back(t.to_json());
    }
    return Json{{"server_name", server_name}, {"tools", arr}};
}

ToolManifest ToolManifest::from_json(const Json& j) {
    ToolManifest m;
    m.server_name = j.value("server_name", std::string{});
    for (const auto& t : j.at("tools")) {
        m.tools.push_back(ToolSpec::from_json(t));
    }
    m.validate();
    return m;
}

} // namespace taas::wire
