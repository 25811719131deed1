#pragma once

#include <filesystem>
#include <map>
#include <set>
#include <string>

#include "taas/nlu/requirements.hpp"
#include "taas/util/errors.hpp"

namespace taas::nlu {

class ParseError : public Error {
public:
    using Error::Error;
};

/// Keyword-to-dimension mapping. Ships as configuration so the vocabulary
/// can grow without code changes; see config/keyword_map.json.
struct KeywordMap {
    struct Effects {
        bool processing_speed = false;
        bool completion_accuracy = false;
        std::optional<CpuClass> min_cpu_class;
    };

    std::map<std::string, Effects> keywords;

    static KeywordMap defaults();
    static KeywordMap from_json(const Json& j);
    static KeywordMap load(const std::filesystem::path& path);
    Json to_json() const;
};

/// Deterministic interpretation of a task description. Pure function of
/// (text, known_types, keyword map):
///   - task type: the longest known type phrase occurring in the text
///   - "<number> GB|MB" becomes a storage floor
///   - keywords activate history dimensions and CPU class floors
///   - "past week" / "past N days|hours" set the history window
///     (default one week)
/// Throws ParseError when no known task type occurs or when no dimension at
/// all can be extracted.
TaskRequirements parse(const TaskDescription& desc,
                       const std::set<std::string>& known_types,
                       const KeywordMap& keywords = KeywordMap::defaults());

/// Need-driven witness check: true iff every requirement in `req` traces to
/// a phrase in the text (used to vet externally produced requirements).
bool requirements_witnessed_by_text(const TaskRequirements& req,
                                    const std::string& text,
                                    const std::set<std::string>& known_types,
                                    const KeywordMap& keywords = KeywordMap::defaults());

} // namespace taas::nlu
