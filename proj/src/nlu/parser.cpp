#include "taas/nlu/parser.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <regex>

namespace taas::nlu {

namespace {

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    return s;
}

bool is_word_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

/// Case-insensitive whole-word phrase search.
bool contains_phrase(const std::string& lowered_text, const std::string& phrase) {
    const std::string needle = lower(phrase);
    std::size_t pos = 0;
    while ((pos = lowered_text.find(needle, pos)) != std::string::npos) {
        const bool left_ok = pos == 0 || !is_word_char(lowered_text[pos - 1]);
        const std::size_t end = pos + needle.size();
        const bool right_ok = end >= lowered_text.size() || !is_word_char(lowered_text[end]);
        if (left_ok && right_ok) return true;
        ++pos;
    }
    return false;
}

const std::regex kSizeRe(R"((\d+(?:\.\d+)?)\s*(gb|mb)\b)",
                         std::regex::icase | std::regex::optimize);
const std::regex kPastDaysRe(R"(past\s+(\d+)\s+days?\b)",
                             std::regex::icase | std::regex::optimize);
const std::regex kPastHoursRe(R"(past\s+(\d+)\s+hours?\b)",
                              std::regex::icase | std::regex::optimize);
const std::regex kPastSecondsRe(R"(past\s+(\d+)\s+seconds?\b)",
                                std::regex::icase | std::regex::optimize);

} // namespace

Json TaskRequirements::to_json() const {
    Json dims = Json::array();
    if (history_dims.processing_speed) dims.push_back("processing_speed");
    if (history_dims.completion_accuracy) dims.push_back("completion_accuracy");
    Json res = Json::object();
    if (resources.min_storage_gb) res["min_storage_gb"] = *resources.min_storage_gb;
    if (resources.min_cpu_class) res["min_cpu_class"] = to_string(*resources.min_cpu_class);
    return Json{{"task_type", task_type},
                {"history_window_s", history_window_s},
                {"history_dimensions", dims},
                {"resource_requirements", res}};
}

TaskRequirements TaskRequirements::from_json(const Json& j) {
    TaskRequirements req;
    req.task_type = j.at("task_type").get<std::string>();
    req.history_window_s = j.value("history_window_s", 604800.0);
    for (const auto& d : j.value("history_dimensions", Json::array())) {
        const auto name = d.get<std::string>();
        if (name == "processing_speed") req.history_dims.processing_speed = true;
        else if (name == "completion_accuracy") req.history_dims.completion_accuracy = true;
        else throw ConfigError("unknown history dimension: " + name);
    }
    const Json res = j.value("resource_requirements", Json::object());
    if (res.contains("min_storage_gb")) {
        req.resources.min_storage_gb = res.at("min_storage_gb").get<double>();
    }
    if (res.contains("min_cpu_class")) {
        req.resources.min_cpu_class =
            cpu_class_from_string(res.at("min_cpu_class").get<std::string>());
    }
    return req;
}

KeywordMap KeywordMap::defaults() {
    KeywordMap m;
    m.keywords["fast"] = Effects{true, false, CpuClass::High};
    m.keywords["quick"] = Effects{true, false, CpuClass::High};
    m.keywords["accurate"] = Effects{false, true, std::nullopt};
    m.keywords["accuracy"] = Effects{false, true, std::nullopt};
    return m;
}

KeywordMap KeywordMap::from_json(const Json& j) {
    KeywordMap m;
    for (const auto& [word, eff] : j.at("keywords").items()) {
        Effects e;
        for (const auto& d : eff.value("history_dimensions", Json::array())) {
            const auto name = d.get<std::string>();
            if (name == "processing_speed") e.processing_speed = true;
            else if (name == "completion_accuracy") e.completion_accuracy = true;
            else throw ConfigError("unknown history dimension: " + name);
        }
        if (eff.contains("min_cpu_class")) {
            e.min_cpu_class = cpu_class_from_string(eff.at("min_cpu_class").get<std::string>());
        }
        m.keywords[lower(word)] = e;
    }
    if (m.keywords.empty()) throw ConfigError("keyword map has no keywords");
    return m;
}

KeywordMap KeywordMap::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in.is_open()) throw ConfigError("cannot open keyword map: " + path.string());
    return from_json(Json::parse(in));
}

Json KeywordMap::to_json() const {
    Json words = Json::object();
    for (const auto& [word, e] : keywords) {
        Json dims = Json::array();
        if (e.processing_speed) dims.push_back("processing_speed");
        if (e.completion_accuracy) dims.push_back("completion_accuracy");
        Json entry{{"history_dimensions", dims}};
        if (e.min_cpu_class) entry["min_cpu_class"] = to_string(*e.min_cpu_class);
        words[word] = entry;
    }
    return Json{{"keywords", words}};
}

TaskRequirements parse(const TaskDescription& desc,
                       const std::set<std::string>& known_types,
                       const KeywordMap& keywords) {
    if (desc.text.empty()) throw ParseError("empty task description");
    if (known_types.empty()) throw ParseError("no known task types");
    const std::string text = lower(desc.text);

    TaskRequirements req;

    // Longest known type phrase wins; length ties break lexicographically
    // so the result is deterministic.
    for (const auto& type : known_types) {
        if (!contains_phrase(text, type)) continue;
        if (type.size() > req.task_type.size() ||
            (type.size() == req.task_type.size() && type < req.task_type)) {
            req.task_type = type;
        }
    }
    if (req.task_type.empty()) {
        throw ParseError("no known task type in description: " + desc.text);
    }

    // Data size phrase -> storage floor. The first size mention wins.
    std::smatch m;
    if (std::regex_search(text, m, kSizeRe)) {
        const double value = std::stod(m[1].str());
        const bool is_gb = lower(m[2].str()) == "gb";
        req.resources.min_storage_gb = is_gb ? value : value / 1024.0;
    }

    for (const auto& [word, effects] : keywords.keywords) {
        if (!contains_phrase(text, word)) continue;
        req.history_dims.processing_speed |= effects.processing_speed;
        req.history_dims.completion_accuracy |= effects.completion_accuracy;
        if (effects.min_cpu_class) {
            if (!req.resources.min_cpu_class ||
                static_cast<int>(*effects.min_cpu_class) >
                    static_cast<int>(*req.resources.min_cpu_class)) {
                req.resources.min_cpu_class = effects.min_cpu_class;
            }
        }
    }

    if (contains_phrase(text, "past week")) {
        req.history_window_s = 604800;
    } else if (std::regex_search(text, m, kPastDaysRe)) {
        req.history_window_s = std::stod(m[1].str()) * 86400;
    } else if (std::regex_search(text, m, kPastHoursRe)) {
        req.history_window_s = std::stod(m[1].str()) * 3600;
    } else if (std::regex_search(text, m, kPastSecondsRe)) {
        req.history_window_s = std::stod(m[1].str());
    }

    if (!req.any_dimension()) {
        throw ParseError("no evaluation dimensions in description: " + desc.text);
    }
    return req;
}

bool requirements_witnessed_by_text(const TaskRequirements& req,
                                    const std::string& raw_text,
                                    const std::set<std::string>& known_types,
                                    const KeywordMap& keywords) {
    if (!known_types.count(req.task_type)) return false;
    TaskRequirements baseline;
    try {
        baseline = parse(TaskDescription{raw_text, "", 0}, known_types, keywords);
    } catch (const ParseError&) {
        return false;
    }
    if (baseline.task_type != req.task_type) return false;
    if (req.history_dims.processing_speed && !baseline.history_dims.processing_speed) {
        return false;
    }
    if (req.history_dims.completion_accuracy &&
        !baseline.history_dims.completion_accuracy) {
        return false;
    }
    if (req.resources.min_storage_gb && !baseline.resources.min_storage_gb) return false;
    if (req.resources.min_cpu_class && !baseline.resources.min_cpu_class) return false;
    return true;
}

} // namespace taas::nlu
