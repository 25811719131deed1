#pragma once

#include <chrono>
#include <functional>
#include <string>

#include "taas/nlu/parser.hpp"
#include "taas/nlu/requirements.hpp"

namespace taas::nlu {

/// Prompt sent to an external interpreter service. `{description}` is
/// replaced with the task description text.
struct PromptTemplate {
    std::string text =
        "Extract the task requirements from the description below and reply "
        "with a JSON object containing task_type, history_window_s, "
        "history_dimensions and resource_requirements.\n"
        "Description: {description}";

    std::string render(const TaskDescription& desc) const;
};

/// Client for an external language-model interpreter. Implementations throw
/// on transport failure or timeout.
class ExternalInterpreterClient {
public:
    virtual ~ExternalInterpreterClient() = default;

    /// Returns the service's structured reply (a TaskRequirements JSON).
    virtual Json interpret(const std::string& prompt) = 0;
};

/// POSTs {"prompt": ...} to `<endpoint>/interpret` and expects a
/// TaskRequirements JSON object back.
class HttpInterpreterClient final : public ExternalInterpreterClient {
public:
    HttpInterpreterClient(std::string host, int port,
                          std::chrono::milliseconds timeout = std::chrono::seconds(5));

    Json interpret(const std::string& prompt) override;

private:
    std::string host_;
    int port_;
    std::chrono::milliseconds timeout_;
};

/// Interprets via the external client, validating the reply against the
/// description (task type must be known; every requirement must be
/// witnessed by the text). Falls back to the deterministic parser when the
/// client fails or returns something invalid; fallbacks are reported via
/// `log`.
TaskRequirements interpret_via_external(
    const TaskDescription& desc, ExternalInterpreterClient& client,
    const std::set<std::string>& known_types,
    const KeywordMap& keywords = KeywordMap::defaults(),
    const PromptTemplate& prompt = {},
    const std::function<void(const std::string&)>& log = nullptr);

} // namespace taas::nlu
