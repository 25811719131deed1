#include "taas/nlu/external_interpreter.hpp"

#include <httplib.h>

namespace taas::nlu {

std::string PromptTemplate::render(const TaskDescription& desc) const {
    std::string out = text;
    const std::string placeholder = "{description}";
    const auto pos = out.find(placeholder);
    if (pos != std::string::npos) {
        out.replace(pos, placeholder.size(), desc.text);
    }
    return out;
}

HttpInterpreterClient::HttpInterpreterClient(std::string host, int port,
                                             std::chrono::milliseconds timeout)
    : host_(std::move(host)), port_(port), timeout_(timeout) {}

Json HttpInterpreterClient::interpret(const std::string& prompt) {
    httplib::Client cli(host_, port_);
    const auto secs = std::chrono::duration_cast<std::chrono::seconds>(timeout_);
    cli.set_connection_timeout(secs.count(), 0);
    cli.set_read_timeout(secs.count(), 0);
    const Json body{{"prompt", prompt}};
    auto res = cli.Post("/interpret", body.dump(), "application/json");
    if (!res || res->status != 200) {
        throw TransportError("interpreter endpoint unreachable: " + host_ + ":" +
                             std::to_string(port_));
    }
    return Json::parse(res->body);
}

TaskRequirements interpret_via_external(
    const TaskDescription& desc, ExternalInterpreterClient& client,
    const std::set<std::string>& known_types, const KeywordMap& keywords,
    const PromptTemplate& prompt,
    const std::function<void(const std::string&)>& log) {
    const auto fallback = [&](const std::string& reason) {
        if (log) log("external interpreter fallback: " + reason);
        return parse(desc, known_types, keywords);
    };

    Json reply;
    try {
        reply = client.interpret(prompt.render(desc));
    } catch (const std::exception& e) {
        return fallback(e.what());
    }

    TaskRequirements req;
    try {
        req = TaskRequirements::from_json(reply);
    } catch (const std::exception& e) {
        return fallback(std::string("malformed reply: ") + e.what());
    }

    if (!req.any_dimension() ||
        !requirements_witnessed_by_text(req, desc.text, known_types, keywords)) {
        return fallback("reply not supported by description");
    }
    return req;
}

} // namespace taas::nlu
