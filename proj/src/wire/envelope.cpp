#include "taas/wire/envelope.hpp"

#include "taas/util/errors.hpp"

namespace taas::wire {

std::string encode(const Envelope& e) {
    Json j;
    j["jsonrpc"] = "2.0";
    if (e.id) {
        j["id"] = *e.id;
    }
    switch (e.kind) {
    case Kind::Request:
        j["method"] = e.method;
        j["params"] = e.params;
        break;
    case Kind::Response:
        j["result"] = e.result;
        break;
    case Kind::Error:
        j["error"] = Json{{"code", e.error.code}, {"message", e.error.message}};
        break;
    }
    // nlohmann dumps escape control characters, so the frame is one line.
    return j.dump();
}

Envelope decode(std::string_view frame) {
    Json j = Json::parse(frame, nullptr, false);
    if (j.is_discarded() || !j.is_object()) {
        throw CodecError("frame is not a JSON object");
    }

    Envelope e;
    if (j.contains("id")) {
        const Json& id = j.at("id");
        if (!id.is_number_integer()) {
            throw CodecError("id must be an integer");
        }
        e.id = id.get<std::int64_t>();
    }

    const bool has_method = j.contains("method");
    const bool has_result = j.contains("result");
    const bool has_error = j.contains("error");
    if (has_method + has_result + has_error != 1) {
        throw CodecError("frame must have exactly one of method/result/error");
    }

    if (has_method) {
        e.kind = Kind::Request;
        if (!j.at("method").is_string()) {
            throw CodecError("method must be a string");
        }
        e.method = j.at("method").get<std::string>();
        e.params = j.value("params", Json::object());
    } else if (has_result) {
        e.kind = Kind::Response;
        if (!e.id) {
            throw CodecError("response must carry the id of a request");
        }
        e.result = j.at("result");
    } else {
        e.kind = Kind::Error;
        const Json& err = j.at("error");
        if (!err.is_object() || !err.contains("code") || !err.contains("message")) {
            throw CodecError("error must carry code and message");
        }
        e.error.code = err.at("code").get<int>();
        e.error.message = err.at("message").get<std::string>();
    }
    return e;
}

} // namespace taas::wire
