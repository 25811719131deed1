#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "taas/json.hpp"

namespace taas::wire {

// JSON-RPC 2.0 error codes used by the protocol layer.
inline constexpr int kParseError = -32700;
inline constexpr int kInvalidRequest = -32600;
inline constexpr int kMethodNotFound = -32601;
inline constexpr int kInvalidParams = -32602;
inline constexpr int kInternalError = -32603;
inline constexpr int kServerShuttingDown = -32000;

enum class Kind { Request, Response, Error };

struct ErrorInfo {
    int code = 0;
    std::string message;

    bool operator==(const ErrorInfo&) const = default;
};

/// One framed protocol message. A request carries `method` and `params`;
/// a response carries `result`; an error carries `error`. `id` correlates
/// responses and errors with the request they answer; a request without an
/// id is a notification and gets no reply.
struct Envelope {
    Kind kind = Kind::Request;
    std::optional<std::int64_t> id;
    std::string method;
    Json params;
    Json result;
    ErrorInfo error;

    static Envelope request(std::optional<std::int64_t> id, std::string method,
                            Json params = Json::object()) {
        Envelope e;
        e.kind = Kind::Request;
        e.id = id;
        e.method = std::move(method);
        e.params = std::move(params);
        return e;
    }

    static Envelope response(std::int64_t id, Json result) {
        Envelope e;
        e.kind = Kind::Response;
        e.id = id;
        e.result = std::move(result);
        return e;
    }

    static Envelope failure(std::optional<std::int64_t> id, int code,
                            std::string message) {
        Envelope e;
        e.kind = Kind::Error;
        e.id = id;
        e.error = ErrorInfo{code, std::move(message)};
        return e;
    }

    bool operator==(const Envelope&) const = default;
};

/// Serializes to a single line of UTF-8 JSON (no raw newlines; the framing
/// layer appends the terminating '\n').
std::string encode(const Envelope& e);

/// Parses one frame. Throws CodecError on malformed input or on a message
/// that violates the envelope rules (e.g. request without method, response
/// without id).
Envelope decode(std::string_view frame);

} // namespace taas::wire
