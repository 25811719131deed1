#pragma once

#include <functional>
#include <string>
#include <vector>

#include "taas/json.hpp"
#include "taas/util/rng.hpp"
#include "taas/wire/envelope.hpp"

namespace taas::testsupport {

/// Random but decode-valid envelopes, including awkward payloads: embedded
/// newlines, unicode, deep-ish nesting, empty objects.
inline wire::Envelope random_envelope(util::SplitMix64& rng) {
    using wire::Envelope;
    using wire::Kind;

    auto random_string = [&rng]() {
        static const std::vector<std::string> atoms = {
            "alpha", "line\nbreak", "tab\tchar", "quote\"quote", "",
            "ünïcode-ß", "back\\slash", "{jsonish}", "  spaced  ",
        };
        return atoms[rng.index(atoms.size())];
    };

    std::function<Json(int)> random_value = [&](int depth) -> Json {
        switch (rng.index(depth > 2 ? 5 : 7)) {
        case 0: return Json(static_cast<std::int64_t>(rng.next() % 100000));
        case 1: return Json(rng.uniform(-10.0, 10.0));
        case 2: return Json(random_string());
        case 3: return Json(rng.index(2) == 0);
        case 4: return Json(nullptr);
        case 5: {
            Json arr = Json::array();
            const auto n = rng.index(3);
            for (std::size_t i = 0; i < n; ++i) arr.push_back(random_value(depth + 1));
            return arr;
        }
        default: {
            Json obj = Json::object();
            const auto n = rng.index(3);
            for (std::size_t i = 0; i < n; ++i) {
                obj["k" + std::to_string(i)] = random_value(depth + 1);
            }
            return obj;
        }
        }
    };

    const auto kind_pick = rng.index(4);
    if (kind_pick == 0) {
        // notification: request without id
        return Envelope::request(std::nullopt, "tools/list", random_value(0).is_object()
                                                                 ? random_value(0)
                                                                 : Json::object());
    }
    if (kind_pick == 1) {
        static const std::vector<std::string> methods = {"initialize", "tools/list",
                                                         "tools/call"};
        Json params = Json::object();
        params["payload"] = random_value(0);
        return Envelope::request(static_cast<std::int64_t>(rng.next() % 1000000),
                                 methods[rng.index(methods.size())], params);
    }
    if (kind_pick == 2) {
        Json result = Json::object();
        result["value"] = random_value(0);
        return Envelope::response(static_cast<std::int64_t>(rng.next() % 1000000),
                                  result);
    }
    return Envelope::failure(static_cast<std::int64_t>(rng.next() % 1000000),
                             -32000 - static_cast<int>(rng.index(700)),
                             random_string());
}

} // namespace taas::testsupport
