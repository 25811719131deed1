#include <doctest.h>

#include "support/envelope_gen.hpp"
#include "taas/util/errors.hpp"
#include "taas/wire/envelope.hpp"

using namespace taas;
using namespace taas::wire;

TEST_CASE("request encodes with JSON-RPC field names") {
    const auto e = Envelope::request(7, "tools/call",
                                     Json{{"name", "echo"}, {"arguments", Json{{"x", 1}}}});
    const std::string frame = encode(e);
    const Json j = Json::parse(frame);
    CHECK(j.at("jsonrpc") == "2.0");
    CHECK(j.at("id") == 7);
    CHECK(j.at("method") == "tools/call");
    CHECK(j.at("params").at("name") == "echo");
}

TEST_CASE("frames are single lines even with embedded newlines") {
    const auto e = Envelope::request(1, "tools/call",
                                     Json{{"text", "line one\nline two\r\nthree"}});
    const std::string frame = encode(e);
    CHECK(frame.find('\n') == std::string::npos);
    CHECK(frame.find('\r') == std::string::npos);
    CHECK(decode(frame) == e);
}

TEST_CASE("decode classifies kinds") {
    CHECK(decode(R"({"jsonrpc":"2.0","id":3,"method":"tools/list"})").kind ==
          Kind::Request);
    CHECK(decode(R"({"jsonrpc":"2.0","id":3,"result":{}})").kind == Kind::Response);
    CHECK(decode(R"({"jsonrpc":"2.0","id":3,"error":{"code":-32601,"message":"x"}})")
              .kind == Kind::Error);

    const auto notification = decode(R"({"jsonrpc":"2.0","method":"tools/list"})");
    CHECK(notification.kind == Kind::Request);
    CHECK_FALSE(notification.id.has_value());
}

TEST_CASE("decode rejects malformed frames") {
    CHECK_THROWS_AS(decode("not json"), CodecError);
    CHECK_THROWS_AS(decode("[1,2,3]"), CodecError);
    CHECK_THROWS_AS(decode(R"({"id":1})"), CodecError);
    CHECK_THROWS_AS(decode(R"({"id":1,"method":"x","result":{}})"), CodecError);
    CHECK_THROWS_AS(decode(R"({"result":{}})"), CodecError); // response without id
    CHECK_THROWS_AS(decode(R"({"id":"str","method":"x"})"), CodecError);
    CHECK_THROWS_AS(decode(R"({"id":1,"error":{"code":-1}})"), CodecError);
}

TEST_CASE("encode/decode round-trips generated envelopes") {
    util::SplitMix64 rng(0x5eed);
    for (int i = 0; i < 2000; ++i) {
        const Envelope e = testsupport::random_envelope(rng);
        const std::string frame = encode(e);
        CHECK(frame.find('\n') == std::string::npos);
        const Envelope back = decode(frame);
        REQUIRE(back == e);
    }
}
