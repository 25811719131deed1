#include <doctest.h>

#include <atomic>
#include <chrono>
#include <thread>
#include <vector>

#include "taas/util/errors.hpp"
#include "taas/wire/connection.hpp"
#include "taas/wire/network.hpp"
#include "taas/wire/server.hpp"

using namespace taas;
using namespace taas::wire;
using namespace std::chrono_literals;

namespace {

ToolSpec spec(const std::string& name) {
    return ToolSpec{name, "test tool", Json{{"type", "object"}}};
}

Json echo_handler(const Json& args) { return args; }

} // namespace

TEST_CASE("serve requires manifest and handlers to agree") {
    auto net = make_mem_network();
    ToolManifest m{"srv", {spec("a"), spec("b"), spec("c")}};
    HandlerMap two = {{"a", echo_handler}, {"b", echo_handler}};
    CHECK_THROWS_AS(serve(*net, "mem:x", m, two), ManifestMismatch);

    HandlerMap extra = {{"a", echo_handler}, {"b", echo_handler},
                        {"c", echo_handler}, {"d", echo_handler}};
    CHECK_THROWS_AS(serve(*net, "mem:x", m, extra), ManifestMismatch);

    ToolManifest dup{"srv", {spec("a"), spec("a")}};
    CHECK_THROWS_AS(serve(*net, "mem:x", dup, HandlerMap{{"a", echo_handler}}),
                    ConfigError);
}

TEST_CASE("empty manifest serves an empty tool list") {
    auto net = make_mem_network();
    auto srv = serve(*net, "mem:empty", ToolManifest{"empty", {}}, {});
    auto conn = Connection::connect(*net, "mem:empty");
    CHECK(conn.list_tools().tools.empty());
}

TEST_CASE("single-tool server lists exactly one tool") {
    auto net = make_mem_network();
    auto srv = serve(*net, "mem:trust", ToolManifest{"trust", {spec("evaluate_trust")}},
                     {{"evaluate_trust", echo_handler}});
    auto conn = Connection::connect(*net, "mem:trust");
    const auto manifest = conn.list_tools();
    REQUIRE(manifest.tools.size() == 1);
    CHECK(manifest.tools[0].name == "evaluate_trust");
}

TEST_CASE("address can only be bound once") {
    auto net = make_mem_network();
    auto srv = serve(*net, "mem:dup", ToolManifest{"a", {}}, {});
    CHECK_THROWS_AS(serve(*net, "mem:dup", ToolManifest{"b", {}}, {}), AddressInUse);
}

TEST_CASE("connect to missing server is unreachable") {
    auto net = make_mem_network();
    CHECK_THROWS_AS(Connection::connect(*net, "mem:nowhere"), Unreachable);
}

TEST_CASE("initialize rejection fails the connect") {
    auto net = make_mem_network();
    ServerOptions opts;
    opts.accept_initialize = false;
    auto srv = serve(*net, "mem:closed-door", ToolManifest{"x", {}}, {}, opts);
    CHECK_THROWS_AS(Connection::connect(*net, "mem:closed-door"), RpcError);
}

TEST_CASE("two connects yield independent connections") {
    auto net = make_mem_network();
    auto srv = serve(*net, "mem:multi", ToolManifest{"m", {spec("echo")}},
                     {{"echo", echo_handler}});
    auto c1 = Connection::connect(*net, "mem:multi");
    auto c2 = Connection::connect(*net, "mem:multi");
    CHECK(c1.call_tool("echo", Json{{"who", 1}}) == Json{{"who", 1}});
    CHECK(c2.call_tool("echo", Json{{"who", 2}}) == Json{{"who", 2}});
    c1.close();
    CHECK(c2.call_tool("echo", Json{{"who", 2}}) == Json{{"who", 2}});
}

TEST_CASE("unknown tool yields a method-not-found class error") {
    auto net = make_mem_network();
    auto srv = serve(*net, "mem:u", ToolManifest{"u", {spec("echo")}},
                     {{"echo", echo_handler}});
    auto conn = Connection::connect(*net, "mem:u");
    try {
        conn.call_tool("no_such_tool", Json::object());
        FAIL("expected RpcError");
    } catch (const RpcError& e) {
        CHECK(e.code() == kMethodNotFound);
    }
}

TEST_CASE("handler exceptions surface as tool errors with the message") {
    auto net = make_mem_network();
    auto srv = serve(*net, "mem:boom", ToolManifest{"b", {spec("boom")}},
                     {{"boom", [](const Json&) -> Json {
                           throw std::runtime_error("kaboom: bad argument");
                       }}});
    auto conn = Connection::connect(*net, "mem:boom");
    CHECK_THROWS_WITH_AS(conn.call_tool("boom", Json::object()),
                         "kaboom: bad argument", ToolError);
}

TEST_CASE("manifest reflects tools added after startup") {
    auto net = make_mem_network();
    auto srv = serve(*net, "mem:grow",
                     ToolManifest{"dev", {spec("report_resource"), spec("receive_task"),
                                          spec("report_performance")}},
                     {{"report_resource", echo_handler},
                      {"receive_task", echo_handler},
                      {"report_performance", echo_handler}});
    auto conn = Connection::connect(*net, "mem:grow");
    CHECK(conn.list_tools().tools.size() == 3);

    srv.add_tool(spec("report_battery"),
                 [](const Json&) { return Json{{"battery", 0.87}}; });
    const auto manifest = conn.list_tools();
    CHECK(manifest.tools.size() == 4);
    CHECK(manifest.has_tool("report_battery"));
    CHECK(conn.call_tool("report_battery", Json::object()) == Json{{"battery", 0.87}});

    CHECK_THROWS_AS(srv.add_tool(spec("receive_task"), echo_handler), ToolCollision);
}

TEST_CASE("manifest equals registered handler set at all times") {
    auto net = make_mem_network();
    auto srv = serve(*net, "mem:faithful", ToolManifest{"f", {spec("t1")}},
                     {{"t1", echo_handler}});
    auto conn = Connection::connect(*net, "mem:faithful");
    for (int i = 2; i <= 5; ++i) {
        srv.add_tool(spec("t" + std::to_string(i)), echo_handler);
        const auto listed = conn.list_tools();
        CHECK(listed.tools.size() == static_cast<std::size_t>(i));
        // every listed tool is callable, i.e. has a live handler
        for (const auto& t : listed.tools) {
            CHECK_NOTHROW(conn.call_tool(t.name, Json::object()));
        }
    }
}

TEST_CASE("concurrent calls correlate by id under shuffled completion") {
    auto net = make_mem_network();
    // handler sleeps as instructed, so later requests complete earlier
    auto srv = serve(*net, "mem:corr", ToolManifest{"c", {spec("slow_echo")}},
                     {{"slow_echo", [](const Json& args) {
                           std::this_thread::sleep_for(
                               std::chrono::milliseconds(args.at("delay_ms").get<int>()));
                           return args;
                       }}});
    auto conn = Connection::connect(*net, "mem:corr");

    constexpr int kCalls = 8;
    std::vector<std::thread> threads;
    std::vector<Json> results(kCalls);
    for (int i = 0; i < kCalls; ++i) {
        threads.emplace_back([&, i] {
            const Json args{{"delay_ms", (kCalls - i) * 15}, {"tag", i}};
            results[i] = conn.call_tool("slow_echo", args);
        });
    }
    for (auto& t : threads) t.join();
    for (int i = 0; i < kCalls; ++i) {
        CHECK(results[i].at("tag") == i);
    }
}

TEST_CASE("close is idempotent and fails in-flight calls") {
    auto net = make_mem_network();
    std::atomic<bool> entered{false};
    auto srv = serve(*net, "mem:inflight", ToolManifest{"i", {spec("hang")}},
                     {{"hang", [&](const Json&) -> Json {
                           entered = true;
                           std::this_thread::sleep_for(300ms);
                           return Json::object();
                       }}});
    auto conn = Connection::connect(*net, "mem:inflight");

    std::thread closer([&] {
        while (!entered) std::this_thread::sleep_for(1ms);
        conn.close();
        conn.close(); // idempotent
    });
    CHECK_THROWS_AS(conn.call_tool("hang", Json::object()), ConnectionClosed);
    closer.join();
    CHECK_FALSE(conn.is_open());
    conn.close(); // still a no-op
}

TEST_CASE("no frames are emitted after close") {
    auto net = make_mem_network();
    std::vector<TapEvent> taps;
    auto srv = serve(*net, "mem:quiet", ToolManifest{"q", {spec("slow")}},
                     {{"slow", [](const Json&) -> Json {
                           std::this_thread::sleep_for(100ms);
                           return Json{{"late", true}};
                       }}});
    auto conn = Connection::connect(*net, "mem:quiet");
    net->set_tap([&](const TapEvent& ev) { taps.push_back(ev); });

    std::thread caller([&] {
        try {
            conn.call_tool("slow", Json::object());
        } catch (const ConnectionClosed&) {
        }
    });
    std::this_thread::sleep_for(20ms);
    conn.close();
    caller.join();
    std::this_thread::sleep_for(200ms); // give the late handler time to try
    for (const auto& ev : taps) {
        CAPTURE(ev.frame);
        CHECK(ev.frame.find("late") == std::string::npos);
    }
    CHECK(net->open_connection_count() == 0);
}

TEST_CASE("server shutdown closes live connections") {
    auto net = make_mem_network();
    auto srv = serve(*net, "mem:bye", ToolManifest{"b", {spec("echo")}},
                     {{"echo", echo_handler}});
    auto conn = Connection::connect(*net, "mem:bye");
    CHECK(net->open_connection_count() == 1);
    srv.shutdown();
    CHECK_THROWS_AS(conn.call_tool("echo", Json::object()), ConnectionClosed);
    conn.close();
    CHECK(net->open_connection_count() == 0);
}

TEST_CASE("tcp transport serves list and call") {
    auto net = make_tcp_network();
    auto srv = serve(*net, "tcp:127.0.0.1:0", ToolManifest{"t", {spec("echo")}},
                     {{"echo", echo_handler}});
    const std::string addr = srv.address();
    CHECK(addr.rfind("tcp:127.0.0.1:", 0) == 0);
    CHECK(addr != "tcp:127.0.0.1:0");

    auto conn = Connection::connect(*net, addr);
    CHECK(conn.list_tools().tools.size() == 1);
    CHECK(conn.call_tool("echo", Json{{"n", 42}}) == Json{{"n", 42}});
    conn.close();
    srv.shutdown();
    CHECK_THROWS_AS(Connection::connect(*net, addr), Unreachable);
}

TEST_CASE("router dispatches by scheme") {
    auto net = make_default_network();
    auto srv = serve(*net, "mem:routed", ToolManifest{"r", {spec("echo")}},
                     {{"echo", echo_handler}});
    auto conn = Connection::connect(*net, "mem:routed");
    CHECK(conn.call_tool("echo", Json{{"ok", true}}) == Json{{"ok", true}});
    CHECK_THROWS_AS(net->dial("ipc:nope"), ConfigError);
}
