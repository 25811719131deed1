#include "taas/wire/server.hpp"

#include <atomic>
#include <future>
#include <mutex>
#include <thread>
#include <vector>

#include "taas/util/errors.hpp"
#include "taas/wire/envelope.hpp"

namespace taas::wire {

namespace {

struct ConnCtx {
    std::shared_ptr<Stream> stream;
    std::mutex write_m;
    std::vector<std::future<void>> dispatches;
    std::mutex dispatch_m;

    void write(const Envelope& e) {
        std::lock_guard lk(write_m);
        stream->send(encode(e));
    }
};

} // namespace

class ServerImpl : public std::enable_shared_from_this<ServerImpl> {
public:
    ServerImpl(ToolManifest manifest, HandlerMap handlers, ServerOptions options)
        : manifest_(std::move(manifest)), handlers_(std::move(handlers)),
          options_(options) {}

    void start(Network& net, const std::string& address) {
        listener_ = net.listen(address);
        accept_thread_ = std::thread([self = shared_from_this()] { self->accept_loop(); });
    }

    void shutdown() {
        bool expected = false;
        if (!stopping_.compare_exchange_strong(expected, true)) return;
        if (listener_) listener_->close();
        {
            std::lock_guard lk(conns_m_);
            for (auto& c : conns_) c->stream->close();
        }
        if (accept_thread_.joinable()) accept_thread_.join();
        for (auto& t : conn_threads_) {
            if (t.joinable()) t.join();
        }
        std::lock_guard lk(conns_m_);
        for (auto& c : conns_) {
            std::lock_guard dlk(c->dispatch_m);
            for (auto& f : c->dispatches) {
                if (f.valid()) f.wait();
            }
        }
        conns_.clear();
    }

    void add_tool(ToolSpec spec, ToolHandler handler) {
        std::lock_guard lk(tools_m_);
        if (manifest_.has_tool(spec.name)) {
            throw ToolCollision("tool already registered: " + spec.name);
        }
        manifest_.tools.push_back(std::move(spec));
        handlers_[manifest_.tools.back().name] = std::move(handler);
    }

    ToolManifest manifest() const {
        std::lock_guard lk(tools_m_);
        return manifest_;
    }

    std::string address() const { return listener_ ? listener_->address() : ""; }

    bool running() const { return !stopping_.load(); }

private:
    void accept_loop() {
        while (true) {
            auto stream = listener_->accept();
            if (!stream) break;
            auto ctx = std::make_shared<ConnCtx>();
            ctx->stream = std::shared_ptr<Stream>(std::move(stream));
            {
                std::lock_guard lk(conns_m_);
                if (stopping_.load()) {
                    ctx->stream->close();
                    break;
                }
                conns_.push_back(ctx);
                conn_threads_.emplace_back(
                    [self = shared_from_this(), ctx] { self->reader_loop(ctx); });
            }
        }
    }

    void reader_loop(const std::shared_ptr<ConnCtx>& ctx) {
        while (true) {
            auto frame = ctx->stream->recv();
            if (!frame) break;
            handle_frame(ctx, *frame);
        }
    }

    void handle_frame(const std::shared_ptr<ConnCtx>& ctx, const std::string& frame) {
        Envelope req;
        try {
            req = decode(frame);
        } catch (const CodecError& e) {
            ctx->write(Envelope::failure(std::nullopt, kParseError, e.what()));
            return;
        }
        if (req.kind != Kind::Request) {
            // Servers only consume requests; stray responses are dropped.
            return;
        }

        if (req.method == "initialize") {
            if (!options_.accept_initialize) {
                if (req.id) {
                    ctx->write(Envelope::failure(*req.id, kServerShuttingDown,
                                                 "initialize rejected"));
                }
                return;
            }
            if (req.id) {
                ctx->write(Envelope::response(
                    *req.id, Json{{"server", manifest().server_name},
                                  {"protocol", "taas-mcp/1"}}));
            }
            return;
        }

        if (req.method == "tools/list") {
            if (req.id) {
                Json tools = Json::array();
                for (const auto& t : manifest().tools) tools.push_back(t.to_json());
                ctx->write(Envelope::response(*req.id, Json{{"tools", tools}}));
            }
            return;
        }

        if (req.method == "tools/call") {
            dispatch_call(ctx, req);
            return;
        }

        if (req.id) {
            ctx->write(Envelope::failure(*req.id, kMethodNotFound,
                                         "unknown method: " + req.method));
        }
    }

    void dispatch_call(const std::shared_ptr<ConnCtx>& ctx, const Envelope& req) {
        std::string name;
        Json args = Json::object();
        if (req.params.is_object()) {
            name = req.params.value("name", std::string{});
            args = req.params.value("arguments", Json::object());
        }

        ToolHandler handler;
        {
            std::lock_guard lk(tools_m_);
            auto it = handlers_.find(name);
            if (it != handlers_.end()) handler = it->second;
        }
        if (!handler) {
            if (req.id) {
                ctx->write(Envelope::failure(*req.id, kMethodNotFound,
                                             "unknown tool: " + name));
            }
            return;
        }

        // Calls run concurrently so a slow tool never blocks the connection;
        // responses are correlated by id on the client side.
        auto fut = std::async(std::launch::async, [ctx, handler, args, id = req.id] {
            Envelope reply;
            try {
                Json value = handler(args);
                reply = Envelope::response(
                    id.value_or(0),
                    Json{{"content", Json::array({Json{{"type", "json"},
                                                       {"json", std::move(value)}}})},
                         {"isError", false}});
            } catch (const std::exception& e) {
                reply = Envelope::response(
                    id.value_or(0),
                    Json{{"content", Json::array({Json{{"type", "text"},
                                                       {"text", e.what()}}})},
                         {"isError", true}});
            }
            if (id) ctx->write(reply);
        });
        std::lock_guard lk(ctx->dispatch_m);
        ctx->dispatches.push_back(std::move(fut));
    }

    ToolManifest manifest_;
    HandlerMap handlers_;
    mutable std::mutex tools_m_;
    ServerOptions options_;

    std::unique_ptr<Listener> listener_;
    std::thread accept_thread_;
    std::vector<std::thread> conn_threads_;
    std::vector<std::shared_ptr<ConnCtx>> conns_;
    std::mutex conns_m_;
    std::atomic<bool> stopping_{false};
};

ServerHandle::ServerHandle(std::shared_ptr<ServerImpl> impl) : impl_(std::move(impl)) {}

ServerHandle::~ServerHandle() {
    if (impl_) impl_->shutdown();
}

ServerHandle::ServerHandle(ServerHandle&&) noexcept = default;

ServerHandle& ServerHandle::operator=(ServerHandle&& other) noexcept {
    if (this != &other) {
        if (impl_) impl_->shutdown();
        impl_ = std::move(other.impl_);
    }
    return *this;
}

void ServerHandle::add_tool(ToolSpec spec, ToolHandler handler) {
    impl_->add_tool(std::move(spec), std::move(handler));
}

ToolManifest ServerHandle::manifest() const { return impl_->manifest(); }

std::string ServerHandle::address() const { return impl_->address(); }

void ServerHandle::shutdown() {
    if (impl_) impl_->shutdown();
}

bool ServerHandle::running() const { return impl_ && impl_->running(); }

ServerHandle serve(Network& net, const std::string& address, ToolManifest manifest,
                   HandlerMap handlers, ServerOptions options) {
    manifest.validate();
    for (const auto& t : manifest.tools) {
        if (!handlers.count(t.name)) {
            throw ManifestMismatch("no handler for tool: " + t.name);
        }
    }
    for (const auto& [name, h] : handlers) {
        if (!manifest.has_tool(name)) {
            throw ManifestMismatch("handler without manifest entry: " + name);
        }
    }
    auto impl = std::make_shared<ServerImpl>(std::move(manifest), std::move(handlers),
                                             options);
    impl->start(net, address);
    return ServerHandle(impl);
}

} // namespace taas::wire
