#include "taas/wire/connection.hpp"

#include <atomic>
#include <future>
#include <map>
#include <mutex>
#include <thread>

#include "taas/util/errors.hpp"

namespace taas::wire {

class ConnectionImpl : public std::enable_shared_from_this<ConnectionImpl> {
public:
    ConnectionImpl(std::unique_ptr<Stream> stream, ConnectOptions options)
        : stream_(std::move(stream)), options_(options) {}

    ~ConnectionImpl() { close(); }

    void start_reader() {
        reader_ = std::thread([self = shared_from_this()] { self->reader_loop(); });
    }

    Json call(const std::string& method, const Json& params) {
        std::future<Envelope> fut;
        std::int64_t id = 0;
        {
            std::lock_guard lk(m_);
            if (closed_) throw ConnectionClosed("connection closed: " + address());
            id = next_id_++;
            fut = pending_[id].get_future();
        }
        const Envelope req = Envelope::request(id, method, params);
        if (!stream_->send(encode(req))) {
            settle(id);
            throw ConnectionClosed("connection closed: " + address());
        }
        if (fut.wait_for(options_.call_timeout) != std::future_status::ready) {
            settle(id);
            throw RpcTimeout("call timed out: " + method);
        }
        const Envelope reply = fut.get();
        if (reply.kind == Kind::Error) {
            if (reply.error.code == kServerShuttingDown &&
                reply.error.message == "connection closed") {
                throw ConnectionClosed("connection closed: " + address());
            }
            throw RpcError(reply.error.code, reply.error.message);
        }
        return reply.result;
    }

    Json call_tool(const std::string& name, const Json& args) {
        const Json result =
            call("tools/call", Json{{"name", name}, {"arguments", args}});
        if (result.value("isError", false)) {
            std::string message = "tool failed";
            if (result.contains("content") && !result.at("content").empty()) {
                message = result.at("content").at(0).value("text", message);
            }
            throw ToolError(message);
        }
        if (result.contains("content") && !result.at("content").empty()) {
            const Json& first = result.at("content").at(0);
            if (first.value("type", std::string{}) == "json") {
                return first.at("json");
            }
        }
        return result;
    }

    ToolManifest list_tools() {
        const Json result = call("tools/list", Json::object());
        ToolManifest m;
        for (const auto& t : result.at("tools")) {
            m.tools.push_back(ToolSpec::from_json(t));
        }
        m.validate();
        return m;
    }

    void close() {
        {
            std::lock_guard lk(m_);
            closed_ = true;
        }
        stream_->close();
        // The reader may have exited on its own (peer closed); joining must
        // still happen exactly once for any interleaving of close() calls.
        {
            std::lock_guard lk(join_m_);
            if (reader_.joinable()) {
                if (reader_.get_id() == std::this_thread::get_id()) {
                    reader_.detach();
                } else {
                    reader_.join();
                }
            }
        }
        fail_pending();
    }

    bool is_open() const {
        std::lock_guard lk(m_);
        return !closed_;
    }

    std::string address() const { return stream_->server_address(); }

private:
    void reader_loop() {
        while (true) {
            auto frame = stream_->recv();
            if (!frame) break;
            Envelope e;
            try {
                e = decode(*frame);
            } catch (const CodecError&) {
                continue; // tolerate garbage from a broken peer
            }
            if (e.kind == Kind::Request) continue; // clients ignore requests
            if (!e.id) continue;
            std::promise<Envelope> p;
            {
                std::lock_guard lk(m_);
                auto it = pending_.find(*e.id);
                if (it == pending_.end()) continue;
                p = std::move(it->second);
                pending_.erase(it);
            }
            p.set_value(std::move(e));
        }
        {
            std::lock_guard lk(m_);
            closed_ = true;
        }
        fail_pending();
    }

    void fail_pending() {
        std::map<std::int64_t, std::promise<Envelope>> orphans;
        {
            std::lock_guard lk(m_);
            orphans.swap(pending_);
        }
        for (auto& [id, p] : orphans) {
            p.set_value(Envelope::failure(id, kServerShuttingDown, "connection closed"));
        }
    }

    void settle(std::int64_t id) {
        std::lock_guard lk(m_);
        pending_.erase(id);
    }

    std::unique_ptr<Stream> stream_;
    ConnectOptions options_;
    std::thread reader_;
    std::mutex join_m_;
    mutable std::mutex m_;
    std::map<std::int64_t, std::promise<Envelope>> pending_;
    std::int64_t next_id_ = 1;
    bool closed_ = false;
};

Connection::Connection(std::shared_ptr<ConnectionImpl> impl) : impl_(std::move(impl)) {}

Connection::~Connection() {
    if (impl_) impl_->close();
}

Connection::Connection(Connection&&) noexcept = default;

Connection& Connection::operator=(Connection&& other) noexcept {
    if (this != &other) {
        if (impl_) impl_->close();
        impl_ = std::move(other.impl_);
    }
    return *this;
}

Connection Connection::connect(Network& net, const std::string& address,
                               ConnectOptions options) {
    auto impl = std::make_shared<ConnectionImpl>(net.dial(address), options);
    impl->start_reader();
    try {
        impl->call("initialize", Json{{"client", options.client_name}});
    } catch (...) {
        impl->close();
        throw;
    }
    return Connection(impl);
}

Json Connection::call(const std::string& method, const Json& params) {
    return impl_->call(method, params);
}

ToolManifest Connection::list_tools() { return impl_->list_tools(); }

Json Connection::call_tool(const std::string& name, const Json& args) {
    return impl_->call_tool(name, args);
}

void Connection::close() {
    if (impl_) impl_->close();
}

bool Connection::is_open() const { return impl_ && impl_->is_open(); }

std::string Connection::address() const { return impl_ ? impl_->address() : ""; }

} // namespace taas::wire
