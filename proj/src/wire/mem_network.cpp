#include <condition_variable>
#include <deque>
#include <map>
#include <mutex>

#include "taas/util/errors.hpp"
#include "taas/wire/network.hpp"

namespace taas::wire {
namespace {

struct PairState {
    std::mutex m;
    std::condition_variable cv;
    std::deque<std::string> to_server;
    std::deque<std::string> to_client;
    bool closed = false;
};

struct Hub {
    std::mutex m;
    std::map<std::string, std::shared_ptr<struct ListenerState>> listeners;
    std::vector<std::weak_ptr<PairState>> pairs;
    Tap tap;

    void on_frame(const std::string& address, bool client_to_server,
                  const std::string& frame) {
        Tap t;
        {
            std::lock_guard lk(m);
            t = tap;
        }
        if (t) t(TapEvent{address, client_to_server, frame});
    }

    std::size_t open_pairs() {
        std::lock_guard lk(m);
        std::size_t n = 0;
        for (auto it = pairs.begin(); it != pairs.end();) {
            if (auto p = it->lock()) {
                std::lock_guard plk(p->m);
                if (!p->closed) ++n;
                ++it;
            } else {
                it = pairs.erase(it);
            }
        }
        return n;
    }
};

struct ListenerState {
    std::string address;
    std::mutex m;
    std::condition_variable cv;
    std::deque<std::shared_ptr<PairState>> backlog;
    bool closed = false;
};

class MemStream final : public Stream {
public:
    MemStream(std::shared_ptr<Hub> hub, std::shared_ptr<PairState> pair,
              std::string address, bool is_client)
        : hub_(std::move(hub)), pair_(std::move(pair)),
          address_(std::move(address)), is_client_(is_client) {}

    ~MemStream() override { close(); }

    bool send(const std::string& frame) override {
        {
            std::lock_guard lk(pair_->m);
            if (pair_->closed) return false;
            (is_client_ ? pair_->to_server : pair_->to_client).push_back(frame);
        }
        pair_->cv.notify_all();
        hub_->on_frame(address_, is_client_, frame);
        return true;
    }

    std::optional<std::string> recv() override {
        std::unique_lock lk(pair_->m);
        auto& q = is_client_ ? pair_->to_client : pair_->to_server;
        pair_->cv.wait(lk, [&] { return !q.empty() || pair_->closed; });
        if (q.empty()) return std::nullopt;
        std::string f = std::move(q.front());
        q.pop_front();
        return f;
    }

    std::optional<std::string> recv_for(std::chrono::milliseconds timeout) override {
        std::unique_lock lk(pair_->m);
        auto& q = is_client_ ? pair_->to_client : pair_->to_server;
        pair_->cv.wait_for(lk, timeout, [&] { return !q.empty() || pair_->closed; });
        if (q.empty()) return std::nullopt;
        std::string f = std::move(q.front());
        q.pop_front();
        return f;
    }

    void close() override {
        {
            std::lock_guard lk(pair_->m);
            pair_->closed = true;
        }
        pair_->cv.notify_all();
    }

    bool is_closed() const override {
        std::lock_guard lk(pair_->m);
        return pair_->closed;
    }

    std::string server_address() const override { return address_; }

private:
    std::shared_ptr<Hub> hub_;
    std::shared_ptr<PairState> pair_;
    std::string address_;
    bool is_client_;
};

class MemListener final : public Listener {
public:
    MemListener(std::shared_ptr<Hub> hub, std::shared_ptr<ListenerState> st)
        : hub_(std::move(hub)), st_(std::move(st)) {}

    ~MemListener() override { close(); }

    std::unique_ptr<Stream> accept() override {
        std::shared_ptr<PairState> pair;
        {
            std::unique_lock lk(st_->m);
            st_->cv.wait(lk, [&] { return !st_->backlog.empty() || st_->closed; });
            if (st_->backlog.empty()) return nullptr;
            pair = std::move(st_->backlog.front());
            st_->backlog.pop_front();
        }
        return std::make_unique<MemStream>(hub_, pair, st_->address, false);
    }

    void close() override {
        {
            std::lock_guard lk(st_->m);
            if (st_->closed) return;
            st_->closed = true;
            // Refuse queued dials that were never accepted.
            for (auto& p : st_->backlog) {
                std::lock_guard plk(p->m);
                p->closed = true;
                p->cv.notify_all();
            }
            st_->backlog.clear();
        }
        st_->cv.notify_all();
        std::lock_guard lk(hub_->m);
        auto it = hub_->listeners.find(st_->address);
        if (it != hub_->listeners.end() && it->second == st_) {
            hub_->listeners.erase(it);
        }
    }

    std::string address() const override { return st_->address; }

private:
    std::shared_ptr<Hub> hub_;
    std::shared_ptr<ListenerState> st_;
};

class MemNetwork final : public Network {
public:
    MemNetwork() : hub_(std::make_shared<Hub>()) {}

    std::unique_ptr<Listener> listen(const std::string& address) override {
        check_scheme(address);
        auto st = std::make_shared<ListenerState>();
        st->address = address;
        {
            std::lock_guard lk(hub_->m);
            if (hub_->listeners.count(address)) {
                throw AddressInUse("address already bound: " + address);
            }
            hub_->listeners[address] = st;
        }
        return std::make_unique<MemListener>(hub_, st);
    }

    std::unique_ptr<Stream> dial(const std::string& address) override {
        check_scheme(address);
        std::shared_ptr<ListenerState> st;
        auto pair = std::make_shared<PairState>();
        {
            std::lock_guard lk(hub_->m);
            auto it = hub_->listeners.find(address);
            if (it == hub_->listeners.end()) {
                throw Unreachable("no server at " + address);
            }
            st = it->second;
            hub_->pairs.push_back(pair);
        }
        {
            std::lock_guard lk(st->m);
            if (st->closed) throw Unreachable("no server at " + address);
            st->backlog.push_back(pair);
        }
        st->cv.notify_all();
        return std::make_unique<MemStream>(hub_, pair, address, true);
    }

    std::size_t open_connection_count() const override { return hub_->open_pairs(); }

    void set_tap(Tap tap) override {
        std::lock_guard lk(hub_->m);
        hub_->tap = std::move(tap);
    }

private:
    static void check_scheme(const std::string& address) {
        if (address.rfind("mem:", 0) != 0 || address.size() <= 4) {
            throw ConfigError("malformed mem locator: " + address);
        }
    }

    std::shared_ptr<Hub> hub_;
};

} // namespace

std::shared_ptr<Network> make_mem_network() {
    return std::make_shared<MemNetwork>();
}

void Router::add_scheme(std::string scheme, std::shared_ptr<Network> net) {
    schemes_.emplace_back(std::move(scheme), std::move(net));
}

Network& Router::resolve(const std::string& address) const {
    for (const auto& [scheme, net] : schemes_) {
        if (address.rfind(scheme + ":", 0) == 0) return *net;
    }
    throw ConfigError("unknown locator scheme: " + address);
}

std::unique_ptr<Listener> Router::listen(const std::string& address) {
    return resolve(address).listen(address);
}

std::unique_ptr<Stream> Router::dial(const std::string& address) {
    return resolve(address).dial(address);
}

std::size_t Router::open_connection_count() const {
    std::size_t n = 0;
    for (const auto& [scheme, net] : schemes_) {
        n += net->open_connection_count();
    }
    return n;
}

void Router::set_tap(Tap tap) {
    for (auto& [scheme, net] : schemes_) {
        net->set_tap(tap);
    }
}

std::shared_ptr<Network> make_default_network() {
    auto router = std::make_shared<Router>();
    router->add_scheme("mem", make_mem_network());
    router->add_scheme("tcp", make_tcp_network());
    return router;
}

} // namespace taas::wire
