#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <atomic>
#include <cstring>
#include <mutex>

#include "taas/util/errors.hpp"
#include "taas/wire/network.hpp"

namespace taas::wire {
namespace {

struct TcpShared {
    std::atomic<std::size_t> open_streams{0};
    std::mutex tap_m;
    Tap tap;

    void on_frame(const std::string& address, bool client_to_server,
                  const std::string& frame) {
        Tap t;
        {
            std::lock_guard lk(tap_m);
            t = tap;
        }
        if (t) t(TapEvent{address, client_to_server, frame});
    }
};

struct Locator {
    std::string host;
    std::uint16_t port = 0;
};

Locator parse_tcp(const std::string& address) {
    if (address.rfind("tcp:", 0) != 0) {
        throw ConfigError("malformed tcp locator: " + address);
    }
    const auto rest = address.substr(4);
    const auto colon = rest.rfind(':');
    if (colon == std::string::npos || colon == 0) {
        throw ConfigError("malformed tcp locator: " + address);
    }
    Locator loc;
    loc.host = rest.substr(0, colon);
    const auto port_str = rest.substr(colon + 1);
    int port = 0;
    for (char c : port_str) {
        if (c < '0' || c > '9') throw ConfigError("malformed tcp port: " + address);
        port = port * 10 + (c - '0');
        if (port > 65535) throw ConfigError("malformed tcp port: " + address);
    }
    loc.port = static_cast<std::uint16_t>(port);
    return loc;
}

class TcpStream final : public Stream {
public:
    TcpStream(std::shared_ptr<TcpShared> shared, int fd, std::string address,
              bool is_client)
        : shared_(std::move(shared)), fd_(fd), address_(std::move(address)),
          is_client_(is_client) {
        shared_->open_streams.fetch_add(1);
    }

    ~TcpStream() override {
        close();
        ::close(fd_);
    }

    bool send(const std::string& frame) override {
        std::lock_guard lk(write_m_);
        if (closed_.load()) return false;
        std::string wire = frame;
        wire.push_back('\n');
        std::size_t off = 0;
        while (off < wire.size()) {
            const ssize_t n = ::send(fd_, wire.data() + off, wire.size() - off,
                                     MSG_NOSIGNAL);
            if (n <= 0) return false;
            off += static_cast<std::size_t>(n);
        }
        shared_->on_frame(address_, is_client_, frame);
        return true;
    }

    std::optional<std::string> recv() override { return recv_impl(-1); }

    std::optional<std::string> recv_for(std::chrono::milliseconds timeout) override {
        return recv_impl(static_cast<int>(timeout.count()));
    }

    void close() override {
        bool expected = false;
        if (closed_.compare_exchange_strong(expected, true)) {
            ::shutdown(fd_, SHUT_RDWR);
            // fd closed in destructor path below; keep it valid for readers
            // blocked in poll until they observe the shutdown.
            shared_->open_streams.fetch_sub(1);
        }
    }

    bool is_closed() const override { return closed_.load(); }

    std::string server_address() const override { return address_; }

private:
    std::optional<std::string> recv_impl(int timeout_ms) {
        std::lock_guard lk(read_m_);
        while (true) {
            const auto nl = buf_.find('\n');
            if (nl != std::string::npos) {
                std::string frame = buf_.substr(0, nl);
                buf_.erase(0, nl + 1);
                return frame;
            }
            if (closed_.load()) return std::nullopt;
            pollfd pfd{fd_, POLLIN, 0};
            const int pr = ::poll(&pfd, 1, timeout_ms);
            if (pr == 0) return std::nullopt; // timed out, still open
            char chunk[4096];
            const ssize_t n = ::recv(fd_, chunk, sizeof(chunk), 0);
            if (n <= 0) {
                if (n == 0 || closed_.load()) return std::nullopt;
                if (errno == EINTR) continue;
                return std::nullopt;
            }
            buf_.append(chunk, static_cast<std::size_t>(n));
        }
    }

    std::shared_ptr<TcpShared> shared_;
    int fd_;
    std::string address_;
    bool is_client_;
    std::atomic<bool> closed_{false};
    std::mutex read_m_;
    std::mutex write_m_;
    std::string buf_;
};

class TcpListener final : public Listener {
public:
    TcpListener(std::shared_ptr<TcpShared> shared, int fd, std::string address)
        : shared_(std::move(shared)), fd_(fd), address_(std::move(address)) {}

    ~TcpListener() override { close(); }

    std::unique_ptr<Stream> accept() override {
        while (true) {
            if (closed_.load()) return nullptr;
            pollfd pfd{fd_, POLLIN, 0};
            const int pr = ::poll(&pfd, 1, 100);
            if (closed_.load()) return nullptr;
            if (pr <= 0) continue;
            const int cfd = ::accept(fd_, nullptr, nullptr);
            if (cfd < 0) {
                if (closed_.load()) return nullptr;
                continue;
            }
            int one = 1;
            ::setsockopt(cfd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
            return std::make_unique<TcpStream>(shared_, cfd, address_, false);
        }
    }

    void close() override {
        bool expected = false;
        if (closed_.compare_exchange_strong(expected, true)) {
            ::shutdown(fd_, SHUT_RDWR);
            ::close(fd_);
        }
    }

    std::string address() const override { return address_; }

private:
    std::shared_ptr<TcpShared> shared_;
    int fd_;
    std::string address_;
    std::atomic<bool> closed_{false};
};

class TcpNetwork final : public Network {
public:
    TcpNetwork() : shared_(std::make_shared<TcpShared>()) {}

    std::unique_ptr<Listener> listen(const std::string& address) override {
        const Locator loc = parse_tcp(address);
        const int fd = ::socket(AF_INET, SOCK_STREAM, 0);
        if (fd < 0) throw TransportError("socket() failed");
        int one = 1;
        ::setsockopt(fd, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));

        sockaddr_in addr{};
        addr.sin_family = AF_INET;
        addr.sin_port = htons(loc.port);
        if (::inet_pton(AF_INET, loc.host.c_str(), &addr.sin_addr) != 1) {
            if (loc.host == "localhost") {
                addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
            } else {
                ::close(fd);
                throw ConfigError("cannot resolve host: " + loc.host);
            }
        }
        if (::bind(fd, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0) {
            ::close(fd);
            if (errno == EADDRINUSE) throw AddressInUse("address in use: " + address);
            throw TransportError("bind failed for " + address);
        }
        if (::listen(fd, 64) != 0) {
            ::close(fd);
            throw TransportError("listen failed for " + address);
        }
        // Report the actual bound port (host:0 asks the OS to pick one).
        sockaddr_in bound{};
        socklen_t blen = sizeof(bound);
        ::getsockname(fd, reinterpret_cast<sockaddr*>(&bound), &blen);
        const std::string actual =
            "tcp:" + loc.host + ":" + std::to_string(ntohs(bound.sin_port));
        return std::make_unique<TcpListener>(shared_, fd, actual);
    }

    std::unique_ptr<Stream> dial(const std::string& address) override {
        const Locator loc = parse_tcp(address);
        const int fd = ::socket(AF_INET, SOCK_STREAM, 0);
        if (fd < 0) throw TransportError("socket() failed");

        sockaddr_in addr{};
        addr.sin_family = AF_INET;
        addr.sin_port = htons(loc.port);
        if (::inet_pton(AF_INET, loc.host.c_str(), &addr.sin_addr) != 1) {
            if (loc.host == "localhost") {
                addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
            } else {
                ::close(fd);
                throw ConfigError("cannot resolve host: " + loc.host);
            }
        }
        if (::connect(fd, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0) {
            ::close(fd);
            throw Unreachable("no server at " + address);
        }
        int one = 1;
        ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
        return std::make_unique<TcpStream>(shared_, fd, address, true);
    }

    std::size_t open_connection_count() const override {
        // Both endpoints of an in-process connection are counted; zero means
        // everything is closed either way.
        return shared_->open_streams.load();
    }

    void set_tap(Tap tap) override {
        std::lock_guard lk(shared_->tap_m);
        shared_->tap = std::move(tap);
    }

private:
    std::shared_ptr<TcpShared> shared_;
};

} // namespace

std::shared_ptr<Network> make_tcp_network() {
    return std::make_shared<TcpNetwork>();
}

} // namespace taas::wire
