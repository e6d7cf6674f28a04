#pragma once

// Websocket host for a Session. One network thread runs all socket I/O and
// only appends to the inbox; the session thread owns the simulation, drains
// the inbox at tick boundaries and posts outbound frames back.

#include <atomic>
#include <chrono>
#include <csignal>
#include <deque>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/websocket.hpp>

#include "mrltl/server/session.hpp"

namespace mrltl {

namespace net = boost::asio;
namespace beast = boost::beast;
namespace websocket = beast::websocket;
using tcp = net::ip::tcp;

/// Network-to-session queue.
class Inbox {
public:
    struct Item {
        enum class Kind { Connect, Message, Disconnect } kind;
        int client;
        std::string text;
    };

    void push(Item item) {
        std::lock_guard lock(mu_);
        items_.push_back(std::move(item));
    }

    std::deque<Item> drain() {
        std::lock_guard lock(mu_);
        return std::exchange(items_, {});
    }

private:
    std::mutex mu_;
    std::deque<Item> items_;
};

class Connection;

/// Live connections; touched only on the network thread.
struct Hub {
    std::map<int, std::weak_ptr<Connection>> connections;
    void send(int client, const std::string& frame);
    void broadcast(const std::string& frame);
};

class Connection : public std::enable_shared_from_this<Connection> {
public:
    Connection(tcp::socket socket, int id, Inbox& inbox, Hub& hub)
        : ws_(std::move(socket)), id_(id), inbox_(inbox), hub_(hub) {}

    void start() {
        ws_.async_accept([self = shared_from_this()](beast::error_code ec) {
            if (ec) return;
            self->hub_.connections[self->id_] = self;
            self->inbox_.push({Inbox::Item::Kind::Connect, self->id_, {}});
            self->read();
        });
    }

    void send(std::string frame) {
        out_.push_back(std::move(frame));
        if (out_.size() == 1) write();
    }

    void close() {
        beast::error_code ec;
        beast::get_lowest_layer(ws_).close(ec);
    }

private:
    void read() {
        ws_.async_read(buf_, [self = shared_from_this()](beast::error_code ec, std::size_t) {
            if (ec) {
                self->hub_.connections.erase(self->id_);
                self->inbox_.push({Inbox::Item::Kind::Disconnect, self->id_, {}});
                return;
            }
            self->inbox_.push({Inbox::Item::Kind::Message, self->id_, beast::buffers_to_string(self->buf_.data())});
            self->buf_.consume(self->buf_.size());
            self->read();
        });
    }

    void write() {
        ws_.text(true);
        ws_.async_write(net::buffer(out_.front()), [self = shared_from_this()](beast::error_code ec, std::size_t) {
            if (ec) {
                self->out_.clear();
                return;
            }
            self->out_.pop_front();
            if (!self->out_.empty()) self->write();
        });
    }

    websocket::stream<tcp::socket> ws_;
    beast::flat_buffer buf_;
    std::deque<std::string> out_;
    int id_;
    Inbox& inbox_;
    Hub& hub_;
};

inline void Hub::send(int client, const std::string& frame) {
    if (auto it = connections.find(client); it != connections.end())
        if (auto c = it->second.lock()) c->send(frame);
}

inline void Hub::broadcast(const std::string& frame) {
    for (auto& [id, weak] : connections)
        if (auto c = weak.lock()) c->send(frame);
}

/// Session plus transport. `start` binds (port 0 picks a free port) and
/// launches both threads; `stop` joins them.
class Server {
public:
    Server(Scenario sc, std::chrono::milliseconds tick_period = std::chrono::milliseconds(100))
        : session_(std::move(sc)), period_(tick_period), acceptor_(ioc_) {}

    ~Server() { stop(); }

    unsigned short start(unsigned short port, const std::string& address = "127.0.0.1") {
        const tcp::endpoint ep(net::ip::make_address(address), port);
        acceptor_.open(ep.protocol());
        acceptor_.set_option(net::socket_base::reuse_address(true));
        acceptor_.bind(ep);
        acceptor_.listen();
        accept();
        net_thread_ = std::thread([this] { ioc_.run(); });
        session_thread_ = std::thread([this] { loop(); });
        return acceptor_.local_endpoint().port();
    }

    void stop() {
        if (stopped_.exchange(true)) return;
        if (session_thread_.joinable()) session_thread_.join();
        net::post(ioc_, [this] {
            beast::error_code ec;
            acceptor_.close(ec);
            for (auto& [id, weak] : hub_.connections)
                if (auto c = weak.lock()) c->close();
            ioc_.stop();
        });
        if (net_thread_.joinable()) net_thread_.join();
    }

    /// Valid after stop().
    const Session& session() const noexcept { return session_; }

private:
    void accept() {
        acceptor_.async_accept([this](beast::error_code ec, tcp::socket socket) {
            if (ec) return;
            std::make_shared<Connection>(std::move(socket), next_id_++, inbox_, hub_)->start();
            accept();
        });
    }

    void post_send(int client, std::string frame) {
        net::post(ioc_, [this, client, f = std::move(frame)] { hub_.send(client, f); });
    }

    void post_broadcast(std::string frame) {
        net::post(ioc_, [this, f = std::move(frame)] { hub_.broadcast(f); });
    }

    void loop() {
        auto next = std::chrono::steady_clock::now();
        while (!stopped_) {
            for (auto& item : inbox_.drain()) {
                switch (item.kind) {
                    case Inbox::Item::Kind::Connect:
                        post_send(item.client, session_.scenario_frame());
                        post_send(item.client, session_.state_frame());
                        break;
                    case Inbox::Item::Kind::Message:
                        post_send(item.client, session_.handle(item.client, item.text));
                        break;
                    case Inbox::Item::Kind::Disconnect:
                        session_.disconnect(item.client);
                        break;
                }
            }
            session_.advance();
            post_broadcast(session_.state_frame());
            next += period_;
            std::this_thread::sleep_until(next);
        }
    }

    Session session_;
    std::chrono::milliseconds period_;
    net::io_context ioc_;
    tcp::acceptor acceptor_;
    Inbox inbox_;
    Hub hub_;
    int next_id_ = 1;
    std::atomic<bool> stopped_{false};
    std::thread net_thread_, session_thread_;
};

namespace detail {
inline std::atomic<bool> g_interrupted{false};
}

/// Blocking entry point for the CLI; runs until SIGINT/SIGTERM.
inline int run_server(const Scenario& sc, unsigned short port, const std::string& log) {
    Server server(sc);
    const auto bound = server.start(port, "0.0.0.0");
    std::cout << "serving on port " << bound << " (paused; send {\"type\":\"control\",\"cmd\":\"resume\"})" << std::endl;
    std::signal(SIGINT, [](int) { detail::g_interrupted = true; });
    std::signal(SIGTERM, [](int) { detail::g_interrupted = true; });
    while (!detail::g_interrupted) std::this_thread::sleep_for(std::chrono::milliseconds(50));
    server.stop();
    if (!log.empty()) {
        std::ofstream f(log);
        write_trace(f, server.session().simulation().trace());
    }
    return 0;
}

}  // namespace mrltl
