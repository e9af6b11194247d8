#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <list>
#include <map>
#include <memory>
#include <mutex>
#include <stop_token>
#include <string>
#include <thread>

#include "threepc/net.hpp"
#include "threepc/protocol.hpp"

namespace threepc {

struct ServerOptions
{
    Endpoint listen{"127.0.0.1", 0};
    std::filesystem::path corpus_dir;
    std::size_t workers = 1;
    std::size_t max_frame = kDefaultMaxFrame;
};

/// Shared by all connections of one daemon.
class ServerContext
{
public:
    explicit ServerContext(ServerOptions options);

    const ServerOptions& options() const { return options_; }
    /// Reference hashing rate, measured once per algorithm.
    std::uint64_t rate_for(const std::string& algo);

private:
    ServerOptions options_;
    std::mutex mutex_;
    std::map<std::string, std::uint64_t> rates_;
};

/// Serves one job on `stream`: ACK-H, CRK-XV, SND-CS. Every failure the peer
/// can be told about is answered with an ErrorReply before returning.
void handle_connection(Stream& stream, ServerContext& context, std::stop_token stop = {});

/// Accept loop with one thread per connection.
class Server
{
public:
    /// Binds immediately. Throws std::system_error on bind failure.
    explicit Server(ServerOptions options);
    ~Server();
    Server(const Server&) = delete;
    Server& operator=(const Server&) = delete;

    std::uint16_t port() const { return listener_.port(); }

    /// Blocks until stop().
    void run();
    /// run() on a background thread.
    void start();
    /// Stops accepting, cancels running jobs and drops their connections.
    void stop();

private:
    struct Connection
    {
        std::unique_ptr<TcpStream> stream;
        std::jthread thread;
        bool done = false;
    };

    void reap();

    ServerContext context_;
    TcpListener listener_;
    std::mutex mutex_;
    std::list<Connection> connections_;
    std::jthread runner_;
    bool stopping_ = false;
};

} // namespace threepc
