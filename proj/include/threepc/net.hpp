#pragma once

#include <atomic>
#include <cstdint>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>

#include "threepc/protocol.hpp"

namespace threepc {

struct Endpoint
{
    std::string host;
    std::uint16_t port = 0;

    std::string to_string() const { return host + ":" + std::to_string(port); }
};

/// "host:port", "[v6addr]:port" or ":port" (loopback). Throws std::invalid_argument.
Endpoint parse_endpoint(std::string_view text);

class TcpStream : public Stream
{
public:
    explicit TcpStream(int fd);
    ~TcpStream() override;
    TcpStream(const TcpStream&) = delete;
    TcpStream& operator=(const TcpStream&) = delete;

    void write_all(const void* data, std::size_t size) override;
    std::size_t read_some(void* data, std::size_t size) override;
    /// Shuts the socket down in both directions; safe from another thread.
    void close() override;

private:
    std::atomic<int> fd_;
    std::once_flag shut_;
};

/// Throws ConnectionLost if the endpoint cannot be reached.
std::unique_ptr<TcpStream> connect_tcp(const Endpoint& endpoint);

class TcpListener
{
public:
    /// Port 0 picks a free port. Throws std::system_error on bind failure.
    explicit TcpListener(const Endpoint& endpoint);
    ~TcpListener();
    TcpListener(const TcpListener&) = delete;
    TcpListener& operator=(const TcpListener&) = delete;

    std::uint16_t port() const { return port_; }
    /// nullptr once the listener has been closed.
    std::unique_ptr<TcpStream> accept();
    /// Unblocks a pending accept(); safe from another thread.
    void close();

private:
    std::atomic<int> fd_;
    std::uint16_t port_ = 0;
    std::atomic<bool> closed_{false};
};

/// Pass-through stream that keeps a copy of every byte written.
class RecordingStream : public Stream
{
public:
    explicit RecordingStream(Stream& inner)
    : inner_{inner}
    {
    }

    void write_all(const void* data, std::size_t size) override
    {
        sent_.append(static_cast<const char*>(data), size);
        inner_.write_all(data, size);
    }
    std::size_t read_some(void* data, std::size_t size) override
    {
        const std::size_t n = inner_.read_some(data, size);
        received_.append(static_cast<const char*>(data), n);
        return n;
    }
    void close() override { inner_.close(); }

    const std::string& sent() const { return sent_; }
    const std::string& received() const { return received_; }

private:
    Stream& inner_;
    std::string sent_;
    std::string received_;
};

} // namespace threepc
