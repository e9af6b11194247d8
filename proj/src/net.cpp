#include "threepc/net.hpp"

#include <cerrno>
#include <cstring>
#include <system_error>

#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

namespace threepc {
namespace {

struct AddrInfo
{
    addrinfo* head = nullptr;
    ~AddrInfo()
    {
        if (head)
            freeaddrinfo(head);
    }
};

int resolve(const Endpoint& endpoint, bool passive, AddrInfo& out)
{
    addrinfo hints{};
    hints.ai_family = AF_UNSPEC;
    hints.ai_socktype = SOCK_STREAM;
    if (passive)
        hints.ai_flags = AI_PASSIVE;
    const std::string port = std::to_string(endpoint.port);
    const char* host = endpoint.host.empty() ? nullptr : endpoint.host.c_str();
    return getaddrinfo(host, port.c_str(), &hints, &out.head);
}

} // namespace

Endpoint parse_endpoint(std::string_view text)
{
    const auto colon = text.rfind(':');
    if (colon == std::string_view::npos)
        throw std::invalid_argument("endpoint must be host:port");
    std::string host(text.substr(0, colon));
    if (host.size() >= 2 && host.front() == '[' && host.back() == ']')
        host = host.substr(1, host.size() - 2);
    if (host.empty())
        host = "127.0.0.1";
    const std::string_view port_text = text.substr(colon + 1);
    unsigned long port = 0;
    if (port_text.empty() || port_text.size() > 5)
        throw std::invalid_argument("bad port in endpoint");
    for (char c : port_text)
    {
        if (c < '0' || c > '9')
            throw std::invalid_argument("bad port in endpoint");
        port = port * 10 + static_cast<unsigned long>(c - '0');
    }
    if (port > 65535)
        throw std::invalid_argument("port out of range");
    return {host, static_cast<std::uint16_t>(port)};
}

TcpStream::TcpStream(int fd)
: fd_{fd}
{
    int one = 1;
    setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
}

TcpStream::~TcpStream()
{
    close();
    ::close(fd_.load());
}

void TcpStream::write_all(const void* data, std::size_t size)
{
    const char* p = static_cast<const char*>(data);
    while (size > 0)
    {
        const ssize_t n = ::send(fd_.load(), p, size, MSG_NOSIGNAL);
        if (n < 0)
        {
            if (errno == EINTR)
                continue;
            throw ConnectionLost(std::string("send failed: ") + std::strerror(errno));
        }
        p += n;
        size -= static_cast<std::size_t>(n);
    }
}

std::size_t TcpStream::read_some(void* data, std::size_t size)
{
    for (;;)
    {
        const ssize_t n = ::recv(fd_.load(), data, size, 0);
        if (n >= 0)
            return static_cast<std::size_t>(n);
        if (errno == EINTR)
            continue;
        if (errno == ECONNRESET)
            return 0;
        throw ConnectionLost(std::string("recv failed: ") + std::strerror(errno));
    }
}

void TcpStream::close()
{
    std::call_once(shut_, [this] { ::shutdown(fd_.load(), SHUT_RDWR); });
}

std::unique_ptr<TcpStream> connect_tcp(const Endpoint& endpoint)
{
    AddrInfo info;
    if (const int rc = resolve(endpoint, false, info); rc != 0)
        throw ConnectionLost("cannot resolve " + endpoint.host + ": " + gai_strerror(rc));
    int last_errno = 0;
    for (addrinfo* ai = info.head; ai; ai = ai->ai_next)
    {
        const int fd = ::socket(ai->ai_family, ai->ai_socktype | SOCK_CLOEXEC, ai->ai_protocol);
        if (fd < 0)
        {
            last_errno = errno;
            continue;
        }
        if (::connect(fd, ai->ai_addr, ai->ai_addrlen) == 0)
            return std::make_unique<TcpStream>(fd);
        last_errno = errno;
        ::close(fd);
    }
    throw ConnectionLost("cannot connect to " + endpoint.to_string() + ": " + std::strerror(last_errno));
}

TcpListener::TcpListener(const Endpoint& endpoint)
: fd_{-1}
{
    AddrInfo info;
    if (const int rc = resolve(endpoint, true, info); rc != 0)
        throw std::system_error(std::make_error_code(std::errc::invalid_argument),
                                "cannot resolve " + endpoint.host + ": " + gai_strerror(rc));
    int last_errno = EADDRNOTAVAIL;
    for (addrinfo* ai = info.head; ai; ai = ai->ai_next)
    {
        const int fd = ::socket(ai->ai_family, ai->ai_socktype | SOCK_CLOEXEC, ai->ai_protocol);
        if (fd < 0)
        {
            last_errno = errno;
            continue;
        }
        int one = 1;
        setsockopt(fd, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
        if (::bind(fd, ai->ai_addr, ai->ai_addrlen) == 0 && ::listen(fd, 64) == 0)
        {
            sockaddr_storage bound{};
            socklen_t len = sizeof bound;
            getsockname(fd, reinterpret_cast<sockaddr*>(&bound), &len);
            if (bound.ss_family == AF_INET)
                port_ = ntohs(reinterpret_cast<sockaddr_in*>(&bound)->sin_port);
            else
                port_ = ntohs(reinterpret_cast<sockaddr_in6*>(&bound)->sin6_port);
            fd_ = fd;
            return;
        }
        last_errno = errno;
        ::close(fd);
    }
    throw std::system_error(last_errno, std::generic_category(), "cannot listen on " + endpoint.to_string());
}

TcpListener::~TcpListener()
{
    close();
    ::close(fd_.load());
}

std::unique_ptr<TcpStream> TcpListener::accept()
{
    while (!closed_)
    {
        pollfd pfd{fd_.load(), POLLIN, 0};
        const int rc = ::poll(&pfd, 1, 200);
        if (rc <= 0)
            continue;
        const int fd = ::accept4(fd_.load(), nullptr, nullptr, SOCK_CLOEXEC);
        if (fd >= 0)
            return std::make_unique<TcpStream>(fd);
        if (errno != EINTR && errno != ECONNABORTED && errno != EAGAIN)
            break;
    }
    return nullptr;
}

void TcpListener::close()
{
    if (!closed_.exchange(true))
        ::shutdown(fd_.load(), SHUT_RDWR);
}

} // namespace threepc
