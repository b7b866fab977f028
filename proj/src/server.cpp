#include "mmwoz/server.hpp"

#include "mmwoz/errors.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <istream>
#include <ostream>

namespace mmwoz::serve {
namespace {

bool is_close(const std::string& line) {
    try {
        const Json j = Json::parse(line);
        return j.is_object() && j.value("kind", "") == "close";
    } catch (const Json::exception&) {
        return false;
    }
}

bool send_all(int fd, const std::string& data) {
    std::size_t sent = 0;
    while (sent < data.size()) {
        const ssize_t n = ::send(fd, data.data() + sent, data.size() - sent, MSG_NOSIGNAL);
        if (n <= 0) {
            if (n < 0 && errno == EINTR) continue;
            return false;
        }
        sent += static_cast<std::size_t>(n);
    }
    return true;
}

}  // namespace

void serve_stream(std::istream& in, std::ostream& out, kb::DatabasePtr db, const ServeOptions& options) {
    SessionState session = make_session(std::move(db), options);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto [next, reply] = handle_line(session, line);
        session = std::move(next);
        out << reply.dump(-1, ' ', false, Json::error_handler_t::replace) << '\n' << std::flush;
        if (is_close(line) && reply.value("ok", false)) return;
    }
}

TcpServer::TcpServer(kb::DatabasePtr db, ServeOptions options) : db_(std::move(db)), options_(std::move(options)) {}

TcpServer::~TcpServer() {
    stop();
    for (auto& t : workers_) {
        if (t.joinable()) t.join();
    }
}

std::uint16_t TcpServer::bind(std::uint16_t port) {
    listen_fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
    if (listen_fd_ < 0) throw IoError(std::string("socket: ") + std::strerror(errno));
    int yes = 1;
    ::setsockopt(listen_fd_, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof yes);
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
    addr.sin_port = htons(port);
    if (::bind(listen_fd_, reinterpret_cast<sockaddr*>(&addr), sizeof addr) < 0 || ::listen(listen_fd_, 16) < 0) {
        const std::string msg = std::strerror(errno);
        ::close(listen_fd_);
        listen_fd_ = -1;
        throw IoError("cannot listen on port " + std::to_string(port) + ": " + msg);
    }
    socklen_t len = sizeof addr;
    ::getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&addr), &len);
    return ntohs(addr.sin_port);
}

void TcpServer::run() {
    while (!stopping_) {
        const int fd = ::accept(listen_fd_, nullptr, nullptr);
        if (fd < 0) {
            if (errno == EINTR && !stopping_) continue;
            break;
        }
        std::lock_guard lock(mu_);
        if (stopping_) {
            ::close(fd);
            break;
        }
        client_fds_.push_back(fd);
        workers_.emplace_back([this, fd] { serve_connection(fd); });
    }
}

void TcpServer::stop() {
    if (stopping_.exchange(true)) return;
    std::lock_guard lock(mu_);
    if (listen_fd_ >= 0) {
        ::shutdown(listen_fd_, SHUT_RDWR);
        ::close(listen_fd_);
        listen_fd_ = -1;
    }
    for (int fd : client_fds_) ::shutdown(fd, SHUT_RDWR);
}

void TcpServer::serve_connection(int fd) {
    SessionState session = make_session(db_, options_);
    std::string buffer;
    char chunk[4096];
    bool done = false;
    while (!done) {
        const ssize_t n = ::recv(fd, chunk, sizeof chunk, 0);
        if (n < 0 && errno == EINTR) continue;
        if (n <= 0) break;
        buffer.append(chunk, static_cast<std::size_t>(n));
        std::size_t pos;
        while (!done && (pos = buffer.find('\n')) != std::string::npos) {
            std::string line = buffer.substr(0, pos);
            buffer.erase(0, pos + 1);
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (line.empty()) continue;
            auto [next, reply] = handle_line(session, line);
            session = std::move(next);
            if (!send_all(fd, reply.dump(-1, ' ', false, Json::error_handler_t::replace) + "\n")) done = true;
            if (is_close(line) && reply.value("ok", false)) done = true;
        }
    }
    std::lock_guard lock(mu_);
    std::erase(client_fds_, fd);
    ::close(fd);
}

}  // namespace mmwoz::serve
