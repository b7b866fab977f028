#pragma once

#include "mmwoz/session.hpp"

#include <atomic>
#include <cstdint>
#include <iosfwd>
#include <mutex>
#include <thread>
#include <vector>

namespace mmwoz::serve {

/// Serves one session over a line stream (standard input/output mode). Returns
/// when the input ends or after a close message.
void serve_stream(std::istream& in, std::ostream& out, kb::DatabasePtr db, const ServeOptions& options);

/// TCP transport: one thread and one independent session per connection, all
/// sharing the read-only database.
class TcpServer {
public:
    TcpServer(kb::DatabasePtr db, ServeOptions options);
    ~TcpServer();
    TcpServer(const TcpServer&) = delete;
    TcpServer& operator=(const TcpServer&) = delete;

    /// Binds 127.0.0.1:`port` (0 = ephemeral) and returns the bound port. Throws IoError.
    std::uint16_t bind(std::uint16_t port);
    /// Accept loop; returns after stop().
    void run();
    void stop();

private:
    void serve_connection(int fd);

    kb::DatabasePtr db_;
    ServeOptions options_;
    int listen_fd_ = -1;
    std::atomic<bool> stopping_{false};
    std::mutex mu_;
    std::vector<std::thread> workers_;
    std::vector<int> client_fds_;
};

}  // namespace mmwoz::serve
