#pragma once

// The API server on an ephemeral loopback port, for the lifetime of the object.

#include <stdexcept>
#include <thread>

#include <httplib.h>

#include "newton_lens/server.hpp"

namespace fixtures {

class TestServer {
 public:
  explicit TestServer(newton_lens::ServerOptions opt = {}) {
    newton_lens::install_routes(srv_, opt);
    port_ = srv_.bind_to_any_port("127.0.0.1");
    if (port_ <= 0) throw std::runtime_error("could not bind a loopback port");
    thread_ = std::thread([this] { srv_.listen_after_bind(); });
    srv_.wait_until_ready();
  }
  ~TestServer() {
    srv_.stop();
    thread_.join();
  }
  TestServer(const TestServer&) = delete;
  TestServer& operator=(const TestServer&) = delete;

  [[nodiscard]] int port() const { return port_; }
  [[nodiscard]] httplib::Client client() const {
    httplib::Client c("127.0.0.1", port_);
    c.set_read_timeout(10, 0);
    return c;
  }

 private:
  httplib::Server srv_;
  int port_ = 0;
  std::thread thread_;
};

}  // namespace fixtures
