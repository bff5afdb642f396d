#pragma once

// HTTP binding of the service handlers (cpp-httplib).

#include <charconv>
#include <cstdlib>
#include <string>
#include <utility>

#include <httplib.h>

#include "newton_lens/service.hpp"

namespace newton_lens {

struct ServerOptions {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::string allow_origin = "*";
  std::string static_dir;  // served at / when set
  service::Config service;
};

/// "host:port", ":port" or "port".
inline std::pair<std::string, int> parse_listen(std::string_view text, const std::string& default_host = "127.0.0.1") {
  std::string host = default_host;
  std::string_view port_text = text;
  if (const auto colon = text.rfind(':'); colon != std::string_view::npos) {
    if (colon > 0) host = std::string(text.substr(0, colon));
    port_text = text.substr(colon + 1);
  }
  int port = -1;
  const auto res = std::from_chars(port_text.data(), port_text.data() + port_text.size(), port);
  if (res.ec != std::errc{} || res.ptr != port_text.data() + port_text.size() || port < 0 || port > 65535) {
    throw std::invalid_argument("listen address must be host:port, got '" + std::string(text) + "'");
  }
  return {host, port};
}

/// Registers the API routes on `srv`.
inline void install_routes(httplib::Server& srv, const ServerOptions& opt) {
  const auto cors = [origin = opt.allow_origin](httplib::Response& res) {
    res.set_header("Access-Control-Allow-Origin", origin);
    res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
    res.set_header("Access-Control-Allow-Headers", "Content-Type");
  };
  const auto send = [cors](httplib::Response& res, const service::Response& r) {
    cors(res);
    res.status = r.status;
    res.set_content(r.body, "application/json");
  };

  srv.Get("/healthz", [send](const httplib::Request&, httplib::Response& res) { send(res, service::healthz()); });
  srv.Post(R"(/api/v1/([a-z]+))", [send, cfg = opt.service](const httplib::Request& req, httplib::Response& res) {
    send(res, service::handle(req.matches[1].str(), req.body, cfg));
  });
  srv.Options(R"(/api/v1/.*)", [cors](const httplib::Request&, httplib::Response& res) {
    cors(res);
    res.status = 204;
  });
  if (!opt.static_dir.empty()) srv.set_mount_point("/", opt.static_dir);

  srv.set_error_handler([send](const httplib::Request& req, httplib::Response& res) {
    if (!res.body.empty()) return;
    const int status = res.status;
    auto r = service::error(status, status == 404 ? "not-found" : "http", "no route for " + req.method + " " + req.path);
    send(res, r);
    res.status = status;
  });
  srv.set_exception_handler([send](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
    std::string what = "unknown error";
    try {
      std::rethrow_exception(ep);
    } catch (const std::exception& e) {
      what = e.what();
    } catch (...) {
    }
    send(res, service::error(500, "internal", what));
  });

  const auto secs = std::chrono::duration_cast<std::chrono::seconds>(opt.service.timeout).count();
  srv.set_read_timeout(secs, 0);
  srv.set_write_timeout(secs, 0);
  srv.set_payload_max_length(1 << 20);
}

}  // namespace newton_lens
