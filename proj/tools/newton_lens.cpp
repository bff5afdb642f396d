#include <unistd.h>

#include <csignal>
#include <cstdlib>
#include <iostream>

#include "newton_lens/cli.hpp"
#include "newton_lens/server.hpp"

namespace {

httplib::Server* running = nullptr;

void stop(int) {
  if (running != nullptr) running->stop();
}

int serve(const newton_lens::ServeArgs& args) {
  std::string listen = args.listen;
  if (listen.empty()) {
    const char* env = std::getenv("NEWTON_LENS_LISTEN");
    listen = env != nullptr && *env != '\0' ? env : "127.0.0.1:8080";
  }
  newton_lens::ServerOptions opt;
  try {
    std::tie(opt.host, opt.port) = newton_lens::parse_listen(listen);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  opt.allow_origin = args.allow_origin;
  opt.static_dir = args.static_dir;

  httplib::Server srv;
  newton_lens::install_routes(srv, opt);
  const int port = opt.port == 0 ? srv.bind_to_any_port(opt.host) : (srv.bind_to_port(opt.host, opt.port) ? opt.port : -1);
  if (port < 0) {
    std::cerr << "error: cannot listen on " << listen << '\n';
    return 1;
  }
  std::cerr << "listening on http://" << opt.host << ':' << port << std::endl;
  running = &srv;
  std::signal(SIGINT, stop);
  std::signal(SIGTERM, stop);
  const bool ok = srv.listen_after_bind();
  running = nullptr;
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  newton_lens::CliEnv env;
  env.color = isatty(STDOUT_FILENO) != 0 && std::getenv("NEWTON_LENS_NO_COLOR") == nullptr;
  env.serve = serve;
  return newton_lens::run_cli(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr, env);
}
