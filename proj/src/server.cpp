#include "cnldoc/server.hpp"

#include "httplib.h"

namespace cnldoc {

Server::Server(Api& api) : api_(api), http_(std::make_unique<httplib::Server>()) {
  auto handler = [this](const httplib::Request& req, httplib::Response& res) {
    ApiResponse r;
    try {
      r = api_.handle(req.method, req.path, req.body);
    } catch (const std::exception& e) {
      r = {500, {{"error", "internal"}, {"message", e.what()}}};
    }
    res.status = r.status;
    res.set_content(r.body.dump(), "application/json");
  };
  // Api::handle does the routing, so unknown paths get a JSON 404 too.
  http_->Get(".*", handler);
  http_->Post(".*", handler);
  http_->Put(".*", handler);
  http_->Delete(".*", handler);
  http_->Patch(".*", handler);
  // The console may be served from another origin.
  http_->set_default_headers({{"Access-Control-Allow-Origin", "*"}});
  http_->Options(".*", [](const httplib::Request&, httplib::Response& res) {
    res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
    res.set_header("Access-Control-Allow-Headers", "Content-Type");
    res.status = 204;
  });
}

Server::~Server() { stop(); }

int Server::bind(const std::string& host, int port) {
  if (port == 0) {
    int bound = http_->bind_to_any_port(host);
    if (bound < 0) throw Error("cannot bind " + host);
    return bound;
  }
  if (!http_->bind_to_port(host, port)) throw Error("cannot bind " + host + ":" + std::to_string(port));
  return port;
}

void Server::run() { http_->listen_after_bind(); }

void Server::start() {
  thread_ = std::thread([this] { run(); });
  http_->wait_until_ready();
}

void Server::stop() {
  if (http_->is_running()) http_->stop();
  if (thread_.joinable()) thread_.join();
}

}  // namespace cnldoc
