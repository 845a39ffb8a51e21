#pragma once

#include <memory>
#include <string>
#include <thread>

#include "cnldoc/api.hpp"

namespace httplib {
class Server;
}

namespace cnldoc {

/// HTTP transport for Api.
class Server {
 public:
  explicit Server(Api& api);
  ~Server();
  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  /// Binds the socket; port 0 picks a free one. Returns the bound port.
  int bind(const std::string& host, int port);
  /// Serves until stop(). Requires bind().
  void run();
  /// run() on a background thread.
  void start();
  void stop();

 private:
  Api& api_;
  std::unique_ptr<httplib::Server> http_;
  std::thread thread_;
};

}  // namespace cnldoc
