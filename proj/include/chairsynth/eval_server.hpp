#pragma once

#include "chairsynth/evalsvc.hpp"

#include <filesystem>
#include <memory>
#include <string>
#include <thread>

namespace httplib {
class Server;
}

namespace chairsynth {

// HTTP front end for EvalService.
//   GET  /api/motions               catalogue
//   GET  /api/motions/<id>          frames and the four views
//   GET  /api/views                 view definitions around the origin
//   POST /api/responses             submit one response
//   GET  /api/responses[?participant=]
//   GET  /api/analysis
//   GET  /api/filter[?fraction=0.1]
class EvalServer {
 public:
  explicit EvalServer(EvalService& service, std::filesystem::path static_dir = {});
  ~EvalServer();
  EvalServer(const EvalServer&) = delete;
  EvalServer& operator=(const EvalServer&) = delete;

  // Port 0 picks a free port. Returns the bound port; throws IoError when
  // the port is taken.
  int bind(const std::string& host, int port);
  void run();    // blocks until stop()
  void start();  // serves on a background thread
  void stop();

 private:
  EvalService& service_;
  std::unique_ptr<httplib::Server> server_;
  std::thread thread_;
};

}  // namespace chairsynth
