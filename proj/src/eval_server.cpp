#include "chairsynth/eval_server.hpp"

#include "httplib.h"

namespace chairsynth {

using nlohmann::json;

namespace {

void send_json(httplib::Response& res, const json& body, int status = 200) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

template <typename F>
httplib::Server::Handler guarded(F f) {
  return [f](const httplib::Request& req, httplib::Response& res) {
    try {
      f(req, res);
    } catch (const NotFound& e) {
      send_json(res, {{"error", e.what()}}, 404);
    } catch (const InvalidArgument& e) {
      send_json(res, {{"error", e.what()}}, 400);
    } catch (const ParseError& e) {
      send_json(res, {{"error", e.what()}}, 400);
    } catch (const json::exception& e) {
      send_json(res, {{"error", e.what()}}, 400);
    } catch (const std::exception& e) {
      send_json(res, {{"error", e.what()}}, 500);
    }
  };
}

}  // namespace

EvalServer::EvalServer(EvalService& service, std::filesystem::path static_dir)
    : service_(service), server_(std::make_unique<httplib::Server>()) {
  auto& s = *server_;
  s.set_default_headers({{"Access-Control-Allow-Origin", "*"}});
  s.Options(R"(/api/.*)", [](const httplib::Request&, httplib::Response& res) {
    res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
    res.set_header("Access-Control-Allow-Headers", "Content-Type");
    res.status = 204;
  });
  s.Get("/api/motions", guarded([this](const httplib::Request&, httplib::Response& res) {
          send_json(res, service_.list_motions());
        }));
  s.Get(R"(/api/motions/([^/]+))",
        guarded([this](const httplib::Request& req, httplib::Response& res) {
          send_json(res, service_.motion_views(req.matches[1].str()));
        }));
  s.Get("/api/views", guarded([](const httplib::Request&, httplib::Response& res) {
          json out = json::array();
          for (const auto& v : canonical_views(Vec3::Zero())) {
            out.push_back(view_to_json(v));
          }
          send_json(res, out);
        }));
  s.Post("/api/responses", guarded([this](const httplib::Request& req, httplib::Response& res) {
           const EvalResponse r = response_from_json(json::parse(req.body));
           service_.submit(r);
           send_json(res, {{"ok", true}, {"response", response_to_json(r)}});
         }));
  s.Get("/api/responses", guarded([this](const httplib::Request& req, httplib::Response& res) {
          json out = json::array();
          for (const auto& r : service_.responses(req.get_param_value("participant"))) {
            out.push_back(response_to_json(r));
          }
          send_json(res, out);
        }));
  s.Get("/api/analysis", guarded([this](const httplib::Request&, httplib::Response& res) {
          send_json(res, analysis_to_json(service_.analysis()));
        }));
  s.Get("/api/filter", guarded([this](const httplib::Request& req, httplib::Response& res) {
          double fraction = 0.10;
          if (req.has_param("fraction")) {
            try {
              fraction = std::stod(req.get_param_value("fraction"));
            } catch (const std::exception&) {
              throw InvalidArgument("fraction must be a number");
            }
          }
          send_json(res, manifest_to_json(service_.manifest(fraction)));
        }));
  if (!static_dir.empty()) {
    s.set_mount_point("/", static_dir.string());
  }
}

EvalServer::~EvalServer() { stop(); }

int EvalServer::bind(const std::string& host, int port) {
  const int bound = port == 0 ? server_->bind_to_any_port(host) : (server_->bind_to_port(host, port) ? port : -1);
  if (bound <= 0) {
    throw IoError("cannot bind " + host + ":" + std::to_string(port) + " (port in use?)");
  }
  return bound;
}

void EvalServer::run() { server_->listen_after_bind(); }

void EvalServer::start() {
  thread_ = std::thread([this] { server_->listen_after_bind(); });
  server_->wait_until_ready();
}

void EvalServer::stop() {
  if (server_) {
    server_->stop();
  }
  if (thread_.joinable()) {
    thread_.join();
  }
}

}  // namespace chairsynth
