// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The tracelab Authors

#include <charconv>
#include <thread>

#include "tracelab/error.hpp"
#include "tracelab/vet.hpp"
#include "vet_json.hpp"

// After Eigen: <resolv.h>, pulled in by httplib, defines a `_res` macro.
#include <httplib.h>

using nlohmann::json;

namespace tracelab::vet {

namespace {

int http_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::not_found: return 404;
    case ErrorCode::invalid_argument:
    case ErrorCode::validation:
    case ErrorCode::incompatible: return 400;
    case ErrorCode::load:
    case ErrorCode::version_mismatch: return 422;
    case ErrorCode::io: return 500;
  }
  return 500;
}

void reply(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

template <typename Handler>
httplib::Server::Handler guarded(Handler h) {
  return [h](const httplib::Request& req, httplib::Response& res) {
    try {
      h(req, res);
    } catch (const Error& e) {
      reply(res, http_status(e.code()), {{"error", e.what()}, {"code", to_string(e.code())}});
    } catch (const json::exception& e) {
      reply(res, 400, {{"error", std::string("bad request body: ") + e.what()}});
    } catch (const std::exception& e) {
      reply(res, 500, {{"error", e.what()}});
    }
  };
}

std::size_t query_size(const httplib::Request& req, const char* name, std::size_t fallback) {
  if (!req.has_param(name)) return fallback;
  std::string v = req.get_param_value(name);
  std::size_t out = 0;
  auto r = std::from_chars(v.data(), v.data() + v.size(), out);
  if (r.ec != std::errc() || r.ptr != v.data() + v.size())
    throw Error(ErrorCode::invalid_argument, std::string(name) + " must be a non-negative integer");
  return out;
}

}  // namespace

struct Server::Impl {
  VettingStore& store;
  httplib::Server http;
  std::thread thread;

  explicit Impl(VettingStore& s) : store(s) { routes(); }

  void routes() {
    http.Post("/sessions", guarded([this](const httplib::Request& req, httplib::Response& res) {
      json body = json::parse(req.body);
      SessionRequest r;
      r.dataset = body.at("dataset").get<std::string>();
      r.format = dataset_format_from_string(body.value("format", "coest_dir"));
      if (body.contains("config"))
        for (const auto& [k, v] : body.at("config").items())
          r.config.set(k, v.is_string() ? v.get<std::string>() : v.dump());
      std::string id = store.create_session(r);
      reply(res, 201, {{"session_id", id}, {"total", store.queue_size(id)}});
    }));
    http.Get(R"(/sessions/([^/]+)/candidates)",
             guarded([this](const httplib::Request& req, httplib::Response& res) {
               const std::string id = req.matches[1];
               std::size_t offset = query_size(req, "offset", 0);
               std::size_t limit = query_size(req, "limit", 50);
               auto decided = store.current_decisions(id);
               json items = json::array();
               for (const auto& c : store.candidates(id, offset, limit)) {
                 json j = to_json(c);
                 auto it = decided.find(c.link_id);
                 j["decision"] = it == decided.end() ? json(nullptr)
                                                     : json(to_string(it->second.decision));
                 items.push_back(std::move(j));
               }
               reply(res, 200, {{"session_id", id},
                                {"total", store.queue_size(id)},
                                {"offset", offset},
                                {"candidates", items}});
             }));
    http.Post(R"(/sessions/([^/]+)/decisions)",
              guarded([this](const httplib::Request& req, httplib::Response& res) {
                json body = json::parse(req.body);
                auto stats = store.record_decision(
                    req.matches[1], body.at("link_id").get<std::string>(),
                    decision_from_string(body.at("decision").get<std::string>()),
                    body.value("analyst", ""));
                reply(res, 200, to_json(stats));
              }));
    http.Get(R"(/sessions/([^/]+)/matrix)",
             guarded([this](const httplib::Request& req, httplib::Response& res) {
               json links = json::array();
               for (const auto& [key, link] : store.export_matrix(req.matches[1]))
                 links.push_back(to_json(link));
               reply(res, 200, {{"session_id", std::string(req.matches[1])}, {"links", links}});
             }));
    http.Get(R"(/sessions/([^/]+)/stats)",
             guarded([this](const httplib::Request& req, httplib::Response& res) {
               reply(res, 200, to_json(store.stats(req.matches[1])));
             }));
  }
};

Server::Server(VettingStore& store) : impl_(std::make_unique<Impl>(store)) {}

Server::~Server() { stop(); }

int Server::start(const std::string& host, int port) {
  int bound = port;
  if (port == 0) {
    bound = impl_->http.bind_to_any_port(host);
    if (bound < 0) throw Error(ErrorCode::io, "cannot bind " + host);
  } else if (!impl_->http.bind_to_port(host, port)) {
    throw Error(ErrorCode::io, "cannot bind " + host + ":" + std::to_string(port));
  }
  impl_->thread = std::thread([this] { impl_->http.listen_after_bind(); });
  impl_->http.wait_until_ready();
  return bound;
}

void Server::run(const std::string& host, int port) {
  if (!impl_->http.listen(host, port))
    throw Error(ErrorCode::io, "cannot listen on " + host + ":" + std::to_string(port));
}

void Server::stop() {
  impl_->http.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

}  // namespace tracelab::vet
