// Copyright 2026 The qmonty Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Routes:
//   POST /sessions                 body: {n_boxes, alice_mode, placement, seed?}
//   GET  /sessions/{id}
//   POST /sessions/{id}/act        body: {type: pick, box} | {type: decide, strategy, eta?, beta?}
//   GET  /whatif?alpha0=&alpha1=&eta=|beta=
//   GET  /sweep?grid=21x21x11&quantum_bob=0&format=json|csv

#pragma once

#include <map>
#include <string>

// Before httplib.h: <resolv.h> defines a _res macro that collides with Eigen.
#include "qmonty/service.hpp"

#include "httplib.h"
#include "json.hpp"

namespace qmonty {

namespace http_detail {

inline std::map<std::string, std::string> QueryParams(const httplib::Request& req) {
  std::map<std::string, std::string> out;
  for (const auto& [k, v] : req.params) out[k] = v;
  return out;
}

inline void Send(httplib::Response& res, const ServiceResponse& r) {
  res.status = r.status;
  res.set_content(r.body, r.content_type);
}

inline bool ParseBody(const httplib::Request& req, httplib::Response& res, Json& out) {
  try {
    out = req.body.empty() ? Json::object() : Json::parse(req.body);
    return true;
  } catch (const Json::exception& e) {
    Send(res, ErrorResponse(400, "bad_json", e.what()));
    return false;
  }
}

}  // namespace http_detail

inline void RegisterRoutes(httplib::Server& server, SessionService& service) {
  server.Post("/sessions", [&service](const httplib::Request& req, httplib::Response& res) {
    Json body;
    if (http_detail::ParseBody(req, res, body)) http_detail::Send(res, service.CreateSession(body));
  });
  server.Get(R"(/sessions/([0-9a-f]+))", [&service](const httplib::Request& req, httplib::Response& res) {
    http_detail::Send(res, service.GetSession(req.matches[1]));
  });
  server.Post(R"(/sessions/([0-9a-f]+)/act)", [&service](const httplib::Request& req, httplib::Response& res) {
    Json body;
    if (http_detail::ParseBody(req, res, body)) http_detail::Send(res, service.Act(req.matches[1], body));
  });
  server.Get("/whatif", [](const httplib::Request& req, httplib::Response& res) {
    http_detail::Send(res, SessionService::WhatIf(http_detail::QueryParams(req)));
  });
  server.Get("/sweep", [](const httplib::Request& req, httplib::Response& res) {
    http_detail::Send(res, SessionService::Sweep(http_detail::QueryParams(req)));
  });
  server.set_error_handler([](const httplib::Request&, httplib::Response& res) {
    if (res.body.empty()) {
      res.set_content(Json{{"code", "http_" + std::to_string(res.status)}, {"message", "no such route"}}.dump(),
                      "application/json");
    }
  });
}

}  // namespace qmonty
