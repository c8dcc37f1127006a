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

// Session store and request handlers behind the HTTP API. Handlers take
// parsed inputs and return a status plus body, so they can be exercised
// without a socket; service_http.hpp binds them to routes.
//
// Bob-view rule: a view of an unresolved round carries no particle location
// (not even past rounds' transcripts) and no generator seed a client could
// replay. Both appear once the round resolves.

#pragma once

#include <chrono>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "qmonty/equilibrium.hpp"
#include "qmonty/errors.hpp"
#include "qmonty/game.hpp"
#include "qmonty/rng.hpp"
#include "qmonty/session.hpp"

namespace qmonty {

using Json = nlohmann::json;

struct ServiceResponse {
  int status = 200;
  std::string body;
  std::string content_type = "application/json";

  Json json() const { return Json::parse(body); }
};

inline ServiceResponse JsonResponse(int status, const Json& j) { return {status, j.dump(), "application/json"}; }

inline ServiceResponse ErrorResponse(int status, const std::string& code, const std::string& message) {
  return JsonResponse(status, Json{{"code", code}, {"message", message}});
}

struct AliceMode {
  enum class Kind { kClassicalHonest, kQuantum, kNStage };
  Kind kind = Kind::kClassicalHonest;
  double alpha0 = 0.0;
  double alpha1 = 0.0;
  TieBreak tie_break = TieBreak::kUniform;

  // Measurement Alice applies once two boxes remain, if any.
  std::optional<AliceMeasurementStrategy> LastStageMeasurement() const {
    switch (kind) {
      case Kind::kClassicalHonest: return std::nullopt;
      case Kind::kQuantum: return AliceMeasurementStrategy(alpha0, alpha1);
      case Kind::kNStage: return AliceMeasurementStrategy::Nash();
    }
    return std::nullopt;
  }

  Json ToJson() const {
    switch (kind) {
      case Kind::kClassicalHonest: return {{"type", "classical-honest"}};
      case Kind::kQuantum: return {{"type", "quantum"}, {"alpha0", alpha0}, {"alpha1", alpha1}};
      case Kind::kNStage: return {{"type", "nstage"}, {"tie_break", ToString(tie_break)}};
    }
    return nullptr;
  }
};

struct RoundRecord {
  int round;
  std::uint64_t seed;
  std::vector<std::string> actions;
  bool win;
  int particle_location;
};

struct SessionRecord {
  std::string id;
  AliceMode alice_mode;
  int n_boxes = 3;
  bool superposed = false;
  std::uint64_t base_seed = 0;
  int round = 0;
  std::optional<GameSession> game;  // current round
  std::int64_t created_ms = 0;
  std::int64_t updated_ms = 0;
  int wins = 0;
  int losses = 0;
  std::vector<RoundRecord> history;
  std::mutex mu;

  int score() const { return wins - losses; }
};

inline std::int64_t NowMillis() {
  return std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::system_clock::now().time_since_epoch())
      .count();
}

namespace service_detail {

inline AliceMode ParseAliceMode(const Json& config) {
  AliceMode mode;
  if (!config.contains("alice_mode")) return mode;
  const Json& spec = config.at("alice_mode");
  const std::string type = spec.is_string() ? spec.get<std::string>() : spec.at("type").get<std::string>();
  const Json& params = spec.is_object() ? spec : config;
  if (type == "classical-honest") {
    mode.kind = AliceMode::Kind::kClassicalHonest;
  } else if (type == "quantum") {
    mode.kind = AliceMode::Kind::kQuantum;
    mode.alpha0 = params.value("alpha0", kQuarterPi);
    mode.alpha1 = params.value("alpha1", kQuarterPi);
    (void)AliceMeasurementStrategy(mode.alpha0, mode.alpha1);  // range check
  } else if (type == "nstage") {
    mode.kind = AliceMode::Kind::kNStage;
    const std::string tb = params.value("tie_break", std::string("uniform"));
    // Live sessions reveal uniformly; the adversarial rule needs Bob's whole
    // policy in advance, which a human player does not commit to.
    if (tb != "uniform") throw DomainError("live sessions support only the uniform tie_break");
  } else {
    throw DomainError("unknown alice_mode '" + type + "'");
  }
  return mode;
}

inline BobStrategy ParseDecision(const Json& action) {
  const std::string s = action.at("strategy").get<std::string>();
  if (s == "stick") return BobStrategy::MakeStick();
  if (s == "switch") return BobStrategy::MakeSwitch();
  if (s == "mix") return BobStrategy::MakeMix(action.at("eta").get<double>());
  if (s == "quantum") return BobStrategy::MakeQuantum(action.at("beta").get<double>());
  throw DomainError("unknown decision '" + s + "'");
}

inline std::string NewId(std::mt19937_64& gen) {
  std::ostringstream os;
  os << std::hex << gen() << gen();
  return os.str();
}

}  // namespace service_detail

inline Json PayoffReportJson(const PayoffReport& r) {
  return {{"p_win", r.p_win}, {"gain", r.gain}, {"method", ToString(r.method)}, {"stderr", r.std_error}};
}

class SessionService {
 public:
  SessionService() : id_gen_(std::random_device{}()) {}

  ServiceResponse CreateSession(const Json& config) {
    std::shared_ptr<SessionRecord> rec;
    try {
      if (!config.is_object()) throw DomainError("session config must be a JSON object");
      auto r = std::make_shared<SessionRecord>();
      r->n_boxes = config.value("n_boxes", 3);
      if (r->n_boxes < 3) throw DomainError("n_boxes must be >= 3");
      if (r->n_boxes > 30) throw DomainError("n_boxes must be <= 30");
      r->alice_mode = service_detail::ParseAliceMode(config);
      const std::string placement = config.value("placement", std::string("classical"));
      if (placement != "classical" && placement != "superposed") {
        throw DomainError("placement must be 'classical' or 'superposed'");
      }
      r->superposed = placement == "superposed";
      if (config.contains("seed") && !config.at("seed").is_null()) {
        r->base_seed = config.at("seed").get<std::uint64_t>();
      } else {
        std::random_device rd;
        r->base_seed = (std::uint64_t{rd()} << 32) ^ rd();
      }
      r->game = NewRound(*r);
      r->created_ms = r->updated_ms = NowMillis();
      rec = std::move(r);
    } catch (const Error& e) {
      return ErrorResponse(400, "invalid_config", e.what());
    } catch (const Json::exception& e) {
      return ErrorResponse(400, "invalid_config", e.what());
    }
    {
      std::lock_guard lock(store_mu_);
      do {
        rec->id = service_detail::NewId(id_gen_);
      } while (sessions_.count(rec->id));
      sessions_.emplace(rec->id, rec);
    }
    std::lock_guard lock(rec->mu);
    return JsonResponse(201, BobView(*rec));
  }

  ServiceResponse GetSession(const std::string& id) {
    auto rec = Find(id);
    if (!rec) return ErrorResponse(404, "not_found", "no session '" + id + "'");
    std::lock_guard lock(rec->mu);
    return JsonResponse(200, BobView(*rec));
  }

  // Alice's reveal and measurement run automatically between Bob's moves.
  ServiceResponse Act(const std::string& id, const Json& action) {
    auto rec = Find(id);
    if (!rec) return ErrorResponse(404, "not_found", "no session '" + id + "'");
    std::lock_guard lock(rec->mu);
    try {
      const std::string type = action.at("type").get<std::string>();
      GameSession g = *rec->game;
      if (type == "pick") {
        if (g.phase() == Phase::kResolved) {
          ++rec->round;
          g = NewRound(*rec);
        }
        g = session_step(std::move(g), PickAction{action.at("box").get<int>()});
        g = AliceMoves(std::move(g), rec->alice_mode);
      } else if (type == "decide") {
        g = session_step(std::move(g), DecideAction{service_detail::ParseDecision(action)});
        if (g.phase() == Phase::kPicked) {
          g = AliceMoves(std::move(g), rec->alice_mode);
        } else {
          g = session_step(std::move(g), ResolveAction{});
          const bool win = *g.outcome();
          (win ? rec->wins : rec->losses) += 1;
          rec->history.push_back({rec->round, g.seed(), g.transcript(), win, *g.alice_location()});
        }
      } else {
        return ErrorResponse(400, "bad_action", "unknown action type '" + type + "'");
      }
      rec->game = std::move(g);
      rec->updated_ms = NowMillis();
    } catch (const ProtocolViolation& e) {
      return ErrorResponse(409, "phase_error", e.what());
    } catch (const Error& e) {
      return ErrorResponse(400, "bad_action", e.what());
    } catch (const Json::exception& e) {
      return ErrorResponse(400, "bad_action", e.what());
    }
    return JsonResponse(200, BobView(*rec));
  }

  // Stateless; same code path as the CLI's payoff command.
  static ServiceResponse WhatIf(const std::map<std::string, std::string>& params) {
    try {
      auto get = [&](const char* key) -> std::optional<double> {
        auto it = params.find(key);
        if (it == params.end() || it->second.empty()) return std::nullopt;
        std::size_t used = 0;
        const double v = std::stod(it->second, &used);
        if (used != it->second.size()) throw DomainError(std::string("malformed number for ") + key);
        return v;
      };
      const auto a0 = get("alpha0");
      const auto a1 = get("alpha1");
      const auto eta = get("eta");
      const auto beta = get("beta");
      if (!a0 || !a1) throw DomainError("alpha0 and alpha1 are required");
      if (eta.has_value() == beta.has_value()) throw DomainError("exactly one of eta or beta is required");
      const AliceMeasurementStrategy alice(*a0, *a1);
      const BobStrategy bob = eta ? BobStrategy::MakeMix(*eta) : BobStrategy::MakeQuantum(*beta);
      Json body = PayoffReportJson(expected_payoff(alice, bob));
      body["alpha0"] = *a0;
      body["alpha1"] = *a1;
      body["eta"] = eta ? Json(*eta) : Json(nullptr);
      body["beta"] = beta ? Json(*beta) : Json(nullptr);
      return JsonResponse(200, body);
    } catch (const Error& e) {
      return ErrorResponse(400, "out_of_range", e.what());
    } catch (const std::logic_error& e) {  // std::stod
      return ErrorResponse(400, "out_of_range", e.what());
    }
  }

  // grid=A0xA1xD, quantum_bob=1, format=json|csv.
  static ServiceResponse Sweep(const std::map<std::string, std::string>& params) {
    try {
      SweepGrid grid;
      if (auto it = params.find("grid"); it != params.end()) {
        int a = 0, b = 0, c = 0;
        char x1 = 0, x2 = 0;
        std::istringstream is(it->second);
        if (!(is >> a >> x1 >> b >> x2 >> c) || x1 != 'x' || x2 != 'x' || !is.eof()) {
          throw DomainError("grid must look like 21x21x11");
        }
        grid = {a, b, c, false};
      } else {
        grid = {21, 21, 11, false};
      }
      if (grid.alpha0_steps * static_cast<long long>(grid.alpha1_steps) * grid.decision_steps > 2'000'000) {
        throw DomainError("grid too large for an HTTP response");
      }
      if (auto it = params.find("quantum_bob"); it != params.end()) {
        grid.quantum_bob = it->second == "1" || it->second == "true";
      }
      const auto rows = sweep_payoff(grid);
      const auto fmt = params.count("format") ? params.at("format") : std::string("json");
      if (fmt == "csv") {
        std::ostringstream os;
        WriteSweepCsv(os, rows);
        return {200, os.str(), "text/csv"};
      }
      if (fmt != "json") throw DomainError("format must be json or csv");
      return JsonResponse(200, SweepToJson(rows));
    } catch (const Error& e) {
      return ErrorResponse(400, "bad_grid", e.what());
    }
  }

  // Resolved rounds of every session, for persistence on shutdown.
  Json Snapshot() {
    Json out = Json::array();
    std::lock_guard lock(store_mu_);
    for (auto& [id, rec] : sessions_) {
      std::lock_guard rec_lock(rec->mu);
      out.push_back({{"id", id}, {"score", rec->score()}, {"history", HistoryJson(*rec)}});
    }
    return out;
  }

  std::size_t size() {
    std::lock_guard lock(store_mu_);
    return sessions_.size();
  }

 private:
  std::shared_ptr<SessionRecord> Find(const std::string& id) {
    std::lock_guard lock(store_mu_);
    auto it = sessions_.find(id);
    return it == sessions_.end() ? nullptr : it->second;
  }

  static GameSession NewRound(const SessionRecord& rec) {
    const std::uint64_t seed = Mix64(rec.base_seed + static_cast<std::uint64_t>(rec.round) * kGoldenGamma);
    if (rec.superposed) {
      return GameSession::Create(rec.n_boxes, UniformSuperposition(rec.n_boxes), seed);
    }
    return GameSession::CreateUniform(rec.n_boxes, seed);
  }

  static GameSession AliceMoves(GameSession g, const AliceMode& mode) {
    g = session_step(std::move(g), RevealAction{});
    if (g.IsFinalStage()) {
      if (auto m = mode.LastStageMeasurement()) g = session_step(std::move(g), MeasureAction{*m});
    }
    return g;
  }

  static Json HistoryJson(const SessionRecord& rec) {
    Json h = Json::array();
    for (const auto& r : rec.history) {
      h.push_back({{"round", r.round},
                   {"seed", r.seed},
                   {"actions", r.actions},
                   {"outcome", r.win ? "win" : "lose"},
                   {"particle_location", r.particle_location}});
    }
    return h;
  }

  static Json BobView(const SessionRecord& rec) {
    const GameSession& g = *rec.game;
    Json view{{"id", rec.id},
              {"round", rec.round},
              {"phase", ToString(g.phase())},
              {"n_boxes", rec.n_boxes},
              {"placement", rec.superposed ? "superposed" : "classical"},
              {"alice_mode", rec.alice_mode.ToJson()},
              {"pick", g.pick() >= 0 ? Json(g.pick()) : Json(nullptr)},
              {"revealed", g.revealed()},
              {"remaining", g.Unrevealed()},
              {"final_stage", g.phase() != Phase::kPlaced && g.IsFinalStage()},
              {"alice_measured", g.measured()},
              {"score", rec.score()},
              {"wins", rec.wins},
              {"losses", rec.losses},
              {"created_ms", rec.created_ms},
              {"updated_ms", rec.updated_ms}};
    if (g.phase() == Phase::kResolved) {
      view["outcome"] = *g.outcome() ? "win" : "lose";
      view["decision"] = BobStrategyToJson(*g.final_decision());
      view["particle_location"] = *g.alice_location();
      view["final_location"] = g.final_location() ? Json(*g.final_location()) : Json(nullptr);
      view["final_box"] = g.final_box() ? Json(*g.final_box()) : Json(nullptr);
      view["history"] = HistoryJson(rec);
    }
    return view;
  }

  std::mutex store_mu_;
  std::map<std::string, std::shared_ptr<SessionRecord>> sessions_;
  std::mt19937_64 id_gen_;
};

}  // namespace qmonty
