// Copyright 2026 The ddz Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "ddz/service.h"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "httplib.h"

namespace ddz {
namespace {

using nlohmann::json;
using Code = ServiceError::Code;

std::string SeatKey(Seat s) { return std::string(SeatName(s)); }

std::string MoveText(const Move& m) { return m.IsPass() ? "Pass" : FormatCards(m.cards()); }

std::int64_t NowMillis() {
  return std::chrono::duration_cast<std::chrono::milliseconds>(
             std::chrono::system_clock::now().time_since_epoch())
      .count();
}

ServiceError Illegal(const std::string& reason, const std::string& what) {
  return ServiceError(Code::kIllegalMove, what, reason);
}

}  // namespace

int ServiceError::http_status() const {
  switch (code_) {
    case Code::kInvalidConfig:
      return 400;
    case Code::kNotFound:
      return 404;
    case Code::kForbidden:
      return 403;
    case Code::kIllegalMove:
      return 422;
    case Code::kConflict:
      return 409;
  }
  return 500;
}

json ServiceError::ToJson() const {
  static const char* kNames[] = {"invalid-config", "not-found", "forbidden", "illegal-move",
                                 "conflict"};
  json j = {{"error", kNames[static_cast<int>(code_)]}, {"message", what()}};
  if (!reason_.empty()) j["reason"] = reason_;
  return j;
}

struct GameService::Session {
  std::string id;
  GameState state;
  std::array<std::string, kNumSeats> controllers;
  std::array<std::unique_ptr<Agent>, kNumSeats> agents;
  std::mt19937_64 rng;
  std::int64_t created_at = 0;
  std::int64_t finished_at = 0;
  std::mutex mu;

  Session(GameState s, std::uint64_t seed) : state(std::move(s)), rng(seed) {}
  std::int64_t version() const { return static_cast<std::int64_t>(state.history().size()); }
  bool human(Seat seat) const { return !agents[SeatIndex(seat)]; }
};

GameService::GameService(ServiceOptions options)
    : options_(std::move(options)), id_rng_(std::random_device{}()) {
  std::filesystem::create_directories(options_.data_dir);
  std::ifstream in(std::filesystem::path(options_.data_dir) / "records.jsonl");
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    // A torn last line from a crash is skipped.
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.contains("id")) continue;
    records_.push_back(std::move(j));
  }
}

GameService::~GameService() = default;

std::shared_ptr<GameService::Session> GameService::Find(const std::string& id) {
  std::shared_lock lock(sessions_mu_);
  const auto it = sessions_.find(id);
  if (it == sessions_.end()) throw ServiceError(Code::kNotFound, "no session " + id);
  return it->second;
}

AgentFactory GameService::FactoryFor(const std::string& spec_text) {
  std::lock_guard lock(factories_mu_);
  const auto it = factories_.find(spec_text);
  if (it != factories_.end()) return it->second;
  AgentSpec spec;
  try {
    spec = ParseAgentSpec(spec_text == "cql" && !options_.checkpoint.empty()
                              ? "cql:" + options_.checkpoint
                              : spec_text);
  } catch (const std::invalid_argument& e) {
    throw ServiceError(Code::kInvalidConfig, e.what());
  }
  if (spec.kind == AgentKind::kScripted) {
    throw ServiceError(Code::kInvalidConfig, "scripted agents are not available here");
  }
  spec.rhcp = options_.rhcp;
  AgentFactory factory;
  try {
    factory = MakeAgentFactory(spec);
  } catch (const std::exception& e) {
    throw ServiceError(Code::kInvalidConfig, std::string("cannot load agent: ") + e.what());
  }
  factories_.emplace(spec_text, factory);
  return factory;
}

json GameService::CreateSession(const json& request) {
  if (!request.is_object() || !request.contains("seats") || !request["seats"].is_object()) {
    throw ServiceError(Code::kInvalidConfig, "request needs a \"seats\" object");
  }
  std::array<std::optional<std::string>, kNumSeats> kinds;
  for (const auto& [name, value] : request["seats"].items()) {
    const auto seat = SeatFromName(name);
    if (!seat) throw ServiceError(Code::kInvalidConfig, "unknown seat '" + name + "'");
    if (!value.is_string()) throw ServiceError(Code::kInvalidConfig, "seat kinds are strings");
    kinds[SeatIndex(*seat)] = value.get<std::string>();
  }
  int humans = 0;
  for (Seat s : kAllSeats) {
    if (!kinds[SeatIndex(s)]) {
      throw ServiceError(Code::kInvalidConfig, "missing seat " + SeatKey(s));
    }
    humans += *kinds[SeatIndex(s)] == "human";
  }
  if (humans != 1) throw ServiceError(Code::kInvalidConfig, "exactly one seat must be human");

  std::uint64_t seed;
  if (request.contains("seed")) {
    if (!request["seed"].is_number_unsigned()) {
      throw ServiceError(Code::kInvalidConfig, "seed must be a non-negative integer");
    }
    seed = request["seed"].get<std::uint64_t>();
  } else {
    seed = std::random_device{}();
  }
  std::mt19937_64 deal_rng(seed);
  auto session = std::make_shared<Session>(GameState::Deal(deal_rng), EpisodeSeed(seed, 1));
  for (Seat s : kAllSeats) {
    const std::string& kind = *kinds[SeatIndex(s)];
    session->controllers[SeatIndex(s)] = kind;
    if (kind != "human") session->agents[SeatIndex(s)] = FactoryFor(kind)(s);
  }
  session->created_at = NowMillis();
  {
    std::unique_lock lock(sessions_mu_);
    do {
      std::ostringstream id;
      id << std::hex << id_rng_();
      session->id = id.str();
    } while (sessions_.count(session->id));
    sessions_.emplace(session->id, session);
  }
  std::lock_guard lock(session->mu);
  Advance(*session);
  Seat human = Seat::kLandlord;
  for (Seat s : kAllSeats) {
    if (session->human(s)) human = s;
  }
  return {{"session", session->id}, {"view", ViewLocked(*session, human)}};
}

void GameService::Advance(Session& s) {
  while (!s.state.IsTerminal() && !s.human(s.state.to_act())) {
    const Seat seat = s.state.to_act();
    s.state = s.state.Apply(s.agents[SeatIndex(seat)]->Act(s.state.Observe(seat), s.rng));
  }
  if (s.state.IsTerminal() && s.finished_at == 0) {
    s.finished_at = NowMillis();
    Persist(s);
  }
}

void GameService::Persist(const Session& s) {
  json j = RecordToJson(ExportRecord(s.state));
  j["id"] = s.id;
  j["created_at"] = s.created_at;
  j["finished_at"] = s.finished_at;
  json controllers = json::object();
  for (Seat seat : kAllSeats) controllers[SeatKey(seat)] = s.controllers[SeatIndex(seat)];
  j["controllers"] = controllers;
  std::lock_guard lock(records_mu_);
  std::ofstream out(std::filesystem::path(options_.data_dir) / "records.jsonl", std::ios::app);
  out << j.dump() << "\n";
  out.flush();
  records_.push_back(std::move(j));
}

json GameService::ViewLocked(const Session& s, Seat seat) const {
  const GameState& g = s.state;
  json v;
  v["session"] = s.id;
  v["seat"] = SeatKey(seat);
  v["version"] = s.version();
  v["hand"] = FormatCards(g.hand(seat));
  json sizes = json::object();
  json controllers = json::object();
  for (Seat o : kAllSeats) {
    sizes[SeatKey(o)] = g.hand(o).Size();
    controllers[SeatKey(o)] = s.controllers[SeatIndex(o)];
  }
  v["hand_sizes"] = sizes;
  v["controllers"] = controllers;
  v["round"] = g.round();
  v["history"] = json::array();
  for (const HistoryEntry& h : g.history()) {
    v["history"].push_back({{"seat", SeatKey(h.seat)}, {"move", MoveText(h.move)}});
  }
  if (g.incumbent()) {
    v["incumbent"] = {{"seat", SeatKey(g.incumbent()->seat)},
                      {"cards", FormatCards(g.incumbent()->group.cards)}};
  } else {
    v["incumbent"] = nullptr;
  }
  const bool finished = g.IsTerminal();
  v["finished"] = finished;
  v["to_act"] = finished ? json() : json(SeatKey(g.to_act()));
  v["your_turn"] = !finished && g.to_act() == seat;
  v["legal_moves"] = json::array();
  if (!finished && g.to_act() == seat) {
    for (int index : g.LegalMoveIndices()) v["legal_moves"].push_back(MoveText(Catalog().at(index)));
  }
  v["winner"] = finished ? json(SeatKey(*g.winner())) : json();
  v["record_id"] = finished ? json(s.id) : json();
  return v;
}

json GameService::View(const std::string& id, Seat seat) {
  auto s = Find(id);
  std::lock_guard lock(s->mu);
  if (!s->human(seat)) throw ServiceError(Code::kForbidden, SeatKey(seat) + " is not human");
  return ViewLocked(*s, seat);
}

std::int64_t GameService::Version(const std::string& id) {
  auto s = Find(id);
  std::lock_guard lock(s->mu);
  return s->version();
}

json GameService::PostMove(const std::string& id, Seat seat, const std::string& text,
                           std::optional<std::int64_t> version) {
  auto s = Find(id);
  std::lock_guard lock(s->mu);
  if (!s->human(seat)) throw ServiceError(Code::kForbidden, SeatKey(seat) + " is not human");
  if (version && *version != s->version()) {
    throw ServiceError(Code::kConflict, "stale version " + std::to_string(*version) +
                                            ", current " + std::to_string(s->version()));
  }
  const GameState& g = s->state;
  if (g.IsTerminal()) throw Illegal("not-your-turn", "the game is over");
  if (g.to_act() != seat) throw Illegal("not-your-turn", SeatKey(g.to_act()) + " is to act");

  Move move = Move::Pass();
  std::string lowered;
  for (char c : text) lowered += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (lowered == "pass") {
    if (!g.incumbent()) throw Illegal("bad-cards", "cannot pass when leading");
  } else {
    CardMultiset cards;
    try {
      cards = ParseCards(text);
    } catch (const CardError& e) {
      throw Illegal("bad-cards", e.what());
    }
    if (!g.hand(seat).Contains(cards)) throw Illegal("bad-cards", "cards are not in hand");
    const auto group = Classify(cards);
    if (!group || group->category == Category::kNone) {
      throw Illegal("bad-cards", "not a legal card group");
    }
    move = Move(*group);
    if (g.incumbent() && !Beats(*group, g.incumbent()->group)) {
      throw Illegal("cannot-beat", FormatCards(cards) + " does not beat " +
                                       FormatCards(g.incumbent()->group.cards));
    }
  }
  if (!g.IsLegal(move)) throw Illegal("bad-cards", "illegal move");
  s->state = g.Apply(move);
  Advance(*s);
  return {{"version", s->version()}, {"view", ViewLocked(*s, seat)}};
}

json GameService::ListRecords(std::optional<Seat> winner) {
  std::lock_guard lock(records_mu_);
  json out = json::array();
  for (const json& r : records_) {
    if (winner && r.value("winner", json()) != json(SeatKey(*winner))) continue;
    out.push_back({{"id", r["id"]},
                   {"winner", r.value("winner", json())},
                   {"moves", r.contains("rows") ? r["rows"].size() : 0},
                   {"finished_at", r.value("finished_at", json())},
                   {"controllers", r.value("controllers", json::object())}});
  }
  return out;
}

json GameService::GetRecord(const std::string& id) {
  std::lock_guard lock(records_mu_);
  for (const json& r : records_) {
    if (r["id"] == id) return r;
  }
  throw ServiceError(Code::kNotFound, "no record " + id);
}

struct HttpServer::Impl {
  GameService& service;
  httplib::Server server;

  explicit Impl(GameService& s) : service(s) {}
};

namespace {

void Reply(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

template <typename Fn>
httplib::Server::Handler Guard(Fn fn) {
  return [fn](const httplib::Request& req, httplib::Response& res) {
    try {
      Reply(res, 200, fn(req));
    } catch (const ServiceError& e) {
      Reply(res, e.http_status(), e.ToJson());
    } catch (const json::exception& e) {
      Reply(res, 400, {{"error", "bad-request"}, {"message", e.what()}});
    } catch (const std::exception& e) {
      Reply(res, 500, {{"error", "internal"}, {"message", e.what()}});
    }
  };
}

Seat SeatParam(const std::string& text) {
  const auto seat = SeatFromName(text);
  if (!seat) throw ServiceError(Code::kInvalidConfig, "unknown seat '" + text + "'");
  return *seat;
}

}  // namespace

HttpServer::HttpServer(GameService& service, std::string static_dir)
    : impl_(std::make_unique<Impl>(service)) {
  httplib::Server& srv = impl_->server;
  GameService* svc = &service;
  srv.Get("/api/health", Guard([](const httplib::Request&) { return json{{"status", "ok"}}; }));
  srv.Post("/api/sessions", Guard([svc](const httplib::Request& req) {
             return svc->CreateSession(json::parse(req.body));
           }));
  srv.Get(R"(/api/sessions/([0-9a-f]+)/view)", Guard([svc](const httplib::Request& req) {
            if (!req.has_param("seat")) {
              throw ServiceError(Code::kInvalidConfig, "missing seat parameter");
            }
            return svc->View(req.matches[1], SeatParam(req.get_param_value("seat")));
          }));
  srv.Get(R"(/api/sessions/([0-9a-f]+)/version)", Guard([svc](const httplib::Request& req) {
            return json{{"version", svc->Version(req.matches[1])}};
          }));
  srv.Post(R"(/api/sessions/([0-9a-f]+)/moves)", Guard([svc](const httplib::Request& req) {
             const json body = json::parse(req.body);
             std::optional<std::int64_t> version;
             if (body.contains("version") && !body["version"].is_null()) {
               version = body["version"].get<std::int64_t>();
             }
             return svc->PostMove(req.matches[1], SeatParam(body.at("seat").get<std::string>()),
                                  body.at("cards").get<std::string>(), version);
           }));
  srv.Get("/api/records", Guard([svc](const httplib::Request& req) {
            std::optional<Seat> winner;
            if (req.has_param("winner")) winner = SeatParam(req.get_param_value("winner"));
            return svc->ListRecords(winner);
          }));
  srv.Get(R"(/api/records/([0-9a-f]+))", Guard([svc](const httplib::Request& req) {
            return svc->GetRecord(req.matches[1]);
          }));
  if (!static_dir.empty() && std::filesystem::is_directory(static_dir)) {
    srv.set_mount_point("/", static_dir);
  }
}

HttpServer::~HttpServer() { Stop(); }

int HttpServer::Bind(const std::string& host, int port) {
  if (port == 0) return impl_->server.bind_to_any_port(host);
  return impl_->server.bind_to_port(host, port) ? port : -1;
}

bool HttpServer::ListenAfterBind() { return impl_->server.listen_after_bind(); }

void HttpServer::Stop() {
  if (impl_) impl_->server.stop();
}

void HttpServer::WaitUntilReady() { impl_->server.wait_until_ready(); }

}  // namespace ddz
