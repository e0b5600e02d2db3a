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

// Seated games between one human and agents, with a JSON-over-HTTP front
// end. Schemas are listed in docs/api.md.

#ifndef DDZ_SERVICE_H_
#define DDZ_SERVICE_H_

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <stdexcept>
#include <string>
#include <vector>

#include "ddz/arena.h"
#include "ddz/engine.h"
#include "ddz/record.h"
#include "json.hpp"

namespace ddz {

class ServiceError : public std::runtime_error {
 public:
  enum class Code { kInvalidConfig, kNotFound, kForbidden, kIllegalMove, kConflict };

  ServiceError(Code code, const std::string& what, std::string reason = {})
      : std::runtime_error(what), code_(code), reason_(std::move(reason)) {}

  Code code() const { return code_; }
  // For kIllegalMove: "not-your-turn", "cannot-beat" or "bad-cards".
  const std::string& reason() const { return reason_; }
  int http_status() const;
  nlohmann::json ToJson() const;

 private:
  Code code_;
  std::string reason_;
};

struct ServiceOptions {
  // Completed games are appended to data_dir/records.jsonl.
  std::string data_dir = "data";
  // Used for seats requested as plain "cql".
  std::string checkpoint;
  RhcpConfig rhcp;
};

class GameService {
 public:
  // Loads the records already in data_dir.
  explicit GameService(ServiceOptions options);
  ~GameService();

  // Request: {"seats": {"Landlord": "human", "Peasant Down": "rhcp", ...},
  //           "seed": 7}. Exactly one seat is "human"; the others are agent
  // specs ("random", "rhcp", "cql", "cql:<checkpoint>"). Agents move until
  // the human is to act. Returns {"session": id, "view": ...}.
  nlohmann::json CreateSession(const nlohmann::json& request);
  // The seat's view: own hand, card counts, history, incumbent, and the legal
  // moves when it is the seat's turn.
  nlohmann::json View(const std::string& session, Seat seat);
  // `move` is a card string or "pass". A supplied version must be current.
  nlohmann::json PostMove(const std::string& session, Seat seat, const std::string& move,
                          std::optional<std::int64_t> version);
  std::int64_t Version(const std::string& session);

  // Summaries, oldest first. `winner` filters on the winning seat.
  nlohmann::json ListRecords(std::optional<Seat> winner = std::nullopt);
  // The stored record; it loads with RecordFromJson.
  nlohmann::json GetRecord(const std::string& id);

  const ServiceOptions& options() const { return options_; }

 private:
  struct Session;

  std::shared_ptr<Session> Find(const std::string& id);
  AgentFactory FactoryFor(const std::string& spec);
  void Advance(Session& s);
  nlohmann::json ViewLocked(const Session& s, Seat seat) const;
  void Persist(const Session& s);

  ServiceOptions options_;
  std::shared_mutex sessions_mu_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
  std::mutex factories_mu_;
  std::map<std::string, AgentFactory> factories_;
  std::mutex records_mu_;
  std::vector<nlohmann::json> records_;
  std::mt19937_64 id_rng_;
};

// HTTP front end over a GameService; static files are served from
// `static_dir` when it exists.
class HttpServer {
 public:
  HttpServer(GameService& service, std::string static_dir = {});
  ~HttpServer();

  // Returns the bound port, or -1.
  int Bind(const std::string& host, int port);
  // Blocks until Stop.
  bool ListenAfterBind();
  void Stop();
  void WaitUntilReady();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace ddz

#endif  // DDZ_SERVICE_H_
