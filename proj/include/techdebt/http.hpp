#pragma once

#include <httplib.h>

#include "techdebt/service.hpp"

namespace techdebt {

// Builds a session config from a POST /sessions body:
//   {"pack": "default", "pack_version"?: "1.0.0", "seed"?: 42,
//    "max_rounds"?: 60, "td_penalty"?: 1, "teams"?: [["Ann","Bo"],["Cy","Di"]],
//    "clock_minutes"?: 60 | null}
inline std::pair<SessionConfig, SessionOptions> config_from_request(const Json& body, const PackRegistry& packs) {
  auto bad = [](const std::string& why) { return ServiceError(ServiceErrorCode::InvalidConfig, why); };
  if (!body.is_object()) throw bad("request body must be an object");
  std::string name = body.value("pack", std::string("default"));
  std::string version = body.value("pack_version", std::string());
  auto pack = packs.find(name, version);
  if (!pack) throw bad("unknown pack '" + name + (version.empty() ? "" : " " + version) + "'");
  std::uint64_t seed;
  if (body.contains("seed")) {
    if (!body["seed"].is_number_unsigned()) throw bad("seed must be a non-negative integer");
    seed = body["seed"].get<std::uint64_t>();
  } else {
    seed = (static_cast<std::uint64_t>(std::random_device{}()) << 32) | std::random_device{}();
  }
  SessionConfig c = make_config(pack, seed);
  auto int_field = [&](const char* key, int& out) {
    if (!body.contains(key)) return;
    if (!body[key].is_number_integer()) throw bad(std::string(key) + " must be an integer");
    out = body[key].get<int>();
  };
  int_field("max_rounds", c.max_rounds);
  int_field("td_penalty", c.td_penalty);
  if (body.contains("teams")) {
    const Json& t = body["teams"];
    if (!t.is_array()) throw bad("teams must be an array of name arrays");
    c.teams.clear();
    for (const Json& roster : t) {
      if (!roster.is_array()) throw bad("teams must be an array of name arrays");
      std::vector<Seat> seats;
      for (const Json& n : roster) {
        if (!n.is_string()) throw bad("seat names must be strings");
        seats.push_back({n.get<std::string>(), false});
      }
      c.teams.push_back(std::move(seats));
    }
  }
  SessionOptions opts;
  if (body.contains("clock_minutes")) {
    const Json& m = body["clock_minutes"];
    if (m.is_null())
      opts.clock.reset();
    else if (m.is_number() && m.get<double>() > 0)
      opts.clock = std::chrono::milliseconds(static_cast<long long>(m.get<double>() * 60000));
    else
      throw bad("clock_minutes must be positive or null");
  }
  try {
    validate_config(c);
  } catch (const ConfigError& e) {
    throw bad(e.what());
  }
  return {c, opts};
}

namespace http_detail {

inline int status_for(ServiceErrorCode c) {
  switch (c) {
    case ServiceErrorCode::NotFound: return 404;
    case ServiceErrorCode::BadToken: return 403;
    case ServiceErrorCode::SessionFull: return 409;
    case ServiceErrorCode::InvalidConfig: return 400;
    case ServiceErrorCode::NotRunning: return 409;
    case ServiceErrorCode::NotFinished: return 409;
    case ServiceErrorCode::Malformed: return 400;
  }
  return 500;
}

inline Json error_body(std::string_view code, const std::string& message) {
  return Json{{"error", Json{{"code", code}, {"message", message}}}};
}

inline void send(httplib::Response& res, int status, const Json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

inline Json parse_body(const httplib::Request& req) {
  try {
    return req.body.empty() ? Json::object() : Json::parse(req.body);
  } catch (const nlohmann::json::exception& e) {
    throw ServiceError(ServiceErrorCode::Malformed, std::string("body is not valid JSON: ") + e.what());
  }
}

inline std::string token_of(const httplib::Request& req, const Json* body = nullptr) {
  if (body && body->contains("token") && (*body)["token"].is_string()) return (*body)["token"].get<std::string>();
  if (req.has_param("token")) return req.get_param_value("token");
  auto auth = req.get_header_value("Authorization");
  if (auth.rfind("Bearer ", 0) == 0) return auth.substr(7);
  throw ServiceError(ServiceErrorCode::BadToken, "missing token");
}

template <class F>
void guarded(httplib::Response& res, F&& f) {
  try {
    f();
  } catch (const ServiceError& e) {
    send(res, status_for(e.code()), error_body(to_string(e.code()), e.what()));
  } catch (const std::exception& e) {
    send(res, 500, error_body("internal", e.what()));
  }
}

inline int rejection_status(RejectCode c) {
  switch (c) {
    case RejectCode::Malformed: return 400;
    case RejectCode::NotYourSeat: return 403;
    default: return 409;
  }
}

}  // namespace http_detail

// Registers the wire protocol on `server`. The service and registry must
// outlive the server.
inline void install_routes(httplib::Server& server, GameService& service, const PackRegistry& packs,
                           std::chrono::milliseconds stream_poll = std::chrono::seconds(15)) {
  using namespace http_detail;

  server.Post("/sessions", [&](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      auto [config, opts] = config_from_request(parse_body(req), packs);
      auto created = service.create_session(config, opts);
      Json tokens = Json::array();
      for (const auto& t : created.tokens)
        tokens.push_back(Json{{"team", t.seat.team}, {"index", t.seat.index}, {"name", t.name}, {"token", t.token}});
      send(res, 201,
           Json{{"schema", "techdebt-created"},
                {"version", kWireVersion},
                {"session", created.id},
                {"seed", config.seed},
                {"tokens", tokens}});
    });
  });

  server.Post(R"(/sessions/([0-9a-f]+)/join)", [&](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      Json body = parse_body(req);
      auto [seat, view] = service.join(req.matches[1], token_of(req, &body));
      send(res, 200, Json{{"seat", Json{{"team", seat.team}, {"index", seat.index}}}, {"view", view}});
    });
  });

  server.Post(R"(/sessions/([0-9a-f]+)/moves)", [&](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      Json body = parse_body(req);
      std::string token = token_of(req, &body);
      if (!body.contains("move")) throw ServiceError(ServiceErrorCode::Malformed, "body needs a 'move' object");
      auto r = service.submit_json(req.matches[1], token, body["move"]);
      if (r.accepted()) {
        send(res, 200, Json{{"accepted", true}, {"view", r.view}});
      } else {
        Json b = error_body(to_string(r.rejection->code), r.rejection->message);
        b["accepted"] = false;
        b["view"] = r.view;
        send(res, rejection_status(r.rejection->code), b);
      }
    });
  });

  server.Get(R"(/sessions/([0-9a-f]+)/state)", [&](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] { send(res, 200, service.view(req.matches[1], token_of(req))); });
  });

  // Server-sent events: "push" messages in seq order, then a final "end".
  server.Get(R"(/sessions/([0-9a-f]+)/stream)", [&](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      std::string id = req.matches[1];
      std::string token = token_of(req);
      std::uint64_t after = 0;
      if (req.has_param("after")) after = std::stoull(req.get_param_value("after"));
      else if (req.has_header("Last-Event-ID")) after = std::stoull(req.get_header_value("Last-Event-ID"));
      service.pushes_since(id, token, after);  // validates id and token up front
      auto cursor = std::make_shared<std::uint64_t>(after);
      res.set_header("Cache-Control", "no-cache");
      res.set_chunked_content_provider("text/event-stream", [&service, id, token, cursor, stream_poll](
                                                                std::size_t, httplib::DataSink& sink) {
        PushBatch batch;
        try {
          batch = service.pushes_since(id, token, *cursor, stream_poll);
        } catch (const std::exception&) {
          sink.done();
          return true;
        }
        for (const auto& p : batch.pushes) {
          std::string msg = "id: " + std::to_string(p.at("seq").get<std::uint64_t>()) + "\nevent: push\ndata: " +
                            p.dump() + "\n\n";
          if (!sink.write(msg.data(), msg.size())) return false;
          ++*cursor;
        }
        if (batch.finished) {
          std::string end = "event: end\ndata: {\"seq\":" + std::to_string(*cursor) + "}\n\n";
          sink.write(end.data(), end.size());
          sink.done();
        } else if (batch.pushes.empty()) {
          static constexpr char kKeepAlive[] = ": keep-alive\n\n";
          if (!sink.write(kKeepAlive, sizeof kKeepAlive - 1)) return false;
        }
        return true;
      });
    });
  });

  server.Post(R"(/sessions/([0-9a-f]+)/archive)", [&](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] { send(res, 200, Json{{"archived", true}, {"session", service.archive(req.matches[1])}}); });
  });

  server.Get(R"(/sessions/([0-9a-f]+)/replay)", [&](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      res.status = 200;
      res.set_content(service.fetch_replay(req.matches[1]), "application/x-ndjson");
    });
  });
}

}  // namespace techdebt
