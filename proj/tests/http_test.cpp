#include <gtest/gtest.h>

#include <techdebt/http.hpp>

#include <thread>

#include "fixtures.hpp"

namespace techdebt {
namespace {

using namespace std::chrono_literals;

class HttpTest : public ::testing::Test {
 protected:
  void SetUp() override {
    install_routes(server_, service_, packs_, 200ms);
    port_ = server_.bind_to_any_port("127.0.0.1");
    ASSERT_GT(port_, 0);
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }

  void TearDown() override {
    server_.stop();
    thread_.join();
  }

  httplib::Client client() {
    httplib::Client c("127.0.0.1", port_);
    c.set_read_timeout(10, 0);
    return c;
  }

  Json post(const std::string& path, const Json& body, int expect_status) {
    auto res = client().Post(path, body.dump(), "application/json");
    EXPECT_TRUE(res);
    if (!res) return {};
    EXPECT_EQ(res->status, expect_status) << path << " " << res->body;
    return Json::parse(res->body);
  }

  Json get(const std::string& path, int expect_status) {
    auto res = client().Get(path);
    EXPECT_TRUE(res);
    if (!res) return {};
    EXPECT_EQ(res->status, expect_status) << path << " " << res->body;
    return Json::parse(res->body);
  }

  // Creates a session and joins every seat; returns the creation body.
  Json start(Json body = Json::object()) {
    Json created = post("/sessions", body, 201);
    for (const auto& t : created["tokens"])
      post("/sessions/" + created["session"].get<std::string>() + "/join", Json{{"token", t["token"]}}, 200);
    return created;
  }

  static std::string token(const Json& created, int team, int index = 0) {
    for (const auto& t : created["tokens"])
      if (t["team"] == team && t["index"] == index) return t["token"];
    return {};
  }

  GameService service_;
  PackRegistry packs_;
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
};

TEST_F(HttpTest, CreateReturnsTokens) {
  Json c = post("/sessions", Json{{"seed", 5}}, 201);
  EXPECT_EQ(c["schema"], "techdebt-created");
  EXPECT_EQ(c["version"], kWireVersion);
  EXPECT_EQ(c["seed"], 5);
  ASSERT_EQ(c["tokens"].size(), 4u);
  EXPECT_EQ(c["tokens"][0]["team"], 0);
  EXPECT_TRUE(c["tokens"][0]["token"].is_string());
}

TEST_F(HttpTest, CreateRejectsBadConfig) {
  Json e = post("/sessions", Json{{"pack", "nope"}}, 400);
  EXPECT_EQ(e["error"]["code"], "invalid_config");
  post("/sessions", Json{{"teams", Json::array({Json::array({"a"})})}}, 400);
  post("/sessions", Json{{"seed", -3}}, 400);
  post("/sessions", Json{{"max_rounds", "many"}}, 400);
  post("/sessions", Json{{"clock_minutes", 0}}, 400);
  auto res = client().Post("/sessions", "{oops", "application/json");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 400);
  EXPECT_EQ(Json::parse(res->body)["error"]["code"], "malformed");
}

TEST_F(HttpTest, CustomRostersAndRounds) {
  Json c = post("/sessions",
                Json{{"seed", 1}, {"max_rounds", 5}, {"teams", Json::array({Json::array({"Ann"}), Json::array({"Bo"})})},
                     {"clock_minutes", nullptr}},
                201);
  ASSERT_EQ(c["tokens"].size(), 2u);
  EXPECT_EQ(c["tokens"][0]["name"], "Ann");
  std::string id = c["session"];
  Json j = post("/sessions/" + id + "/join", Json{{"token", c["tokens"][0]["token"]}}, 200);
  EXPECT_EQ(j["view"]["state"]["max_rounds"], 5);
  EXPECT_EQ(j["view"]["status"], "lobby");
}

TEST_F(HttpTest, JoinFlow) {
  Json c = post("/sessions", Json::object(), 201);
  std::string id = c["session"];
  for (std::size_t k = 0; k < 4; ++k) {
    Json j = post("/sessions/" + id + "/join", Json{{"token", c["tokens"][k]["token"]}}, 200);
    EXPECT_EQ(j["seat"]["team"], c["tokens"][k]["team"]);
  }
  Json full = post("/sessions/" + id + "/join", Json{{"token", "deadbeef"}}, 409);
  EXPECT_EQ(full["error"]["code"], "session_full");
  Json missing = post("/sessions/" + id + "/join", Json::object(), 403);
  EXPECT_EQ(missing["error"]["code"], "bad_token");
  Json unknown = post("/sessions/abcdef/join", Json{{"token", "x"}}, 404);
  EXPECT_EQ(unknown["error"]["code"], "not_found");
}

TEST_F(HttpTest, MovesAndState) {
  Json c = start(Json{{"seed", 3}});
  std::string id = c["session"];
  std::string t0 = token(c, 0, 1), t1 = token(c, 1);
  Json ok = post("/sessions/" + id + "/moves",
                 Json{{"token", t0}, {"move", Json{{"type", "start_ticket"}, {"module", "A"}}}}, 200);
  EXPECT_EQ(ok["accepted"], true);
  EXPECT_EQ(ok["view"]["seq"], 1);

  Json wrong = post("/sessions/" + id + "/moves",
                    Json{{"token", t0}, {"move", Json{{"type", "start_ticket"}, {"module", "B"}}}}, 403);
  EXPECT_EQ(wrong["accepted"], false);
  EXPECT_EQ(wrong["error"]["code"], "not_your_seats_team");

  Json bad = post("/sessions/" + id + "/moves", Json{{"token", t1}, {"move", Json{{"type", "dance"}}}}, 400);
  EXPECT_EQ(bad["error"]["code"], "malformed");
  Json nomove = post("/sessions/" + id + "/moves", Json{{"token", t1}}, 400);
  EXPECT_EQ(nomove["error"]["code"], "malformed");

  Json illegal = post("/sessions/" + id + "/moves",
                      Json{{"token", t1}, {"move", Json{{"type", "work"}, {"module", "C"}}}}, 409);
  EXPECT_EQ(illegal["error"]["code"], "illegal_move");

  Json st = get("/sessions/" + id + "/state?token=" + t1, 200);
  EXPECT_EQ(st["your_turn"], true);
  EXPECT_EQ(st["state"]["teams"][0]["modules"][0]["in_progress"]["id"], "ARCH-A");

  httplib::Headers h{{"Authorization", "Bearer " + t1}};
  auto res = client().Get("/sessions/" + id + "/state", h);
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 200);
  get("/sessions/" + id + "/state?token=nope", 403);
}

TEST_F(HttpTest, StreamDeliversPushesThenEnd) {
  Json c = start(Json{{"seed", 4}, {"max_rounds", 2}});
  std::string id = c["session"];
  Rng rng(4);
  int moves = 0;
  while (service_.status(id) == SessionStatus::Running) {
    GameState s = service_.state(id);
    Move m = random_policy().decide(s, legal_moves(s), rng);
    post("/sessions/" + id + "/moves", Json{{"token", token(c, s.active_team)}, {"move", to_json(m)}}, 200);
    ++moves;
  }
  std::string body;
  auto res = client().Get("/sessions/" + id + "/stream?token=" + token(c, 1, 1),
                          [&](const char* data, std::size_t n) {
                            body.append(data, n);
                            return true;
                          });
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 200);
  std::vector<Json> pushes;
  std::size_t pos = 0;
  while ((pos = body.find("data: ", pos)) != std::string::npos) {
    auto end = body.find('\n', pos);
    pushes.push_back(Json::parse(body.substr(pos + 6, end - pos - 6)));
    pos = end;
  }
  ASSERT_EQ(pushes.size(), static_cast<std::size_t>(moves) + 1);
  for (int k = 0; k < moves; ++k) EXPECT_EQ(pushes[k]["seq"], k + 1);
  EXPECT_NE(body.find("id: 1\nevent: push\n"), std::string::npos);
  EXPECT_NE(body.rfind("event: end\n"), std::string::npos);
  EXPECT_EQ(pushes.back()["seq"], moves);
  EXPECT_EQ(pushes[moves - 1]["view"]["status"], "finished");
}

TEST_F(HttpTest, StreamResumesFromLastEventId) {
  Json c = start(Json{{"seed", 6}, {"max_rounds", 2}});
  std::string id = c["session"];
  Rng rng(6);
  int moves = 0;
  while (service_.status(id) == SessionStatus::Running) {
    GameState s = service_.state(id);
    Move m = random_policy().decide(s, legal_moves(s), rng);
    service_.submit(id, token(c, s.active_team), m);
    ++moves;
  }
  std::string body;
  httplib::Headers h{{"Last-Event-ID", "2"}};
  auto res = client().Get("/sessions/" + id + "/stream?token=" + token(c, 0), h,
                          [&](const char* data, std::size_t n) {
                            body.append(data, n);
                            return true;
                          });
  ASSERT_TRUE(res);
  EXPECT_EQ(body.find("id: 1\n"), std::string::npos);
  EXPECT_EQ(body.find("id: 2\n"), std::string::npos);
  EXPECT_NE(body.find("id: 3\n"), std::string::npos);
  EXPECT_NE(body.find("id: " + std::to_string(moves) + "\n"), std::string::npos);
}

TEST_F(HttpTest, LiveStreamSeesMovesAsTheyHappen) {
  Json c = start(Json{{"seed", 8}, {"max_rounds", 3}});
  std::string id = c["session"];
  std::string body;
  std::thread reader([&] {
    client().Get("/sessions/" + id + "/stream?token=" + token(c, 1), [&](const char* data, std::size_t n) {
      body.append(data, n);
      return true;
    });
  });
  std::this_thread::sleep_for(300ms);
  Rng rng(8);
  int moves = 0;
  while (service_.status(id) == SessionStatus::Running) {
    GameState s = service_.state(id);
    service_.submit(id, token(c, s.active_team), random_policy().decide(s, legal_moves(s), rng));
    ++moves;
    std::this_thread::sleep_for(5ms);
  }
  reader.join();
  EXPECT_NE(body.find(": keep-alive"), std::string::npos);
  for (int k = 1; k <= moves; ++k) EXPECT_NE(body.find("id: " + std::to_string(k) + "\n"), std::string::npos) << k;
  EXPECT_NE(body.find("event: end"), std::string::npos);
}

TEST_F(HttpTest, ArchiveAndReplay) {
  Json c = start(Json{{"seed", 9}, {"max_rounds", 2}});
  std::string id = c["session"];
  Json nf = post("/sessions/" + id + "/archive", Json::object(), 409);
  EXPECT_EQ(nf["error"]["code"], "not_finished");
  auto none = client().Get("/sessions/" + id + "/replay");
  ASSERT_TRUE(none);
  EXPECT_EQ(none->status, 404);
  Rng rng(9);
  while (service_.status(id) == SessionStatus::Running) {
    GameState s = service_.state(id);
    service_.submit(id, token(c, s.active_team), random_policy().decide(s, legal_moves(s), rng));
  }
  Json a = post("/sessions/" + id + "/archive", Json::object(), 200);
  EXPECT_EQ(a["archived"], true);
  post("/sessions/" + id + "/archive", Json::object(), 200);
  auto res = client().Get("/sessions/" + id + "/replay");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 200);
  EXPECT_EQ(res->get_header_value("Content-Type"), "application/x-ndjson");
  EXPECT_EQ(replay(read_replay(res->body)), service_.state(id));
  post("/sessions/abc123/archive", Json::object(), 404);
}

TEST_F(HttpTest, UnknownRouteIs404) {
  auto res = client().Get("/nothing");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 404);
}

}  // namespace
}  // namespace techdebt
