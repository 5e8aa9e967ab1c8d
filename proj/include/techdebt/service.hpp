#pragma once

#include <chrono>
#include <condition_variable>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <random>
#include <shared_mutex>
#include <unordered_map>
#include <unordered_set>

#include <fcntl.h>
#include <unistd.h>

#include "techdebt/session.hpp"

namespace techdebt {

inline constexpr int kWireVersion = 1;

// ---------------------------------------------------------------------------
// Content packs available to the service

class PackRegistry {
 public:
  PackRegistry() { add(default_pack()); }

  void add(std::shared_ptr<const ContentPack> pack) {
    std::lock_guard lock(mu_);
    packs_[pack->name][pack->version] = std::move(pack);
  }

  // Loads every *.json or *.pack file in `dir`. Returns the validation
  // failures as "file: error" lines; valid packs are registered.
  std::vector<std::string> load_dir(const std::filesystem::path& dir) {
    std::vector<std::string> problems;
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
      auto ext = entry.path().extension();
      if (entry.is_regular_file() && (ext == ".json" || ext == ".pack")) files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    for (const auto& f : files) {
      auto res = load_pack_file(f);
      if (res.pack)
        add(std::make_shared<const ContentPack>(std::move(*res.pack)));
      else
        for (const auto& e : res.errors) problems.push_back(f.filename().string() + ": " + to_string(e));
    }
    return problems;
  }

  // Latest version by string order when none is given.
  std::shared_ptr<const ContentPack> find(const std::string& name, const std::string& version = "") const {
    std::lock_guard lock(mu_);
    auto it = packs_.find(name);
    if (it == packs_.end() || it->second.empty()) return nullptr;
    if (version.empty()) return it->second.rbegin()->second;
    auto v = it->second.find(version);
    return v == it->second.end() ? nullptr : v->second;
  }

  PackResolver resolver() const {
    return [this](const std::string& name, const std::string& version) { return find(name, version); };
  }

 private:
  mutable std::mutex mu_;
  std::map<std::string, std::map<std::string, std::shared_ptr<const ContentPack>>> packs_;
};

// ---------------------------------------------------------------------------
// Append-only game log store

namespace store_detail {

// Appends and fsyncs so an acknowledged move survives a crash.
inline void append_durable(const std::filesystem::path& file, std::string_view data) {
  int fd = ::open(file.c_str(), O_WRONLY | O_CREAT | O_APPEND, 0644);
  if (fd < 0) throw std::runtime_error("cannot open " + file.string());
  std::size_t off = 0;
  while (off < data.size()) {
    ssize_t n = ::write(fd, data.data() + off, data.size() - off);
    if (n < 0) {
      ::close(fd);
      throw std::runtime_error("cannot write " + file.string());
    }
    off += static_cast<std::size_t>(n);
  }
  ::fsync(fd);
  ::close(fd);
}

inline void write_atomic(const std::filesystem::path& file, std::string_view data) {
  auto tmp = file;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out << data;
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
  }
  std::filesystem::rename(tmp, file);
}

inline std::optional<std::string> read_file(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) return std::nullopt;
  return std::string(std::istreambuf_iterator<char>(in), {});
}

}  // namespace store_detail

// Keyed by session id. Without a directory everything stays in memory.
//   <dir>/<id>.session.json   lobby record (config and seats)
//   <dir>/<id>.journal.jsonl  replay-format journal, appended per move
//   <dir>/archive/<id>.jsonl  archived replay
class GameStore {
 public:
  GameStore() = default;
  explicit GameStore(std::filesystem::path dir) : dir_(std::move(dir)) {
    std::filesystem::create_directories(*dir_ / "archive");
  }

  const std::optional<std::filesystem::path>& dir() const { return dir_; }

  void put_record(const std::string& id, const Json& record) {
    std::lock_guard lock(*mu_);
    if (dir_)
      store_detail::write_atomic(*dir_ / (id + ".session.json"), record.dump(2) + "\n");
    else
      records_[id] = record;
  }

  void append_journal(const std::string& id, std::string_view lines) {
    std::lock_guard lock(*mu_);
    if (dir_)
      store_detail::append_durable(*dir_ / (id + ".journal.jsonl"), lines);
    else
      journals_[id] += lines;
  }

  std::optional<std::string> journal(const std::string& id) const {
    std::lock_guard lock(*mu_);
    if (dir_) return store_detail::read_file(*dir_ / (id + ".journal.jsonl"));
    auto it = journals_.find(id);
    return it == journals_.end() ? std::nullopt : std::optional<std::string>(it->second);
  }

  // Returns false when an archive for the id already existed; the first
  // archive is kept.
  bool archive(const std::string& id, std::string_view replay_text) {
    if (!valid_id(id)) throw std::invalid_argument("bad session id");
    std::lock_guard lock(*mu_);
    if (dir_) {
      auto file = *dir_ / "archive" / (id + ".jsonl");
      if (std::filesystem::exists(file)) return false;
      store_detail::write_atomic(file, replay_text);
      return true;
    }
    return archives_.emplace(id, std::string(replay_text)).second;
  }

  std::optional<std::string> fetch(const std::string& id) const {
    if (!valid_id(id)) return std::nullopt;
    std::lock_guard lock(*mu_);
    if (dir_) return store_detail::read_file(*dir_ / "archive" / (id + ".jsonl"));
    auto it = archives_.find(id);
    return it == archives_.end() ? std::nullopt : std::optional<std::string>(it->second);
  }

  std::vector<Json> records() const {
    std::lock_guard lock(*mu_);
    std::vector<Json> out;
    if (dir_) {
      std::vector<std::filesystem::path> files;
      for (const auto& e : std::filesystem::directory_iterator(*dir_)) {
        auto name = e.path().filename().string();
        if (name.size() > 13 && name.ends_with(".session.json")) files.push_back(e.path());
      }
      std::sort(files.begin(), files.end());
      for (const auto& f : files)
        if (auto text = store_detail::read_file(f)) out.push_back(Json::parse(*text));
    } else {
      for (const auto& [id, r] : records_) out.push_back(r);
    }
    return out;
  }

  static bool valid_id(const std::string& id) {
    return !id.empty() && id.size() <= 64 &&
           std::all_of(id.begin(), id.end(), [](char c) { return std::isxdigit(static_cast<unsigned char>(c)); });
  }

 private:
  std::optional<std::filesystem::path> dir_;
  std::unique_ptr<std::mutex> mu_ = std::make_unique<std::mutex>();
  std::map<std::string, Json> records_;
  std::map<std::string, std::string> journals_;
  std::map<std::string, std::string> archives_;
};

// ---------------------------------------------------------------------------
// Views

namespace view_detail {

inline Json digits(DigitSet d) {
  Json out = Json::array();
  for (Digit x : d.members()) out.push_back(x.value());
  return out;
}

inline Json ticket_json(const Ticket& t) {
  Json j;
  j["id"] = t.id;
  j["kind"] = t.kind == TicketKind::Architecture ? "architecture" : "feature";
  j["tasks_required"] = t.tasks_required;
  j["tasks_done"] = t.tasks_done;
  j["blocked"] = digits(t.blocked);
  j["td"] = digits(t.td);
  j["users"] = t.users;
  return j;
}

inline const char* trigger_name(std::optional<CardKind> k) {
  if (!k) return "none";
  return *k == CardKind::Event ? "event" : "action";
}

inline Json card_json(const Card& c) {
  Json tags = Json::array();
  for (AhaTag t : c.tags) tags.push_back(t.key());
  Json effect = Json::array();
  for (const auto& p : c.effect) effect.push_back(kEffectOpNames[static_cast<int>(p.op)]);
  return Json{{"id", c.id},
              {"kind", c.kind == CardKind::Event ? "event" : "action"},
              {"title", c.title},
              {"narrative", c.narrative},
              {"effect", effect},
              {"tags", tags},
              {"consumes_turn", c.consumes_turn},
              {"needs_choice", c.needs_choice()}};
}

inline Json team_json(const GameState& s, const TeamState& team) {
  Json modules = Json::array();
  for (ModuleId m : kModules) {
    const auto& col = team.column(m);
    Json slots = Json::array();
    for (const auto& sl : col.slots)
      slots.push_back(Json{{"kind", sl.kind == TicketKind::Architecture ? "architecture" : "feature"},
                           {"trigger", trigger_name(sl.trigger)}});
    Json placed = Json::array();
    for (const auto& t : col.placed) placed.push_back(ticket_json(t));
    Json mj;
    mj["id"] = std::string(1, letter(m));
    mj["slots"] = slots;
    mj["placed"] = placed;
    if (col.in_progress) {
      Json ip = ticket_json(*col.in_progress);
      ip["effective_blocked"] = digits(effective_blocked(team, m));
      mj["in_progress"] = ip;
    } else {
      mj["in_progress"] = nullptr;
    }
    mj["complete"] = col.complete();
    mj["can_start"] = can_start(team, m);
    modules.push_back(mj);
  }
  Json hand = Json::array();
  for (const auto& id : team.hand) hand.push_back(card_json(s.pack().card(id)));
  Json temp = Json::array();
  for (int d : Digit::all())
    if (team.temp_blocked[d] > 0) temp.push_back(Json{{"digit", d}, {"rounds", team.temp_blocked[d]}});
  Json names = Json::array();
  for (const auto& seat : s.config.teams[team.id]) names.push_back(seat.name);
  Json j;
  j["id"] = team.id;
  j["seats"] = names;
  j["users_banked"] = team.users_banked;
  j["unrepaid_td"] = team.unrepaid_td();
  j["score"] = score_of(s, team);
  j["skip_turns_pending"] = team.skip_turns_pending;
  j["double_next_users"] = team.double_next_users;
  j["temp_blocked"] = temp;
  j["features_left"] = static_cast<int>(team.feature_deck.size()) - team.next_feature;
  j["hand"] = hand;
  j["modules"] = modules;
  return j;
}

inline std::optional<DiceRoll> last_roll(const GameState& s) {
  for (auto it = s.log.rbegin(); it != s.log.rend(); ++it)
    if (it->kind == EventKind::DiceRolled && it->roll) return it->roll;
  return std::nullopt;
}

}  // namespace view_detail

// Seat-independent projection of the game state. Deck order is not shown,
// only deck sizes.
inline Json state_view(const GameState& s) {
  using namespace view_detail;
  Json j;
  j["round"] = s.round;
  j["max_rounds"] = s.config.max_rounds;
  j["td_penalty"] = s.config.td_penalty;
  j["active_team"] = s.active_team;
  j["phase"] = s.phase == Phase::Finished ? "finished" : "awaiting_move";
  if (s.end_reason) {
    j["end_reason"] = std::string(to_string(*s.end_reason));
    j["winner"] = winner(s);
  } else {
    j["end_reason"] = nullptr;
    j["winner"] = nullptr;
  }
  if (auto r = last_roll(s))
    j["last_roll"] = Json::array({r->first.value(), r->second.value()});
  else
    j["last_roll"] = nullptr;
  j["pack"] = Json{{"name", s.pack().name}, {"version", s.pack().version}};
  j["decks"] = Json{{"event", s.event_deck.size()},
                    {"event_discard", s.event_discard.size()},
                    {"action", s.action_deck.size()},
                    {"action_discard", s.action_discard.size()}};
  j["teams"] = Json::array({team_json(s, s.teams[0]), team_json(s, s.teams[1])});
  j["log_size"] = s.log.size();
  return j;
}

// Choices the seat must supply for each playable card that needs them.
inline Json card_prompts(const GameState& s, const std::vector<Move>& legal) {
  Json out = Json::array();
  const TeamState& team = s.active();
  for (const auto& m : legal) {
    const auto* p = std::get_if<PlayActionMove>(&m);
    if (!p) continue;
    const Card& c = s.pack().card(p->card_id);
    if (!c.needs_choice()) continue;
    Json needs = Json::array();
    for (const auto& prim : c.effect) {
      if (!prim.needs_choice()) continue;
      if (prim.op == EffectOp::AddTdChosenDigit)
        needs.push_back("module_and_digit");
      else
        needs.push_back("target");
    }
    Json modules = Json::array();
    for (ModuleId mod : kModules)
      if (team.column(mod).in_progress) modules.push_back(std::string(1, letter(mod)));
    Json targets = Json::array();
    for (const auto& t : td_tiles(team)) targets.push_back(to_json(t));
    out.push_back(Json{{"card", c.id}, {"title", c.title}, {"needs", needs}, {"modules", modules}, {"targets", targets}});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Service

enum class ServiceErrorCode { NotFound, BadToken, SessionFull, InvalidConfig, NotRunning, NotFinished, Malformed };

constexpr std::string_view to_string(ServiceErrorCode c) {
  switch (c) {
    case ServiceErrorCode::NotFound: return "not_found";
    case ServiceErrorCode::BadToken: return "bad_token";
    case ServiceErrorCode::SessionFull: return "session_full";
    case ServiceErrorCode::InvalidConfig: return "invalid_config";
    case ServiceErrorCode::NotRunning: return "not_running";
    case ServiceErrorCode::NotFinished: return "not_finished";
    case ServiceErrorCode::Malformed: return "malformed";
  }
  return "?";
}

class ServiceError : public std::runtime_error {
 public:
  ServiceError(ServiceErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ServiceErrorCode code() const { return code_; }

 private:
  ServiceErrorCode code_;
};

enum class SessionStatus { Lobby, Running, Finished };

constexpr std::string_view to_string(SessionStatus s) {
  switch (s) {
    case SessionStatus::Lobby: return "lobby";
    case SessionStatus::Running: return "running";
    case SessionStatus::Finished: return "finished";
  }
  return "?";
}

struct SeatRef {
  int team = 0;
  int index = 0;
  friend bool operator==(const SeatRef&, const SeatRef&) = default;
};

struct SeatToken {
  SeatRef seat;
  std::string name;
  std::string token;
};

struct CreatedSession {
  std::string id;
  std::vector<SeatToken> tokens;
};

struct Push {
  std::uint64_t seq = 0;
  Json events;
  Json state;
};

struct PushBatch {
  std::vector<Json> pushes;  // seat-specific messages in seq order
  bool finished = false;     // no further pushes will ever follow
  std::uint64_t latest = 0;
};

struct SubmitResult {
  std::optional<Rejection> rejection;
  Json view;
  bool accepted() const { return !rejection; }
};

struct SessionOptions {
  // Wall-clock limit, counted from the moment the last seat joins.
  std::optional<std::chrono::milliseconds> clock = std::chrono::minutes(60);
};

class GameService {
 public:
  using Clock = std::function<std::chrono::steady_clock::time_point()>;

  explicit GameService(GameStore store = {}, Clock clock = [] { return std::chrono::steady_clock::now(); })
      : store_(std::move(store)), clock_(std::move(clock)) {}

  GameStore& store() { return store_; }

  CreatedSession create_session(const SessionConfig& config, const SessionOptions& opts = {}) {
    try {
      validate_config(config);
    } catch (const ConfigError& e) {
      throw ServiceError(ServiceErrorCode::InvalidConfig, e.what());
    }
    auto rec = std::make_shared<Record>();
    rec->config = config;
    rec->state = new_session(config);
    rec->clock = opts.clock;
    CreatedSession out;
    {
      std::unique_lock lock(map_mu_);
      do rec->id = random_hex(8);
      while (sessions_.count(rec->id));
      for (int t = 0; t < 2; ++t)
        for (int i = 0; i < static_cast<int>(config.teams[t].size()); ++i) {
          std::string token;
          do token = random_hex(16);
          while (!issued_tokens_.insert(token).second);
          rec->seats.push_back({{t, i}, config.teams[t][i].name, token});
          rec->claimed.push_back(false);
        }
      sessions_[rec->id] = rec;
    }
    out.id = rec->id;
    out.tokens = rec->seats;
    std::lock_guard lock(rec->mu);
    persist_record(*rec);
    store_.append_journal(rec->id, header_to_json(make_replay(rec->state).header).dump() + "\n");
    return out;
  }

  // Binds the token's seat (idempotent for the same token) and returns it
  // with the current view.
  std::pair<SeatRef, Json> join(const std::string& id, const std::string& token) {
    auto rec = get(id);
    std::lock_guard lock(rec->mu);
    check_clock(*rec);
    int k = seat_of(*rec, token);
    if (k < 0) {
      bool full = std::all_of(rec->claimed.begin(), rec->claimed.end(), [](bool c) { return c; });
      throw ServiceError(full ? ServiceErrorCode::SessionFull : ServiceErrorCode::BadToken,
                         full ? "all seats are taken" : "unknown join token");
    }
    if (!rec->claimed[k]) {
      rec->claimed[k] = true;
      if (rec->status == SessionStatus::Lobby &&
          std::all_of(rec->claimed.begin(), rec->claimed.end(), [](bool c) { return c; })) {
        rec->status = SessionStatus::Running;
        if (rec->clock) rec->deadline = clock_() + *rec->clock;
      }
      persist_record(*rec);
    }
    return {rec->seats[k].seat, view_locked(*rec, rec->seats[k].seat)};
  }

  SubmitResult submit(const std::string& id, const std::string& token, const Move& move) {
    auto rec = get(id);
    std::lock_guard lock(rec->mu);
    check_clock(*rec);
    SeatRef seat = require_seat(*rec, token);
    if (rec->status == SessionStatus::Lobby) throw ServiceError(ServiceErrorCode::NotRunning, "waiting for players");
    SubmitResult out;
    if (rec->status == SessionStatus::Finished) {
      out.rejection = Rejection{RejectCode::GameOver, "the game is over"};
    } else if (seat.team != rec->state.active_team) {
      out.rejection = Rejection{RejectCode::NotYourSeat, "it is the other team's turn"};
    } else {
      std::size_t before = rec->state.log.size();
      GameState next = rec->state;
      out.rejection = submit_move(next, seat.team, move);
      if (!out.rejection) commit(*rec, std::move(next), before);
    }
    out.view = view_locked(*rec, seat);
    return out;
  }

  // Parses the wire move first; a parse failure is a malformed rejection.
  SubmitResult submit_json(const std::string& id, const std::string& token, const Json& move) {
    Move m;
    try {
      m = move_from_json(move);
    } catch (const std::exception& e) {
      auto rec = get(id);
      std::lock_guard lock(rec->mu);
      SeatRef seat = require_seat(*rec, token);
      return {Rejection{RejectCode::Malformed, std::string("cannot parse move: ") + e.what()}, view_locked(*rec, seat)};
    }
    return submit(id, token, m);
  }

  Json view(const std::string& id, const std::string& token) {
    auto rec = get(id);
    std::lock_guard lock(rec->mu);
    check_clock(*rec);
    return view_locked(*rec, require_seat(*rec, token));
  }

  SessionStatus status(const std::string& id) {
    auto rec = get(id);
    std::lock_guard lock(rec->mu);
    check_clock(*rec);
    return rec->status;
  }

  GameState state(const std::string& id) {
    auto rec = get(id);
    std::lock_guard lock(rec->mu);
    return rec->state;
  }

  // Pushes with seq > after. Waits up to `wait` for new ones when there
  // are none yet and the game is still going.
  PushBatch pushes_since(const std::string& id, const std::string& token, std::uint64_t after,
                         std::chrono::milliseconds wait = std::chrono::milliseconds(0)) {
    auto rec = get(id);
    std::unique_lock lock(rec->mu);
    SeatRef seat = require_seat(*rec, token);
    auto ready = [&] { return rec->pushes.size() > after || rec->status == SessionStatus::Finished; };
    if (!ready() && wait.count() > 0) rec->cv.wait_for(lock, wait, ready);
    PushBatch out;
    for (std::size_t i = after; i < rec->pushes.size(); ++i) out.pushes.push_back(push_message(*rec, rec->pushes[i], seat));
    out.latest = rec->pushes.size();
    out.finished = rec->status == SessionStatus::Finished && after + out.pushes.size() >= rec->pushes.size();
    return out;
  }

  // Stores the replay of a finished game. Repeated calls are no-ops.
  std::string archive(const std::string& id) {
    auto rec = get(id);
    std::lock_guard lock(rec->mu);
    check_clock(*rec);
    if (rec->status != SessionStatus::Finished) throw ServiceError(ServiceErrorCode::NotFinished, "game not finished");
    store_.archive(id, write_replay(make_replay(rec->state)));
    return id;
  }

  std::string fetch_replay(const std::string& id) const {
    auto text = store_.fetch(id);
    if (!text) throw ServiceError(ServiceErrorCode::NotFound, "no archived game " + id);
    return *text;
  }

  // Ends every running session whose wall clock ran out.
  void tick() {
    std::vector<std::shared_ptr<Record>> all;
    {
      std::shared_lock lock(map_mu_);
      for (auto& [id, r] : sessions_) all.push_back(r);
    }
    for (auto& r : all) {
      std::lock_guard lock(r->mu);
      check_clock(*r);
    }
  }

  // Rebuilds sessions from the store's lobby records and journals.
  std::size_t recover(const PackRegistry& packs) {
    std::size_t n = 0;
    for (const Json& j : store_.records()) {
      auto rec = std::make_shared<Record>();
      rec->id = j.at("id").get<std::string>();
      ReplayHeader h = header_from_json(j.at("header"));
      rec->config = config_from_header(h, packs.resolver());
      rec->state = new_session(rec->config);
      if (j.contains("clock_ms") && !j.at("clock_ms").is_null())
        rec->clock = std::chrono::milliseconds(j.at("clock_ms").get<long long>());
      for (const Json& s : j.at("seats")) {
        rec->seats.push_back({{s.at("team").get<int>(), s.at("index").get<int>()}, s.at("name").get<std::string>(),
                              s.at("token").get<std::string>()});
        rec->claimed.push_back(s.at("claimed").get<bool>());
      }
      rec->status = SessionStatus::Lobby;
      if (std::all_of(rec->claimed.begin(), rec->claimed.end(), [](bool c) { return c; })) {
        rec->status = SessionStatus::Running;
        if (rec->clock) rec->deadline = clock_() + *rec->clock;
      }
      if (auto text = store_.journal(rec->id)) {
        ReplayFile f = read_replay(*text);
        std::size_t k = 0;
        while (k < f.events.size()) {
          const GameEvent& e = f.events[k];
          std::size_t before = rec->state.log.size();
          GameState next = rec->state;
          if (e.kind == EventKind::MoveAccepted && e.move) {
            if (auto r = submit_move(next, e.team, *e.move)) throw ReplayError(k, "journal move rejected: " + r->message);
          } else if (e.kind == EventKind::ClockExpired) {
            expire_clock(next);
          } else {
            throw ReplayError(k, "journal out of step");
          }
          k += next.log.size() - before;
          add_push(*rec, next, before);
          rec->state = std::move(next);
        }
        if (rec->state.log != f.events) throw ReplayError(std::nullopt, "journal does not reproduce");
        if (rec->state.phase == Phase::Finished) rec->status = SessionStatus::Finished;
      }
      std::unique_lock lock(map_mu_);
      for (const auto& s : rec->seats) issued_tokens_.insert(s.token);
      sessions_[rec->id] = rec;
      ++n;
    }
    return n;
  }

  std::vector<std::string> session_ids() const {
    std::shared_lock lock(map_mu_);
    std::vector<std::string> out;
    for (const auto& [id, r] : sessions_) out.push_back(id);
    return out;
  }

 private:
  struct Record {
    std::mutex mu;
    std::condition_variable cv;
    std::string id;
    SessionConfig config;
    GameState state;
    SessionStatus status = SessionStatus::Lobby;
    std::vector<SeatToken> seats;
    std::vector<bool> claimed;
    std::vector<Push> pushes;
    std::optional<std::chrono::milliseconds> clock;
    std::optional<std::chrono::steady_clock::time_point> deadline;
  };

  static std::string random_hex(int bytes) {
    thread_local std::random_device rd;
    static constexpr char kHex[] = "0123456789abcdef";
    std::string out;
    for (int i = 0; i < bytes; i += 4) {
      std::uint32_t v = rd();
      for (int b = 0; b < 4 && i + b < bytes; ++b) {
        out += kHex[(v >> 4) & 0xf];
        out += kHex[v & 0xf];
        v >>= 8;
      }
    }
    return out;
  }

  std::shared_ptr<Record> get(const std::string& id) const {
    std::shared_lock lock(map_mu_);
    auto it = sessions_.find(id);
    if (it == sessions_.end()) throw ServiceError(ServiceErrorCode::NotFound, "no session " + id);
    return it->second;
  }

  static int seat_of(const Record& r, const std::string& token) {
    for (std::size_t k = 0; k < r.seats.size(); ++k)
      if (r.seats[k].token == token) return static_cast<int>(k);
    return -1;
  }

  static SeatRef require_seat(const Record& r, const std::string& token) {
    int k = seat_of(r, token);
    if (k < 0 || !r.claimed[k]) throw ServiceError(ServiceErrorCode::BadToken, "token has not joined this session");
    return r.seats[k].seat;
  }

  void persist_record(const Record& r) {
    Json seats = Json::array();
    for (std::size_t k = 0; k < r.seats.size(); ++k)
      seats.push_back(Json{{"team", r.seats[k].seat.team},
                           {"index", r.seats[k].seat.index},
                           {"name", r.seats[k].name},
                           {"token", r.seats[k].token},
                           {"claimed", static_cast<bool>(r.claimed[k])}});
    Json j;
    j["id"] = r.id;
    j["header"] = header_to_json(make_replay(r.state).header);
    j["clock_ms"] = r.clock ? Json(r.clock->count()) : Json(nullptr);
    j["seats"] = seats;
    store_.put_record(r.id, j);
  }

  static void add_push(Record& r, const GameState& next, std::size_t before) {
    Json events = Json::array();
    for (std::size_t i = before; i < next.log.size(); ++i) events.push_back(to_json(next.log[i]));
    r.pushes.push_back({r.pushes.size() + 1, std::move(events), state_view(next)});
  }

  // Journal first, then publish.
  void commit(Record& r, GameState next, std::size_t before) {
    std::string lines;
    for (std::size_t i = before; i < next.log.size(); ++i) lines += event_line(next.log[i]);
    store_.append_journal(r.id, lines);
    add_push(r, next, before);
    r.state = std::move(next);
    if (r.state.phase == Phase::Finished) r.status = SessionStatus::Finished;
    r.cv.notify_all();
  }

  void check_clock(Record& r) {
    if (r.status != SessionStatus::Running || !r.deadline || clock_() < *r.deadline) return;
    std::size_t before = r.state.log.size();
    GameState next = r.state;
    expire_clock(next);
    commit(r, std::move(next), before);
  }

  Json seat_part(const Record& r, SeatRef seat) const {
    const GameState& s = r.state;
    Json j;
    j["seat"] = Json{{"team", seat.team}, {"index", seat.index}, {"name", r.config.teams[seat.team][seat.index].name}};
    bool active = r.status == SessionStatus::Running && s.phase == Phase::AwaitingMove && s.active_team == seat.team;
    j["your_turn"] = active;
    Json moves = Json::array();
    Json prompts = Json::array();
    if (active) {
      auto legal = legal_moves(s);
      for (const auto& m : legal) moves.push_back(to_json(m));
      prompts = card_prompts(s, legal);
    }
    j["legal_moves"] = moves;
    j["prompts"] = prompts;
    return j;
  }

  Json view_locked(const Record& r, SeatRef seat) const {
    Json j;
    j["schema"] = "techdebt-view";
    j["version"] = kWireVersion;
    j["session"] = r.id;
    j["status"] = std::string(to_string(r.status));
    j["seq"] = r.pushes.size();
    Json sp = seat_part(r, seat);
    for (auto& [k, v] : sp.items()) j[k] = v;
    j["state"] = state_view(r.state);
    return j;
  }

  // Pushes are historical: affordances are only attached to the latest.
  Json push_message(const Record& r, const Push& p, SeatRef seat) const {
    Json j;
    j["schema"] = "techdebt-push";
    j["version"] = kWireVersion;
    j["session"] = r.id;
    j["seq"] = p.seq;
    j["events"] = p.events;
    if (p.seq == r.pushes.size()) {
      Json v = view_locked(r, seat);
      j["view"] = v;
    } else {
      j["view"] = Json{{"schema", "techdebt-view"}, {"version", kWireVersion}, {"session", r.id}, {"seq", p.seq},
                       {"state", p.state}};
    }
    return j;
  }

  GameStore store_;
  Clock clock_;
  mutable std::shared_mutex map_mu_;
  std::unordered_map<std::string, std::shared_ptr<Record>> sessions_;
  std::unordered_set<std::string> issued_tokens_;
};

}  // namespace techdebt
