#pragma once

#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "techdebt/content.hpp"
#include "techdebt/default_pack.hpp"
#include "techdebt/rules.hpp"
#include "techdebt/serialize.hpp"

namespace techdebt {

using SessionConfig = GameConfig;

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class RejectCode {
  NotYourTurn,
  IllegalMove,
  IllegalIncur,
  BindingRequired,
  InvalidBinding,
  GameOver,
  NotYourSeat,
  Malformed,
};

constexpr std::string_view to_string(RejectCode c) {
  switch (c) {
    case RejectCode::NotYourTurn: return "not_your_turn";
    case RejectCode::IllegalMove: return "illegal_move";
    case RejectCode::IllegalIncur: return "illegal_incur";
    case RejectCode::BindingRequired: return "binding_required";
    case RejectCode::InvalidBinding: return "invalid_binding";
    case RejectCode::GameOver: return "game_over";
    case RejectCode::NotYourSeat: return "not_your_seats_team";
    case RejectCode::Malformed: return "malformed";
  }
  return "?";
}

struct Rejection {
  RejectCode code;
  std::string message;
};

// Two teams of two seats, the usual table setup.
inline std::vector<std::vector<Seat>> default_rosters() {
  return {{{"Team 1, seat 1", false}, {"Team 1, seat 2", false}}, {{"Team 2, seat 1", false}, {"Team 2, seat 2", false}}};
}

inline SessionConfig make_config(std::shared_ptr<const ContentPack> pack, std::uint64_t seed) {
  SessionConfig c;
  c.max_rounds = pack->max_rounds;
  c.td_penalty = pack->td_penalty;
  c.pack = std::move(pack);
  c.seed = seed;
  c.teams = default_rosters();
  return c;
}

inline void validate_config(const SessionConfig& c) {
  if (!c.pack) throw ConfigError("no content pack");
  if (auto errs = validate_pack(*c.pack); !errs.empty()) throw ConfigError("invalid pack: " + to_string(errs.front()));
  if (c.teams.size() != 2) throw ConfigError("exactly two teams");
  for (const auto& roster : c.teams)
    if (roster.empty() || roster.size() > 4) throw ConfigError("each team needs 1..4 seats");
  if (c.max_rounds < 1) throw ConfigError("max_rounds must be positive");
  if (c.td_penalty < 0) throw ConfigError("td_penalty must be non-negative");
}

// Fresh game: decks shuffled from the seed, round 0, first team to move.
// Both teams receive the same feature ticket order.
inline GameState new_session(const SessionConfig& config) {
  validate_config(config);
  GameState s;
  s.config = config;
  s.rng = Rng(config.seed);
  const ContentPack& p = *config.pack;
  for (const auto& c : p.event_cards) s.event_deck.push_back(c.id);
  for (const auto& c : p.action_cards) s.action_deck.push_back(c.id);
  s.rng.shuffle(s.event_deck);
  s.rng.shuffle(s.action_deck);
  std::vector<int> features;
  for (std::size_t i = 0; i < p.tickets.size(); ++i)
    if (p.tickets[i].ticket.kind == TicketKind::Feature) features.push_back(static_cast<int>(i));
  s.rng.shuffle(features);
  for (int t = 0; t < 2; ++t) {
    TeamState& team = s.teams[t];
    team.id = t;
    for (ModuleId m : kModules) {
      team.column(m).id = m;
      team.column(m).slots = p.board[index_of(m)];
    }
    team.feature_deck = features;
  }
  return s;
}

namespace session_detail {

inline Rejection reject_from(const RuleError& e) {
  switch (e.code()) {
    case RuleErrorCode::GameOver: return {RejectCode::GameOver, e.what()};
    case RuleErrorCode::IllegalIncur: return {RejectCode::IllegalIncur, e.what()};
    case RuleErrorCode::BindingRequired: return {RejectCode::BindingRequired, e.what()};
    case RuleErrorCode::InvalidBinding: return {RejectCode::InvalidBinding, e.what()};
    default: return {RejectCode::IllegalMove, e.what()};
  }
}

inline void rotate(GameState& s) {
  if (s.active_team == 1) {
    ++s.round;
    for (auto& team : s.teams)
      for (int d : Digit::all())
        if (team.temp_blocked[d] > 0) --team.temp_blocked[d];
  }
  s.active_team = 1 - s.active_team;
}

inline bool settle_end(GameState& s) {
  if (s.phase == Phase::Finished) return true;
  auto st = is_game_over(s);
  if (st.over) end_game(s, *st.reason);
  return st.over;
}

inline void finish_turn(GameState& s, bool consumes_turn) {
  if (settle_end(s) || !consumes_turn) return;
  rotate(s);
  if (settle_end(s)) return;
  while (s.active().skip_turns_pending > 0) {
    --s.active().skip_turns_pending;
    detail::emit(s, s.active_team, EventKind::TurnSkipped);
    rotate(s);
    if (settle_end(s)) return;
  }
}

}  // namespace session_detail

// Validation without mutation: nullopt when `team` may make `move` now.
inline std::optional<Rejection> check_move(const GameState& s, int team, const Move& move) {
  if (s.phase == Phase::Finished) return Rejection{RejectCode::GameOver, "game over"};
  if (team != s.active_team) return Rejection{RejectCode::NotYourTurn, "not your turn"};
  const TeamState& t = s.active();
  try {
    if (auto* w = std::get_if<WorkMove>(&move)) {
      check_incur(t, *w);
    } else if (auto* r = std::get_if<RepayMove>(&move)) {
      const Ticket* tk = find_ticket(t, r->target.module, r->target.ticket);
      if (!tk || !tk->td.contains(r->target.digit)) return Rejection{RejectCode::IllegalMove, "nothing to repay"};
    } else if (auto* p = std::get_if<PlayActionMove>(&move)) {
      if (std::find(t.hand.begin(), t.hand.end(), p->card_id) == t.hand.end())
        return Rejection{RejectCode::IllegalMove, "card '" + p->card_id + "' not in hand"};
      GameState trial = s;
      play_action(trial, *p);
    } else if (auto* st = std::get_if<StartTicketMove>(&move)) {
      if (!can_start(t, st->module))
        return Rejection{RejectCode::IllegalMove, std::string("cannot start a ticket in module ") + letter(st->module)};
    }
  } catch (const RuleError& e) {
    return session_detail::reject_from(e);
  }
  return std::nullopt;
}

// Accepts and applies the move, or rejects it leaving `s` untouched.
inline std::optional<Rejection> submit_move(GameState& s, int team, const Move& move) {
  if (auto r = check_move(s, team, move)) return r;
  detail::emit(s, team, EventKind::MoveAccepted).move = move;
  bool consumes = true;
  std::visit(
      [&](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, WorkMove>) {
          apply_work(s, m, next_roll(s));
        } else if constexpr (std::is_same_v<T, RepayMove>) {
          apply_repay(s, m, next_roll(s));
        } else if constexpr (std::is_same_v<T, PlayActionMove>) {
          consumes = s.pack().card(m.card_id).consumes_turn;
          play_action(s, m);
        } else {
          start_ticket(s, m.module);
        }
      },
      move);
  session_detail::finish_turn(s, consumes);
  return std::nullopt;
}

// Wall-clock expiry: ends the game under the round-limit rule at the
// current round.
inline void expire_clock(GameState& s) {
  if (s.phase == Phase::Finished) return;
  detail::emit(s, s.active_team, EventKind::ClockExpired).amount = s.round;
  end_game(s, EndReason::RoundLimit);
}

inline AhaCounts aha_exposure(const GameState& s) {
  AhaCounts counts{};
  for (const auto& e : s.log)
    for (AhaTag t : e.tags) ++counts[t.row()];
  return counts;
}

inline AhaCounts aha_exposure(const GameState& s, int team) {
  AhaCounts counts{};
  for (const auto& e : s.log)
    if (e.team == team)
      for (AhaTag t : e.tags) ++counts[t.row()];
  return counts;
}

// ---------------------------------------------------------------------------
// Replay files

inline constexpr int kReplayVersion = 1;

struct ReplayHeader {
  std::string pack_name;
  std::string pack_version;
  std::uint64_t seed = 0;
  int max_rounds = 0;
  int td_penalty = 0;
  std::vector<std::vector<Seat>> teams;
  friend bool operator==(const ReplayHeader&, const ReplayHeader&) = default;
};

struct ReplayFile {
  ReplayHeader header;
  std::vector<GameEvent> events;
  friend bool operator==(const ReplayFile&, const ReplayFile&) = default;
};

class ReplayError : public std::runtime_error {
 public:
  ReplayError(std::optional<std::size_t> index, const std::string& what)
      : std::runtime_error(what), index_(index) {}
  // Index of the first event that could not be reproduced, if any.
  std::optional<std::size_t> index() const { return index_; }

 private:
  std::optional<std::size_t> index_;
};

inline ReplayFile make_replay(const GameState& s) {
  ReplayFile f;
  f.header = {s.pack().name, s.pack().version, s.config.seed, s.config.max_rounds, s.config.td_penalty, s.config.teams};
  f.events = s.log;
  return f;
}

inline Json header_to_json(const ReplayHeader& h) {
  Json teams = Json::array();
  for (const auto& roster : h.teams) {
    Json r = Json::array();
    for (const auto& seat : roster) r.push_back(Json{{"name", seat.name}, {"bot", seat.bot}});
    teams.push_back(r);
  }
  Json j;
  j["format"] = "techdebt-replay";
  j["version"] = kReplayVersion;
  j["pack"] = Json{{"name", h.pack_name}, {"version", h.pack_version}};
  j["seed"] = h.seed;
  j["max_rounds"] = h.max_rounds;
  j["td_penalty"] = h.td_penalty;
  j["teams"] = teams;
  return j;
}

inline std::string event_line(const GameEvent& e) { return to_json(e).dump() + "\n"; }

// Line-delimited: one header object, then one object per event.
inline std::string write_replay(const ReplayFile& f) {
  std::string out = header_to_json(f.header).dump() + "\n";
  for (const auto& e : f.events) out += event_line(e);
  return out;
}

inline ReplayHeader header_from_json(const Json& j) {
  try {
    if (j.at("format") != "techdebt-replay") throw ReplayError(std::nullopt, "not a replay file");
    if (j.at("version") != kReplayVersion) throw ReplayError(std::nullopt, "unsupported replay version");
    ReplayHeader h;
    h.pack_name = j.at("pack").at("name").get<std::string>();
    h.pack_version = j.at("pack").at("version").get<std::string>();
    h.seed = j.at("seed").get<std::uint64_t>();
    h.max_rounds = j.at("max_rounds").get<int>();
    h.td_penalty = j.at("td_penalty").get<int>();
    for (const auto& roster : j.at("teams")) {
      std::vector<Seat> seats;
      for (const auto& s : roster) seats.push_back({s.at("name").get<std::string>(), s.at("bot").get<bool>()});
      h.teams.push_back(std::move(seats));
    }
    return h;
  } catch (const nlohmann::json::exception& e) {
    throw ReplayError(std::nullopt, std::string("bad replay header: ") + e.what());
  }
}

inline ReplayFile read_replay(std::string_view text) {
  ReplayFile f;
  std::istringstream in{std::string(text)};
  std::string line;
  bool header = true;
  std::size_t index = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    try {
      Json j = Json::parse(line);
      if (header) {
        f.header = header_from_json(j);
        header = false;
      } else {
        f.events.push_back(event_from_json(j));
        ++index;
      }
    } catch (const nlohmann::json::exception& e) {
      throw ReplayError(header ? std::nullopt : std::optional<std::size_t>(index),
                        std::string("unreadable replay record: ") + e.what());
    } catch (const std::invalid_argument& e) {
      throw ReplayError(header ? std::nullopt : std::optional<std::size_t>(index),
                        std::string("unreadable replay record: ") + e.what());
    }
  }
  if (header) throw ReplayError(std::nullopt, "empty replay file");
  return f;
}

using PackResolver = std::function<std::shared_ptr<const ContentPack>(const std::string& name, const std::string& version)>;

inline PackResolver default_resolver() {
  return [](const std::string& name, const std::string& version) -> std::shared_ptr<const ContentPack> {
    auto p = default_pack();
    return p->name == name && p->version == version ? p : nullptr;
  };
}

inline SessionConfig config_from_header(const ReplayHeader& h, const PackResolver& resolve) {
  auto pack = resolve(h.pack_name, h.pack_version);
  if (!pack) throw ReplayError(std::nullopt, "pack " + h.pack_name + " " + h.pack_version + " is not available");
  SessionConfig c;
  c.pack = std::move(pack);
  c.seed = h.seed;
  c.max_rounds = h.max_rounds;
  c.td_penalty = h.td_penalty;
  c.teams = h.teams;
  return c;
}

// Re-runs the recorded inputs and checks that every recorded event is
// reproduced bit for bit.
inline GameState replay(const ReplayFile& f, const PackResolver& resolve = default_resolver()) {
  GameState s = new_session(config_from_header(f.header, resolve));
  auto diverged = [](std::size_t k, const std::string& why) {
    return ReplayError(k, "replay diverged at event " + std::to_string(k) + ": " + why);
  };
  std::size_t k = 0;
  while (k < f.events.size()) {
    const GameEvent& input = f.events[k];
    if (input.kind == EventKind::MoveAccepted && input.move) {
      if (auto r = submit_move(s, input.team, *input.move)) throw diverged(k, "move rejected (" + r->message + ")");
    } else if (input.kind == EventKind::ClockExpired) {
      expire_clock(s);
    } else {
      throw diverged(k, "expected a recorded input");
    }
    for (std::size_t j = k; j < s.log.size(); ++j) {
      if (j >= f.events.size()) throw diverged(j, "recording ends early");
      if (to_json(s.log[j]).dump() != to_json(f.events[j]).dump()) throw diverged(j, "event differs");
    }
    k = s.log.size();
  }
  return s;
}

}  // namespace techdebt
