#pragma once

#include <techdebt/techdebt.hpp>

namespace techdebt::testing {

inline SessionConfig default_config(std::uint64_t seed = 1) { return make_config(default_pack(), seed); }

inline Ticket make_ticket(std::string id, TicketKind kind, int tasks, DigitSet blocked, int users = 0) {
  Ticket t;
  t.id = std::move(id);
  t.kind = kind;
  t.tasks_required = tasks;
  t.blocked = blocked;
  t.users = users;
  return t;
}

inline DiceRoll roll(int a, int b) { return {Digit(a), Digit(b)}; }

// Fresh default game with the active team's module A holding an
// in-progress ticket of the given shape and nothing else on the board.
inline GameState with_ticket(DigitSet blocked, int tasks = 8, TicketKind kind = TicketKind::Feature) {
  GameState s = new_session(default_config());
  s.active().column(ModuleId::A).in_progress = make_ticket("T", kind, tasks, blocked, 3);
  return s;
}

// Places a finished ticket with the given td tiles in the module.
inline Ticket& place(GameState& s, int team, ModuleId m, TicketKind kind, DigitSet td, int users = 0) {
  auto& col = s.teams[team].column(m);
  Ticket t = make_ticket("P" + std::to_string(col.placed.size()), kind, 1, {}, users);
  t.tasks_done = 1;
  t.td = td;
  t.placed_order = s.teams[team].placed_count++;
  col.placed.push_back(t);
  return col.placed.back();
}

inline int count(const GameState& s, EventKind k) {
  int n = 0;
  for (const auto& e : s.log) n += e.kind == k;
  return n;
}

inline const GameEvent* last(const GameState& s, EventKind k) {
  for (auto it = s.log.rbegin(); it != s.log.rend(); ++it)
    if (it->kind == k) return &*it;
  return nullptr;
}

// Plays `n` uniformly random moves (or until the game ends).
inline int play_random(GameState& s, Rng& rng, int n) {
  Policy p = random_policy();
  int played = 0;
  while (played < n && s.phase == Phase::AwaitingMove) {
    auto legal = legal_moves(s);
    Move m = p.decide(s, legal, rng);
    if (submit_move(s, s.active_team, m)) throw std::logic_error("random policy chose a rejected move");
    ++played;
  }
  return played;
}

}  // namespace techdebt::testing
