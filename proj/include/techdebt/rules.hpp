#pragma once

#include <algorithm>
#include <array>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "techdebt/types.hpp"

namespace techdebt {

enum class RuleErrorCode {
  GameOver,
  NothingToWorkOn,
  IllegalIncur,
  NothingToRepay,
  IncompleteTicket,
  BindingRequired,
  InvalidBinding,
  NotFinished,
  IllegalMove,
  UnknownCard,
};

constexpr std::string_view to_string(RuleErrorCode c) {
  switch (c) {
    case RuleErrorCode::GameOver: return "game_over";
    case RuleErrorCode::NothingToWorkOn: return "nothing_to_work_on";
    case RuleErrorCode::IllegalIncur: return "illegal_incur";
    case RuleErrorCode::NothingToRepay: return "nothing_to_repay";
    case RuleErrorCode::IncompleteTicket: return "incomplete_ticket";
    case RuleErrorCode::BindingRequired: return "binding_required";
    case RuleErrorCode::InvalidBinding: return "invalid_binding";
    case RuleErrorCode::NotFinished: return "not_finished";
    case RuleErrorCode::IllegalMove: return "illegal_move";
    case RuleErrorCode::UnknownCard: return "unknown_card";
  }
  return "?";
}

class RuleError : public std::logic_error {
 public:
  RuleError(RuleErrorCode code, const std::string& what) : std::logic_error(what), code_(code) {}
  RuleErrorCode code() const { return code_; }

 private:
  RuleErrorCode code_;
};

// ---------------------------------------------------------------------------
// Queries

// Digits that cannot progress `ticket` when it is worked on in `module`:
// the ticket's printed blocks, every TD tile on the tickets already placed in
// that module, and the team's temporary blocks. Other modules never matter.
inline DigitSet effective_blocked(const TeamState& team, ModuleId module, const Ticket& ticket) {
  return ticket.blocked | team.column(module).predecessor_td() | team.temp_blocked_set();
}

inline DigitSet effective_blocked(const TeamState& team, ModuleId module) {
  const auto& col = team.column(module);
  if (!col.in_progress)
    throw RuleError(RuleErrorCode::NothingToWorkOn, std::string("no ticket in progress in module ") + letter(module));
  return effective_blocked(team, module, *col.in_progress);
}

inline ModuleId module_at(int index) {
  if (index < 0 || index > 2) throw std::out_of_range("unknown module index " + std::to_string(index));
  return static_cast<ModuleId>(index);
}

inline Ticket* find_ticket(TeamState& team, ModuleId module, int index) {
  auto& col = team.column(module);
  if (index >= 0 && index < static_cast<int>(col.placed.size())) return &col.placed[index];
  if (index == static_cast<int>(col.placed.size()) && col.in_progress) return &*col.in_progress;
  return nullptr;
}
inline const Ticket* find_ticket(const TeamState& team, ModuleId module, int index) {
  return find_ticket(const_cast<TeamState&>(team), module, index);
}

// Every TD tile on the team's board, in board order.
inline std::vector<RepaymentTarget> td_tiles(const TeamState& team) {
  std::vector<RepaymentTarget> out;
  for (ModuleId m : kModules) {
    const auto& col = team.column(m);
    int n = static_cast<int>(col.placed.size());
    for (int i = 0; i <= n; ++i) {
      const Ticket* t = find_ticket(team, m, i);
      if (!t) continue;
      for (Digit d : t->td.members()) out.push_back({m, i, d});
    }
  }
  return out;
}

inline bool can_start(const TeamState& team, ModuleId m) {
  const auto& col = team.column(m);
  if (!col.has_open_slot()) return false;
  if (col.slots[col.placed.size()].kind == TicketKind::Feature) return team.next_feature < team.feature_deck.size();
  return true;
}

struct GameOverStatus {
  bool over = false;
  std::optional<EndReason> reason;
};

inline GameOverStatus is_game_over(const GameState& s) {
  if (s.phase == Phase::Finished) return {true, s.end_reason};
  for (const auto& t : s.teams)
    if (t.all_modules_complete()) return {true, EndReason::ModulesComplete};
  if (s.round >= s.config.max_rounds) return {true, EndReason::RoundLimit};
  return {};
}

// Canonical move list for the active team: one Work per in-progress ticket
// (with an empty incur list; any subset of the effective blocked set may be
// declared), one Repay per TD tile, one PlayAction per card in hand (without
// bindings), one StartTicket per module with a startable slot.
inline std::vector<Move> legal_moves(const GameState& s) {
  if (s.phase == Phase::Finished) throw RuleError(RuleErrorCode::GameOver, "game over");
  std::vector<Move> out;
  const TeamState& team = s.active();
  if (is_game_over(s).over) return out;
  for (ModuleId m : kModules)
    if (team.column(m).in_progress) out.push_back(WorkMove{m, {}});
  for (const auto& t : td_tiles(team)) out.push_back(RepayMove{t});
  for (const auto& id : team.hand) out.push_back(PlayActionMove{id, {}});
  for (ModuleId m : kModules)
    if (can_start(team, m)) out.push_back(StartTicketMove{m});
  return out;
}

// True when `candidate` is an instance of one of the canonical entries.
inline bool conforms(const Move& candidate, std::span<const Move> legal) {
  return std::any_of(legal.begin(), legal.end(), [&](const Move& m) {
    if (m.index() != candidate.index()) return false;
    if (auto* w = std::get_if<WorkMove>(&m)) return w->module == std::get<WorkMove>(candidate).module;
    if (auto* p = std::get_if<PlayActionMove>(&m)) return p->card_id == std::get<PlayActionMove>(candidate).card_id;
    return m == candidate;
  });
}

inline int score_of(const GameState& s, const TeamState& team) {
  return team.users_banked - s.config.td_penalty * team.unrepaid_td();
}

inline std::array<int, 2> final_score(const GameState& s) {
  if (s.phase != Phase::Finished) throw RuleError(RuleErrorCode::NotFinished, "game is not finished");
  return {score_of(s, s.teams[0]), score_of(s, s.teams[1])};
}

// -1 on a draw.
inline int winner(const GameState& s) {
  auto sc = final_score(s);
  if (sc[0] == sc[1]) return -1;
  return sc[0] > sc[1] ? 0 : 1;
}

// ---------------------------------------------------------------------------
// Mutations. Each one appends its outcome to the log.

namespace detail {

inline GameEvent& emit(GameState& s, int team, EventKind kind, std::vector<AhaTag> tags = {}) {
  GameEvent e;
  e.seq = static_cast<std::uint32_t>(s.log.size());
  e.round = s.round;
  e.team = team;
  e.kind = kind;
  e.tags = std::move(tags);
  s.log.push_back(std::move(e));
  return s.log.back();
}

inline GameEvent& emit_at(GameState& s, int team, EventKind kind, ModuleId m, int ticket, std::vector<AhaTag> tags = {}) {
  GameEvent& e = emit(s, team, kind, std::move(tags));
  e.module = m;
  e.ticket = ticket;
  return e;
}

inline int ticket_index(const ModuleColumn& col, const Ticket& t) {
  if (col.in_progress && &*col.in_progress == &t) return static_cast<int>(col.placed.size());
  return static_cast<int>(&t - col.placed.data());
}

// Tags for a TD tile placed on `ticket` in `col`.
inline std::vector<AhaTag> incurrence_tags(const ModuleColumn& col, const Ticket& ticket, std::optional<bool> conscious) {
  std::vector<AhaTag> tags;
  if (conscious) tags.push_back(*conscious ? aha::kConscious : aha::kUnconscious);
  if (ticket.kind == TicketKind::Architecture) tags.push_back(aha::kArchCritical);
  if (conscious && !col.predecessor_td().empty()) tags.push_back(aha::kInnerCycle);
  return tags;
}

}  // namespace detail

inline DiceRoll next_roll(GameState& s) {
  if (!s.forced_rolls.empty()) {
    DiceRoll r = s.forced_rolls.front();
    s.forced_rolls.pop_front();
    return r;
  }
  return s.rng.roll();
}

void complete_ticket(GameState& s, int team, ModuleId module);
void apply_effect(GameState& s, std::span<const EffectPrimitive> effect, int team, const Bindings& bindings,
                  std::string_view card_id = {});

inline void draw_card(GameState& s, int team, CardKind kind) {
  auto& deck = kind == CardKind::Event ? s.event_deck : s.action_deck;
  auto& discard = kind == CardKind::Event ? s.event_discard : s.action_discard;
  if (deck.empty()) {
    if (discard.empty()) {
      detail::emit(s, team, EventKind::Warning).detail = std::string("no ") + std::string(to_string(kind)) + " cards left";
      return;
    }
    deck = std::move(discard);
    discard.clear();
    s.rng.shuffle(deck);
    GameEvent& e = detail::emit(s, team, EventKind::DeckReshuffled);
    e.detail = std::string(to_string(kind));
    e.amount = static_cast<int>(deck.size());
  }
  std::string id = std::move(deck.back());
  deck.pop_back();
  const Card& card = s.pack().card(id);
  GameEvent& drawn = detail::emit(s, team, EventKind::CardDrawn, card.tags);
  drawn.card = id;
  drawn.detail = std::string(to_string(kind));
  if (kind == CardKind::Event) {
    apply_effect(s, card.effect, team, {}, id);
    discard.push_back(std::move(id));
  } else {
    s.teams[team].hand.push_back(std::move(id));
  }
}

inline void complete_tasks(GameState& s, int team, ModuleId module, int count) {
  auto& col = s.teams[team].column(module);
  if (!col.in_progress) return;
  Ticket& t = *col.in_progress;
  int done = std::min(count, t.remaining());
  if (done <= 0) return;
  t.tasks_done += done;
  GameEvent& e = detail::emit_at(s, team, EventKind::TaskCompleted, module, static_cast<int>(col.placed.size()));
  e.amount = done;
  if (t.complete()) complete_ticket(s, team, module);
}

inline void complete_ticket(GameState& s, int team_id, ModuleId module) {
  TeamState& team = s.teams[team_id];
  auto& col = team.column(module);
  if (!col.in_progress || !col.in_progress->complete())
    throw RuleError(RuleErrorCode::IncompleteTicket, "ticket is not complete");
  Ticket t = std::move(*col.in_progress);
  col.in_progress.reset();
  t.placed_order = team.placed_count++;
  int users = t.kind == TicketKind::Feature ? t.users : 0;
  int bonus = 0;
  if (t.kind == TicketKind::Feature && team.double_next_users) {
    bonus = users;
    team.double_next_users = false;
  }
  team.users_banked += users + bonus;
  std::optional<CardKind> trigger = t.card_trigger;
  GameEvent& e = detail::emit_at(s, team_id, EventKind::TicketCompleted, module, static_cast<int>(col.placed.size()));
  e.amount = users;
  e.extra = bonus;
  e.detail = t.id;
  col.placed.push_back(std::move(t));
  if (trigger) draw_card(s, team_id, *trigger);
}

inline void start_ticket(GameState& s, ModuleId module) {
  TeamState& team = s.active();
  if (!can_start(team, module))
    throw RuleError(RuleErrorCode::IllegalMove, std::string("cannot start a ticket in module ") + letter(module));
  auto& col = team.column(module);
  const SlotDef& slot = col.slots[col.placed.size()];
  const auto& defs = s.pack().tickets;
  const TicketDef* def = nullptr;
  if (slot.kind == TicketKind::Architecture) {
    for (const auto& d : defs)
      if (d.ticket.kind == TicketKind::Architecture && d.module == module) def = &d;
  } else {
    def = &defs[team.feature_deck[team.next_feature++]];
  }
  if (!def) throw RuleError(RuleErrorCode::IllegalMove, "no ticket available for slot");
  Ticket t = def->ticket;
  t.tasks_done = 0;
  t.td = {};
  t.card_trigger = slot.trigger;
  t.placed_order = -1;
  GameEvent& e = detail::emit_at(s, s.active_team, EventKind::TicketStarted, module, static_cast<int>(col.placed.size()));
  e.detail = t.id;
  col.in_progress = std::move(t);
}

// Validates the declared incur list against the effective blocked set.
inline void check_incur(const TeamState& team, const WorkMove& w) {
  const auto& col = team.column(w.module);
  if (!col.in_progress) throw RuleError(RuleErrorCode::NothingToWorkOn, "nothing to work on");
  DigitSet blocked = effective_blocked(team, w.module);
  DigitSet seen;
  for (Digit d : w.incur) {
    if (!blocked.contains(d) || seen.contains(d)) throw RuleError(RuleErrorCode::IllegalIncur, "illegal incur");
    seen.insert(d);
  }
}

// Resolution order for one work roll:
//  1. double on an effectively unblocked digit not yet in td: TD on it, two tasks
//  2. double on an effectively unblocked digit already in td: one task
//  3. any rolled digit effectively unblocked: one task
//  4. every rolled digit blocked and a declared incur digit was rolled
//     (and is not yet in td): conscious TD on it, one task
//  5. no progress
inline void apply_work(GameState& s, const WorkMove& w, DiceRoll roll) {
  const int team_id = s.active_team;
  TeamState& team = s.active();
  check_incur(team, w);
  auto& col = team.column(w.module);
  const int idx = static_cast<int>(col.placed.size());
  GameEvent& rolled = detail::emit_at(s, team_id, EventKind::DiceRolled, w.module, idx);
  rolled.roll = roll;

  Ticket& t = *col.in_progress;
  const DigitSet blocked = effective_blocked(team, w.module);
  const Digit a = roll.first, b = roll.second;

  auto place_td = [&](Digit d, bool conscious) {
    t.td.insert(d);
    GameEvent& e = detail::emit_at(s, team_id, EventKind::TdIncurred, w.module, idx,
                                   detail::incurrence_tags(col, t, conscious));
    e.digit = d;
    e.conscious = conscious;
  };

  if (roll.is_double() && !blocked.contains(a)) {
    if (!t.td.contains(a)) {
      place_td(a, false);
      complete_tasks(s, team_id, w.module, 2);
    } else {
      complete_tasks(s, team_id, w.module, 1);
    }
    return;
  }
  if (!blocked.contains(a) || !blocked.contains(b)) {
    complete_tasks(s, team_id, w.module, 1);
    return;
  }
  for (Digit d : w.incur) {
    if ((d == a || d == b) && !t.td.contains(d)) {
      place_td(d, true);
      complete_tasks(s, team_id, w.module, 1);
      return;
    }
  }
  detail::emit_at(s, team_id, EventKind::NoProgress, w.module, idx);
}

constexpr int repay_threshold(TicketKind k) { return k == TicketKind::Architecture ? 5 : 4; }

// Two-dice repayment: succeeds when either die reaches the threshold.
constexpr bool repay_succeeds(TicketKind k, DiceRoll roll) { return roll.high() >= repay_threshold(k); }

namespace detail {

inline void resolve_repayment(GameState& s, int team_id, const RepaymentTarget& target, DiceRoll roll) {
  TeamState& team = s.teams[team_id];
  Ticket* t = find_ticket(team, target.module, target.ticket);
  if (!t || !t->td.contains(target.digit)) throw RuleError(RuleErrorCode::NothingToRepay, "nothing to repay");
  emit_at(s, team_id, EventKind::DiceRolled, target.module, target.ticket).roll = roll;
  if (repay_succeeds(t->kind, roll)) {
    t->td.erase(target.digit);
    emit_at(s, team_id, EventKind::TdRepaid, target.module, target.ticket, {aha::kRepayBenefits}).digit = target.digit;
  } else {
    std::vector<AhaTag> tags{aha::kRepayDifficult, aha::kRepayTimeConsuming};
    if (t->kind == TicketKind::Architecture) tags.push_back(aha::kArchHardToRepay);
    emit_at(s, team_id, EventKind::RepaymentFailed, target.module, target.ticket, std::move(tags)).digit = target.digit;
  }
}

}  // namespace detail

inline void apply_repay(GameState& s, const RepayMove& r, DiceRoll roll) {
  detail::resolve_repayment(s, s.active_team, r.target, roll);
}

namespace detail {

inline Ticket* select_ticket(GameState& s, TeamState& team, TicketSelector sel, ModuleId* module_out) {
  std::vector<std::pair<ModuleId, Ticket*>> pool;
  switch (sel) {
    case TicketSelector::InProgress:
      for (ModuleId m : kModules)
        if (auto& c = team.column(m); c.in_progress) pool.emplace_back(m, &*c.in_progress);
      if (pool.empty()) return nullptr;
      *module_out = pool.front().first;
      return pool.front().second;
    case TicketSelector::NewestPlaced: {
      Ticket* best = nullptr;
      for (ModuleId m : kModules)
        for (auto& t : team.column(m).placed)
          if (!best || t.placed_order > best->placed_order) {
            best = &t;
            *module_out = m;
          }
      return best;
    }
    case TicketSelector::AnyPlaced:
      for (ModuleId m : kModules)
        for (auto& t : team.column(m).placed) pool.emplace_back(m, &t);
      break;
    case TicketSelector::Architecture:
      for (ModuleId m : kModules)
        if (auto& c = team.column(m); !c.placed.empty()) pool.emplace_back(m, &c.placed.front());
      break;
    default:
      return nullptr;
  }
  if (pool.empty()) return nullptr;
  auto& pick = pool[s.rng.below(pool.size())];
  *module_out = pick.first;
  return pick.second;
}

inline std::optional<RepaymentTarget> auto_td_target(const TeamState& team, TicketSelector sel) {
  auto tiles = td_tiles(team);
  if (tiles.empty()) return std::nullopt;
  switch (sel) {
    case TicketSelector::AnyTd:
      return tiles.front();
    case TicketSelector::InProgress:
      for (const auto& t : tiles)
        if (t.ticket == static_cast<int>(team.column(t.module).placed.size())) return t;
      return std::nullopt;
    case TicketSelector::NewestPlaced: {
      std::optional<RepaymentTarget> best;
      int best_order = -1;
      for (const auto& t : tiles) {
        const Ticket* tk = find_ticket(team, t.module, t.ticket);
        if (tk->placed_order > best_order) {
          best_order = tk->placed_order;
          best = t;
        }
      }
      return best;
    }
    default:
      return std::nullopt;
  }
}

inline bool valid_target(const TeamState& team, const RepaymentTarget& t) {
  const Ticket* tk = find_ticket(team, t.module, t.ticket);
  return tk && tk->td.contains(t.digit);
}

}  // namespace detail

// Applies primitives in order. Primitives whose target is absent are no-ops;
// choice-requiring primitives with a possible target need `bindings`.
inline void apply_effect(GameState& s, std::span<const EffectPrimitive> effect, int team_id, const Bindings& bindings,
                         std::string_view card_id) {
  for (const EffectPrimitive& p : effect) {
    TeamState& team = s.teams[team_id];
    GameEvent& applied = detail::emit(s, team_id, EventKind::EffectApplied);
    applied.card = std::string(card_id);
    applied.detail = std::string(to_string(p.op));

    switch (p.op) {
      case EffectOp::AddTdRandomDigit: {
        ModuleId m{};
        Ticket* t = detail::select_ticket(s, team, p.target, &m);
        if (!t) break;
        std::vector<Digit> free;
        for (int d : Digit::all())
          if (!t->td.contains(d)) free.emplace_back(d);
        if (free.empty()) break;
        Digit d = free[s.rng.below(free.size())];
        t->td.insert(d);
        auto& col = team.column(m);
        GameEvent& e = detail::emit_at(s, team_id, EventKind::TdIncurred, m, detail::ticket_index(col, *t),
                                       detail::incurrence_tags(col, *t, std::nullopt));
        e.digit = d;
        e.card = std::string(card_id);
        break;
      }
      case EffectOp::AddTdChosenDigit: {
        bool any = false;
        for (ModuleId m : kModules)
          if (auto& c = team.column(m); c.in_progress && c.in_progress->td.size() < 6) any = true;
        if (!any) break;
        if (!bindings.module || !bindings.digit)
          throw RuleError(RuleErrorCode::BindingRequired, "binding required: module and digit");
        auto& col = team.column(*bindings.module);
        if (!col.in_progress || col.in_progress->td.contains(*bindings.digit))
          throw RuleError(RuleErrorCode::InvalidBinding, "chosen digit cannot take TD");
        Ticket& t = *col.in_progress;
        t.td.insert(*bindings.digit);
        GameEvent& e = detail::emit_at(s, team_id, EventKind::TdIncurred, *bindings.module,
                                       static_cast<int>(col.placed.size()), detail::incurrence_tags(col, t, true));
        e.digit = *bindings.digit;
        e.conscious = true;
        e.card = std::string(card_id);
        break;
      }
      case EffectOp::RemoveTd:
      case EffectOp::FreeRepaymentAttempt: {
        std::optional<RepaymentTarget> target;
        bool chosen = p.op == EffectOp::FreeRepaymentAttempt || p.target == TicketSelector::Chosen;
        if (chosen) {
          if (td_tiles(team).empty()) break;
          if (!bindings.target) throw RuleError(RuleErrorCode::BindingRequired, "binding required: repayment target");
          if (!detail::valid_target(team, *bindings.target))
            throw RuleError(RuleErrorCode::InvalidBinding, "binding names no TD tile");
          target = bindings.target;
        } else {
          target = detail::auto_td_target(team, p.target);
          if (!target) break;
        }
        if (p.op == EffectOp::FreeRepaymentAttempt) {
          detail::resolve_repayment(s, team_id, *target, next_roll(s));
        } else {
          find_ticket(team, target->module, target->ticket)->td.erase(target->digit);
          GameEvent& e =
              detail::emit_at(s, team_id, EventKind::TdRepaid, target->module, target->ticket, {aha::kRepayBenefits});
          e.digit = target->digit;
          e.card = std::string(card_id);
        }
        break;
      }
      case EffectOp::SkipNextTurn:
        team.skip_turns_pending += 1;
        break;
      case EffectOp::CompleteOneTask: {
        std::optional<ModuleId> m;
        if (bindings.module && team.column(*bindings.module).in_progress) {
          m = bindings.module;
        } else {
          for (ModuleId c : kModules)
            if (team.column(c).in_progress) {
              m = c;
              break;
            }
        }
        if (m) complete_tasks(s, team_id, *m, 1);
        break;
      }
      case EffectOp::BlockDigitForRounds:
        team.temp_blocked[p.digit] = std::max(team.temp_blocked[p.digit], p.rounds);
        break;
      case EffectOp::RevealOpponentTd:
        applied.amount = s.teams[1 - team_id].unrepaid_td();
        break;
      case EffectOp::DoubleNextTicketUsers:
        team.double_next_users = true;
        break;
    }
  }
}

inline void play_action(GameState& s, const PlayActionMove& m) {
  TeamState& team = s.active();
  auto it = std::find(team.hand.begin(), team.hand.end(), m.card_id);
  if (it == team.hand.end()) throw RuleError(RuleErrorCode::UnknownCard, "card '" + m.card_id + "' not in hand");
  team.hand.erase(it);
  const Card& card = s.pack().card(m.card_id);
  detail::emit(s, s.active_team, EventKind::CardPlayed).card = m.card_id;
  apply_effect(s, card.effect, s.active_team, m.bindings, m.card_id);
  s.action_discard.push_back(m.card_id);
}

// Ends the game and tallies both teams.
inline void end_game(GameState& s, EndReason reason) {
  s.phase = Phase::Finished;
  s.end_reason = reason;
  for (int t = 0; t < 2; ++t) {
    GameEvent& e = detail::emit(s, t, EventKind::ScoreTallied);
    e.amount = score_of(s, s.teams[t]);
    e.extra = s.teams[t].unrepaid_td();
  }
  detail::emit(s, s.active_team, EventKind::GameEnded).detail = std::string(to_string(reason));
}

}  // namespace techdebt
