#pragma once

#include <algorithm>
#include <functional>
#include <string>
#include <vector>

#include "techdebt/rules.hpp"

namespace techdebt {

// A bot strategy over the full (perfectly visible) game state. `decide`
// returns an instance of one of the canonical legal moves, with incur lists
// and card bindings filled in; `bind` supplies card choices on its own.
struct Policy {
  std::string name;
  std::function<Move(const GameState&, const std::vector<Move>&, Rng&)> decide;
  std::function<Bindings(const GameState&, const Card&, Rng&)> bind;
};

namespace policy_detail {

// Fraction of the 36 rolls that progress a ticket with effective blocked set
// `blocked` and own TD `td`, when the listed digits may be incurred on.
inline double progress_probability(DigitSet blocked, DigitSet td, DigitSet incur = {}) {
  int hits = 0;
  for (int a : Digit::all())
    for (int b : Digit::all()) {
      bool ok;
      if (a == b && !blocked.contains(a))
        ok = true;
      else if (!blocked.contains(a) || !blocked.contains(b))
        ok = true;
      else
        ok = (incur.contains(a) && !td.contains(a)) || (incur.contains(b) && !td.contains(b));
      hits += ok;
    }
  return hits / 36.0;
}

inline std::optional<ModuleId> best_work_module(const TeamState& team) {
  std::optional<ModuleId> best;
  double best_p = -1;
  for (ModuleId m : kModules) {
    const auto& col = team.column(m);
    if (!col.in_progress) continue;
    double p = progress_probability(effective_blocked(team, m), col.in_progress->td);
    if (p > best_p) {
      best_p = p;
      best = m;
    }
  }
  return best;
}

inline std::optional<ModuleId> choose_start(const TeamState& team) {
  std::optional<ModuleId> best;
  for (ModuleId m : kModules) {
    if (!can_start(team, m)) continue;
    if (!best) {
      best = m;
      continue;
    }
    const auto& c = team.column(m);
    const auto& b = team.column(*best);
    int ctd = c.predecessor_td().size(), btd = b.predecessor_td().size();
    if (ctd < btd || (ctd == btd && c.placed.size() > b.placed.size())) best = m;
  }
  return best;
}

inline bool module_has_work(const ModuleColumn& col) { return col.in_progress || col.placed.size() < col.slots.size(); }

// Tiles sitting on placed tickets of modules that still have work ahead,
// i.e. tiles that currently block something.
inline std::vector<RepaymentTarget> blocking_tiles(const TeamState& team, std::optional<ModuleId> only = std::nullopt) {
  std::vector<RepaymentTarget> out;
  for (const auto& t : td_tiles(team)) {
    if (only && t.module != *only) continue;
    const auto& col = team.column(t.module);
    if (t.ticket < static_cast<int>(col.placed.size()) && module_has_work(col)) out.push_back(t);
  }
  return out;
}

// Prefers feature-ticket tiles (easier to repay by dice), then newest.
inline std::optional<RepaymentTarget> easiest_tile(const TeamState& team, const std::vector<RepaymentTarget>& tiles) {
  std::optional<RepaymentTarget> best;
  int best_rank = -1;
  for (const auto& t : tiles) {
    const Ticket* tk = find_ticket(team, t.module, t.ticket);
    int rank = (tk->kind == TicketKind::Feature ? 1000 : 0) + t.ticket;
    if (rank > best_rank) {
      best_rank = rank;
      best = t;
    }
  }
  return best;
}

// For certain removal, architecture tiles first: they are the hardest by dice.
inline std::optional<RepaymentTarget> hardest_tile(const TeamState& team) {
  auto tiles = blocking_tiles(team);
  if (tiles.empty()) tiles = td_tiles(team);
  std::optional<RepaymentTarget> best;
  for (const auto& t : tiles) {
    const Ticket* tk = find_ticket(team, t.module, t.ticket);
    if (!best || tk->kind == TicketKind::Architecture) {
      best = t;
      if (tk->kind == TicketKind::Architecture) break;
    }
  }
  return best;
}

inline Bindings greedy_bind(const GameState& s, const Card& card, bool prefer_certain) {
  const TeamState& team = s.active();
  Bindings b;
  auto m = best_work_module(team);
  for (const auto& p : card.effect) {
    switch (p.op) {
      case EffectOp::AddTdChosenDigit:
        if (m) {
          const Ticket& t = *team.column(*m).in_progress;
          std::optional<Digit> pick;
          for (Digit d : t.blocked.members())
            if (!t.td.contains(d)) {
              pick = d;
              break;
            }
          if (!pick)
            for (int d : Digit::all())
              if (!t.td.contains(d)) {
                pick = Digit(d);
                break;
              }
          if (pick) {
            b.module = m;
            b.digit = pick;
          }
        }
        break;
      case EffectOp::FreeRepaymentAttempt: {
        auto tiles = blocking_tiles(team);
        if (tiles.empty()) tiles = td_tiles(team);
        b.target = easiest_tile(team, tiles);
        break;
      }
      case EffectOp::RemoveTd:
        if (p.target == TicketSelector::Chosen) b.target = prefer_certain ? hardest_tile(team) : easiest_tile(team, td_tiles(team));
        break;
      case EffectOp::CompleteOneTask:
        if (m && !b.module) b.module = m;
        break;
      default:
        break;
    }
  }
  return b;
}

inline bool adds_td(const Card& c) {
  return std::any_of(c.effect.begin(), c.effect.end(), [](const auto& p) { return p.op == EffectOp::AddTdChosenDigit; });
}
inline bool repays(const Card& c) {
  return std::any_of(c.effect.begin(), c.effect.end(), [](const auto& p) {
    return p.op == EffectOp::RemoveTd || p.op == EffectOp::FreeRepaymentAttempt;
  });
}

// True when at least one primitive of the card would change something now.
inline bool card_has_effect(const GameState& s, const Card& c) {
  const TeamState& team = s.active();
  bool in_progress = false;
  for (const auto& col : team.board) in_progress |= col.in_progress.has_value();
  for (const auto& p : c.effect) {
    switch (p.op) {
      case EffectOp::RemoveTd:
        if (p.target == TicketSelector::Chosen ? !td_tiles(team).empty() : detail::auto_td_target(team, p.target).has_value())
          return true;
        break;
      case EffectOp::FreeRepaymentAttempt:
        if (!td_tiles(team).empty()) return true;
        break;
      case EffectOp::CompleteOneTask:
      case EffectOp::AddTdChosenDigit:
        if (in_progress) return true;
        break;
      case EffectOp::DoubleNextTicketUsers:
        if (!team.double_next_users) return true;
        break;
      default:
        break;
    }
  }
  return false;
}

inline std::optional<Move> pick_card(const GameState& s, const std::vector<Move>& legal, bool allow_incur,
                                     bool allow_repay) {
  for (const auto& m : legal) {
    auto* p = std::get_if<PlayActionMove>(&m);
    if (!p) continue;
    const Card& c = s.pack().card(p->card_id);
    if (adds_td(c) && !allow_incur) continue;
    if (repays(c) && !allow_repay) continue;
    if (!card_has_effect(s, c)) continue;
    return PlayActionMove{p->card_id, greedy_bind(s, c, true)};
  }
  return std::nullopt;
}

inline std::vector<Digit> incur_all(const TeamState& team, ModuleId m) {
  std::vector<Digit> out;
  const Ticket& t = *team.column(m).in_progress;
  for (Digit d : effective_blocked(team, m).members())
    if (!t.td.contains(d)) out.push_back(d);
  return out;
}

inline Move fallback(const std::vector<Move>& legal) {
  if (legal.empty()) throw std::logic_error("no legal move to choose from");
  return legal.front();
}

}  // namespace policy_detail

// Never takes TD on purpose; when the current ticket is mostly blocked by
// earlier TD it repays that TD instead of rolling.
inline Policy never_incur_policy() {
  using namespace policy_detail;
  Policy p;
  p.name = "never-incur";
  p.bind = [](const GameState& s, const Card& c, Rng&) { return greedy_bind(s, c, true); };
  p.decide = [](const GameState& s, const std::vector<Move>& legal, Rng&) -> Move {
    const TeamState& team = s.active();
    if (auto card = pick_card(s, legal, false, true)) return *card;
    if (auto m = best_work_module(team)) {
      double prob = progress_probability(effective_blocked(team, *m), team.column(*m).in_progress->td);
      if (prob < 0.5)
        if (auto tile = easiest_tile(team, blocking_tiles(team, *m))) return RepayMove{*tile};
      return WorkMove{*m, {}};
    }
    if (auto m = choose_start(team)) return StartTicketMove{*m};
    return fallback(legal);
  };
  return p;
}

// Incurs TD on every blocked roll and never repays.
inline Policy always_incur_policy() {
  using namespace policy_detail;
  Policy p;
  p.name = "always-incur";
  p.bind = [](const GameState& s, const Card& c, Rng&) { return greedy_bind(s, c, true); };
  p.decide = [](const GameState& s, const std::vector<Move>& legal, Rng&) -> Move {
    const TeamState& team = s.active();
    if (auto card = pick_card(s, legal, true, false)) return *card;
    if (auto m = best_work_module(team)) return WorkMove{*m, incur_all(team, *m)};
    if (auto m = choose_start(team)) return StartTicketMove{*m};
    for (const auto& mv : legal)
      if (!std::holds_alternative<RepayMove>(mv)) return mv;
    return fallback(legal);
  };
  return p;
}

// Incurs during the first half of the game; repays a module's TD once it
// blocks three or more digits for the tickets still to come there.
inline Policy balanced_policy() {
  using namespace policy_detail;
  Policy p;
  p.name = "balanced";
  p.bind = [](const GameState& s, const Card& c, Rng&) { return greedy_bind(s, c, true); };
  p.decide = [](const GameState& s, const std::vector<Move>& legal, Rng&) -> Move {
    const TeamState& team = s.active();
    const bool early = s.round * 2 < s.config.max_rounds;
    if (auto card = pick_card(s, legal, early, true)) return *card;
    for (ModuleId m : kModules) {
      const auto& col = team.column(m);
      if (module_has_work(col) && col.predecessor_td().size() >= 3)
        if (auto tile = easiest_tile(team, blocking_tiles(team, m))) return RepayMove{*tile};
    }
    if (auto m = best_work_module(team)) return WorkMove{*m, early ? incur_all(team, *m) : std::vector<Digit>{}};
    if (auto m = choose_start(team)) return StartTicketMove{*m};
    return fallback(legal);
  };
  return p;
}

inline Bindings random_bind(const GameState& s, const Card& card, Rng& rng) {
  const TeamState& team = s.active();
  Bindings b;
  std::vector<ModuleId> open;
  for (ModuleId m : kModules)
    if (team.column(m).in_progress) open.push_back(m);
  for (const auto& p : card.effect) {
    if (p.op == EffectOp::AddTdChosenDigit && !open.empty()) {
      ModuleId m = open[rng.below(open.size())];
      const Ticket& t = *team.column(m).in_progress;
      std::vector<Digit> free;
      for (int d : Digit::all())
        if (!t.td.contains(d)) free.emplace_back(d);
      if (!free.empty()) {
        b.module = m;
        b.digit = free[rng.below(free.size())];
      }
    } else if (p.needs_choice()) {
      auto tiles = td_tiles(team);
      if (!tiles.empty()) b.target = tiles[rng.below(tiles.size())];
    } else if (p.op == EffectOp::CompleteOneTask && !open.empty() && !b.module) {
      b.module = open[rng.below(open.size())];
    }
  }
  return b;
}

// Uniform over the canonical moves; random incur lists and bindings.
inline Policy random_policy() {
  Policy p;
  p.name = "uniform-random";
  p.bind = random_bind;
  p.decide = [](const GameState& s, const std::vector<Move>& legal, Rng& rng) -> Move {
    policy_detail::fallback(legal);
    Move m = legal[rng.below(legal.size())];
    if (auto* w = std::get_if<WorkMove>(&m)) {
      std::vector<Digit> pool = effective_blocked(s.active(), w->module).members();
      rng.shuffle(pool);
      for (Digit d : pool)
        if (rng.below(2)) w->incur.push_back(d);
    } else if (auto* a = std::get_if<PlayActionMove>(&m)) {
      a->bindings = random_bind(s, s.pack().card(a->card_id), rng);
    }
    return m;
  };
  return p;
}

inline std::vector<Policy> builtin_policies() {
  return {never_incur_policy(), always_incur_policy(), balanced_policy(), random_policy()};
}

inline std::optional<Policy> find_policy(std::string_view name) {
  for (auto& p : builtin_policies())
    if (p.name == name) return p;
  return std::nullopt;
}

}  // namespace techdebt
