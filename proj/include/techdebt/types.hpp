#pragma once

#include <array>
#include <cstdint>
#include <deque>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "techdebt/aha.hpp"
#include "techdebt/digits.hpp"
#include "techdebt/rng.hpp"

namespace techdebt {

enum class TicketKind : std::uint8_t { Architecture, Feature };
enum class CardKind : std::uint8_t { Event, Action };
enum class ModuleId : std::uint8_t { A, B, C };

inline constexpr std::array<ModuleId, 3> kModules{ModuleId::A, ModuleId::B, ModuleId::C};

constexpr int index_of(ModuleId m) { return static_cast<int>(m); }
constexpr char letter(ModuleId m) { return static_cast<char>('A' + index_of(m)); }

inline std::optional<ModuleId> parse_module(std::string_view s) {
  if (s == "A") return ModuleId::A;
  if (s == "B") return ModuleId::B;
  if (s == "C") return ModuleId::C;
  return std::nullopt;
}

constexpr std::string_view to_string(TicketKind k) {
  return k == TicketKind::Architecture ? "architecture" : "feature";
}
constexpr std::string_view to_string(CardKind k) { return k == CardKind::Event ? "event" : "action"; }

struct Ticket {
  std::string id;
  TicketKind kind = TicketKind::Feature;
  int tasks_required = 1;
  int tasks_done = 0;
  DigitSet blocked;  // printed on the ticket
  DigitSet td;       // red tiles placed during play
  int users = 0;
  std::optional<CardKind> card_trigger;  // copied from the slot the ticket occupies
  int placed_order = -1;                 // per-team placement counter, -1 until placed

  bool complete() const { return tasks_done >= tasks_required; }
  int remaining() const { return tasks_required - tasks_done; }
  friend bool operator==(const Ticket&, const Ticket&) = default;
};

struct SlotDef {
  TicketKind kind = TicketKind::Feature;
  std::optional<CardKind> trigger;
  friend bool operator==(const SlotDef&, const SlotDef&) = default;
};

struct ModuleColumn {
  ModuleId id = ModuleId::A;
  std::vector<SlotDef> slots;
  std::vector<Ticket> placed;
  std::optional<Ticket> in_progress;

  bool complete() const { return placed.size() == slots.size(); }
  bool has_open_slot() const { return !in_progress && placed.size() < slots.size(); }
  // TD carried by the tickets the current ticket depends on.
  DigitSet predecessor_td() const {
    DigitSet s;
    for (const Ticket& t : placed) s |= t.td;
    return s;
  }
  friend bool operator==(const ModuleColumn&, const ModuleColumn&) = default;
};

// Identifies one TD tile. ticket indexes `placed`; ticket == placed.size()
// refers to the in-progress ticket.
struct RepaymentTarget {
  ModuleId module = ModuleId::A;
  int ticket = 0;
  Digit digit;
  friend bool operator==(const RepaymentTarget&, const RepaymentTarget&) = default;
};

enum class TicketSelector : std::uint8_t {
  InProgress,
  NewestPlaced,
  AnyPlaced,
  Architecture,
  AnyTd,
  Chosen,
};

enum class EffectOp : std::uint8_t {
  AddTdRandomDigit,
  AddTdChosenDigit,
  RemoveTd,
  FreeRepaymentAttempt,
  SkipNextTurn,
  CompleteOneTask,
  BlockDigitForRounds,
  RevealOpponentTd,
  DoubleNextTicketUsers,
};

inline constexpr std::array<std::string_view, 6> kSelectorNames{
    "in_progress", "newest_placed", "any_placed", "architecture", "any_td", "chosen"};
inline constexpr std::array<std::string_view, 9> kEffectOpNames{
    "add_td_random_digit", "add_td_chosen_digit",      "remove_td",
    "free_repayment_attempt", "skip_next_turn",        "complete_one_task",
    "block_digit_for_rounds", "reveal_opponent_td",    "double_next_ticket_users"};

constexpr std::string_view to_string(TicketSelector s) { return kSelectorNames[static_cast<std::size_t>(s)]; }
constexpr std::string_view to_string(EffectOp op) { return kEffectOpNames[static_cast<std::size_t>(op)]; }

struct EffectPrimitive {
  EffectOp op = EffectOp::SkipNextTurn;
  TicketSelector target = TicketSelector::InProgress;  // AddTdRandomDigit, RemoveTd
  int digit = 0;                                       // BlockDigitForRounds
  int rounds = 0;                                      // BlockDigitForRounds

  // True when resolving this primitive needs a player decision.
  bool needs_choice() const {
    return op == EffectOp::AddTdChosenDigit || op == EffectOp::FreeRepaymentAttempt ||
           (op == EffectOp::RemoveTd && target == TicketSelector::Chosen);
  }
  friend bool operator==(const EffectPrimitive&, const EffectPrimitive&) = default;
};

struct Card {
  std::string id;
  CardKind kind = CardKind::Event;
  std::string title;
  std::string narrative;
  std::vector<EffectPrimitive> effect;
  std::vector<AhaTag> tags;
  bool consumes_turn = true;  // action cards only

  bool needs_choice() const {
    for (const auto& p : effect)
      if (p.needs_choice()) return true;
    return false;
  }
  friend bool operator==(const Card&, const Card&) = default;
};

struct TicketDef {
  Ticket ticket;
  std::optional<ModuleId> module;  // required for architecture tickets
  friend bool operator==(const TicketDef&, const TicketDef&) = default;
};

struct ContentPack {
  int pack_version = 1;
  std::string name;
  std::string version;
  std::array<std::vector<SlotDef>, 3> board;
  std::vector<TicketDef> tickets;
  std::vector<Card> event_cards;
  std::vector<Card> action_cards;
  int td_penalty = 1;
  int max_rounds = 60;

  const Card* find_card(std::string_view id) const {
    for (const auto& c : event_cards)
      if (c.id == id) return &c;
    for (const auto& c : action_cards)
      if (c.id == id) return &c;
    return nullptr;
  }
  const Card& card(std::string_view id) const {
    const Card* c = find_card(id);
    if (!c) throw std::out_of_range("unknown card id '" + std::string(id) + "'");
    return *c;
  }
  friend bool operator==(const ContentPack&, const ContentPack&) = default;
};

struct Bindings {
  std::optional<ModuleId> module;
  std::optional<RepaymentTarget> target;
  std::optional<Digit> digit;
  bool empty() const { return !module && !target && !digit; }
  friend bool operator==(const Bindings&, const Bindings&) = default;
};

struct WorkMove {
  ModuleId module = ModuleId::A;
  std::vector<Digit> incur;  // conditional: "if this digit is rolled and blocked, incur TD on it"
  friend bool operator==(const WorkMove&, const WorkMove&) = default;
};
struct RepayMove {
  RepaymentTarget target;
  friend bool operator==(const RepayMove&, const RepayMove&) = default;
};
struct PlayActionMove {
  std::string card_id;
  Bindings bindings;
  friend bool operator==(const PlayActionMove&, const PlayActionMove&) = default;
};
struct StartTicketMove {
  ModuleId module = ModuleId::A;
  friend bool operator==(const StartTicketMove&, const StartTicketMove&) = default;
};

using Move = std::variant<WorkMove, RepayMove, PlayActionMove, StartTicketMove>;

enum class EventKind : std::uint8_t {
  MoveAccepted,
  DiceRolled,
  TaskCompleted,
  NoProgress,
  TdIncurred,
  TdRepaid,
  RepaymentFailed,
  TicketStarted,
  TicketCompleted,
  CardDrawn,
  CardPlayed,
  EffectApplied,
  DeckReshuffled,
  TurnSkipped,
  ClockExpired,
  ScoreTallied,
  GameEnded,
  Warning,
};

inline constexpr std::array<std::string_view, 18> kEventKindNames{
    "MoveAccepted",    "DiceRolled",  "TaskCompleted", "NoProgress",     "TdIncurred",    "TdRepaid",
    "RepaymentFailed", "TicketStarted", "TicketCompleted", "CardDrawn",  "CardPlayed",    "EffectApplied",
    "DeckReshuffled",  "TurnSkipped", "ClockExpired",  "ScoreTallied",   "GameEnded",     "Warning",
};

constexpr std::string_view to_string(EventKind k) { return kEventKindNames[static_cast<std::size_t>(k)]; }

// One entry of the append-only game log. Timestamps are logical: (round, seq).
// Fields beyond the header are populated per kind; unused ones stay empty.
struct GameEvent {
  std::uint32_t seq = 0;
  int round = 0;
  int team = 0;
  EventKind kind = EventKind::Warning;
  std::vector<AhaTag> tags;

  std::optional<Move> move;
  std::optional<DiceRoll> roll;
  std::optional<ModuleId> module;
  std::optional<int> ticket;
  std::optional<Digit> digit;
  int amount = 0;
  int extra = 0;
  bool conscious = false;
  std::string card;
  std::string detail;

  friend bool operator==(const GameEvent&, const GameEvent&) = default;
};

struct Seat {
  std::string name;
  bool bot = false;
  friend bool operator==(const Seat&, const Seat&) = default;
};

struct GameConfig {
  std::shared_ptr<const ContentPack> pack;
  std::uint64_t seed = 0;
  int max_rounds = 60;
  int td_penalty = 1;
  std::vector<std::vector<Seat>> teams;  // exactly two rosters of 1..4 seats

  friend bool operator==(const GameConfig& a, const GameConfig& b) {
    bool same_pack = a.pack == b.pack || (a.pack && b.pack && *a.pack == *b.pack);
    return same_pack && a.seed == b.seed && a.max_rounds == b.max_rounds && a.td_penalty == b.td_penalty &&
           a.teams == b.teams;
  }
};

struct TeamState {
  int id = 0;
  std::array<ModuleColumn, 3> board;
  int users_banked = 0;
  std::vector<std::string> hand;  // action card ids
  int skip_turns_pending = 0;
  std::array<int, 7> temp_blocked{};  // rounds remaining, indexed by digit (slot 0 unused)
  bool double_next_users = false;
  std::vector<int> feature_deck;  // indices into ContentPack::tickets
  std::size_t next_feature = 0;
  int placed_count = 0;

  ModuleColumn& column(ModuleId m) { return board[index_of(m)]; }
  const ModuleColumn& column(ModuleId m) const { return board[index_of(m)]; }

  DigitSet temp_blocked_set() const {
    DigitSet s;
    for (int d : Digit::all())
      if (temp_blocked[d] > 0) s.insert(Digit(d));
    return s;
  }
  int unrepaid_td() const {
    int n = 0;
    for (const auto& col : board) {
      for (const auto& t : col.placed) n += t.td.size();
      if (col.in_progress) n += col.in_progress->td.size();
    }
    return n;
  }
  bool all_modules_complete() const {
    for (const auto& col : board)
      if (!col.complete()) return false;
    return true;
  }
  friend bool operator==(const TeamState&, const TeamState&) = default;
};

enum class Phase : std::uint8_t { AwaitingMove, Finished };
enum class EndReason : std::uint8_t { RoundLimit, ModulesComplete };

constexpr std::string_view to_string(EndReason r) {
  return r == EndReason::RoundLimit ? "round limit" : "modules complete";
}

struct GameState {
  GameConfig config;
  std::array<TeamState, 2> teams;
  std::vector<std::string> event_deck;  // top of deck is back()
  std::vector<std::string> action_deck;
  std::vector<std::string> event_discard;
  std::vector<std::string> action_discard;
  int active_team = 0;
  int round = 0;
  Rng rng;
  Phase phase = Phase::AwaitingMove;
  std::optional<EndReason> end_reason;
  std::vector<GameEvent> log;

  // Fixture hook: rolls queued here are consumed before the generator.
  // Never set by the session engine, so replays are unaffected.
  std::deque<DiceRoll> forced_rolls;

  const ContentPack& pack() const { return *config.pack; }
  TeamState& active() { return teams[active_team]; }
  const TeamState& active() const { return teams[active_team]; }

  friend bool operator==(const GameState&, const GameState&) = default;
};

}  // namespace techdebt
