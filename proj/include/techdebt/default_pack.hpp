#pragma once

#include <memory>

#include "techdebt/types.hpp"

namespace techdebt {

namespace default_pack_detail {

inline AhaTag t(AhaGroup g, std::string_view v) { return aha::tag(g, v); }

inline EffectPrimitive add_td(TicketSelector sel) { return {EffectOp::AddTdRandomDigit, sel}; }
inline EffectPrimitive remove_td(TicketSelector sel) { return {EffectOp::RemoveTd, sel}; }
inline EffectPrimitive op(EffectOp o) { return {o}; }
inline EffectPrimitive block(int digit, int rounds) {
  return {EffectOp::BlockDigitForRounds, TicketSelector::InProgress, digit, rounds};
}

inline Card event(std::string id, std::string title, std::string narrative, std::vector<EffectPrimitive> effect,
                  std::vector<AhaTag> tags) {
  return {std::move(id), CardKind::Event, std::move(title), std::move(narrative), std::move(effect), std::move(tags), true};
}

inline Card action(std::string id, std::string title, std::string narrative, std::vector<EffectPrimitive> effect,
                   std::vector<AhaTag> tags, bool consumes_turn = true) {
  return {std::move(id),    CardKind::Action, std::move(title), std::move(narrative), std::move(effect),
          std::move(tags), consumes_turn};
}

inline TicketDef arch(std::string id, ModuleId m, int tasks, DigitSet blocked) {
  Ticket tk;
  tk.id = std::move(id);
  tk.kind = TicketKind::Architecture;
  tk.tasks_required = tasks;
  tk.blocked = blocked;
  return {tk, m};
}

inline TicketDef feature(std::string id, int tasks, DigitSet blocked, int users) {
  Ticket tk;
  tk.id = std::move(id);
  tk.kind = TicketKind::Feature;
  tk.tasks_required = tasks;
  tk.blocked = blocked;
  tk.users = users;
  return {tk, std::nullopt};
}

}  // namespace default_pack_detail

// The shipped content: three modules of one architecture slot followed by
// three feature slots, twenty event cards and twelve action cards. Every
// learning-objective row is reachable through a card or a game mechanic.
inline ContentPack make_default_pack() {
  using namespace default_pack_detail;
  using G = AhaGroup;
  using S = TicketSelector;
  constexpr auto E = CardKind::Event;
  constexpr auto A = CardKind::Action;
  constexpr auto Arch = TicketKind::Architecture;
  constexpr auto Feat = TicketKind::Feature;

  ContentPack p;
  p.pack_version = 1;
  p.name = "default";
  p.version = "1.0.0";
  p.td_penalty = 1;
  p.max_rounds = 60;

  p.board[0] = {{Arch, std::nullopt}, {Feat, E}, {Feat, A}, {Feat, E}};
  p.board[1] = {{Arch, A}, {Feat, E}, {Feat, std::nullopt}, {Feat, E}};
  p.board[2] = {{Arch, E}, {Feat, A}, {Feat, E}, {Feat, A}};

  p.tickets = {
      arch("ARCH-A", ModuleId::A, 4, {1, 2}),
      arch("ARCH-B", ModuleId::B, 4, {2, 5}),
      arch("ARCH-C", ModuleId::C, 4, {3, 6}),
      feature("F-LOGIN", 3, {1}, 2),
      feature("F-SEARCH", 4, {2, 6}, 3),
      feature("F-CART", 3, {3}, 2),
      feature("F-PAYMENT", 5, {1, 4}, 4),
      feature("F-PROFILE", 2, {5}, 1),
      feature("F-REPORTS", 4, {2, 3}, 3),
      feature("F-EXPORT", 3, {6}, 2),
      feature("F-NOTIFY", 3, {1, 5}, 3),
      feature("F-ADMIN", 5, {3, 4}, 4),
      feature("F-API", 4, {4}, 3),
      feature("F-SYNC", 4, {1, 6}, 3),
      feature("F-HELP", 2, {2}, 1),
  };

  p.event_cards = {
      event("E-RETIRE", "Developer retires",
            "A good developer retires. They wrote good code but did not document it very well.",
            {add_td(S::NewestPlaced)}, {t(G::Causes, "Personnel")}),
      event("E-DEADLINE", "Deadline moved up", "The release date is pulled forward by two weeks.",
            {add_td(S::InProgress)}, {t(G::Causes, "Time")}),
      event("E-LICENSE", "License budget cut", "The paid component is replaced by a cheaper, half-fitting one.",
            {add_td(S::AnyPlaced)}, {t(G::Causes, "Budget")}),
      event("E-REQCHANGE", "Requirements changed", "Sales promised a customer a different workflow.",
            {add_td(S::NewestPlaced)}, {t(G::Causes, "Business")}),
      event("E-REPLAN", "Poorly planned sprint", "Nobody told the team about the audit. The sprint is lost.",
            {op(EffectOp::SkipNextTurn)}, {t(G::Causes, "Management")}),
      event("E-OUTDATED", "Outdated framework", "The framework under the system reaches end of life.",
            {add_td(S::Architecture)}, {t(G::Causes, "Technology"), t(G::Architecture, "Critical")}),
      event("E-WRONGCALL", "Wrong architectural decision", "The chosen database does not scale with the data model.",
            {add_td(S::Architecture)}, {t(G::Causes, "Decisions")}),
      event("E-UNAWARE", "Nobody noticed", "A shortcut slipped through review because nobody knew it was one.",
            {add_td(S::AnyPlaced)}, {t(G::Causes, "Awareness"), t(G::Business, "Invisible")}),
      event("E-CASCADE", "One thing leads to another",
            "The budget freeze causes hiring stops, and the rushed team cuts corners.",
            {add_td(S::InProgress), op(EffectOp::SkipNextTurn)}, {t(G::Causes, "Chains")}),
      event("E-OVERTIME", "Overtime", "The last release needs a weekend of unplanned overtime.",
            {op(EffectOp::SkipNextTurn)}, {t(G::Consequences, "Time")}),
      event("E-OPTCOST", "Optimization costs", "Performance tuning eats the budget for new work.",
            {block(6, 2)}, {t(G::Consequences, "Budget")}),
      event("E-CHURN", "Customers leave", "Unmet requirements drive a key customer to a competitor.",
            {block(5, 2)}, {t(G::Consequences, "Business")}),
      event("E-NOCONTROL", "Loss of control", "Estimates no longer hold and nobody can say when the project ends.",
            {block(1, 3)}, {t(G::Consequences, "Management")}),
      event("E-BURNOUT", "Burnout", "A stressed colleague goes on sick leave.", {op(EffectOp::SkipNextTurn)},
            {t(G::Consequences, "Personnel")}),
      event("E-BUGS", "Bug storm", "Every fix introduces two new bugs.", {add_td(S::InProgress)},
            {t(G::Consequences, "Technology")}),
      event("E-RIPPLE", "Ripple effect", "A hotfix breaks an interface, which delays the integration.",
            {add_td(S::NewestPlaced), block(3, 1)}, {t(G::Consequences, "Chains")}),
      event("E-WINDOWS", "Broken windows", "The module is already messy, so one more hack does not hurt.",
            {add_td(S::NewestPlaced)}, {t(G::ViciousCycle, "Inner")}),
      event("E-FIREFIGHT", "Firefighting", "Production incidents pull the team away and new shortcuts follow.",
            {add_td(S::InProgress), block(4, 1)}, {t(G::ViciousCycle, "Outer")}),
      event("E-DECAY", "Silent decay", "The code rots quietly. Only slower releases hint at it.",
            {add_td(S::AnyPlaced)}, {t(G::Business, "Invisible")}),
      event("E-WHYSLOW", "Why is this so slow?", "Management cannot see why a small feature takes a month.",
            {block(2, 2)}, {t(G::Business, "Perspective")}),
  };

  p.action_cards = {
      action("A-REFACTOR", "Refactoring", "The team takes the time to clean up one part of the code.",
             {remove_td(S::Chosen)}, {t(G::Repayment, "Simplified"), t(G::Repayment, "Benefits")}),
      action("A-SPECIALIST", "Bring in a specialist", "An expert helps pay back debt without blocking the team.",
             {op(EffectOp::FreeRepaymentAttempt)}, {t(G::Repayment, "Simplified")}, false),
      action("A-REVIEW", "Code review", "A review session surfaces hidden debt.",
             {op(EffectOp::RevealOpponentTd), remove_td(S::AnyTd)}, {t(G::TdManagement, "Identifying TD")}),
      action("A-BACKLOG", "Debt backlog", "The team keeps a ranked list of debt items and tackles the top one.",
             {remove_td(S::NewestPlaced)}, {t(G::TdManagement, "Prioritizing TD")}),
      action("A-ACCEPT", "Live with it", "The debt is in code that will be retired soon. Ship features instead.",
             {op(EffectOp::DoubleNextTicketUsers)}, {t(G::TdManagement, "Ignoring TD")}),
      action("A-QUICKFIX", "Quick and dirty", "Take a shortcut to finish a task right now.",
             {op(EffectOp::AddTdChosenDigit), op(EffectOp::CompleteOneTask)},
             {t(G::Incurrence, "Conscious"), t(G::Causes, "Time")}),
      action("A-FOUNDATION", "Solid foundations", "A clean architecture makes the next cleanup easy.",
             {remove_td(S::Chosen)}, {t(G::Architecture, "Prevents TD"), t(G::Architecture, "Hard to repay")}),
      action("A-ONBOARD", "Good onboarding", "A new colleague is productive from day one.",
             {op(EffectOp::CompleteOneTask)}, {t(G::Consequences, "Personnel")}),
      action("A-TALK", "Talk to the business", "Explaining debt in business terms earns support for quality.",
             {op(EffectOp::RevealOpponentTd), op(EffectOp::DoubleNextTicketUsers)},
             {t(G::Business, "Perspective")}),
      action("A-MONITOR", "Monitoring dashboard", "Metrics make the symptoms of debt visible.",
             {op(EffectOp::RevealOpponentTd), remove_td(S::InProgress)},
             {t(G::TdManagement, "Identifying TD"), t(G::Business, "Invisible")}),
      action("A-PAIR", "Pair programming", "Two developers at one keyboard finish a task cleanly.",
             {op(EffectOp::CompleteOneTask)}, {t(G::Repayment, "Benefits")}),
      action("A-ARCHREVIEW", "Architecture review", "The architects decide which debt matters most.",
             {remove_td(S::Chosen)}, {t(G::Architecture, "Prevents TD"), t(G::TdManagement, "Prioritizing TD")}),
  };
  return p;
}

inline std::shared_ptr<const ContentPack> default_pack() {
  static const auto pack = std::make_shared<const ContentPack>(make_default_pack());
  return pack;
}

}  // namespace techdebt
