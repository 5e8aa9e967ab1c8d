#include <gtest/gtest.h>

#include <set>

#include "fixtures.hpp"

namespace techdebt {
namespace {

using testing::count;
using testing::default_config;
using testing::place;
using testing::play_random;
using testing::roll;
constexpr ModuleId A = ModuleId::A;
constexpr ModuleId B = ModuleId::B;
constexpr ModuleId C = ModuleId::C;

GameState recorded_game(std::uint64_t seed, int moves) {
  GameState s = new_session(default_config(seed));
  Rng rng(seed * 31 + 7);
  play_random(s, rng, moves);
  return s;
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto nl = text.find('\n', pos);
    out.push_back(text.substr(pos, nl - pos));
    pos = nl + 1;
  }
  return out;
}

std::string join_lines(const std::vector<std::string>& lines) {
  std::string out;
  for (const auto& l : lines) out += l + "\n";
  return out;
}

// ---------------------------------------------------------------------------
// new_session

TEST(NewSession, SameConfigGivesIdenticalStates) {
  EXPECT_EQ(new_session(default_config(99)), new_session(default_config(99)));
}

TEST(NewSession, InitialState) {
  GameState s = new_session(default_config(5));
  EXPECT_EQ(s.round, 0);
  EXPECT_EQ(s.active_team, 0);
  EXPECT_EQ(s.phase, Phase::AwaitingMove);
  EXPECT_TRUE(s.log.empty());
  EXPECT_EQ(s.event_deck.size(), 20u);
  EXPECT_EQ(s.action_deck.size(), 12u);
  EXPECT_EQ(s.teams[0].feature_deck, s.teams[1].feature_deck);
  EXPECT_EQ(s.teams[0].feature_deck.size(), 12u);
  for (const auto& t : s.teams) {
    EXPECT_TRUE(t.hand.empty());
    EXPECT_EQ(t.users_banked, 0);
    for (ModuleId m : kModules) EXPECT_TRUE(t.column(m).placed.empty());
  }
}

// Two seeds produce the same deck order with probability 1/20! per deck, so
// over many seed pairs every pair should differ.
TEST(NewSession, DifferentSeedsShuffleDifferently) {
  int same = 0;
  for (std::uint64_t seed = 1; seed <= 200; ++seed) {
    auto a = new_session(default_config(seed));
    auto b = new_session(default_config(seed + 1000));
    same += a.event_deck == b.event_deck;
  }
  EXPECT_EQ(same, 0);
}

// Shuffle oracle: each card lands in each deck position roughly uniformly.
TEST(NewSession, ShuffleIsRoughlyUniform) {
  const int n = 20000;
  std::map<std::string, std::array<int, 20>> pos;
  for (int i = 0; i < n; ++i) {
    auto s = new_session(default_config(static_cast<std::uint64_t>(i) + 1));
    for (std::size_t k = 0; k < s.event_deck.size(); ++k) ++pos[s.event_deck[k]][k];
  }
  const double expected = n / 20.0;
  const double sd = std::sqrt(n * (1.0 / 20) * (19.0 / 20));
  for (const auto& [id, counts] : pos)
    for (int c : counts) EXPECT_LT(std::abs(c - expected), 5 * sd) << id;
}

TEST(NewSession, ConfigErrors) {
  auto c = default_config();
  c.teams.push_back({{"x", false}});
  try {
    new_session(c);
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_STREQ(e.what(), "exactly two teams");
  }
  c = default_config();
  c.teams[0].clear();
  EXPECT_THROW(new_session(c), ConfigError);
  c = default_config();
  c.teams[1] = std::vector<Seat>(5, {"x", false});
  EXPECT_THROW(new_session(c), ConfigError);
  c = default_config();
  c.max_rounds = 0;
  EXPECT_THROW(new_session(c), ConfigError);
  c = default_config();
  c.td_penalty = -1;
  EXPECT_THROW(new_session(c), ConfigError);
  c = default_config();
  c.pack = nullptr;
  EXPECT_THROW(new_session(c), ConfigError);
  auto broken = std::make_shared<ContentPack>(make_default_pack());
  broken->tickets[3].ticket.tasks_required = 0;
  c = make_config(broken, 1);
  EXPECT_THROW(new_session(c), ConfigError);
}

TEST(NewSession, RostersOfOneToFourAreAccepted) {
  for (int n = 1; n <= 4; ++n) {
    auto c = default_config();
    c.teams = {std::vector<Seat>(n, {"h", false}), std::vector<Seat>(5 - n, {"b", true})};
    EXPECT_NO_THROW(new_session(c)) << n;
  }
}

// ---------------------------------------------------------------------------
// submit_move

TEST(SubmitMove, InactiveTeamIsRejectedWithoutChange) {
  GameState s = new_session(default_config());
  GameState before = s;
  auto r = submit_move(s, 1, StartTicketMove{A});
  ASSERT_TRUE(r);
  EXPECT_EQ(r->code, RejectCode::NotYourTurn);
  EXPECT_EQ(to_string(r->code), "not_your_turn");
  EXPECT_EQ(s, before);
}

TEST(SubmitMove, LegalWorkGrowsLogByAtLeastTwo) {
  GameState s = new_session(default_config());
  ASSERT_FALSE(submit_move(s, 0, StartTicketMove{A}));
  ASSERT_FALSE(submit_move(s, 1, StartTicketMove{A}));
  std::size_t before = s.log.size();
  ASSERT_FALSE(submit_move(s, 0, WorkMove{A, {}}));
  ASSERT_GE(s.log.size(), before + 3);
  EXPECT_EQ(s.log[before].kind, EventKind::MoveAccepted);
  EXPECT_EQ(s.log[before + 1].kind, EventKind::DiceRolled);
  auto k = s.log[before + 2].kind;
  EXPECT_TRUE(k == EventKind::TaskCompleted || k == EventKind::NoProgress || k == EventKind::TdIncurred);
  EXPECT_EQ(s.active_team, 1);
}

TEST(SubmitMove, MoveAfterFinishIsGameOver) {
  auto c = default_config();
  c.max_rounds = 1;
  GameState s = new_session(c);
  ASSERT_FALSE(submit_move(s, 0, StartTicketMove{A}));
  ASSERT_FALSE(submit_move(s, 1, StartTicketMove{A}));
  ASSERT_EQ(s.phase, Phase::Finished);
  GameState before = s;
  auto r = submit_move(s, 0, WorkMove{A, {}});
  ASSERT_TRUE(r);
  EXPECT_EQ(r->code, RejectCode::GameOver);
  EXPECT_EQ(s, before);
}

TEST(SubmitMove, RejectionCodes) {
  GameState s = new_session(default_config());
  auto expect_code = [&](const Move& m, RejectCode code) {
    GameState before = s;
    auto r = submit_move(s, s.active_team, m);
    ASSERT_TRUE(r) << to_json(m).dump();
    EXPECT_EQ(r->code, code) << r->message;
    EXPECT_EQ(s, before);
  };
  expect_code(WorkMove{A, {}}, RejectCode::IllegalMove);
  expect_code(RepayMove{{A, 0, Digit(1)}}, RejectCode::IllegalMove);
  expect_code(PlayActionMove{"A-REFACTOR", {}}, RejectCode::IllegalMove);
  ASSERT_FALSE(submit_move(s, 0, StartTicketMove{A}));
  ASSERT_FALSE(submit_move(s, 1, StartTicketMove{B}));
  expect_code(StartTicketMove{A}, RejectCode::IllegalMove);
  // Architecture A prints {1,2}: 3 is unblocked, so declaring it is illegal.
  expect_code(WorkMove{A, {Digit(3)}}, RejectCode::IllegalIncur);
  expect_code(WorkMove{A, {Digit(1), Digit(1)}}, RejectCode::IllegalIncur);
  place(s, 0, C, TicketKind::Architecture, {2});
  s.active().hand.push_back("A-REFACTOR");
  expect_code(PlayActionMove{"A-REFACTOR", {}}, RejectCode::BindingRequired);
  expect_code(PlayActionMove{"A-REFACTOR", {std::nullopt, RepaymentTarget{C, 0, Digit(4)}, std::nullopt}},
              RejectCode::InvalidBinding);
}

TEST(SubmitMove, TurnsAlternateAndRoundsAdvance) {
  GameState s = new_session(default_config());
  ASSERT_FALSE(submit_move(s, 0, StartTicketMove{A}));
  EXPECT_EQ(s.active_team, 1);
  EXPECT_EQ(s.round, 0);
  ASSERT_FALSE(submit_move(s, 1, StartTicketMove{A}));
  EXPECT_EQ(s.active_team, 0);
  EXPECT_EQ(s.round, 1);
}

TEST(SubmitMove, PendingSkipPassesTheTurnBack) {
  GameState s = new_session(default_config());
  s.teams[1].skip_turns_pending = 1;
  ASSERT_FALSE(submit_move(s, 0, StartTicketMove{A}));
  EXPECT_EQ(s.active_team, 0);
  EXPECT_EQ(s.round, 1);
  EXPECT_EQ(s.teams[1].skip_turns_pending, 0);
  ASSERT_EQ(count(s, EventKind::TurnSkipped), 1);
  EXPECT_EQ(testing::last(s, EventKind::TurnSkipped)->team, 1);
}

TEST(SubmitMove, NonConsumingActionKeepsTheTurn) {
  GameState s = new_session(default_config());
  place(s, 0, A, TicketKind::Feature, {3});
  s.teams[0].hand = {"A-SPECIALIST"};
  s.forced_rolls.push_back(roll(6, 1));
  Bindings b;
  b.target = RepaymentTarget{A, 0, Digit(3)};
  ASSERT_FALSE(submit_move(s, 0, PlayActionMove{"A-SPECIALIST", b}));
  EXPECT_EQ(s.active_team, 0);
  EXPECT_EQ(s.round, 0);
  EXPECT_TRUE(s.teams[0].column(A).placed[0].td.empty());
  ASSERT_FALSE(submit_move(s, 0, StartTicketMove{B}));
  EXPECT_EQ(s.active_team, 1);
}

TEST(SubmitMove, TemporaryBlocksExpireWithRounds) {
  GameState s = new_session(default_config());
  s.teams[0].temp_blocked[4] = 2;
  ASSERT_FALSE(submit_move(s, 0, StartTicketMove{A}));
  EXPECT_EQ(s.teams[0].temp_blocked[4], 2);
  ASSERT_FALSE(submit_move(s, 1, StartTicketMove{A}));
  EXPECT_EQ(s.teams[0].temp_blocked[4], 1);
  ASSERT_FALSE(submit_move(s, 0, StartTicketMove{B}));
  ASSERT_FALSE(submit_move(s, 1, StartTicketMove{B}));
  EXPECT_EQ(s.teams[0].temp_blocked[4], 0);
}

// Candidate generator covering legal and illegal moves alike.
Move random_candidate(const GameState& s, Rng& rng) {
  auto module = [&] { return module_at(static_cast<int>(rng.below(3))); };
  auto digit = [&] { return Digit(static_cast<int>(rng.below(6)) + 1); };
  auto target = [&] { return RepaymentTarget{module(), static_cast<int>(rng.below(4)), digit()}; };
  switch (rng.below(4)) {
    case 0: {
      WorkMove w{module(), {}};
      for (int i = 0, n = static_cast<int>(rng.below(3)); i < n; ++i) w.incur.push_back(digit());
      return w;
    }
    case 1: return RepayMove{target()};
    case 2: {
      const auto& cards = s.pack().action_cards;
      PlayActionMove p{rng.below(4) == 0 ? cards[rng.below(cards.size())].id
                       : s.active().hand.empty() ? "A-PAIR"
                                                 : s.active().hand[rng.below(s.active().hand.size())],
                       {}};
      if (rng.below(2)) p.bindings.target = target();
      if (rng.below(2)) p.bindings.module = module();
      if (rng.below(2)) p.bindings.digit = digit();
      return p;
    }
    default: return StartTicketMove{module()};
  }
}

// Exactly one of {state change, rejection}; accepted moves conform to the
// canonical list; the active team alternates unless the move kept the turn.
TEST(SubmitMoveProperty, ChangeXorRejection) {
  Rng rng(4242);
  int accepted = 0, rejected = 0;
  for (int game = 0; game < 60; ++game) {
    GameState s = new_session(default_config(static_cast<std::uint64_t>(game) + 1));
    Policy p = random_policy();
    while (s.phase == Phase::AwaitingMove) {
      for (int k = 0; k < 4 && s.phase == Phase::AwaitingMove; ++k) {
        Move m = random_candidate(s, rng);
        int team = rng.below(8) == 0 ? 1 - s.active_team : s.active_team;
        GameState before = s;
        auto legal = legal_moves(before);
        auto r = submit_move(s, team, m);
        if (r) {
          EXPECT_EQ(s, before);
          ++rejected;
        } else {
          ++accepted;
          EXPECT_NE(s, before);
          EXPECT_GT(s.log.size(), before.log.size());
          EXPECT_TRUE(conforms(m, legal)) << to_json(m).dump();
          EXPECT_EQ(team, before.active_team);
        }
      }
      if (s.phase != Phase::AwaitingMove) break;
      auto legal = legal_moves(s);
      Move m = p.decide(s, legal, rng);
      GameState before = s;
      ASSERT_FALSE(submit_move(s, s.active_team, m));
      ++accepted;
      bool kept = false;
      if (auto* pa = std::get_if<PlayActionMove>(&m)) kept = !s.pack().card(pa->card_id).consumes_turn;
      if (s.phase == Phase::AwaitingMove) {
        bool skipped = count(s, EventKind::TurnSkipped) > count(before, EventKind::TurnSkipped);
        if (kept) {
          EXPECT_EQ(s.active_team, before.active_team);
        } else if (!skipped) {
          EXPECT_NE(s.active_team, before.active_team);
        }
        int rotations = 0;
        for (std::size_t i = before.log.size(); i < s.log.size(); ++i)
          rotations += s.log[i].kind == EventKind::TurnSkipped;
        EXPECT_LE(s.round - before.round, 1 + rotations);
        EXPECT_GE(s.round, before.round);
      }
    }
  }
  EXPECT_GT(accepted, 1000);
  EXPECT_GT(rejected, 1000);
}

// The canonical list is closed: every entry, once bound, is accepted.
TEST(SubmitMoveProperty, EveryCanonicalMoveIsAccepted) {
  Rng rng(9);
  int checked = 0;
  for (int game = 0; game < 40; ++game) {
    GameState s = new_session(default_config(static_cast<std::uint64_t>(game) + 500));
    while (s.phase == Phase::AwaitingMove) {
      auto legal = legal_moves(s);
      ASSERT_FALSE(legal.empty());
      for (Move m : legal) {
        if (auto* p = std::get_if<PlayActionMove>(&m)) p->bindings = random_bind(s, s.pack().card(p->card_id), rng);
        GameState trial = s;
        auto r = submit_move(trial, trial.active_team, m);
        EXPECT_FALSE(r) << to_json(m).dump() << " " << (r ? r->message : "");
        ++checked;
      }
      play_random(s, rng, 1);
    }
  }
  EXPECT_GT(checked, 5000);
}

TEST(SubmitMoveProperty, RoundsAdvanceOncePerTeamPair) {
  GameState s = new_session(default_config(3));
  Rng rng(3);
  int team1_moves = 0, skips_of_team1 = 0;
  while (s.phase == Phase::AwaitingMove) {
    int mover = s.active_team;
    std::size_t before = s.log.size();
    auto legal = legal_moves(s);
    Move m = random_policy().decide(s, legal, rng);
    bool consumes = true;
    if (auto* p = std::get_if<PlayActionMove>(&m)) consumes = s.pack().card(p->card_id).consumes_turn;
    ASSERT_FALSE(submit_move(s, mover, m));
    if (mover == 1 && consumes) ++team1_moves;
    for (std::size_t i = before; i < s.log.size(); ++i)
      if (s.log[i].kind == EventKind::TurnSkipped && s.log[i].team == 1) ++skips_of_team1;
  }
  EXPECT_EQ(s.round, team1_moves + skips_of_team1);
}

// ---------------------------------------------------------------------------
// Game end

TEST(GameEnd, RoundLimitFixture) {
  auto c = default_config(17);
  c.max_rounds = 3;
  GameState s = new_session(c);
  Rng rng(17);
  play_random(s, rng, 1000);
  ASSERT_EQ(s.phase, Phase::Finished);
  EXPECT_EQ(s.end_reason, EndReason::RoundLimit);
  EXPECT_EQ(s.round, 3);
  ASSERT_EQ(s.log.back().kind, EventKind::GameEnded);
  EXPECT_EQ(s.log.back().detail, "round limit");
  EXPECT_EQ(count(s, EventKind::ScoreTallied), 2);
  auto sc = final_score(s);
  EXPECT_EQ(sc[0], score_of(s, s.teams[0]));
}

TEST(GameEnd, ModulesCompleteFixture) {
  GameState s = new_session(default_config());
  TeamState& t = s.teams[0];
  for (ModuleId m : {A, B})
    for (std::size_t i = 0; i < 4; ++i)
      place(s, 0, m, i == 0 ? TicketKind::Architecture : TicketKind::Feature, {}, i == 0 ? 0 : 2);
  for (std::size_t i = 0; i < 3; ++i)
    place(s, 0, C, i == 0 ? TicketKind::Architecture : TicketKind::Feature, {}, i == 0 ? 0 : 2);
  t.users_banked = 16;
  t.column(C).in_progress = testing::make_ticket("LAST", TicketKind::Feature, 1, {}, 5);
  s.forced_rolls.push_back(roll(1, 2));
  ASSERT_FALSE(submit_move(s, 0, WorkMove{C, {}}));
  ASSERT_EQ(s.phase, Phase::Finished);
  EXPECT_EQ(s.end_reason, EndReason::ModulesComplete);
  EXPECT_EQ(s.log.back().detail, "modules complete");
  EXPECT_EQ(final_score(s)[0], 21);
  EXPECT_EQ(winner(s), 0);
  EXPECT_EQ(s.round, 0);
}

TEST(GameEnd, ClockExpiryEndsUnderRoundLimitRule) {
  GameState s = new_session(default_config());
  ASSERT_FALSE(submit_move(s, 0, StartTicketMove{A}));
  expire_clock(s);
  ASSERT_EQ(s.phase, Phase::Finished);
  EXPECT_EQ(s.end_reason, EndReason::RoundLimit);
  EXPECT_EQ(s.config.max_rounds, 60);
  EXPECT_EQ(count(s, EventKind::ClockExpired), 1);
  std::size_t n = s.log.size();
  expire_clock(s);
  EXPECT_EQ(s.log.size(), n);
}

TEST(GameEnd, UnfinishedGameHasNoScore) {
  GameState s = new_session(default_config());
  EXPECT_THROW(final_score(s), RuleError);
}

// ---------------------------------------------------------------------------
// Replay

TEST(Replay, RandomGameRoundTripsBitExact) {
  GameState s = recorded_game(11, 200);
  ASSERT_GT(s.log.size(), 400u);
  std::string text = write_replay(make_replay(s));
  ReplayFile f = read_replay(text);
  EXPECT_EQ(f, make_replay(s));
  GameState r = replay(f);
  EXPECT_EQ(r.log, s.log);
  EXPECT_EQ(r, s);
  EXPECT_EQ(write_replay(make_replay(r)), text);
}

TEST(Replay, ManyGamesRoundTrip) {
  for (std::uint64_t seed = 100; seed < 130; ++seed) {
    GameState s = recorded_game(seed, 100000);
    ASSERT_EQ(s.phase, Phase::Finished);
    GameState r = replay(read_replay(write_replay(make_replay(s))));
    EXPECT_EQ(r, s) << seed;
  }
}

TEST(Replay, ClockExpiryIsReplayed) {
  GameState s = recorded_game(12, 30);
  expire_clock(s);
  GameState r = replay(read_replay(write_replay(make_replay(s))));
  EXPECT_EQ(r, s);
}

TEST(Replay, TamperedDiceAtEventSevenIsReported) {
  std::uint64_t seed = 1;
  GameState s;
  for (;; ++seed) {
    s = recorded_game(seed, 200);
    if (s.log.size() > 7 && s.log[7].kind == EventKind::DiceRolled) break;
    ASSERT_LT(seed, 500u);
  }
  auto lines = lines_of(write_replay(make_replay(s)));
  Json ev = Json::parse(lines[8]);
  ASSERT_EQ(ev["kind"], "DiceRolled");
  int a = ev["roll"][0].get<int>();
  ev["roll"][0] = a % 6 + 1;
  lines[8] = ev.dump();
  ReplayFile f = read_replay(join_lines(lines));
  try {
    replay(f);
    FAIL() << "tampered replay accepted";
  } catch (const ReplayError& e) {
    ASSERT_TRUE(e.index());
    EXPECT_EQ(*e.index(), 7u);
    EXPECT_NE(std::string(e.what()).find("event 7"), std::string::npos);
  }
}

TEST(Replay, TamperedMoveIsReported) {
  GameState s = recorded_game(21, 50);
  ReplayFile f = make_replay(s);
  std::size_t k = 0;
  while (f.events[k].kind != EventKind::MoveAccepted || !std::holds_alternative<StartTicketMove>(*f.events[k].move))
    ++k;
  f.events[k].team = 1 - f.events[k].team;
  try {
    replay(f);
    FAIL();
  } catch (const ReplayError& e) {
    EXPECT_EQ(e.index(), k);
  }
}

TEST(Replay, TruncatedRecordingIsReported) {
  GameState s = recorded_game(22, 100000);
  ReplayFile f = make_replay(s);
  f.events.pop_back();
  try {
    replay(f);
    FAIL();
  } catch (const ReplayError& e) {
    EXPECT_EQ(e.index(), f.events.size());
  }
}

TEST(Replay, DerivedEventWhereInputExpectedIsReported) {
  GameState s = recorded_game(23, 20);
  ReplayFile f = make_replay(s);
  f.events.erase(f.events.begin());
  EXPECT_THROW(replay(f), ReplayError);
}

TEST(Replay, EmptyMoveListGivesInitialState) {
  GameState fresh = new_session(default_config(8));
  std::string text = write_replay(make_replay(fresh));
  EXPECT_EQ(lines_of(text).size(), 1u);
  EXPECT_EQ(replay(read_replay(text)), fresh);
}

TEST(Replay, UnreadableFiles) {
  EXPECT_THROW(read_replay(""), ReplayError);
  EXPECT_THROW(read_replay("\n\n"), ReplayError);
  EXPECT_THROW(read_replay("not json\n"), ReplayError);
  EXPECT_THROW(read_replay("{\"format\":\"other\",\"version\":1}\n"), ReplayError);

  GameState s = recorded_game(5, 10);
  auto lines = lines_of(write_replay(make_replay(s)));
  Json h = Json::parse(lines[0]);
  h["version"] = 99;
  auto bad = lines;
  bad[0] = h.dump();
  EXPECT_THROW(read_replay(join_lines(bad)), ReplayError);

  bad = lines;
  bad[4] = "{\"seq\":3}";
  try {
    read_replay(join_lines(bad));
    FAIL();
  } catch (const ReplayError& e) {
    EXPECT_EQ(e.index(), 3u);
  }
}

TEST(Replay, UnknownPackIsReported) {
  GameState s = recorded_game(6, 10);
  ReplayFile f = make_replay(s);
  f.header.pack_version = "9.9.9";
  EXPECT_THROW(replay(f), ReplayError);
}

// ---------------------------------------------------------------------------
// Aha exposure

TEST(AhaExposure, FreshGameIsAllZeros) {
  auto c = aha_exposure(new_session(default_config()));
  for (int v : c) EXPECT_EQ(v, 0);
}

TEST(AhaExposure, ForcedDoubleEmitsUnconscious) {
  GameState s = testing::with_ticket({});
  s.forced_rolls.push_back(roll(3, 3));
  ASSERT_FALSE(submit_move(s, 0, WorkMove{A, {}}));
  auto c = aha_exposure(s);
  EXPECT_GE(c[aha::kUnconscious.row()], 1);
  EXPECT_EQ(c[aha::kConscious.row()], 0);
  EXPECT_EQ(aha_exposure(s, 0), c);
  for (int v : aha_exposure(s, 1)) EXPECT_EQ(v, 0);
}

TEST(AhaExposure, CountsEqualTagsInLog) {
  GameState s = recorded_game(31, 100000);
  AhaCounts expected{};
  for (const auto& e : s.log)
    for (AhaTag t : e.tags) ++expected[t.row()];
  EXPECT_EQ(aha_exposure(s), expected);
  auto t0 = aha_exposure(s, 0), t1 = aha_exposure(s, 1);
  for (std::size_t i = 0; i < kAhaCount; ++i) EXPECT_EQ(t0[i] + t1[i], expected[i]);
}

// ---------------------------------------------------------------------------
// Wire forms

TEST(Serialize, EventsRoundTrip) {
  GameState s = recorded_game(41, 100000);
  std::set<EventKind> kinds;
  for (const auto& e : s.log) {
    EXPECT_EQ(event_from_json(to_json(e)), e);
    kinds.insert(e.kind);
  }
  EXPECT_GE(kinds.size(), 12u);
}

TEST(Serialize, MovesRoundTrip) {
  std::vector<Move> moves{
      WorkMove{C, {Digit(1), Digit(6)}},
      WorkMove{A, {}},
      RepayMove{{B, 2, Digit(4)}},
      PlayActionMove{"A-QUICKFIX", {A, std::nullopt, Digit(5)}},
      PlayActionMove{"A-REFACTOR", {std::nullopt, RepaymentTarget{C, 1, Digit(2)}, std::nullopt}},
      StartTicketMove{B},
  };
  for (const auto& m : moves) EXPECT_EQ(move_from_json(to_json(m)), m);
  EXPECT_EQ(to_json(moves[0]).dump(), R"({"type":"work","module":"C","incur":[1,6]})");
  EXPECT_EQ(move_from_json(Json::parse(R"({"type":"work","module":"B"})")), Move(WorkMove{B, {}}));
}

TEST(Serialize, MalformedMovesThrow) {
  for (const char* text : {R"({})", R"({"type":"fly"})", R"({"type":"work"})", R"({"type":"work","module":"Q"})",
                           R"({"type":"work","module":"A","incur":[7]})", R"({"type":"work","module":"A","incur":3})",
                           R"({"type":"repay","target":{"module":"A","ticket":0}})", R"({"type":"play_action"})",
                           R"({"type":"play_action","card":1})", R"({"type":3})", R"([])"})
    EXPECT_THROW(move_from_json(Json::parse(text)), ParseError) << text;
}

}  // namespace
}  // namespace techdebt
