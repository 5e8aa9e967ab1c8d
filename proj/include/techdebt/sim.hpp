#pragma once

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <numeric>
#include <span>
#include <thread>

#include "techdebt/policy.hpp"
#include "techdebt/session.hpp"

namespace techdebt {

class IllegalPolicyMove : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Plays one game between two policies. Throws IllegalPolicyMove if either
// policy ever proposes a move the engine rejects.
inline GameState play_game(const Policy& team0, const Policy& team1, const SessionConfig& config) {
  GameState s = new_session(config);
  std::array<Rng, 2> rngs{Rng(mix_seed(config.seed ^ 0xA5A5A5A5ull)), Rng(mix_seed(config.seed ^ 0x5A5A5A5Aull))};
  const std::array<const Policy*, 2> policies{&team0, &team1};
  while (s.phase == Phase::AwaitingMove) {
    const int t = s.active_team;
    auto legal = legal_moves(s);
    Move m = policies[t]->decide(s, legal, rngs[t]);
    if (!conforms(m, legal)) throw IllegalPolicyMove(policies[t]->name + " chose a move outside the legal set");
    if (auto r = submit_move(s, t, m))
      throw IllegalPolicyMove(policies[t]->name + " chose an illegal move: " + r->message);
  }
  return s;
}

// Round (1-based count) in which the team placed its first ticket, or
// max_rounds when it never did.
inline int rounds_to_first_ticket(const GameState& s, int team) {
  for (const auto& e : s.log)
    if (e.kind == EventKind::TicketCompleted && e.team == team) return e.round + 1;
  return s.config.max_rounds;
}

struct GameRecord {
  std::uint64_t seed = 0;
  bool swapped = false;  // policy_b moved first
  std::array<int, 2> score{};  // [policy_a, policy_b]
  std::array<int, 2> unrepaid{};
  std::array<int, 2> first_ticket{};
  int rounds = 0;
  EndReason end = EndReason::RoundLimit;
  int winner = -1;  // 0 = policy_a, 1 = policy_b, -1 = draw
  friend bool operator==(const GameRecord&, const GameRecord&) = default;
};

struct PolicySummary {
  std::string policy;
  int n = 0;
  double mean_score = 0;
  double sd_score = 0;
  double mean_unrepaid_td = 0;
  double mean_rounds_to_first_ticket = 0;
  int wins = 0;
  int draws = 0;
  int losses = 0;
  double win_rate = 0;
  AhaCounts aha{};
  friend bool operator==(const PolicySummary&, const PolicySummary&) = default;
};

struct ExperimentResult {
  std::string policy_a;
  std::string policy_b;
  int n = 0;
  std::uint64_t base_seed = 0;
  std::string pack_name;
  std::string pack_version;
  int max_rounds = 0;
  int td_penalty = 0;
  std::array<PolicySummary, 2> summary;
  std::vector<GameRecord> games;
  friend bool operator==(const ExperimentResult&, const ExperimentResult&) = default;
};

inline double mean(std::span<const double> xs) {
  if (xs.empty()) return 0;
  return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

inline double stddev(std::span<const double> xs) {
  if (xs.size() < 2) return 0;
  double m = mean(xs), acc = 0;
  for (double x : xs) acc += (x - m) * (x - m);
  return std::sqrt(acc / static_cast<double>(xs.size() - 1));
}

// Per-game series for one side (0 = policy_a, 1 = policy_b).
enum class Metric { Score, Unrepaid, FirstTicket };

inline std::vector<double> series(const ExperimentResult& r, int side, Metric m) {
  std::vector<double> out;
  out.reserve(r.games.size());
  for (const auto& g : r.games) {
    switch (m) {
      case Metric::Score: out.push_back(g.score[side]); break;
      case Metric::Unrepaid: out.push_back(g.unrepaid[side]); break;
      case Metric::FirstTicket: out.push_back(g.first_ticket[side]); break;
    }
  }
  return out;
}

// Fills the summary statistics from the game records; aha histograms are
// left as they are since they come from the logs.
inline void summarize(ExperimentResult& r) {
  for (int side = 0; side < 2; ++side) {
    PolicySummary& s = r.summary[side];
    s.policy = side == 0 ? r.policy_a : r.policy_b;
    s.n = static_cast<int>(r.games.size());
    auto scores = series(r, side, Metric::Score);
    auto unrepaid = series(r, side, Metric::Unrepaid);
    auto first = series(r, side, Metric::FirstTicket);
    s.mean_score = mean(scores);
    s.sd_score = stddev(scores);
    s.mean_unrepaid_td = mean(unrepaid);
    s.mean_rounds_to_first_ticket = mean(first);
    s.wins = s.draws = s.losses = 0;
    for (const auto& g : r.games) {
      if (g.winner == -1)
        ++s.draws;
      else if (g.winner == side)
        ++s.wins;
      else
        ++s.losses;
    }
    s.win_rate = s.n ? static_cast<double>(s.wins) / s.n : 0;
  }
}

struct ExperimentOptions {
  unsigned threads = 0;  // 0 = hardware concurrency
  std::optional<std::filesystem::path> replay_dir;
};

inline std::string replay_file_name(std::uint64_t seed) { return "game-" + std::to_string(seed) + ".jsonl"; }

// n games with seeds base_seed .. base_seed + n - 1. Odd-indexed games swap
// seats so that neither policy always moves first.
inline ExperimentResult run_experiment(const Policy& a, const Policy& b, int n, std::uint64_t base_seed,
                                       const SessionConfig& base, const ExperimentOptions& opts = {}) {
  if (n < 1) throw ConfigError("n must be at least 1");
  validate_config(base);
  ExperimentResult r;
  r.policy_a = a.name;
  r.policy_b = b.name;
  r.n = n;
  r.base_seed = base_seed;
  r.pack_name = base.pack->name;
  r.pack_version = base.pack->version;
  r.max_rounds = base.max_rounds;
  r.td_penalty = base.td_penalty;
  r.games.resize(n);
  std::vector<std::array<AhaCounts, 2>> aha(n);
  if (opts.replay_dir) std::filesystem::create_directories(*opts.replay_dir);

  std::atomic<int> next{0};
  std::mutex error_mu;
  std::exception_ptr error;
  auto worker = [&] {
    for (int i = next++; i < n; i = next++) {
      try {
        SessionConfig c = base;
        c.seed = base_seed + static_cast<std::uint64_t>(i);
        const bool swapped = i % 2 == 1;
        GameState s = swapped ? play_game(b, a, c) : play_game(a, b, c);
        auto scores = final_score(s);
        GameRecord& g = r.games[i];
        g.seed = c.seed;
        g.swapped = swapped;
        for (int side = 0; side < 2; ++side) {
          int team = swapped ? 1 - side : side;
          g.score[side] = scores[team];
          g.unrepaid[side] = s.teams[team].unrepaid_td();
          g.first_ticket[side] = rounds_to_first_ticket(s, team);
          aha[i][side] = aha_exposure(s, team);
        }
        g.rounds = s.round;
        g.end = *s.end_reason;
        int w = winner(s);
        g.winner = w == -1 ? -1 : (swapped ? 1 - w : w);
        if (opts.replay_dir) {
          std::ofstream out(*opts.replay_dir / replay_file_name(c.seed), std::ios::binary);
          out << write_replay(make_replay(s));
          if (!out) throw std::runtime_error("cannot write replay for seed " + std::to_string(c.seed));
        }
      } catch (...) {
        std::lock_guard lock(error_mu);
        if (!error) error = std::current_exception();
        next = n;
      }
    }
  };
  unsigned threads = opts.threads ? opts.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(n));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);

  for (int side = 0; side < 2; ++side)
    for (const auto& h : aha)
      for (std::size_t k = 0; k < kAhaCount; ++k) r.summary[side].aha[k] += h[side][k];
  summarize(r);
  return r;
}

// Two-sample bootstrap for the claim mean(a) < mean(b).
struct BootstrapResult {
  double mean_diff = 0;     // mean(a) - mean(b)
  double p_not_less = 1;    // share of resampled differences >= 0
  double upper_99 = 0;      // 99th percentile of resampled differences
  bool holds_at_99() const { return p_not_less < 0.01; }
};

inline BootstrapResult bootstrap_mean_less(std::span<const double> a, std::span<const double> b, int resamples,
                                           std::uint64_t seed) {
  BootstrapResult out;
  out.mean_diff = mean(a) - mean(b);
  if (a.empty() || b.empty() || resamples < 1) return out;
  Rng rng(seed);
  std::vector<double> diffs(resamples);
  int not_less = 0;
  for (int k = 0; k < resamples; ++k) {
    double sa = 0, sb = 0;
    for (std::size_t i = 0; i < a.size(); ++i) sa += a[rng.below(a.size())];
    for (std::size_t i = 0; i < b.size(); ++i) sb += b[rng.below(b.size())];
    diffs[k] = sa / static_cast<double>(a.size()) - sb / static_cast<double>(b.size());
    not_less += diffs[k] >= 0;
  }
  std::sort(diffs.begin(), diffs.end());
  out.p_not_less = static_cast<double>(not_less) / resamples;
  out.upper_99 = diffs[std::min<std::size_t>(diffs.size() - 1, static_cast<std::size_t>(0.99 * resamples))];
  return out;
}

// ---------------------------------------------------------------------------
// Export

enum class ExportFormat { Csv, Json };

namespace export_detail {

inline std::string num(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline double to_double(const std::string& s) {
  double v = 0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc()) throw ParseError("bad number '" + s + "'");
  return v;
}

inline long long to_int(const std::string& s) {
  long long v = 0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) throw ParseError("bad integer '" + s + "'");
  return v;
}

inline std::uint64_t to_u64(const std::string& s) {
  std::uint64_t v = 0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) throw ParseError("bad integer '" + s + "'");
  return v;
}

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

inline std::vector<std::string> csv_split(const std::string& line) {
  std::vector<std::string> out(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        out.back() += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        out.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.emplace_back();
    } else {
      out.back() += c;
    }
  }
  return out;
}

struct Row {
  std::string section, index, policy, key, value;
};

inline std::vector<Row> rows(const ExperimentResult& r) {
  std::vector<Row> out;
  auto meta = [&](std::string k, std::string v) { out.push_back({"meta", "", "", std::move(k), std::move(v)}); };
  meta("policy_a", r.policy_a);
  meta("policy_b", r.policy_b);
  meta("n", std::to_string(r.n));
  meta("base_seed", std::to_string(r.base_seed));
  meta("pack_name", r.pack_name);
  meta("pack_version", r.pack_version);
  meta("max_rounds", std::to_string(r.max_rounds));
  meta("td_penalty", std::to_string(r.td_penalty));
  for (const auto& s : r.summary) {
    auto add = [&](std::string k, std::string v) { out.push_back({"summary", "", s.policy, std::move(k), std::move(v)}); };
    add("n", std::to_string(s.n));
    add("mean_score", num(s.mean_score));
    add("sd_score", num(s.sd_score));
    add("mean_unrepaid_td", num(s.mean_unrepaid_td));
    add("mean_rounds_to_first_ticket", num(s.mean_rounds_to_first_ticket));
    add("wins", std::to_string(s.wins));
    add("draws", std::to_string(s.draws));
    add("losses", std::to_string(s.losses));
    add("win_rate", num(s.win_rate));
  }
  for (const auto& s : r.summary)
    for (std::size_t k = 0; k < kAhaCount; ++k)
      out.push_back({"aha", "", s.policy, AhaTag::at(k).key(), std::to_string(s.aha[k])});
  for (std::size_t i = 0; i < r.games.size(); ++i) {
    const auto& g = r.games[i];
    std::string idx = std::to_string(i);
    auto add = [&](std::string k, std::string v) { out.push_back({"game", idx, "", std::move(k), std::move(v)}); };
    add("seed", std::to_string(g.seed));
    add("swapped", g.swapped ? "1" : "0");
    add("score_a", std::to_string(g.score[0]));
    add("score_b", std::to_string(g.score[1]));
    add("unrepaid_a", std::to_string(g.unrepaid[0]));
    add("unrepaid_b", std::to_string(g.unrepaid[1]));
    add("first_ticket_a", std::to_string(g.first_ticket[0]));
    add("first_ticket_b", std::to_string(g.first_ticket[1]));
    add("rounds", std::to_string(g.rounds));
    add("end", g.end == EndReason::RoundLimit ? "round_limit" : "modules_complete");
    add("winner", std::to_string(g.winner));
  }
  return out;
}

inline ExperimentResult from_rows(const std::vector<Row>& rs) {
  ExperimentResult r;
  int summary_seen = 0;
  int aha_rows = 0;
  for (const auto& row : rs) {
    if (row.section == "meta") {
      if (row.key == "policy_a") r.policy_a = row.value;
      else if (row.key == "policy_b") r.policy_b = row.value;
      else if (row.key == "n") r.n = static_cast<int>(to_int(row.value));
      else if (row.key == "base_seed") r.base_seed = to_u64(row.value);
      else if (row.key == "pack_name") r.pack_name = row.value;
      else if (row.key == "pack_version") r.pack_version = row.value;
      else if (row.key == "max_rounds") r.max_rounds = static_cast<int>(to_int(row.value));
      else if (row.key == "td_penalty") r.td_penalty = static_cast<int>(to_int(row.value));
    } else if (row.section == "summary") {
      if (row.key == "n") ++summary_seen;
      if (summary_seen < 1 || summary_seen > 2) throw ParseError("summary rows must start with n");
      PolicySummary& s = r.summary[summary_seen - 1];
      s.policy = row.policy;
      if (row.key == "n") s.n = static_cast<int>(to_int(row.value));
      else if (row.key == "mean_score") s.mean_score = to_double(row.value);
      else if (row.key == "sd_score") s.sd_score = to_double(row.value);
      else if (row.key == "mean_unrepaid_td") s.mean_unrepaid_td = to_double(row.value);
      else if (row.key == "mean_rounds_to_first_ticket") s.mean_rounds_to_first_ticket = to_double(row.value);
      else if (row.key == "wins") s.wins = static_cast<int>(to_int(row.value));
      else if (row.key == "draws") s.draws = static_cast<int>(to_int(row.value));
      else if (row.key == "losses") s.losses = static_cast<int>(to_int(row.value));
      else if (row.key == "win_rate") s.win_rate = to_double(row.value);
    } else if (row.section == "aha") {
      int side = aha_rows < static_cast<int>(kAhaCount) ? 0 : 1;
      auto tag = AhaTag::parse(row.key);
      if (!tag) throw ParseError("unknown aha tag '" + row.key + "'");
      r.summary[side].aha[tag->row()] = static_cast<int>(to_int(row.value));
      ++aha_rows;
    } else if (row.section == "game") {
      std::size_t i = static_cast<std::size_t>(to_int(row.index));
      if (i >= r.games.size()) r.games.resize(i + 1);
      GameRecord& g = r.games[i];
      if (row.key == "seed") g.seed = to_u64(row.value);
      else if (row.key == "swapped") g.swapped = row.value == "1";
      else if (row.key == "score_a") g.score[0] = static_cast<int>(to_int(row.value));
      else if (row.key == "score_b") g.score[1] = static_cast<int>(to_int(row.value));
      else if (row.key == "unrepaid_a") g.unrepaid[0] = static_cast<int>(to_int(row.value));
      else if (row.key == "unrepaid_b") g.unrepaid[1] = static_cast<int>(to_int(row.value));
      else if (row.key == "first_ticket_a") g.first_ticket[0] = static_cast<int>(to_int(row.value));
      else if (row.key == "first_ticket_b") g.first_ticket[1] = static_cast<int>(to_int(row.value));
      else if (row.key == "rounds") g.rounds = static_cast<int>(to_int(row.value));
      else if (row.key == "end") g.end = row.value == "round_limit" ? EndReason::RoundLimit : EndReason::ModulesComplete;
      else if (row.key == "winner") g.winner = static_cast<int>(to_int(row.value));
    } else {
      throw ParseError("unknown section '" + row.section + "'");
    }
  }
  return r;
}

}  // namespace export_detail

inline constexpr std::string_view kCsvHeader = "section,index,policy,key,value";

// CSV is long-format with the fixed columns section,index,policy,key,value.
// JSON carries the same rows grouped by section.
inline std::string export_results(const ExperimentResult& r, ExportFormat format) {
  using namespace export_detail;
  auto rs = rows(r);
  if (format == ExportFormat::Csv) {
    std::string out(kCsvHeader);
    out += '\n';
    for (const auto& row : rs)
      out += csv_field(row.section) + ',' + row.index + ',' + csv_field(row.policy) + ',' + csv_field(row.key) + ',' +
             csv_field(row.value) + '\n';
    return out;
  }
  Json j;
  j["format"] = "techdebt-experiment";
  j["version"] = 1;
  Json meta = Json::object(), summary = Json::array(), aha = Json::array(), games = Json::array();
  meta["policy_a"] = r.policy_a;
  meta["policy_b"] = r.policy_b;
  meta["n"] = r.n;
  meta["base_seed"] = r.base_seed;
  meta["pack_name"] = r.pack_name;
  meta["pack_version"] = r.pack_version;
  meta["max_rounds"] = r.max_rounds;
  meta["td_penalty"] = r.td_penalty;
  for (const auto& s : r.summary) {
    summary.push_back(Json{{"policy", s.policy},
                           {"n", s.n},
                           {"mean_score", s.mean_score},
                           {"sd_score", s.sd_score},
                           {"mean_unrepaid_td", s.mean_unrepaid_td},
                           {"mean_rounds_to_first_ticket", s.mean_rounds_to_first_ticket},
                           {"wins", s.wins},
                           {"draws", s.draws},
                           {"losses", s.losses},
                           {"win_rate", s.win_rate}});
    Json counts = Json::object();
    for (std::size_t k = 0; k < kAhaCount; ++k) counts[AhaTag::at(k).key()] = s.aha[k];
    aha.push_back(Json{{"policy", s.policy}, {"counts", counts}});
  }
  for (const auto& g : r.games)
    games.push_back(Json{{"seed", g.seed},
                         {"swapped", g.swapped},
                         {"score_a", g.score[0]},
                         {"score_b", g.score[1]},
                         {"unrepaid_a", g.unrepaid[0]},
                         {"unrepaid_b", g.unrepaid[1]},
                         {"first_ticket_a", g.first_ticket[0]},
                         {"first_ticket_b", g.first_ticket[1]},
                         {"rounds", g.rounds},
                         {"end", g.end == EndReason::RoundLimit ? "round_limit" : "modules_complete"},
                         {"winner", g.winner}});
  j["meta"] = meta;
  j["summary"] = summary;
  j["aha"] = aha;
  j["games"] = games;
  return j.dump(2) + "\n";
}

inline ExperimentResult parse_results(std::string_view doc, ExportFormat format) {
  using namespace export_detail;
  if (format == ExportFormat::Csv) {
    std::istringstream in{std::string(doc)};
    std::string line;
    if (!std::getline(in, line) || line != kCsvHeader) throw ParseError("missing CSV header");
    std::vector<Row> rs;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      auto f = csv_split(line);
      if (f.size() != 5) throw ParseError("expected 5 columns: " + line);
      rs.push_back({f[0], f[1], f[2], f[3], f[4]});
    }
    return from_rows(rs);
  }
  try {
    Json j = Json::parse(doc);
    if (j.at("format") != "techdebt-experiment") throw ParseError("not an experiment export");
    ExperimentResult r;
    const Json& m = j.at("meta");
    r.policy_a = m.at("policy_a").get<std::string>();
    r.policy_b = m.at("policy_b").get<std::string>();
    r.n = m.at("n").get<int>();
    r.base_seed = m.at("base_seed").get<std::uint64_t>();
    r.pack_name = m.at("pack_name").get<std::string>();
    r.pack_version = m.at("pack_version").get<std::string>();
    r.max_rounds = m.at("max_rounds").get<int>();
    r.td_penalty = m.at("td_penalty").get<int>();
    for (int side = 0; side < 2; ++side) {
      const Json& s = j.at("summary").at(side);
      PolicySummary& p = r.summary[side];
      p.policy = s.at("policy").get<std::string>();
      p.n = s.at("n").get<int>();
      p.mean_score = s.at("mean_score").get<double>();
      p.sd_score = s.at("sd_score").get<double>();
      p.mean_unrepaid_td = s.at("mean_unrepaid_td").get<double>();
      p.mean_rounds_to_first_ticket = s.at("mean_rounds_to_first_ticket").get<double>();
      p.wins = s.at("wins").get<int>();
      p.draws = s.at("draws").get<int>();
      p.losses = s.at("losses").get<int>();
      p.win_rate = s.at("win_rate").get<double>();
      const Json& counts = j.at("aha").at(side).at("counts");
      for (std::size_t k = 0; k < kAhaCount; ++k) p.aha[k] = counts.at(AhaTag::at(k).key()).get<int>();
    }
    for (const Json& gj : j.at("games")) {
      GameRecord g;
      g.seed = gj.at("seed").get<std::uint64_t>();
      g.swapped = gj.at("swapped").get<bool>();
      g.score = {gj.at("score_a").get<int>(), gj.at("score_b").get<int>()};
      g.unrepaid = {gj.at("unrepaid_a").get<int>(), gj.at("unrepaid_b").get<int>()};
      g.first_ticket = {gj.at("first_ticket_a").get<int>(), gj.at("first_ticket_b").get<int>()};
      g.rounds = gj.at("rounds").get<int>();
      g.end = gj.at("end") == "round_limit" ? EndReason::RoundLimit : EndReason::ModulesComplete;
      g.winner = gj.at("winner").get<int>();
      r.games.push_back(g);
    }
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("bad experiment export: ") + e.what());
  }
}

}  // namespace techdebt
