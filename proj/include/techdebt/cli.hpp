#pragma once

#include <CLI11.hpp>

#include <atomic>
#include <csignal>
#include <cstdlib>
#include <iomanip>
#include <iostream>

#include "techdebt/http.hpp"
#include "techdebt/sim.hpp"

namespace techdebt::cli {

enum class OutputFormat { Table, Csv, Json };

struct Io {
  std::ostream& out;
  std::ostream& err;
};

// "default" (or a missing path named default.pack) means the built-in pack.
inline std::shared_ptr<const ContentPack> load_pack_arg(const std::string& arg, Io io) {
  if (!std::filesystem::exists(arg)) {
    auto stem = std::filesystem::path(arg).stem().string();
    if (arg == "default" || stem == "default") return default_pack();
    io.err << "error: no such pack file: " << arg << "\n";
    return nullptr;
  }
  auto res = load_pack_file(arg);
  if (!res.pack) {
    for (const auto& e : res.errors) io.err << arg << ": " << to_string(e) << "\n";
    return nullptr;
  }
  return std::make_shared<const ContentPack>(std::move(*res.pack));
}

inline std::string pad(std::string s, std::size_t w) {
  if (s.size() < w) s.append(w - s.size(), ' ');
  return s;
}

inline std::string fixed(double v, int digits = 3) {
  std::ostringstream o;
  o << std::fixed << std::setprecision(digits) << v;
  return o.str();
}

inline int cmd_validate(const std::string& path, OutputFormat fmt, Io io) {
  LoadResult res;
  if (!std::filesystem::exists(path) && (path == "default" || std::filesystem::path(path).stem() == "default")) {
    res.pack = *default_pack();
  } else {
    res = load_pack_file(path);
  }
  bool ok = res.pack.has_value();
  switch (fmt) {
    case OutputFormat::Json: {
      Json errs = Json::array();
      for (const auto& e : res.errors) errs.push_back(Json{{"path", e.path}, {"message", e.message}});
      Json j{{"valid", ok}, {"errors", errs}};
      if (ok) j["pack"] = Json{{"name", res.pack->name}, {"version", res.pack->version}};
      io.out << j.dump(2) << "\n";
      break;
    }
    case OutputFormat::Csv:
      io.out << "path,message\n";
      for (const auto& e : res.errors) io.out << export_detail::csv_field(e.path) << "," << export_detail::csv_field(e.message) << "\n";
      break;
    case OutputFormat::Table:
      if (ok)
        io.out << "ok: " << res.pack->name << " " << res.pack->version << " (" << res.pack->tickets.size() << " tickets, "
               << res.pack->event_cards.size() << " event cards, " << res.pack->action_cards.size() << " action cards)\n";
      else
        for (const auto& e : res.errors) io.out << "error: " << to_string(e) << "\n";
      break;
  }
  return ok ? 0 : 1;
}

inline int cmd_coverage(const std::string& path, OutputFormat fmt, Io io) {
  auto pack = load_pack_arg(path, io);
  if (!pack) return 1;
  AhaCounts counts = coverage_report(*pack);
  bool all = std::all_of(counts.begin(), counts.end(), [](int c) { return c >= 1; });
  switch (fmt) {
    case OutputFormat::Json: {
      Json rows = Json::array();
      for (std::size_t k = 0; k < kAhaCount; ++k) {
        AhaTag t = AhaTag::at(k);
        rows.push_back(Json{{"group", std::string(to_string(t.group()))}, {"variable", t.variable()}, {"count", counts[k]}});
      }
      io.out << Json{{"pack", pack->name}, {"rows", rows}, {"all_covered", all}}.dump(2) << "\n";
      break;
    }
    case OutputFormat::Csv:
      io.out << "group,variable,count\n";
      for (std::size_t k = 0; k < kAhaCount; ++k) {
        AhaTag t = AhaTag::at(k);
        io.out << to_string(t.group()) << "," << export_detail::csv_field(std::string(t.variable())) << "," << counts[k]
               << "\n";
      }
      break;
    case OutputFormat::Table:
      io.out << pad("group", 15) << pad("variable", 22) << "count\n";
      for (std::size_t k = 0; k < kAhaCount; ++k) {
        AhaTag t = AhaTag::at(k);
        io.out << pad(std::string(to_string(t.group())), 15) << pad(std::string(t.variable()), 22) << counts[k] << "\n";
      }
      io.out << (all ? "all rows covered\n" : "some rows are not covered\n");
      break;
  }
  return all ? 0 : 1;
}

struct SimulateArgs {
  std::string policy_a;
  std::string policy_b;
  int n = 1000;
  std::uint64_t seed = 1;
  std::string pack = "default";
  std::string out;
  unsigned threads = 0;
  std::string replays;
  std::optional<int> max_rounds;
  std::optional<int> td_penalty;
};

inline void print_summary_table(const ExperimentResult& r, Io io) {
  io.out << "pack " << r.pack_name << " " << r.pack_version << ", n = " << r.n << ", seeds " << r.base_seed << ".."
         << r.base_seed + r.n - 1 << ", max_rounds " << r.max_rounds << ", td_penalty " << r.td_penalty << "\n";
  io.out << pad("policy", 16) << pad("mean score", 12) << pad("sd", 9) << pad("unrepaid TD", 13)
         << pad("first ticket", 14) << pad("W/D/L", 16) << "win rate\n";
  for (const auto& s : r.summary)
    io.out << pad(s.policy, 16) << pad(fixed(s.mean_score), 12) << pad(fixed(s.sd_score), 9)
           << pad(fixed(s.mean_unrepaid_td), 13) << pad(fixed(s.mean_rounds_to_first_ticket), 14)
           << pad(std::to_string(s.wins) + "/" + std::to_string(s.draws) + "/" + std::to_string(s.losses), 16)
           << fixed(s.win_rate) << "\n";
}

inline int cmd_simulate(const SimulateArgs& a, OutputFormat fmt, Io io) {
  auto pa = find_policy(a.policy_a);
  auto pb = find_policy(a.policy_b);
  for (const auto* name : {&a.policy_a, &a.policy_b})
    if (!find_policy(*name)) {
      io.err << "error: unknown policy '" << *name << "' (known:";
      for (const auto& p : builtin_policies()) io.err << " " << p.name;
      io.err << ")\n";
      return 2;
    }
  auto pack = load_pack_arg(a.pack, io);
  if (!pack) return 1;
  SessionConfig config = make_config(pack, a.seed);
  if (a.max_rounds) config.max_rounds = *a.max_rounds;
  if (a.td_penalty) config.td_penalty = *a.td_penalty;
  ExperimentOptions opts;
  opts.threads = a.threads;
  if (!a.replays.empty()) opts.replay_dir = a.replays;
  ExperimentResult r;
  try {
    r = run_experiment(*pa, *pb, a.n, a.seed, config, opts);
  } catch (const std::exception& e) {
    io.err << "error: " << e.what() << "\n";
    return 1;
  }
  if (!a.out.empty()) {
    auto ext = std::filesystem::path(a.out).extension();
    ExportFormat ef = ext == ".json" ? ExportFormat::Json : ExportFormat::Csv;
    std::ofstream f(a.out, std::ios::binary);
    f << export_results(r, ef);
    if (!f) {
      io.err << "error: cannot write " << a.out << "\n";
      return 1;
    }
  }
  switch (fmt) {
    case OutputFormat::Json: io.out << export_results(r, ExportFormat::Json); break;
    case OutputFormat::Csv: io.out << export_results(r, ExportFormat::Csv); break;
    case OutputFormat::Table: print_summary_table(r, io); break;
  }
  return 0;
}

inline int cmd_replay(const std::string& file, const std::string& packs_dir, OutputFormat fmt, Io io) {
  auto text = store_detail::read_file(file);
  if (!text) {
    io.err << "error: cannot read " << file << "\n";
    return 1;
  }
  PackRegistry packs;
  if (!packs_dir.empty())
    for (const auto& p : packs.load_dir(packs_dir)) io.err << "warning: " << p << "\n";
  GameState s;
  try {
    s = replay(read_replay(*text), packs.resolver());
  } catch (const ReplayError& e) {
    if (fmt == OutputFormat::Json) {
      Json j{{"ok", false}, {"error", e.what()}};
      j["index"] = e.index() ? Json(*e.index()) : Json(nullptr);
      io.out << j.dump(2) << "\n";
    } else {
      io.err << "error: " << e.what() << "\n";
    }
    return 1;
  }
  std::array<int, 2> scores{score_of(s, s.teams[0]), score_of(s, s.teams[1])};
  int w = s.phase == Phase::Finished ? winner(s) : -1;
  std::string end = s.end_reason ? std::string(to_string(*s.end_reason)) : "unfinished";
  switch (fmt) {
    case OutputFormat::Json: {
      Json j{{"ok", true}, {"events", s.log.size()}, {"rounds", s.round}, {"end", end}, {"scores", scores}};
      j["winner"] = s.phase == Phase::Finished ? Json(w) : Json(nullptr);
      io.out << j.dump(2) << "\n";
      break;
    }
    case OutputFormat::Csv:
      io.out << "events,rounds,end,score_0,score_1,winner\n"
             << s.log.size() << "," << s.round << "," << end << "," << scores[0] << "," << scores[1] << "," << w << "\n";
      break;
    case OutputFormat::Table:
      io.out << "replay ok: " << s.log.size() << " events reproduced, round " << s.round << ", " << end << "\n"
             << "score: team 1 " << scores[0] << ", team 2 " << scores[1] << ", "
             << (s.phase != Phase::Finished ? "in progress" : w < 0 ? "draw" : "team " + std::to_string(w + 1) + " wins")
             << "\n";
      break;
  }
  return 0;
}

inline std::atomic<bool>& stop_flag() {
  static std::atomic<bool> flag{false};
  return flag;
}

inline int cmd_serve(int port, const std::string& packs_dir, const std::string& storage, Io io) {
  stop_flag() = false;
  PackRegistry packs;
  if (!packs_dir.empty()) {
    if (!std::filesystem::is_directory(packs_dir)) {
      io.err << "error: no such packs directory: " << packs_dir << "\n";
      return 1;
    }
    for (const auto& p : packs.load_dir(packs_dir)) io.err << "warning: " << p << "\n";
  }
  GameStore store = storage.empty() ? GameStore() : GameStore(storage);
  GameService service(std::move(store));
  if (!storage.empty()) io.out << "recovered " << service.recover(packs) << " sessions from " << storage << "\n";
  httplib::Server server;
  server.new_task_queue = [] { return new httplib::ThreadPool(64); };
  install_routes(server, service, packs);
  std::thread ticker([&] {
    while (!stop_flag()) {
      service.tick();
      std::this_thread::sleep_for(std::chrono::seconds(1));
    }
  });
  std::thread watcher([&] {
    while (!stop_flag()) std::this_thread::sleep_for(std::chrono::milliseconds(200));
    server.stop();
  });
  std::signal(SIGINT, [](int) { stop_flag() = true; });
  std::signal(SIGTERM, [](int) { stop_flag() = true; });
  io.out << "listening on port " << port << std::endl;
  bool ok = server.listen("0.0.0.0", port);
  stop_flag() = true;
  ticker.join();
  watcher.join();
  if (!ok) {
    io.err << "error: cannot listen on port " << port << "\n";
    return 1;
  }
  return 0;
}

inline int run(int argc, char** argv, Io io = {std::cout, std::cerr}) {
  CLI::App app{"TechDebt board game engine: content validation, simulation, replay and game server"};
  app.require_subcommand(1, 1);
  OutputFormat fmt = OutputFormat::Table;
  const std::map<std::string, OutputFormat> formats{
      {"table", OutputFormat::Table}, {"csv", OutputFormat::Csv}, {"json", OutputFormat::Json}};
  auto add_format = [&](CLI::App* sub) {
    sub->add_option("--format", fmt, "Output format")->transform(CLI::CheckedTransformer(formats, CLI::ignore_case));
  };

  std::string pack_path;
  auto* validate = app.add_subcommand("validate", "Check a content pack");
  validate->add_option("pack", pack_path, "Pack file (or 'default')")->required();
  add_format(validate);

  auto* coverage = app.add_subcommand("coverage", "Aha-moment coverage table for a pack");
  coverage->add_option("pack", pack_path, "Pack file (or 'default')")->required();
  add_format(coverage);

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Run bot-vs-bot games");
  simulate->add_option("policy-a", sim.policy_a, "First policy")->required();
  simulate->add_option("policy-b", sim.policy_b, "Second policy")->required();
  simulate->add_option("--n", sim.n, "Number of games")->check(CLI::Range(1, 100000000));
  simulate->add_option("--seed", sim.seed, "Base seed; game i uses seed + i");
  simulate->add_option("--pack", sim.pack, "Pack file (or 'default')");
  simulate->add_option("--out", sim.out, "Result file (.json for JSON, CSV otherwise)");
  simulate->add_option("--threads", sim.threads, "Worker threads (0 = all cores)");
  simulate->add_option("--replays", sim.replays, "Directory for per-game replay files");
  simulate->add_option("--max-rounds", sim.max_rounds, "Override the pack's round limit")->check(CLI::PositiveNumber);
  simulate->add_option("--td-penalty", sim.td_penalty, "Override the pack's TD penalty")->check(CLI::NonNegativeNumber);
  add_format(simulate);

  std::string replay_file, replay_packs;
  auto* replay_cmd = app.add_subcommand("replay", "Re-run a replay file and verify it");
  replay_cmd->add_option("file", replay_file, "Replay file")->required();
  replay_cmd->add_option("--packs", replay_packs, "Directory of extra content packs");
  add_format(replay_cmd);

  int port = 8080;
  std::string packs_dir, storage;
  if (const char* p = std::getenv("TECHDEBT_PORT")) port = std::atoi(p);
  if (const char* s = std::getenv("TECHDEBT_STORAGE")) storage = s;
  auto* serve = app.add_subcommand("serve", "Host live games over HTTP");
  serve->add_option("--port", port, "TCP port (env TECHDEBT_PORT)")->check(CLI::Range(1, 65535));
  serve->add_option("--packs", packs_dir, "Directory of content packs");
  serve->add_option("--storage", storage, "Directory for session journals and archives (env TECHDEBT_STORAGE)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, io.out, io.err);
    if (code != 0) io.err << app.help();
    return code;
  }
  if (validate->parsed()) return cmd_validate(pack_path, fmt, io);
  if (coverage->parsed()) return cmd_coverage(pack_path, fmt, io);
  if (simulate->parsed()) return cmd_simulate(sim, fmt, io);
  if (replay_cmd->parsed()) return cmd_replay(replay_file, replay_packs, fmt, io);
  if (serve->parsed()) return cmd_serve(port, packs_dir, storage, io);
  return 2;
}

}  // namespace techdebt::cli
