#pragma once

#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "techdebt/types.hpp"

namespace techdebt {

using Json = nlohmann::ordered_json;

inline constexpr int kPackFormatVersion = 1;

struct ValidationError {
  std::string path;
  std::string message;
  friend bool operator==(const ValidationError&, const ValidationError&) = default;
};

inline std::string to_string(const ValidationError& e) { return e.path + ": " + e.message; }

struct LoadResult {
  std::optional<ContentPack> pack;
  std::vector<ValidationError> errors;
  bool ok() const { return pack.has_value(); }
};

namespace content_detail {

struct Reader {
  std::vector<ValidationError>& errors;

  void fail(const std::string& path, const std::string& msg) { errors.push_back({path, msg}); }

  const Json* field(const Json& obj, const std::string& key, const std::string& path, bool required = true) {
    if (!obj.is_object()) {
      fail(path, "expected an object");
      return nullptr;
    }
    auto it = obj.find(key);
    if (it == obj.end()) {
      if (required) fail(path + "." + key, "missing field");
      return nullptr;
    }
    return &*it;
  }

  std::optional<int> integer(const Json& obj, const std::string& key, const std::string& path, bool required = true) {
    const Json* v = field(obj, key, path, required);
    if (!v) return std::nullopt;
    if (!v->is_number_integer()) {
      fail(path + "." + key, "expected an integer");
      return std::nullopt;
    }
    return v->get<int>();
  }

  std::optional<std::string> text(const Json& obj, const std::string& key, const std::string& path,
                                  bool required = true) {
    const Json* v = field(obj, key, path, required);
    if (!v) return std::nullopt;
    if (!v->is_string()) {
      fail(path + "." + key, "expected a string");
      return std::nullopt;
    }
    return v->get<std::string>();
  }

  DigitSet digits(const Json& obj, const std::string& key, const std::string& path) {
    DigitSet out;
    const Json* v = field(obj, key, path);
    if (!v) return out;
    if (!v->is_array()) {
      fail(path + "." + key, "expected an array of digits");
      return out;
    }
    for (std::size_t i = 0; i < v->size(); ++i) {
      const Json& d = (*v)[i];
      std::string p = path + "." + key + "[" + std::to_string(i) + "]";
      if (!d.is_number_integer() || d.get<int>() < 1 || d.get<int>() > 6) {
        fail(p, "digit out of range");
        continue;
      }
      if (out.contains(d.get<int>())) fail(p, "duplicate digit");
      out.insert(Digit(d.get<int>()));
    }
    return out;
  }
};

inline std::optional<TicketKind> parse_ticket_kind(const std::string& s) {
  if (s == "architecture") return TicketKind::Architecture;
  if (s == "feature") return TicketKind::Feature;
  return std::nullopt;
}

inline std::optional<CardKind> parse_card_kind(const std::string& s) {
  if (s == "event") return CardKind::Event;
  if (s == "action") return CardKind::Action;
  return std::nullopt;
}

template <typename E, std::size_t N>
std::optional<E> parse_name(const std::array<std::string_view, N>& names, const std::string& s) {
  for (std::size_t i = 0; i < N; ++i)
    if (names[i] == s) return static_cast<E>(i);
  return std::nullopt;
}

inline bool selector_allowed(EffectOp op, TicketSelector sel) {
  switch (op) {
    case EffectOp::AddTdRandomDigit:
      return sel == TicketSelector::InProgress || sel == TicketSelector::NewestPlaced ||
             sel == TicketSelector::AnyPlaced || sel == TicketSelector::Architecture;
    case EffectOp::RemoveTd:
      return sel == TicketSelector::InProgress || sel == TicketSelector::NewestPlaced ||
             sel == TicketSelector::AnyTd || sel == TicketSelector::Chosen;
    default:
      return false;
  }
}

inline bool has_target(EffectOp op) { return op == EffectOp::AddTdRandomDigit || op == EffectOp::RemoveTd; }

inline Card read_card(Reader& r, const Json& j, const std::string& path, CardKind kind) {
  Card c;
  c.kind = kind;
  c.id = r.text(j, "id", path).value_or("");
  c.title = r.text(j, "title", path).value_or("");
  c.narrative = r.text(j, "narrative", path).value_or("");
  if (kind == CardKind::Action) {
    if (const Json* ct = r.field(j, "consumes_turn", path, false)) {
      if (ct->is_boolean())
        c.consumes_turn = ct->get<bool>();
      else
        r.fail(path + ".consumes_turn", "expected a boolean");
    }
  } else if (j.is_object() && j.contains("consumes_turn")) {
    r.fail(path + ".consumes_turn", "only action cards may set consumes_turn");
  }

  if (const Json* eff = r.field(j, "effect", path)) {
    if (!eff->is_array()) {
      r.fail(path + ".effect", "expected an array");
    } else {
      for (std::size_t i = 0; i < eff->size(); ++i) {
        const Json& pj = (*eff)[i];
        std::string pp = path + ".effect[" + std::to_string(i) + "]";
        EffectPrimitive p;
        auto op_name = r.text(pj, "op", pp);
        if (!op_name) continue;
        auto op = parse_name<EffectOp>(kEffectOpNames, *op_name);
        if (!op) {
          r.fail(pp + ".op", "unknown effect op '" + *op_name + "'");
          continue;
        }
        p.op = *op;
        if (has_target(p.op)) {
          auto t = r.text(pj, "target", pp);
          if (t) {
            auto sel = parse_name<TicketSelector>(kSelectorNames, *t);
            if (!sel || !selector_allowed(p.op, *sel))
              r.fail(pp + ".target", "target '" + *t + "' not allowed for " + *op_name);
            else
              p.target = *sel;
          }
        } else if (pj.contains("target")) {
          r.fail(pp + ".target", "op takes no target");
        }
        if (p.op == EffectOp::BlockDigitForRounds) {
          auto d = r.integer(pj, "digit", pp);
          auto n = r.integer(pj, "rounds", pp);
          if (d && (*d < 1 || *d > 6)) r.fail(pp + ".digit", "digit out of range");
          if (n && *n < 1) r.fail(pp + ".rounds", "rounds must be positive");
          p.digit = d.value_or(0);
          p.rounds = n.value_or(0);
        }
        c.effect.push_back(p);
      }
      if (eff->empty() || eff->size() > 3) r.fail(path + ".effect", "effect must have 1..3 primitives");
    }
  }

  if (const Json* tags = r.field(j, "tags", path)) {
    if (!tags->is_array()) {
      r.fail(path + ".tags", "expected an array");
    } else {
      for (std::size_t i = 0; i < tags->size(); ++i) {
        std::string tp = path + ".tags[" + std::to_string(i) + "]";
        const Json& t = (*tags)[i];
        if (!t.is_string()) {
          r.fail(tp, "expected a string");
          continue;
        }
        std::string key = t.get<std::string>();
        auto slash = key.find('/');
        std::string group = key.substr(0, slash);
        bool group_known = false;
        for (const auto& row : kAhaRegistry)
          if (to_string(row.group) == group) group_known = true;
        if (!group_known || slash == std::string::npos) {
          r.fail(tp, "unknown aha group '" + group + "'");
          continue;
        }
        auto tag = AhaTag::parse(key);
        if (!tag) {
          r.fail(tp, "unknown aha variable '" + key.substr(slash + 1) + "'");
          continue;
        }
        if (std::find(c.tags.begin(), c.tags.end(), *tag) != c.tags.end()) r.fail(tp, "duplicate tag");
        c.tags.push_back(*tag);
      }
    }
  }
  if (kind == CardKind::Event) {
    if (c.tags.empty() && j.is_object() && j.contains("tags")) r.fail(path + ".tags", "event card needs at least one aha tag");
    if (c.needs_choice()) r.fail(path + ".effect", "event card cannot require a player choice");
  }
  return c;
}

inline void check_semantics(const ContentPack& p, std::vector<ValidationError>& errors) {
  auto fail = [&](std::string path, std::string msg) { errors.push_back({std::move(path), std::move(msg)}); };

  int feature_slots = 0;
  for (ModuleId m : kModules) {
    const auto& slots = p.board[index_of(m)];
    std::string path = std::string("board.") + letter(m);
    if (slots.empty()) {
      fail(path, "module needs at least one slot");
      continue;
    }
    int arch = 0;
    for (const auto& s : slots) arch += s.kind == TicketKind::Architecture;
    if (slots.front().kind != TicketKind::Architecture || arch != 1)
      fail(path, "module must begin with exactly one architecture slot");
    feature_slots += static_cast<int>(slots.size()) - arch;
  }

  std::set<std::string> ids;
  std::array<int, 3> arch_per_module{};
  int features = 0;
  for (std::size_t i = 0; i < p.tickets.size(); ++i) {
    const auto& d = p.tickets[i];
    const Ticket& t = d.ticket;
    std::string path = "tickets[" + std::to_string(i) + "]";
    if (t.id.empty()) fail(path + ".id", "empty id");
    if (!ids.insert(t.id).second) fail(path + ".id", "duplicate id '" + t.id + "'");
    if (t.tasks_required < 1 || t.tasks_required > 8) fail(path + ".tasks", "tasks_required out of range 1..8");
    if (t.blocked.size() == 6) fail(path + ".blocked", "unworkable ticket: every digit is blocked");
    if (t.users < 0) fail(path + ".users", "users must be non-negative");
    if (t.kind == TicketKind::Architecture) {
      if (t.users != 0) fail(path + ".users", "architecture tickets earn no users");
      if (!d.module)
        fail(path + ".module", "architecture ticket must name its module");
      else
        ++arch_per_module[index_of(*d.module)];
    } else {
      ++features;
      if (d.module) fail(path + ".module", "feature tickets are not bound to a module");
    }
  }
  for (ModuleId m : kModules)
    if (arch_per_module[index_of(m)] != 1)
      fail("tickets", std::string("module ") + letter(m) + " needs exactly one architecture ticket");
  if (features < feature_slots)
    fail("tickets", "need at least " + std::to_string(feature_slots) + " feature tickets, found " +
                        std::to_string(features));

  auto check_cards = [&](const std::vector<Card>& cards, const char* name) {
    for (std::size_t i = 0; i < cards.size(); ++i) {
      std::string path = std::string(name) + "[" + std::to_string(i) + "]";
      if (cards[i].id.empty()) fail(path + ".id", "empty id");
      if (!ids.insert(cards[i].id).second) fail(path + ".id", "duplicate id '" + cards[i].id + "'");
      if (cards[i].title.empty()) fail(path + ".title", "empty title");
    }
  };
  check_cards(p.event_cards, "event_cards");
  check_cards(p.action_cards, "action_cards");

  if (p.td_penalty < 0) fail("defaults.td_penalty", "must be non-negative");
  if (p.max_rounds < 1) fail("defaults.max_rounds", "must be positive");
}

}  // namespace content_detail

// Parses and validates a pack document. On any error the pack is absent and
// every problem is reported with its path.
inline LoadResult load_pack_json(const Json& doc) {
  LoadResult out;
  content_detail::Reader r{out.errors};
  ContentPack p;

  if (!doc.is_object()) {
    r.fail("$", "pack document must be an object");
    return out;
  }
  auto version = r.integer(doc, "pack_version", "$");
  if (version && *version != kPackFormatVersion)
    r.fail("pack_version", "unsupported pack_version " + std::to_string(*version));
  p.pack_version = version.value_or(kPackFormatVersion);
  p.name = r.text(doc, "name", "$").value_or("");
  if (p.name.empty() && doc.contains("name")) r.fail("name", "empty name");
  p.version = r.text(doc, "version", "$").value_or("");

  if (const Json* d = r.field(doc, "defaults", "$")) {
    p.td_penalty = r.integer(*d, "td_penalty", "defaults").value_or(p.td_penalty);
    p.max_rounds = r.integer(*d, "max_rounds", "defaults").value_or(p.max_rounds);
  }

  if (const Json* b = r.field(doc, "board", "$")) {
    if (b->is_object()) {
      for (auto it = b->begin(); it != b->end(); ++it)
        if (!parse_module(it.key())) r.fail("board." + it.key(), "unknown module");
    }
    for (ModuleId m : kModules) {
      std::string path = std::string("board.") + letter(m);
      const Json* slots = r.field(*b, std::string(1, letter(m)), "board");
      if (!slots) continue;
      if (!slots->is_array()) {
        r.fail(path, "expected an array of slots");
        continue;
      }
      for (std::size_t i = 0; i < slots->size(); ++i) {
        std::string sp = path + "[" + std::to_string(i) + "]";
        const Json& sj = (*slots)[i];
        SlotDef s;
        if (auto k = r.text(sj, "kind", sp)) {
          auto kind = content_detail::parse_ticket_kind(*k);
          if (!kind)
            r.fail(sp + ".kind", "unknown ticket kind '" + *k + "'");
          else
            s.kind = *kind;
        }
        if (sj.is_object() && sj.contains("trigger") && !sj["trigger"].is_null()) {
          auto t = r.text(sj, "trigger", sp);
          auto kind = t ? content_detail::parse_card_kind(*t) : std::nullopt;
          if (t && !kind) r.fail(sp + ".trigger", "unknown card kind '" + *t + "'");
          s.trigger = kind;
        }
        p.board[index_of(m)].push_back(s);
      }
    }
  }

  if (const Json* ts = r.field(doc, "tickets", "$")) {
    if (!ts->is_array()) r.fail("tickets", "expected an array");
    for (std::size_t i = 0; ts->is_array() && i < ts->size(); ++i) {
      const Json& tj = (*ts)[i];
      std::string path = "tickets[" + std::to_string(i) + "]";
      TicketDef d;
      d.ticket.id = r.text(tj, "id", path).value_or("");
      if (auto k = r.text(tj, "kind", path)) {
        auto kind = content_detail::parse_ticket_kind(*k);
        if (!kind)
          r.fail(path + ".kind", "unknown ticket kind '" + *k + "'");
        else
          d.ticket.kind = *kind;
      }
      if (auto m = r.text(tj, "module", path, false)) {
        d.module = parse_module(*m);
        if (!d.module) r.fail(path + ".module", "unknown module '" + *m + "'");
      }
      d.ticket.tasks_required = r.integer(tj, "tasks", path).value_or(1);
      d.ticket.blocked = r.digits(tj, "blocked", path);
      d.ticket.users = r.integer(tj, "users", path).value_or(0);
      p.tickets.push_back(std::move(d));
    }
  }

  for (auto [key, kind] : {std::pair{"event_cards", CardKind::Event}, std::pair{"action_cards", CardKind::Action}}) {
    const Json* cs = r.field(doc, key, "$");
    if (!cs) continue;
    if (!cs->is_array()) {
      r.fail(key, "expected an array");
      continue;
    }
    auto& dest = kind == CardKind::Event ? p.event_cards : p.action_cards;
    for (std::size_t i = 0; i < cs->size(); ++i)
      dest.push_back(content_detail::read_card(r, (*cs)[i], std::string(key) + "[" + std::to_string(i) + "]", kind));
  }

  content_detail::check_semantics(p, out.errors);
  if (out.errors.empty()) out.pack = std::move(p);
  return out;
}

inline LoadResult load_pack(std::string_view text) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    LoadResult out;
    out.errors.push_back({"$", std::string("parse error: ") + e.what()});
    return out;
  }
  return load_pack_json(doc);
}

inline LoadResult load_pack_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    LoadResult out;
    out.errors.push_back({path, "cannot open file"});
    return out;
  }
  std::stringstream ss;
  ss << in.rdbuf();
  return load_pack(ss.str());
}

// Semantic checks only, for packs built in code.
inline std::vector<ValidationError> validate_pack(const ContentPack& p) {
  std::vector<ValidationError> errors;
  content_detail::check_semantics(p, errors);
  for (const auto* cards : {&p.event_cards, &p.action_cards}) {
    for (const Card& c : *cards) {
      std::string path = "card " + c.id;
      if (c.effect.empty() || c.effect.size() > 3) errors.push_back({path, "effect must have 1..3 primitives"});
      if (c.kind == CardKind::Event && c.tags.empty()) errors.push_back({path, "event card needs at least one aha tag"});
      if (c.kind == CardKind::Event && c.needs_choice())
        errors.push_back({path, "event card cannot require a player choice"});
    }
  }
  return errors;
}

inline Json to_json(const ContentPack& p) {
  auto digits = [](DigitSet s) {
    Json a = Json::array();
    for (Digit d : s.members()) a.push_back(d.value());
    return a;
  };
  Json doc;
  doc["pack_version"] = p.pack_version;
  doc["name"] = p.name;
  doc["version"] = p.version;
  doc["defaults"] = {{"td_penalty", p.td_penalty}, {"max_rounds", p.max_rounds}};
  Json board = Json::object();
  for (ModuleId m : kModules) {
    Json slots = Json::array();
    for (const auto& s : p.board[index_of(m)]) {
      Json sj;
      sj["kind"] = to_string(s.kind);
      if (s.trigger) sj["trigger"] = to_string(*s.trigger);
      slots.push_back(sj);
    }
    board[std::string(1, letter(m))] = slots;
  }
  doc["board"] = board;
  Json tickets = Json::array();
  for (const auto& d : p.tickets) {
    Json tj;
    tj["id"] = d.ticket.id;
    tj["kind"] = to_string(d.ticket.kind);
    if (d.module) tj["module"] = std::string(1, letter(*d.module));
    tj["tasks"] = d.ticket.tasks_required;
    tj["blocked"] = digits(d.ticket.blocked);
    tj["users"] = d.ticket.users;
    tickets.push_back(tj);
  }
  doc["tickets"] = tickets;
  for (auto [key, cards] : {std::pair{"event_cards", &p.event_cards}, std::pair{"action_cards", &p.action_cards}}) {
    Json arr = Json::array();
    for (const Card& c : *cards) {
      Json cj;
      cj["id"] = c.id;
      cj["title"] = c.title;
      cj["narrative"] = c.narrative;
      if (c.kind == CardKind::Action) cj["consumes_turn"] = c.consumes_turn;
      Json eff = Json::array();
      for (const auto& prim : c.effect) {
        Json pj;
        pj["op"] = to_string(prim.op);
        if (content_detail::has_target(prim.op)) pj["target"] = to_string(prim.target);
        if (prim.op == EffectOp::BlockDigitForRounds) {
          pj["digit"] = prim.digit;
          pj["rounds"] = prim.rounds;
        }
        eff.push_back(pj);
      }
      cj["effect"] = eff;
      Json tags = Json::array();
      for (AhaTag t : c.tags) tags.push_back(t.key());
      cj["tags"] = tags;
      arr.push_back(cj);
    }
    doc[key] = arr;
  }
  return doc;
}

inline std::string serialize_pack(const ContentPack& p) { return to_json(p).dump(2) + "\n"; }

// How many sources can emit each registry row: cards carrying the tag plus
// one for rows the game mechanics emit on their own.
inline AhaCounts coverage_report(const ContentPack& p) {
  AhaCounts counts{};
  for (AhaTag t : aha::kIntrinsic) counts[t.row()] += 1;
  for (const auto* cards : {&p.event_cards, &p.action_cards})
    for (const Card& c : *cards)
      for (AhaTag t : c.tags) counts[t.row()] += 1;
  return counts;
}

}  // namespace techdebt
