#pragma once

#include <stdexcept>
#include <string>

#include "techdebt/content.hpp"
#include "techdebt/types.hpp"

namespace techdebt {

class ParseError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

namespace wire {

inline std::string module_str(ModuleId m) { return std::string(1, letter(m)); }

inline ModuleId module_from(const Json& j) {
  if (!j.is_string()) throw ParseError("module must be a string");
  auto m = parse_module(j.get<std::string>());
  if (!m) throw ParseError("unknown module '" + j.get<std::string>() + "'");
  return *m;
}

inline Digit digit_from(const Json& j) {
  if (!j.is_number_integer()) throw ParseError("digit must be an integer");
  int v = j.get<int>();
  if (v < 1 || v > 6) throw ParseError("digit out of range");
  return Digit(v);
}

inline int int_from(const Json& j, const char* what) {
  if (!j.is_number_integer()) throw ParseError(std::string(what) + " must be an integer");
  return j.get<int>();
}

inline const Json& at(const Json& j, const char* key) {
  if (!j.is_object()) throw ParseError("expected an object");
  auto it = j.find(key);
  if (it == j.end()) throw ParseError(std::string("missing field '") + key + "'");
  return *it;
}

}  // namespace wire

inline Json to_json(const RepaymentTarget& t) {
  return Json{{"module", wire::module_str(t.module)}, {"ticket", t.ticket}, {"digit", t.digit.value()}};
}

inline RepaymentTarget target_from_json(const Json& j) {
  return {wire::module_from(wire::at(j, "module")), wire::int_from(wire::at(j, "ticket"), "ticket"),
          wire::digit_from(wire::at(j, "digit"))};
}

inline Json to_json(const Bindings& b) {
  Json j = Json::object();
  if (b.module) j["module"] = wire::module_str(*b.module);
  if (b.target) j["target"] = to_json(*b.target);
  if (b.digit) j["digit"] = b.digit->value();
  return j;
}

inline Bindings bindings_from_json(const Json& j) {
  if (!j.is_object()) throw ParseError("bindings must be an object");
  Bindings b;
  if (j.contains("module")) b.module = wire::module_from(j["module"]);
  if (j.contains("target")) b.target = target_from_json(j["target"]);
  if (j.contains("digit")) b.digit = wire::digit_from(j["digit"]);
  return b;
}

inline Json to_json(const Move& m) {
  return std::visit(
      [](const auto& v) -> Json {
        using T = std::decay_t<decltype(v)>;
        Json j;
        if constexpr (std::is_same_v<T, WorkMove>) {
          j["type"] = "work";
          j["module"] = wire::module_str(v.module);
          Json incur = Json::array();
          for (Digit d : v.incur) incur.push_back(d.value());
          j["incur"] = incur;
        } else if constexpr (std::is_same_v<T, RepayMove>) {
          j["type"] = "repay";
          j["target"] = to_json(v.target);
        } else if constexpr (std::is_same_v<T, PlayActionMove>) {
          j["type"] = "play_action";
          j["card"] = v.card_id;
          j["bindings"] = to_json(v.bindings);
        } else {
          j["type"] = "start_ticket";
          j["module"] = wire::module_str(v.module);
        }
        return j;
      },
      m);
}

inline Move move_from_json(const Json& j) {
  const Json& type = wire::at(j, "type");
  if (!type.is_string()) throw ParseError("move type must be a string");
  const std::string t = type.get<std::string>();
  if (t == "work") {
    WorkMove w{wire::module_from(wire::at(j, "module")), {}};
    if (j.contains("incur")) {
      if (!j["incur"].is_array()) throw ParseError("incur must be an array");
      for (const auto& d : j["incur"]) w.incur.push_back(wire::digit_from(d));
    }
    return w;
  }
  if (t == "repay") return RepayMove{target_from_json(wire::at(j, "target"))};
  if (t == "play_action") {
    const Json& card = wire::at(j, "card");
    if (!card.is_string()) throw ParseError("card must be a string");
    PlayActionMove p{card.get<std::string>(), {}};
    if (j.contains("bindings")) p.bindings = bindings_from_json(j["bindings"]);
    return p;
  }
  if (t == "start_ticket") return StartTicketMove{wire::module_from(wire::at(j, "module"))};
  throw ParseError("unknown move type '" + t + "'");
}

inline Json to_json(const GameEvent& e) {
  Json j;
  j["seq"] = e.seq;
  j["round"] = e.round;
  j["team"] = e.team;
  j["kind"] = to_string(e.kind);
  if (e.move) j["move"] = to_json(*e.move);
  if (e.roll) j["roll"] = Json::array({e.roll->first.value(), e.roll->second.value()});
  if (e.module) j["module"] = wire::module_str(*e.module);
  if (e.ticket) j["ticket"] = *e.ticket;
  if (e.digit) j["digit"] = e.digit->value();
  if (e.amount != 0) j["amount"] = e.amount;
  if (e.extra != 0) j["extra"] = e.extra;
  if (e.conscious) j["conscious"] = true;
  if (!e.card.empty()) j["card"] = e.card;
  if (!e.detail.empty()) j["detail"] = e.detail;
  if (!e.tags.empty()) {
    Json tags = Json::array();
    for (AhaTag t : e.tags) tags.push_back(t.key());
    j["tags"] = tags;
  }
  return j;
}

inline GameEvent event_from_json(const Json& j) {
  GameEvent e;
  e.seq = static_cast<std::uint32_t>(wire::int_from(wire::at(j, "seq"), "seq"));
  e.round = wire::int_from(wire::at(j, "round"), "round");
  e.team = wire::int_from(wire::at(j, "team"), "team");
  const Json& kind = wire::at(j, "kind");
  bool found = false;
  for (std::size_t i = 0; i < kEventKindNames.size(); ++i)
    if (kind.is_string() && kEventKindNames[i] == kind.get<std::string>()) {
      e.kind = static_cast<EventKind>(i);
      found = true;
    }
  if (!found) throw ParseError("unknown event kind");
  if (j.contains("move")) e.move = move_from_json(j["move"]);
  if (j.contains("roll")) {
    const Json& r = j["roll"];
    if (!r.is_array() || r.size() != 2) throw ParseError("roll must be a pair");
    e.roll = DiceRoll{wire::digit_from(r[0]), wire::digit_from(r[1])};
  }
  if (j.contains("module")) e.module = wire::module_from(j["module"]);
  if (j.contains("ticket")) e.ticket = wire::int_from(j["ticket"], "ticket");
  if (j.contains("digit")) e.digit = wire::digit_from(j["digit"]);
  if (j.contains("amount")) e.amount = wire::int_from(j["amount"], "amount");
  if (j.contains("extra")) e.extra = wire::int_from(j["extra"], "extra");
  if (j.contains("conscious")) e.conscious = j["conscious"].get<bool>();
  if (j.contains("card")) e.card = j["card"].get<std::string>();
  if (j.contains("detail")) e.detail = j["detail"].get<std::string>();
  if (j.contains("tags")) {
    for (const auto& t : j["tags"]) {
      auto tag = t.is_string() ? AhaTag::parse(t.get<std::string>()) : std::nullopt;
      if (!tag) throw ParseError("unknown aha tag");
      e.tags.push_back(*tag);
    }
  }
  return e;
}

}  // namespace techdebt
