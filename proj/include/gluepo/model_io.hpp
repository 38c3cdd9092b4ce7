#pragma once

// Text formats for the three model kinds. One declaration per line, `#`
// starts a comment.
//
//   net <id>                      system <id>                    system <id>
//   place <id> [init <n>]         agent <id>                     process <id>
//   trans <id>                    state <id> [listen <c>,...]    alphabet <a>,...   (optional)
//   arc <src> -> <dst> [<w>]      init <state>                   state <id>
//   inhibit <place> <trans>       trans <s> -> <t> on <v> <!|?> <c>   init <state>
//                                                                trans <s> -> <t> on <a>

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include "gluepo/async_automata.hpp"
#include "gluepo/cts.hpp"
#include "gluepo/pti_net.hpp"

namespace gluepo {

class ParseError : public Error {
 public:
  ParseError(std::size_t line, std::size_t column, const std::string& msg)
      : Error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + msg),
        line_(line),
        column_(column),
        message_(msg) {}
  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }
  const std::string& message() const noexcept { return message_; }

 private:
  std::size_t line_, column_;
  std::string message_;
};

enum class ModelKind { pti, cts, async };

inline const char* to_string(ModelKind k) {
  switch (k) {
    case ModelKind::pti: return "pti";
    case ModelKind::cts: return "cts";
    case ModelKind::async: return "async";
  }
  return "?";
}

using Model = std::variant<PtiNet, CtsSystem, AsyncSystem>;

namespace detail {

struct Token {
  std::string text;
  std::size_t column = 0;
};

struct Line {
  std::size_t number = 0;
  std::vector<Token> tokens;
};

/// Splits on whitespace, drops comments; commas become separate tokens only
/// inside lists, so they stay attached here and are split by the caller.
inline std::vector<Line> lex(const std::string& text) {
  std::vector<Line> out;
  std::istringstream in(text);
  std::string raw;
  std::size_t n = 0;
  while (std::getline(in, raw)) {
    ++n;
    if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    Line line{n, {}};
    std::size_t i = 0;
    while (i < raw.size()) {
      if (std::isspace(static_cast<unsigned char>(raw[i]))) {
        ++i;
        continue;
      }
      std::size_t j = i;
      while (j < raw.size() && !std::isspace(static_cast<unsigned char>(raw[j]))) ++j;
      line.tokens.push_back({raw.substr(i, j - i), i + 1});
      i = j;
    }
    if (!line.tokens.empty()) out.push_back(std::move(line));
  }
  return out;
}

inline bool is_ident(const std::string& s) {
  if (s.empty()) return false;
  for (char c : s)
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_' && c != '.' && c != '-') return false;
  return true;
}

class Cursor {
 public:
  explicit Cursor(const Line& l) : line_(l) {}

  [[noreturn]] void fail(const std::string& msg) const {
    std::size_t col = i_ < line_.tokens.size() ? line_.tokens[i_].column
                                               : line_.tokens.back().column + line_.tokens.back().text.size();
    throw ParseError(line_.number, col, msg);
  }
  [[noreturn]] void fail_at(std::size_t tok, const std::string& msg) const {
    throw ParseError(line_.number, line_.tokens.at(tok).column, msg);
  }

  bool done() const { return i_ == line_.tokens.size(); }
  std::size_t pos() const { return i_; }
  const std::string& peek() const {
    if (done()) fail("unexpected end of line");
    return line_.tokens[i_].text;
  }
  std::string next() {
    std::string s = peek();
    ++i_;
    return s;
  }
  std::string ident(const char* what) {
    if (done()) fail(std::string("expected ") + what);
    std::string s = next();
    if (!is_ident(s)) fail_at(i_ - 1, std::string("invalid ") + what + ": " + s);
    return s;
  }
  void keyword(const char* kw) {
    if (done() || peek() != kw) fail(std::string("expected '") + kw + "'");
    ++i_;
  }
  unsigned number(const char* what) {
    if (done()) fail(std::string("expected ") + what);
    std::string s = next();
    if (s.empty() || s.size() > 9 || !std::all_of(s.begin(), s.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); }))
      fail_at(i_ - 1, std::string("invalid ") + what + ": " + s);
    return static_cast<unsigned>(std::stoul(s));
  }
  /// Comma-separated list spread over the remaining tokens ("a,b", "a, b").
  std::vector<std::pair<std::string, std::size_t>> list() {
    std::vector<std::pair<std::string, std::size_t>> out;
    while (!done()) {
      std::size_t tok = i_;
      std::string s = next();
      std::size_t start = 0;
      for (;;) {
        auto comma = s.find(',', start);
        std::string item = s.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
        if (!item.empty()) out.emplace_back(item, tok);
        if (comma == std::string::npos) break;
        start = comma + 1;
      }
    }
    if (out.empty()) fail("expected a list");
    return out;
  }
  void end() {
    if (!done()) fail("unexpected token: " + peek());
  }

 private:
  const Line& line_;
  std::size_t i_ = 0;
};

inline CtsLabel parse_label_tokens(Cursor& c) {
  std::size_t tok = c.pos();
  std::string first = c.next();
  std::string payload, pol, chan;
  if (first.find_first_of("!?") != std::string::npos) {
    auto k = first.find_first_of("!?");
    payload = first.substr(0, k);
    pol = first.substr(k, 1);
    chan = first.substr(k + 1);
  } else {
    payload = first;
    pol = c.next();
    chan = c.next();
  }
  if (!is_ident(payload)) c.fail_at(tok, "invalid payload: " + payload);
  if (pol != "!" && pol != "?") c.fail_at(tok, "expected '!' or '?'");
  if (chan != kBroadcast && !is_ident(chan)) c.fail_at(tok, "invalid channel: " + chan);
  return CtsLabel{payload, pol == "!", chan};
}

template <class F>
auto semantic(std::size_t line, F&& f) {
  try {
    return f();
  } catch (const ModelError& e) {
    throw ParseError(line, 1, e.what());
  }
}

inline PtiNet parse_pti_lines(const std::vector<Line>& lines) {
  PtiNet net;
  std::vector<unsigned> init;
  std::map<std::string, std::size_t> trans_line;
  {
    Cursor c(lines[0]);
    c.keyword("net");
    net.name = c.ident("net name");
    c.end();
  }
  auto require = [&](Cursor& c, std::size_t tok, const std::string& id) {
    if (!net.has_place(id) && !net.has_transition(id)) c.fail_at(tok, "unknown id: " + id);
  };
  for (std::size_t k = 1; k < lines.size(); ++k) {
    Cursor c(lines[k]);
    std::string kw = c.next();
    if (kw == "place") {
      std::size_t tok = c.pos();
      std::string p = c.ident("place name");
      if (net.has_place(p) || net.has_transition(p)) c.fail_at(tok, "duplicate id: " + p);
      unsigned n = 0;
      if (!c.done()) {
        c.keyword("init");
        n = c.number("token count");
      }
      c.end();
      net.places.push_back(p);
      init.push_back(n);
    } else if (kw == "trans") {
      std::size_t tok = c.pos();
      std::string t = c.ident("transition name");
      if (net.has_place(t) || net.has_transition(t)) c.fail_at(tok, "duplicate id: " + t);
      if (t == kInitialTransition) c.fail_at(tok, "transition id is reserved: " + t);
      c.end();
      net.transitions.push_back(t);
      trans_line[t] = lines[k].number;
    } else if (kw == "arc") {
      std::size_t ts = c.pos();
      std::string src = c.ident("arc source");
      require(c, ts, src);
      c.keyword("->");
      std::size_t td = c.pos();
      std::string dst = c.ident("arc target");
      require(c, td, dst);
      if (net.has_place(src) == net.has_place(dst)) c.fail_at(ts, "arc must connect a place and a transition");
      unsigned w = 1;
      if (!c.done()) {
        std::size_t tw = c.pos();
        w = c.number("arc weight");
        if (w == 0) c.fail_at(tw, "arc weight must be positive");
      }
      c.end();
      if (net.flow.count({src, dst})) c.fail_at(ts, "duplicate arc: " + src + " -> " + dst);
      net.flow[{src, dst}] = w;
    } else if (kw == "inhibit") {
      std::size_t tp = c.pos();
      std::string p = c.ident("place name");
      if (!net.has_place(p)) c.fail_at(tp, "unknown place: " + p);
      std::size_t tt = c.pos();
      std::string t = c.ident("transition name");
      if (!net.has_transition(t)) c.fail_at(tt, "unknown transition: " + t);
      c.end();
      net.inhibitors.insert({p, t});
    } else {
      c.fail_at(0, "unknown declaration: " + kw);
    }
  }
  net.initial = Marking(init);
  for (const auto& t : net.transitions) {
    bool any = false;
    for (const auto& p : net.places) any = any || net.weight(p, t) > 0;
    if (!any) throw ParseError(trans_line[t], 1, "transition has an empty preset: " + t);
  }
  semantic(lines[0].number, [&] { check_net(net); });
  return net;
}

inline CtsSystem parse_cts_lines(const std::vector<Line>& lines, const std::string& name) {
  CtsSystem sys;
  sys.name = name;
  CtsAgent* cur = nullptr;
  std::size_t agent_line = 0;
  auto close = [&] {
    if (cur && cur->initial.empty()) throw ParseError(agent_line, 1, "agent " + cur->name + " has no init line");
  };
  for (std::size_t k = 1; k < lines.size(); ++k) {
    Cursor c(lines[k]);
    std::string kw = c.next();
    if (kw == "agent") {
      close();
      std::size_t tok = c.pos();
      std::string n = c.ident("agent name");
      for (const auto& a : sys.agents)
        if (a.name == n) c.fail_at(tok, "duplicate agent: " + n);
      c.end();
      sys.agents.push_back(CtsAgent{n, {}, "", {}, {}});
      cur = &sys.agents.back();
      agent_line = lines[k].number;
      continue;
    }
    if (!cur) c.fail_at(0, "declaration outside an agent: " + kw);
    if (kw == "state") {
      std::size_t tok = c.pos();
      std::string s = c.ident("state name");
      if (cur->has_state(s)) c.fail_at(tok, "duplicate state: " + s);
      cur->states.push_back(s);
      if (!c.done()) {
        c.keyword("listen");
        for (const auto& [ch, t] : c.list()) {
          if (ch == kBroadcast) continue;
          if (!is_ident(ch)) c.fail_at(t, "invalid channel: " + ch);
          cur->listen[s].insert(ch);
        }
      }
    } else if (kw == "init") {
      std::size_t tok = c.pos();
      std::string s = c.ident("state name");
      if (!cur->initial.empty()) c.fail_at(0, "second init line");
      if (!cur->has_state(s)) c.fail_at(tok, "unknown state: " + s);
      cur->initial = s;
      c.end();
    } else if (kw == "trans") {
      std::size_t ts = c.pos();
      std::string src = c.ident("state name");
      if (!cur->has_state(src)) c.fail_at(ts, "unknown state: " + src);
      c.keyword("->");
      std::size_t td = c.pos();
      std::string dst = c.ident("state name");
      if (!cur->has_state(dst)) c.fail_at(td, "unknown state: " + dst);
      c.keyword("on");
      CtsLabel l = parse_label_tokens(c);
      c.end();
      cur->transitions.push_back({src, l, dst});
    } else {
      c.fail_at(0, "unknown declaration: " + kw);
    }
  }
  close();
  semantic(lines[0].number, [&] { check_system(sys); });
  return sys;
}

inline AsyncSystem parse_async_lines(const std::vector<Line>& lines, const std::string& name) {
  AsyncSystem sys;
  sys.name = name;
  Process* cur = nullptr;
  std::size_t proc_line = 0;
  auto close = [&] {
    if (cur && cur->initial.empty()) throw ParseError(proc_line, 1, "process " + cur->name + " has no init line");
  };
  for (std::size_t k = 1; k < lines.size(); ++k) {
    Cursor c(lines[k]);
    std::string kw = c.next();
    if (kw == "process") {
      close();
      std::size_t tok = c.pos();
      std::string n = c.ident("process name");
      for (const auto& p : sys.processes)
        if (p.name == n) c.fail_at(tok, "duplicate process: " + n);
      c.end();
      sys.processes.push_back(Process{n, {}, {}, "", {}});
      cur = &sys.processes.back();
      proc_line = lines[k].number;
      continue;
    }
    if (!cur) c.fail_at(0, "declaration outside a process: " + kw);
    if (kw == "alphabet") {
      for (const auto& [a, t] : c.list()) {
        if (!is_ident(a)) c.fail_at(t, "invalid letter: " + a);
        if (a == kInitialLetter) c.fail_at(t, "letter " + a + " is reserved");
        cur->alphabet.insert(a);
      }
    } else if (kw == "state") {
      std::size_t tok = c.pos();
      std::string s = c.ident("state name");
      if (cur->has_state(s)) c.fail_at(tok, "duplicate state: " + s);
      c.end();
      cur->states.push_back(s);
    } else if (kw == "init") {
      std::size_t tok = c.pos();
      std::string s = c.ident("state name");
      if (!cur->initial.empty()) c.fail_at(0, "second init line");
      if (!cur->has_state(s)) c.fail_at(tok, "unknown state: " + s);
      cur->initial = s;
      c.end();
    } else if (kw == "trans") {
      std::size_t ts = c.pos();
      std::string src = c.ident("state name");
      if (!cur->has_state(src)) c.fail_at(ts, "unknown state: " + src);
      c.keyword("->");
      std::size_t td = c.pos();
      std::string dst = c.ident("state name");
      if (!cur->has_state(dst)) c.fail_at(td, "unknown state: " + dst);
      c.keyword("on");
      std::size_t tl = c.pos();
      std::string a = c.ident("letter");
      if (a == kInitialLetter) c.fail_at(tl, "letter " + a + " is reserved");
      c.end();
      cur->alphabet.insert(a);
      cur->transitions.push_back({src, a, dst});
    } else {
      c.fail_at(0, "unknown declaration: " + kw);
    }
  }
  close();
  semantic(lines[0].number, [&] { check_async(sys); });
  return sys;
}

}  // namespace detail

/// Parses any of the three formats; the header and the first stanza decide
/// the kind.
inline Model parse_model(const std::string& text) {
  auto lines = detail::lex(text);
  if (lines.empty()) throw ParseError(1, 1, "missing header");
  detail::Cursor head(lines[0]);
  const std::string kw = lines[0].tokens[0].text;
  if (kw == "net") return detail::parse_pti_lines(lines);
  if (kw != "system") head.fail_at(0, "missing header: expected 'net' or 'system'");
  head.next();
  std::string name = head.ident("system name");
  head.end();
  for (std::size_t k = 1; k < lines.size(); ++k) {
    const auto& first = lines[k].tokens[0].text;
    if (first == "process") return detail::parse_async_lines(lines, name);
    if (first == "agent") break;
  }
  return detail::parse_cts_lines(lines, name);
}

inline ModelKind kind_of(const Model& m) {
  return static_cast<ModelKind>(m.index());
}

template <class T>
T parse_as(const std::string& text) {
  Model m = parse_model(text);
  if (auto* p = std::get_if<T>(&m)) return std::move(*p);
  throw ParseError(1, 1, std::string("model is a ") + to_string(kind_of(m)) + " model");
}

inline PtiNet parse_pti(const std::string& text) { return parse_as<PtiNet>(text); }
inline CtsSystem parse_cts(const std::string& text) { return parse_as<CtsSystem>(text); }
inline AsyncSystem parse_async(const std::string& text) { return parse_as<AsyncSystem>(text); }

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline Model load_model(const std::string& path) { return parse_model(read_file(path)); }

inline std::string emit_pti(const PtiNet& net) {
  std::ostringstream o;
  o << "net " << net.name << "\n";
  for (std::size_t i = 0; i < net.places.size(); ++i) {
    o << "place " << net.places[i];
    if (net.initial[i]) o << " init " << net.initial[i];
    o << "\n";
  }
  for (const auto& t : net.transitions) o << "trans " << t << "\n";
  for (const auto& [arc, w] : net.flow) {
    o << "arc " << arc.first << " -> " << arc.second;
    if (w != 1) o << " " << w;
    o << "\n";
  }
  for (const auto& [p, t] : net.inhibitors) o << "inhibit " << p << " " << t << "\n";
  return o.str();
}

inline std::string emit_cts(const CtsSystem& sys) {
  std::ostringstream o;
  o << "system " << sys.name << "\n";
  for (const auto& a : sys.agents) {
    o << "agent " << a.name << "\n";
    for (const auto& s : a.states) {
      o << "state " << s;
      if (auto it = a.listen.find(s); it != a.listen.end() && !it->second.empty()) {
        o << " listen ";
        bool first = true;
        for (const auto& c : it->second) o << (first ? "" : ",") << c, first = false;
      }
      o << "\n";
    }
    o << "init " << a.initial << "\n";
    for (const auto& t : a.transitions)
      o << "trans " << t.src << " -> " << t.dst << " on " << t.label.payload << " " << (t.label.send ? "!" : "?")
        << " " << t.label.channel << "\n";
  }
  return o.str();
}

inline std::string emit_async(const AsyncSystem& sys) {
  std::ostringstream o;
  o << "system " << sys.name << "\n";
  for (const auto& p : sys.processes) {
    o << "process " << p.name << "\n";
    std::set<std::string> used;
    for (const auto& t : p.transitions) used.insert(t.letter);
    if (used != p.alphabet) {
      o << "alphabet ";
      bool first = true;
      for (const auto& a : p.alphabet) o << (first ? "" : ",") << a, first = false;
      o << "\n";
    }
    for (const auto& s : p.states) o << "state " << s << "\n";
    o << "init " << p.initial << "\n";
    for (const auto& t : p.transitions) o << "trans " << t.src << " -> " << t.dst << " on " << t.letter << "\n";
  }
  return o.str();
}

inline std::string emit_model(const Model& m) {
  return std::visit(
      [](const auto& x) -> std::string {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, PtiNet>) return emit_pti(x);
        else if constexpr (std::is_same_v<T, CtsSystem>) return emit_cts(x);
        else return emit_async(x);
      },
      m);
}

}  // namespace gluepo
