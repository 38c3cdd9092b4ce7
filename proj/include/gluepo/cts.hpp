#pragma once

// Channelled transition systems: agents with a per-state listening function,
// binary parallel composition, and the n-ary step relation in which a
// multicast blocks until every listener receives and a broadcast goes ahead
// with whoever can take it.

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "gluepo/core_po.hpp"
#include "gluepo/pti_net.hpp"

namespace gluepo {

inline const std::string kBroadcast = "*";

struct CtsLabel {
  std::string payload;
  bool send = true;
  std::string channel;

  bool is_broadcast() const { return channel == kBroadcast; }
  CtsLabel as_receive() const { return {payload, false, channel}; }
  CtsLabel as_send() const { return {payload, true, channel}; }
  std::string str() const { return payload + (send ? "!" : "?") + channel; }

  auto operator<=>(const CtsLabel&) const = default;
  bool operator==(const CtsLabel&) const = default;
};

/// Parses "v1!c" / "v1?*".
inline CtsLabel parse_cts_label(const std::string& text) {
  auto pos = text.find_first_of("!?");
  if (pos == std::string::npos || pos == 0 || pos + 1 >= text.size())
    throw ModelError("malformed channel label: " + text);
  return {text.substr(0, pos), text[pos] == '!', text.substr(pos + 1)};
}

struct CtsTransition {
  std::string src;
  CtsLabel label;
  std::string dst;

  auto operator<=>(const CtsTransition&) const = default;
  bool operator==(const CtsTransition&) const = default;
};

struct CtsAgent {
  std::string name;
  std::vector<std::string> states;
  std::string initial;
  /// Explicitly listened channels per state; the broadcast channel is
  /// always listened and is never stored here.
  std::map<std::string, std::set<std::string>> listen;
  std::vector<CtsTransition> transitions;

  bool operator==(const CtsAgent&) const = default;

  bool has_state(const std::string& s) const { return std::find(states.begin(), states.end(), s) != states.end(); }

  bool listens(const std::string& state, const std::string& channel) const {
    if (channel == kBroadcast) return true;
    auto it = listen.find(state);
    return it != listen.end() && it->second.count(channel) != 0;
  }

  std::set<std::string> listening(const std::string& state) const {
    std::set<std::string> out{kBroadcast};
    if (auto it = listen.find(state); it != listen.end()) out.insert(it->second.begin(), it->second.end());
    return out;
  }

  /// Targets of transitions from `state` carrying exactly `label`.
  std::vector<std::string> targets(const std::string& state, const CtsLabel& label) const {
    std::vector<std::string> out;
    for (const auto& t : transitions)
      if (t.src == state && t.label == label) out.push_back(t.dst);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

  bool has_transition(const std::string& src, const CtsLabel& label, const std::string& dst) const {
    for (const auto& t : transitions)
      if (t.src == src && t.label == label && t.dst == dst) return true;
    return false;
  }

  /// s →_b: listening to b's channel and able to take the receive.
  bool can_receive(const std::string& state, const CtsLabel& send_label) const {
    return listens(state, send_label.channel) && !targets(state, send_label.as_receive()).empty();
  }

  /// s ↛_b: listening to b's channel but unable to take the receive.
  bool cannot_receive(const std::string& state, const CtsLabel& send_label) const {
    return listens(state, send_label.channel) && targets(state, send_label.as_receive()).empty();
  }

  std::set<std::string> channels() const {
    std::set<std::string> out{kBroadcast};
    for (const auto& [s, cs] : listen) out.insert(cs.begin(), cs.end());
    for (const auto& t : transitions) out.insert(t.label.channel);
    return out;
  }
};

struct CtsSystem {
  std::string name;
  std::vector<CtsAgent> agents;

  bool operator==(const CtsSystem&) const = default;

  std::size_t agent_index(const std::string& name_) const {
    for (std::size_t i = 0; i < agents.size(); ++i)
      if (agents[i].name == name_) return i;
    throw ModelError("unknown agent: " + name_);
  }

  /// Send labels of every agent, sorted.
  std::set<CtsLabel> send_labels() const {
    std::set<CtsLabel> out;
    for (const auto& a : agents)
      for (const auto& t : a.transitions)
        if (t.label.send) out.insert(t.label);
    return out;
  }
};

inline void check_agent(const CtsAgent& a) {
  std::set<std::string> seen;
  for (const auto& s : a.states)
    if (!seen.insert(s).second) throw ModelError("agent " + a.name + ": duplicate state " + s);
  if (a.states.empty()) throw ModelError("agent " + a.name + " has no states");
  if (!a.has_state(a.initial)) throw ModelError("agent " + a.name + ": unknown initial state " + a.initial);
  for (const auto& [s, cs] : a.listen) {
    if (!a.has_state(s)) throw ModelError("agent " + a.name + ": listening set for unknown state " + s);
    if (cs.count(kBroadcast)) throw ModelError("agent " + a.name + ": broadcast channel stored explicitly");
  }
  for (const auto& t : a.transitions)
    if (!a.has_state(t.src) || !a.has_state(t.dst))
      throw ModelError("agent " + a.name + ": transition between unknown states " + t.src + " -> " + t.dst);
}

inline void check_system(const CtsSystem& sys) {
  std::set<std::string> names;
  for (const auto& a : sys.agents) {
    if (!names.insert(a.name).second) throw ModelError("duplicate agent: " + a.name);
    check_agent(a);
  }
}

/// Binary parallel composition. Product states are named "<s1>.<s2>".
inline CtsAgent compose(const CtsAgent& a, const CtsAgent& b) {
  CtsAgent out;
  out.name = a.name + "." + b.name;
  auto pname = [](const std::string& x, const std::string& y) { return x + "." + y; };
  std::set<std::string> seen;
  for (const auto& s1 : a.states)
    for (const auto& s2 : b.states) {
      auto n = pname(s1, s2);
      if (!seen.insert(n).second) throw ModelError("product state name collision: " + n);
      out.states.push_back(n);
      std::set<std::string> ls;
      for (const auto& c : a.listening(s1)) ls.insert(c);
      for (const auto& c : b.listening(s2)) ls.insert(c);
      ls.erase(kBroadcast);
      if (!ls.empty()) out.listen[n] = ls;
    }
  out.initial = pname(a.initial, b.initial);

  std::set<CtsLabel> labels;
  for (const auto& t : a.transitions) labels.insert(t.label);
  for (const auto& t : b.transitions) labels.insert(t.label);

  std::set<CtsTransition> rel;
  for (const auto& s1 : a.states)
    for (const auto& s2 : b.states) {
      const auto src = pname(s1, s2);
      for (const auto& l : labels) {
        const auto& c = l.channel;
        auto add = [&](const std::string& d1, const std::string& d2) { rel.insert({src, l, pname(d1, d2)}); };
        auto a_l = a.targets(s1, l), b_l = b.targets(s2, l);
        auto a_r = a.targets(s1, l.as_receive()), b_r = b.targets(s2, l.as_receive());
        if (!l.is_broadcast()) {
          if (l.send) {
            if (b.listens(s2, c))
              for (const auto& d1 : a_l)
                for (const auto& d2 : b_r) add(d1, d2);
            if (a.listens(s1, c))
              for (const auto& d1 : a_r)
                for (const auto& d2 : b_l) add(d1, d2);
            if (!b.listens(s2, c))
              for (const auto& d1 : a_l) add(d1, s2);
            if (!a.listens(s1, c))
              for (const auto& d2 : b_l) add(s1, d2);
          } else {
            if (a.listens(s1, c) && b.listens(s2, c))
              for (const auto& d1 : a_l)
                for (const auto& d2 : b_l) add(d1, d2);
            if (!b.listens(s2, c))
              for (const auto& d1 : a_l) add(d1, s2);
            if (!a.listens(s1, c))
              for (const auto& d2 : b_l) add(s1, d2);
          }
        } else {
          // Both sides take part when the partner can receive; otherwise
          // the partner stays put.
          if (l.send) {
            for (const auto& d1 : a_l)
              for (const auto& d2 : b_r) add(d1, d2);
            for (const auto& d1 : a_r)
              for (const auto& d2 : b_l) add(d1, d2);
          } else {
            for (const auto& d1 : a_l)
              for (const auto& d2 : b_l) add(d1, d2);
          }
          if (b_r.empty())
            for (const auto& d1 : a_l) add(d1, s2);
          if (a_r.empty())
            for (const auto& d2 : b_l) add(s1, d2);
        }
      }
    }
  out.transitions.assign(rel.begin(), rel.end());
  return out;
}

/// One participant's part in a step.
struct LocalMove {
  std::size_t agent = 0;
  std::string from;
  std::string to;
  bool sender = false;

  auto operator<=>(const LocalMove&) const = default;
  bool operator==(const LocalMove&) const = default;
};

struct CtsStep {
  CtsLabel label;
  /// Participants in agent order; exactly one is the sender.
  std::vector<LocalMove> moves;

  std::size_t sender() const {
    for (const auto& m : moves)
      if (m.sender) return m.agent;
    return 0;
  }
  std::vector<std::size_t> participants() const {
    std::vector<std::size_t> out;
    for (const auto& m : moves) out.push_back(m.agent);
    return out;
  }

  auto operator<=>(const CtsStep&) const = default;
  bool operator==(const CtsStep&) const = default;
};

inline std::vector<std::string> initial_states(const CtsSystem& sys) {
  std::vector<std::string> out;
  for (const auto& a : sys.agents) out.push_back(a.initial);
  return out;
}

inline std::vector<std::string> apply_step(std::vector<std::string> states, const CtsStep& step) {
  for (const auto& m : step.moves) states[m.agent] = m.to;
  return states;
}

/// Every way the system can perform the send `label` from `states`.
inline std::vector<CtsStep> system_step(const CtsSystem& sys, const std::vector<std::string>& states,
                                        const CtsLabel& label) {
  if (!label.send) throw ModelError("system steps are driven by send labels: " + label.str());
  std::vector<CtsStep> out;
  const std::size_t n = sys.agents.size();
  for (std::size_t i = 0; i < n; ++i) {
    auto sends = sys.agents[i].targets(states[i], label);
    if (sends.empty()) continue;
    // Receive options per other agent; an empty option list for a required
    // receiver blocks the step.
    std::vector<std::vector<std::string>> options(n);
    std::vector<bool> takes_part(n, false);
    bool blocked = false;
    for (std::size_t j = 0; j < n && !blocked; ++j) {
      if (j == i) continue;
      const auto& ag = sys.agents[j];
      auto rcv = ag.targets(states[j], label.as_receive());
      if (label.is_broadcast()) {
        takes_part[j] = !rcv.empty();
      } else if (ag.listens(states[j], label.channel)) {
        if (rcv.empty()) blocked = true;
        takes_part[j] = true;
      }
      options[j] = std::move(rcv);
    }
    if (blocked) continue;
    for (const auto& d : sends) {
      std::vector<LocalMove> moves;
      auto rec = [&](auto& self, std::size_t j) -> void {
        if (j == n) {
          out.push_back({label, moves});
          return;
        }
        if (j == i) {
          moves.push_back({i, states[i], d, true});
          self(self, j + 1);
          moves.pop_back();
          return;
        }
        if (!takes_part[j]) {
          self(self, j + 1);
          return;
        }
        for (const auto& r : options[j]) {
          moves.push_back({j, states[j], r, false});
          self(self, j + 1);
          moves.pop_back();
        }
      };
      rec(rec, 0);
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

/// Every step enabled at `states`, labels in sorted order.
inline std::vector<CtsStep> enabled_steps(const CtsSystem& sys, const std::vector<std::string>& states) {
  std::vector<CtsStep> out;
  for (const auto& l : sys.send_labels()) {
    auto s = system_step(sys, states, l);
    out.insert(out.end(), s.begin(), s.end());
  }
  return out;
}

using CtsExecution = std::vector<CtsStep>;

/// All executions with at most `max_events` steps, prefixes included, in
/// depth-first order.
inline std::vector<CtsExecution> executions(const CtsSystem& sys, unsigned max_events) {
  std::vector<CtsExecution> out;
  CtsExecution cur;
  auto rec = [&](auto& self, const std::vector<std::string>& states) -> void {
    out.push_back(cur);
    if (cur.size() == max_events) return;
    for (const auto& st : enabled_steps(sys, states)) {
      cur.push_back(st);
      self(self, apply_step(states, st));
      cur.pop_back();
    }
  };
  rec(rec, initial_states(sys));
  return out;
}

}  // namespace gluepo
