#pragma once

// Petri nets with inhibitor arcs: structure, markings and the token game.

#include <algorithm>
#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "gluepo/core_po.hpp"

namespace gluepo {

/// Raised for structurally ill-formed models (unknown ids, empty presets...).
class ModelError : public Error {
 public:
  using Error::Error;
};

/// Name of the distinguished initial transition. Not a member of T.
inline const std::string kInitialTransition = "t_eps";

struct Marking {
  std::vector<unsigned> tokens;

  Marking() = default;
  explicit Marking(std::size_t places) : tokens(places, 0) {}
  explicit Marking(std::vector<unsigned> t) : tokens(std::move(t)) {}

  std::size_t size() const { return tokens.size(); }
  unsigned operator[](std::size_t i) const { return tokens[i]; }
  unsigned& operator[](std::size_t i) { return tokens[i]; }

  /// Componentwise ≥.
  bool covers(const Marking& other) const {
    for (std::size_t i = 0; i < tokens.size(); ++i)
      if (tokens[i] < other.tokens[i]) return false;
    return true;
  }
  Marking operator+(const Marking& o) const {
    Marking r = *this;
    for (std::size_t i = 0; i < tokens.size(); ++i) r.tokens[i] += o.tokens[i];
    return r;
  }
  Marking operator-(const Marking& o) const {
    Marking r = *this;
    for (std::size_t i = 0; i < tokens.size(); ++i) r.tokens[i] -= o.tokens[i];
    return r;
  }

  auto operator<=>(const Marking&) const = default;
  bool operator==(const Marking&) const = default;
};

struct PtiNet {
  std::string name;
  std::vector<std::string> places;
  std::vector<std::string> transitions;
  /// Arc weights keyed by (source, target); either end may be a place.
  std::map<std::pair<std::string, std::string>, unsigned> flow;
  /// (place, transition) inhibitor arcs.
  std::set<std::pair<std::string, std::string>> inhibitors;
  Marking initial;

  bool operator==(const PtiNet&) const = default;

  bool has_place(const std::string& p) const {
    return std::find(places.begin(), places.end(), p) != places.end();
  }
  bool has_transition(const std::string& t) const {
    return std::find(transitions.begin(), transitions.end(), t) != transitions.end();
  }

  std::size_t place_index(const std::string& p) const {
    auto it = std::find(places.begin(), places.end(), p);
    if (it == places.end()) throw ModelError("unknown place: " + p);
    return static_cast<std::size_t>(it - places.begin());
  }

  unsigned weight(const std::string& from, const std::string& to) const {
    auto it = flow.find({from, to});
    return it == flow.end() ? 0u : it->second;
  }

  Marking pre(const std::string& t) const {
    require_transition(t);
    Marking m(places.size());
    for (std::size_t i = 0; i < places.size(); ++i) m[i] = weight(places[i], t);
    return m;
  }

  /// Post-vector; for the initial transition this is the initial marking.
  Marking post(const std::string& t) const {
    if (t == kInitialTransition) return initial;
    require_transition(t);
    Marking m(places.size());
    for (std::size_t i = 0; i < places.size(); ++i) m[i] = weight(t, places[i]);
    return m;
  }

  std::set<std::string> inhibitor_places(const std::string& t) const {
    std::set<std::string> out;
    for (const auto& [p, tr] : inhibitors)
      if (tr == t) out.insert(p);
    return out;
  }

  bool inhibits(const std::string& place, const std::string& t) const {
    return inhibitors.count({place, t}) != 0;
  }

  /// Transitions in lexicographic id order, the enumeration order.
  std::vector<std::string> sorted_transitions() const {
    std::vector<std::string> ts = transitions;
    std::sort(ts.begin(), ts.end());
    return ts;
  }

  void require_transition(const std::string& t) const {
    if (!has_transition(t)) throw ModelError("unknown transition: " + t);
  }
};

/// Structural invariants; throws ModelError on the first violation.
inline void check_net(const PtiNet& net) {
  std::set<std::string> seen;
  for (const auto& p : net.places)
    if (!seen.insert(p).second) throw ModelError("duplicate place: " + p);
  for (const auto& t : net.transitions) {
    if (t == kInitialTransition) throw ModelError("transition id is reserved: " + t);
    if (!seen.insert(t).second) throw ModelError("id used for both a place and a transition, or twice: " + t);
  }
  for (const auto& [arc, w] : net.flow) {
    bool pt = net.has_place(arc.first) && net.has_transition(arc.second);
    bool tp = net.has_transition(arc.first) && net.has_place(arc.second);
    if (!pt && !tp) throw ModelError("arc must connect a place and a transition: " + arc.first + " -> " + arc.second);
    if (w == 0) throw ModelError("arc weight must be positive: " + arc.first + " -> " + arc.second);
  }
  for (const auto& [p, t] : net.inhibitors)
    if (!net.has_place(p) || !net.has_transition(t))
      throw ModelError("inhibitor arc must go from a place to a transition: " + p + " " + t);
  for (const auto& t : net.transitions) {
    bool any = false;
    for (const auto& p : net.places) any = any || net.weight(p, t) > 0;
    if (!any) throw ModelError("transition has an empty preset: " + t);
  }
  if (net.initial.size() != net.places.size()) throw ModelError("initial marking does not match the places");
}

/// m ≥ pre(t) and every inhibitor place of t is empty.
inline bool enabled(const PtiNet& net, const Marking& m, const std::string& t) {
  if (!m.covers(net.pre(t))) return false;
  for (const auto& p : net.inhibitor_places(t))
    if (m[net.place_index(p)] != 0) return false;
  return true;
}

inline Marking fire(const PtiNet& net, const Marking& m, const std::string& t) {
  if (!enabled(net, m, t)) throw ModelError("transition is not enabled: " + t);
  return m - net.pre(t) + net.post(t);
}

/// Every firing sequence of length ≤ max_events from the initial marking,
/// in lexicographic order (prefixes first).
inline std::vector<std::vector<std::string>> firing_sequences(const PtiNet& net, unsigned max_events) {
  std::vector<std::vector<std::string>> out;
  const auto order = net.sorted_transitions();
  std::vector<std::string> seq;
  auto dfs = [&](auto& self, const Marking& m) -> void {
    out.push_back(seq);
    if (seq.size() == max_events) return;
    for (const auto& t : order) {
      if (!enabled(net, m, t)) continue;
      seq.push_back(t);
      self(self, fire(net, m, t));
      seq.pop_back();
    }
  };
  dfs(dfs, net.initial);
  return out;
}

}  // namespace gluepo
