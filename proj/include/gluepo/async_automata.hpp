#pragma once

// Asynchronous automata: a fixed set of processes that synchronize on shared
// letters. Every owner of a letter takes part in each occurrence, so
// computations need communication only and no interleaving or glue.

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "gluepo/core_po.hpp"
#include "gluepo/pti_net.hpp"

namespace gluepo {

inline const std::string kInitialLetter = "init";

struct AsyncTransition {
  std::string src;
  std::string letter;
  std::string dst;

  auto operator<=>(const AsyncTransition&) const = default;
  bool operator==(const AsyncTransition&) const = default;
};

struct Process {
  std::string name;
  std::set<std::string> alphabet;
  std::vector<std::string> states;
  std::string initial;
  std::vector<AsyncTransition> transitions;

  bool operator==(const Process&) const = default;

  bool has_state(const std::string& s) const { return std::find(states.begin(), states.end(), s) != states.end(); }
  bool owns(const std::string& letter) const { return alphabet.count(letter) != 0; }

  std::vector<std::string> targets(const std::string& state, const std::string& letter) const {
    std::vector<std::string> out;
    for (const auto& t : transitions)
      if (t.src == state && t.letter == letter) out.push_back(t.dst);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }
};

struct AsyncSystem {
  std::string name;
  std::vector<Process> processes;

  bool operator==(const AsyncSystem&) const = default;

  std::set<std::string> alphabet() const {
    std::set<std::string> out;
    for (const auto& p : processes) out.insert(p.alphabet.begin(), p.alphabet.end());
    return out;
  }

  std::vector<std::size_t> owners(const std::string& letter) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < processes.size(); ++i)
      if (processes[i].owns(letter)) out.push_back(i);
    return out;
  }
};

inline void check_async(const AsyncSystem& sys) {
  std::set<std::string> names;
  for (const auto& p : sys.processes) {
    if (!names.insert(p.name).second) throw ModelError("duplicate process: " + p.name);
    std::set<std::string> seen;
    for (const auto& s : p.states)
      if (!seen.insert(s).second) throw ModelError("process " + p.name + ": duplicate state " + s);
    if (!p.has_state(p.initial)) throw ModelError("process " + p.name + ": unknown initial state " + p.initial);
    if (p.owns(kInitialLetter)) throw ModelError("letter " + kInitialLetter + " is reserved");
    for (const auto& t : p.transitions) {
      if (!p.has_state(t.src) || !p.has_state(t.dst))
        throw ModelError("process " + p.name + ": transition between unknown states " + t.src + " -> " + t.dst);
      if (!p.owns(t.letter)) throw ModelError("process " + p.name + ": letter not in alphabet: " + t.letter);
    }
  }
}

/// One joint move: the chosen target of every owner of `letter`, in process
/// order.
struct AsyncStep {
  std::string letter;
  std::vector<std::pair<std::size_t, std::string>> moves;

  auto operator<=>(const AsyncStep&) const = default;
  bool operator==(const AsyncStep&) const = default;
};

inline std::vector<AsyncStep> async_steps(const AsyncSystem& sys, const std::vector<std::string>& states) {
  std::vector<AsyncStep> out;
  for (const auto& a : sys.alphabet()) {
    auto own = sys.owners(a);
    std::vector<std::vector<std::string>> opts;
    bool ok = true;
    for (auto i : own) {
      opts.push_back(sys.processes[i].targets(states[i], a));
      ok = ok && !opts.back().empty();
    }
    if (!ok) continue;
    AsyncStep cur{a, {}};
    auto rec = [&](auto& self, std::size_t k) -> void {
      if (k == own.size()) {
        out.push_back(cur);
        return;
      }
      for (const auto& d : opts[k]) {
        cur.moves.emplace_back(own[k], d);
        self(self, k + 1);
        cur.moves.pop_back();
      }
    };
    rec(rec, 0);
  }
  return out;
}

namespace detail {

inline ElementId async_history_id(const std::string& proc, const std::vector<std::string>& states) {
  std::string s = "H[" + proc + "|";
  for (std::size_t i = 0; i < states.size(); ++i) s += (i ? "/" : "") + states[i];
  return ElementId(s + "]");
}

inline std::string async_history_label(const std::string& proc, const std::vector<std::string>& states) {
  std::string s = proc + ":";
  for (std::size_t i = 0; i < states.size(); ++i) s += (i ? "/" : "") + states[i];
  return s;
}

inline ElementId async_edge_id(const std::string& letter,
                               const std::vector<std::pair<ElementId, std::string>>& participants) {
  std::string s = "E[" + letter;
  if (!participants.empty()) s += "|";
  for (std::size_t i = 0; i < participants.size(); ++i)
    s += (i ? "," : "") + participants[i].first.str() + ">" + participants[i].second;
  return ElementId(s + "]");
}

inline ElementId async_initial_edge() { return async_edge_id(kInitialLetter, {}); }

}  // namespace detail

/// LPO-computations of every step sequence with at most `max_events` steps.
inline LpoSet enumerate_computations_async(const AsyncSystem& sys, unsigned max_events) {
  check_async(sys);
  LpoSet out;
  const std::size_t n = sys.processes.size();
  Lpo lpo;
  const ElementId e0 = detail::async_initial_edge();
  lpo.edges.insert(e0);
  lpo.edge_label[e0] = kInitialLetter;
  std::vector<std::vector<std::string>> hist(n);
  for (std::size_t i = 0; i < n; ++i) {
    hist[i] = {sys.processes[i].initial};
    ElementId h = detail::async_history_id(sys.processes[i].name, hist[i]);
    lpo.nodes.insert(h);
    lpo.node_label[h] = detail::async_history_label(sys.processes[i].name, hist[i]);
    lpo.comm.emplace(e0, h);
  }
  auto rec = [&](auto& self, unsigned depth) -> void {
    out.insert(lpo);
    if (depth == max_events) return;
    std::vector<std::string> states(n);
    for (std::size_t i = 0; i < n; ++i) states[i] = hist[i].back();
    for (const auto& st : async_steps(sys, states)) {
      Lpo saved = lpo;
      auto saved_hist = hist;
      std::vector<std::pair<ElementId, std::string>> parts;
      for (const auto& [i, d] : st.moves) parts.emplace_back(detail::async_history_id(sys.processes[i].name, hist[i]), d);
      ElementId e = detail::async_edge_id(st.letter, parts);
      lpo.edges.insert(e);
      lpo.edge_label[e] = st.letter;
      for (const auto& [i, d] : st.moves) {
        const auto& name = sys.processes[i].name;
        lpo.comm.emplace(detail::async_history_id(name, hist[i]), e);
        hist[i].push_back(d);
        ElementId h = detail::async_history_id(name, hist[i]);
        lpo.nodes.insert(h);
        lpo.node_label[h] = detail::async_history_label(name, hist[i]);
        lpo.comm.emplace(e, h);
      }
      self(self, depth + 1);
      lpo = std::move(saved);
      hist = std::move(saved_hist);
    }
  };
  rec(rec, 0);
  return out;
}

/// Conditions 1-4 of an asynchronous-automaton computation; any interleaving
/// pair is a violation of its own.
inline ValidityReport validate_lpo_async(const AsyncSystem& sys, const Lpo& lpo) {
  ValidityReport r = validate_lpo(lpo);
  if (!lpo.interleave.empty()) r.add("interleave", "asynchronous automata computations have no interleaving");
  if (!r.ok()) return r;

  std::map<ElementId, std::pair<std::size_t, std::vector<std::string>>> hs;
  for (const auto& v : lpo.nodes) {
    const std::string& s = v.str();
    auto bar = s.find('|');
    bool ok = s.compare(0, 2, "H[") == 0 && s.back() == ']' && bar != std::string::npos;
    std::size_t idx = 0;
    std::vector<std::string> st;
    if (ok) {
      std::string name = s.substr(2, bar - 2);
      ok = false;
      for (std::size_t i = 0; i < sys.processes.size(); ++i)
        if (sys.processes[i].name == name) idx = i, ok = true;
      std::string body = s.substr(bar + 1, s.size() - bar - 2);
      for (std::size_t start = 0;;) {
        auto slash = body.find('/', start);
        st.push_back(body.substr(start, slash == std::string::npos ? std::string::npos : slash - start));
        if (slash == std::string::npos) break;
        start = slash + 1;
      }
    }
    if (!ok || detail::async_history_id(sys.processes[idx].name, st) != v) {
      r.add("history", "node is not a process history: " + s, {v});
      continue;
    }
    if (lpo.node_label.at(v) != detail::async_history_label(sys.processes[idx].name, st))
      r.add("history", "node label differs from its history", {v});
    hs.emplace(v, std::pair{idx, std::move(st)});
  }
  if (!r.ok()) return r;

  std::map<ElementId, std::vector<ElementId>> in_c, out_c;
  for (const auto& [a, b] : lpo.comm) {
    out_c[a].push_back(b);
    in_c[b].push_back(a);
  }
  OrderIndex idx(lpo);
  const ElementId e0 = detail::async_initial_edge();

  // 1
  if (!lpo.is_edge(e0) || lpo.edge_label.at(e0) != kInitialLetter) {
    r.add("1", "initial edge is missing");
  } else {
    for (const auto& x : idx.elements())
      if (!idx.leq(e0, x)) r.add("1", "initial edge is not below " + x.str(), {x});
    for (const auto& p : sys.processes) {
      ElementId h = detail::async_history_id(p.name, {p.initial});
      if (!lpo.comm.count({e0, h})) r.add("1", "initial history of " + p.name + " not fed by the initial edge", {h});
    }
  }
  // 2, 3
  for (const auto& [v, ph] : hs) {
    const auto& [pi, st] = ph;
    const auto& proc = sys.processes[pi];
    if (in_c[v].size() != 1) {
      r.add("2", "history needs exactly one producing edge: " + v.str(), {v});
    } else {
      const ElementId& e = in_c[v].front();
      if (st.size() == 1) {
        if (e != e0 || st.front() != proc.initial) r.add("2", "initial history not produced by the initial edge", {v});
      } else {
        std::vector<std::string> prev(st.begin(), st.end() - 1);
        ElementId pv = detail::async_history_id(proc.name, prev);
        const std::string& a = lpo.edge_label.at(e);
        auto tg = proc.targets(prev.back(), a);
        if (!lpo.comm.count({pv, e}) || !std::binary_search(tg.begin(), tg.end(), st.back()))
          r.add("2", "history " + v.str() + " is not a step of " + proc.name, {v, e});
      }
    }
    if (out_c[v].size() > 1) r.add("3", "history has more than one successor edge: " + v.str(), {v});
  }
  // 4
  for (const auto& e : lpo.edges) {
    if (e == e0) continue;
    const std::string& a = lpo.edge_label.at(e);
    auto own = sys.owners(a);
    std::map<std::size_t, ElementId> pre, post;
    bool ok = true;
    for (const auto& h : in_c[e]) ok = pre.emplace(hs.at(h).first, h).second && ok;
    for (const auto& h : out_c[e]) ok = post.emplace(hs.at(h).first, h).second && ok;
    std::vector<std::size_t> pk, qk;
    for (const auto& [k, h] : pre) pk.push_back(k);
    for (const auto& [k, h] : post) qk.push_back(k);
    if (!ok || pk != own || qk != own) {
      r.add("4(a)", "participants of " + e.str() + " are not exactly the owners of " + a, {e});
      continue;
    }
    std::vector<std::pair<ElementId, std::string>> parts;
    for (auto k : own) parts.emplace_back(pre.at(k), hs.at(post.at(k)).second.back());
    if (detail::async_edge_id(a, parts) != e) r.add("history", "edge id does not match its participants: " + e.str(), {e});
  }
  return r;
}

/// The baseline property: every computation has empty interleaving and is the
/// only refinement of its empty-glue wrapper.
struct BaselineReport {
  bool holds = true;
  std::size_t computations = 0;
  std::string counterexample;
};

inline BaselineReport check_baseline_async(const AsyncSystem& sys, unsigned max_events) {
  BaselineReport rep;
  auto all = enumerate_computations_async(sys, max_events);
  rep.computations = all.size();
  for (const auto& l : all) {
    auto v = validate_lpo_async(sys, l);
    if (!v.ok()) {
      rep.holds = false;
      rep.counterexample = "computation does not validate: " + v.summary();
      return rep;
    }
    GluedLpo g{l, {}, {}};
    auto rs = refinements(g);
    if (rs.size() != 1 || rs.front() != l) {
      rep.holds = false;
      rep.counterexample = "empty-glue wrapper has " + std::to_string(rs.size()) + " refinements";
      return rep;
    }
  }
  return rep;
}

}  // namespace gluepo
