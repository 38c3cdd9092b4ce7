#pragma once

// LPO and g-LPO computations of CTS systems.
//
// Element ids:
//   history  H[<agent>|<s0>/<s1>/...]
//   edge     E[<label>|<sender history>><dst>|<receiver history>><dst>,...]
//   e_eps    E[init!*]

#include <algorithm>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "gluepo/core_po.hpp"
#include "gluepo/cts.hpp"

namespace gluepo {

enum class MulticastBlockMode { listening, cannot_receive };

inline const char* to_string(MulticastBlockMode m) {
  return m == MulticastBlockMode::listening ? "listening" : "cannot-receive";
}

inline const CtsLabel kInitialLabel{"init", true, kBroadcast};

struct AgentHistory {
  std::size_t agent_index = 0;
  std::vector<std::string> states;

  const std::string& last() const { return states.back(); }
  auto operator<=>(const AgentHistory&) const = default;
  bool operator==(const AgentHistory&) const = default;
};

inline ElementId history_id(const CtsSystem& sys, const AgentHistory& h) {
  std::string s = "H[" + sys.agents.at(h.agent_index).name + "|";
  for (std::size_t i = 0; i < h.states.size(); ++i) s += (i ? "/" : "") + h.states[i];
  return ElementId(s + "]");
}

inline std::string history_label(const CtsSystem& sys, const AgentHistory& h) {
  std::string s = sys.agents.at(h.agent_index).name + ":";
  for (std::size_t i = 0; i < h.states.size(); ++i) s += (i ? "/" : "") + h.states[i];
  return s;
}

inline ElementId initial_edge_id() { return ElementId("E[" + kInitialLabel.str() + "]"); }

/// Canonical edge identity: label plus each participant's predecessor
/// history and target state, sender first, receivers in agent order.
struct CtsEdgeId {
  CtsLabel label;
  std::vector<std::pair<ElementId, std::string>> participants;  // [0] is the sender

  ElementId id() const {
    if (participants.empty()) return initial_edge_id();
    std::string s = "E[" + label.str() + "|" + participants[0].first.str() + ">" + participants[0].second + "|";
    for (std::size_t i = 1; i < participants.size(); ++i)
      s += (i > 1 ? "," : "") + participants[i].first.str() + ">" + participants[i].second;
    return ElementId(s + "]");
  }
};

namespace detail {

inline std::optional<AgentHistory> parse_history_id(const CtsSystem& sys, const std::string& s) {
  if (s.size() < 5 || s.compare(0, 2, "H[") != 0 || s.back() != ']') return std::nullopt;
  auto bar = s.find('|');
  if (bar == std::string::npos) return std::nullopt;
  std::string agent = s.substr(2, bar - 2);
  AgentHistory h;
  bool found = false;
  for (std::size_t i = 0; i < sys.agents.size(); ++i)
    if (sys.agents[i].name == agent) {
      h.agent_index = i;
      found = true;
    }
  if (!found) return std::nullopt;
  std::string body = s.substr(bar + 1, s.size() - bar - 2);
  std::size_t start = 0;
  for (;;) {
    auto slash = body.find('/', start);
    h.states.push_back(body.substr(start, slash == std::string::npos ? std::string::npos : slash - start));
    if (slash == std::string::npos) break;
    start = slash + 1;
  }
  for (const auto& st : h.states)
    if (st.empty()) return std::nullopt;
  return h;
}

inline std::optional<CtsEdgeId> parse_edge_id(const std::string& s) {
  if (s == initial_edge_id().str()) return CtsEdgeId{kInitialLabel, {}};
  if (s.size() < 4 || s.compare(0, 2, "E[") != 0 || s.back() != ']') return std::nullopt;
  std::string body = s.substr(2, s.size() - 3);
  auto bar = body.find('|');
  if (bar == std::string::npos) return std::nullopt;
  CtsEdgeId e;
  try {
    e.label = parse_cts_label(body.substr(0, bar));
  } catch (const ModelError&) {
    return std::nullopt;
  }
  // Remaining: <hist>><dst>|<hist>><dst>,... where hist is H[...] with no
  // nested brackets.
  std::size_t pos = bar + 1;
  auto part = [&]() -> std::optional<std::pair<ElementId, std::string>> {
    if (body.compare(pos, 2, "H[") != 0) return std::nullopt;
    auto close = body.find(']', pos);
    if (close == std::string::npos || close + 1 >= body.size() || body[close + 1] != '>') return std::nullopt;
    ElementId h(body.substr(pos, close + 1 - pos));
    std::size_t d0 = close + 2;
    std::size_t d1 = body.find_first_of("|,", d0);
    if (d1 == std::string::npos) d1 = body.size();
    if (d1 == d0) return std::nullopt;
    std::string dst = body.substr(d0, d1 - d0);
    pos = d1;
    return std::pair{h, dst};
  };
  auto sender = part();
  if (!sender || pos >= body.size() || body[pos] != '|') return std::nullopt;
  e.participants.push_back(*sender);
  ++pos;
  while (pos < body.size()) {
    auto r = part();
    if (!r) return std::nullopt;
    e.participants.push_back(*r);
    if (pos < body.size()) {
      if (body[pos] != ',') return std::nullopt;
      ++pos;
    }
  }
  return e;
}

/// Whether history state `state` of `agent` must be ordered against an
/// event labelled `send` (C4(c)/(d) and the glue conditions).
inline bool must_order(const CtsAgent& agent, const std::string& state, const CtsLabel& send,
                       MulticastBlockMode mode) {
  if (send.is_broadcast()) return agent.can_receive(state, send);
  if (mode == MulticastBlockMode::listening) return agent.listens(state, send.channel);
  return agent.cannot_receive(state, send);
}

/// Pairs of `pairs` not implied by the order generated by lpo.comm and the
/// other pairs.
inline Relation unimplied_pairs(const Lpo& lpo, const Relation& pairs) {
  Lpo tmp = lpo;
  tmp.interleave = pairs;
  OrderIndex idx(tmp);
  Relation out;
  for (const auto& [a, b] : pairs) {
    const std::size_t ia = idx.index(a), ib = idx.index(b);
    bool implied = false;
    for (auto s : idx.successors(ia)) implied = implied || (s != ib && idx.leq(s, ib));
    if (!implied) out.emplace(a, b);
  }
  return out;
}

struct RunHistory {
  AgentHistory h;
  ElementId id;
  std::size_t creator = 0;
  std::optional<std::size_t> exit;
};

}  // namespace detail

inline void check_cts_for_computations(const CtsSystem& sys) {
  check_system(sys);
  for (const auto& a : sys.agents)
    for (const auto& t : a.transitions)
      if (t.label.payload == kInitialLabel.payload && t.label.channel == kBroadcast)
        throw ModelError("payload " + kInitialLabel.payload + " on the broadcast channel is reserved");
}

/// The LPO-computation of an execution. `exec` must be a sequence of steps
/// each returned by system_step at the state reached so far.
inline Lpo lpo_from_execution(const CtsSystem& sys, const CtsExecution& exec,
                              MulticastBlockMode mode = MulticastBlockMode::listening) {
  const std::size_t n = sys.agents.size();
  std::vector<detail::RunHistory> hist;
  std::vector<std::size_t> current(n);
  std::vector<ElementId> edge_ids{initial_edge_id()};
  std::vector<CtsLabel> labels{kInitialLabel};
  Lpo lpo;
  lpo.edges.insert(edge_ids[0]);
  lpo.edge_label[edge_ids[0]] = kInitialLabel.str();
  auto add_history = [&](AgentHistory h, std::size_t creator) {
    detail::RunHistory r{h, history_id(sys, h), creator, std::nullopt};
    lpo.nodes.insert(r.id);
    lpo.node_label[r.id] = history_label(sys, h);
    lpo.comm.emplace(edge_ids[creator], r.id);
    current[h.agent_index] = hist.size();
    hist.push_back(std::move(r));
  };
  for (std::size_t i = 0; i < n; ++i) add_history({i, {sys.agents[i].initial}}, 0);

  std::vector<std::string> states = initial_states(sys);
  for (std::size_t k = 0; k < exec.size(); ++k) {
    const CtsStep& st = exec[k];
    auto legal = system_step(sys, states, st.label);
    if (!std::binary_search(legal.begin(), legal.end(), st))
      throw ModelError("step " + std::to_string(k + 1) + " (" + st.label.str() + ") is not enabled");
    CtsEdgeId eid{st.label, {}};
    const LocalMove* sender = nullptr;
    for (const auto& m : st.moves)
      if (m.sender) sender = &m;
    eid.participants.emplace_back(hist[current[sender->agent]].id, sender->to);
    for (const auto& m : st.moves)
      if (!m.sender) eid.participants.emplace_back(hist[current[m.agent]].id, m.to);
    const std::size_t pos = edge_ids.size();
    ElementId e = eid.id();
    edge_ids.push_back(e);
    labels.push_back(st.label);
    lpo.edges.insert(e);
    lpo.edge_label[e] = st.label.str();
    for (const auto& m : st.moves) {
      auto& pre = hist[current[m.agent]];
      pre.exit = pos;
      lpo.comm.emplace(pre.id, e);
      AgentHistory next = pre.h;
      next.states.push_back(m.to);
      add_history(std::move(next), pos);
    }
    states = apply_step(states, st);
  }

  // Same-channel events, consecutive in the schedule.
  Relation channel_pairs;
  std::map<std::string, std::size_t> last_on;
  for (std::size_t k = 1; k < edge_ids.size(); ++k) {
    const auto& c = labels[k].channel;
    if (auto it = last_on.find(c); it != last_on.end()) channel_pairs.emplace(edge_ids[it->second], edge_ids[k]);
    last_on[c] = k;
  }
  // Reconfiguration: a history that must see event k exited before it or was
  // created after it.
  Relation reconf;
  for (std::size_t k = 1; k < edge_ids.size(); ++k) {
    for (const auto& r : hist) {
      if (!detail::must_order(sys.agents[r.h.agent_index], r.h.last(), labels[k], mode)) continue;
      if (r.exit && *r.exit < k) {
        reconf.emplace(edge_ids[*r.exit], edge_ids[k]);
      } else if (r.creator > k) {
        reconf.emplace(edge_ids[k], edge_ids[r.creator]);
      } else if (r.creator < k && (!r.exit || *r.exit > k)) {
        throw ModelError("history " + r.id.str() + " was current but did not take part in " + edge_ids[k].str());
      }
    }
  }
  // Only pairs the rest of the order does not already imply are kept.
  Relation candidates = channel_pairs;
  candidates.insert(reconf.begin(), reconf.end());
  lpo.interleave = detail::unimplied_pairs(lpo, candidates);
  return lpo;
}

namespace detail {

inline std::string channel_of(const Lpo& lpo, const ElementId& e) { return parse_cts_label(lpo.edge_label.at(e)).channel; }

}  // namespace detail

/// Checks C1-C6 (plus the generic LPO invariants).
inline ValidityReport validate_lpo_cts(const CtsSystem& sys, const Lpo& lpo,
                                       MulticastBlockMode mode = MulticastBlockMode::listening) {
  ValidityReport r = validate_lpo(lpo);
  if (!r.ok()) return r;

  std::map<ElementId, AgentHistory> hs;
  for (const auto& v : lpo.nodes) {
    auto h = detail::parse_history_id(sys, v.str());
    if (!h) {
      r.add("history", "node is not an agent history: " + v.str(), {v});
      continue;
    }
    const auto& ag = sys.agents[h->agent_index];
    bool ok = h->states.front() == ag.initial;
    for (std::size_t i = 0; ok && i < h->states.size(); ++i) ok = ag.has_state(h->states[i]);
    for (std::size_t i = 0; ok && i + 1 < h->states.size(); ++i) {
      bool step = false;
      for (const auto& t : ag.transitions) step = step || (t.src == h->states[i] && t.dst == h->states[i + 1]);
      ok = step;
    }
    if (!ok) r.add("history", "state sequence is not a history of " + ag.name + ": " + v.str(), {v});
    if (lpo.node_label.at(v) != history_label(sys, *h)) r.add("history", "node label differs from its history", {v});
    hs.emplace(v, std::move(*h));
  }
  std::map<ElementId, CtsLabel> ls;
  std::map<ElementId, CtsEdgeId> eids;
  for (const auto& e : lpo.edges) {
    auto p = detail::parse_edge_id(e.str());
    if (!p) {
      r.add("history", "edge id is not canonical: " + e.str(), {e});
      continue;
    }
    if (lpo.edge_label.at(e) != p->label.str()) r.add("history", "edge label differs from its id", {e});
    if (!p->label.send) r.add("history", "edge label is not a send: " + e.str(), {e});
    ls.emplace(e, p->label);
    eids.emplace(e, std::move(*p));
  }
  if (!r.ok()) return r;

  std::map<ElementId, std::vector<ElementId>> in_c, out_c;
  for (const auto& [a, b] : lpo.comm) {
    out_c[a].push_back(b);
    in_c[b].push_back(a);
  }
  OrderIndex idx(lpo);
  const ElementId eps = initial_edge_id();

  // C1
  if (!lpo.is_edge(eps)) {
    r.add("C1", "e_eps is missing");
  } else {
    for (const auto& x : idx.elements())
      if (!idx.leq(eps, x)) r.add("C1", "e_eps is not below " + x.str(), {x});
    for (std::size_t i = 0; i < sys.agents.size(); ++i) {
      ElementId s0 = history_id(sys, {i, {sys.agents[i].initial}});
      if (!lpo.is_node(s0) || !lpo.comm.count({eps, s0}))
        r.add("C1", "initial history of " + sys.agents[i].name + " not fed by e_eps", {s0});
    }
  }

  // C2, C3
  for (const auto& [v, h] : hs) {
    const auto& prods = in_c[v];
    if (prods.size() != 1) {
      r.add("C2", "history needs exactly one producing edge: " + v.str(), {v});
      continue;
    }
    const ElementId& e = prods.front();
    if (h.states.size() == 1) {
      if (e != eps) r.add("C2", "initial history produced by a non-initial edge: " + v.str(), {v, e});
    } else {
      AgentHistory prev{h.agent_index, {h.states.begin(), h.states.end() - 1}};
      ElementId pv = history_id(sys, prev);
      const auto& ag = sys.agents[h.agent_index];
      const CtsLabel& l = ls.at(e);
      if (!lpo.is_node(pv) || !lpo.comm.count({pv, e}))
        r.add("C2", "predecessor history of " + v.str() + " does not lead to its producer", {v, e});
      else if (!ag.has_transition(prev.last(), l, h.last()) && !ag.has_transition(prev.last(), l.as_receive(), h.last()))
        r.add("C2", "step into " + v.str() + " is not a transition of " + ag.name, {v, e});
    }
    if (out_c[v].size() > 1) r.add("C3", "history has more than one successor edge: " + v.str(), {v});
  }

  // C4
  for (const auto& [e, eid] : eids) {
    if (e == eps) continue;
    std::map<std::size_t, ElementId> pre, post;
    bool ok = true;
    for (const auto& x : in_c[e]) {
      const auto& h = hs.at(x);
      ok = pre.emplace(h.agent_index, x).second && ok;
    }
    for (const auto& x : out_c[e]) {
      const auto& h = hs.at(x);
      ok = post.emplace(h.agent_index, x).second && ok;
    }
    bool same_agents = pre.size() == post.size() &&
                       std::equal(pre.begin(), pre.end(), post.begin(), [](const auto& a, const auto& b) { return a.first == b.first; });
    if (!ok || !same_agents || pre.empty()) {
      r.add("C4(a)", "participants need one pre- and one post-history each: " + e.str(), {e});
      continue;
    }
    // The id names the sender first; it must agree with the comm structure.
    std::set<ElementId> id_pre;
    for (const auto& [h, dst] : eid.participants) id_pre.insert(h);
    std::set<ElementId> got_pre(in_c[e].begin(), in_c[e].end());
    if (id_pre != got_pre) r.add("C4(a)", "edge id does not match its preset: " + e.str(), {e});
    std::size_t senders = 0;
    for (std::size_t i = 0; i < eid.participants.size(); ++i) {
      const auto& [hid, dst] = eid.participants[i];
      if (!hs.count(hid)) continue;
      const auto& h = hs.at(hid);
      const auto& ag = sys.agents[h.agent_index];
      AgentHistory nxt = h;
      nxt.states.push_back(dst);
      if (post.count(h.agent_index) && post.at(h.agent_index) != history_id(sys, nxt))
        r.add("C4(a)", "post-history of " + ag.name + " does not extend its pre-history", {e});
      if (i == 0) {
        if (ag.has_transition(h.last(), eid.label, dst)) ++senders;
      } else if (!ag.has_transition(h.last(), eid.label.as_receive(), dst)) {
        r.add("C4(b)", ag.name + " cannot receive " + eid.label.str() + " into " + dst, {e});
      }
    }
    if (senders != 1) r.add("C4(b)", "edge needs exactly one sender: " + e.str(), {e});

    const std::string rule = eid.label.is_broadcast() ? "C4(d)" : "C4(c)";
    for (const auto& [v, h] : hs)
      if (detail::must_order(sys.agents[h.agent_index], h.last(), eid.label, mode) && !idx.comparable(v, e))
        r.add(rule, "history " + v.str() + " unordered with " + e.str(), {v, e});
  }

  // C5
  std::map<std::string, std::vector<ElementId>> by_channel;
  for (const auto& [e, l] : ls) by_channel[l.channel].push_back(e);
  for (const auto& [c, es] : by_channel)
    for (std::size_t i = 0; i < es.size(); ++i)
      for (std::size_t j = i + 1; j < es.size(); ++j)
        if (!idx.comparable(es[i], es[j]))
          r.add("C5", "events on channel " + c + " unordered: " + detail::pair_text({es[i], es[j]}), {es[i], es[j]});

  // C6
  for (const auto& [e, e2] : lpo.interleave) {
    const CtsLabel& l = ls.at(e);
    const CtsLabel& l2 = ls.at(e2);
    bool ok = l.channel == l2.channel;
    for (const auto& h : in_c[e]) {
      const auto& ah = hs.at(h);
      ok = ok || detail::must_order(sys.agents[ah.agent_index], ah.last(), l2, mode);
    }
    for (const auto& h : out_c[e2]) {
      const auto& ah = hs.at(h);
      ok = ok || detail::must_order(sys.agents[ah.agent_index], ah.last(), l, mode);
    }
    if (!ok) r.add("C6", "interleaving pair not justified: " + detail::pair_text({e, e2}), {e, e2});
  }
  return r;
}

/// The g-computation of a CTS LPO-computation: only same-channel
/// interleaving is kept, and each send label is glued to the comm pairs of
/// the histories it must be ordered against.
inline GluedLpo glpo_from_lpo_cts(const CtsSystem& sys, const Lpo& lpo,
                                  MulticastBlockMode mode = MulticastBlockMode::listening) {
  // Same-channel pairs are kept unless comm and the other same-channel
  // pairs already imply them.
  Lpo base = lpo;
  Relation same;
  for (const auto& [e, e2] : lpo.interleave)
    if (detail::channel_of(lpo, e) == detail::channel_of(lpo, e2)) same.emplace(e, e2);
  base.interleave = detail::unimplied_pairs(lpo, same);
  std::map<ElementId, AgentHistory> hs;
  for (const auto& v : lpo.nodes) {
    auto h = detail::parse_history_id(sys, v.str());
    if (!h) throw ModelError("node is not an agent history: " + v.str());
    hs.emplace(v, std::move(*h));
  }
  std::map<std::string, Relation> per_label;
  for (const auto& l : sys.send_labels()) {
    Relation& rel = per_label[l.str()];
    for (const auto& p : lpo.comm) {
      const ElementId& v = lpo.is_node(p.first) ? p.first : p.second;
      const auto& h = hs.at(v);
      if (detail::must_order(sys.agents[h.agent_index], h.last(), l, mode)) rel.insert(p);
    }
  }
  return GluedLpo::make(std::move(base), per_label);
}

struct CtsEnumerateOptions {
  unsigned max_events = 0;
  bool maximal_only = false;
  MulticastBlockMode mode = MulticastBlockMode::listening;
  std::optional<std::uint64_t> shuffle_seed;
};

struct CtsComputations {
  LpoSet lpos;
  GluedLpoSet glpos;
};

inline CtsComputations enumerate_computations_cts(const CtsSystem& sys, const CtsEnumerateOptions& opt) {
  check_cts_for_computations(sys);
  CtsComputations out;
  std::optional<std::mt19937_64> rng;
  if (opt.shuffle_seed) rng.emplace(*opt.shuffle_seed);
  CtsExecution cur;
  auto rec = [&](auto& self, const std::vector<std::string>& states) -> void {
    out.lpos.insert(lpo_from_execution(sys, cur, opt.mode));
    if (cur.size() == opt.max_events) return;
    auto steps = enabled_steps(sys, states);
    if (rng) std::shuffle(steps.begin(), steps.end(), *rng);
    for (const auto& st : steps) {
      cur.push_back(st);
      self(self, apply_step(states, st));
      cur.pop_back();
    }
  };
  rec(rec, initial_states(sys));
  if (opt.maximal_only) out.lpos = maximal_filter(out.lpos);
  for (const auto& l : out.lpos) out.glpos.insert(glpo_from_lpo_cts(sys, l, opt.mode));
  return out;
}

inline CtsComputations enumerate_computations_cts(const CtsSystem& sys, unsigned max_events, bool maximal_only = false,
                                                  MulticastBlockMode mode = MulticastBlockMode::listening) {
  return enumerate_computations_cts(sys, CtsEnumerateOptions{max_events, maximal_only, mode, std::nullopt});
}

/// CTS analogue of check_refinement_theorem_pn.
inline TheoremReport check_refinement_theorem_cts(const CtsSystem& sys, unsigned max_events,
                                                  MulticastBlockMode mode = MulticastBlockMode::listening) {
  TheoremReport rep;
  auto comps = enumerate_computations_cts(sys, max_events, false, mode);
  rep.lpos = comps.lpos.size();
  rep.glpos = comps.glpos.size();
  auto fail = [&](std::string why) {
    rep.holds = false;
    rep.counterexample = std::move(why);
    return rep;
  };
  std::map<GluedLpo, std::vector<Lpo>> refs;
  for (const auto& g : comps.glpos) {
    auto rs = refinements(g);
    rep.refinements += rs.size();
    for (const auto& r : rs) {
      auto v = validate_lpo_cts(sys, r, mode);
      if (!v.ok()) return fail("refinement is not a computation: " + v.summary());
      if (rep.image_stable && glpo_from_lpo_cts(sys, r, mode) != g) {
        rep.image_stable = false;
        rep.unstable_example = "refinement maps to a different g-LPO";
      }
    }
    refs.emplace(g, std::move(rs));
  }
  for (const auto& l : comps.lpos) {
    auto v = validate_lpo_cts(sys, l, mode);
    if (!v.ok()) return fail("generated LPO is not a computation: " + v.summary());
    auto g = glpo_from_lpo_cts(sys, l, mode);
    auto res = refines(l, g);
    if (!res) return fail("LPO does not refine its g-LPO: clause " + std::to_string(res.clause) + ": " + res.detail);
    const auto& rs = refs.at(g);
    if (!std::binary_search(rs.begin(), rs.end(), l)) return fail("LPO missing from the refinements of its g-LPO");
  }
  return rep;
}

}  // namespace gluepo
