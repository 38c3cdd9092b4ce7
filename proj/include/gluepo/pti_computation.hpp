#pragma once

// LPO and g-LPO computations of PTI-nets: a token game that remembers which
// p-history every token belongs to, the LPO builder, the declarative
// validator, glue construction, bounded enumeration and the refinement
// theorem check.

#include <algorithm>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "gluepo/core_po.hpp"
#include "gluepo/pti_history.hpp"
#include "gluepo/pti_net.hpp"

namespace gluepo {

namespace detail {

/// A run of the token game with provenance. Tokens live in p-histories;
/// every fired t-history records its position in the run.
struct PnRun {
  std::vector<THistoryPtr> fired;               // fired[0] is t_eps
  std::vector<PHistory> created;                // every p-history, creation order
  std::map<ElementId, unsigned> remaining;      // tokens still in each p-history
  std::map<ElementId, std::size_t> fired_at;    // t-history id -> position
  std::map<ElementId, std::size_t> created_by;  // p-history id -> producer position

  Marking marking(const PtiNet& net) const {
    Marking m(net.places.size());
    for (const auto& p : created) m[net.place_index(p.place)] += remaining.at(p.id);
    return m;
  }

  void produce(const PtiNet& net, const THistoryPtr& e) {
    std::size_t pos = fired.size();
    fired.push_back(e);
    fired_at[e->id] = pos;
    for (auto& p : produced_by(net, e)) {
      remaining[p.id] = p.count;
      created_by[p.id] = pos;
      created.push_back(std::move(p));
    }
  }
};

inline PnRun initial_run(const PtiNet& net) {
  PnRun run;
  run.produce(net, initial_t_history());
  return run;
}

/// Every way to draw `need` tokens from the p-histories of `place`, as lists
/// of (p-history, taken). Sources are visited in creation order, so the
/// first split prefers the oldest tokens.
inline std::vector<std::vector<Take>> splits_for_place(const PnRun& run, const std::string& place, unsigned need) {
  std::vector<const PHistory*> sources;
  for (const auto& p : run.created)
    if (p.place == place && run.remaining.at(p.id) > 0) sources.push_back(&p);
  std::vector<std::vector<Take>> out;
  std::vector<Take> cur;
  auto rec = [&](auto& self, std::size_t i, unsigned left) -> void {
    if (left == 0) {
      out.push_back(cur);
      return;
    }
    if (i == sources.size()) return;
    unsigned avail = std::min(left, run.remaining.at(sources[i]->id));
    for (unsigned k = avail + 1; k-- > 0;) {
      if (k > 0) cur.push_back({*sources[i], k});
      self(self, i + 1, left - k);
      if (k > 0) cur.pop_back();
    }
  };
  rec(rec, 0, need);
  return out;
}

/// All t-histories firing `t` can produce in the current run. A firing whose
/// t-history already occurred (same transition, same sources, same amounts)
/// would be the same element again, so it is not offered.
inline std::vector<THistoryPtr> firings(const PtiNet& net, const PnRun& run, const std::string& t) {
  if (!enabled(net, run.marking(net), t)) return {};
  std::vector<std::vector<Take>> combos{{}};
  Marking pre = net.pre(t);
  for (std::size_t i = 0; i < net.places.size(); ++i) {
    if (pre[i] == 0) continue;
    auto splits = splits_for_place(run, net.places[i], pre[i]);
    std::vector<std::vector<Take>> next;
    for (const auto& c : combos)
      for (const auto& s : splits) {
        auto merged = c;
        merged.insert(merged.end(), s.begin(), s.end());
        next.push_back(std::move(merged));
      }
    combos = std::move(next);
  }
  std::vector<THistoryPtr> out;
  std::set<ElementId> seen;
  for (auto& c : combos) {
    auto h = make_t_history(t, std::move(c));
    if (!run.fired_at.count(h->id) && seen.insert(h->id).second) out.push_back(h);
  }
  return out;
}

inline PnRun fire_history(const PtiNet& net, PnRun run, const THistoryPtr& e) {
  for (const auto& tk : e->takes) run.remaining[tk.source.id] -= tk.taken;
  run.produce(net, e);
  return run;
}

inline Lpo lpo_of_run(const PtiNet& net, const PnRun& run) {
  Lpo lpo;
  std::map<ElementId, std::vector<std::size_t>> consumers;
  for (std::size_t i = 0; i < run.fired.size(); ++i) {
    const auto& e = run.fired[i];
    lpo.edges.insert(e->id);
    lpo.edge_label[e->id] = e->transition;
    for (const auto& tk : e->takes) {
      lpo.comm.emplace(tk.source.id, e->id);
      consumers[tk.source.id].push_back(i);
    }
  }
  for (const auto& p : run.created) {
    lpo.nodes.insert(p.id);
    lpo.node_label[p.id] = p.place;
    lpo.comm.emplace(run.fired[run.created_by.at(p.id)]->id, p.id);
  }
  // An inhibited firing happened either before the inhibiting token arrived
  // or after every token of it had left.
  for (std::size_t i = 1; i < run.fired.size(); ++i) {
    const auto& e = run.fired[i];
    auto places = net.inhibitor_places(e->transition);
    if (places.empty()) continue;
    for (const auto& v : run.created) {
      if (!places.count(v.place)) continue;
      std::size_t prod = run.created_by.at(v.id);
      if (prod > i) {
        lpo.interleave.emplace(e->id, run.fired[prod]->id);
      } else if (prod < i) {
        unsigned used = 0;
        for (std::size_t c : consumers[v.id]) {
          if (c > i) throw ModelError("token of " + v.id.str() + " still present when an inhibited transition fired");
          used += run.fired[c]->taken_from(v.id);
          lpo.interleave.emplace(run.fired[c]->id, e->id);
        }
        if (used != v.count) throw ModelError("inhibiting place not empty when " + e->transition + " fired");
      }
    }
  }
  // Drop pairs implied by two interleaving steps; the closure is unchanged.
  for (const auto& p : two_step_implied(lpo.interleave)) lpo.interleave.erase(p);
  return lpo;
}

[[noreturn]] inline void no_firing(const PtiNet& net, const PnRun& run, const std::string& t, std::size_t k) {
  if (!enabled(net, run.marking(net), t))
    throw ModelError("not a firing sequence: " + t + " is not enabled at step " + std::to_string(k + 1));
  throw ModelError("unresolved token provenance: firing " + t + " at step " + std::to_string(k + 1) +
                   " repeats an existing t-history");
}

inline void require_sequence_transitions(const PtiNet& net, const std::vector<std::string>& seq) {
  for (const auto& t : seq) net.require_transition(t);
}

}  // namespace detail

/// Every LPO a firing sequence yields, one per way of resolving which
/// p-histories each firing draws its tokens from. Sorted, no duplicates.
inline std::vector<Lpo> lpos_from_firing_sequence(const PtiNet& net, const std::vector<std::string>& seq) {
  detail::require_sequence_transitions(net, seq);
  std::set<Lpo> out;
  auto rec = [&](auto& self, const detail::PnRun& run, std::size_t k) -> void {
    if (k == seq.size()) {
      out.insert(detail::lpo_of_run(net, run));
      return;
    }
    auto choices = detail::firings(net, run, seq[k]);
    if (choices.empty()) detail::no_firing(net, run, seq[k], k);
    for (const auto& e : choices) self(self, detail::fire_history(net, run, e), k + 1);
  };
  rec(rec, detail::initial_run(net), 0);
  return {out.begin(), out.end()};
}

/// The LPO of a firing sequence under the first token resolution (oldest
/// p-histories drained first).
inline Lpo lpo_from_firing_sequence(const PtiNet& net, const std::vector<std::string>& seq) {
  detail::require_sequence_transitions(net, seq);
  detail::PnRun run = detail::initial_run(net);
  for (std::size_t k = 0; k < seq.size(); ++k) {
    auto choices = detail::firings(net, run, seq[k]);
    if (choices.empty()) detail::no_firing(net, run, seq[k], k);
    run = detail::fire_history(net, run, choices.front());
  }
  return detail::lpo_of_run(net, run);
}

namespace detail {

struct DecodedPn {
  std::map<ElementId, PHistory> nodes;
  std::map<ElementId, THistoryPtr> edges;
};

inline DecodedPn decode_pn(const PtiNet& net, const Lpo& lpo, ValidityReport& r) {
  DecodedPn d;
  for (const auto& v : lpo.nodes) {
    try {
      PHistory p = decode_p_history(v);
      if (!net.has_place(p.place))
        r.add("history", "p-history in unknown place: " + v.str(), {v});
      else if (p.producer->transition != kInitialTransition && !net.has_transition(p.producer->transition))
        r.add("history", "p-history produced by unknown transition: " + v.str(), {v});
      else if (net.post(p.producer->transition)[net.place_index(p.place)] != p.count || p.count == 0)
        r.add("history", "p-history count does not match the producer's post-vector: " + v.str(), {v});
      else if (lpo.node_label.count(v) && lpo.node_label.at(v) != p.place)
        r.add("history", "node label differs from its place: " + v.str(), {v});
      d.nodes.emplace(v, std::move(p));
    } catch (const HistoryDecodeError& ex) {
      r.add("history", std::string("node is not a p-history: ") + ex.what(), {v});
    }
  }
  for (const auto& e : lpo.edges) {
    try {
      THistoryPtr h = decode_t_history(e);
      if (h->is_initial()) {
        if (!h->takes.empty()) r.add("history", "t_eps takes tokens", {e});
      } else if (!net.has_transition(h->transition)) {
        r.add("history", "t-history of unknown transition: " + e.str(), {e});
      } else {
        Marking sum(net.places.size());
        bool ok = true;
        // Over-drawing a p-history is left to N3.
        for (const auto& tk : h->takes) {
          if (!net.has_place(tk.source.place)) {
            ok = false;
            continue;
          }
          sum[net.place_index(tk.source.place)] += tk.taken;
        }
        if (!ok || sum != net.pre(h->transition))
          r.add("history", "t-history takes do not match the pre-vector: " + e.str(), {e});
      }
      if (lpo.edge_label.count(e) && lpo.edge_label.at(e) != h->transition)
        r.add("history", "edge label differs from its transition: " + e.str(), {e});
      d.edges.emplace(e, std::move(h));
    } catch (const HistoryDecodeError& ex) {
      r.add("history", std::string("edge is not a t-history: ") + ex.what(), {e});
    }
  }
  return d;
}

}  // namespace detail

/// Checks the PTI-net computation conditions N1-N4 (plus the generic LPO
/// invariants). Every violated clause becomes a report entry.
inline ValidityReport validate_lpo_pn(const PtiNet& net, const Lpo& lpo) {
  ValidityReport r = validate_lpo(lpo);
  if (!r.ok()) return r;
  auto d = detail::decode_pn(net, lpo, r);
  if (!r.ok()) return r;

  std::map<ElementId, std::vector<ElementId>> in_c, out_c;
  for (const auto& [a, b] : lpo.comm) {
    out_c[a].push_back(b);
    in_c[b].push_back(a);
  }
  OrderIndex idx(lpo);

  // N1
  const ElementId eps = initial_t_history()->id;
  if (!lpo.is_edge(eps)) {
    r.add("N1", "t_eps is missing");
  } else {
    for (const auto& x : idx.elements())
      if (!idx.leq(eps, x)) r.add("N1", "t_eps is not below " + x.str(), {x});
  }

  // N2
  for (const auto& [v, p] : d.nodes) {
    const auto& prods = in_c[v];
    if (!lpo.is_edge(p.producer->id))
      r.add("N2", "producer of " + v.str() + " is not in the computation", {v});
    else if (prods.size() != 1 || prods.front() != p.producer->id)
      r.add("N2", "node must have exactly its producer as comm predecessor: " + v.str(), {v});
  }

  // N3
  for (const auto& [v, p] : d.nodes) {
    unsigned total = 0;
    for (const auto& e : out_c[v]) {
      unsigned k = d.edges.count(e) ? d.edges.at(e)->taken_from(v) : 0;
      if (k == 0) r.add("N3", "edge " + e.str() + " does not take from " + v.str(), {v, e});
      total += k;
    }
    if (total > p.count) r.add("N3", "more tokens taken than " + v.str() + " holds", {v});
  }

  // N4
  for (const auto& [e, h] : d.edges) {
    std::set<ElementId> want_pre, want_post, got_pre, got_post;
    for (const auto& tk : h->takes) want_pre.insert(tk.source.id);
    for (const auto& p : produced_by(net, h)) want_post.insert(p.id);
    for (const auto& x : in_c[e])
      if (lpo.is_node(x)) got_pre.insert(x);
    for (const auto& x : out_c[e])
      if (lpo.is_node(x)) got_post.insert(x);
    if (got_pre != want_pre) r.add("N4(a)", "preset of " + e.str() + " differs from its history", {e});
    if (got_post != want_post) r.add("N4(a)", "postset of " + e.str() + " differs from its history", {e});

    if (h->is_initial()) continue;
    auto inh = net.inhibitor_places(h->transition);
    for (const auto& [v, p] : d.nodes)
      if (inh.count(p.place) && !idx.comparable(v, e))
        r.add("N4(b)", "inhibiting node " + v.str() + " is unordered with " + e.str(), {e, v});
  }
  for (const auto& [e, e2] : lpo.interleave) {
    const std::string& t = lpo.edge_label.at(e);
    const std::string& t2 = lpo.edge_label.at(e2);
    bool ok = false;
    for (const auto& v : in_c[e])
      if (lpo.is_node(v) && net.inhibits(lpo.node_label.at(v), t2)) ok = true;
    for (const auto& v : out_c[e2])
      if (lpo.is_node(v) && net.inhibits(lpo.node_label.at(v), t)) ok = true;
    if (!ok) r.add("N4(c)", "interleaving pair not justified by an inhibitor: " + detail::pair_text({e, e2}), {e, e2});
  }
  return r;
}

/// The g-computation of an LPO-computation: interleaving dropped, each
/// inhibited transition glued to the comm pairs around its inhibiting places.
inline GluedLpo glpo_from_lpo_pn(const PtiNet& net, const Lpo& lpo) {
  Lpo base = lpo;
  base.interleave.clear();
  std::map<std::string, Relation> per_label;
  for (const auto& t : net.transitions) {
    auto inh = net.inhibitor_places(t);
    if (inh.empty()) continue;
    Relation& rel = per_label[t];
    for (const auto& p : lpo.comm) {
      const ElementId& v = lpo.is_node(p.first) ? p.first : p.second;
      if (inh.count(lpo.node_label.at(v))) rel.insert(p);
    }
  }
  return GluedLpo::make(std::move(base), per_label);
}

struct EnumerateOptions {
  unsigned max_events = 0;
  bool maximal_only = false;
  /// When set, transitions are explored in a seeded random order instead of
  /// lexicographically. Results must not depend on it.
  std::optional<std::uint64_t> shuffle_seed;
};

struct PnComputations {
  LpoSet lpos;
  GluedLpoSet glpos;
};

inline PnComputations enumerate_computations_pn(const PtiNet& net, const EnumerateOptions& opt) {
  check_net(net);
  PnComputations out;
  std::optional<std::mt19937_64> rng;
  if (opt.shuffle_seed) rng.emplace(*opt.shuffle_seed);
  const auto order = net.sorted_transitions();
  auto rec = [&](auto& self, const detail::PnRun& run, unsigned depth) -> void {
    out.lpos.insert(detail::lpo_of_run(net, run));
    if (depth == opt.max_events) return;
    auto ts = order;
    if (rng) std::shuffle(ts.begin(), ts.end(), *rng);
    for (const auto& t : ts)
      for (const auto& e : detail::firings(net, run, t)) self(self, detail::fire_history(net, run, e), depth + 1);
  };
  rec(rec, detail::initial_run(net), 0);
  if (opt.maximal_only) out.lpos = maximal_filter(out.lpos);
  for (const auto& l : out.lpos) out.glpos.insert(glpo_from_lpo_pn(net, l));
  return out;
}

inline PnComputations enumerate_computations_pn(const PtiNet& net, unsigned max_events, bool maximal_only = false) {
  return enumerate_computations_pn(net, EnumerateOptions{max_events, maximal_only, std::nullopt});
}

/// Both refinement directions at the bound: every enumerated LPO refines its
/// own g-LPO and lies among its refinements, and every refinement of an
/// enumerated g-LPO is a valid computation.
inline TheoremReport check_refinement_theorem_pn(const PtiNet& net, unsigned max_events) {
  TheoremReport rep;
  auto comps = enumerate_computations_pn(net, max_events, false);
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
      auto v = validate_lpo_pn(net, r);
      if (!v.ok()) return fail("refinement is not a computation: " + v.summary());
      if (rep.image_stable && glpo_from_lpo_pn(net, r) != g) {
        rep.image_stable = false;
        rep.unstable_example = "refinement maps to a different g-LPO";
      }
    }
    refs.emplace(g, std::move(rs));
  }
  for (const auto& l : comps.lpos) {
    auto v = validate_lpo_pn(net, l);
    if (!v.ok()) return fail("generated LPO is not a computation: " + v.summary());
    auto g = glpo_from_lpo_pn(net, l);
    auto res = refines(l, g);
    if (!res) return fail("LPO does not refine its g-LPO: clause " + std::to_string(res.clause) + ": " + res.detail);
    const auto& rs = refs.at(g);
    if (!std::binary_search(rs.begin(), rs.end(), l)) return fail("LPO missing from the refinements of its g-LPO");
  }
  return rep;
}

}  // namespace gluepo
