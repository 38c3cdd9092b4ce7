#pragma once

// Labelled partial orders with a communication and an interleaving relation,
// glue relations, refinement, embedding and maximality.

#include <algorithm>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace gluepo {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class UnknownElement : public Error {
 public:
  explicit UnknownElement(const std::string& id)
      : Error("unknown element: " + id), id_(id) {}
  const std::string& id() const noexcept { return id_; }

 private:
  std::string id_;
};

/// Raised when two orders that must share an element universe do not.
class UniverseMismatch : public Error {
 public:
  using Error::Error;
};

/// Canonical identity of an LPO element. Model modules guarantee that equal
/// strings denote the same history, so no isomorphism search is ever needed.
class ElementId {
 public:
  ElementId() = default;
  explicit ElementId(std::string value) : value_(std::move(value)) {}

  const std::string& str() const noexcept { return value_; }

  auto operator<=>(const ElementId&) const = default;
  bool operator==(const ElementId&) const = default;

 private:
  std::string value_;
};

using ElementPair = std::pair<ElementId, ElementId>;
using Relation = std::set<ElementPair>;

struct Lpo {
  std::set<ElementId> nodes;
  std::set<ElementId> edges;
  Relation comm;
  Relation interleave;
  std::map<ElementId, std::string> node_label;
  std::map<ElementId, std::string> edge_label;

  bool is_node(const ElementId& x) const { return nodes.count(x) != 0; }
  bool is_edge(const ElementId& x) const { return edges.count(x) != 0; }
  bool contains(const ElementId& x) const { return is_node(x) || is_edge(x); }
  std::size_t size() const { return nodes.size() + edges.size(); }

  const std::string& label(const ElementId& x) const {
    if (auto it = node_label.find(x); it != node_label.end()) return it->second;
    if (auto it = edge_label.find(x); it != edge_label.end()) return it->second;
    throw UnknownElement(x.str());
  }

  auto operator<=>(const Lpo&) const = default;
  bool operator==(const Lpo&) const = default;
};

/// A glued LPO. `glues` is the family of distinct glue relations (sorted, no
/// duplicates); `assignment` maps an edge label to an index into `glues`.
/// Labels absent from `assignment` carry the empty glue.
struct GluedLpo {
  Lpo base;
  std::vector<Relation> glues;
  std::map<std::string, std::size_t> assignment;

  const Relation& glue_for(const std::string& label) const {
    static const Relation empty;
    auto it = assignment.find(label);
    return it == assignment.end() ? empty : glues.at(it->second);
  }

  /// Builds the canonical form: glue relations are deduplicated by value, so
  /// two labels with identical glue share one family member.
  static GluedLpo make(Lpo base, const std::map<std::string, Relation>& per_label) {
    GluedLpo g;
    g.base = std::move(base);
    std::set<Relation> family;
    for (const auto& [label, rel] : per_label) family.insert(rel);
    g.glues.assign(family.begin(), family.end());
    for (const auto& [label, rel] : per_label) {
      auto pos = std::lower_bound(g.glues.begin(), g.glues.end(), rel);
      g.assignment[label] = static_cast<std::size_t>(pos - g.glues.begin());
    }
    return g;
  }

  auto operator<=>(const GluedLpo&) const = default;
  bool operator==(const GluedLpo&) const = default;
};

using LpoSet = std::set<Lpo>;
using GluedLpoSet = std::set<GluedLpo>;

enum class Order { before, after, equal, incomparable };

inline const char* to_string(Order o) {
  switch (o) {
    case Order::before: return "before";
    case Order::after: return "after";
    case Order::equal: return "equal";
    case Order::incomparable: return "incomparable";
  }
  return "?";
}

namespace detail {

class BitRows {
 public:
  explicit BitRows(std::size_t n) : n_(n), words_((n + 63) / 64), bits_(n * words_, 0) {}

  bool test(std::size_t r, std::size_t c) const {
    return (bits_[r * words_ + c / 64] >> (c % 64)) & 1u;
  }
  void set(std::size_t r, std::size_t c) { bits_[r * words_ + c / 64] |= std::uint64_t{1} << (c % 64); }
  void or_row(std::size_t dst, std::size_t src) {
    for (std::size_t w = 0; w < words_; ++w) bits_[dst * words_ + w] |= bits_[src * words_ + w];
  }
  std::size_t size() const { return n_; }

 private:
  std::size_t n_;
  std::size_t words_;
  std::vector<std::uint64_t> bits_;
};

}  // namespace detail

/// Reflexive-transitive closure of comm ∪ interleave, computed on demand.
class OrderIndex {
 public:
  explicit OrderIndex(const Lpo& lpo) : OrderIndex(lpo, lpo.interleave) {}

  /// Closure of lpo.comm ∪ `interleave` (the LPO's own interleave is ignored).
  OrderIndex(const Lpo& lpo, const Relation& interleave) : reach_(0) {
    elements_.reserve(lpo.size());
    std::merge(lpo.nodes.begin(), lpo.nodes.end(), lpo.edges.begin(), lpo.edges.end(),
               std::back_inserter(elements_));
    elements_.erase(std::unique(elements_.begin(), elements_.end()), elements_.end());
    const std::size_t n = elements_.size();
    reach_ = detail::BitRows(n);
    succ_.assign(n, {});
    for (std::size_t i = 0; i < n; ++i) reach_.set(i, i);
    auto add = [&](const ElementPair& p) {
      std::size_t a = index(p.first), b = index(p.second);
      reach_.set(a, b);
      succ_[a].push_back(b);
    };
    for (const auto& p : lpo.comm) add(p);
    for (const auto& p : interleave) add(p);
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t i = 0; i < n; ++i)
        if (i != k && reach_.test(i, k)) reach_.or_row(i, k);
    acyclic_ = true;
    for (std::size_t i = 0; i < n && acyclic_; ++i)
      for (std::size_t j = i + 1; j < n; ++j)
        if (reach_.test(i, j) && reach_.test(j, i)) {
          acyclic_ = false;
          break;
        }
  }

  bool acyclic() const { return acyclic_; }
  std::size_t size() const { return elements_.size(); }
  const std::vector<ElementId>& elements() const { return elements_; }
  const std::vector<std::size_t>& successors(std::size_t i) const { return succ_[i]; }

  std::size_t index(const ElementId& x) const {
    auto it = std::lower_bound(elements_.begin(), elements_.end(), x);
    if (it == elements_.end() || *it != x) throw UnknownElement(x.str());
    return static_cast<std::size_t>(it - elements_.begin());
  }
  bool contains(const ElementId& x) const {
    return std::binary_search(elements_.begin(), elements_.end(), x);
  }

  bool leq(std::size_t a, std::size_t b) const { return reach_.test(a, b); }
  bool leq(const ElementId& a, const ElementId& b) const { return leq(index(a), index(b)); }
  bool less(const ElementId& a, const ElementId& b) const { return a != b && leq(a, b); }
  bool comparable(const ElementId& a, const ElementId& b) const {
    std::size_t i = index(a), j = index(b);
    return leq(i, j) || leq(j, i);
  }

  Order query(const ElementId& a, const ElementId& b) const {
    std::size_t i = index(a), j = index(b);
    if (i == j) return Order::equal;
    if (leq(i, j)) return Order::before;
    if (leq(j, i)) return Order::after;
    return Order::incomparable;
  }

 private:
  std::vector<ElementId> elements_;
  std::vector<std::vector<std::size_t>> succ_;
  detail::BitRows reach_;
  bool acyclic_ = true;
};

/// Order between two elements under the closure of comm ∪ interleave.
inline Order order_query(const Lpo& lpo, const ElementId& a, const ElementId& b) {
  return OrderIndex(lpo).query(a, b);
}

/// Longest-path distance from the minimal elements over comm ∪ interleave.
/// Requires an acyclic relation.
inline std::map<ElementId, std::size_t> element_depths(const Lpo& lpo) {
  OrderIndex idx(lpo);
  const std::size_t n = idx.size();
  std::vector<std::size_t> indeg(n, 0), depth(n, 0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j : idx.successors(i)) ++indeg[j];
  std::vector<std::size_t> ready;
  for (std::size_t i = 0; i < n; ++i)
    if (indeg[i] == 0) ready.push_back(i);
  while (!ready.empty()) {
    std::size_t i = ready.back();
    ready.pop_back();
    for (std::size_t j : idx.successors(i)) {
      depth[j] = std::max(depth[j], depth[i] + 1);
      if (--indeg[j] == 0) ready.push_back(j);
    }
  }
  std::map<ElementId, std::size_t> out;
  for (std::size_t i = 0; i < n; ++i) out.emplace(idx.elements()[i], depth[i]);
  return out;
}

struct Violation {
  std::string rule;
  std::string detail;
  std::vector<ElementId> elements;
};

struct ValidityReport {
  std::vector<Violation> violations;

  bool ok() const { return violations.empty(); }
  bool has(const std::string& rule) const {
    return std::any_of(violations.begin(), violations.end(),
                       [&](const Violation& v) { return v.rule == rule; });
  }
  void add(std::string rule, std::string detail, std::vector<ElementId> elements = {}) {
    violations.push_back({std::move(rule), std::move(detail), std::move(elements)});
  }
  void append(const ValidityReport& other) {
    violations.insert(violations.end(), other.violations.begin(), other.violations.end());
  }
  std::string summary() const {
    std::string out;
    for (const auto& v : violations) {
      if (!out.empty()) out += "; ";
      out += v.rule + ": " + v.detail;
    }
    return out;
  }
};

namespace detail {

inline std::string pair_text(const ElementPair& p) {
  return "(" + p.first.str() + ", " + p.second.str() + ")";
}

/// Pairs of `rel` implied by a two-step path inside `rel` itself.
inline std::vector<ElementPair> two_step_implied(const Relation& rel) {
  std::map<ElementId, std::vector<ElementId>> succ;
  for (const auto& [a, b] : rel) succ[a].push_back(b);
  std::vector<ElementPair> out;
  for (const auto& p : rel) {
    for (const auto& mid : succ[p.first]) {
      if (mid == p.second) continue;
      auto jt = succ.find(mid);
      if (jt == succ.end()) continue;
      if (std::find(jt->second.begin(), jt->second.end(), p.second) != jt->second.end()) {
        out.push_back(p);
        break;
      }
    }
  }
  return out;
}

}  // namespace detail

/// Structural LPO checks: partition, labelling, relation typing, disjointness,
/// anti-reflexivity, anti-symmetry, non-transitivity (each relation on its
/// own) and acyclicity of ≤.
inline ValidityReport validate_lpo(const Lpo& lpo) {
  ValidityReport r;
  for (const auto& n : lpo.nodes)
    if (lpo.edges.count(n)) r.add("partition", "element is both node and edge: " + n.str(), {n});
  for (const auto& n : lpo.nodes)
    if (!lpo.node_label.count(n)) r.add("labelling", "node without label: " + n.str(), {n});
  for (const auto& e : lpo.edges)
    if (!lpo.edge_label.count(e)) r.add("labelling", "edge without label: " + e.str(), {e});
  for (const auto& [x, l] : lpo.node_label)
    if (!lpo.is_node(x)) r.add("labelling", "node label on non-node: " + x.str(), {x});
  for (const auto& [x, l] : lpo.edge_label)
    if (!lpo.is_edge(x)) r.add("labelling", "edge label on non-edge: " + x.str(), {x});

  bool typed = true;
  for (const auto& p : lpo.comm) {
    bool ok = (lpo.is_node(p.first) && lpo.is_edge(p.second)) ||
              (lpo.is_edge(p.first) && lpo.is_node(p.second));
    if (!ok) {
      typed = false;
      r.add("comm-typing", "comm pair outside V×E ∪ E×V: " + detail::pair_text(p), {p.first, p.second});
    }
  }
  for (const auto& p : lpo.interleave) {
    if (!(lpo.is_edge(p.first) && lpo.is_edge(p.second))) {
      typed = false;
      r.add("interleave-typing", "interleave pair outside E×E: " + detail::pair_text(p),
            {p.first, p.second});
    }
  }
  for (const auto& p : lpo.comm)
    if (lpo.interleave.count(p))
      r.add("disjointness", "pair in both comm and interleave: " + detail::pair_text(p), {p.first, p.second});

  auto per_relation = [&](const Relation& rel, const char* name) {
    for (const auto& p : rel) {
      if (p.first == p.second)
        r.add("anti-reflexivity", std::string(name) + " relates an element to itself: " + p.first.str(),
              {p.first});
      else if (p.first < p.second && rel.count({p.second, p.first}))
        r.add("anti-symmetry", std::string(name) + " holds in both directions: " + detail::pair_text(p),
              {p.first, p.second});
    }
    for (const auto& p : detail::two_step_implied(rel))
      r.add("non-transitivity", std::string(name) + " pair implied by a two-step path: " + detail::pair_text(p),
            {p.first, p.second});
  };
  per_relation(lpo.comm, "comm");
  per_relation(lpo.interleave, "interleave");

  if (typed) {
    OrderIndex idx(lpo);
    if (!idx.acyclic()) r.add("acyclicity", "closure of comm ∪ interleave is not antisymmetric");
  }
  return r;
}

struct RefinementResult {
  bool holds = true;
  int clause = 0;
  std::optional<ElementId> edge;
  std::optional<ElementPair> pair;
  std::string detail;

  explicit operator bool() const { return holds; }
};

namespace detail {

/// (e, e') may be added to the interleaving when glue justifies it: e' glued
/// from e's point of view, or e glued from e''s point of view.
inline bool interleave_justified(const GluedLpo& g, const ElementId& e, const ElementId& e2) {
  const Relation& ge = g.glue_for(g.base.edge_label.at(e));
  for (const auto& p : ge)
    if (p.first == e2) return true;
  const Relation& ge2 = g.glue_for(g.base.edge_label.at(e2));
  for (const auto& p : ge2)
    if (p.second == e) return true;
  return false;
}

inline std::vector<ElementPair> sorted_by_depth(const Relation& rel,
                                                const std::map<ElementId, std::size_t>& depth) {
  std::vector<ElementPair> v(rel.begin(), rel.end());
  auto d = [&](const ElementId& x) {
    auto it = depth.find(x);
    return it == depth.end() ? std::size_t{0} : it->second;
  };
  std::stable_sort(v.begin(), v.end(), [&](const ElementPair& a, const ElementPair& b) {
    return std::pair(d(a.first), d(a.second)) < std::pair(d(b.first), d(b.second));
  });
  return v;
}

}  // namespace detail

/// Whether `lpo` refines `g`: same comm and labels, g's interleaving kept,
/// every glue pair resolved strictly before-or-after, every extra
/// interleaving pair justified by glue. Element sets must coincide.
inline RefinementResult refines(const Lpo& lpo, const GluedLpo& g) {
  if (lpo.nodes != g.base.nodes || lpo.edges != g.base.edges)
    throw UniverseMismatch("refinement requires identical node and edge sets");
  RefinementResult res;
  auto fail = [&](int clause, std::string detail) {
    res.holds = false;
    res.clause = clause;
    res.detail = std::move(detail);
    return res;
  };
  if (lpo.node_label != g.base.node_label || lpo.edge_label != g.base.edge_label)
    return fail(1, "labels differ");
  if (lpo.comm != g.base.comm) return fail(1, "communication relations differ");

  for (const auto& p : g.base.interleave)
    if (!lpo.interleave.count(p)) {
      res.pair = p;
      return fail(2, "glued interleaving pair missing: " + detail::pair_text(p));
    }

  OrderIndex idx(lpo);
  auto depth = element_depths(lpo);
  std::vector<ElementId> edges(lpo.edges.begin(), lpo.edges.end());
  std::stable_sort(edges.begin(), edges.end(),
                   [&](const ElementId& a, const ElementId& b) { return depth[a] < depth[b]; });
  for (const auto& e : edges) {
    for (const auto& [a, b] : detail::sorted_by_depth(g.glue_for(lpo.edge_label.at(e)), depth)) {
      if (!idx.leq(e, a) && !idx.leq(b, e)) {
        res.edge = e;
        res.pair = ElementPair{a, b};
        return fail(3, "edge " + e.str() + " neither before " + a.str() + " nor after " + b.str());
      }
    }
  }

  for (const auto& p : lpo.interleave) {
    if (g.base.interleave.count(p)) continue;
    if (!detail::interleave_justified(g, p.first, p.second)) {
      res.pair = p;
      return fail(4, "interleaving pair not justified by glue: " + detail::pair_text(p));
    }
  }
  return res;
}

/// All LPOs refining `g`: supersets of g's interleaving using only
/// glue-justified pairs, that are structurally valid and satisfy every glue.
/// Cycles and two-step-implied interleaving pairs persist once present, so
/// branches containing them are cut early.
inline std::vector<Lpo> refinements(const GluedLpo& g) {
  const Lpo& base = g.base;
  std::vector<ElementPair> candidates;
  for (const auto& e : base.edges)
    for (const auto& e2 : base.edges)
      if (e != e2 && !base.interleave.count({e, e2}) && detail::interleave_justified(g, e, e2))
        candidates.emplace_back(e, e2);

  OrderIndex fixed(base);  // only used for indexing
  const std::size_t n = fixed.size();
  std::vector<std::vector<std::size_t>> succ(n);
  auto link = [&](std::size_t a, std::size_t b) { succ[a].push_back(b); };
  for (const auto& [a, b] : base.comm) link(fixed.index(a), fixed.index(b));
  for (const auto& [a, b] : base.interleave) link(fixed.index(a), fixed.index(b));
  std::vector<std::vector<char>> inter(n, std::vector<char>(n, 0));
  for (const auto& [a, b] : base.interleave) inter[fixed.index(a)][fixed.index(b)] = 1;

  auto reaches = [&](std::size_t from, std::size_t to) {
    std::vector<char> seen(n, 0);
    std::vector<std::size_t> stack{from};
    seen[from] = 1;
    while (!stack.empty()) {
      std::size_t x = stack.back();
      stack.pop_back();
      if (x == to) return true;
      for (std::size_t y : succ[x])
        if (!seen[y]) {
          seen[y] = 1;
          stack.push_back(y);
        }
    }
    return false;
  };
  // Adding a→c to the interleaving may make (a,c) itself implied, or
  // complete a two-step path under an existing interleaving pair.
  auto creates_two_step = [&](std::size_t a, std::size_t c) {
    for (std::size_t b = 0; b < n; ++b) {
      if (inter[a][b] && inter[b][c]) return true;
      if (inter[c][b] && inter[a][b]) return true;
      if (inter[b][a] && inter[b][c]) return true;
    }
    return false;
  };

  std::vector<Lpo> out;
  std::vector<std::pair<std::size_t, std::size_t>> cand_idx;
  for (const auto& [a, b] : candidates) cand_idx.emplace_back(fixed.index(a), fixed.index(b));
  Relation chosen = base.interleave;

  std::function<void(std::size_t)> search = [&](std::size_t i) {
    if (i == cand_idx.size()) {
      Lpo lpo = base;
      lpo.interleave = chosen;
      if (refines(lpo, g) && validate_lpo(lpo).ok()) out.push_back(std::move(lpo));
      return;
    }
    search(i + 1);
    auto [a, c] = cand_idx[i];
    if (reaches(c, a) || creates_two_step(a, c)) return;
    link(a, c);
    inter[a][c] = 1;
    chosen.insert(candidates[i]);
    search(i + 1);
    chosen.erase(candidates[i]);
    inter[a][c] = 0;
    succ[a].pop_back();
  };
  search(0);
  std::sort(out.begin(), out.end());
  return out;
}

/// small embeds into big: elements included, comm agrees on small's
/// elements, and small's interleaving is kept.
inline bool embeds(const Lpo& small, const Lpo& big) {
  if (!std::includes(big.nodes.begin(), big.nodes.end(), small.nodes.begin(), small.nodes.end()))
    return false;
  if (!std::includes(big.edges.begin(), big.edges.end(), small.edges.begin(), small.edges.end()))
    return false;
  for (const auto& [x, l] : small.node_label)
    if (big.node_label.at(x) != l) return false;
  for (const auto& [x, l] : small.edge_label)
    if (big.edge_label.at(x) != l) return false;
  if (!std::includes(big.interleave.begin(), big.interleave.end(), small.interleave.begin(),
                     small.interleave.end()))
    return false;
  for (const auto& p : big.comm) {
    bool inside = small.contains(p.first) && small.contains(p.second);
    if (inside != (small.comm.count(p) != 0)) return false;
  }
  return std::all_of(small.comm.begin(), small.comm.end(),
                     [&](const ElementPair& p) { return big.comm.count(p) != 0; });
}

/// Elements not embeddable into any other member of the input.
inline LpoSet maximal_filter(const LpoSet& in) {
  LpoSet out;
  std::vector<const Lpo*> all;
  for (const auto& x : in) all.push_back(&x);
  for (const Lpo* x : all) {
    bool dominated = false;
    for (const Lpo* y : all) {
      if (x == y || y->size() < x->size()) continue;
      if (embeds(*x, *y)) {
        dominated = true;
        break;
      }
    }
    if (!dominated) out.insert(*x);
  }
  return out;
}

/// Glue family invariants: every assigned index is in range and every glue
/// pair belongs to the base comm relation.
inline ValidityReport validate_glued(const GluedLpo& g) {
  ValidityReport r = validate_lpo(g.base);
  for (const auto& [label, i] : g.assignment)
    if (i >= g.glues.size()) r.add("glue-assignment", "label " + label + " refers to a missing glue");
  for (const auto& rel : g.glues)
    for (const auto& p : rel)
      if (!g.base.comm.count(p))
        r.add("glue-subset", "glue pair outside comm: " + detail::pair_text(p), {p.first, p.second});
  return r;
}

/// Outcome of a refinement-theorem check over one model.
struct TheoremReport {
  bool holds = true;
  std::size_t lpos = 0;
  std::size_t glpos = 0;
  std::size_t refinements = 0;
  /// Which direction failed and why; empty when the theorem holds.
  std::string counterexample;
  /// Whether every refinement's own g-image is the g-LPO it refines. Not part
  /// of the theorem; reported separately.
  bool image_stable = true;
  std::string unstable_example;
};

}  // namespace gluepo
