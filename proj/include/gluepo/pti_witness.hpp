#pragma once

// Certificates that two g-computations of the same PTI-net differ by a
// genuine choice: either some shared p-history keeps a different number of
// tokens, or a set of shared p-histories takes part in a transition that
// only one side contains.

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "gluepo/core_po.hpp"
#include "gluepo/pti_history.hpp"

namespace gluepo {

enum class Side { left, right };

inline const char* to_string(Side s) { return s == Side::left ? "left" : "right"; }

struct LeftoverMismatch {
  ElementId node;
  unsigned left_count = 0;
  unsigned right_count = 0;
  bool operator==(const LeftoverMismatch&) const = default;
};

struct ParticipationMismatch {
  std::set<ElementId> nodes;
  ElementId transition_edge;
  Side present_in = Side::left;
  bool operator==(const ParticipationMismatch&) const = default;
};

using PnWitness = std::variant<LeftoverMismatch, ParticipationMismatch>;

inline std::string describe(const PnWitness& w) {
  if (auto* l = std::get_if<LeftoverMismatch>(&w))
    return "leftover mismatch at " + l->node.str() + ": " + std::to_string(l->left_count) + " vs " +
           std::to_string(l->right_count) + " tokens not taken";
  const auto& p = std::get<ParticipationMismatch>(w);
  std::string nodes;
  for (const auto& n : p.nodes) nodes += (nodes.empty() ? "" : ", ") + n.str();
  return "participation mismatch: {" + nodes + "} take part in " + p.transition_edge.str() + " only on the " +
         to_string(p.present_in);
}

namespace detail {

inline std::map<ElementId, std::vector<ElementId>> consumers_of(const Lpo& lpo) {
  std::map<ElementId, std::vector<ElementId>> out;
  for (const auto& [a, b] : lpo.comm)
    if (lpo.is_node(a)) out[a].push_back(b);
  return out;
}

/// Tokens of p-history `v` that no edge of `lpo` takes.
inline unsigned leftover(const Lpo& lpo, const ElementId& v) {
  PHistory p = decode_p_history(v);
  unsigned taken = 0;
  for (const auto& [a, b] : lpo.comm)
    if (a == v) taken += decode_t_history(b)->taken_from(v);
  return p.count - taken;
}

inline std::set<ElementId> preset_nodes(const Lpo& lpo, const ElementId& e) {
  std::set<ElementId> out;
  for (const auto& [a, b] : lpo.comm)
    if (b == e && lpo.is_node(a)) out.insert(a);
  return out;
}

}  // namespace detail

/// Walks the shared p-histories by increasing depth and reports the first one
/// whose consumers differ. Returns nullopt when the inputs are equal.
inline std::optional<PnWitness> separation_witness_pn(const GluedLpo& g1, const GluedLpo& g2) {
  if (g1 == g2) return std::nullopt;
  const Lpo& a = g1.base;
  const Lpo& b = g2.base;
  if (a.edges == b.edges)
    throw Error("g-LPOs with the same events differ only in glue; not g-computations of one net");

  std::vector<std::pair<unsigned, ElementId>> common;
  for (const auto& v : a.nodes)
    if (b.is_node(v)) common.emplace_back(decode_p_history(v).depth, v);
  std::sort(common.begin(), common.end());

  auto ca = detail::consumers_of(a);
  auto cb = detail::consumers_of(b);
  // Within one depth, a genuine choice (participation) is reported before a
  // leftover difference.
  for (std::size_t lo = 0; lo < common.size();) {
    std::size_t hi = lo;
    while (hi < common.size() && common[hi].first == common[lo].first) ++hi;
    std::optional<PnWitness> leftover;
    for (std::size_t k = lo; k < hi; ++k) {
      const ElementId& v = common[k].second;
      std::set<ElementId> la(ca[v].begin(), ca[v].end()), lb(cb[v].begin(), cb[v].end());
      if (la == lb) continue;
      bool nested = std::includes(la.begin(), la.end(), lb.begin(), lb.end()) ||
                    std::includes(lb.begin(), lb.end(), la.begin(), la.end());
      if (nested) {
        if (!leftover) leftover = LeftoverMismatch{v, detail::leftover(a, v), detail::leftover(b, v)};
        continue;
      }
      std::vector<ElementId> only_a;
      std::set_difference(la.begin(), la.end(), lb.begin(), lb.end(), std::back_inserter(only_a));
      ParticipationMismatch pm;
      pm.transition_edge = only_a.front();
      pm.present_in = Side::left;
      for (const auto& n : detail::preset_nodes(a, pm.transition_edge))
        if (b.is_node(n)) pm.nodes.insert(n);
      return pm;
    }
    if (leftover) return leftover;
    lo = hi;
  }
  throw Error("no shared p-history sees the difference; inputs are not g-computations of one net");
}

/// Rechecks a witness against both inputs.
inline bool verify_pn_witness(const GluedLpo& g1, const GluedLpo& g2, const PnWitness& w) {
  const Lpo& a = g1.base;
  const Lpo& b = g2.base;
  if (auto* l = std::get_if<LeftoverMismatch>(&w)) {
    if (!a.is_node(l->node) || !b.is_node(l->node)) return false;
    return l->left_count != l->right_count && detail::leftover(a, l->node) == l->left_count &&
           detail::leftover(b, l->node) == l->right_count;
  }
  const auto& p = std::get<ParticipationMismatch>(w);
  const Lpo& here = p.present_in == Side::left ? a : b;
  const Lpo& there = p.present_in == Side::left ? b : a;
  if (p.nodes.empty() || !here.is_edge(p.transition_edge) || there.is_edge(p.transition_edge)) return false;
  for (const auto& n : p.nodes) {
    if (!a.is_node(n) || !b.is_node(n)) return false;
    if (!here.comm.count({n, p.transition_edge})) return false;
  }
  return true;
}

}  // namespace gluepo
