#pragma once

// Certificates that two g-computations of one CTS system differ: a shared
// history that one side extends and the other leaves maximal, a shared
// history whose next local move differs, or two shared histories whose next
// same-channel communications are ordered differently.

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "gluepo/core_po.hpp"
#include "gluepo/cts_computation.hpp"
#include "gluepo/pti_witness.hpp"

namespace gluepo {

struct MaximalityMismatch {
  std::string agent;
  ElementId history;
  Side maximal_in = Side::left;
  bool operator==(const MaximalityMismatch&) const = default;
};

struct NextLabelMismatch {
  std::string agent;
  ElementId history;
  std::string left_label;  // local move, e.g. "v3?e->3"
  std::string right_label;
  bool operator==(const NextLabelMismatch&) const = default;
};

struct ChannelOrderMismatch {
  std::pair<std::string, std::string> agents;
  std::pair<ElementId, ElementId> histories;
  std::pair<ElementId, ElementId> left_edges;
  std::pair<ElementId, ElementId> right_edges;
  std::pair<Order, Order> orders;
  bool operator==(const ChannelOrderMismatch&) const = default;
};

using CtsWitness = std::variant<MaximalityMismatch, NextLabelMismatch, ChannelOrderMismatch>;

inline std::string describe(const CtsWitness& w) {
  if (auto* m = std::get_if<MaximalityMismatch>(&w))
    return "maximality mismatch: " + m->history.str() + " of " + m->agent + " is maximal only on the " +
           to_string(m->maximal_in);
  if (auto* n = std::get_if<NextLabelMismatch>(&w))
    return "next-label mismatch at " + n->history.str() + ": " + n->left_label + " vs " + n->right_label;
  const auto& c = std::get<ChannelOrderMismatch>(w);
  return "channel order mismatch between " + c.agents.first + " and " + c.agents.second + " after " +
         c.histories.first.str() + " / " + c.histories.second.str() + ": " + to_string(c.orders.first) + " vs " +
         to_string(c.orders.second);
}

namespace detail {

inline std::string history_agent(const ElementId& h) {
  const std::string& s = h.str();
  auto bar = s.find('|');
  if (s.compare(0, 2, "H[") != 0 || bar == std::string::npos) throw Error("not an agent history: " + s);
  return s.substr(2, bar - 2);
}

inline std::optional<ElementId> next_edge(const Lpo& lpo, const ElementId& h) {
  for (auto it = lpo.comm.lower_bound({h, ElementId()}); it != lpo.comm.end() && it->first == h; ++it)
    return it->second;
  return std::nullopt;
}

/// The move `h` makes in edge `e`: label with h's polarity, then the target.
inline std::string local_move(const ElementId& e, const ElementId& h) {
  auto p = parse_edge_id(e.str());
  if (!p) throw Error("not a CTS edge: " + e.str());
  for (std::size_t i = 0; i < p->participants.size(); ++i)
    if (p->participants[i].first == h) {
      CtsLabel l = i == 0 ? p->label : p->label.as_receive();
      return l.str() + "->" + p->participants[i].second;
    }
  throw Error("history " + h.str() + " does not take part in " + e.str());
}

inline std::string edge_channel(const ElementId& e) {
  auto p = parse_edge_id(e.str());
  if (!p) throw Error("not a CTS edge: " + e.str());
  return p->label.channel;
}

inline std::set<ElementId> initial_histories(const Lpo& lpo) {
  std::set<ElementId> out;
  for (const auto& [a, b] : lpo.comm)
    if (a == initial_edge_id()) out.insert(b);
  return out;
}

}  // namespace detail

/// Walks the shared histories by increasing depth in `g1` and reports the
/// first maximality or next-move difference; failing that, the first pair of
/// shared histories whose next same-channel events are ordered differently.
inline std::optional<CtsWitness> separation_witness_cts(const GluedLpo& g1, const GluedLpo& g2) {
  if (g1 == g2) return std::nullopt;
  const Lpo& a = g1.base;
  const Lpo& b = g2.base;
  if (detail::initial_histories(a) != detail::initial_histories(b))
    throw Error("g-LPOs are not over the same system");

  auto depth = element_depths(a);
  std::vector<std::pair<std::size_t, ElementId>> common;
  for (const auto& v : a.nodes)
    if (b.is_node(v)) common.emplace_back(depth.at(v), v);
  std::sort(common.begin(), common.end());

  struct Next {
    ElementId h, ea, eb;
  };
  std::vector<Next> both;
  for (const auto& [d, h] : common) {
    auto na = detail::next_edge(a, h);
    auto nb = detail::next_edge(b, h);
    if (!na && !nb) continue;
    if (!na || !nb) return MaximalityMismatch{detail::history_agent(h), h, na ? Side::right : Side::left};
    auto ma = detail::local_move(*na, h);
    auto mb = detail::local_move(*nb, h);
    if (ma != mb) return NextLabelMismatch{detail::history_agent(h), h, ma, mb};
    both.push_back({h, *na, *nb});
  }

  OrderIndex ia(a), ib(b);
  for (std::size_t i = 0; i < both.size(); ++i)
    for (std::size_t j = i + 1; j < both.size(); ++j) {
      const auto& x = both[i];
      const auto& y = both[j];
      if (detail::edge_channel(x.ea) != detail::edge_channel(y.ea)) continue;
      Order oa = ia.query(x.ea, y.ea);
      Order ob = ib.query(x.eb, y.eb);
      if (oa == ob) continue;
      return ChannelOrderMismatch{{detail::history_agent(x.h), detail::history_agent(y.h)},
                                  {x.h, y.h},
                                  {x.ea, y.ea},
                                  {x.eb, y.eb},
                                  {oa, ob}};
    }
  throw Error("no shared history sees the difference; inputs are not g-computations of one system");
}

/// Rechecks a witness against both inputs.
inline bool verify_cts_witness(const GluedLpo& g1, const GluedLpo& g2, const CtsWitness& w) {
  const Lpo& a = g1.base;
  const Lpo& b = g2.base;
  auto shared = [&](const ElementId& h) { return a.is_node(h) && b.is_node(h); };
  if (auto* m = std::get_if<MaximalityMismatch>(&w)) {
    if (!shared(m->history) || detail::history_agent(m->history) != m->agent) return false;
    const Lpo& max_side = m->maximal_in == Side::left ? a : b;
    const Lpo& other = m->maximal_in == Side::left ? b : a;
    return !detail::next_edge(max_side, m->history) && detail::next_edge(other, m->history).has_value();
  }
  if (auto* n = std::get_if<NextLabelMismatch>(&w)) {
    if (!shared(n->history) || detail::history_agent(n->history) != n->agent) return false;
    auto na = detail::next_edge(a, n->history);
    auto nb = detail::next_edge(b, n->history);
    return na && nb && n->left_label != n->right_label && detail::local_move(*na, n->history) == n->left_label &&
           detail::local_move(*nb, n->history) == n->right_label;
  }
  const auto& c = std::get<ChannelOrderMismatch>(w);
  const auto& [h1, h2] = c.histories;
  if (!shared(h1) || !shared(h2)) return false;
  if (detail::history_agent(h1) != c.agents.first || detail::history_agent(h2) != c.agents.second) return false;
  auto a1 = detail::next_edge(a, h1), a2 = detail::next_edge(a, h2);
  auto b1 = detail::next_edge(b, h1), b2 = detail::next_edge(b, h2);
  if (!a1 || !a2 || !b1 || !b2) return false;
  if (std::pair{*a1, *a2} != c.left_edges || std::pair{*b1, *b2} != c.right_edges) return false;
  if (detail::local_move(*a1, h1) != detail::local_move(*b1, h1) ||
      detail::local_move(*a2, h2) != detail::local_move(*b2, h2))
    return false;
  if (detail::edge_channel(*a1) != detail::edge_channel(*a2)) return false;
  Order oa = order_query(a, *a1, *a2);
  Order ob = order_query(b, *b1, *b2);
  return oa != ob && c.orders == std::pair{oa, ob};
}

}  // namespace gluepo
