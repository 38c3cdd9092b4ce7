#pragma once

// Graphviz rendering. Histories are ellipses labelled with their label and
// depth, events are boxes; comm is solid, interleave dashed, and every glue
// pair is a coloured edge annotated with the label that owns it.

#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "gluepo/core_po.hpp"

namespace gluepo {

/// Depth along comm only: an edge sits at the deepest node it consumes
/// (0 for none), a node one below its producer.
inline std::map<ElementId, std::size_t> history_depths(const Lpo& lpo) {
  std::map<ElementId, std::vector<ElementId>> preds;
  for (const auto& [a, b] : lpo.comm) preds[b].push_back(a);
  std::map<ElementId, std::size_t> memo;
  auto depth = [&](auto& self, const ElementId& x) -> std::size_t {
    if (auto it = memo.find(x); it != memo.end()) return it->second;
    std::size_t d = 0;
    for (const auto& p : preds[x]) d = std::max(d, self(self, p) + (lpo.is_node(x) ? 1 : 0));
    return memo[x] = d;
  };
  for (const auto& v : lpo.nodes) depth(depth, v);
  for (const auto& e : lpo.edges) depth(depth, e);
  return memo;
}

namespace detail {

inline std::string dot_quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '\n') {
      out += "\\n";
      continue;
    }
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

inline const char* glue_colour(std::size_t i) {
  static const char* palette[] = {"red", "blue", "darkgreen", "orange", "purple", "brown", "magenta", "cyan4"};
  return palette[i % (sizeof(palette) / sizeof(palette[0]))];
}

inline void dot_body(std::ostringstream& o, const Lpo& lpo) {
  auto depth = history_depths(lpo);
  for (const auto& v : lpo.nodes)
    o << "  " << dot_quote(v.str()) << " [shape=ellipse, label=" << dot_quote(lpo.label(v) + "\nd=" + std::to_string(depth.at(v)))
      << "];\n";
  for (const auto& e : lpo.edges) o << "  " << dot_quote(e.str()) << " [shape=box, label=" << dot_quote(lpo.label(e)) << "];\n";
  for (const auto& [a, b] : lpo.comm) o << "  " << dot_quote(a.str()) << " -> " << dot_quote(b.str()) << ";\n";
  for (const auto& [a, b] : lpo.interleave)
    o << "  " << dot_quote(a.str()) << " -> " << dot_quote(b.str()) << " [style=dashed];\n";
}

}  // namespace detail

inline std::string export_dot(const Lpo& lpo, const std::string& name = "lpo") {
  std::ostringstream o;
  o << "digraph " << detail::dot_quote(name) << " {\n";
  detail::dot_body(o, lpo);
  o << "}\n";
  return o.str();
}

inline std::string export_dot(const GluedLpo& g, const std::string& name = "glpo") {
  std::ostringstream o;
  o << "digraph " << detail::dot_quote(name) << " {\n";
  detail::dot_body(o, g.base);
  std::size_t colour = 0;
  for (const auto& [label, gi] : g.assignment) {
    const char* c = detail::glue_colour(colour++);
    for (const auto& [a, b] : g.glues.at(gi))
      o << "  " << detail::dot_quote(a.str()) << " -> " << detail::dot_quote(b.str()) << " [color=" << c
        << ", fontcolor=" << c << ", constraint=false, label=" << detail::dot_quote("glue:" + label) << "];\n";
  }
  o << "}\n";
  return o.str();
}

}  // namespace gluepo
