#pragma once

// Versioned, byte-stable JSON documents for Lpo and GluedLpo. Field order is
// fixed and every list is sorted by element id, so equal values always
// serialize to identical text.

#include <string>

#include "json.hpp"

#include "gluepo/core_po.hpp"

namespace gluepo {

inline constexpr int kJsonSchemaVersion = 1;

class FormatError : public Error {
 public:
  using Error::Error;
};

namespace detail {

using ojson = nlohmann::ordered_json;

inline ojson relation_json(const Relation& rel) {
  ojson arr = ojson::array();
  for (const auto& [a, b] : rel) arr.push_back(ojson::array({a.str(), b.str()}));
  return arr;
}

inline Relation relation_from(const ojson& arr) {
  Relation rel;
  for (const auto& p : arr) {
    if (!p.is_array() || p.size() != 2) throw FormatError("relation entries must be [from, to] pairs");
    rel.emplace(ElementId(p[0].get<std::string>()), ElementId(p[1].get<std::string>()));
  }
  return rel;
}

inline void check_header(const ojson& j, const char* format) {
  if (!j.is_object() || j.value("format", "") != format)
    throw FormatError(std::string("expected a ") + format + " document");
  if (j.value("version", 0) != kJsonSchemaVersion)
    throw FormatError("unsupported " + std::string(format) + " version");
}

}  // namespace detail

inline nlohmann::ordered_json lpo_to_json(const Lpo& lpo) {
  detail::ojson j;
  j["format"] = "gluepo-lpo";
  j["version"] = kJsonSchemaVersion;
  auto elements = [](const std::set<ElementId>& ids, const std::map<ElementId, std::string>& labels) {
    detail::ojson arr = detail::ojson::array();
    for (const auto& id : ids) {
      detail::ojson item;
      item["id"] = id.str();
      auto it = labels.find(id);
      item["label"] = it == labels.end() ? "" : it->second;
      arr.push_back(std::move(item));
    }
    return arr;
  };
  j["nodes"] = elements(lpo.nodes, lpo.node_label);
  j["edges"] = elements(lpo.edges, lpo.edge_label);
  j["comm"] = detail::relation_json(lpo.comm);
  j["interleave"] = detail::relation_json(lpo.interleave);
  return j;
}

inline Lpo lpo_from_json(const nlohmann::ordered_json& j) {
  detail::check_header(j, "gluepo-lpo");
  Lpo lpo;
  for (const auto& n : j.at("nodes")) {
    ElementId id(n.at("id").get<std::string>());
    lpo.nodes.insert(id);
    lpo.node_label[id] = n.at("label").get<std::string>();
  }
  for (const auto& e : j.at("edges")) {
    ElementId id(e.at("id").get<std::string>());
    lpo.edges.insert(id);
    lpo.edge_label[id] = e.at("label").get<std::string>();
  }
  lpo.comm = detail::relation_from(j.at("comm"));
  lpo.interleave = detail::relation_from(j.at("interleave"));
  return lpo;
}

inline nlohmann::ordered_json glued_to_json(const GluedLpo& g) {
  detail::ojson j;
  j["format"] = "gluepo-glpo";
  j["version"] = kJsonSchemaVersion;
  j["base"] = lpo_to_json(g.base);
  detail::ojson glues = detail::ojson::array();
  for (const auto& rel : g.glues) glues.push_back(detail::relation_json(rel));
  j["glues"] = std::move(glues);
  detail::ojson assignment = detail::ojson::object();
  for (const auto& [label, i] : g.assignment) assignment[label] = i;
  j["assignment"] = std::move(assignment);
  return j;
}

inline GluedLpo glued_from_json(const nlohmann::ordered_json& j) {
  detail::check_header(j, "gluepo-glpo");
  GluedLpo g;
  g.base = lpo_from_json(j.at("base"));
  for (const auto& rel : j.at("glues")) g.glues.push_back(detail::relation_from(rel));
  for (const auto& [label, i] : j.at("assignment").items()) {
    auto idx = i.get<std::size_t>();
    if (idx >= g.glues.size()) throw FormatError("assignment of " + label + " is out of range");
    g.assignment[label] = idx;
  }
  return g;
}

inline std::string to_json_text(const Lpo& lpo, int indent = -1) { return lpo_to_json(lpo).dump(indent); }
inline std::string to_json_text(const GluedLpo& g, int indent = -1) { return glued_to_json(g).dump(indent); }

}  // namespace gluepo
