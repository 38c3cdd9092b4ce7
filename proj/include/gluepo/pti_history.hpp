#pragma once

// p-histories and t-histories: recursive records of a token's or a firing's
// complete causal past. Their canonical text encoding is the element id used
// in LPOs, so equal ids mean equal histories.
//
//   t-history  T[<transition>|<p-history>*<taken>,...]   (sources sorted)
//   p-history  P[<t-history>|<place>|<count>]

#include <algorithm>
#include <cctype>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "gluepo/core_po.hpp"
#include "gluepo/pti_net.hpp"

namespace gluepo {

struct THistory;

struct PHistory {
  std::shared_ptr<const THistory> producer;
  std::string place;
  unsigned count = 0;
  ElementId id;
  unsigned depth = 0;
};

struct Take {
  PHistory source;
  unsigned taken = 0;
};

struct THistory {
  std::string transition;
  std::vector<Take> takes;
  ElementId id;
  unsigned depth = 0;

  bool is_initial() const { return transition == kInitialTransition; }

  /// Number of tokens this firing takes from `v` (0 if none).
  unsigned taken_from(const ElementId& v) const {
    for (const auto& t : takes)
      if (t.source.id == v) return t.taken;
    return 0;
  }
};

using THistoryPtr = std::shared_ptr<const THistory>;

inline THistoryPtr make_t_history(std::string transition, std::vector<Take> takes) {
  std::sort(takes.begin(), takes.end(), [](const Take& a, const Take& b) { return a.source.id < b.source.id; });
  std::vector<Take> merged;
  for (auto& t : takes) {
    if (t.taken == 0) continue;
    if (!merged.empty() && merged.back().source.id == t.source.id)
      merged.back().taken += t.taken;
    else
      merged.push_back(std::move(t));
  }
  auto h = std::make_shared<THistory>();
  h->transition = std::move(transition);
  h->takes = std::move(merged);
  std::string id = "T[" + h->transition + "|";
  for (std::size_t i = 0; i < h->takes.size(); ++i) {
    if (i) id += ",";
    id += h->takes[i].source.id.str() + "*" + std::to_string(h->takes[i].taken);
    h->depth = std::max(h->depth, h->takes[i].source.depth);
  }
  id += "]";
  h->id = ElementId(std::move(id));
  return h;
}

inline THistoryPtr initial_t_history() { return make_t_history(kInitialTransition, {}); }

inline PHistory make_p_history(THistoryPtr producer, std::string place, unsigned count) {
  PHistory p;
  p.place = std::move(place);
  p.count = count;
  p.depth = producer->depth + 1;
  p.id = ElementId("P[" + producer->id.str() + "|" + p.place + "|" + std::to_string(count) + "]");
  p.producer = std::move(producer);
  return p;
}

/// The p-histories a t-history creates: one per place with positive post weight.
inline std::vector<PHistory> produced_by(const PtiNet& net, const THistoryPtr& e) {
  std::vector<PHistory> out;
  Marking post = net.post(e->transition);
  for (std::size_t i = 0; i < net.places.size(); ++i)
    if (post[i] > 0) out.push_back(make_p_history(e, net.places[i], post[i]));
  return out;
}

class HistoryDecodeError : public Error {
 public:
  using Error::Error;
};

namespace detail {

class PtiIdParser {
 public:
  explicit PtiIdParser(std::string_view s) : s_(s) {}

  THistoryPtr t_history() {
    expect("T[");
    std::string t = name();
    expect("|");
    std::vector<Take> takes;
    if (peek() != ']') {
      for (;;) {
        PHistory p = p_history();
        expect("*");
        unsigned n = number();
        takes.push_back({std::move(p), n});
        if (peek() != ',') break;
        ++pos_;
      }
    }
    expect("]");
    return make_t_history(std::move(t), std::move(takes));
  }

  PHistory p_history() {
    expect("P[");
    THistoryPtr producer = t_history();
    expect("|");
    std::string place = name();
    expect("|");
    unsigned n = number();
    expect("]");
    return make_p_history(std::move(producer), std::move(place), n);
  }

  void finish() const {
    if (pos_ != s_.size()) fail("trailing characters");
  }

 private:
  char peek() const { return pos_ < s_.size() ? s_[pos_] : '\0'; }
  [[noreturn]] void fail(const std::string& what) const {
    throw HistoryDecodeError("malformed history id at offset " + std::to_string(pos_) + ": " + what);
  }
  void expect(std::string_view lit) {
    if (s_.substr(pos_, lit.size()) != lit) fail("expected '" + std::string(lit) + "'");
    pos_ += lit.size();
  }
  std::string name() {
    std::size_t start = pos_;
    while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_' ||
                                s_[pos_] == '.' || s_[pos_] == '-'))
      ++pos_;
    if (start == pos_) fail("expected a name");
    return std::string(s_.substr(start, pos_ - start));
  }
  unsigned number() {
    std::size_t start = pos_;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    if (start == pos_) fail("expected a number");
    return static_cast<unsigned>(std::stoul(std::string(s_.substr(start, pos_ - start))));
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

}  // namespace detail

inline THistoryPtr decode_t_history(const ElementId& id) {
  detail::PtiIdParser p(id.str());
  auto h = p.t_history();
  p.finish();
  return h;
}

inline PHistory decode_p_history(const ElementId& id) {
  detail::PtiIdParser p(id.str());
  auto h = p.p_history();
  p.finish();
  return h;
}

}  // namespace gluepo
