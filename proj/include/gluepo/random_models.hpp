#pragma once

// Seeded random models for the property campaigns. Same seed, same model.
//
//   PTI-nets: 1-5 places, 1-4 transitions, 0-2 inhibitor arcs, 0-2 initial
//             tokens per place, arc weights 1 (occasionally 2).
//   CTS:      1-3 agents, 1-4 states each, 1-3 channels in use (the
//             broadcast channel counts when it is drawn).
//   async:    1-3 processes over letters a, b, c, 1-3 states each.

#include <algorithm>
#include <cstdint>
#include <random>
#include <string>

#include "gluepo/async_automata.hpp"
#include "gluepo/cts.hpp"
#include "gluepo/pti_net.hpp"

namespace gluepo {

namespace detail {

class Dice {
 public:
  explicit Dice(std::uint64_t seed) : rng_(seed) {}
  /// Uniform in [lo, hi].
  unsigned range(unsigned lo, unsigned hi) { return std::uniform_int_distribution<unsigned>(lo, hi)(rng_); }
  bool chance(double p) { return std::bernoulli_distribution(p)(rng_); }

 private:
  std::mt19937_64 rng_;
};

}  // namespace detail

inline PtiNet random_pti_net(std::uint64_t seed) {
  detail::Dice d(seed);
  PtiNet n;
  n.name = "rnd" + std::to_string(seed);
  const unsigned np = d.range(1, 5), nt = d.range(1, 4);
  for (unsigned i = 0; i < np; ++i) n.places.push_back("p" + std::to_string(i));
  for (unsigned i = 0; i < nt; ++i) n.transitions.push_back("t" + std::to_string(i));
  auto place = [&] { return n.places[d.range(0, np - 1)]; };
  auto weight = [&] { return d.chance(0.1) ? 2u : 1u; };
  for (const auto& t : n.transitions) {
    n.flow[{place(), t}] = weight();
    if (d.chance(0.4)) n.flow[{place(), t}] = weight();
    for (unsigned k = d.range(0, 2); k > 0; --k) n.flow[{t, place()}] = weight();
  }
  for (unsigned k = d.range(0, 2); k > 0; --k) n.inhibitors.insert({place(), n.transitions[d.range(0, nt - 1)]});
  std::vector<unsigned> m(np);
  for (auto& x : m) x = d.chance(0.5) ? d.range(1, 2) : 0;
  if (std::all_of(m.begin(), m.end(), [](unsigned x) { return x == 0; })) m[d.range(0, np - 1)] = 1;
  n.initial = Marking(m);
  return n;
}

inline CtsSystem random_cts_system(std::uint64_t seed) {
  detail::Dice d(seed);
  CtsSystem sys;
  sys.name = "rnd" + std::to_string(seed);
  std::vector<std::string> chans;
  for (unsigned i = 0, nc = d.range(1, 3); i < nc; ++i) chans.push_back("c" + std::to_string(i));
  if (d.chance(0.5)) chans.back() = kBroadcast;
  std::vector<std::string> multicast;
  for (const auto& c : chans)
    if (c != kBroadcast) multicast.push_back(c);
  for (unsigned a = 0, na = d.range(1, 3); a < na; ++a) {
    CtsAgent ag;
    ag.name = "A" + std::to_string(a);
    const unsigned ns = d.range(1, 4);
    for (unsigned s = 0; s < ns; ++s) ag.states.push_back("s" + std::to_string(s));
    ag.initial = "s0";
    for (const auto& s : ag.states)
      for (const auto& c : multicast)
        if (d.chance(0.4)) ag.listen[s].insert(c);
    for (unsigned k = d.range(1, 4); k > 0; --k) {
      CtsLabel l{"v" + std::to_string(d.range(0, 1)), d.chance(0.5), chans[d.range(0, chans.size() - 1)]};
      ag.transitions.push_back({ag.states[d.range(0, ns - 1)], l, ag.states[d.range(0, ns - 1)]});
    }
    sys.agents.push_back(std::move(ag));
  }
  return sys;
}

inline AsyncSystem random_async_system(std::uint64_t seed) {
  detail::Dice d(seed);
  AsyncSystem sys;
  sys.name = "rnd" + std::to_string(seed);
  const std::vector<std::string> letters{"a", "b", "c"};
  for (unsigned i = 0, np = d.range(1, 3); i < np; ++i) {
    Process p;
    p.name = "P" + std::to_string(i);
    for (const auto& l : letters)
      if (d.chance(0.5)) p.alphabet.insert(l);
    if (p.alphabet.empty()) p.alphabet.insert(letters[d.range(0, 2)]);
    std::vector<std::string> own(p.alphabet.begin(), p.alphabet.end());
    const unsigned ns = d.range(1, 3);
    for (unsigned s = 0; s < ns; ++s) p.states.push_back("s" + std::to_string(s));
    p.initial = "s0";
    for (unsigned k = d.range(1, 4); k > 0; --k)
      p.transitions.push_back({p.states[d.range(0, ns - 1)], own[d.range(0, own.size() - 1)], p.states[d.range(0, ns - 1)]});
    sys.processes.push_back(std::move(p));
  }
  return sys;
}

}  // namespace gluepo
