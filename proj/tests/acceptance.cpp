// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "gluepo/gluepo.hpp"

using namespace gluepo;

namespace {

constexpr std::uint64_t kRandomNets = 200;
constexpr std::uint64_t kRandomSystems = 200;
constexpr std::uint64_t kRandomAsync = 100;
constexpr unsigned kBound = 5;
constexpr double kFig1Seconds = 1.0;
constexpr double kPnSeconds = 60.0;
constexpr double kCtsSeconds = 120.0;
constexpr std::size_t kAxiomSize = 40;

const MulticastBlockMode kModes[] = {MulticastBlockMode::listening, MulticastBlockMode::cannot_receive};

std::string fixture(const char* name) { return std::string(GLUEPO_FIXTURES) + "/" + name; }

class Clock {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

int failures = 0;

void report(int n, bool ok, const std::string& detail) {
  if (!ok) ++failures;
  std::printf("criterion %d %s: %s\n", n, ok ? "PASS" : "FAIL", detail.c_str());
  std::fflush(stdout);
}

std::string secs(double s) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f s", s);
  return buf;
}

bool partial_order(const Lpo& l) {
  OrderIndex idx(l);
  const std::size_t n = idx.size();
  for (std::size_t a = 0; a < n; ++a) {
    if (!idx.leq(a, a)) return false;
    for (std::size_t b = 0; b < n; ++b) {
      if (!idx.leq(a, b)) continue;
      if (a != b && idx.leq(b, a)) return false;
      for (std::size_t c = 0; c < n; ++c)
        if (idx.leq(b, c) && !idx.leq(a, c)) return false;
    }
  }
  return true;
}

std::set<std::pair<std::string, std::string>> labelled(const Lpo& l, const Relation& r) {
  std::set<std::pair<std::string, std::string>> out;
  for (const auto& [a, b] : r) out.emplace(l.label(a), l.label(b));
  return out;
}

/// Counts witness failures over all ordered pairs of distinct g-LPOs, and
/// pairs of LPOs sharing a g-image whose images are told apart.
template <class W, class V, class Image>
std::size_t separation_failures(const LpoSet& lpos, const GluedLpoSet& glpos, W witness, V verify, Image image,
                                std::size_t& pairs) {
  std::size_t bad = 0;
  std::vector<const GluedLpo*> gs;
  for (const auto& g : glpos) gs.push_back(&g);
  for (std::size_t i = 0; i < gs.size(); ++i)
    for (std::size_t j = 0; j < gs.size(); ++j) {
      if (i == j) continue;
      ++pairs;
      try {
        auto w = witness(*gs[i], *gs[j]);
        if (!w || !verify(*gs[i], *gs[j], *w)) ++bad;
      } catch (const Error&) {
        ++bad;
      }
    }
  std::map<GluedLpo, std::vector<const Lpo*>> by_image;
  for (const auto& l : lpos) by_image[image(l)].push_back(&l);
  for (const auto& [g, ls] : by_image)
    for (std::size_t i = 1; i < ls.size(); ++i)
      if (witness(image(*ls[0]), image(*ls[i]))) ++bad;
  return bad;
}

struct Structural {
  std::size_t lpos = 0, invalid = 0, unstable = 0, checked = 0, not_po = 0;
};

void criterion1() {
  Clock c;
  auto net = parse_pti(read_file(fixture("fig1.pti")));
  auto comps = enumerate_computations_pn(net, 4, true);
  double t = c.seconds();
  bool ok = comps.lpos.size() == 3 && comps.glpos.size() == 2 && t < kFig1Seconds;
  report(1, ok,
         std::to_string(comps.lpos.size()) + " maximal LPOs, " + std::to_string(comps.glpos.size()) +
             " g-LPOs (want 3, 2) in " + secs(t) + " (limit 1 s)");
}

void criterion2() {
  auto net = parse_pti(read_file(fixture("fig1.pti")));
  auto comps = enumerate_computations_pn(net, 4, true);
  std::set<std::set<std::pair<std::string, std::string>>> left_orders;
  std::vector<std::size_t> counts;
  bool right_ok = false;
  for (const auto& g : comps.glpos) {
    auto rs = refinements(g);
    counts.push_back(rs.size());
    if (rs.size() == 2)
      for (const auto& r : rs) left_orders.insert(labelled(r, r.interleave));
    if (rs.size() == 1) right_ok = labelled(rs[0], rs[0].interleave) == std::set<std::pair<std::string, std::string>>{{"t4", "t1"}};
  }
  std::sort(counts.begin(), counts.end());
  bool left_ok = left_orders == std::set<std::set<std::pair<std::string, std::string>>>{{{"t4", "t1"}}, {{"t2", "t4"}}};
  std::string detail = "refinement counts";
  for (auto n : counts) detail += " " + std::to_string(n);
  detail += " (want 1 2); left orders ";
  detail += left_ok ? "t4->t1 and t2->t4" : "unexpected";
  detail += right_ok ? ", right order t4->t1" : ", right unexpected";
  report(2, counts == std::vector<std::size_t>{1, 2} && left_ok && right_ok, detail);
}

void criterion3_5_7(std::size_t& sep_pairs, std::size_t& sep_bad, Structural& st) {
  std::vector<PtiNet> nets{parse_pti(read_file(fixture("fig1.pti")))};
  for (std::uint64_t s = 0; s < kRandomNets; ++s) nets.push_back(random_pti_net(s));

  Clock c;
  std::size_t violations = 0;
  std::string first;
  for (const auto& net : nets) {
    auto r = check_refinement_theorem_pn(net, kBound);
    if (!r.holds) {
      ++violations;
      if (first.empty()) first = net.name + ": " + r.counterexample;
    }
  }
  double t = c.seconds();
  report(3, violations == 0 && t < kPnSeconds,
         std::to_string(nets.size()) + " nets at max-events 5, " + std::to_string(violations) + " violations in " +
             secs(t) + " (limit 60 s)" + (first.empty() ? "" : "; first: " + first));

  for (const auto& net : nets) {
    auto comps = enumerate_computations_pn(net, kBound);
    sep_bad += separation_failures(
        comps.lpos, comps.glpos, separation_witness_pn, verify_pn_witness,
        [&](const Lpo& l) { return glpo_from_lpo_pn(net, l); }, sep_pairs);
    for (const auto& l : comps.lpos) {
      ++st.lpos;
      if (!validate_lpo_pn(net, l).ok()) ++st.invalid;
      if (l.size() <= kAxiomSize) {
        ++st.checked;
        if (!partial_order(l)) ++st.not_po;
      }
    }
    auto shuffled = enumerate_computations_pn(net, EnumerateOptions{kBound, false, net.name.size() + 17});
    if (shuffled.lpos != comps.lpos || shuffled.glpos != comps.glpos) ++st.unstable;
  }
}

void criterion4_5_7(std::size_t& sep_pairs, std::size_t& sep_bad, Structural& st) {
  std::vector<CtsSystem> systems{parse_cts(read_file(fixture("fig2.cts")))};
  for (std::uint64_t s = 0; s < kRandomSystems; ++s) systems.push_back(random_cts_system(s));

  Clock c;
  std::size_t violations = 0;
  std::string first;
  for (auto mode : kModes)
    for (const auto& sys : systems) {
      auto r = check_refinement_theorem_cts(sys, kBound, mode);
      if (!r.holds) {
        ++violations;
        if (first.empty()) first = sys.name + " (" + to_string(mode) + "): " + r.counterexample;
      }
    }
  double t = c.seconds();
  report(4, violations == 0 && t < kCtsSeconds,
         std::to_string(systems.size()) + " systems x 2 modes at max-events 5, " + std::to_string(violations) +
             " violations in " + secs(t) + " (limit 120 s)" + (first.empty() ? "" : "; first: " + first));

  for (auto mode : kModes)
    for (const auto& sys : systems) {
      auto comps = enumerate_computations_cts(sys, kBound, false, mode);
      sep_bad += separation_failures(
          comps.lpos, comps.glpos, separation_witness_cts, verify_cts_witness,
          [&](const Lpo& l) { return glpo_from_lpo_cts(sys, l, mode); }, sep_pairs);
      for (const auto& l : comps.lpos) {
        ++st.lpos;
        if (!validate_lpo_cts(sys, l, mode).ok()) ++st.invalid;
        if (l.size() <= kAxiomSize) {
          ++st.checked;
          if (!partial_order(l)) ++st.not_po;
        }
      }
      auto shuffled =
          enumerate_computations_cts(sys, CtsEnumerateOptions{kBound, false, mode, sys.name.size() + 17});
      if (shuffled.lpos != comps.lpos || shuffled.glpos != comps.glpos) ++st.unstable;
    }
}

void criterion6(Structural& st) {
  std::size_t bad = 0, comps = 0;
  std::string first;
  for (std::uint64_t s = 0; s < kRandomAsync; ++s) {
    auto sys = random_async_system(s);
    auto r = check_baseline_async(sys, kBound);
    comps += r.computations;
    if (!r.holds) {
      ++bad;
      if (first.empty()) first = sys.name + ": " + r.counterexample;
    }
    for (const auto& l : enumerate_computations_async(sys, kBound)) {
      ++st.lpos;
      if (!validate_lpo_async(sys, l).ok() || !l.interleave.empty()) ++st.invalid;
      if (l.size() <= kAxiomSize) {
        ++st.checked;
        if (!partial_order(l)) ++st.not_po;
      }
    }
  }
  report(6, bad == 0,
         std::to_string(kRandomAsync) + " systems, " + std::to_string(comps) + " computations, " +
             std::to_string(bad) + " violations" + (first.empty() ? "" : "; first: " + first));
}

}  // namespace

int main() {
  try {
    criterion1();
    criterion2();
    std::size_t pairs = 0, bad = 0;
    Structural st;
    criterion3_5_7(pairs, bad, st);
    criterion4_5_7(pairs, bad, st);
    report(5, bad == 0, std::to_string(pairs) + " ordered pairs of distinct g-LPOs, " + std::to_string(bad) +
                            " missing or unverified witnesses");
    criterion6(st);
    report(7, st.invalid == 0 && st.unstable == 0 && st.not_po == 0,
           std::to_string(st.lpos) + " generated LPOs, " + std::to_string(st.invalid) + " invalid; " +
               std::to_string(st.unstable) + " order-dependent enumerations; " + std::to_string(st.checked) +
               " orders with <= 40 elements, " + std::to_string(st.not_po) + " not partial orders");
  } catch (const std::exception& e) {
    std::printf("acceptance aborted: %s\n", e.what());
    return 1;
  }
  return failures == 0 ? 0 : 1;
}
