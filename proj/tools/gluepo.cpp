// gluepo command line: enumeration, glue, theorem checks, separation
// witnesses, CTS composition, the async baseline, rendering and seeded
// random campaigns.
//
// Exit status: 0 success, 1 property violation, 2 usage or parse error.

#include <chrono>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "gluepo/gluepo.hpp"

namespace {

using namespace gluepo;
using json = nlohmann::ordered_json;

constexpr unsigned kDefaultCap = 12;

std::string count_of(std::size_t n, const std::string& noun) {
  return std::to_string(n) + " " + noun + (n == 1 ? "" : "s");
}

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Options {
  std::vector<std::string> models;
  std::string kind;
  unsigned max_events = 4;
  bool maximal_only = false;
  std::string mode = "listening";
  bool mode_given = false;
  std::string format = "summary";
  std::uint64_t seed = 0;
  unsigned count = 0;
  bool glued = false;
};

unsigned max_events_cap() {
  const char* env = std::getenv("GLUEPO_MAX_EVENTS_CAP");
  if (!env || !*env) return kDefaultCap;
  try {
    std::size_t used = 0;
    unsigned long v = std::stoul(env, &used);
    if (used != std::string(env).size()) throw std::invalid_argument(env);
    return static_cast<unsigned>(v);
  } catch (const std::exception&) {
    throw UsageError(std::string("GLUEPO_MAX_EVENTS_CAP is not a number: ") + env);
  }
}

void check_cap(const Options& o) {
  unsigned cap = max_events_cap();
  if (o.max_events > cap)
    throw UsageError("--max-events " + std::to_string(o.max_events) + " exceeds the cap of " + std::to_string(cap) +
                     " (set GLUEPO_MAX_EVENTS_CAP to raise it)");
}

MulticastBlockMode block_mode(const Options& o) {
  return o.mode == "cannot-receive" ? MulticastBlockMode::cannot_receive : MulticastBlockMode::listening;
}

Model load(const Options& o, std::size_t i = 0) {
  if (o.models.size() <= i) throw UsageError("missing model file");
  Model m = load_model(o.models[i]);
  if (!o.kind.empty() && o.kind != to_string(kind_of(m)))
    throw UsageError(o.models[i] + " is a " + to_string(kind_of(m)) + " model, not " + o.kind);
  return m;
}

std::string model_name(const Model& m) {
  return std::visit([](const auto& x) { return x.name; }, m);
}

json header(const char* what, const Model& m, const Options& o) {
  json j;
  j["format"] = std::string("gluepo-") + what;
  j["version"] = kJsonSchemaVersion;
  j["model"] = model_name(m);
  j["kind"] = to_string(kind_of(m));
  j["max_events"] = o.max_events;
  j["maximal_only"] = o.maximal_only;
  if (kind_of(m) == ModelKind::cts) j["multicast_block_mode"] = o.mode;
  return j;
}

LpoSet lpos_of(const Model& m, const Options& o) {
  if (auto* n = std::get_if<PtiNet>(&m)) return enumerate_computations_pn(*n, o.max_events, o.maximal_only).lpos;
  if (auto* s = std::get_if<CtsSystem>(&m))
    return enumerate_computations_cts(*s, o.max_events, o.maximal_only, block_mode(o)).lpos;
  auto all = enumerate_computations_async(std::get<AsyncSystem>(m), o.max_events);
  return o.maximal_only ? maximal_filter(all) : all;
}

GluedLpoSet glpos_of(const Model& m, const Options& o) {
  if (auto* n = std::get_if<PtiNet>(&m)) return enumerate_computations_pn(*n, o.max_events, o.maximal_only).glpos;
  if (auto* s = std::get_if<CtsSystem>(&m))
    return enumerate_computations_cts(*s, o.max_events, o.maximal_only, block_mode(o)).glpos;
  GluedLpoSet out;
  for (const auto& l : lpos_of(m, o)) out.insert(GluedLpo{l, {}, {}});
  return out;
}

template <class Set, class ToJson>
int emit_set(const char* what, const char* noun, const Model& m, const Options& o, const Set& items, ToJson to_json) {
  if (o.format == "json") {
    json j = header(what, m, o);
    j["count"] = items.size();
    json arr = json::array();
    for (const auto& x : items) arr.push_back(to_json(x));
    j["items"] = std::move(arr);
    std::cout << j.dump(2) << "\n";
  } else if (o.format == "dot") {
    std::size_t k = 0;
    for (const auto& x : items) std::cout << export_dot(x, std::string(noun) + std::to_string(++k));
  } else {
    std::cout << count_of(items.size(), noun) << "\n";
    std::size_t k = 0;
    for (const auto& x : items) {
      const Lpo& l = [&]() -> const Lpo& {
        if constexpr (std::is_same_v<std::decay_t<decltype(x)>, Lpo>) return x;
        else return x.base;
      }();
      std::cout << "  " << noun << " " << ++k << ": " << l.edges.size() << " edges, " << l.nodes.size() << " nodes, "
                << l.interleave.size() << " interleaving pairs\n";
    }
  }
  return 0;
}

int cmd_unfold(const Options& o) {
  check_cap(o);
  Model m = load(o);
  return emit_set("unfold", "LPO", m, o, lpos_of(m, o), [](const Lpo& l) { return lpo_to_json(l); });
}

int cmd_glue(const Options& o) {
  check_cap(o);
  Model m = load(o);
  return emit_set("glue", "g-LPO", m, o, glpos_of(m, o), [](const GluedLpo& g) { return glued_to_json(g); });
}

int cmd_check(const Options& o) {
  check_cap(o);
  if (o.format == "dot") throw UsageError("check-equivalence has no dot output");
  Model m = load(o);
  json j = header("check-equivalence", m, o);
  bool holds = true;
  std::ostringstream text;
  if (auto* a = std::get_if<AsyncSystem>(&m)) {
    auto r = check_baseline_async(*a, o.max_events);
    holds = r.holds;
    j["holds"] = r.holds;
    j["computations"] = r.computations;
    j["counterexample"] = r.counterexample;
    text << (r.holds ? "baseline holds: " : "baseline fails: ") << count_of(r.computations, "computation") << "\n";
    if (!r.holds) text << "counterexample: " << r.counterexample << "\n";
  } else {
    TheoremReport r = std::holds_alternative<PtiNet>(m)
                          ? check_refinement_theorem_pn(std::get<PtiNet>(m), o.max_events)
                          : check_refinement_theorem_cts(std::get<CtsSystem>(m), o.max_events, block_mode(o));
    holds = r.holds;
    j["holds"] = r.holds;
    j["lpos"] = r.lpos;
    j["glpos"] = r.glpos;
    j["refinements"] = r.refinements;
    j["counterexample"] = r.counterexample;
    j["image_stable"] = r.image_stable;
    j["unstable_example"] = r.unstable_example;
    text << (r.holds ? "theorem holds: " : "theorem fails: ") << count_of(r.lpos, "LPO") << ", "
         << count_of(r.glpos, "g-LPO") << ", " << count_of(r.refinements, "refinement") << "\n";
    if (!r.holds) text << "counterexample: " << r.counterexample << "\n";
    text << "g-image stable: " << (r.image_stable ? "yes" : "no (" + r.unstable_example + ")") << "\n";
  }
  if (o.format == "json") std::cout << j.dump(2) << "\n";
  else std::cout << text.str();
  return holds ? 0 : 1;
}

json witness_json(const PnWitness& w) {
  json j;
  if (auto* l = std::get_if<LeftoverMismatch>(&w)) {
    j["type"] = "leftover";
    j["node"] = l->node.str();
    j["left_count"] = l->left_count;
    j["right_count"] = l->right_count;
  } else {
    const auto& p = std::get<ParticipationMismatch>(w);
    j["type"] = "participation";
    json nodes = json::array();
    for (const auto& n : p.nodes) nodes.push_back(n.str());
    j["nodes"] = nodes;
    j["transition_edge"] = p.transition_edge.str();
    j["present_in"] = to_string(p.present_in);
  }
  return j;
}

json witness_json(const CtsWitness& w) {
  json j;
  if (auto* m = std::get_if<MaximalityMismatch>(&w)) {
    j["type"] = "maximality";
    j["agent"] = m->agent;
    j["history"] = m->history.str();
    j["maximal_in"] = to_string(m->maximal_in);
  } else if (auto* n = std::get_if<NextLabelMismatch>(&w)) {
    j["type"] = "next-label";
    j["agent"] = n->agent;
    j["history"] = n->history.str();
    j["left_label"] = n->left_label;
    j["right_label"] = n->right_label;
  } else {
    const auto& c = std::get<ChannelOrderMismatch>(w);
    j["type"] = "channel-order";
    j["agents"] = {c.agents.first, c.agents.second};
    j["histories"] = {c.histories.first.str(), c.histories.second.str()};
    j["left_edges"] = {c.left_edges.first.str(), c.left_edges.second.str()};
    j["right_edges"] = {c.right_edges.first.str(), c.right_edges.second.str()};
    j["orders"] = {to_string(c.orders.first), to_string(c.orders.second)};
  }
  return j;
}

struct SeparationOutcome {
  std::size_t pairs = 0;
  std::size_t failures = 0;
  json witnesses = json::array();
  std::vector<std::string> lines;
};

SeparationOutcome separate_all(const Model& m, const GluedLpoSet& set) {
  SeparationOutcome out;
  std::vector<GluedLpo> gs(set.begin(), set.end());
  for (std::size_t i = 0; i < gs.size(); ++i)
    for (std::size_t j = i + 1; j < gs.size(); ++j) {
      ++out.pairs;
      json entry;
      entry["left"] = i + 1;
      entry["right"] = j + 1;
      std::string line = "g-LPO " + std::to_string(i + 1) + " vs " + std::to_string(j + 1) + ": ";
      try {
        bool ok = false;
        if (std::holds_alternative<PtiNet>(m)) {
          auto w = separation_witness_pn(gs[i], gs[j]);
          ok = w && verify_pn_witness(gs[i], gs[j], *w);
          if (w) entry["witness"] = witness_json(*w), line += describe(*w);
        } else {
          auto w = separation_witness_cts(gs[i], gs[j]);
          ok = w && verify_cts_witness(gs[i], gs[j], *w);
          if (w) entry["witness"] = witness_json(*w), line += describe(*w);
        }
        if (!ok) {
          ++out.failures;
          line += " [does not re-validate]";
        }
        entry["verified"] = ok;
      } catch (const Error& e) {
        ++out.failures;
        entry["error"] = e.what();
        entry["verified"] = false;
        line += std::string("no witness: ") + e.what();
      }
      out.witnesses.push_back(std::move(entry));
      out.lines.push_back(std::move(line));
    }
  return out;
}

int cmd_separate(const Options& o) {
  check_cap(o);
  if (o.format == "dot") throw UsageError("separate has no dot output");
  Model m = load(o);
  if (std::holds_alternative<AsyncSystem>(m)) throw UsageError("separate needs a pti or cts model");
  auto gs = glpos_of(m, o);
  auto res = separate_all(m, gs);
  if (o.format == "json") {
    json j = header("separate", m, o);
    j["glpos"] = gs.size();
    j["pairs"] = res.pairs;
    j["failures"] = res.failures;
    j["witnesses"] = res.witnesses;
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << count_of(gs.size(), "g-LPO") << ", " << count_of(res.pairs, "pair") << ", " << res.pairs - res.failures << " separated\n";
    for (const auto& l : res.lines) std::cout << "  " << l << "\n";
  }
  return res.failures == 0 ? 0 : 1;
}

int cmd_compose(const Options& o) {
  if (o.format == "dot") throw UsageError("compose has no dot output");
  std::vector<CtsAgent> agents;
  std::string name;
  for (std::size_t i = 0; i < o.models.size(); ++i) {
    Model m = load(o, i);
    auto* s = std::get_if<CtsSystem>(&m);
    if (!s) throw UsageError("compose needs cts models");
    name += (name.empty() ? "" : "_") + s->name;
    agents.insert(agents.end(), s->agents.begin(), s->agents.end());
  }
  if (agents.empty()) throw UsageError("nothing to compose");
  CtsAgent product = agents.front();
  for (std::size_t i = 1; i < agents.size(); ++i) product = compose(product, agents[i]);
  CtsSystem out{name, {product}};
  if (o.format == "json") {
    json j;
    j["format"] = "gluepo-compose";
    j["version"] = kJsonSchemaVersion;
    j["agent"] = product.name;
    j["initial"] = product.initial;
    json states = json::array();
    for (const auto& st : product.states) {
      json e;
      e["state"] = st;
      json ls = json::array();
      for (const auto& c : product.listening(st)) ls.push_back(c);
      e["listen"] = ls;
      states.push_back(e);
    }
    j["states"] = states;
    json ts = json::array();
    for (const auto& t : product.transitions) ts.push_back({t.src, t.label.str(), t.dst});
    j["transitions"] = ts;
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << emit_cts(out);
  }
  return 0;
}

int cmd_baseline(const Options& o) {
  check_cap(o);
  if (o.format == "dot") throw UsageError("baseline has no dot output");
  Model m = load(o);
  if (!std::holds_alternative<AsyncSystem>(m)) throw UsageError("baseline needs an async model");
  return cmd_check(o);
}

int cmd_render(const Options& o) {
  if (o.models.empty()) throw UsageError("missing input file");
  std::string text = read_file(o.models[0]);
  auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') {
    json j;
    try {
      j = json::parse(text);
    } catch (const json::parse_error& e) {
      throw ParseError(1, 1, e.what());
    }
    const std::string f = j.value("format", "");
    if (f == "gluepo-lpo") std::cout << export_dot(lpo_from_json(j));
    else if (f == "gluepo-glpo") std::cout << export_dot(glued_from_json(j));
    else if (f == "gluepo-unfold" || f == "gluepo-glue") {
      std::size_t k = 0;
      for (const auto& item : j.at("items")) {
        ++k;
        if (f == "gluepo-unfold") std::cout << export_dot(lpo_from_json(item), "LPO" + std::to_string(k));
        else std::cout << export_dot(glued_from_json(item), "g-LPO" + std::to_string(k));
      }
    } else {
      throw UsageError("render cannot read a '" + f + "' document");
    }
    return 0;
  }
  check_cap(o);
  Options d = o;
  d.format = "dot";
  return d.glued ? cmd_glue(d) : cmd_unfold(d);
}

int cmd_random_suite(const Options& o) {
  check_cap(o);
  if (o.format == "dot") throw UsageError("random-suite has no dot output");
  const std::string kind = o.kind.empty() ? "pti" : o.kind;
  const unsigned count = o.count ? o.count : (kind == "async" ? 100 : 200);
  std::vector<MulticastBlockMode> modes{block_mode(o)};
  if (kind == "cts" && !o.mode_given) modes = {MulticastBlockMode::listening, MulticastBlockMode::cannot_receive};

  auto start = std::chrono::steady_clock::now();
  std::size_t runs = 0, violations = 0, unstable = 0;
  json failures = json::array();
  auto report = [&](std::uint64_t seed, const Model& m, const std::string& mode, const std::string& why) {
    ++violations;
    json f;
    f["seed"] = seed;
    if (!mode.empty()) f["multicast_block_mode"] = mode;
    f["reason"] = why;
    f["model"] = emit_model(m);
    failures.push_back(f);
    if (o.format != "json")
      std::cout << "violation: seed " << seed << (mode.empty() ? "" : " (" + mode + ")") << ": " << why << "\n"
                << emit_model(m);
  };
  for (unsigned i = 0; i < count; ++i) {
    const std::uint64_t seed = o.seed + i;
    if (kind == "pti") {
      Model m = random_pti_net(seed);
      ++runs;
      auto r = check_refinement_theorem_pn(std::get<PtiNet>(m), o.max_events);
      unstable += !r.image_stable;
      if (!r.holds) report(seed, m, "", r.counterexample);
      auto sep = separate_all(m, enumerate_computations_pn(std::get<PtiNet>(m), o.max_events).glpos);
      if (sep.failures) report(seed, m, "", std::to_string(sep.failures) + " g-LPO pairs without a valid witness");
    } else if (kind == "cts") {
      Model m = random_cts_system(seed);
      for (auto mode : modes) {
        ++runs;
        auto r = check_refinement_theorem_cts(std::get<CtsSystem>(m), o.max_events, mode);
        unstable += !r.image_stable;
        if (!r.holds) report(seed, m, to_string(mode), r.counterexample);
        auto sep =
            separate_all(m, enumerate_computations_cts(std::get<CtsSystem>(m), o.max_events, false, mode).glpos);
        if (sep.failures)
          report(seed, m, to_string(mode), std::to_string(sep.failures) + " g-LPO pairs without a valid witness");
      }
    } else if (kind == "async") {
      Model m = random_async_system(seed);
      ++runs;
      auto r = check_baseline_async(std::get<AsyncSystem>(m), o.max_events);
      if (!r.holds) report(seed, m, "", r.counterexample);
    } else {
      throw UsageError("unknown kind: " + kind);
    }
  }
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (o.format == "json") {
    json j;
    j["format"] = "gluepo-random-suite";
    j["version"] = kJsonSchemaVersion;
    j["kind"] = kind;
    j["seed"] = o.seed;
    j["count"] = count;
    j["max_events"] = o.max_events;
    j["runs"] = runs;
    j["violations"] = violations;
    j["unstable_g_images"] = unstable;
    j["seconds"] = secs;
    j["failures"] = failures;
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << count << " " << kind << " models, " << runs << " runs, " << violations << " violations, " << unstable
              << " unstable g-images, " << secs << " s\n";
  }
  return violations == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"LPO and glued-LPO semantics for PTI-nets, CTS and asynchronous automata"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Show help for every subcommand");
  Options o;

  auto add_model = [&](CLI::App* s, bool required = true) {
    auto* opt = s->add_option("model", o.models, "Model file (.pti, .cts or async)");
    if (required) opt->required();
  };
  auto add_enum = [&](CLI::App* s) {
    s->add_option("--max-events", o.max_events, "Bound on the number of events")->capture_default_str();
    s->add_flag("--maximal-only", o.maximal_only, "Keep only maximal computations");
  };
  auto add_mode = [&](CLI::App* s) {
    s->add_option("--multicast-block-mode", o.mode, "Histories a multicast must be ordered against")
        ->check(CLI::IsMember({"listening", "cannot-receive"}))
        ->capture_default_str();
  };
  auto add_format = [&](CLI::App* s) {
    s->add_option("--format", o.format, "Output format")
        ->check(CLI::IsMember({"dot", "json", "summary"}))
        ->capture_default_str();
  };
  auto add_kind = [&](CLI::App* s) {
    s->add_option("--kind", o.kind, "Model kind")->check(CLI::IsMember({"pti", "cts", "async"}));
  };

  std::vector<std::pair<CLI::App*, int (*)(const Options&)>> cmds;
  auto sub = [&](const char* name, const char* desc, int (*fn)(const Options&)) {
    CLI::App* s = app.add_subcommand(name, desc);
    cmds.emplace_back(s, fn);
    return s;
  };

  for (auto [name, desc, fn] : {std::tuple{"unfold", "Enumerate LPO computations", &cmd_unfold},
                                std::tuple{"glue", "Enumerate g-LPO computations", &cmd_glue},
                                std::tuple{"check-equivalence", "Check both refinement directions", &cmd_check},
                                std::tuple{"separate", "Separation witnesses for every pair of g-LPOs", &cmd_separate},
                                std::tuple{"baseline", "Asynchronous-automata baseline check", &cmd_baseline}}) {
    CLI::App* s = sub(name, desc, fn);
    add_model(s);
    add_enum(s);
    add_mode(s);
    add_format(s);
    add_kind(s);
  }
  {
    CLI::App* s = sub("compose", "Parallel composition of every agent of the given CTS files", &cmd_compose);
    add_model(s);
    add_format(s);
  }
  {
    CLI::App* s = sub("render", "DOT for a model's computations or a JSON document", &cmd_render);
    add_model(s);
    add_enum(s);
    add_mode(s);
    add_kind(s);
    s->add_flag("--glued", o.glued, "Render g-LPOs instead of LPOs");
  }
  {
    CLI::App* s = sub("random-suite", "Seeded random property campaign", &cmd_random_suite);
    s->add_option("--max-events", o.max_events, "Bound on the number of events (default 5)");
    add_mode(s);
    add_format(s);
    add_kind(s);
    s->add_option("--seed", o.seed, "First seed")->capture_default_str();
    s->add_option("--count", o.count, "Number of models (default 200, async 100)");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }
  for (auto* s : app.get_subcommands())
    if (auto* opt = s->get_option_no_throw("--multicast-block-mode")) o.mode_given = opt->count() > 0;

  try {
    for (auto& [s, fn] : cmds) {
      if (!s->parsed()) continue;
      if (s->get_name() == "random-suite") {
        if (auto* opt = s->get_option_no_throw("--max-events"); opt && opt->count() == 0) o.max_events = 5;
      }
      return fn(o);
    }
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
