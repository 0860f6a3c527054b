#include "fsm/cli.hpp"

#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "CLI11.hpp"
#include "fsm/skolem.hpp"

namespace fsm {

using nlohmann::json;

namespace {

struct Opts {
  ForcingConfig cfg;
  std::size_t budget_dp = 0;
  bool verify = false;
  std::string manifest, out_path;
};

// Not certified: Unknown verdicts, budget exhaustion, failed re-verification.
struct Uncertified : std::runtime_error {
  using std::runtime_error::runtime_error;
};

template <class F>
auto parse_labeled(const std::string& label, const std::string& text, F f) -> decltype(f(text)) {
  try {
    return f(text);
  } catch (const std::exception& e) {
    throw InputError(label + ": " + e.what(), 0);
  }
}

std::vector<std::string> split_words(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> out;
  for (std::string w; in >> w;) out.push_back(w);
  return out;
}

void emit(const std::vector<std::string>& lines, const Opts& o, std::ostream& out) {
  if (o.out_path.empty()) {
    for (const auto& l : lines) out << l << "\n";
    return;
  }
  std::ofstream f(o.out_path);
  if (!f) throw InputError("--out: cannot open " + o.out_path, 0);
  for (const auto& l : lines) f << l << "\n";
  out << "wrote " << lines.size() << " records to " << o.out_path << "\n";
}

json config_record(const std::string& command, const ForcingConfig& c) {
  return {{"stage", "config"},
          {"case", command},
          {"certificate",
           {{"depth", c.depth},
            {"horizon", c.horizon},
            {"window", c.window},
            {"stages", c.stages},
            {"seed", c.seed},
            {"s0", c.s0},
            {"arg_bound", c.arg_bound}}},
          {"timing", {{"evals", 0}}}};
}

void report_verify(bool ok, const std::string& what, std::ostream& out) {
  out << "verify " << (ok ? "ok" : "FAILED") << ": " << what << "\n";
  if (!ok) throw Uncertified("re-verification failed: " + what);
}

bool verify_generic(const GenericApprox& g, const ForcingConfig& cfg) {
  auto probes = probe_pool(cfg.seed, cfg.random_probes);
  const auto& h = g.state.history;
  for (std::size_t i = 1; i < h.size(); ++i) {
    if (!extends(h[i].condition, h[i - 1].condition, probes, cfg.s0)) return false;
    if (!h[i].stem_witness.subset_of(h[i].condition.stem)) return false;
    if (eval(h[i].condition.mu, h[i].stem_witness) < h[i].stem_value) return false;
  }
  for (const auto& d : g.decisions)
    for (auto c : d.off_side_counts)
      if (c != d.off_side_counts.front()) return false;
  return true;
}

std::vector<std::string> dump(const std::vector<json>& records) {
  std::vector<std::string> out;
  for (const auto& r : records) out.push_back(r.dump());
  return out;
}

// ---------------------------------------------------------------- manifest

struct Manifest {
  std::string command = "generic";
  std::map<std::string, SExpr> labels;
  std::optional<SExpr> condition;
  std::vector<SExpr> requirements;
  std::map<std::string, Nat> budgets;
  std::string out;
};

SExpr expand(const SExpr& e, const std::map<std::string, SExpr>& labels) {
  if (e.is_symbol()) {
    auto it = labels.find(e.text);
    return it == labels.end() ? e : it->second;
  }
  SExpr c = e;
  for (auto& x : c.items) x = expand(x, labels);
  return c;
}

Manifest read_manifest(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw InputError("--manifest: cannot open " + path, 0);
  std::stringstream ss;
  ss << f.rdbuf();
  SExpr root = parse_sexpr(ss.str());
  if (root.head() != "manifest") fail_at(root, "expected (manifest …)");
  Manifest m;
  for (std::size_t i = 1; i < root.items.size(); ++i) {
    const SExpr& item = root.items[i];
    std::string_view h = item.head();
    if (h == "set" || h == "sub" || h == "name" || h == "formula") {
      expect_arity(item, 2);
      const std::string& label = expect_symbol(item.items[1]);
      if (m.labels.count(label)) fail_at(item, "label " + label + " defined twice");
      // Earlier labels only, so definitions cannot be cyclic.
      m.labels[label] = expand(item.items[2], m.labels);
    } else if (h == "command") {
      expect_arity(item, 1);
      m.command = expect_symbol(item.items[1]);
    } else if (h == "condition") {
      expect_arity(item, 3);
      m.condition = expand(item, m.labels);
    } else if (h == "require") {
      for (std::size_t j = 1; j < item.items.size(); ++j) m.requirements.push_back(expand(item.items[j], m.labels));
    } else if (h == "budgets") {
      for (std::size_t j = 1; j < item.items.size(); ++j) {
        expect_arity(item.items[j], 1);
        m.budgets[expect_symbol(item.items[j].items[0])] = expect_number(item.items[j].items[1]);
      }
    } else if (h == "out") {
      expect_arity(item, 1);
      m.out = expect_string(item.items[1]);
    } else {
      fail_at(item, "unknown manifest entry");
    }
  }
  return m;
}

Requirement read_requirement(const SExpr& e) {
  std::string_view h = e.head();
  if (h == "measure") {
    expect_arity(e, 1);
    return Requirement::measure_at_least(expect_number(e.items[1]));
  }
  if (h == "decide") {
    expect_arity(e, 1);
    return Requirement::decide_set(parse_set(e.items[1]));
  }
  if (h == "pi2") {
    expect_arity(e, 1);
    return Requirement::pi2(parse_formula(e.items[1], {"w"}));
  }
  if (h == "avoid") return Requirement::avoid_dominating(parse_ground(e, 1));
  fail_at(e, "unknown requirement");
}

// ---------------------------------------------------------------- commands

std::vector<std::string> cone_lines(const ConeReport& rep, const std::vector<Name>& fns, const ForcingConfig& cfg) {
  std::vector<json> recs;
  for (const auto& l : fusion_log(rep.state)) recs.push_back(json::parse(l));
  for (const auto& c : rep.checks) {
    bool ok = c.folded || stabilizes(fns[c.functional], c.b, c.envelope, cfg.depth);
    recs.push_back({{"stage", c.stage},
                    {"case", c.folded ? "kappa-folded" : "stabilized"},
                    {"certificate",
                     {{"functional", c.functional}, {"b", c.b.to_string()}, {"envelope", c.envelope.to_string()},
                      {"check", ok}}},
                    {"timing", {{"evals", 0}}}});
  }
  return dump(recs);
}

int run_generic(const std::string& name, const Condition& init, const std::vector<Requirement>& reqs,
                const Opts& o, std::ostream& out) {
  auto g = generic_build(init, reqs, o.cfg);
  std::vector<json> recs{config_record(name, o.cfg)};
  recs.insert(recs.end(), g.log.begin(), g.log.end());
  emit(dump(recs), o, out);
  if (g.state.aborted) throw Uncertified(g.state.abort_reason);
  if (o.verify) report_verify(verify_generic(g, o.cfg), "extension chain and decision stability", out);
  return 0;
}

// One decision per set, then stem growth to 4, 6 and 8.
std::vector<Requirement> cohesive_requirements(const std::string& sets) {
  std::vector<Requirement> reqs;
  for (const auto& e : parse_sexprs(sets)) reqs.push_back(Requirement::decide_set(parse_set(e), e.print()));
  if (reqs.empty()) throw InputError("--sets: no sets given", 0);
  for (Nat t : {4, 6, 8}) reqs.push_back(Requirement::measure_at_least(t));
  return reqs;
}

GroundFn capped_powers() {
  std::vector<std::pair<Nat, Nat>> rows;
  for (Nat n = 0; n <= 10; ++n) rows.push_back({n, Nat{1} << n});
  return GroundFn::table(rows, 0, Nat{1} << 10);
}

}  // namespace

std::vector<Name> toy_functionals() {
  std::vector<std::vector<TableEntry>> tabs(5);
  // bit 0 at x = 0
  tabs[0] = {{BitString("0"), 0, 0}, {BitString("1"), 0, 1}};
  // oracle-independent
  tabs[1] = {{BitString(""), 0, 7}, {BitString(""), 1, 7}};
  // copies the first three bits
  for (std::size_t len = 1; len <= 3; ++len)
    for (std::uint64_t m = 0; m < (1u << len); ++m) {
      std::string p;
      for (std::size_t i = 0; i < len; ++i) p += (m >> (len - 1 - i) & 1) ? '1' : '0';
      tabs[2].push_back({BitString(p), len - 1, static_cast<Nat>(p.back() == '1')});
    }
  // parity of bits 1 and 2
  for (std::uint64_t m = 0; m < 8; ++m) {
    std::string p;
    for (int i = 2; i >= 0; --i) p += (m >> i & 1) ? '1' : '0';
    tabs[3].push_back({BitString(p), 0, static_cast<Nat>((p[1] == '1') != (p[2] == '1'))});
  }
  // defined at 1 only once bit 3 is set
  for (std::uint64_t m = 0; m < 8; ++m) {
    std::string p;
    for (int i = 2; i >= 0; --i) p += (m >> i & 1) ? '1' : '0';
    tabs[4].push_back({BitString(p + "1"), 1, 1});
  }
  std::vector<Name> out;
  for (auto& t : tabs) out.push_back(turing_table(std::move(t)));
  return out;
}

std::vector<std::string> fusion_log(const FusionState& st) {
  std::vector<std::string> out;
  for (const auto& r : st.history) {
    json cert = r.certificate.is_object() ? r.certificate : json::object();
    cert["condition"] = r.condition.to_json();
    out.push_back(json{{"stage", r.stage}, {"case", r.kind}, {"certificate", cert}, {"timing", {{"evals", r.evals}}}}.dump());
  }
  if (st.aborted)
    out.push_back(json{{"stage", "abort"}, {"case", "aborted"}, {"certificate", {{"reason", st.abort_reason}}},
                       {"timing", {{"evals", 0}}}}
                      .dump());
  return out;
}

int dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Budgeted F-sigma Mathias forcing toolkit"};
  app.require_subcommand(0, 1);
  app.fallthrough();
  Opts o;
  app.add_option("--depth", o.cfg.depth, "string length for forcing searches");
  app.add_option("--horizon", o.cfg.horizon, "envelope scan horizon");
  app.add_option("--window", o.cfg.window, "finite-set window size");
  app.add_option("--stages", o.cfg.stages, "fusion / generic stages");
  app.add_option("--seed", o.cfg.seed, "probe-pool seed");
  app.add_option("--bound", o.cfg.arg_bound, "quantifier argument bound");
  app.add_option("--s0", o.cfg.s0, "condition admission threshold");
  app.add_option("--budget-dp", o.budget_dp, "element cap for subset dynamic programs");
  app.add_flag("--verify", o.verify, "re-check emitted certificates");
  app.add_option("--manifest", o.manifest, "run manifest file");
  app.add_option("--out", o.out_path, "write the log here");

  std::string mu_s, nu_s, x_s, set_s = "(nat)", trees_s, formula_s, vars_s, kind_s, stem_s = "(fin)",
                                  oracle_s, lambda_s, sets_s, which;
  Nat eval_count = 0;

  auto* eval_sub = app.add_subcommand("eval-sub", "evaluate a submeasure on a finite set");
  eval_sub->add_option("--mu", mu_s)->required();
  eval_sub->add_option("--x", x_s)->required();

  auto* mazur_cmd = app.add_subcommand("mazur", "first-hit index and Mazur value for a tree family");
  mazur_cmd->add_option("--trees", trees_s)->required();
  mazur_cmd->add_option("--x", x_s)->required();

  auto* meet_cmd = app.add_subcommand("meet-check", "optimal split of restrict(A, horizon) against the meet");
  meet_cmd->add_option("--mu", mu_s)->required();
  meet_cmd->add_option("--nu", nu_s)->required();
  meet_cmd->add_option("--set", set_s);

  auto add_formula = [&](CLI::App* c) {
    c->add_option("--formula", formula_s)->required();
    c->add_option("--vars", vars_s, "free variables, outermost first");
  };
  auto* compile_cmd = app.add_subcommand("compile", "compile a bounded formula to its zero-test name");
  add_formula(compile_cmd);
  auto* skolem_cmd = app.add_subcommand("skolemize", "Skolem template with rule trace");
  add_formula(skolem_cmd);
  auto* herbrand_cmd = app.add_subcommand("herbrandize", "Herbrand template with rule trace");
  add_formula(herbrand_cmd);
  auto* witness_cmd = app.add_subcommand("witness", "witness names for bounded, Pi01 or Sigma01 formulas");
  add_formula(witness_cmd);
  witness_cmd->add_option("--kind", kind_s, "bounded | pi1 | sigma1 (default: by shape)");
  witness_cmd->add_option("--oracle", oracle_s, "evaluate W_S(t) on this bit string");
  witness_cmd->add_option("--eval", eval_count, "number of t values to evaluate");

  auto add_condition = [&](CLI::App* c) {
    c->add_option("--stem", stem_s);
    c->add_option("--envelope", set_s);
    c->add_option("--mu", mu_s);
  };
  auto* force_cmd = app.add_subcommand("force-pi1", "Pi01 forcing search");
  add_condition(force_cmd);
  force_cmd->add_option("--formula", formula_s)->required();
  auto* decide_cmd = app.add_subcommand("decide-pi2", "decide a Pi01 family phi(w)");
  add_condition(decide_cmd);
  decide_cmd->add_option("--formula", formula_s, "family with free variable w")->required();
  auto* approx_cmd = app.add_subcommand("approx", "approximate forcing of an existential");
  add_condition(approx_cmd);
  approx_cmd->add_option("--formula", formula_s)->required();
  auto* fusion_cmd = app.add_subcommand("fusion", "fusion run with a constant per-stage submeasure");
  add_condition(fusion_cmd);
  fusion_cmd->add_option("--lambda", lambda_s);
  auto* generic_cmd = app.add_subcommand("generic", "finite-stage generic from a manifest");
  auto* demo_cmd = app.add_subcommand("demo", "cohesive | dominate | cone");
  demo_cmd->add_option("which", which)->required()->check(CLI::IsMember({"cohesive", "dominate", "cone"}));
  demo_cmd->add_option("--sets", sets_s);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }

  try {
    if (o.budget_dp) set_dp_budget({o.budget_dp, std::min<std::size_t>(o.budget_dp, 14)});
    auto get_mu = [&](const char* flag) {
      return parse_labeled(flag, mu_s.empty() ? std::string("(card)") : mu_s, [](const std::string& t) { return parse_sub(t); });
    };
    auto get_condition = [&] {
      FinSet a = parse_labeled("--stem", stem_s, [](const std::string& t) { return parse_finset(t); });
      PeriodicSet A = parse_labeled("--envelope", set_s, [](const std::string& t) { return parse_set(t); });
      Sub mu = get_mu("--mu");
      auto c = try_condition(a, A, mu, o.cfg);
      if (!c) throw Uncertified("(" + a.to_string() + ", " + A.to_string() + ", " + mu->print() +
                                ") is not certified as a condition within the horizon");
      return *c;
    };
    auto vars = split_words(vars_s);
    auto get_formula = [&](const std::vector<std::string>& ctx) {
      return parse_labeled("--formula", formula_s, [&](const std::string& t) { return parse_formula(t, ctx); });
    };

    if (*eval_sub) {
      Sub mu = get_mu("--mu");
      FinSet x = parse_labeled("--x", x_s, [](const std::string& t) { return parse_finset(t); });
      out << eval(mu, x) << "\n";
      return 0;
    }
    if (*mazur_cmd) {
      std::vector<TreeSpec> family;
      for (const auto& e : parse_labeled("--trees", trees_s, [](const std::string& t) { return parse_sexprs(t); }))
        family.push_back(parse_labeled("--trees", e.print(), [&](const std::string&) { return parse_tree(e); }));
      FinSet x = parse_labeled("--x", x_s, [](const std::string& t) { return parse_finset(t); });
      out << "theta " << mazur_theta(family, x) << "\n";
      out << "value " << mazur_eval(family, x) << "\n";
      return 0;
    }
    if (*meet_cmd) {
      Sub mu = get_mu("--mu");
      Sub nu = parse_labeled("--nu", nu_s, [](const std::string& t) { return parse_sub(t); });
      PeriodicSet A = parse_labeled("--set", set_s, [](const std::string& t) { return parse_set(t); });
      auto r = fin_generated_check(mu, nu, A, o.cfg.horizon);
      out << "domain " << r.domain.to_string() << "\n";
      out << "split " << r.left.to_string() << " " << r.right.to_string() << "\n";
      out << "value " << r.value << "\n";
      out << "meet " << r.meet_value << "\n";
      out << "agrees " << (r.agrees() ? "yes" : "no") << "\n";
      return r.agrees() ? 0 : 2;
    }
    if (*compile_cmd) {
      Fm f = get_formula(vars);
      out << compile_bounded(desugar(f), vars.size())->print() << "\n";
      return 0;
    }
    if (*skolem_cmd || *herbrand_cmd) {
      Fm f = desugar(get_formula(vars));
      Template t = *skolem_cmd ? skolemize(f) : herbrandize(f);
      for (const auto& line : t.trace) out << "; " << line << "\n";
      out << print(t.body, vars) << "\n";
      return 0;
    }
    if (*witness_cmd) {
      Fm f = desugar(get_formula(vars));
      const std::size_t k = vars.size();
      std::string kind = kind_s;
      if (kind.empty()) {
        SyntClass c = classify(f);
        kind = c == SyntClass::Bounded ? "bounded" : c == SyntClass::Pi01 ? "pi1" : "sigma1";
      }
      Name ws;
      if (kind == "bounded") {
        auto w = witness_bounded(f, k);
        ws = w.skolem;
        out << "W_S = " << w.skolem->print() << "\n";
        out << "W_H = " << w.herbrand->print() << "\n";
      } else if (kind == "pi1") {
        ws = witness_pi1(f, k);
        out << "W_S = " << ws->print() << "\n";
      } else if (kind == "sigma1") {
        ws = witness_sigma1(f, k);
        out << "W_S = " << ws->print() << "\n";
      } else {
        throw InputError("--kind: expected bounded, pi1 or sigma1", 0);
      }
      if (eval_count > 0) {
        if (k != 0) throw InputError("--eval needs a closed formula", 0);
        BitString tau = parse_labeled("--oracle", oracle_s, [](const std::string& t) { return BitString(t); });
        for (Nat t = 0; t < eval_count; ++t) {
          auto v = ws->query(tau, std::span<const Nat>(&t, 1));
          out << "W_S(" << t << ") = " << (v ? std::to_string(*v) : std::string("undefined")) << "\n";
        }
      }
      return 0;
    }
    if (*force_cmd) {
      Condition c = get_condition();
      Fm f = get_formula({});
      auto v = pi1_forces(c, f, o.cfg.depth, o.cfg.arg_bound);
      out << v.to_json().dump() << "\n";
      if (o.verify && v.refuted()) report_verify(verify_refutation(c.stem, c.envelope, f, v), "refutation", out);
      return v.kind == Verdict::Kind::Unknown ? 2 : 0;
    }
    if (*decide_cmd) {
      Condition c = get_condition();
      Fm f = get_formula({"w"});
      auto r = pi2_decide(c, f, o.cfg);
      out << r.to_json().dump() << "\n";
      if (r.kind == DecisionReport::Kind::Unknown) return 2;
      if (o.verify) report_verify(verify_decision(c, f, r, o.cfg), "decision certificate", out);
      return 0;
    }
    if (*approx_cmd) {
      Condition c = get_condition();
      Fm f = get_formula({});
      auto r = approx_forces(c, f, o.cfg);
      if (!r.found) {
        out << json{{"found", false}, {"bound", o.cfg.arg_bound}, {"window", o.cfg.window}}.dump() << "\n";
        return 2;
      }
      out << json{{"found", true}, {"y", r.y}, {"removed", r.removed.to_string()}, {"condition", r.condition.to_json()},
                  {"forced", r.forced.to_json()}}
                 .dump()
          << "\n";
      return 0;
    }
    if (*fusion_cmd) {
      Condition c = get_condition();
      std::optional<Sub> lambda;
      if (!lambda_s.empty()) lambda = parse_labeled("--lambda", lambda_s, [](const std::string& t) { return parse_sub(t); });
      auto st = fusion_run(
          c, [&](std::size_t, const Condition&) { return StagePlan{lambda, "constant", nullptr}; }, o.cfg);
      auto lines = fusion_log(st);
      lines.insert(lines.begin(), config_record("fusion", o.cfg).dump());
      emit(lines, o, out);
      if (st.aborted) throw Uncertified(st.abort_reason);
      if (o.verify) report_verify(verify_fusion(st, o.cfg), "stage relations", out);
      return 0;
    }
    if (*generic_cmd || (!o.manifest.empty() && app.get_subcommands().empty())) {
      if (o.manifest.empty()) throw InputError("generic: --manifest is required", 0);
      Manifest m = read_manifest(o.manifest);
      if (m.command != "generic") throw InputError("manifest command " + m.command + " is not supported", 0);
      for (const auto& [k, v] : m.budgets) {
        if (app.count("--" + k)) continue;  // flags given on the command line win
        if (k == "depth") o.cfg.depth = v;
        else if (k == "horizon") o.cfg.horizon = v;
        else if (k == "window") o.cfg.window = v;
        else if (k == "stages") o.cfg.stages = v;
        else if (k == "seed") o.cfg.seed = v;
        else if (k == "bound") o.cfg.arg_bound = v;
        else if (k == "s0") o.cfg.s0 = v;
        else throw InputError("manifest budget " + k + " is unknown", 0);
      }
      if (o.out_path.empty()) o.out_path = m.out;
      Condition init = make_condition(FinSet(), PeriodicSet::nat(), card(), o.cfg);
      if (m.condition) {
        const SExpr& e = *m.condition;
        auto c = try_condition(parse_finset(e.items[1]), parse_set(e.items[2]), parse_sub(e.items[3]), o.cfg);
        if (!c) throw Uncertified("manifest condition is not certified within the horizon");
        init = *c;
      }
      std::vector<Requirement> reqs;
      for (const auto& r : m.requirements) reqs.push_back(read_requirement(r));
      return run_generic("generic", init, reqs, o, out);
    }
    if (*demo_cmd) {
      // Decided envelopes thin out quickly; demos look further unless told otherwise.
      if (!app.count("--horizon")) o.cfg.horizon = 256;
      Condition init = make_condition(FinSet(), PeriodicSet::nat(), card(), o.cfg);
      if (which == "cohesive") {
        std::string sets = sets_s.empty() ? "(prog 0 2) (prog 0 3) (prog 1 4) (periodic \"\" \"00111\")" : sets_s;
        return run_generic("demo cohesive", init, parse_labeled("--sets", sets, cohesive_requirements), o, out);
      }
      if (which == "dominate") {
        // Beyond the first block the domination meet only reaches 3 within the DP window.
        if (!app.count("--s0")) o.cfg.s0 = 3;
        std::vector<Requirement> reqs{Requirement::avoid_dominating(capped_powers(), "powers of two"),
                                      Requirement::measure_at_least(3), Requirement::measure_at_least(4)};
        return run_generic("demo dominate", init, reqs, o, out);
      }
      auto fns = toy_functionals();
      auto rep = cone_run(fns, o.cfg);
      auto lines = cone_lines(rep, fns, o.cfg);
      lines.insert(lines.begin(), config_record("demo cone", o.cfg).dump());
      emit(lines, o, out);
      if (rep.state.aborted) throw Uncertified(rep.state.abort_reason);
      if (o.verify) {
        bool ok = verify_fusion(rep.state, o.cfg);
        for (const auto& c : rep.checks) ok = ok && (c.folded || stabilizes(fns[c.functional], c.b, c.envelope, o.cfg.depth));
        report_verify(ok, "stage relations and stabilization", out);
      }
      return 0;
    }
    out << app.help();
    return 0;
  } catch (const Uncertified& e) {
    err << "uncertified: " << e.what() << "\n";
    return 2;
  } catch (const BudgetExceeded& e) {
    err << "budget: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv{"fsm"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return dispatch(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace fsm
