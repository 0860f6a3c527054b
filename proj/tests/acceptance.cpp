// Acceptance runner: `acceptance N` checks one criterion, no argument checks all twelve.
// Prints one PASS/FAIL line per criterion and exits nonzero on any failure.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "fsm/cli.hpp"
#include "fsm/forcing.hpp"
#include "fsm/skolem.hpp"
#include "support/corpus.hpp"
#include "support/oracles.hpp"

using namespace fsm;

namespace {

struct Outcome {
  bool ok = true;
  std::string detail;
};

struct Tally {
  std::size_t cases = 0;
  std::size_t failures = 0;
  std::string first_failure;

  void check(bool ok, const std::string& what) {
    ++cases;
    if (ok) return;
    if (failures++ == 0) first_failure = what;
  }
  Outcome outcome(const std::string& label) const {
    std::ostringstream s;
    s << cases << " " << label << ", " << failures << " failures";
    if (failures) s << "; first: " << first_failure;
    return {failures == 0, s.str()};
  }
};

// ------------------------------------------------------------ 1: axioms

Outcome axioms() {
  auto pool = corpus::submeasure_pool(101, 48);
  std::mt19937_64 rng(7);
  Tally t;
  for (std::size_t i = 0; i < 10000; ++i) {
    const Sub& mu = pool[i % pool.size()];
    FinSet x = corpus::random_finset(rng, 24, 5);
    FinSet y = corpus::random_finset(rng, 24, 5);
    FinSet u = x.unite(y);
    Nat ex = eval(mu, x), ey = eval(mu, y), eu = eval(mu, u);
    std::string tag = mu->print() + " on " + x.to_string() + ", " + y.to_string();
    t.check(eval(mu, FinSet()) == 0, "empty set " + tag);
    t.check(ex <= eu && ey <= eu, "monotone " + tag);
    t.check(eu <= ex + ey, "subadditive " + tag);
  }
  return t.outcome("axiom checks");
}

// ------------------------------------------------------------ 2: lattice laws

Outcome lattice() {
  auto pool = corpus::submeasure_pool(202, 60);
  std::mt19937_64 rng(11);
  Tally t;
  for (std::size_t i = 0; i < 50; ++i) {
    const Sub& a = pool[rng() % pool.size()];
    const Sub& b = pool[rng() % pool.size()];
    const Sub& c = pool[rng() % pool.size()];
    FinSet window = i % 2 ? FinSet::range(0, 10) : corpus::random_finset(rng, 24, 24);
    while (window.size() < 10) window = window.with(rng() % 24);
    if (window.size() > 10) window = FinSet::from_unsorted({window.elements().begin(), window.elements().begin() + 10});
    auto ta = eval_table(a, window), tb = eval_table(b, window);
    auto ab = eval_table(meet(a, b), window), ba = eval_table(meet(b, a), window);
    auto jab = eval_table(join(a, b), window), jba = eval_table(join(b, a), window);
    auto left = eval_table(meet(meet(a, b), c), window), right = eval_table(meet(a, meet(b, c)), window);
    auto aa = eval_table(meet(a, a), window);
    std::string tag = a->print() + " / " + b->print();
    bool comm = ab == ba && jab == jba, assoc = left == right, idem = aa == ta, below = true;
    for (std::size_t m = 0; m < ab.size(); ++m) below = below && ab[m] <= ta[m] && ab[m] <= tb[m];
    t.check(comm, "commutativity " + tag);
    t.check(assoc, "associativity " + tag + " / " + c->print());
    t.check(idem, "idempotence " + a->print());
    t.check(below, "meet below arguments " + tag);
  }
  return t.outcome("law checks over 1024 subsets each");
}

// ------------------------------------------------------------ 3: DP against enumeration

Outcome dp_vs_brute() {
  auto pool = corpus::submeasure_pool(303, 40);
  std::mt19937_64 rng(13);
  Tally meets, mazurs;
  for (std::size_t i = 0; i < 200; ++i) {
    const Sub& a = pool[rng() % pool.size()];
    const Sub& b = pool[rng() % pool.size()];
    FinSet x = corpus::random_finset(rng, 16, 10);
    Nat want = oracle::split_min([&](const FinSet& s) { return eval(a, s); },
                                 [&](const FinSet& s) { return eval(b, s); }, x);
    meets.check(eval(meet(a, b), x) == want, "meet " + a->print() + " " + b->print() + " at " + x.to_string());
  }
  for (std::size_t i = 0; i < 100; ++i) {
    auto fam = corpus::tree_family(33, i);
    FinSet x = corpus::random_finset(rng, 12, 8);
    Nat want = oracle::partition_min([&](const FinSet& s) { return oracle::first_level(fam, s); }, x);
    mazurs.check(mazur_eval(fam, x) == want && eval(mazur(fam), x) == want,
                 mazur(fam)->print() + " at " + x.to_string());
  }
  Outcome m = meets.outcome("meet cases"), z = mazurs.outcome("mazur cases");
  return {m.ok && z.ok, m.detail + "; " + z.detail};
}

// ------------------------------------------------------------ 4: Mazur value vs. levels

Outcome mazur_levels() {
  Tally t;
  const FinSet window = FinSet::range(0, 10);
  for (std::size_t f = 0; f < 10; ++f) {
    auto fam = corpus::tree_family(44, f);
    // Levels of every subset of the window, straight from the definition.
    std::map<FinSet, Nat> level;
    for (std::uint64_t m = 0; m < 1024; ++m) {
      FinSet b = window.select(m);
      level[b] = oracle::first_level(fam, b);
    }
    for (std::uint64_t m = 0; m < 1024; ++m) {
      FinSet x = window.select(m);
      if (x.size() > 8) continue;
      Nat value = mazur_eval(fam, x);
      std::string tag = mazur(fam)->print() + " at " + x.to_string();
      t.check(value <= level[x], "below first level " + tag);
      bool split = x.empty();
      for (const auto& p : oracle::partitions(x)) {
        if (p.size() > value) continue;
        bool ok = true;
        for (const auto& b : p) ok = ok && level[b] <= value;
        if (ok) {
          split = true;
          break;
        }
      }
      t.check(split, "splits into low blocks " + tag);
    }
  }
  return t.outcome("level checks over 10 families");
}

// ------------------------------------------------------------ 5: compiler soundness

Outcome compiler() {
  corpus::Generator gen(505, {});
  const auto oracles = oracle::strings_up_to(8);
  Tally t;
  std::size_t compared = 0, formulas = 0;
  while (formulas < 500) {
    const std::size_t k = formulas % 2;
    Fm phi = gen.formula(k);
    ++formulas;
    Name tphi = compile_bounded(phi, k);
    std::vector<std::vector<Nat>> envs;
    if (k == 0) envs = {{}};
    else
      for (Nat v = 0; v < 4; ++v) envs.push_back({v});
    for (const auto& tau : oracles)
      for (const auto& env : envs) {
        auto tv = tphi->query(tau, env);
        auto truth = oracle::strict_truth(phi, tau, 0, env);
        if (!tv || !truth) continue;
        ++compared;
        t.check((*tv == 0) == *truth, print(phi) + " on " + tau.str());
      }
  }
  auto o = t.outcome("defined evaluations");
  o.detail = std::to_string(formulas) + " formulas, " + o.detail;
  return o;
}

// ------------------------------------------------------------ 6: Skolem / Herbrand

Outcome skolem_herbrand() {
  corpus::Options opt;
  opt.total_only = true;
  opt.unbounded = true;
  opt.max_depth = 3;
  corpus::Generator gen(606, opt);
  std::mt19937_64 rng(66);
  const auto all8 = oracle::strings_of_length(8);
  Tally t;
  std::size_t truths = 0;
  for (std::size_t i = 0; i < 200; ++i) {
    Fm theta = gen.formula(0);
    Template s = skolemize(theta), h = herbrandize(theta);
    for (int o = 0; o < 6; ++o) {
      const BitString& tau = all8[rng() % all8.size()];
      auto truth = oracle::strict_truth(theta, tau, 4);
      std::string tag = print(theta) + " on " + tau.str();
      if (!truth) {
        t.check(false, "undefined on a total corpus: " + tag);
        continue;
      }
      auto sw = oracle::some_witness(s, tau, 4, 4);
      t.check(!sw.exhausted && sw.holds == *truth, "skolem " + tag);
      if (*truth) {
        ++truths;
        auto hw = oracle::every_witness(h, tau, 4, 4);
        t.check(!hw.exhausted && hw.holds, "herbrand " + tag);
      }
    }
  }
  auto o = t.outcome("checks");
  o.detail = "200 formulas, " + std::to_string(truths) + " true instances, " + o.detail;
  return o;
}

// ------------------------------------------------------------ 7: witness adequacy

Outcome witness_adequacy() {
  corpus::Generator gen(707, {});
  std::mt19937_64 rng(77);
  Tally t;
  std::size_t forced = 0;
  for (std::size_t i = 0; i < 300; ++i) {
    const bool pi1 = i % 2 == 1;
    Fm theta = pi1 ? gen.pi1() : gen.formula(0);
    auto c = corpus::small_condition(rng);
    auto v = pi1_forces(c.stem, c.envelope, theta, 8, 4);
    if (!v.forced()) continue;
    ++forced;
    Name w = pi1 ? witness_pi1(theta, 0) : witness_bounded(theta, 0).skolem;
    Fm inst = instantiate(skolemize(theta), w);
    auto v2 = pi1_forces(c.stem, c.envelope, inst, 8, 4);
    t.check(v2.forced(), print(theta) + " under " + c.stem.to_string() + " " + c.envelope.to_string());
  }
  auto o = t.outcome("forced cases");
  o.detail = "300 formulas, " + o.detail;
  return forced == 0 ? Outcome{false, "no forced cases in the corpus"} : o;
}

// ------------------------------------------------------------ 8: pi1_forces completeness

Outcome pi1_completeness() {
  corpus::Generator gen(808, {});
  std::mt19937_64 rng(88);
  const auto strings = oracle::strings_up_to(8);
  Tally t;
  std::size_t refuted = 0;
  for (std::size_t i = 0; i < 200; ++i) {
    Fm phi = gen.pi1();
    const Fm& body = phi->kids[0];
    auto c = corpus::small_condition(rng);
    auto v = pi1_forces(c.stem, c.envelope, phi, 8, 4);
    // The matrix at bound u is ∀w ≤ u ψ(w): defined when every instance is, false when one fails.
    bool violation = false;
    for (const auto& tau : strings) {
      if (violation) break;
      if (!oracle::in_tree(c.stem, c.envelope, tau)) continue;
      std::vector<std::optional<bool>> inst;
      for (Nat w = 0; w < 4; ++w) inst.push_back(oracle::strict_truth(body, tau, 0, {w}));
      bool defined = true, all_true = true;
      for (Nat u = 0; u < 4 && !violation; ++u) {
        defined = defined && inst[u].has_value();
        if (!defined) break;
        all_true = all_true && *inst[u];
        violation = !all_true;
      }
    }
    refuted += v.refuted();
    std::string tag = print(phi) + " under " + c.stem.to_string() + " " + c.envelope.to_string();
    t.check(v.refuted() == violation, tag);
    if (v.refuted())
      t.check(oracle::in_tree(c.stem, c.envelope, v.tau) && verify_refutation(c.stem, c.envelope, phi, v),
              "certificate " + tag);
  }
  auto o = t.outcome("checks");
  o.detail = "200 cases (" + std::to_string(refuted) + " refuted), " + o.detail;
  return o;
}

// ------------------------------------------------------------ 9: Π⁰₂ decisions

Outcome pi2_branches() {
  ForcingConfig cfg;
  cfg.depth = 6;
  Condition c = make_condition(FinSet(), PeriodicSet::nat(), card(), cfg);
  const auto probes = probe_pool(cfg.seed, cfg.random_probes);
  Tally t;
  std::map<std::string, std::size_t> kinds;
  for (const auto& fam : corpus::pi2_families()) {
    auto r = pi2_decide(c, fam.formula, cfg);
    auto again = pi2_decide(c, fam.formula, cfg);
    const std::string tag = fam.text;
    t.check(r.kind == again.kind && r.to_json() == again.to_json(), "deterministic " + tag);
    switch (r.kind) {
      case DecisionReport::Kind::Exists: {
        ++kinds["exists"];
        t.check(verify_decision(c, fam.formula, r, cfg), "verify " + tag);
        t.check(extends(r.condition, c, probes, cfg.s0), "extension " + tag);
        t.check(pi1_forces(r.condition, instantiate(fam.formula, {r.y}), cfg.depth, cfg.arg_bound).forced(),
                "forcing " + tag);
        t.check(r.sweep.empty(), "single branch " + tag);
        // The other branch needs the ρ-meet witnessed large; it is not.
        auto stems = stem_window(c.stem, c.envelope, cfg.window, std::max<std::size_t>(1, 12 / cfg.arg_bound));
        Sub rho = lambda_submeasure(stems, fam.formula, c.envelope, cfg.arg_bound);
        Nat target = std::max<Nat>(cfg.s0, stems.size() * cfg.arg_bound + 1);
        // Searched over the exact DP head, the window pi2_decide commits to.
        const std::size_t head = std::min(dp_budget().meet, dp_budget().mazur);
        Nat reach = 0;
        for (std::size_t k = 0; k < head; ++k) reach = *c.envelope.next_member(reach) + 1;
        reach = std::min<Nat>(reach, cfg.horizon);
        t.check(!unbounded_check(meet(c.mu, rho), c.envelope, target, reach).witnessed(), "exclusive " + tag);
        break;
      }
      case DecisionReport::Kind::ForallNot: {
        ++kinds["forall-not"];
        t.check(verify_decision(c, fam.formula, r, cfg), "verify " + tag);
        t.check(valid(r.condition, cfg.s0) && verify_witness(r.condition.certificate, r.condition.mu, c.envelope),
                "meet witness " + tag);
        t.check(!r.forced.forced(), "single branch " + tag);
        // No instance can be forced below a condition that refutes it.
        for (Nat w = 0; w < cfg.arg_bound; ++w) {
          auto inst = instantiate(fam.formula, {w});
          t.check(verify_refutation(c.stem, c.envelope, inst, r.sweep.at(w)), "sweep " + tag);
          t.check(!pi1_forces(c, inst, cfg.depth, cfg.arg_bound).forced(), "exclusive " + tag);
        }
        break;
      }
      case DecisionReport::Kind::Unknown:
        ++kinds["unknown"];
        t.check(!verify_decision(c, fam.formula, r, cfg), "unknown verifies " + tag);
        break;
    }
  }
  auto o = t.outcome("checks");
  o.detail = "50 families (exists " + std::to_string(kinds["exists"]) + ", forall-not " +
             std::to_string(kinds["forall-not"]) + ", unknown " + std::to_string(kinds["unknown"]) + "), " + o.detail;
  return o;
}

// ------------------------------------------------------------ 10: cone

Outcome cone() {
  ForcingConfig cfg;
  cfg.depth = 6;
  cfg.stages = 12;
  auto fns = toy_functionals();
  auto rep = cone_run(fns, cfg);
  Tally t;
  t.check(!rep.state.aborted, "aborted: " + rep.state.abort_reason);
  t.check(rep.state.history.size() == 13, "stage count " + std::to_string(rep.state.history.size()));
  t.check(verify_fusion(rep.state, cfg), "verify_fusion");
  const auto probes = probe_pool(cfg.seed, cfg.random_probes);
  const auto& h = rep.state.history;
  for (std::size_t i = 1; i < h.size(); ++i) {
    const Condition& prev = h[i - 1].condition;
    const Condition& next = h[i].condition;
    const Nat s = i - 1;
    std::string tag = "stage " + std::to_string(i);
    t.check(prev.stem.subset_of(next.stem) && next.envelope.subset_of(prev.envelope), "sets " + tag);
    t.check(h[i].stem_witness.subset_of(next.stem) && eval(next.mu, h[i].stem_witness) >= s + 1, "growth " + tag);
    bool agree = true;
    for (const auto& x : probes) agree = agree && std::min(eval(next.mu, x), s) == std::min(eval(prev.mu, x), s);
    t.check(agree, "truncated agreement " + tag);
  }
  for (const auto& chk : rep.checks)
    t.check(chk.folded || oracle::stabilizes_by_enumeration(fns[chk.functional], chk.b, chk.envelope, 6),
            "stabilization at stage " + std::to_string(chk.stage));
  t.check(!rep.checks.empty(), "no (e, b) pair was processed");
  auto o = t.outcome("checks");
  o.detail = std::to_string(rep.checks.size()) + " (e, b) pairs, " + o.detail;
  return o;
}

// ------------------------------------------------------------ 11: cohesiveness

Outcome cohesive() {
  ForcingConfig cfg;
  cfg.horizon = 256;
  const char* sets[] = {"(prog 0 2)", "(prog 0 3)", "(prog 1 4)", "(periodic \"\" \"00111\")"};
  std::vector<Requirement> reqs;
  for (const char* s : sets) reqs.push_back(Requirement::decide_set(parse_set(s), s));
  for (Nat target : {4, 6, 8}) reqs.push_back(Requirement::measure_at_least(target));
  Condition init = make_condition(FinSet(), PeriodicSet::nat(), card(), cfg);
  auto g = generic_build(init, reqs, cfg);
  Tally t;
  t.check(!g.state.aborted, "aborted: " + g.state.abort_reason);
  t.check(g.decisions.size() == 4, "decisions " + std::to_string(g.decisions.size()));
  const auto& h = g.state.history;
  const Condition& last = g.state.current();
  for (const auto& d : g.decisions) {
    // Containment or disjointness of the final envelope, pointwise below 64.
    bool holds = true;
    for (Nat n = 0; n < 64; ++n)
      if (last.envelope.contains(n) && !last.stem.contains(n)) holds = holds && d.set.contains(n) == d.inside;
    t.check(holds, "envelope side " + d.label);
    // Off-side stem elements over the final four stages, recounted from the history.
    std::vector<std::size_t> counts;
    for (std::size_t i = h.size() - 4; i < h.size(); ++i) {
      std::size_t n = 0;
      for (Nat x : h[i].condition.stem.elements()) n += d.set.contains(x) != d.inside;
      counts.push_back(n);
    }
    bool stable = std::all_of(counts.begin(), counts.end(), [&](std::size_t n) { return n == counts.front(); });
    t.check(stable && d.stage + 4 <= h.size() - 1, "stability " + d.label);
    t.check(d.off_side_counts.size() >= 4 &&
                std::equal(d.off_side_counts.end() - 4, d.off_side_counts.end(), counts.begin()),
            "logged counts " + d.label);
  }
  return t.outcome("checks");
}

// ------------------------------------------------------------ 12: determinism

Outcome determinism() {
  Tally t;
  const std::vector<std::vector<std::string>> runs = {
      {"demo", "cohesive"}, {"demo", "dominate"}, {"demo", "cone", "--depth", "6"}};
  std::size_t bytes = 0;
  for (const auto& args : runs) {
    std::ostringstream o1, e1, o2, e2;
    int c1 = dispatch(args, o1, e1);
    int c2 = dispatch(args, o2, e2);
    std::string tag = args[0] + " " + args[1];
    t.check(c1 == 0 && c2 == 0, "exit codes " + tag);
    t.check(!o1.str().empty() && o1.str() == o2.str(), "log bytes " + tag);
    bytes += o1.str().size();
  }
  auto o = t.outcome("comparisons");
  o.detail = std::to_string(bytes) + " log bytes, " + o.detail;
  return o;
}

struct Criterion {
  const char* name;
  double limit_seconds;  // 0: none
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> all = {
      {"submeasure axioms", 10, axioms},
      {"lattice laws", 20, lattice},
      {"DP against enumeration", 30, dp_vs_brute},
      {"Mazur levels", 30, mazur_levels},
      {"compiler soundness", 60, compiler},
      {"Skolem/Herbrand finite models", 120, skolem_herbrand},
      {"witness-name adequacy", 60, witness_adequacy},
      {"pi1_forces completeness", 30, pi1_completeness},
      {"pi2_decide branch soundness", 60, pi2_branches},
      {"cone fusion", 60, cone},
      {"cohesiveness demo", 30, cohesive},
      {"determinism", 0, determinism},
  };
  std::vector<std::size_t> pick;
  if (argc > 1) {
    int n = std::atoi(argv[1]);
    if (n < 1 || n > static_cast<int>(all.size())) {
      std::cerr << "usage: acceptance [1-" << all.size() << "]\n";
      return 64;
    }
    pick.push_back(n - 1);
  } else {
    for (std::size_t i = 0; i < all.size(); ++i) pick.push_back(i);
  }
  bool ok = true;
  for (std::size_t i : pick) {
    const auto& c = all[i];
    auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& ex) {
      o = {false, std::string("exception: ") + ex.what()};
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    bool in_time = c.limit_seconds == 0 || secs < c.limit_seconds;
    bool pass = o.ok && in_time;
    char timing[64];
    if (c.limit_seconds > 0)
      std::snprintf(timing, sizeof timing, "%.2fs of %.0fs", secs, c.limit_seconds);
    else
      std::snprintf(timing, sizeof timing, "%.2fs", secs);
    std::cout << "criterion " << i + 1 << " " << (pass ? "PASS" : "FAIL") << " [" << c.name << "] " << o.detail
              << " (" << timing << ")\n";
    ok = ok && pass;
  }
  return ok ? 0 : 1;
}
