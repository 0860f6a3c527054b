#include "fsm/forcing.hpp"

#include <algorithm>
#include <map>
#include <random>
#include <set>

#include "fsm/skolem.hpp"

namespace fsm {

using nlohmann::json;

namespace {

const char* kind_name(Verdict::Kind k) {
  switch (k) {
    case Verdict::Kind::ForcedUpTo:
      return "forced";
    case Verdict::Kind::Refuted:
      return "refuted";
    case Verdict::Kind::Unknown:
      return "unknown";
  }
  return "?";
}

Fm at(const Fm& family, Nat w) { return free_var_count(family) == 0 ? family : instantiate(family, {w}); }

PeriodicSet with_stem(const PeriodicSet& s, const FinSet& stem) { return s.unite(PeriodicSet::finite(stem)); }

// Values of μ on each probe; subsets of {0,…,9} come from one table.
std::vector<Nat> pool_values(const Sub& mu, const std::vector<FinSet>& probes) {
  const FinSet window = FinSet::range(0, 10);
  const auto table = eval_table(mu, window);
  std::vector<Nat> out;
  out.reserve(probes.size());
  for (const auto& p : probes)
    out.push_back(p.subset_of(window) ? table[window.mask_of(p)] : eval(mu, p));
  return out;
}

std::vector<FinSet> subsets_by_size(const std::vector<Nat>& elems, std::size_t max_count) {
  std::vector<FinSet> out;
  const std::size_t n = elems.size();
  for (std::size_t k = 0; k <= n && out.size() < max_count; ++k) {
    // k-subsets in lexicographic order of their element lists
    std::vector<std::size_t> idx(k);
    for (std::size_t i = 0; i < k; ++i) idx[i] = i;
    while (out.size() < max_count) {
      std::vector<Nat> pick;
      for (auto i : idx) pick.push_back(elems[i]);
      out.push_back(FinSet::from_unsorted(std::move(pick)));
      std::size_t i = k;
      while (i > 0 && idx[i - 1] == n - k + i - 1) --i;
      if (i == 0) break;
      ++idx[i - 1];
      for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
    }
  }
  return out;
}

std::vector<Nat> first_members(const PeriodicSet& A, const FinSet& skip, std::size_t count, Nat horizon) {
  std::vector<Nat> out;
  Nat n = 0;
  while (out.size() < count) {
    auto m = A.next_member(n);
    if (!m || *m >= horizon) break;
    if (!skip.contains(*m)) out.push_back(*m);
    n = *m + 1;
  }
  return out;
}

}  // namespace

// ---------------------------------------------------------------- conditions

json Condition::to_json() const {
  return {{"stem", stem.to_string()},
          {"envelope", envelope.to_string()},
          {"mu", mu ? mu->print() : std::string("null")},
          {"certificate", certificate.print()}};
}

std::optional<Condition> try_condition(FinSet a, PeriodicSet A, Sub mu, const ForcingConfig& cfg, Nat target) {
  for (Nat i : a.elements())
    if (!A.contains(i)) return std::nullopt;
  if (!A.is_infinite()) return std::nullopt;
  // The mass has to come from outside the stem.
  auto v = unbounded_check(mu, A.minus(PeriodicSet::finite(a)), std::max(cfg.s0, target), cfg.horizon);
  if (!v.witnessed()) return std::nullopt;
  return Condition{std::move(a), std::move(A), std::move(mu), std::move(v)};
}

Condition make_condition(FinSet a, PeriodicSet A, Sub mu, const ForcingConfig& cfg) {
  std::string desc = "(" + a.to_string() + ", " + A.to_string() + ", " + mu->print() + ")";
  auto c = try_condition(std::move(a), std::move(A), std::move(mu), cfg);
  if (!c) throw InvalidCondition("not a condition at threshold " + std::to_string(cfg.s0) + ": " + desc);
  return *c;
}

bool valid(const Condition& c, Nat s0) {
  for (Nat i : c.stem.elements())
    if (!c.envelope.contains(i)) return false;
  return c.envelope.is_infinite() && c.certificate.target >= s0 &&
         verify_witness(c.certificate, c.mu, c.envelope.minus(PeriodicSet::finite(c.stem)));
}

bool tree_member(const FinSet& a, const PeriodicSet& A, const BitString& tau) {
  for (Nat i : a.elements())
    if (i < tau.size() && !tau[i]) return false;
  for (std::size_t i = 0; i < tau.size(); ++i)
    if (tau[i] && !A.contains(i)) return false;
  return true;
}

std::vector<BitString> tree_enumerate(const FinSet& a, const PeriodicSet& A, std::size_t max_len) {
  std::vector<BitString> out{BitString()};
  std::size_t level_begin = 0;
  for (std::size_t len = 1; len <= max_len; ++len) {
    const std::size_t level_end = out.size();
    for (std::size_t i = level_begin; i < level_end; ++i)
      for (bool bit : {false, true}) {
        BitString t = out[i].appended(bit);
        if (tree_member(a, A, t)) out.push_back(std::move(t));
      }
    level_begin = level_end;
  }
  return out;
}

std::vector<FinSet> probe_pool(std::uint64_t seed, std::size_t random_count) {
  std::vector<FinSet> out;
  const FinSet window = FinSet::range(0, 10);
  for (std::uint64_t m = 0; m < 1024; ++m) out.push_back(window.select(m));
  std::mt19937_64 rng(seed);
  for (std::size_t i = 0; i < random_count; ++i) {
    std::vector<Nat> xs;
    const std::size_t size = 1 + rng() % 8;
    for (std::size_t j = 0; j < size; ++j) xs.push_back(rng() % 24);
    out.push_back(FinSet::from_unsorted(std::move(xs)));
  }
  return out;
}

bool extends(const Condition& c2, const Condition& c1, const std::vector<FinSet>& probes, Nat s0) {
  if (!c1.stem.subset_of(c2.stem)) return false;
  for (Nat i : c2.stem.elements())
    if (!c1.envelope.contains(i)) return false;
  if (!c2.envelope.subset_of(c1.envelope)) return false;
  if (!valid(c2, s0)) return false;
  if (c2.mu->key() == c1.mu->key()) return true;
  auto nu = pool_values(c2.mu, probes);
  auto mu = pool_values(c1.mu, probes);
  for (std::size_t i = 0; i < probes.size(); ++i)
    if (nu[i] > mu[i]) return false;
  return true;
}

bool extends_s(const Condition& c2, const Condition& c1, Nat s, const std::vector<FinSet>& probes, Nat s0,
               const FinSet* stem_witness) {
  if (!extends(c2, c1, probes, s0)) return false;
  if (stem_witness) {
    if (!stem_witness->subset_of(c2.stem) || eval(c2.mu, *stem_witness) < s) return false;
  } else if (eval(c2.mu, c2.stem) < s) {
    return false;
  }
  auto nu = pool_values(c2.mu, probes);
  auto mu = pool_values(c1.mu, probes);
  for (std::size_t i = 0; i < probes.size(); ++i)
    if (std::min(nu[i], s) != std::min(mu[i], s)) return false;
  return true;
}

// ---------------------------------------------------------------- Π⁰₁ forcing

json Verdict::to_json() const {
  json j{{"verdict", kind_name(kind)}};
  switch (kind) {
    case Kind::ForcedUpTo:
      j["depth"] = depth;
      break;
    case Kind::Refuted:
      j["tau"] = tau.str();
      j["u"] = u;
      j["value"] = value;
      break;
    case Kind::Unknown:
      j["reason"] = reason;
      break;
  }
  return j;
}

Verdict pi1_forces(const FinSet& a, const PeriodicSet& A, const Fm& phi, std::size_t depth, Nat arg_bound) {
  if (free_var_count(phi) != 0) throw std::invalid_argument("pi1_forces needs a closed formula");
  Pi1Form pf = pi1_normal_form(desugar(phi), 0);
  for (const auto& tau : tree_enumerate(a, A, depth))
    for (Nat u = 0; u < arg_bound; ++u) {
      auto v = pf.compiled->query(tau, std::span<const Nat>(&u, 1));
      if (v && *v != 0) {
        Verdict r;
        r.kind = Verdict::Kind::Refuted;
        r.tau = tau;
        r.u = u;
        r.value = *v;
        return r;
      }
    }
  Verdict r;
  r.kind = Verdict::Kind::ForcedUpTo;
  r.depth = depth;
  return r;
}

Verdict pi1_forces(const Condition& c, const Fm& phi, std::size_t depth, Nat arg_bound) {
  return pi1_forces(c.stem, c.envelope, phi, depth, arg_bound);
}

bool verify_refutation(const FinSet& a, const PeriodicSet& A, const Fm& phi, const Verdict& v) {
  if (!v.refuted() || !tree_member(a, A, v.tau)) return false;
  // Re-read the matrix on τ directly instead of through the compiled name.
  Pi1Form pf = pi1_normal_form(desugar(phi), 0);
  return classical_eval(pf.matrix, v.tau, 0, {v.u}) == Truth::False;
}

// ---------------------------------------------------------------- locality

Sub locality_submeasure(const Name& f, const FinSet& b, Nat arg_bound) {
  std::vector<TreeSpec> family;
  const std::size_t k = f->arity();
  std::vector<Nat> args(k, 0);
  while (true) {
    family.push_back(TreeSpec::noconv(f, b, args));
    std::size_t i = k;
    while (i > 0 && args[i - 1] + 1 >= arg_bound) args[--i] = 0;
    if (i == 0) break;
    ++args[i - 1];
  }
  return mazur(std::move(family));
}

LocalizeResult localize(const Condition& c, const Name& f, const ForcingConfig& cfg) {
  LocalizeResult out;
  auto stems = stem_window(c.stem, c.envelope, cfg.window, 4);
  Sub theta;
  for (const auto& b : stems) {
    Sub piece = join(locality_submeasure(f, b, cfg.arg_bound), const_sub(b.size()));
    theta = theta ? meet(theta, piece) : piece;
  }
  if (auto next = try_condition(c.stem, c.envelope, meet(c.mu, theta), cfg)) {
    out.kind = LocalizeResult::Kind::Localized;
    out.condition = *next;
    return out;
  }
  // Look for b and x̄ with F(x̄) undefined everywhere on tree(b, A) to the search depth.
  const std::size_t k = f->arity();
  for (const auto& b : stems) {
    BitString sigma = BitString::indicator(restrict(with_stem(c.envelope, b), cfg.depth), cfg.depth);
    std::vector<Nat> args(k, 0);
    while (true) {
      if (TreeSpec::noconv(f, b, args).member(sigma)) {
        if (auto next = try_condition(b, c.envelope, c.mu, cfg)) {
          out.kind = LocalizeResult::Kind::DomainKilled;
          out.condition = *next;
          out.stem = b;
          out.args = args;
          return out;
        }
      }
      std::size_t i = k;
      while (i > 0 && args[i - 1] + 1 >= cfg.arg_bound) args[--i] = 0;
      if (i == 0) break;
      ++args[i - 1];
    }
  }
  out.reason = "neither the localized measure nor a domain-killing extension was certified";
  return out;
}

// ---------------------------------------------------------------- Π⁰₂ decisions

std::vector<FinSet> stem_window(const FinSet& a, const PeriodicSet& A, std::size_t window, std::size_t max_count) {
  auto elems = first_members(A, a, window, kNatMax);
  std::vector<FinSet> out;
  for (const auto& s : subsets_by_size(elems, max_count)) out.push_back(a.unite(s));
  return out;
}

Sub lambda_submeasure(const std::vector<FinSet>& stems, const Fm& family, const PeriodicSet& envelope,
                      Nat y_window) {
  Name matrix = pi1_normal_form(desugar(family), 1).compiled;
  std::vector<TreeSpec> trees;
  for (const auto& b : stems)
    for (Nat y = 0; y < y_window; ++y) trees.push_back(TreeSpec::pi1hat(matrix, b, y, envelope));
  return mazur(std::move(trees));
}

Sub lambda_submeasure(const FinSet& a, const Fm& family, const PeriodicSet& envelope, Nat y_window) {
  return lambda_submeasure(std::vector<FinSet>{a}, family, envelope, y_window);
}

json DecisionReport::to_json() const {
  json j;
  switch (kind) {
    case Kind::Exists:
      j = {{"branch", "exists"}, {"b", b.to_string()}, {"y", y}, {"forced", forced.to_json()}};
      break;
    case Kind::ForallNot: {
      json sw = json::array();
      for (const auto& v : sweep) sw.push_back(v.to_json());
      j = {{"branch", "forall-not"}, {"rho", rho->print()}, {"sweep", sw}};
      break;
    }
    case Kind::Unknown:
      return {{"branch", "unknown"}, {"reason", reason}};
  }
  j["condition"] = condition.to_json();
  return j;
}

namespace {

// Largest PI1HAT family ρ is built from.
constexpr std::size_t kMaxRhoTrees = 12;

std::vector<PeriodicSet> envelope_candidates(const PeriodicSet& A, const FinSet& b) {
  return {A, with_stem(A.intersect(PeriodicSet::prog(0, 2)), b), with_stem(A.intersect(PeriodicSet::prog(1, 2)), b)};
}

}  // namespace

DecisionReport pi2_decide(const Condition& c, const Fm& family, const ForcingConfig& cfg) {
  DecisionReport out;
  if (free_var_count(family) > 1) throw std::invalid_argument("pi2_decide: the family may only use its index variable");
  const Nat y_window = cfg.arg_bound;
  const std::size_t max_stems = y_window == 0 ? 0 : std::max<std::size_t>(1, kMaxRhoTrees / y_window);
  auto stems = stem_window(c.stem, c.envelope, cfg.window, max_stems);
  if (stems.empty() || y_window == 0) {
    out.reason = "empty (b, y) window";
    return out;
  }
  Sub rho = lambda_submeasure(stems, family, c.envelope, y_window);
  const Nat target = std::max<Nat>(cfg.s0, stems.size() * y_window + 1);
  Sub combined = meet(c.mu, rho);
  // Only the exact DP head is searched here; past it every block costs a full ρ table.
  const auto head = first_members(c.envelope, FinSet(), std::min(dp_budget().meet, dp_budget().mazur), cfg.horizon);
  const Nat reach = head.empty() ? 0 : std::min<Nat>(cfg.horizon, head.back() + 1);
  auto v = unbounded_check(combined, c.envelope, target, reach);
  if (v.witnessed()) {
    out.rho = rho;
    for (Nat w = 0; w < cfg.arg_bound; ++w) {
      auto r = pi1_forces(c.stem, c.envelope, at(family, w), cfg.depth, cfg.arg_bound);
      out.sweep.push_back(r);
      if (!r.refuted()) {
        out.reason = "rho-meet stays large but phi(" + std::to_string(w) + ") is not refuted below the condition";
        out.sweep.clear();
        return out;
      }
    }
    out.kind = DecisionReport::Kind::ForallNot;
    out.condition = Condition{c.stem, c.envelope, combined, v};
    return out;
  }
  for (const auto& b : stems)
    for (Nat y = 0; y < y_window; ++y)
      for (const auto& B : envelope_candidates(c.envelope, b)) {
        auto r = pi1_forces(b, B, at(family, y), cfg.depth, cfg.arg_bound);
        if (!r.forced()) continue;
        auto next = try_condition(b, B, c.mu, cfg);
        if (!next) continue;
        out.kind = DecisionReport::Kind::Exists;
        out.condition = *next;
        out.b = b;
        out.y = y;
        out.forced = r;
        return out;
      }
  out.reason = "rho-meet not witnessed large and no forcing extension in the window";
  return out;
}

bool verify_decision(const Condition& c, const Fm& family, const DecisionReport& r, const ForcingConfig& cfg) {
  switch (r.kind) {
    case DecisionReport::Kind::Exists: {
      const Condition& n = r.condition;
      if (!c.stem.subset_of(n.stem) || n.stem != r.b || !n.envelope.subset_of(c.envelope)) return false;
      for (Nat i : r.b.elements())
        if (!c.envelope.contains(i)) return false;
      if (n.mu->key() != c.mu->key() || !valid(n, cfg.s0)) return false;
      return pi1_forces(n.stem, n.envelope, at(family, r.y), cfg.depth, cfg.arg_bound).forced();
    }
    case DecisionReport::Kind::ForallNot: {
      const Condition& n = r.condition;
      if (n.stem != c.stem || !(n.envelope == c.envelope)) return false;
      if (n.mu->key() != meet(c.mu, r.rho)->key() || !valid(n, cfg.s0)) return false;
      if (r.sweep.size() != cfg.arg_bound) return false;
      for (Nat w = 0; w < r.sweep.size(); ++w)
        if (!verify_refutation(c.stem, c.envelope, at(family, w), r.sweep[w])) return false;
      return true;
    }
    case DecisionReport::Kind::Unknown:
      return false;
  }
  return false;
}

ApproxResult approx_forces(const Condition& c, const Fm& phi, const ForcingConfig& cfg) {
  Fm body;
  if (phi->kind == Formula::Kind::Exists) {
    body = phi->kids[0];
  } else {
    Fm d = desugar(phi);
    if (d->kind == Formula::Kind::Not && d->kids[0]->kind == Formula::Kind::Forall &&
        d->kids[0]->kids[0]->kind == Formula::Kind::Not)
      body = d->kids[0]->kids[0]->kids[0];
    else
      body = shift(phi, 1, 0);
  }
  ApproxResult out;
  auto elems = first_members(c.envelope, c.stem, cfg.window, kNatMax);
  auto removals = subsets_by_size(elems, std::size_t{1} << elems.size());
  for (Nat y = 0; y < cfg.arg_bound; ++y) {
    Fm inst = instantiate(body, {y});
    for (const auto& removed : removals) {
      PeriodicSet B = c.envelope.minus(PeriodicSet::finite(removed));
      auto r = pi1_forces(c.stem, B, inst, cfg.depth, cfg.arg_bound);
      if (!r.forced()) continue;
      auto next = try_condition(c.stem, B, c.mu, cfg);
      if (!next) continue;
      out.found = true;
      out.y = y;
      out.removed = removed;
      out.condition = *next;
      out.forced = r;
      return out;
    }
  }
  return out;
}

// ---------------------------------------------------------------- Σ⁰₂ witness

namespace {

// Largest τ length the forcing queries inside sigma2_witness look at.
constexpr std::size_t kSigma2Depth = 10;

class Sigma2Node final : public NameNode {
 public:
  Sigma2Node(FinSet a, PeriodicSet A, Fm phi, std::size_t k) : a_(std::move(a)), A_(std::move(A)), phi_(std::move(phi)), k_(k) {}
  std::size_t arity() const override { return k_; }

  std::optional<Nat> query(const BitString& tau, std::span<const Nat> args) const override {
    const std::size_t n = std::min(tau.size(), kSigma2Depth);
    // Pairs (σ, y) by |σ| + y, then by |σ|: earlier pairs are never extensions of later ones.
    for (std::size_t sum = 0; sum <= 2 * n; ++sum)
      for (std::size_t len = 0; len <= std::min(sum, n); ++len) {
        const Nat y = sum - len;
        if (y >= n) continue;
        BitString sigma = tau.prefix(len);
        if (!tree_member(a_, A_, sigma)) break;
        std::vector<Nat> env(args.begin(), args.end());
        env.push_back(y);
        Fm inst = instantiate(phi_, env);
        FinSet stem = a_.unite(sigma.ones());
        PeriodicSet env_set = A_.minus(PeriodicSet::finite(sigma.zeros()));
        if (pi1_forces(stem, env_set, inst, n, n).forced()) return y;
      }
    return std::nullopt;
  }

  std::string print() const override {
    return "(sigma2 " + a_.to_string() + " " + A_.to_string() + " " + print_canonical(phi_, k_ + 1) + ")";
  }

 private:
  FinSet a_;
  PeriodicSet A_;
  Fm phi_;
  std::size_t k_;
};

}  // namespace

Name sigma2_witness(const FinSet& a, const PeriodicSet& A, const Fm& phi, std::size_t k) {
  if (free_var_count(phi) > k + 1) throw std::invalid_argument("sigma2_witness: formula needs more than k + 1 variables");
  return std::make_shared<Sigma2Node>(a, A, desugar(phi), k);
}

// ---------------------------------------------------------------- fusion

Sub FusionState::mu_so_far() const {
  Sub acc;
  for (const auto& r : history) acc = acc ? meet(acc, r.condition.mu) : r.condition.mu;
  return acc;
}

FinSet FusionState::a_so_far() const {
  FinSet acc;
  for (const auto& r : history) acc = acc.unite(r.condition.stem);
  return acc;
}

namespace {

// a_{s+1} = a_s ∪ w with w ⊆ A′ and ν(w) ≥ target, then re-admitted as a condition.
std::optional<StageRecord> grow_stem(std::size_t stage, const FinSet& stem, const PeriodicSet& A, const Sub& nu,
                                     const ForcingConfig& cfg, Nat target) {
  auto v = unbounded_check(nu, A, target, cfg.horizon);
  if (!v.witnessed()) return std::nullopt;
  auto c = try_condition(stem.unite(v.witness), A, nu, cfg);
  if (!c) return std::nullopt;
  StageRecord r;
  r.stage = stage + 1;
  r.stem_witness = v.witness;
  r.stem_value = eval(nu, v.witness);
  r.condition = *c;
  return r;
}

}  // namespace

FusionState fusion_run(const Condition& initial, const FusionHandler& handler, const ForcingConfig& cfg) {
  FusionState st;
  StageRecord first;
  first.kind = "initial";
  first.condition = initial;
  st.history.push_back(first);
  for (std::size_t s = 0; s < cfg.stages; ++s) {
    const Condition cur = st.current();
    const std::uint64_t before = eval_counter();
    try {
      StagePlan plan = handler(s, cur);
      std::string kind = "grow";
      json cert = json::object();
      Sub nu = cur.mu;
      PeriodicSet A = cur.envelope;
      if (plan.lambda) {
        const Nat target = std::max<Nat>(cfg.s0, s + 1);
        auto v = unbounded_check(meet(cur.mu, *plan.lambda), cur.envelope, target, cfg.horizon);
        if (v.witnessed()) {
          kind = "unbounded";
          nu = meet(cur.mu, join(*plan.lambda, const_sub(s)));
          cert["meet_witness"] = v.print();
        } else {
          kind = "bounded";
          // No shrink hook: the envelope stays as it is.
          std::optional<PeriodicSet> shrunk = plan.shrink ? plan.shrink(cur) : std::optional<PeriodicSet>(cur.envelope);
          if (!shrunk) {
            st.aborted = true;
            st.abort_reason = StageAborted(s, "bounded case without an admissible envelope (" + v.print() + ")").what();
            return st;
          }
          A = with_stem(shrunk->intersect(cur.envelope), cur.stem);
          cert["meet_check"] = v.print();
          cert["envelope"] = A.to_string();
        }
      }
      auto rec = grow_stem(s, cur.stem, A, nu, cfg, std::max<Nat>(cfg.s0, s + 1));
      if (!rec) {
        st.aborted = true;
        st.abort_reason = StageAborted(s, "no stem extension reaches the stage target").what();
        return st;
      }
      rec->kind = kind;
      cert["label"] = plan.label;
      cert["stem_witness"] = rec->stem_witness.to_string();
      cert["stem_value"] = rec->stem_value;
      rec->certificate = cert;
      rec->evals = eval_counter() - before;
      st.history.push_back(*rec);
    } catch (const std::exception& e) {
      st.aborted = true;
      st.abort_reason = StageAborted(s, e.what()).what();
      return st;
    }
  }
  return st;
}

bool verify_fusion(const FusionState& st, const ForcingConfig& cfg) {
  auto probes = probe_pool(cfg.seed, cfg.random_probes);
  for (std::size_t i = 1; i < st.history.size(); ++i) {
    const auto& prev = st.history[i - 1].condition;
    const auto& next = st.history[i];
    const Nat s = next.stage - 1;
    if (!extends_s(next.condition, prev, s, probes, cfg.s0, &next.stem_witness)) return false;
    if (eval(next.condition.mu, next.stem_witness) < s + 1) return false;
  }
  return true;
}

// ---------------------------------------------------------------- cone avoidance

bool stabilizes(const Name& functional, const FinSet& b, const PeriodicSet& c, std::size_t depth) {
  auto strings = tree_strings(b, restrict(with_stem(c, b), depth), depth);
  for (Nat x = 0; x < depth; ++x) {
    std::optional<Nat> seen;
    for (const auto& tau : strings) {
      auto v = functional->query(tau, std::span<const Nat>(&x, 1));
      if (!v) continue;
      if (seen && *seen != *v) return false;
      seen = v;
    }
  }
  return true;
}

namespace {

// Leftmost branch (ones first) of tree(b, A) ∩ STAB to the depth, continued by A's tail.
// Stem bits outside b may be dropped from C; the condition keeps them through C ∪ a.
std::optional<PeriodicSet> leftmost_envelope(const Name& functional, const FinSet& b, const Condition& cur,
                                             const ForcingConfig& cfg, std::size_t depth) {
  TreeSpec tree = TreeSpec::stab(functional, b);
  std::optional<PeriodicSet> found;
  BitString sigma;
  std::function<bool()> dfs = [&]() -> bool {
    if (sigma.size() == depth) {
      PeriodicSet c = cur.envelope.minus(PeriodicSet::finite(sigma.zeros()));
      if (!stabilizes(functional, b, c, depth)) return false;
      if (!try_condition(cur.stem, c.unite(PeriodicSet::finite(cur.stem)), cur.mu, cfg)) return false;
      found = c;
      return true;
    }
    const Nat i = sigma.size();
    std::vector<bool> options;
    if (b.contains(i)) {
      options = {true};
    } else if (cur.envelope.contains(i)) {
      options = {true, false};
    } else {
      options = {false};
    }
    for (bool bit : options) {
      sigma.push_back(bit);
      bool ok = tree.member(sigma) && dfs();
      sigma.pop_back();
      if (ok) return true;
    }
    return false;
  };
  dfs();
  return found;
}

}  // namespace

ConeReport cone_run(const std::vector<Name>& functionals, const ForcingConfig& cfg) {
  ConeReport rep;
  const std::size_t k = functionals.size();
  const std::vector<FinSet> stems = stem_window(FinSet(), PeriodicSet::nat(), cfg.window, kNatMax);
  // Schedule: stage s handles functional s mod k with the (s div k)-th stem, repeating the stem list.
  auto scheduled = [&](std::size_t s) { return std::pair{s % k, stems[(s / k) % stems.size()]}; };
  const std::size_t depth = cfg.depth;
  std::map<std::size_t, PeriodicSet> chosen;  // stage -> C picked in the bounded case
  auto handler = [&](std::size_t s, const Condition& cur) -> StagePlan {
    StagePlan plan;
    if (k == 0) {
      plan.label = "no functionals";
      return plan;
    }
    auto [e, b] = scheduled(s);
    plan.label = "e=" + std::to_string(e) + " b=" + b.to_string();
    if (!b.subset_of(cur.stem)) return plan;
    plan.lambda = mazur({TreeSpec::stab(functionals[e], b)});
    Name fn = functionals[e];
    plan.shrink = [fn, b, s, &cfg, depth, &chosen](const Condition& c) {
      auto found = leftmost_envelope(fn, b, c, cfg, depth);
      if (found) chosen.insert_or_assign(s, *found);
      return found;
    };
    return plan;
  };
  Condition initial = make_condition(FinSet(), PeriodicSet::nat(), card(), cfg);
  rep.state = fusion_run(initial, handler, cfg);
  for (std::size_t i = 1; i < rep.state.history.size(); ++i) {
    const auto& r = rep.state.history[i];
    if (r.kind != "unbounded" && r.kind != "bounded") continue;
    auto [e, b] = scheduled(r.stage - 1);
    ConeCheck chk;
    chk.stage = r.stage;
    chk.functional = e;
    chk.b = b;
    chk.folded = r.kind == "unbounded";
    auto it = chosen.find(r.stage - 1);
    chk.envelope = it != chosen.end() ? it->second : r.condition.envelope;
    rep.checks.push_back(chk);
  }
  return rep;
}

// ---------------------------------------------------------------- generic construction

Requirement Requirement::measure_at_least(Nat s) {
  Requirement r;
  r.kind = Kind::MeasureAtLeast;
  r.target = s;
  r.label = "measure>=" + std::to_string(s);
  return r;
}

Requirement Requirement::decide_set(PeriodicSet set, std::string label) {
  Requirement r;
  r.kind = Kind::DecideSet;
  r.label = label.empty() ? set.to_string() : std::move(label);
  r.set = std::move(set);
  return r;
}

Requirement Requirement::pi2(Fm family, std::string label) {
  Requirement r;
  r.kind = Kind::Pi2;
  r.label = label.empty() ? print_canonical(family, 1) : std::move(label);
  r.family = std::move(family);
  return r;
}

Requirement Requirement::avoid_dominating(GroundFn f, std::string label) {
  Requirement r;
  r.kind = Kind::AvoidDominating;
  r.label = label.empty() ? "dom " + f.print_body() : std::move(label);
  r.growth = std::move(f);
  return r;
}

namespace {

std::size_t off_side(const SetDecision& d, const FinSet& stem, Nat horizon) {
  std::size_t n = 0;
  for (Nat x : stem.elements())
    if (x < horizon && d.set.contains(x) != d.inside) ++n;
  return n;
}

}  // namespace

GenericApprox generic_build(const Condition& initial, const std::vector<Requirement>& reqs, const ForcingConfig& cfg) {
  GenericApprox g;
  StageRecord first;
  first.kind = "initial";
  first.condition = initial;
  g.state.history.push_back(first);
  g.log.push_back({{"stage", 0}, {"case", "initial"}, {"certificate", initial.to_json()}, {"timing", {{"evals", 0}}}});
  std::map<std::string, std::size_t> decision_index;
  std::set<std::string> folded;

  for (std::size_t s = 0; s < cfg.stages && !reqs.empty(); ++s) {
    const Condition cur = g.state.current();
    const Requirement& req = reqs[s % reqs.size()];
    const std::uint64_t before = eval_counter();
    json cert = json::object();
    cert["requirement"] = req.label;
    std::string kind;
    Condition next = cur;
    Nat at_least = 0;
    try {
      switch (req.kind) {
        case Requirement::Kind::MeasureAtLeast:
          kind = "measure";
          at_least = req.target;
          break;
        case Requirement::Kind::DecideSet: {
          // The side with more envelope points below the horizon goes first; ties go inside.
          PeriodicSet inside = with_stem(cur.envelope.intersect(req.set), cur.stem);
          PeriodicSet outside = with_stem(cur.envelope.minus(req.set), cur.stem);
          bool prefer_in = restrict(inside, cfg.horizon).size() >= restrict(outside, cfg.horizon).size();
          bool is_in = prefer_in;
          auto side = try_condition(cur.stem, prefer_in ? inside : outside, cur.mu, cfg);
          if (!side) {
            is_in = !prefer_in;
            side = try_condition(cur.stem, prefer_in ? outside : inside, cur.mu, cfg);
          }
          if (!side) throw StageAborted(s, "neither side of " + req.label + " keeps the measure large");
          std::optional<Condition> in;
          if (is_in) in = side;
          next = *side;
          kind = in ? "decide-inside" : "decide-outside";
          cert["side_witness"] = side->certificate.print();
          auto it = decision_index.find(req.label);
          if (it == decision_index.end()) {
            decision_index[req.label] = g.decisions.size();
            g.decisions.push_back({req.label, req.set, in.has_value(), s + 1, {}});
          } else if (g.decisions[it->second].inside != in.has_value()) {
            throw StageAborted(s, "decision for " + req.label + " flipped");
          }
          break;
        }
        case Requirement::Kind::Pi2: {
          auto r = pi2_decide(cur, req.family, cfg);
          if (r.kind == DecisionReport::Kind::Unknown) throw StageAborted(s, "pi2 undecided: " + r.reason);
          kind = r.kind == DecisionReport::Kind::Exists ? "pi2-exists" : "pi2-forall-not";
          cert["decision"] = r.to_json();
          next = r.condition;
          break;
        }
        case Requirement::Kind::AvoidDominating: {
          if (!folded.insert(req.label).second) {
            kind = "avoid-dominating-kept";
            break;
          }
          auto c = try_condition(cur.stem, cur.envelope, meet(cur.mu, dom(req.growth)), cfg);
          if (!c) throw StageAborted(s, "meet with " + req.label + " is not large on the envelope");
          next = *c;
          kind = "avoid-dominating";
          json lag = json::array();
          for (std::size_t i = 0; i < next.stem.size(); ++i)
            lag.push_back({i, next.stem[i], req.growth(static_cast<Nat>(i))});
          cert["enumeration"] = lag;
          break;
        }
      }
      std::optional<StageRecord> rec;
      if (req.kind == Requirement::Kind::MeasureAtLeast) {
        rec = grow_stem(s, next.stem, next.envelope, next.mu, cfg, at_least);
        if (!rec) throw StageAborted(s, "no stem extension reaches measure " + std::to_string(at_least));
      } else {
        rec = StageRecord{s + 1, "", next, FinSet(), 0, json::object(), 0};
      }
      rec->kind = kind;
      cert["stem_witness"] = rec->stem_witness.to_string();
      cert["stem_value"] = rec->stem_value;
      cert["stem"] = rec->condition.stem.to_string();
      rec->certificate = cert;
      rec->evals = eval_counter() - before;
      g.state.history.push_back(*rec);
      for (auto& d : g.decisions) d.off_side_counts.push_back(off_side(d, rec->condition.stem, cfg.horizon));
      g.log.push_back({{"stage", s + 1}, {"case", kind}, {"certificate", cert}, {"timing", {{"evals", rec->evals}}}});
    } catch (const std::exception& e) {
      g.state.aborted = true;
      g.state.abort_reason = e.what();
      g.log.push_back({{"stage", s + 1}, {"case", "aborted"}, {"certificate", {{"reason", e.what()}}},
                       {"timing", {{"evals", eval_counter() - before}}}});
      return g;
    }
  }
  json decisions = json::array();
  for (const auto& d : g.decisions)
    decisions.push_back({{"set", d.label}, {"inside", d.inside}, {"stage", d.stage}, {"off_side", d.off_side_counts}});
  g.log.push_back({{"stage", "final"},
                   {"case", "summary"},
                   {"certificate", {{"condition", g.state.current().to_json()}, {"decisions", decisions}}},
                   {"timing", {{"evals", 0}}}});
  return g;
}

}  // namespace fsm
