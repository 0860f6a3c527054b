#include "fsm/submeasure.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <limits>
#include <map>
#include <mutex>
#include <shared_mutex>
#include <unordered_map>

namespace fsm {

namespace {

std::atomic<std::size_t> g_meet_budget{16};
std::atomic<std::size_t> g_mazur_budget{14};
std::atomic<std::uint64_t> g_evals{0};

// Largest set for which a full subset table is ever materialized.
constexpr std::size_t kTableCap = 24;

struct CacheKey {
  std::size_t id;
  FinSet x;
  bool operator==(const CacheKey&) const = default;
};

struct CacheKeyHash {
  std::size_t operator()(const CacheKey& k) const { return k.x.hash() * 31 + k.id; }
};

class ValueCache {
 public:
  std::optional<Nat> find(const CacheKey& k) const {
    std::shared_lock lock(mu_);
    auto it = map_.find(k);
    if (it == map_.end()) return std::nullopt;
    return it->second;
  }
  void put(const CacheKey& k, Nat v) {
    std::unique_lock lock(mu_);
    map_.emplace(k, v);
  }

 private:
  mutable std::shared_mutex mu_;
  std::unordered_map<CacheKey, Nat, CacheKeyHash> map_;
};

ValueCache& value_cache() {
  static ValueCache c;
  return c;
}

ValueCache& theta_cache() {
  static ValueCache c;
  return c;
}

std::size_t intern(const std::string& key) {
  static std::mutex mu;
  static std::unordered_map<std::string, std::size_t> ids;
  std::lock_guard lock(mu);
  auto [it, fresh] = ids.emplace(key, ids.size());
  return it->second;
}

std::string family_key(const std::vector<TreeSpec>& family) {
  std::string s;
  for (const auto& t : family) s += " " + t.print();
  return s;
}

std::size_t family_id(const std::vector<TreeSpec>& family) {
  return intern("family:" + family_key(family));
}

// Whole θ tables are kept only for windows where recomputing them is expensive.
constexpr std::size_t kThetaTableMin = 10;
constexpr std::size_t kThetaTableSlots = 256;

std::unordered_map<CacheKey, std::vector<Nat>, CacheKeyHash>& theta_tables() {
  static std::unordered_map<CacheKey, std::vector<Nat>, CacheKeyHash> t;
  return t;
}

std::shared_mutex& theta_tables_mu() {
  static std::shared_mutex mu;
  return mu;
}

BitString chi_of(const FinSet& p) { return BitString::indicator(p, p.empty() ? 0 : p.max() + 1); }

}  // namespace

DpBudget dp_budget() { return {g_meet_budget.load(), g_mazur_budget.load()}; }

void set_dp_budget(DpBudget b) {
  g_meet_budget = b.meet;
  g_mazur_budget = b.mazur;
}

std::uint64_t eval_counter() { return g_evals.load(); }

// ------------------------------------------------------------ trees

std::vector<BitString> tree_strings(const FinSet& stem, const FinSet& c, std::size_t n) {
  std::vector<std::size_t> free;
  BitString base = BitString::zeros_of(n);
  const FinSet stem_part = stem.below(n), c_part = c.below(n);
  for (Nat i : stem_part.elements()) {
    if (!c.contains(i)) return {};
    base.set(i, true);
  }
  for (Nat i : c_part.elements())
    if (!stem.contains(i)) free.push_back(i);
  std::vector<BitString> out;
  out.reserve(std::size_t{1} << free.size());
  for (std::uint64_t m = 0; m < (std::uint64_t{1} << free.size()); ++m) {
    BitString t = base;
    for (std::size_t j = 0; j < free.size(); ++j)
      if (m >> j & 1) t.set(free[j], true);
    out.push_back(std::move(t));
  }
  return out;
}

TreeSpec TreeSpec::subsets(PeriodicSet s) {
  TreeSpec t;
  t.kind = Kind::Subsets;
  t.set = std::move(s);
  return t;
}

TreeSpec TreeSpec::cylinder(std::size_t depth, std::vector<BitString> allowed) {
  for (const auto& a : allowed)
    if (a.size() != depth) throw std::invalid_argument("cylinder strings must have length " + std::to_string(depth));
  std::sort(allowed.begin(), allowed.end());
  allowed.erase(std::unique(allowed.begin(), allowed.end()), allowed.end());
  TreeSpec t;
  t.kind = Kind::Cylinder;
  t.depth = depth;
  t.allowed = std::move(allowed);
  return t;
}

TreeSpec TreeSpec::domenum(GroundFn f) {
  if (f.arity() != 1) throw std::invalid_argument("domenum needs a unary growth function");
  TreeSpec t;
  t.kind = Kind::DomEnum;
  t.growth = std::move(f);
  return t;
}

TreeSpec TreeSpec::stab(Name functional, FinSet stem) {
  if (functional->arity() != 1) throw std::invalid_argument("stab needs a unary functional");
  TreeSpec t;
  t.kind = Kind::Stab;
  t.name = std::move(functional);
  t.stem = std::move(stem);
  return t;
}

TreeSpec TreeSpec::pi1hat(Name matrix, FinSet stem, Nat y, PeriodicSet envelope) {
  if (matrix->arity() != 2) throw std::invalid_argument("pi1hat needs a matrix name of arity 2 (y, u)");
  TreeSpec t;
  t.kind = Kind::Pi1Hat;
  t.name = std::move(matrix);
  t.stem = std::move(stem);
  t.y = y;
  t.set = std::move(envelope);
  return t;
}

TreeSpec TreeSpec::noconv(Name f, FinSet stem, std::vector<Nat> args) {
  if (f->arity() != args.size()) throw std::invalid_argument("noconv: argument count differs from the name's arity");
  TreeSpec t;
  t.kind = Kind::NoConv;
  t.name = std::move(f);
  t.stem = std::move(stem);
  t.args = std::move(args);
  return t;
}

bool TreeSpec::member(const BitString& sigma) const {
  const std::size_t n = sigma.size();
  const FinSet ones = sigma.ones();
  switch (kind) {
    case Kind::Subsets:
      for (Nat i : ones.elements())
        if (!set.contains(i)) return false;
      return true;
    case Kind::Cylinder:
      for (const auto& a : allowed) {
        if (n <= depth ? sigma.is_prefix_of(a) : a.is_prefix_of(sigma)) return true;
      }
      return false;
    case Kind::DomEnum: {
      Nat k = 0;
      for (Nat p : ones.elements())
        if (p < growth(k++)) return false;
      return true;
    }
    case Kind::Stab: {
      if (const auto* rows = name->table_entries()) {
        // A row is reachable when some τ of length n in the tree extends its pattern.
        const FinSet c = ones.unite(stem);
        std::vector<const TableEntry*> live;
        for (const auto& e : *rows) {
          if (e.x >= n || e.pattern.size() > n) continue;
          bool ok = true;
          for (std::size_t i = 0; ok && i < e.pattern.size(); ++i)
            ok = e.pattern[i] ? c.contains(i) : !stem.contains(i);
          if (!ok) continue;
          for (const auto* o : live)
            if (o->x == e.x && o->y != e.y) return false;
          live.push_back(&e);
        }
        return true;
      }
      auto strings = tree_strings(stem, ones.unite(stem), n);
      for (Nat x = 0; x < n; ++x) {
        std::optional<Nat> seen;
        for (const auto& tau : strings) {
          auto v = name->query(tau, std::span<const Nat>(&x, 1));
          if (!v) continue;
          if (seen && *seen != *v) return false;
          seen = v;
        }
      }
      return true;
    }
    case Kind::Pi1Hat: {
      for (Nat i : ones.elements())
        if (!set.contains(i)) return false;
      Nat buf[2] = {y, 0};
      for (const auto& tau : tree_strings(stem, ones.unite(stem), n))
        for (Nat u = 0; u < n; ++u) {
          buf[1] = u;
          auto v = name->query(tau, buf);
          if (v && *v != 0) return false;
        }
      return true;
    }
    case Kind::NoConv:
      for (const auto& tau : tree_strings(stem, ones.unite(stem), n))
        if (name->query(tau, args)) return false;
      return true;
  }
  return false;
}

bool TreeSpec::covers(const FinSet& p) const {
  if (p.empty()) return member(BitString());
  const std::size_t len = p.max() + 1;
  switch (kind) {
    case Kind::Subsets:
      for (Nat i : p.elements())
        if (!set.contains(i)) return false;
      return true;
    case Kind::Cylinder:
      for (const auto& a : allowed) {
        bool ok = true;
        for (Nat i : p.elements())
          if (i < depth && !a[i]) ok = false;
        if (ok) return true;
      }
      (void)len;
      return false;
    default:
      // The remaining trees only lose members when ones are added, so χ_p is the best candidate.
      return member(chi_of(p));
  }
}

std::vector<char> TreeSpec::cover_table(const FinSet& x, std::unordered_map<std::string, bool>* memo) const {
  const std::size_t n = x.size();
  const std::uint64_t full = std::uint64_t{1} << n;
  std::vector<char> out(full, 0);
  out[0] = member(BitString());
  if (kind != Kind::Pi1Hat && kind != Kind::NoConv) {
    for (std::uint64_t s = 1; s < full; ++s) out[s] = covers(x.select(s));
    return out;
  }
  // Both trees reject σ exactly when some string below it is bad, so mark the bad
  // strings once per length and close upwards over subsets.
  const auto& xs = x.elements();
  std::uint64_t allowed = full - 1;
  if (kind == Kind::Pi1Hat)
    for (std::size_t j = 0; j < n; ++j)
      if (!set.contains(xs[j])) allowed &= ~(std::uint64_t{1} << j);
  const std::string tag = std::to_string(reinterpret_cast<std::uintptr_t>(name.get())) + "/" +
                          (kind == Kind::NoConv ? "n" : "p" + std::to_string(y)) + "/";
  auto bad_direct = [&](const BitString& tau) {
    if (kind == Kind::NoConv) return name->query(tau, args).has_value();
    Nat buf[2] = {y, 0};
    for (Nat u = 0; u < tau.size(); ++u) {
      buf[1] = u;
      auto v = name->query(tau, buf);
      if (v && *v != 0) return true;
    }
    return false;
  };
  auto bad = [&](const BitString& tau) {
    if (!memo || kind == Kind::NoConv) return bad_direct(tau);
    auto [it, fresh] = memo->try_emplace(tag + tau.str(), false);
    if (fresh) it->second = bad_direct(tau);
    return it->second;
  };
  std::vector<char> marks;
  for (std::size_t t = 0; t < n; ++t) {
    const std::size_t len = xs[t] + 1;
    const std::uint64_t span = std::uint64_t{1} << (t + 1);
    BitString base = BitString::zeros_of(len);
    const FinSet stem_part = stem.below(len);
    for (Nat i : stem_part.elements()) base.set(i, true);
    marks.assign(span, 0);
    for (std::uint64_t q = 0; q < span; ++q) {
      if (q & ~allowed) continue;
      BitString tau = base;
      for (std::size_t j = 0; j <= t; ++j)
        if (q >> j & 1) tau.set(xs[j], true);
      marks[q] = bad(tau);
    }
    for (std::size_t j = 0; j <= t; ++j)
      for (std::uint64_t q = 0; q < span; ++q)
        if (q >> j & 1) marks[q] |= marks[q ^ (std::uint64_t{1} << j)];
    for (std::uint64_t q = span >> 1; q < span; ++q) out[q] = !(q & ~allowed) && !marks[q];
  }
  return out;
}

std::string TreeSpec::print() const {
  switch (kind) {
    case Kind::Subsets:
      return "(subsets " + set.to_string() + ")";
    case Kind::Cylinder: {
      std::string s = "(cylinder " + std::to_string(depth);
      for (const auto& a : allowed) s += " \"" + a.str() + "\"";
      return s + ")";
    }
    case Kind::DomEnum:
      return "(domenum " + growth.print_body() + ")";
    case Kind::Stab:
      return "(stab " + name->print() + " " + stem.to_string() + ")";
    case Kind::Pi1Hat:
      return "(pi1hat " + name->print() + " " + stem.to_string() + " " + std::to_string(y) + " " +
             set.to_string() + ")";
    case Kind::NoConv: {
      std::string s = "(noconv " + name->print() + " " + stem.to_string() + " (args";
      for (Nat a : args) s += " " + std::to_string(a);
      return s + "))";
    }
  }
  return {};
}

// ------------------------------------------------------------ expressions

Sub make_sub(SubNode::Kind kind, Nat n, std::vector<Sub> kids, std::vector<TreeSpec> family, GroundFn growth) {
  auto node = std::make_shared<SubNode>();
  node->kind_ = kind;
  node->n_ = n;
  node->kids_ = std::move(kids);
  node->family_ = std::move(family);
  node->growth_ = std::move(growth);
  std::string& k = node->key_;
  switch (kind) {
    case SubNode::Kind::Card:
      k = "(card)";
      break;
    case SubNode::Kind::Const:
      k = "(const " + std::to_string(n) + ")";
      break;
    case SubNode::Kind::Join:
      k = "(join " + node->kids_[0]->key() + " " + node->kids_[1]->key() + ")";
      break;
    case SubNode::Kind::Meet:
      k = "(meet " + node->kids_[0]->key() + " " + node->kids_[1]->key() + ")";
      break;
    case SubNode::Kind::Mazur:
      k = "(mazur" + family_key(node->family_) + ")";
      break;
    case SubNode::Kind::IMeet:
      k = "(imeet " + std::to_string(n);
      for (const auto& s : node->kids_) k += " " + s->key();
      k += ")";
      break;
    case SubNode::Kind::Dom:
      k = "(dom " + node->growth_.print_body() + ")";
      break;
  }
  node->id_ = intern(k);
  if (!node->family_.empty() || kind == SubNode::Kind::Mazur) node->family_id_ = family_id(node->family_);
  return node;
}

Sub card() { return make_sub(SubNode::Kind::Card, 0, {}, {}, {}); }
Sub const_sub(Nat n) { return make_sub(SubNode::Kind::Const, n, {}, {}, {}); }
Sub join(Sub a, Sub b) { return make_sub(SubNode::Kind::Join, 0, {std::move(a), std::move(b)}, {}, {}); }
Sub meet(Sub a, Sub b) { return make_sub(SubNode::Kind::Meet, 0, {std::move(a), std::move(b)}, {}, {}); }
Sub mazur(std::vector<TreeSpec> family) { return make_sub(SubNode::Kind::Mazur, 0, {}, std::move(family), {}); }

Sub imeet(std::size_t depth, std::vector<Sub> subs) {
  if (depth == 0 || subs.empty()) throw std::invalid_argument("imeet needs a positive depth and at least one submeasure");
  return make_sub(SubNode::Kind::IMeet, depth, std::move(subs), {}, {});
}

Sub dom(GroundFn f) {
  TreeSpec t = TreeSpec::domenum(f);
  return make_sub(SubNode::Kind::Dom, 0, {}, {std::move(t)}, std::move(f));
}

bool uses_dp(const Sub& mu) {
  switch (mu->kind()) {
    case SubNode::Kind::Card:
    case SubNode::Kind::Const:
      return false;
    case SubNode::Kind::Join:
      return uses_dp(mu->kids()[0]) || uses_dp(mu->kids()[1]);
    default:
      return true;
  }
}

// ------------------------------------------------------------ evaluation

class SubEval {
 public:
  static Nat scalar(const SubNode& m, const FinSet& x) {
    switch (m.kind_) {
      case SubNode::Kind::Card:
        return x.size();
      case SubNode::Kind::Const:
        return x.empty() ? 0 : m.n_;
      case SubNode::Kind::Join:
        return std::max(scalar(*m.kids_[0], x), scalar(*m.kids_[1], x));
      default:
        break;
    }
    if (x.empty()) return 0;
    CacheKey key{m.id_, x};
    if (auto v = value_cache().find(key)) return *v;
    Nat v = table(m, x).back();
    value_cache().put(key, v);
    return v;
  }

  static std::vector<Nat> table(const SubNode& m, const FinSet& x) {
    const std::size_t n = x.size();
    if (n > kTableCap) throw BudgetExceeded("subset table", n, kTableCap);
    const std::uint64_t full = std::uint64_t{1} << n;
    std::vector<Nat> r(full, 0);
    switch (m.kind_) {
      case SubNode::Kind::Card:
        for (std::uint64_t s = 0; s < full; ++s) r[s] = std::popcount(s);
        return r;
      case SubNode::Kind::Const:
        for (std::uint64_t s = 1; s < full; ++s) r[s] = m.n_;
        return r;
      case SubNode::Kind::Join: {
        auto a = table(*m.kids_[0], x);
        auto b = table(*m.kids_[1], x);
        for (std::uint64_t s = 0; s < full; ++s) r[s] = std::max(a[s], b[s]);
        return r;
      }
      case SubNode::Kind::Meet: {
        check(n, g_meet_budget, "meet");
        return meet_tables(table(*m.kids_[0], x), table(*m.kids_[1], x));
      }
      case SubNode::Kind::IMeet: {
        check(n, g_meet_budget, "imeet");
        std::size_t len = std::min<std::size_t>(m.n_, m.kids_.size());
        std::vector<Nat> chain = table(*m.kids_[0], x);
        for (std::size_t j = 1; j < len; ++j) {
          auto t = table(*m.kids_[j], x);
          for (std::uint64_t s = 1; s < full; ++s) t[s] = std::max<Nat>(t[s], j);
          chain = meet_tables(chain, t);
        }
        return chain;
      }
      case SubNode::Kind::Mazur:
      case SubNode::Kind::Dom: {
        check(n, g_mazur_budget, "mazur");
        const std::vector<Nat> theta = theta_table(m.family_, m.family_id_, x);
        for (std::uint64_t s = 1; s < full; ++s) {
          std::uint64_t low = s & (~s + 1);
          std::uint64_t rest = s ^ low;
          Nat best = kNatMax;
          for (std::uint64_t sub = rest;; sub = (sub - 1) & rest) {
            std::uint64_t block = sub | low;
            best = std::min(best, sat_add(theta[block], r[s ^ block]));
            if (sub == 0) break;
          }
          r[s] = best;
        }
        return r;
      }
    }
    return r;
  }

  static std::vector<Nat> theta_table(const std::vector<TreeSpec>& family, std::size_t fid, const FinSet& x) {
    CacheKey key{fid, x};
    {
      std::shared_lock lock(theta_tables_mu());
      auto it = theta_tables().find(key);
      if (it != theta_tables().end()) return it->second;
    }
    const std::uint64_t full = std::uint64_t{1} << x.size();
    std::vector<Nat> theta(full, 0);
    for (std::uint64_t s = 1; s < full; ++s) theta[s] = x[std::bit_width(s) - 1] + 1;
    std::unordered_map<std::string, bool> memo;
    for (std::size_t j = 0; j < family.size(); ++j) {
      auto cov = family[j].cover_table(x, &memo);
      for (std::uint64_t s = 1; s < full; ++s)
        if (cov[s] && j + 1 < theta[s]) theta[s] = j + 1;
    }
    if (x.size() >= kThetaTableMin) {
      std::unique_lock lock(theta_tables_mu());
      if (theta_tables().size() < kThetaTableSlots) theta_tables().emplace(key, theta);
    }
    return theta;
  }

  static Nat theta_cached(const std::vector<TreeSpec>& family, std::size_t fid, const FinSet& p) {
    if (p.empty()) return 0;
    CacheKey key{fid, p};
    if (auto v = theta_cache().find(key)) return *v;
    Nat v = theta_direct(family, p);
    theta_cache().put(key, v);
    return v;
  }

  static Nat theta_direct(const std::vector<TreeSpec>& family, const FinSet& p) {
    if (p.empty()) return 0;
    const Nat lim = p.max() + 1;
    for (std::size_t j = 0; j < family.size() && j + 1 < lim; ++j)
      if (family[j].covers(p)) return j + 1;
    return lim;
  }

 private:
  static void check(std::size_t n, const std::atomic<std::size_t>& budget, const char* what) {
    if (n > budget.load()) throw BudgetExceeded(what, n, budget.load());
  }

  static std::vector<Nat> meet_tables(const std::vector<Nat>& a, const std::vector<Nat>& b) {
    std::vector<Nat> r(a.size(), 0);
    for (std::uint64_t s = 1; s < a.size(); ++s) {
      Nat best = kNatMax;
      for (std::uint64_t sub = s;; sub = (sub - 1) & s) {
        best = std::min(best, sat_add(a[sub], b[s ^ sub]));
        if (sub == 0) break;
      }
      r[s] = best;
    }
    return r;
  }
};

Nat eval(const Sub& mu, const FinSet& x) {
  ++g_evals;
  return SubEval::scalar(*mu, x);
}

std::vector<Nat> eval_table(const Sub& mu, const FinSet& x) {
  ++g_evals;
  return SubEval::table(*mu, x);
}

Nat mazur_theta(const std::vector<TreeSpec>& family, const FinSet& x) {
  return SubEval::theta_cached(family, family_id(family), x);
}

Nat mazur_eval(const std::vector<TreeSpec>& family, const FinSet& x) { return eval(mazur(family), x); }

// ------------------------------------------------------------ unboundedness

std::string UnboundedVerdict::print() const {
  switch (kind) {
    case Kind::Witnessed:
      return "(witnessed " + std::to_string(target) + " " + witness.to_string() + ")";
    case Kind::BoundedSoFar:
      return "(bounded-so-far " + std::to_string(horizon) + " " + std::to_string(value) + ")";
    case Kind::Unknown:
      return "(unknown " + std::to_string(budget) + ")";
  }
  return {};
}

namespace {

std::size_t dp_limit(const Sub& mu) {
  switch (mu->kind()) {
    case SubNode::Kind::Card:
    case SubNode::Kind::Const:
      return std::numeric_limits<std::size_t>::max();
    case SubNode::Kind::Join:
      return std::min(dp_limit(mu->kids()[0]), dp_limit(mu->kids()[1]));
    case SubNode::Kind::Meet:
      return std::min({g_meet_budget.load(), dp_limit(mu->kids()[0]), dp_limit(mu->kids()[1])});
    case SubNode::Kind::IMeet: {
      std::size_t l = g_meet_budget.load();
      for (const auto& k : mu->kids()) l = std::min(l, dp_limit(k));
      return l;
    }
    case SubNode::Kind::Mazur:
    case SubNode::Kind::Dom:
      return g_mazur_budget.load();
  }
  return 0;
}

UnboundedVerdict witnessed(Nat s, FinSet b) {
  UnboundedVerdict v;
  v.kind = UnboundedVerdict::Kind::Witnessed;
  v.target = s;
  v.witness = std::move(b);
  return v;
}

}  // namespace

UnboundedVerdict unbounded_check(const Sub& mu, const PeriodicSet& a, Nat target, Nat horizon) {
  FinSet elems = restrict(a, horizon);
  const std::size_t n = elems.size();
  const std::size_t limit = std::min(dp_limit(mu), kTableCap);
  auto prefix = [&](std::size_t k) {
    return k >= 64 ? FinSet::from_unsorted(std::vector<Nat>(elems.elements().begin(), elems.elements().begin() + k))
                   : elems.select((std::uint64_t{1} << k) - 1);
  };

  if (!uses_dp(mu)) {
    Nat v = 0;
    for (std::size_t k = 0; k <= n; ++k) {
      v = eval(mu, prefix(k));
      if (v >= target) return witnessed(target, prefix(k));
    }
    UnboundedVerdict r;
    r.kind = UnboundedVerdict::Kind::BoundedSoFar;
    r.horizon = horizon;
    r.value = v;
    return r;
  }

  const std::size_t head = std::min(n, limit);
  FinSet first = prefix(head);
  auto t = eval_table(mu, first);
  for (std::size_t k = 0; k <= head; ++k)
    if (t[(std::uint64_t{1} << k) - 1] >= target) return witnessed(target, prefix(k));
  if (n <= limit) {
    UnboundedVerdict r;
    r.kind = UnboundedVerdict::Kind::BoundedSoFar;
    r.horizon = horizon;
    r.value = t.back();
    return r;
  }

  // Past the budget: any block's value is a lower bound for every superset.
  const auto& xs = elems.elements();
  std::vector<FinSet> blocks;
  for (std::size_t i = limit; i < n; i += limit)
    blocks.push_back(FinSet::from_unsorted(
        std::vector<Nat>(xs.begin() + i, xs.begin() + std::min(n, i + limit))));
  const std::size_t stride = (n + limit - 1) / limit;
  for (std::size_t r0 = 0; r0 < stride; ++r0) {
    std::vector<Nat> pick;
    for (std::size_t i = r0; i < n && pick.size() < limit; i += stride) pick.push_back(xs[i]);
    blocks.push_back(FinSet::from_unsorted(std::move(pick)));
  }
  for (const auto& b : blocks)
    if (eval(mu, b) >= target) return witnessed(target, b);
  UnboundedVerdict r;
  r.kind = UnboundedVerdict::Kind::Unknown;
  r.budget = limit;
  return r;
}

bool verify_witness(const UnboundedVerdict& v, const Sub& mu, const PeriodicSet& a) {
  if (!v.witnessed()) return false;
  for (Nat i : v.witness.elements())
    if (!a.contains(i)) return false;
  return eval(mu, v.witness) >= v.target;
}

SplitReport fin_generated_check(const Sub& mu, const Sub& nu, const PeriodicSet& a, Nat horizon) {
  SplitReport r;
  r.domain = restrict(a, horizon);
  auto tm = eval_table(mu, r.domain);
  auto tn = eval_table(nu, r.domain);
  const std::uint64_t full = tm.size() - 1;
  Nat best = kNatMax;
  std::uint64_t arg = 0;
  for (std::uint64_t s = 0; s <= full; ++s) {
    Nat v = sat_add(tm[s], tn[full ^ s]);
    if (v < best) {
      best = v;
      arg = s;
    }
  }
  r.value = best;
  r.left = r.domain.select(arg);
  r.right = r.domain.select(full ^ arg);
  r.meet_value = eval(meet(mu, nu), r.domain);
  return r;
}

// ------------------------------------------------------------ parsing

TreeSpec parse_tree(const SExpr& e) {
  std::string_view h = e.head();
  try {
    if (h == "subsets") {
      expect_arity(e, 1);
      return TreeSpec::subsets(parse_set(e.items[1]));
    }
    if (h == "cylinder") {
      if (e.items.size() < 2) fail_at(e, "cylinder needs a depth");
      std::size_t d = expect_number(e.items[1]);
      std::vector<BitString> allowed;
      for (std::size_t i = 2; i < e.items.size(); ++i) {
        const std::string& s = expect_string(e.items[i]);
        if (s.find_first_not_of("01") != std::string::npos) fail_at(e.items[i], "expected a bit string");
        allowed.emplace_back(s);
      }
      return TreeSpec::cylinder(d, std::move(allowed));
    }
    if (h == "domenum") return TreeSpec::domenum(parse_ground(e, 1));
    if (h == "stab") {
      expect_arity(e, 2);
      return TreeSpec::stab(parse_name(e.items[1]), parse_finset(e.items[2]));
    }
    if (h == "pi1hat") {
      expect_arity(e, 4);
      return TreeSpec::pi1hat(parse_name(e.items[1]), parse_finset(e.items[2]), expect_number(e.items[3]),
                              parse_set(e.items[4]));
    }
    if (h == "noconv") {
      expect_arity(e, 3);
      const SExpr& a = e.items[3];
      if (!a.is_list()) fail_at(a, "expected (args …)");
      std::vector<Nat> args;
      for (std::size_t i = a.head() == "args" ? 1 : 0; i < a.items.size(); ++i)
        args.push_back(expect_number(a.items[i]));
      return TreeSpec::noconv(parse_name(e.items[1]), parse_finset(e.items[2]), std::move(args));
    }
  } catch (const InputError&) {
    throw;
  } catch (const std::invalid_argument& ex) {
    fail_at(e, ex.what());
  }
  fail_at(e, "unknown tree form");
}

Sub parse_sub(const SExpr& e) {
  std::string_view h = e.head();
  if (h == "card") {
    expect_arity(e, 0);
    return card();
  }
  if (h == "const") {
    expect_arity(e, 1);
    return const_sub(expect_number(e.items[1]));
  }
  if (h == "join" || h == "meet") {
    expect_arity(e, 2);
    Sub a = parse_sub(e.items[1]);
    Sub b = parse_sub(e.items[2]);
    return h == "join" ? join(a, b) : meet(a, b);
  }
  if (h == "mazur") {
    std::vector<TreeSpec> fam;
    for (std::size_t i = 1; i < e.items.size(); ++i) fam.push_back(parse_tree(e.items[i]));
    return mazur(std::move(fam));
  }
  if (h == "imeet") {
    if (e.items.size() < 3) fail_at(e, "imeet needs a depth and at least one submeasure");
    std::size_t d = expect_number(e.items[1]);
    if (d == 0) fail_at(e, "imeet depth must be positive");
    std::vector<Sub> subs;
    for (std::size_t i = 2; i < e.items.size(); ++i) subs.push_back(parse_sub(e.items[i]));
    return imeet(d, std::move(subs));
  }
  if (h == "dom") {
    GroundFn f = parse_ground(e, 1);
    if (f.arity() != 1) fail_at(e, "dom needs a unary growth function");
    return dom(std::move(f));
  }
  fail_at(e, "unknown submeasure form");
}

Sub parse_sub(std::string_view text) { return parse_sub(parse_sexpr(text)); }

}  // namespace fsm
