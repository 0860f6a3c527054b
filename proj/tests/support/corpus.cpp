#include "support/corpus.hpp"

#include <algorithm>

namespace fsm::corpus {

namespace {

Name term1(Term body) { return canonical_term({"x"}, std::move(body)); }
Name term2(Term body) { return canonical_term({"x", "y"}, std::move(body)); }

Name small_table() {
  return turing_table({{BitString("1"), 0, 1},
                       {BitString("0"), 0, 0},
                       {BitString("01"), 1, 2},
                       {BitString("00"), 1, 0},
                       {BitString("1"), 1, 3}});
}

}  // namespace

Generator::Generator(std::uint64_t seed, Options opt) : rng_(seed), opt_(opt) {
  for (Nat c = 0; c < 4; ++c) nullary_.push_back(constant_name(0, c));
  unary_ = {term1(Term::var(0)),
            term1(Term::add(Term::var(0), Term::constant(1))),
            term1(Term::mul(Term::var(0), Term::constant(2))),
            term1(Term::sub(Term::var(0), Term::constant(1))),
            constant_name(1, 1),
            generic_chi()};
  if (!opt_.total_only) {
    unary_.push_back(generic_enum());
    unary_.push_back(small_table());
  }
  binary_ = {term2(Term::add(Term::var(0), Term::var(1))), term2(Term::sub(Term::var(0), Term::var(1))),
             projection(2, 0), projection(2, 1)};
}

std::size_t Generator::below(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_); }

Name Generator::pick(std::size_t arity) {
  const auto& pool = arity == 0 ? nullary_ : arity == 1 ? unary_ : binary_;
  return pool[below(pool.size())];
}

Arg Generator::arg(std::size_t scope, bool allow_app) {
  std::size_t roll = below(allow_app ? 4 : 3);
  if (roll < 2 && scope > 0) return Arg::var(below(scope));
  if (roll < 3) return Arg::lit(below(4));
  std::size_t arity = 1 + below(2);
  std::vector<Arg> xs;
  for (std::size_t i = 0; i < arity; ++i) xs.push_back(arg(scope, false));
  return Arg::app(pick(arity), std::move(xs));
}

Fm Generator::gen_atom(std::size_t scope) {
  auto side = [&]() {
    std::size_t arity = below(3);
    std::vector<Arg> xs;
    for (std::size_t i = 0; i < arity; ++i) xs.push_back(arg(scope, true));
    return Arg::app(pick(arity), std::move(xs));
  };
  Arg l = side();
  Arg r = side();
  return atom(std::move(l), std::move(r));
}

Arg Generator::bound(std::size_t scope) {
  switch (below(3)) {
    case 0:
      return Arg::app(nullary_[below(nullary_.size())], {});
    case 1:
      if (scope > 0) return Arg::app(unary_[0], {Arg::var(below(scope))});
      return Arg::app(nullary_[below(nullary_.size())], {});
    default:
      return Arg::app(generic_chi(), {scope > 0 ? Arg::var(below(scope)) : Arg::lit(below(4))});
  }
}

Fm Generator::gen(std::size_t scope, std::size_t depth) {
  if (depth >= opt_.max_depth || below(4) == 0) return gen_atom(scope);
  std::size_t kinds = opt_.unbounded ? 5 : 3;
  switch (below(kinds)) {
    case 0:
      return f_not(gen(scope, depth + 1));
    case 1: {
      Fm a = gen(scope, depth + 1);
      Fm b = gen(scope, depth + 1);
      return f_and(a, b);
    }
    case 2: {
      Arg b = bound(scope);
      return ball("w", std::move(b), gen(scope + 1, depth + 1));
    }
    case 3:
      return forall("u", gen(scope + 1, depth + 1));
    default:
      return f_not(forall("e", f_not(gen(scope + 1, depth + 1))));
  }
}

Fm Generator::formula(std::size_t free) { return gen(free, 0); }

Fm Generator::pi1() {
  Options saved = opt_;
  opt_.unbounded = false;
  Fm body = gen(1, 1);
  opt_ = saved;
  return forall("w", body);
}

SmallCondition small_condition(std::mt19937_64& rng) {
  auto bit = [&]() { return std::uniform_int_distribution<int>(0, 1)(rng) == 1; };
  BitString prefix, period;
  std::size_t plen = std::uniform_int_distribution<std::size_t>(0, 3)(rng);
  std::size_t qlen = std::uniform_int_distribution<std::size_t>(1, 4)(rng);
  for (std::size_t i = 0; i < plen; ++i) prefix.push_back(bit());
  for (std::size_t i = 0; i < qlen; ++i) period.push_back(bit());
  if (period.count_ones() == 0) period.set(qlen - 1, true);
  PeriodicSet env(prefix, period);
  std::vector<Nat> stem;
  Nat n = 0;
  for (std::size_t k = 0; k < 6; ++k) {
    n = *env.next_member(n);
    if (std::uniform_int_distribution<int>(0, 2)(rng) == 0) stem.push_back(n);
    ++n;
  }
  return {FinSet::from_unsorted(stem), env};
}

std::vector<Family> pi2_families() {
  static const char* bases[] = {
      "(atom (chi) ((@ (canon (x) (+ x C)) w)) (canon 1) ())",
      "(atom (canon (x) x) (w) (canon C) ())",
      "(ball u (canon (x) (+ x C)) (w) (atom (chi) (u) (canon 1) ()))",
      "(forall u (not (and (atom (chi) (u) (canon 1) ()) (atom (canon (x) x) (u) (canon (x) (+ x C)) (w)))))",
      "(and (atom (chi) (w) (canon 1) ()) (atom (chi) ((@ (canon (x) (+ x C)) w)) (canon 0) ()))",
      "(not (atom (canon C) () (canon C) ()))",
      "(forall u (atom (canon (x) (* x C)) (u) (canon (x) (* x C)) (u)))",
      "(ball u (canon (x) (+ x C)) (w) (not (atom (chi) (u) (canon 1) ())))",
      "(forall u (implies (atom (chi) (u) (canon 1) ()) (atom (canon (x y) (- x (+ y C))) (u w) (canon 0) ())))",
      "(atom (enum) (C) (canon (x) x) (w))",
  };
  std::vector<Family> out;
  for (const char* b : bases)
    for (int c = 0; c < 5; ++c) {
      std::string text = b;
      for (std::size_t p; (p = text.find('C')) != std::string::npos;) text.replace(p, 1, std::to_string(c));
      out.push_back({text, desugar(parse_formula(text, {"w"}))});
    }
  return out;
}

FinSet random_finset(std::mt19937_64& rng, Nat universe, std::size_t max_size) {
  std::vector<Nat> all(universe);
  for (Nat i = 0; i < universe; ++i) all[i] = i;
  std::shuffle(all.begin(), all.end(), rng);
  std::size_t k = std::uniform_int_distribution<std::size_t>(0, std::min<std::size_t>(max_size, universe))(rng);
  all.resize(k);
  return FinSet::from_unsorted(all);
}

namespace {

PeriodicSet random_periodic(std::mt19937_64& rng) {
  auto bit = [&]() { return std::uniform_int_distribution<int>(0, 1)(rng) == 1; };
  BitString prefix, period;
  for (std::size_t i = 0, n = rng() % 4; i < n; ++i) prefix.push_back(bit());
  for (std::size_t i = 0, n = 1 + rng() % 4; i < n; ++i) period.push_back(bit());
  return PeriodicSet(prefix, period);
}

GroundFn random_growth(std::mt19937_64& rng) {
  std::vector<std::pair<Nat, Nat>> rows;
  Nat v = rng() % 2;
  for (Nat k = 0; k < 3; ++k) {
    rows.push_back({k, v});
    v += 1 + rng() % 3;
  }
  return GroundFn::table(rows, 1 + rng() % 3, rng() % 4);
}

TreeSpec random_tree(std::mt19937_64& rng) {
  switch (rng() % 6) {
    case 0:
      return TreeSpec::subsets(random_periodic(rng));
    case 1: {
      std::vector<BitString> allowed;
      for (std::uint64_t m = 0; m < 8; ++m)
        if (rng() % 2) {
          BitString s;
          for (int i = 0; i < 3; ++i) s.push_back((m >> i) & 1);
          allowed.push_back(s);
        }
      if (allowed.empty()) allowed.push_back(BitString("000"));
      return TreeSpec::cylinder(3, allowed);
    }
    case 2:
      return TreeSpec::domenum(random_growth(rng));
    case 3: {
      Name f = rng() % 2 ? small_table() : superpose(generic_chi(), {constant_name(1, rng() % 3)});
      return TreeSpec::stab(f, random_finset(rng, 4, 1));
    }
    case 4: {
      Name m = rng() % 2 ? superpose(generic_chi(), {projection(2, 1)})
                         : canonical_term({"y", "u"}, Term::sub(Term::var(1), Term::var(0)));
      return TreeSpec::pi1hat(m, random_finset(rng, 4, 1), rng() % 3, random_periodic(rng));
    }
    default: {
      Name f = rng() % 2 ? generic_enum() : small_table();
      return TreeSpec::noconv(f, random_finset(rng, 4, 1), {Nat(rng() % 3)});
    }
  }
}

Sub random_sub(std::mt19937_64& rng, int depth) {
  int roll = depth <= 0 ? static_cast<int>(rng() % 4) : static_cast<int>(rng() % 7);
  switch (roll) {
    case 0:
      return card();
    case 1:
      return const_sub(rng() % 5);
    case 2: {
      std::vector<TreeSpec> fam;
      for (std::size_t i = 0, n = 1 + rng() % 2; i < n; ++i) fam.push_back(random_tree(rng));
      return mazur(std::move(fam));
    }
    case 3:
      return dom(random_growth(rng));
    case 4:
      return join(random_sub(rng, depth - 1), random_sub(rng, depth - 1));
    case 5:
      return meet(random_sub(rng, depth - 1), random_sub(rng, depth - 1));
    default: {
      std::vector<Sub> kids;
      for (std::size_t i = 0, n = 1 + rng() % 3; i < n; ++i) kids.push_back(random_sub(rng, depth - 1));
      return imeet(1 + rng() % 3, std::move(kids));
    }
  }
}

}  // namespace

std::vector<Sub> submeasure_pool(std::uint64_t seed, std::size_t count) {
  std::mt19937_64 rng(seed);
  std::vector<Sub> out;
  // Every constructor appears at least once before the random tail.
  out.push_back(card());
  out.push_back(const_sub(3));
  out.push_back(join(card(), const_sub(2)));
  out.push_back(meet(card(), const_sub(3)));
  out.push_back(mazur({random_tree(rng), random_tree(rng)}));
  out.push_back(imeet(3, {card(), const_sub(1), dom(random_growth(rng))}));
  out.push_back(dom(random_growth(rng)));
  while (out.size() < count) out.push_back(random_sub(rng, 2));
  return out;
}

std::vector<TreeSpec> tree_family(std::uint64_t seed, std::size_t index) {
  std::mt19937_64 rng(seed * 1000003 + index);
  std::vector<TreeSpec> fam;
  for (std::size_t i = 0, n = 1 + rng() % 3; i < n; ++i) fam.push_back(random_tree(rng));
  return fam;
}

}  // namespace fsm::corpus
