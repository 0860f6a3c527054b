#include <gtest/gtest.h>

#include <random>

#include "fsm/names.hpp"
#include "fsm/submeasure.hpp"
#include "support/corpus.hpp"
#include "support/oracles.hpp"

using namespace fsm;

namespace {

oracle::SetFn by_eval(const Sub& mu) {
  return [mu](const FinSet& s) { return eval(mu, s); };
}

std::vector<TreeSpec> evens_family() { return {TreeSpec::subsets(PeriodicSet::prog(0, 2))}; }

GroundFn doubling() { return GroundFn::term({"k"}, Term::mul(Term::var(0), Term::constant(2))); }

}  // namespace

TEST(Eval, EmptySetIsZero) {
  for (const auto& mu : corpus::submeasure_pool(21, 30)) EXPECT_EQ(eval(mu, FinSet()), 0u) << mu->print();
}

TEST(Eval, MeetOfCardAndConstant) {
  Sub mu = meet(card(), const_sub(3));
  FinSet x = FinSet::range(0, 5);
  Nat brute = oracle::split_min(by_eval(card()), by_eval(const_sub(3)), x);
  EXPECT_EQ(brute, 3u);
  EXPECT_EQ(eval(mu, x), brute);
}

TEST(Eval, JoinIsPointwiseMax) {
  EXPECT_EQ(eval(join(const_sub(2), card()), FinSet{7}), 2u);
  EXPECT_EQ(eval(join(const_sub(2), card()), FinSet::range(0, 5)), 5u);
}

TEST(Eval, AgreesWithDefinitionOnSmallSets) {
  auto pool = corpus::submeasure_pool(909, 25);
  std::mt19937_64 rng(3);
  for (const auto& mu : pool)
    for (int i = 0; i < 6; ++i) {
      FinSet x = corpus::random_finset(rng, 9, 5);
      EXPECT_EQ(eval(mu, x), oracle::eval_by_definition(mu, x)) << mu->print() << " at " << x.to_string();
    }
}

TEST(Eval, TableMatchesPointwise) {
  auto pool = corpus::submeasure_pool(17, 12);
  FinSet w{1, 3, 4, 8, 9, 11};
  for (const auto& mu : pool) {
    auto t = eval_table(mu, w);
    for (std::uint64_t m = 0; m < t.size(); ++m) EXPECT_EQ(t[m], eval(mu, w.select(m))) << mu->print();
  }
}

TEST(Mazur, ThetaExamples) {
  auto fam = evens_family();
  EXPECT_EQ(mazur_theta(fam, FinSet()), 0u);
  EXPECT_EQ(oracle::first_level(fam, FinSet{0, 2, 4}), 1u);
  EXPECT_EQ(mazur_theta(fam, FinSet{0, 2, 4}), 1u);
  EXPECT_EQ(oracle::first_level(fam, FinSet{1}), 2u);
  EXPECT_EQ(mazur_theta(fam, FinSet{1}), 2u);
}

TEST(Mazur, EvalExamples) {
  auto fam = evens_family();
  auto theta = [&](const FinSet& s) { return oracle::first_level(fam, s); };
  EXPECT_EQ(mazur_eval(fam, FinSet()), 0u);
  EXPECT_EQ(oracle::partition_min(theta, FinSet{0, 2}), 1u);
  EXPECT_EQ(mazur_eval(fam, FinSet{0, 2}), 1u);
  EXPECT_EQ(oracle::partition_min(theta, FinSet{1, 2}), 3u);
  EXPECT_EQ(mazur_eval(fam, FinSet{1, 2}), 3u);
}

TEST(Mazur, EmptyFamilyUsesMaxThreshold) {
  for (const FinSet& x : {FinSet{0}, FinSet{3}, FinSet{2, 5}, FinSet{0, 1, 2}})
    EXPECT_EQ(mazur_theta({}, x), x.max() + 1);
}

TEST(Mazur, CoverTableMatchesCovers) {
  for (std::size_t f = 0; f < 30; ++f) {
    auto fam = corpus::tree_family(77, f);
    FinSet w{0, 1, 3, 4, 6, 7, 9};
    for (const auto& t : fam) {
      auto table = t.cover_table(w);
      for (std::uint64_t m = 1; m < table.size(); ++m)
        EXPECT_EQ(bool(table[m]), t.covers(w.select(m))) << t.print() << " at " << w.select(m).to_string();
    }
  }
}

TEST(Mazur, StabFastPathMatchesSlowPath) {
  Name table = turing_table({{BitString("1"), 0, 1},
                             {BitString("0"), 0, 0},
                             {BitString("01"), 1, 2},
                             {BitString("00"), 1, 0},
                             {BitString("1"), 1, 3}});
  for (const FinSet& stem : {FinSet(), FinSet{0}, FinSet{1}, FinSet{2}}) {
    TreeSpec fast = TreeSpec::stab(table, stem);
    TreeSpec slow = TreeSpec::stab(oracle::opaque(table), stem);
    ASSERT_EQ(slow.name->table_entries(), nullptr);
    for (const auto& s : oracle::strings_up_to(7)) EXPECT_EQ(fast.member(s), slow.member(s)) << s.str();
  }
}

TEST(Mazur, DomMatchesDefinition) {
  Sub mu = dom(doubling());
  std::mt19937_64 rng(8);
  for (int i = 0; i < 40; ++i) {
    FinSet x = corpus::random_finset(rng, 10, 5);
    EXPECT_EQ(eval(mu, x), oracle::eval_by_definition(mu, x)) << x.to_string();
  }
}

TEST(IMeet, MoreTermsNeverIncrease) {
  std::vector<Sub> subs{card(), const_sub(5), dom(doubling()), card()};
  FinSet w = FinSet::range(0, 8);
  auto prev = eval_table(imeet(1, subs), w);
  for (std::size_t n = 2; n <= subs.size() + 1; ++n) {
    auto cur = eval_table(imeet(n, subs), w);
    for (std::size_t m = 0; m < cur.size(); ++m) EXPECT_LE(cur[m], prev[m]) << "depth " << n;
    prev = cur;
  }
}

TEST(Budget, OversizedSetsAreRefused) {
  FinSet big = FinSet::range(0, 17);
  EXPECT_THROW(eval(meet(card(), const_sub(3)), big), BudgetExceeded);
  EXPECT_THROW(eval(mazur(evens_family()), FinSet::range(0, 15)), BudgetExceeded);
  DpBudget saved = dp_budget();
  set_dp_budget({4, 4});
  try {
    eval(meet(card(), card()), FinSet::range(0, 5));
    ADD_FAILURE() << "budget 4 accepted five elements";
  } catch (const BudgetExceeded& e) {
    EXPECT_EQ(e.budget(), 4u);
    EXPECT_EQ(e.size(), 5u);
  }
  set_dp_budget(saved);
  EXPECT_EQ(eval(card(), big), 17u);
}

TEST(Unbounded, CardOnEvens) {
  auto v = unbounded_check(card(), PeriodicSet::prog(0, 2), 5, 64);
  ASSERT_TRUE(v.witnessed());
  EXPECT_EQ(v.target, 5u);
  EXPECT_EQ(v.witness, (FinSet{0, 2, 4, 6, 8}));
  EXPECT_TRUE(verify_witness(v, card(), PeriodicSet::prog(0, 2)));
}

TEST(Unbounded, ConstantStaysBounded) {
  for (Nat horizon : {1, 8, 40, 64}) {
    auto v = unbounded_check(const_sub(3), PeriodicSet::nat(), 4, horizon);
    EXPECT_EQ(v.kind, UnboundedVerdict::Kind::BoundedSoFar);
    EXPECT_EQ(v.horizon, horizon);
    EXPECT_EQ(v.value, 3u);
  }
}

TEST(Unbounded, MeetWithDomAgreesWithSplitSearch) {
  Sub mu = meet(card(), dom(doubling()));
  const PeriodicSet a = PeriodicSet::prog(0, 3);
  const FinSet elems = restrict(a, 40);
  // Brute force: the least prefix on which the best split reaches 4.
  std::optional<FinSet> first;
  for (std::size_t k = 0; k <= elems.size() && !first; ++k) {
    FinSet p = elems.select((std::uint64_t{1} << k) - 1);
    if (oracle::split_min(by_eval(card()), by_eval(dom(doubling())), p) >= 4) first = p;
  }
  auto v = unbounded_check(mu, a, 4, 40);
  ASSERT_EQ(v.witnessed(), first.has_value());
  if (first) EXPECT_EQ(v.witness, *first);
}

TEST(Unbounded, ForgedWitnessRejected) {
  auto v = unbounded_check(card(), PeriodicSet::nat(), 3, 64);
  ASSERT_TRUE(v.witnessed());
  UnboundedVerdict forged = v;
  forged.target = 9;
  EXPECT_FALSE(verify_witness(forged, card(), PeriodicSet::nat()));
  EXPECT_FALSE(verify_witness(v, card(), PeriodicSet::prog(1, 2)));
}

TEST(FinGenerated, Examples) {
  auto r = fin_generated_check(card(), card(), PeriodicSet::nat(), 6);
  EXPECT_EQ(r.value, oracle::split_min(by_eval(card()), by_eval(card()), FinSet::range(0, 6)));
  EXPECT_EQ(r.value, 6u);
  EXPECT_TRUE(r.agrees());

  auto s = fin_generated_check(card(), const_sub(2), PeriodicSet::nat(), 8);
  EXPECT_EQ(s.value, oracle::split_min(by_eval(card()), by_eval(const_sub(2)), FinSet::range(0, 8)));
  EXPECT_EQ(s.value, 2u);
  EXPECT_EQ(s.left, FinSet());
  EXPECT_EQ(s.right, FinSet::range(0, 8));

  auto e = fin_generated_check(card(), const_sub(7), PeriodicSet::finite({}), 20);
  EXPECT_EQ(e.value, 0u);
}

TEST(Parser, RoundTrip) {
  for (const auto& mu : corpus::submeasure_pool(404, 30)) {
    Sub again = parse_sub(mu->print());
    EXPECT_EQ(again->key(), mu->key());
  }
}

TEST(Parser, Errors) {
  EXPECT_THROW(parse_sub("(meet (card))"), InputError);
  EXPECT_THROW(parse_sub("(const x)"), InputError);
  EXPECT_THROW(parse_sub("(mazur (subsets (prog 0 0 0)))"), InputError);
  EXPECT_THROW(parse_sub("(volume)"), InputError);
}
