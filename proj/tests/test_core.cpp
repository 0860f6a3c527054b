#include <gtest/gtest.h>

#include <random>
#include <set>

#include "fsm/core.hpp"
#include "fsm/sexpr.hpp"

using namespace fsm;

namespace {

// Walk the diagonals w + t = d, t rising, numbering pairs as they appear.
Nat diagonal_index(Nat w, Nat t) {
  Nat index = 0;
  for (Nat d = 0;; ++d)
    for (Nat tt = 0; tt <= d; ++tt, ++index)
      if (d - tt == w && tt == t) return index;
}

std::set<Nat> members(const PeriodicSet& s, Nat n) {
  std::set<Nat> out;
  for (Nat i = 0; i < n; ++i)
    if (s.contains(i)) out.insert(i);
  return out;
}

PeriodicSet random_periodic(std::mt19937_64& rng) {
  BitString prefix, period;
  for (std::size_t i = 0, n = rng() % 5; i < n; ++i) prefix.push_back(rng() % 2);
  for (std::size_t i = 0, n = 1 + rng() % 5; i < n; ++i) period.push_back(rng() % 2);
  return PeriodicSet(prefix, period);
}

}  // namespace

TEST(Pairing, ZeroAndInverse) {
  EXPECT_EQ(pair(0, 0), 0u);
  EXPECT_EQ(fst(pair(3, 5)), 3u);
  EXPECT_EQ(snd(pair(3, 5)), 5u);
}

TEST(Pairing, MatchesDiagonalEnumeration) {
  for (Nat w = 0; w < 12; ++w)
    for (Nat t = 0; t < 12; ++t) EXPECT_EQ(pair(w, t), diagonal_index(w, t)) << w << "," << t;
  EXPECT_EQ(pair(1, 0), 1u);
}

TEST(Pairing, Bijective) {
  for (Nat z = 0; z < 2000; ++z) EXPECT_EQ(pair(fst(z), snd(z)), z);
}

TEST(Saturation, ClampsAtMax) {
  EXPECT_EQ(sat_add(kNatMax, 1), kNatMax);
  EXPECT_EQ(sat_mul(kNatMax / 2, 3), kNatMax);
  EXPECT_EQ(sat_add(2, 3), 5u);
  EXPECT_EQ(monus(3, 5), 0u);
}

TEST(FinSetOps, AgreeWithStdSet) {
  std::mt19937_64 rng(7);
  for (int round = 0; round < 200; ++round) {
    std::vector<Nat> xs, ys;
    for (int i = 0; i < 6; ++i) xs.push_back(rng() % 12);
    for (int i = 0; i < 6; ++i) ys.push_back(rng() % 12);
    FinSet a = FinSet::from_unsorted(xs), b = FinSet::from_unsorted(ys);
    std::set<Nat> sa(xs.begin(), xs.end()), sb(ys.begin(), ys.end());
    std::set<Nat> u, i, d;
    for (Nat x : sa) (sb.count(x) ? i : d).insert(x);
    u = sa;
    u.insert(sb.begin(), sb.end());
    auto as_std = [](const FinSet& f) { return std::set<Nat>(f.elements().begin(), f.elements().end()); };
    EXPECT_EQ(as_std(a.unite(b)), u);
    EXPECT_EQ(as_std(a.intersect(b)), i);
    EXPECT_EQ(as_std(a.minus(b)), d);
    EXPECT_EQ(a.subset_of(b), std::includes(sb.begin(), sb.end(), sa.begin(), sa.end()));
    EXPECT_EQ(a.size(), sa.size());
  }
}

TEST(FinSetOps, SelectAndMask) {
  FinSet w = FinSet::range(3, 9);
  for (std::uint64_t m = 0; m < 64; ++m) EXPECT_EQ(w.mask_of(w.select(m)), m);
  EXPECT_EQ(w.select(0b101), (FinSet{3, 5}));
}

TEST(PeriodicSetOps, Examples) {
  PeriodicSet d = PeriodicSet::nat().minus(PeriodicSet::finite({0}));
  EXPECT_FALSE(d.contains(0));
  EXPECT_TRUE(d.is_infinite());
  EXPECT_TRUE(restrict(PeriodicSet::prog(1, 3), 0).empty());
  EXPECT_EQ(restrict(PeriodicSet::prog(0, 2), 5), (FinSet{0, 2, 4}));
}

TEST(PeriodicSetOps, AlgebraIsPointwise) {
  std::mt19937_64 rng(11);
  const Nat n = 120;
  for (int round = 0; round < 300; ++round) {
    PeriodicSet a = random_periodic(rng), b = random_periodic(rng);
    auto ma = members(a, n), mb = members(b, n);
    std::set<Nat> u = ma, i, d, c;
    u.insert(mb.begin(), mb.end());
    for (Nat x : ma) (mb.count(x) ? i : d).insert(x);
    for (Nat x = 0; x < n; ++x)
      if (!ma.count(x)) c.insert(x);
    EXPECT_EQ(members(a.unite(b), n), u);
    EXPECT_EQ(members(a.intersect(b), n), i);
    EXPECT_EQ(members(a.minus(b), n), d);
    EXPECT_EQ(members(a.complement(), n), c);
    // Periods are at most 5 and prefixes at most 4, so 120 covers every difference.
    EXPECT_EQ(a.subset_of(b), std::includes(mb.begin(), mb.end(), ma.begin(), ma.end()));
    EXPECT_EQ(a.is_empty(), ma.empty());
    for (Nat x = 0; x < 60; ++x) {
      auto next = a.next_member(x);
      auto it = ma.lower_bound(x);
      if (it == ma.end())
        EXPECT_FALSE(next.has_value());
      else
        EXPECT_EQ(next, std::optional<Nat>(*it));
    }
  }
}

TEST(PeriodicSetOps, InfiniteIffPeriodHasOne) {
  EXPECT_TRUE(PeriodicSet::prog(4, 7).is_infinite());
  EXPECT_FALSE(PeriodicSet::finite({1, 5}).is_infinite());
  EXPECT_TRUE(PeriodicSet::none().is_empty());
}

TEST(PeriodicSetOps, PrintParseRoundTrip) {
  std::mt19937_64 rng(5);
  for (int round = 0; round < 100; ++round) {
    PeriodicSet a = random_periodic(rng);
    EXPECT_EQ(parse_set(a.to_string()), a) << a.to_string();
  }
}

TEST(SetParser, Grammar) {
  EXPECT_EQ(parse_set("(union (prog 0 2) (fin 1))"), PeriodicSet::prog(0, 2).unite(PeriodicSet::finite({1})));
  EXPECT_EQ(parse_set("(diff (nat) (fin 0))"), PeriodicSet::nat().minus(PeriodicSet::finite({0})));
  EXPECT_EQ(parse_finset("(fin 4 1 4)"), (FinSet{1, 4}));
}

TEST(SetParser, ErrorsCarryOffsets) {
  try {
    parse_set("(prog 0 two)");
    FAIL() << "accepted a malformed set";
  } catch (const InputError& e) {
    EXPECT_EQ(e.pos(), 8u);
  }
  EXPECT_THROW(parse_set("(prog 0 2"), InputError);
  EXPECT_THROW(parse_set("(cube 3)"), InputError);
}

TEST(BitStrings, Basics) {
  BitString s("0110");
  EXPECT_EQ(s.ones(), (FinSet{1, 2}));
  EXPECT_EQ(s.zeros(), (FinSet{0, 3}));
  EXPECT_TRUE(BitString("01").is_prefix_of(s));
  EXPECT_FALSE(s.at(9).has_value());
  EXPECT_TRUE(s.compatible(BitString("011")));
  EXPECT_FALSE(s.compatible(BitString("1")));
  EXPECT_EQ(BitString::indicator({0, 2}, 4).str(), "1010");
}
