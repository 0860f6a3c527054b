#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace fsm {

using Nat = std::uint64_t;

inline constexpr Nat kNatMax = ~Nat{0};

// Saturating arithmetic; every ground computation goes through these.
Nat sat_add(Nat a, Nat b);
Nat sat_mul(Nat a, Nat b);
inline Nat monus(Nat a, Nat b) { return a > b ? a - b : 0; }

// Cantor pairing.
Nat pair(Nat w, Nat t);
Nat fst(Nat z);
Nat snd(Nat z);

// Finite set of naturals, stored strictly increasing.
class FinSet {
 public:
  FinSet() = default;
  FinSet(std::initializer_list<Nat> xs);
  static FinSet from_unsorted(std::vector<Nat> xs);
  static FinSet range(Nat lo, Nat hi);

  const std::vector<Nat>& elements() const { return elems_; }
  std::size_t size() const { return elems_.size(); }
  bool empty() const { return elems_.empty(); }
  Nat operator[](std::size_t i) const { return elems_[i]; }
  Nat max() const { return elems_.back(); }
  Nat min() const { return elems_.front(); }

  bool contains(Nat x) const;
  bool subset_of(const FinSet& other) const;

  FinSet unite(const FinSet& other) const;
  FinSet intersect(const FinSet& other) const;
  FinSet minus(const FinSet& other) const;
  FinSet with(Nat x) const;
  FinSet below(Nat n) const;

  // Subsets addressed by bitmask over the element positions (size() <= 63).
  FinSet select(std::uint64_t mask) const;
  std::uint64_t mask_of(const FinSet& sub) const;

  std::string to_string() const;
  std::size_t hash() const;

  auto operator<=>(const FinSet&) const = default;
  bool operator==(const FinSet&) const = default;

 private:
  std::vector<Nat> elems_;
};

struct FinSetHash {
  std::size_t operator()(const FinSet& s) const { return s.hash(); }
};

// Finite binary string; ones()/zeros() are the positions holding 1/0.
class BitString {
 public:
  BitString() = default;
  explicit BitString(std::string_view bits);
  static BitString indicator(const FinSet& s, std::size_t len);
  static BitString zeros_of(std::size_t len);

  std::size_t size() const { return bits_.size(); }
  bool empty() const { return bits_.empty(); }
  bool operator[](std::size_t i) const { return bits_[i] == '1'; }
  // Out-of-range positions read as absent.
  std::optional<bool> at(Nat i) const;

  void push_back(bool b) { bits_.push_back(b ? '1' : '0'); }
  void pop_back() { bits_.pop_back(); }
  void set(std::size_t i, bool b) { bits_[i] = b ? '1' : '0'; }
  BitString prefix(std::size_t n) const;
  BitString appended(bool b) const;
  bool is_prefix_of(const BitString& other) const;
  bool compatible(const BitString& other) const;

  FinSet ones() const;
  FinSet zeros() const;
  std::size_t count_ones() const;

  const std::string& str() const { return bits_; }
  auto operator<=>(const BitString&) const = default;
  bool operator==(const BitString&) const = default;

 private:
  std::string bits_;
};

// Eventually periodic subset of N: prefix bits, then the period repeated forever.
class PeriodicSet {
 public:
  PeriodicSet(BitString prefix, BitString period);

  static PeriodicSet nat();
  static PeriodicSet none();
  static PeriodicSet prog(Nat start, Nat step);
  static PeriodicSet finite(const FinSet& s);

  const BitString& prefix() const { return prefix_; }
  const BitString& period() const { return period_; }

  bool contains(Nat n) const;
  bool is_infinite() const;
  bool is_empty() const;
  bool subset_of(const PeriodicSet& other) const;
  // Least member >= n, if any.
  std::optional<Nat> next_member(Nat n) const;

  PeriodicSet unite(const PeriodicSet& other) const;
  PeriodicSet intersect(const PeriodicSet& other) const;
  PeriodicSet minus(const PeriodicSet& other) const;
  PeriodicSet complement() const;

  BitString chi(std::size_t len) const;
  std::string to_string() const;

  bool operator==(const PeriodicSet&) const = default;

 private:
  template <class Op>
  PeriodicSet combine(const PeriodicSet& other, Op op) const;
  void canonicalize();

  BitString prefix_;
  BitString period_;
};

// S ∩ {0,…,n−1}
FinSet restrict(const PeriodicSet& s, Nat n);

}  // namespace fsm
