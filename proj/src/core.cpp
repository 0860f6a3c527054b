#include "fsm/core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace fsm {

Nat sat_add(Nat a, Nat b) { return a > kNatMax - b ? kNatMax : a + b; }

Nat sat_mul(Nat a, Nat b) {
  if (a == 0 || b == 0) return 0;
  return a > kNatMax / b ? kNatMax : a * b;
}

Nat pair(Nat w, Nat t) {
  unsigned __int128 d = static_cast<unsigned __int128>(w) + t;
  unsigned __int128 z = d * (d + 1) / 2 + t;
  return z > kNatMax ? kNatMax : static_cast<Nat>(z);
}

namespace {

// Largest d with d(d+1)/2 <= z.
Nat diagonal(Nat z) {
  auto tri = [](unsigned __int128 d) { return d * (d + 1) / 2; };
  Nat d = static_cast<Nat>((std::sqrt(8.0L * static_cast<long double>(z) + 1.0L) - 1.0L) / 2.0L);
  while (d > 0 && tri(d) > z) --d;
  while (tri(static_cast<unsigned __int128>(d) + 1) <= z) ++d;
  return d;
}

}  // namespace

Nat fst(Nat z) {
  Nat d = diagonal(z);
  Nat t = z - static_cast<Nat>(static_cast<unsigned __int128>(d) * (d + 1) / 2);
  return d - t;
}

Nat snd(Nat z) {
  Nat d = diagonal(z);
  return z - static_cast<Nat>(static_cast<unsigned __int128>(d) * (d + 1) / 2);
}

// ---------------------------------------------------------------- FinSet

FinSet::FinSet(std::initializer_list<Nat> xs) : FinSet(from_unsorted(std::vector<Nat>(xs))) {}

FinSet FinSet::from_unsorted(std::vector<Nat> xs) {
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  FinSet s;
  s.elems_ = std::move(xs);
  return s;
}

FinSet FinSet::range(Nat lo, Nat hi) {
  FinSet s;
  for (Nat i = lo; i < hi; ++i) s.elems_.push_back(i);
  return s;
}

bool FinSet::contains(Nat x) const { return std::binary_search(elems_.begin(), elems_.end(), x); }

bool FinSet::subset_of(const FinSet& other) const {
  return std::includes(other.elems_.begin(), other.elems_.end(), elems_.begin(), elems_.end());
}

FinSet FinSet::unite(const FinSet& other) const {
  FinSet r;
  std::set_union(elems_.begin(), elems_.end(), other.elems_.begin(), other.elems_.end(),
                 std::back_inserter(r.elems_));
  return r;
}

FinSet FinSet::intersect(const FinSet& other) const {
  FinSet r;
  std::set_intersection(elems_.begin(), elems_.end(), other.elems_.begin(), other.elems_.end(),
                        std::back_inserter(r.elems_));
  return r;
}

FinSet FinSet::minus(const FinSet& other) const {
  FinSet r;
  std::set_difference(elems_.begin(), elems_.end(), other.elems_.begin(), other.elems_.end(),
                      std::back_inserter(r.elems_));
  return r;
}

FinSet FinSet::with(Nat x) const {
  FinSet r = *this;
  auto it = std::lower_bound(r.elems_.begin(), r.elems_.end(), x);
  if (it == r.elems_.end() || *it != x) r.elems_.insert(it, x);
  return r;
}

FinSet FinSet::below(Nat n) const {
  FinSet r;
  auto it = std::lower_bound(elems_.begin(), elems_.end(), n);
  r.elems_.assign(elems_.begin(), it);
  return r;
}

FinSet FinSet::select(std::uint64_t mask) const {
  FinSet r;
  for (std::size_t i = 0; i < elems_.size() && mask; ++i, mask >>= 1)
    if (mask & 1) r.elems_.push_back(elems_[i]);
  return r;
}

std::uint64_t FinSet::mask_of(const FinSet& sub) const {
  std::uint64_t m = 0;
  std::size_t j = 0;
  for (Nat x : sub.elems_) {
    while (j < elems_.size() && elems_[j] < x) ++j;
    if (j == elems_.size() || elems_[j] != x) throw std::invalid_argument("mask_of: not a subset");
    m |= std::uint64_t{1} << j;
  }
  return m;
}

std::string FinSet::to_string() const {
  std::string s = "(fin";
  for (Nat x : elems_) s += " " + std::to_string(x);
  return s + ")";
}

std::size_t FinSet::hash() const {
  std::size_t h = 1469598103934665603ull;
  for (Nat x : elems_) {
    h ^= x + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
  }
  return h;
}

// ---------------------------------------------------------------- BitString

BitString::BitString(std::string_view bits) : bits_(bits) {
  for (char c : bits_)
    if (c != '0' && c != '1') throw std::invalid_argument("bit string must be over {0,1}");
}

BitString BitString::indicator(const FinSet& s, std::size_t len) {
  BitString b;
  b.bits_.assign(len, '0');
  for (Nat x : s.elements())
    if (x < len) b.bits_[x] = '1';
  return b;
}

BitString BitString::zeros_of(std::size_t len) {
  BitString b;
  b.bits_.assign(len, '0');
  return b;
}

std::optional<bool> BitString::at(Nat i) const {
  if (i >= bits_.size()) return std::nullopt;
  return bits_[i] == '1';
}

BitString BitString::prefix(std::size_t n) const {
  BitString b;
  b.bits_ = bits_.substr(0, std::min(n, bits_.size()));
  return b;
}

BitString BitString::appended(bool v) const {
  BitString b = *this;
  b.push_back(v);
  return b;
}

bool BitString::is_prefix_of(const BitString& other) const {
  return bits_.size() <= other.bits_.size() && other.bits_.compare(0, bits_.size(), bits_) == 0;
}

bool BitString::compatible(const BitString& other) const {
  return is_prefix_of(other) || other.is_prefix_of(*this);
}

FinSet BitString::ones() const {
  std::vector<Nat> xs;
  for (std::size_t i = 0; i < bits_.size(); ++i)
    if (bits_[i] == '1') xs.push_back(i);
  return FinSet::from_unsorted(std::move(xs));
}

FinSet BitString::zeros() const {
  std::vector<Nat> xs;
  for (std::size_t i = 0; i < bits_.size(); ++i)
    if (bits_[i] == '0') xs.push_back(i);
  return FinSet::from_unsorted(std::move(xs));
}

std::size_t BitString::count_ones() const {
  return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), '1'));
}

// ---------------------------------------------------------------- PeriodicSet

PeriodicSet::PeriodicSet(BitString prefix, BitString period)
    : prefix_(std::move(prefix)), period_(std::move(period)) {
  if (period_.empty()) throw std::invalid_argument("periodic set needs a nonempty period");
  canonicalize();
}

void PeriodicSet::canonicalize() {
  // Shortest period that generates the current one.
  const std::string& p = period_.str();
  std::size_t n = p.size();
  for (std::size_t d = 1; d <= n; ++d) {
    if (n % d) continue;
    bool ok = true;
    for (std::size_t i = d; i < n && ok; ++i) ok = p[i] == p[i - d];
    if (ok) {
      period_ = BitString(std::string_view(p).substr(0, d));
      break;
    }
  }
  // Absorb the tail of the prefix into the period by rotation.
  while (!prefix_.empty() && prefix_[prefix_.size() - 1] == period_[period_.size() - 1]) {
    std::string rot = period_.str();
    rot.insert(rot.begin(), rot.back());
    rot.pop_back();
    period_ = BitString(rot);
    prefix_.pop_back();
  }
}

PeriodicSet PeriodicSet::nat() { return PeriodicSet(BitString(), BitString("1")); }
PeriodicSet PeriodicSet::none() { return PeriodicSet(BitString(), BitString("0")); }

PeriodicSet PeriodicSet::prog(Nat start, Nat step) {
  if (step == 0) return finite(FinSet{start});
  std::string period(step, '0');
  period[0] = '1';
  return PeriodicSet(BitString(std::string(start, '0')), BitString(period));
}

PeriodicSet PeriodicSet::finite(const FinSet& s) {
  std::size_t len = s.empty() ? 0 : s.max() + 1;
  return PeriodicSet(BitString::indicator(s, len), BitString("0"));
}

bool PeriodicSet::contains(Nat n) const {
  if (n < prefix_.size()) return prefix_[n];
  return period_[(n - prefix_.size()) % period_.size()];
}

bool PeriodicSet::is_infinite() const { return period_.count_ones() > 0; }

bool PeriodicSet::is_empty() const { return !is_infinite() && prefix_.count_ones() == 0; }

bool PeriodicSet::subset_of(const PeriodicSet& other) const { return minus(other).is_empty(); }

std::optional<Nat> PeriodicSet::next_member(Nat n) const {
  Nat horizon = std::max<Nat>(n, prefix_.size()) + period_.size();
  for (Nat i = n; i < horizon; ++i)
    if (contains(i)) return i;
  return std::nullopt;
}

template <class Op>
PeriodicSet PeriodicSet::combine(const PeriodicSet& other, Op op) const {
  std::size_t pre = std::max(prefix_.size(), other.prefix_.size());
  std::size_t per = std::lcm(period_.size(), other.period_.size());
  std::string a(pre, '0'), b(per, '0');
  for (std::size_t i = 0; i < pre; ++i) a[i] = op(contains(i), other.contains(i)) ? '1' : '0';
  for (std::size_t i = 0; i < per; ++i)
    b[i] = op(contains(pre + i), other.contains(pre + i)) ? '1' : '0';
  return PeriodicSet(BitString(a), BitString(b));
}

PeriodicSet PeriodicSet::unite(const PeriodicSet& o) const {
  return combine(o, [](bool x, bool y) { return x || y; });
}
PeriodicSet PeriodicSet::intersect(const PeriodicSet& o) const {
  return combine(o, [](bool x, bool y) { return x && y; });
}
PeriodicSet PeriodicSet::minus(const PeriodicSet& o) const {
  return combine(o, [](bool x, bool y) { return x && !y; });
}
PeriodicSet PeriodicSet::complement() const { return nat().minus(*this); }

BitString PeriodicSet::chi(std::size_t len) const {
  BitString b;
  for (std::size_t i = 0; i < len; ++i) b.push_back(contains(i));
  return b;
}

std::string PeriodicSet::to_string() const {
  return "(periodic \"" + prefix_.str() + "\" \"" + period_.str() + "\")";
}

FinSet restrict(const PeriodicSet& s, Nat n) {
  std::vector<Nat> xs;
  for (Nat i = 0; i < n; ++i)
    if (s.contains(i)) xs.push_back(i);
  return FinSet::from_unsorted(std::move(xs));
}

}  // namespace fsm
