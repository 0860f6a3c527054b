#pragma once

#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "fsm/core.hpp"
#include "fsm/sexpr.hpp"

namespace fsm {

// ------------------------------------------------------------ ground functions

// Arithmetic term over parameters: constants, +, ·, ∸, pairing and halving.
struct Term {
  enum class Op { Const, Var, Add, Mul, Monus, Pair, Fst, Snd, Half };
  Op op = Op::Const;
  Nat value = 0;  // Const payload or Var index
  std::vector<Term> kids;

  static Term constant(Nat v) { return {Op::Const, v, {}}; }
  static Term var(Nat i) { return {Op::Var, i, {}}; }
  static Term add(Term a, Term b) { return {Op::Add, 0, {std::move(a), std::move(b)}}; }
  static Term mul(Term a, Term b) { return {Op::Mul, 0, {std::move(a), std::move(b)}}; }
  static Term sub(Term a, Term b) { return {Op::Monus, 0, {std::move(a), std::move(b)}}; }
  static Term pair(Term a, Term b) { return {Op::Pair, 0, {std::move(a), std::move(b)}}; }
  static Term first(Term a) { return {Op::Fst, 0, {std::move(a)}}; }
  static Term second(Term a) { return {Op::Snd, 0, {std::move(a)}}; }
  static Term half(Term a) { return {Op::Half, 0, {std::move(a)}}; }
  // |a − b|
  static Term absdiff(const Term& a, const Term& b) { return add(sub(a, b), sub(b, a)); }

  Nat eval(std::span<const Nat> env) const;
  std::string print(const std::vector<std::string>& params) const;
  bool operator==(const Term&) const = default;
};

// Total ground function: a term over named parameters, or a unary table with affine tail.
class GroundFn {
 public:
  static GroundFn term(std::vector<std::string> params, Term body);
  // Explicit rows win; other k map to slope·k + offset.
  static GroundFn table(std::vector<std::pair<Nat, Nat>> rows, Nat slope, Nat offset);

  std::size_t arity() const { return is_table_ ? 1 : params_.size(); }
  Nat operator()(std::span<const Nat> args) const;
  Nat operator()(Nat k) const { return (*this)(std::span<const Nat>(&k, 1)); }
  // Printed operands without the enclosing head, e.g. "(x y) (+ x y)".
  std::string print_body() const;

 private:
  bool is_table_ = false;
  std::vector<std::string> params_;
  Term body_;
  std::vector<std::pair<Nat, Nat>> rows_;
  Nat slope_ = 0, offset_ = 0;
};

// Reads "(x y) term", "term", or "(table k v …) (affine a b)" starting at items[first].
GroundFn parse_ground(const SExpr& parent, std::size_t first);

// ------------------------------------------------------------ names

class NameNode;
struct TableEntry {
  BitString pattern;
  Nat x;
  Nat y;
};
using Name = std::shared_ptr<const NameNode>;

class InconsistentTable : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class ArityError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Monotone partial functional: query(τ, x̄) only looks at the oracle prefix τ
// and spends effort bounded by a function of |τ|.
class NameNode {
 public:
  virtual ~NameNode() = default;
  virtual std::size_t arity() const = 0;
  virtual std::optional<Nat> query(const BitString& tau, std::span<const Nat> args) const = 0;
  virtual std::string print() const = 0;
  virtual std::vector<Name> kids() const { return {}; }
  // Same node over replacement children (used by hole substitution).
  virtual Name with_kids(std::vector<Name> kids) const;
  // Defined on every oracle (including the empty one) at every argument.
  virtual bool total() const { return false; }
  // Rows of a finite oracle table, when the name is one.
  virtual const std::vector<TableEntry>* table_entries() const { return nullptr; }

  std::optional<Nat> operator()(const BitString& tau, std::initializer_list<Nat> args) const {
    return query(tau, std::span<const Nat>(args.begin(), args.size()));
  }
};

// Effort allowance for loops whose length is data dependent (primrec, bsum).
Nat effort_cap(const BitString& tau);

Name canonical(GroundFn f);
// Parameters default to the distinct variables of the term in order of first occurrence.
Name canonical(const std::string& term_text);
Name canonical_term(std::vector<std::string> params, Term body);
Name constant_name(std::size_t arity, Nat value);
Name projection(std::size_t arity, std::size_t index);

Name superpose(Name outer, std::vector<Name> inner);
// Nullary F seen as a k-ary name ignoring its arguments.
Name lift(std::size_t arity, Name inner);
// z_0 = F0(x̄), z_{i+1} = F(x̄, i, z_i); value at (x̄, y) is z_y.
Name primrec(Name base, Name step);

Name generic_chi();
Name generic_enum();

Name turing_table(std::vector<TableEntry> entries);

// Reindexing of the last argument.
enum class SliceKind { Even, Odd, PairFix, PairVar, Shift, Head };
// PairVar turns (x̄, t) into (x̄, w, t) ↦ W(x̄, pair(w, t)).
Name slice(Name w, SliceKind kind, Nat fixed = 0);

// C(x̄) ≠ 0 ? A(x̄) : B(x̄), evaluating only the chosen branch.
Name cond(Name test, Name then_name, Name else_name);
// Σ_{w ≤ F(x̄)} G(x̄, w)
Name bsum(Name bound, Name body);
// Least-witness scan: with U(w) = 1 ∸ Σ_{u≤w} T(x̄, u), the value Σ_{w≤s} U(w)
// at the first s < |τ| where it drops below s.
Name least(Name matrix);
Name empty_name(std::size_t arity);
// Placeholder for the unary witness parameter of a template.
Name hole();

bool is_hole(const Name& n);
bool mentions_hole(const Name& n);
Name substitute_hole(const Name& n, const Name& witness);

bool same_name(const Name& a, const Name& b);

Name parse_name(const SExpr& e);
Name parse_name(std::string_view text);

}  // namespace fsm
