#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "fsm/core.hpp"
#include "fsm/names.hpp"
#include "fsm/sexpr.hpp"

namespace fsm {

// Argument of a name: a de Bruijn variable, a literal, or a nested application.
struct Arg {
  enum class Kind { Var, Lit, App };
  Kind kind = Kind::Lit;
  Nat value = 0;  // Var index or literal
  Name name;      // App
  std::vector<Arg> args;

  static Arg var(Nat i) { return {Kind::Var, i, nullptr, {}}; }
  static Arg lit(Nat v) { return {Kind::Lit, v, nullptr, {}}; }
  static Arg app(Name f, std::vector<Arg> args);
};

bool same_arg(const Arg& a, const Arg& b);

class Formula;
using Fm = std::shared_ptr<const Formula>;

class Formula {
 public:
  enum class Kind { Atom, Not, And, Forall, BForall, Or, Implies, Iff, Exists };

  Kind kind = Kind::Atom;
  Arg lhs, rhs;           // Atom: both sides are applications
  std::vector<Fm> kids;   // connective operands / binder body
  std::string hint;       // binder display name
  Arg bound;              // BForall: the bound as an application in the outer context
  bool implicit_bound_args = false;

  bool is_binder() const { return kind == Kind::Forall || kind == Kind::Exists || kind == Kind::BForall; }
  const Fm& body() const { return kids.front(); }
};

Fm atom(Arg lhs, Arg rhs);
Fm atom(Name f, std::vector<Arg> args, Name g, std::vector<Arg> gargs);
Fm f_not(Fm a);
Fm f_and(Fm a, Fm b);
Fm f_or(Fm a, Fm b);
Fm f_implies(Fm a, Fm b);
Fm f_iff(Fm a, Fm b);
Fm forall(std::string hint, Fm body);
Fm exists(std::string hint, Fm body);
// ∀v ≤ bound (body); bound lives in the enclosing context.
Fm ball(std::string hint, Arg bound, Fm body);

// Parse with the given free variables (outermost first) in scope.
Fm parse_formula(const SExpr& e, const std::vector<std::string>& context = {});
Fm parse_formula(std::string_view text, const std::vector<std::string>& context = {});
std::string print(const Fm& f, const std::vector<std::string>& context = {});
// Hint-independent rendering; equal strings ⟺ equal de Bruijn structure.
std::string print_canonical(const Fm& f, std::size_t free_vars = 0);
bool same_formula(const Fm& a, const Fm& b);

Arg parse_arg(const SExpr& e, const std::vector<std::string>& context);
std::string print_arg(const Arg& a, const std::vector<std::string>& context);

Fm desugar(const Fm& f);
bool is_desugared(const Fm& f);
bool is_bounded(const Fm& f);

enum class SyntClass { Bounded, Pi01, Sigma01, Pi02, Sigma02, Pi03, Other };
const char* to_string(SyntClass c);
SyntClass classify(const Fm& f);

// Number of free variables the formula needs (1 + largest dangling index).
std::size_t free_var_count(const Fm& f);
bool uses_var(const Fm& f, Nat index);

// Free variable indices ≥ cutoff move up by d.
Arg shift_arg(const Arg& a, Nat d, Nat cutoff = 0);
Fm shift(const Fm& f, Nat d, Nat cutoff = 0);
// Replace variable 0 by a (expressed in the context without it); other indices drop by one.
Fm subst_top(const Fm& f, const Arg& a);
// Close the formula: values[0] is the outermost free variable.
Fm instantiate(const Fm& f, const std::vector<Nat>& values);
Fm map_names(const Fm& f, const std::function<Name(const Name&)>& fn);

enum class Truth { True, False, Unknown };
const char* to_string(Truth t);

// env: values of the free variables, outermost first.
std::optional<Nat> eval_arg(const Arg& a, const BitString& oracle, const std::vector<Nat>& env);

// Three-valued reading: unbounded ∀ looks for counterexamples below qbound and is
// declared true only when its body is valid on syntactic grounds.
Truth classical_eval(const Fm& f, const BitString& oracle, Nat qbound, const std::vector<Nat>& env = {});
Truth classical_eval(const Fm& f, const PeriodicSet& g, Nat qbound, std::size_t depth,
                     const std::vector<Nat>& env = {});
// Finite-structure reading: unbounded ∀ ranges over [0, qbound).
Truth finite_eval(const Fm& f, const BitString& oracle, Nat qbound, const std::vector<Nat>& env = {});

// Syntactic validity: reflexive atoms over total names, closed under ∧ and ∀.
bool provably_true(const Fm& f);

}  // namespace fsm
