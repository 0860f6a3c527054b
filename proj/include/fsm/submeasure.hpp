#pragma once

#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "fsm/core.hpp"
#include "fsm/names.hpp"
#include "fsm/sexpr.hpp"

namespace fsm {

class BudgetExceeded : public std::runtime_error {
 public:
  BudgetExceeded(const std::string& what_node, std::size_t size, std::size_t budget)
      : std::runtime_error(what_node + " refuses a set of " + std::to_string(size) +
                           " elements (budget " + std::to_string(budget) + ")"),
        size_(size),
        budget_(budget) {}
  std::size_t size() const { return size_; }
  std::size_t budget() const { return budget_; }

 private:
  std::size_t size_, budget_;
};

// Element caps for the subset dynamic programs; shared by every evaluation.
struct DpBudget {
  std::size_t meet = 16;
  std::size_t mazur = 14;
};
DpBudget dp_budget();
void set_dp_budget(DpBudget b);

// Count of logical evaluation requests since process start.
std::uint64_t eval_counter();

// Closed class given by a decidable, downward closed tree of binary strings.
struct TreeSpec {
  enum class Kind { Subsets, Cylinder, DomEnum, Stab, Pi1Hat, NoConv };

  Kind kind = Kind::Subsets;
  PeriodicSet set = PeriodicSet::nat();  // Subsets: S; Pi1Hat: envelope A
  std::size_t depth = 0;                 // Cylinder
  std::vector<BitString> allowed;        // Cylinder, all of length depth
  GroundFn growth;                       // DomEnum
  Name name;                             // Stab: functional; Pi1Hat: matrix T(y, u); NoConv: F
  FinSet stem;                           // Stab, Pi1Hat, NoConv
  Nat y = 0;                             // Pi1Hat
  std::vector<Nat> args;                 // NoConv

  static TreeSpec subsets(PeriodicSet s);
  static TreeSpec cylinder(std::size_t depth, std::vector<BitString> allowed);
  static TreeSpec domenum(GroundFn f);
  static TreeSpec stab(Name functional, FinSet stem);
  static TreeSpec pi1hat(Name matrix, FinSet stem, Nat y, PeriodicSet envelope);
  static TreeSpec noconv(Name f, FinSet stem, std::vector<Nat> args);

  bool member(const BitString& sigma) const;
  // Is there a τ in the tree with |τ| = max(p)+1 and p ⊆ ones(τ)?  (p nonempty)
  bool covers(const FinSet& p) const;
  // covers() for every subset of x, indexed by selection mask; entry 0 is member(ε).
  // Trees sharing a name may pass one memo of string verdicts.
  std::vector<char> cover_table(const FinSet& x, std::unordered_map<std::string, bool>* memo = nullptr) const;
  std::string print() const;
};

// Strings of length n in tree(stem, C): stem ∩ [0,n) ⊆ ones(τ) ⊆ C.
std::vector<BitString> tree_strings(const FinSet& stem, const FinSet& c, std::size_t n);

class SubNode;
using Sub = std::shared_ptr<const SubNode>;

class SubNode {
 public:
  enum class Kind { Card, Const, Join, Meet, Mazur, IMeet, Dom };

  Kind kind() const { return kind_; }
  Nat constant() const { return n_; }
  const std::vector<Sub>& kids() const { return kids_; }
  const std::vector<TreeSpec>& family() const { return family_; }
  std::size_t depth() const { return static_cast<std::size_t>(n_); }
  const std::string& key() const { return key_; }
  std::size_t id() const { return id_; }
  std::string print() const { return key_; }

 private:
  friend Sub make_sub(SubNode::Kind, Nat, std::vector<Sub>, std::vector<TreeSpec>, GroundFn);
  Kind kind_ = Kind::Card;
  Nat n_ = 0;
  std::vector<Sub> kids_;
  std::vector<TreeSpec> family_;
  GroundFn growth_;
  std::string key_;
  std::size_t id_ = 0;
  std::size_t family_id_ = 0;

  friend class SubEval;
};

Sub card();
Sub const_sub(Nat n);
Sub join(Sub a, Sub b);
Sub meet(Sub a, Sub b);
Sub mazur(std::vector<TreeSpec> family);
// ⋀_{j<N} (μ_j ∨ j), over the first min(N, |subs|) entries.
Sub imeet(std::size_t depth, std::vector<Sub> subs);
// Mazur submeasure of the class of sets whose enumeration dominates f.
Sub dom(GroundFn f);

bool uses_dp(const Sub& mu);

Nat eval(const Sub& mu, const FinSet& x);
// Values on every subset of x, indexed by FinSet::select masks.
std::vector<Nat> eval_table(const Sub& mu, const FinSet& x);

Nat mazur_theta(const std::vector<TreeSpec>& family, const FinSet& x);
Nat mazur_eval(const std::vector<TreeSpec>& family, const FinSet& x);

struct UnboundedVerdict {
  enum class Kind { Witnessed, BoundedSoFar, Unknown };
  Kind kind = Kind::Unknown;
  Nat target = 0;       // Witnessed: s
  FinSet witness;       // Witnessed: b
  Nat horizon = 0;      // BoundedSoFar: n
  Nat value = 0;        // BoundedSoFar: μ(restrict(A, n))
  std::size_t budget = 0;  // Unknown

  bool witnessed() const { return kind == Kind::Witnessed; }
  std::string print() const;
};

UnboundedVerdict unbounded_check(const Sub& mu, const PeriodicSet& a, Nat target, Nat horizon);
// Independent re-check of a Witnessed verdict.
bool verify_witness(const UnboundedVerdict& v, const Sub& mu, const PeriodicSet& a);

struct SplitReport {
  FinSet domain;  // restrict(A, n)
  Nat value = 0;  // min over splits of μ(b) + ν(c)
  Nat meet_value = 0;
  FinSet left, right;
  bool agrees() const { return value == meet_value; }
};

SplitReport fin_generated_check(const Sub& mu, const Sub& nu, const PeriodicSet& a, Nat horizon);

TreeSpec parse_tree(const SExpr& e);
Sub parse_sub(const SExpr& e);
Sub parse_sub(std::string_view text);

}  // namespace fsm
