#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "fsm/core.hpp"
#include "fsm/formula.hpp"
#include "fsm/names.hpp"
#include "fsm/submeasure.hpp"

namespace fsm {

struct ForcingConfig {
  Nat s0 = 4;                 // admission threshold for μ(A) = ∞
  Nat horizon = 64;           // how far envelopes are scanned
  std::size_t depth = 8;      // string length for Π⁰₁ searches
  Nat arg_bound = 4;          // quantifier arguments tried below this
  std::size_t window = 4;     // finite-set windows for b, y, a′
  std::size_t stages = 12;
  std::uint64_t seed = 1;
  std::size_t random_probes = 24;
};

class InvalidCondition : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct Condition {
  FinSet stem;
  PeriodicSet envelope = PeriodicSet::nat();
  Sub mu;
  UnboundedVerdict certificate;  // Witnessed(t ≥ s0, b ⊆ A)

  nlohmann::json to_json() const;
};

// Admits (a, A, μ) when a ⊆ A, A is infinite and unbounded_check finds μ-mass ≥ target on A ∖ a.
std::optional<Condition> try_condition(FinSet a, PeriodicSet A, Sub mu, const ForcingConfig& cfg,
                                       Nat target = 0);
Condition make_condition(FinSet a, PeriodicSet A, Sub mu, const ForcingConfig& cfg);
// Independent re-check of the stored certificate and the stem inclusion.
bool valid(const Condition& c, Nat s0);

bool tree_member(const FinSet& a, const PeriodicSet& A, const BitString& tau);
// Members of tree(a, A) of length ≤ max_len, by length then lexicographic.
std::vector<BitString> tree_enumerate(const FinSet& a, const PeriodicSet& A, std::size_t max_len);

// All subsets of {0,…,9} followed by seeded random sets.
std::vector<FinSet> probe_pool(std::uint64_t seed, std::size_t random_count);

// c2 ≤ c1: a ⊆ b ⊆ A, B ⊆ A, ν ≤ μ on the probe pool, and c2 carries a valid certificate.
bool extends(const Condition& c2, const Condition& c1, const std::vector<FinSet>& probes, Nat s0);
// Additionally ν(b) ≥ s and ν ∧ s = μ ∧ s on the pool.  A stem witness w ⊆ b with
// ν(w) ≥ s stands in for evaluating ν on the whole stem.
bool extends_s(const Condition& c2, const Condition& c1, Nat s, const std::vector<FinSet>& probes, Nat s0,
               const FinSet* stem_witness = nullptr);

struct Verdict {
  enum class Kind { ForcedUpTo, Refuted, Unknown };
  Kind kind = Kind::Unknown;
  std::size_t depth = 0;  // ForcedUpTo
  BitString tau;          // Refuted
  Nat u = 0;              // Refuted: the fresh bound at which the matrix fails
  Nat value = 0;          // Refuted: T_ψ(τ, u)
  std::string reason;     // Unknown

  bool forced() const { return kind == Kind::ForcedUpTo; }
  bool refuted() const { return kind == Kind::Refuted; }
  nlohmann::json to_json() const;
};

// φ closed and Π⁰₁-shaped.  μ plays no role in the matrix search.
Verdict pi1_forces(const FinSet& a, const PeriodicSet& A, const Fm& phi, std::size_t depth, Nat arg_bound);
Verdict pi1_forces(const Condition& c, const Fm& phi, std::size_t depth, Nat arg_bound);
bool verify_refutation(const FinSet& a, const PeriodicSet& A, const Fm& phi, const Verdict& v);

// ---------------------------------------------------------------- locality

Sub locality_submeasure(const Name& f, const FinSet& b, Nat arg_bound);

struct LocalizeResult {
  enum class Kind { Localized, DomainKilled, Unknown };
  Kind kind = Kind::Unknown;
  Condition condition;     // Localized: (a, A, μ ∧ ϑ); DomainKilled: (b, A, μ)
  FinSet stem;             // DomainKilled: b
  std::vector<Nat> args;   // DomainKilled: x̄ with F(x̄) undefined on tree(b, A) to depth
  std::string reason;
};

LocalizeResult localize(const Condition& c, const Name& f, const ForcingConfig& cfg);

// ---------------------------------------------------------------- Π⁰₂ decisions

// Mazur submeasure over PI1HAT trees: stems b from `stems`, y < y_window.
// `family` has exactly one free variable (the y slot) and is Π⁰₁ in it.
Sub lambda_submeasure(const std::vector<FinSet>& stems, const Fm& family, const PeriodicSet& envelope,
                      Nat y_window);
Sub lambda_submeasure(const FinSet& a, const Fm& family, const PeriodicSet& envelope, Nat y_window);

struct DecisionReport {
  enum class Kind { Exists, ForallNot, Unknown };
  Kind kind = Kind::Unknown;
  Condition condition;                // the extension carrying the certificate
  // Exists: (b, B) with (b, B, μ) ⊩ φ(y) to depth
  FinSet b;
  Nat y = 0;
  Verdict forced;
  // ForallNot: ρ-meet witness plus one refutation of φ(w) per w < arg_bound
  Sub rho;
  std::vector<Verdict> sweep;
  std::string reason;

  nlohmann::json to_json() const;
};

// Candidate stems a ∪ s for s ⊆ the first `window` elements of A beyond a, by size then lex.
std::vector<FinSet> stem_window(const FinSet& a, const PeriodicSet& A, std::size_t window, std::size_t max_count);

DecisionReport pi2_decide(const Condition& c, const Fm& family, const ForcingConfig& cfg);
// Re-derives the branch certificate from scratch.
bool verify_decision(const Condition& c, const Fm& family, const DecisionReport& r, const ForcingConfig& cfg);

struct ApproxResult {
  bool found = false;
  Nat y = 0;
  FinSet removed;  // a′
  Condition condition;
  Verdict forced;
};

// ∃w φ(w) with φ Π⁰₁; formulas without a leading ∃ are read with a vacuous w.
ApproxResult approx_forces(const Condition& c, const Fm& phi, const ForcingConfig& cfg);

// ---------------------------------------------------------------- Σ⁰₂ witness

// F(x̄): the y of the first (σ, y) in the stage order with σ ⊆ τ and
// (a ∪ ones(σ), A − zeros(σ)) ⊩ φ(x̄, y) to depth |τ|.  φ has k + 1 free variables, y innermost.
Name sigma2_witness(const FinSet& a, const PeriodicSet& A, const Fm& phi, std::size_t k);

// ---------------------------------------------------------------- fusion

struct StageRecord {
  std::size_t stage = 0;
  std::string kind;  // case taken
  Condition condition;
  FinSet stem_witness;  // b ⊆ a_{s+1} with ν(b) ≥ s + 1
  Nat stem_value = 0;
  nlohmann::json certificate;
  std::uint64_t evals = 0;
};

struct FusionState {
  std::vector<StageRecord> history;  // history[0] is the initial condition
  bool aborted = false;
  std::string abort_reason;

  const Condition& current() const { return history.back().condition; }
  // Stage-S truncated limit: the meet of every μ_s in the history.
  Sub mu_so_far() const;
  FinSet a_so_far() const;
};

class StageAborted : public std::runtime_error {
 public:
  StageAborted(std::size_t stage, const std::string& reason)
      : std::runtime_error("stage " + std::to_string(stage) + " aborted: " + reason), stage_(stage) {}
  std::size_t stage() const { return stage_; }

 private:
  std::size_t stage_;
};

struct StagePlan {
  std::optional<Sub> lambda;  // none: the stage only grows the stem
  std::string label;
  // Bounded case: choose a new envelope below the current one.
  std::function<std::optional<PeriodicSet>(const Condition&)> shrink;
};

using FusionHandler = std::function<StagePlan(std::size_t stage, const Condition&)>;

// Runs the three-case stage template.  Never throws StageAborted; the state records it.
FusionState fusion_run(const Condition& initial, const FusionHandler& handler, const ForcingConfig& cfg);
// ≤_s clauses for every consecutive pair.
bool verify_fusion(const FusionState& st, const ForcingConfig& cfg);

struct ConeCheck {
  std::size_t stage = 0;
  std::size_t functional = 0;
  FinSet b;
  bool folded = false;         // κ went into μ
  PeriodicSet envelope = PeriodicSet::nat();  // C when not folded; the stem is added back separately
};

struct ConeReport {
  FusionState state;
  std::vector<ConeCheck> checks;
};

ConeReport cone_run(const std::vector<Name>& functionals, const ForcingConfig& cfg);
// Every τ1, τ2 ∈ tree(b, C ∪ b) of length depth with defined outputs at x < depth agree.
bool stabilizes(const Name& functional, const FinSet& b, const PeriodicSet& c, std::size_t depth);

// ---------------------------------------------------------------- generic construction

struct Requirement {
  enum class Kind { MeasureAtLeast, DecideSet, Pi2, AvoidDominating };
  Kind kind = Kind::MeasureAtLeast;
  Nat target = 0;
  PeriodicSet set = PeriodicSet::nat();
  Fm family;
  GroundFn growth;
  std::string label;

  static Requirement measure_at_least(Nat s);
  static Requirement decide_set(PeriodicSet r, std::string label = "");
  static Requirement pi2(Fm family, std::string label = "");
  static Requirement avoid_dominating(GroundFn f, std::string label = "");
};

struct SetDecision {
  std::string label;
  PeriodicSet set = PeriodicSet::nat();
  bool inside = false;  // A ⊆ R ∪ stem after deciding; otherwise A ∩ R ⊆ stem
  std::size_t stage = 0;
  // |restrict(G_s ∖ R)| (inside) or |restrict(G_s ∩ R)| (outside) at every later stage
  std::vector<std::size_t> off_side_counts;
};

struct GenericApprox {
  FusionState state;
  std::vector<SetDecision> decisions;
  std::vector<nlohmann::json> log;
};

GenericApprox generic_build(const Condition& initial, const std::vector<Requirement>& reqs, const ForcingConfig& cfg);

}  // namespace fsm
