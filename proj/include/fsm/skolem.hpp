#pragma once

#include <string>
#include <vector>

#include "fsm/formula.hpp"
#include "fsm/names.hpp"

namespace fsm {

// Name of arity k computing the argument in a context of k variables (outermost first).
Name compile_arg(const Arg& a, std::size_t k);
// Name T_φ of arity k with T_φ = 0 exactly where the bounded formula holds.
Name compile_bounded(const Fm& phi, std::size_t k);
Name compile_bounded(const Fm& phi);

// Formula over the unary placeholder (hole); every use of the parameter is an
// application of a slice chain ending in the hole.
struct Template {
  Fm body;
  std::vector<std::string> trace;  // one line per rule application
};

Template skolemize(const Fm& theta);
Template herbrandize(const Fm& theta);
Fm instantiate(const Template& t, const Name& witness);

// ∀u ψ(v̄, u) with every positive universal of the input bounded by u.
struct Pi1Form {
  Fm matrix;             // bounded; context = free variables of the input, then u
  Name compiled;         // T_ψ, arity free_vars + 1
  std::size_t free_vars = 0;
};

// Input must be desugared with unbounded ∀ only in positive position.
Pi1Form pi1_normal_form(const Fm& f);
Pi1Form pi1_normal_form(const Fm& f, std::size_t free_vars);
Pi1Form pi1_normal_form(const Template& t);

struct WitnessPair {
  Name skolem;    // W_S(v̄, t)
  Name herbrand;  // W_H(v̄, t)
};

// All witness names have arity k + 1, the extra argument being t.
WitnessPair witness_bounded(const Fm& theta, std::size_t k);
// ∀w θ with θ bounded.
Name witness_pi1(const Fm& phi, std::size_t k);
// ∃w θ with θ bounded, in sugared or desugared (¬∀w¬θ) form.
Name witness_sigma1(const Fm& phi, std::size_t k);

}  // namespace fsm
