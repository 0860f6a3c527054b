#include "fsm/skolem.hpp"

#include <stdexcept>

namespace fsm {

namespace {

std::vector<std::string> param_names(std::size_t k) {
  std::vector<std::string> ps;
  for (std::size_t i = 0; i < k; ++i) ps.push_back("x" + std::to_string(i));
  return ps;
}

// Ground term over k parameters.
Name term_name(std::size_t k, Term t) { return canonical_term(param_names(k), std::move(t)); }

Name binary(Term t) { return canonical_term({"a", "b"}, std::move(t)); }

Name absdiff_name() { return binary(Term::absdiff(Term::var(0), Term::var(1))); }
Name plus_name() { return binary(Term::add(Term::var(0), Term::var(1))); }
Name one_minus_name() { return canonical_term({"z"}, Term::sub(Term::constant(1), Term::var(0))); }
// Nonzero iff a ≤ b.
Name le_name() { return binary(Term::sub(Term::constant(1), Term::sub(Term::var(0), Term::var(1)))); }

std::vector<Name> projections(std::size_t arity, std::size_t count) {
  std::vector<Name> out;
  for (std::size_t i = 0; i < count; ++i) out.push_back(projection(arity, i));
  return out;
}

// N of arity k seen as a name of arity k+1 that ignores the last argument.
Name widen(const Name& n, std::size_t k) {
  if (k == 0) return lift(1, n);
  return superpose(n, projections(k + 1, k));
}

// N(x_0, …, x_{k-1}, extra…) as a name of arity `arity`.
Name with_prefix(const Name& n, std::size_t arity, std::size_t k, std::vector<Name> extra) {
  std::vector<Name> args = projections(arity, k);
  for (auto& e : extra) args.push_back(std::move(e));
  return superpose(n, std::move(args));
}

}  // namespace

Name compile_arg(const Arg& a, std::size_t k) {
  switch (a.kind) {
    case Arg::Kind::Var:
      if (a.value >= k) throw std::out_of_range("variable outside the compilation context");
      return projection(k, k - 1 - a.value);
    case Arg::Kind::Lit:
      return constant_name(k, a.value);
    case Arg::Kind::App: {
      if (a.args.empty()) return k == 0 ? a.name : lift(k, a.name);
      std::vector<Name> inner;
      for (const auto& x : a.args) inner.push_back(compile_arg(x, k));
      if (k == 0) return superpose(a.name, std::move(inner));
      return superpose(a.name, std::move(inner));
    }
  }
  return nullptr;
}

Name compile_bounded(const Fm& phi, std::size_t k) {
  switch (phi->kind) {
    case Formula::Kind::Atom:
      return superpose(absdiff_name(), {compile_arg(phi->lhs, k), compile_arg(phi->rhs, k)});
    case Formula::Kind::Not:
      return superpose(one_minus_name(), {compile_bounded(phi->kids[0], k)});
    case Formula::Kind::And:
      return superpose(plus_name(), {compile_bounded(phi->kids[0], k), compile_bounded(phi->kids[1], k)});
    case Formula::Kind::BForall:
      return bsum(compile_arg(phi->bound, k), compile_bounded(phi->kids[0], k + 1));
    case Formula::Kind::Forall:
      throw std::invalid_argument("compile_bounded: formula has an unbounded universal quantifier");
    default:
      return compile_bounded(desugar(phi), k);
  }
}

Name compile_bounded(const Fm& phi) { return compile_bounded(phi, free_var_count(phi)); }

// ------------------------------------------------------------ templates

namespace {

// The parameter as seen at the current position: N applied to params, then t.
struct HoleExpr {
  Name n;
  std::vector<Arg> params;
};

HoleExpr shifted(const HoleExpr& h, Name n, bool add_top) {
  HoleExpr out;
  out.n = std::move(n);
  for (const auto& p : h.params) out.params.push_back(shift_arg(p, 1));
  if (add_top) out.params.push_back(Arg::var(0));
  return out;
}

Arg head_of(const HoleExpr& h) { return Arg::app(slice(h.n, SliceKind::Head), h.params); }

class Builder {
 public:
  std::vector<std::string> trace;

  Fm s(const Fm& f, const HoleExpr& h, int depth) {
    switch (f->kind) {
      case Formula::Kind::Atom:
        log(depth, "S atom: unchanged");
        return f;
      case Formula::Kind::Not:
        log(depth, "S not: negate the H-form of the operand");
        return f_not(this->h(f->kids[0], h, depth + 1));
      case Formula::Kind::And: {
        log(depth, "S and: left gets W(2t), right gets W(2t+1)");
        Fm a = s(f->kids[0], {slice(h.n, SliceKind::Even), h.params}, depth + 1);
        Fm b = s(f->kids[1], {slice(h.n, SliceKind::Odd), h.params}, depth + 1);
        return f_and(a, b);
      }
      case Formula::Kind::Forall: {
        log(depth, "S forall " + f->hint + ": keep the quantifier, body gets W(<" + f->hint + ",t>)");
        return forall(f->hint, s(f->kids[0], shifted(h, slice(h.n, SliceKind::PairVar), true), depth + 1));
      }
      case Formula::Kind::BForall: {
        log(depth, "S bounded forall " + f->hint + ": keep the bound, body gets W(<" + f->hint + ",2t>)");
        Name n = slice(slice(h.n, SliceKind::PairVar), SliceKind::Even);
        Formula out = *f;
        out.kids = {s(f->kids[0], shifted(h, n, true), depth + 1)};
        return std::make_shared<const Formula>(std::move(out));
      }
      default:
        log(depth, "S sugar: desugar first");
        return s(desugar(f), h, depth);
    }
  }

  Fm h(const Fm& f, const HoleExpr& hx, int depth) {
    switch (f->kind) {
      case Formula::Kind::Atom:
        log(depth, "H atom: unchanged");
        return f;
      case Formula::Kind::Not:
        log(depth, "H not: negate the S-form of the operand");
        return f_not(s(f->kids[0], hx, depth + 1));
      case Formula::Kind::And: {
        log(depth, "H and: both sides share W");
        Fm a = h(f->kids[0], hx, depth + 1);
        Fm b = h(f->kids[1], hx, depth + 1);
        return f_and(a, b);
      }
      case Formula::Kind::Forall: {
        log(depth, "H forall " + f->hint + ": body gets W(t+1), " + f->hint + " := W(0)");
        Fm body = h(f->kids[0], shifted(hx, slice(hx.n, SliceKind::Shift), false), depth + 1);
        return subst_top(body, head_of(hx));
      }
      case Formula::Kind::BForall: {
        log(depth, "H bounded forall " + f->hint + ": W(0) <= bound implies body with W(t+1), " + f->hint +
                       " := W(0)");
        Arg w0 = head_of(hx);
        Fm body = h(f->kids[0], shifted(hx, slice(hx.n, SliceKind::Shift), false), depth + 1);
        Fm inside = atom(Arg::app(binary(Term::sub(Term::var(0), Term::var(1))), {w0, f->bound}),
                         Arg::app(constant_name(0, 0), {}));
        return f_not(f_and(inside, f_not(subst_top(body, w0))));
      }
      default:
        log(depth, "H sugar: desugar first");
        return h(desugar(f), hx, depth);
    }
  }

 private:
  void log(int depth, const std::string& line) { trace.push_back(std::string(2 * depth, ' ') + line); }
};

}  // namespace

Template skolemize(const Fm& theta) {
  Builder b;
  Fm body = b.s(theta, {hole(), {}}, 0);
  return {body, b.trace};
}

Template herbrandize(const Fm& theta) {
  Builder b;
  Fm body = b.h(theta, {hole(), {}}, 0);
  return {body, b.trace};
}

Fm instantiate(const Template& t, const Name& witness) {
  if (witness->arity() != 1) throw ArityError("witness must be unary, got " + witness->print());
  return map_names(t.body, [&](const Name& n) { return substitute_hole(n, witness); });
}

// ------------------------------------------------------------ Π⁰₁ normal form

namespace {

Fm bound_universals(const Fm& f, Nat u_index, bool positive) {
  static const Name id = canonical_term({"u"}, Term::var(0));
  switch (f->kind) {
    case Formula::Kind::Atom:
      return f;
    case Formula::Kind::Not:
      return f_not(bound_universals(f->kids[0], u_index, !positive));
    case Formula::Kind::And:
      return f_and(bound_universals(f->kids[0], u_index, positive), bound_universals(f->kids[1], u_index, positive));
    case Formula::Kind::Forall:
      if (!positive) throw std::invalid_argument("unbounded universal in negative position; not a Pi01 shape");
      return ball(f->hint, Arg::app(id, {Arg::var(u_index)}), bound_universals(f->kids[0], u_index + 1, positive));
    case Formula::Kind::BForall: {
      Formula out = *f;
      out.kids = {bound_universals(f->kids[0], u_index + 1, positive)};
      return std::make_shared<const Formula>(std::move(out));
    }
    default:
      return bound_universals(desugar(f), u_index, positive);
  }
}

}  // namespace

Pi1Form pi1_normal_form(const Fm& f) { return pi1_normal_form(f, free_var_count(f)); }

Pi1Form pi1_normal_form(const Fm& f, std::size_t free_vars) {
  if (free_var_count(f) > free_vars) throw std::invalid_argument("pi1_normal_form: formula has more free variables than the context");
  Pi1Form out;
  out.free_vars = free_vars;
  out.matrix = bound_universals(shift(f, 1, 0), 0, true);
  out.compiled = compile_bounded(out.matrix, out.free_vars + 1);
  return out;
}

Pi1Form pi1_normal_form(const Template& t) { return pi1_normal_form(t.body); }

// ------------------------------------------------------------ witness names

WitnessPair witness_bounded(const Fm& theta, std::size_t k) {
  const std::size_t a = k + 1;  // arity of the witnesses
  const Name zero = constant_name(a, 0);
  const Name t = projection(a, k);
  switch (theta->kind) {
    case Formula::Kind::Atom:
      return {zero, zero};
    case Formula::Kind::Not: {
      WitnessPair w = witness_bounded(theta->kids[0], k);
      return {w.herbrand, w.skolem};
    }
    case Formula::Kind::And: {
      WitnessPair l = witness_bounded(theta->kids[0], k);
      WitnessPair r = witness_bounded(theta->kids[1], k);
      Name half_t = term_name(a, Term::half(Term::var(k)));
      Name odd_t = term_name(a, Term::sub(Term::var(k), Term::mul(Term::constant(2), Term::half(Term::var(k)))));
      Name sk = cond(odd_t, with_prefix(r.skolem, a, k, {half_t}), with_prefix(l.skolem, a, k, {half_t}));
      Name hb = cond(widen(compile_bounded(theta->kids[0], k), k), l.herbrand, r.herbrand);
      return {sk, hb};
    }
    case Formula::Kind::BForall: {
      const Fm& body = theta->kids[0];
      WitnessPair in = witness_bounded(body, k + 1);  // arity k + 2
      Name bound_k = compile_arg(theta->bound, k);
      Name bound_a = compile_arg(shift_arg(theta->bound, 1), a);

      Name fst_t = term_name(a, Term::first(Term::var(k)));
      Name half_snd_t = term_name(a, Term::half(Term::second(Term::var(k))));
      Name sk = cond(superpose(le_name(), {fst_t, bound_a}), with_prefix(in.skolem, a, k, {fst_t, half_snd_t}), zero);

      // U(v̄, w) = 1 ∸ Σ_{u≤w} T_φ(v̄, u)
      Name t_body = compile_bounded(body, k + 1);
      Name t_at_u = with_prefix(t_body, k + 2, k, {projection(k + 2, k + 1)});
      Name prefix_sum = bsum(projection(k + 1, k), t_at_u);
      Name u = superpose(one_minus_name(), {prefix_sum});
      Name h0 = bsum(bound_k, u);  // arity k
      Name h0_a = widen(h0, k);
      Name t_minus_1 = term_name(a, Term::sub(Term::var(k), Term::constant(1)));
      Name later = cond(superpose(le_name(), {h0_a, bound_a}), with_prefix(in.herbrand, a, k, {h0_a, t_minus_1}), zero);
      Name hb = cond(t, later, h0_a);
      return {sk, hb};
    }
    case Formula::Kind::Forall:
      throw std::invalid_argument("witness_bounded: formula has an unbounded universal quantifier");
    default:
      return witness_bounded(desugar(theta), k);
  }
}

Name witness_pi1(const Fm& phi, std::size_t k) {
  Fm f = desugar(phi);
  if (f->kind != Formula::Kind::Forall || !is_bounded(f->kids[0]))
    throw std::invalid_argument("witness_pi1 expects a universal quantifier over a bounded matrix");
  const std::size_t a = k + 1;
  Name inner = witness_bounded(f->kids[0], k + 1).skolem;
  return with_prefix(inner, a, k,
                     {term_name(a, Term::first(Term::var(k))), term_name(a, Term::second(Term::var(k)))});
}

Name witness_sigma1(const Fm& phi, std::size_t k) {
  Fm theta;
  if (phi->kind == Formula::Kind::Exists) {
    theta = desugar(phi->kids[0]);
  } else {
    Fm f = desugar(phi);
    if (f->kind == Formula::Kind::Not && f->kids[0]->kind == Formula::Kind::Forall &&
        f->kids[0]->kids[0]->kind == Formula::Kind::Not)
      theta = f->kids[0]->kids[0]->kids[0];
  }
  if (!theta || !is_bounded(theta))
    throw std::invalid_argument("witness_sigma1 expects an existential quantifier over a bounded matrix");
  const std::size_t a = k + 1;
  Name first = least(compile_bounded(f_not(theta), k + 1));  // arity k
  Name first_a = widen(first, k);
  Name inner = witness_bounded(theta, k + 1).skolem;  // arity k + 2
  Name t_minus_1 = term_name(a, Term::sub(Term::var(k), Term::constant(1)));
  return cond(projection(a, k), with_prefix(inner, a, k, {first_a, t_minus_1}), first_a);
}

}  // namespace fsm
