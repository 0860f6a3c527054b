#include "fsm/formula.hpp"

#include <algorithm>

namespace fsm {

Arg Arg::app(Name f, std::vector<Arg> args) {
  if (f->arity() != args.size())
    throw ArityError("name " + f->print() + " has arity " + std::to_string(f->arity()) + " but is applied to " +
                     std::to_string(args.size()) + " argument(s)");
  Arg a;
  a.kind = Kind::App;
  a.name = std::move(f);
  a.args = std::move(args);
  return a;
}

bool same_arg(const Arg& a, const Arg& b) {
  if (a.kind != b.kind) return false;
  if (a.kind != Arg::Kind::App) return a.value == b.value;
  if (a.args.size() != b.args.size() || !same_name(a.name, b.name)) return false;
  for (std::size_t i = 0; i < a.args.size(); ++i)
    if (!same_arg(a.args[i], b.args[i])) return false;
  return true;
}

// ------------------------------------------------------------ constructors

namespace {

Fm make(Formula f) { return std::make_shared<const Formula>(std::move(f)); }

Fm node(Formula::Kind k, std::vector<Fm> kids, std::string hint = {}) {
  Formula f;
  f.kind = k;
  f.kids = std::move(kids);
  f.hint = std::move(hint);
  return make(std::move(f));
}

}  // namespace

Fm atom(Arg lhs, Arg rhs) {
  if (lhs.kind != Arg::Kind::App || rhs.kind != Arg::Kind::App)
    throw std::invalid_argument("atom sides must be name applications");
  Formula f;
  f.kind = Formula::Kind::Atom;
  f.lhs = std::move(lhs);
  f.rhs = std::move(rhs);
  return make(std::move(f));
}

Fm atom(Name f, std::vector<Arg> args, Name g, std::vector<Arg> gargs) {
  return atom(Arg::app(std::move(f), std::move(args)), Arg::app(std::move(g), std::move(gargs)));
}

Fm f_not(Fm a) { return node(Formula::Kind::Not, {std::move(a)}); }
Fm f_and(Fm a, Fm b) { return node(Formula::Kind::And, {std::move(a), std::move(b)}); }
Fm f_or(Fm a, Fm b) { return node(Formula::Kind::Or, {std::move(a), std::move(b)}); }
Fm f_implies(Fm a, Fm b) { return node(Formula::Kind::Implies, {std::move(a), std::move(b)}); }
Fm f_iff(Fm a, Fm b) { return node(Formula::Kind::Iff, {std::move(a), std::move(b)}); }
Fm forall(std::string hint, Fm body) { return node(Formula::Kind::Forall, {std::move(body)}, std::move(hint)); }
Fm exists(std::string hint, Fm body) { return node(Formula::Kind::Exists, {std::move(body)}, std::move(hint)); }

Fm ball(std::string hint, Arg bound, Fm body) {
  if (bound.kind != Arg::Kind::App) throw std::invalid_argument("bounded quantifier needs a name application as bound");
  Formula f;
  f.kind = Formula::Kind::BForall;
  f.kids = {std::move(body)};
  f.hint = std::move(hint);
  f.bound = std::move(bound);
  return make(std::move(f));
}

// ------------------------------------------------------------ parsing

namespace {

Nat lookup(const SExpr& e, const std::vector<std::string>& ctx) {
  for (std::size_t i = ctx.size(); i-- > 0;)
    if (ctx[i] == e.text) return ctx.size() - 1 - i;
  fail_at(e, "unbound variable '" + e.text + "'");
}

std::vector<Arg> parse_args(const SExpr& list, const std::vector<std::string>& ctx) {
  if (!list.is_list()) fail_at(list, "expected an argument list");
  std::vector<Arg> out;
  for (const auto& a : list.items) out.push_back(parse_arg(a, ctx));
  return out;
}

Arg apply(const SExpr& where, Name f, std::vector<Arg> args) {
  try {
    return Arg::app(std::move(f), std::move(args));
  } catch (const ArityError& ex) {
    fail_at(where, ex.what());
  }
}

bool is_keyword(const std::string& s) {
  static const char* kw[] = {"atom", "not", "and", "or", "implies", "iff", "forall", "exists", "ball", "@"};
  return std::find(std::begin(kw), std::end(kw), s) != std::end(kw);
}

Fm parse_in(const SExpr& e, std::vector<std::string>& ctx) {
  std::string_view h = e.head();
  if (h == "atom") {
    expect_arity(e, 4);
    Arg l = apply(e, parse_name(e.items[1]), parse_args(e.items[2], ctx));
    Arg r = apply(e, parse_name(e.items[3]), parse_args(e.items[4], ctx));
    return atom(std::move(l), std::move(r));
  }
  if (h == "not") {
    expect_arity(e, 1);
    return f_not(parse_in(e.items[1], ctx));
  }
  if (h == "and" || h == "or" || h == "implies" || h == "iff") {
    expect_arity(e, 2);
    Fm a = parse_in(e.items[1], ctx);
    Fm b = parse_in(e.items[2], ctx);
    if (h == "and") return f_and(a, b);
    if (h == "or") return f_or(a, b);
    if (h == "implies") return f_implies(a, b);
    return f_iff(a, b);
  }
  if (h == "forall" || h == "exists") {
    expect_arity(e, 2);
    const std::string& v = expect_symbol(e.items[1]);
    if (is_keyword(v)) fail_at(e.items[1], "reserved word used as variable");
    ctx.push_back(v);
    Fm body = parse_in(e.items[2], ctx);
    ctx.pop_back();
    return h == "forall" ? forall(v, body) : exists(v, body);
  }
  if (h == "ball") {
    if (e.items.size() != 4 && e.items.size() != 5) fail_at(e, "expected (ball v F (args) φ)");
    const std::string& v = expect_symbol(e.items[1]);
    if (is_keyword(v)) fail_at(e.items[1], "reserved word used as variable");
    Name f = parse_name(e.items[2]);
    bool implicit = e.items.size() == 4;
    std::vector<Arg> args;
    if (implicit) {
      for (std::size_t p = 0; p < ctx.size(); ++p) args.push_back(Arg::var(ctx.size() - 1 - p));
    } else {
      args = parse_args(e.items[3], ctx);
    }
    Arg bound = apply(e, f, std::move(args));
    ctx.push_back(v);
    Fm body = parse_in(e.items.back(), ctx);
    ctx.pop_back();
    Formula out = *ball(v, std::move(bound), body);
    out.implicit_bound_args = implicit;
    return make(std::move(out));
  }
  fail_at(e, "unknown formula form");
}

std::string fresh(const std::string& hint, const std::vector<std::string>& ctx) {
  std::string base = hint.empty() ? "v" : hint;
  std::string s = base;
  for (std::size_t k = ctx.size(); std::find(ctx.begin(), ctx.end(), s) != ctx.end(); ++k)
    s = base + "_" + std::to_string(k);
  return s;
}

std::string print_in(const Fm& f, std::vector<std::string>& ctx, bool canonical_names) {
  auto bind = [&](const std::string& hint) {
    return canonical_names ? "_" + std::to_string(ctx.size()) : fresh(hint, ctx);
  };
  auto args_of = [&](const Arg& a) {
    std::string s = "(";
    for (std::size_t i = 0; i < a.args.size(); ++i) s += (i ? " " : "") + print_arg(a.args[i], ctx);
    return s + ")";
  };
  switch (f->kind) {
    case Formula::Kind::Atom:
      return "(atom " + f->lhs.name->print() + " " + args_of(f->lhs) + " " + f->rhs.name->print() + " " +
             args_of(f->rhs) + ")";
    case Formula::Kind::Not:
      return "(not " + print_in(f->kids[0], ctx, canonical_names) + ")";
    case Formula::Kind::And:
    case Formula::Kind::Or:
    case Formula::Kind::Implies:
    case Formula::Kind::Iff: {
      const char* h = f->kind == Formula::Kind::And ? "and"
                      : f->kind == Formula::Kind::Or ? "or"
                      : f->kind == Formula::Kind::Implies ? "implies"
                                                          : "iff";
      std::string a = print_in(f->kids[0], ctx, canonical_names);
      std::string b = print_in(f->kids[1], ctx, canonical_names);
      return std::string("(") + h + " " + a + " " + b + ")";
    }
    case Formula::Kind::Forall:
    case Formula::Kind::Exists: {
      std::string v = bind(f->hint);
      ctx.push_back(v);
      std::string body = print_in(f->kids[0], ctx, canonical_names);
      ctx.pop_back();
      return std::string(f->kind == Formula::Kind::Forall ? "(forall " : "(exists ") + v + " " + body + ")";
    }
    case Formula::Kind::BForall: {
      bool implicit = f->implicit_bound_args && !canonical_names && f->bound.args.size() == ctx.size();
      for (std::size_t p = 0; implicit && p < ctx.size(); ++p)
        implicit = f->bound.args[p].kind == Arg::Kind::Var && f->bound.args[p].value == ctx.size() - 1 - p;
      std::string bound = f->bound.name->print() + (implicit ? "" : " " + args_of(f->bound));
      std::string v = bind(f->hint);
      ctx.push_back(v);
      std::string body = print_in(f->kids[0], ctx, canonical_names);
      ctx.pop_back();
      return "(ball " + v + " " + bound + " " + body + ")";
    }
  }
  return {};
}

}  // namespace

Arg parse_arg(const SExpr& e, const std::vector<std::string>& ctx) {
  if (e.is_number()) return Arg::lit(e.number);
  if (e.is_symbol()) return Arg::var(lookup(e, ctx));
  if (e.head() == "@") {
    if (e.items.size() < 2) fail_at(e, "expected (@ F args…)");
    std::vector<Arg> args;
    for (std::size_t i = 2; i < e.items.size(); ++i) args.push_back(parse_arg(e.items[i], ctx));
    return apply(e, parse_name(e.items[1]), std::move(args));
  }
  fail_at(e, "malformed argument");
}

std::string print_arg(const Arg& a, const std::vector<std::string>& ctx) {
  switch (a.kind) {
    case Arg::Kind::Lit:
      return std::to_string(a.value);
    case Arg::Kind::Var:
      return a.value < ctx.size() ? ctx[ctx.size() - 1 - a.value] : "#" + std::to_string(a.value);
    case Arg::Kind::App: {
      std::string s = "(@ " + a.name->print();
      for (const auto& x : a.args) s += " " + print_arg(x, ctx);
      return s + ")";
    }
  }
  return {};
}

Fm parse_formula(const SExpr& e, const std::vector<std::string>& context) {
  std::vector<std::string> ctx = context;
  return parse_in(e, ctx);
}

Fm parse_formula(std::string_view text, const std::vector<std::string>& context) {
  return parse_formula(parse_sexpr(text), context);
}

std::string print(const Fm& f, const std::vector<std::string>& context) {
  std::vector<std::string> ctx = context;
  return print_in(f, ctx, false);
}

std::string print_canonical(const Fm& f, std::size_t free_vars) {
  std::vector<std::string> ctx;
  for (std::size_t i = 0; i < free_vars; ++i) ctx.push_back("_f" + std::to_string(i));
  return print_in(f, ctx, true);
}

bool same_formula(const Fm& a, const Fm& b) {
  std::size_t n = std::max(free_var_count(a), free_var_count(b));
  return print_canonical(a, n) == print_canonical(b, n);
}

// ------------------------------------------------------------ syntax

Fm desugar(const Fm& f) {
  switch (f->kind) {
    case Formula::Kind::Atom:
      return f;
    case Formula::Kind::Not:
      return f_not(desugar(f->kids[0]));
    case Formula::Kind::And:
      return f_and(desugar(f->kids[0]), desugar(f->kids[1]));
    case Formula::Kind::Or:
      return f_not(f_and(f_not(desugar(f->kids[0])), f_not(desugar(f->kids[1]))));
    case Formula::Kind::Implies:
      return f_not(f_and(desugar(f->kids[0]), f_not(desugar(f->kids[1]))));
    case Formula::Kind::Iff: {
      Fm a = desugar(f->kids[0]);
      Fm b = desugar(f->kids[1]);
      return f_and(f_not(f_and(a, f_not(b))), f_not(f_and(b, f_not(a))));
    }
    case Formula::Kind::Forall:
      return forall(f->hint, desugar(f->kids[0]));
    case Formula::Kind::Exists:
      return f_not(forall(f->hint, f_not(desugar(f->kids[0]))));
    case Formula::Kind::BForall: {
      Formula out = *f;
      out.kids = {desugar(f->kids[0])};
      return make(std::move(out));
    }
  }
  return f;
}

bool is_desugared(const Fm& f) {
  switch (f->kind) {
    case Formula::Kind::Or:
    case Formula::Kind::Implies:
    case Formula::Kind::Iff:
    case Formula::Kind::Exists:
      return false;
    default:
      for (const auto& k : f->kids)
        if (!is_desugared(k)) return false;
      return true;
  }
}

bool is_bounded(const Fm& f) {
  if (f->kind == Formula::Kind::Forall || f->kind == Formula::Kind::Exists) return false;
  for (const auto& k : f->kids)
    if (!is_bounded(k)) return false;
  return true;
}

const char* to_string(SyntClass c) {
  switch (c) {
    case SyntClass::Bounded:
      return "bounded";
    case SyntClass::Pi01:
      return "pi01";
    case SyntClass::Sigma01:
      return "sigma01";
    case SyntClass::Pi02:
      return "pi02";
    case SyntClass::Sigma02:
      return "sigma02";
    case SyntClass::Pi03:
      return "pi03";
    case SyntClass::Other:
      return "other";
  }
  return "other";
}

namespace {

int level(SyntClass c) {
  switch (c) {
    case SyntClass::Bounded:
      return 0;
    case SyntClass::Pi01:
    case SyntClass::Sigma01:
      return 1;
    case SyntClass::Pi02:
    case SyntClass::Sigma02:
      return 2;
    case SyntClass::Pi03:
      return 3;
    case SyntClass::Other:
      return 99;
  }
  return 99;
}

SyntClass pi_at(int n) {
  switch (n) {
    case 1:
      return SyntClass::Pi01;
    case 2:
      return SyntClass::Pi02;
    case 3:
      return SyntClass::Pi03;
    default:
      return SyntClass::Other;
  }
}

}  // namespace

SyntClass classify(const Fm& f) {
  switch (f->kind) {
    case Formula::Kind::Atom:
      return SyntClass::Bounded;
    case Formula::Kind::Not:
      switch (classify(f->kids[0])) {
        case SyntClass::Bounded:
          return SyntClass::Bounded;
        case SyntClass::Pi01:
          return SyntClass::Sigma01;
        case SyntClass::Sigma01:
          return SyntClass::Pi01;
        case SyntClass::Pi02:
          return SyntClass::Sigma02;
        case SyntClass::Sigma02:
          return SyntClass::Pi02;
        default:
          return SyntClass::Other;
      }
    case Formula::Kind::And: {
      SyntClass a = classify(f->kids[0]);
      SyntClass b = classify(f->kids[1]);
      if (a == SyntClass::Other || b == SyntClass::Other) return SyntClass::Other;
      if (a == b) return a;
      int la = level(a), lb = level(b);
      if (la != lb) return la > lb ? a : b;
      return pi_at(la + 1);
    }
    case Formula::Kind::Forall:
      switch (classify(f->kids[0])) {
        case SyntClass::Bounded:
        case SyntClass::Pi01:
          return SyntClass::Pi01;
        case SyntClass::Sigma01:
        case SyntClass::Pi02:
          return SyntClass::Pi02;
        case SyntClass::Sigma02:
        case SyntClass::Pi03:
          return SyntClass::Pi03;
        default:
          return SyntClass::Other;
      }
    case Formula::Kind::BForall:
      return classify(f->kids[0]) == SyntClass::Bounded ? SyntClass::Bounded : SyntClass::Other;
    default:
      return SyntClass::Other;
  }
}

// ------------------------------------------------------------ de Bruijn plumbing

namespace {

std::size_t arg_free(const Arg& a, std::size_t depth) {
  if (a.kind == Arg::Kind::Var) return a.value >= depth ? a.value - depth + 1 : 0;
  std::size_t m = 0;
  for (const auto& x : a.args) m = std::max(m, arg_free(x, depth));
  return m;
}

std::size_t fm_free(const Fm& f, std::size_t depth) {
  switch (f->kind) {
    case Formula::Kind::Atom:
      return std::max(arg_free(f->lhs, depth), arg_free(f->rhs, depth));
    case Formula::Kind::BForall:
      return std::max(arg_free(f->bound, depth), fm_free(f->kids[0], depth + 1));
    case Formula::Kind::Forall:
    case Formula::Kind::Exists:
      return fm_free(f->kids[0], depth + 1);
    default: {
      std::size_t m = 0;
      for (const auto& k : f->kids) m = std::max(m, fm_free(k, depth));
      return m;
    }
  }
}

bool arg_uses(const Arg& a, Nat index) {
  if (a.kind == Arg::Kind::Var) return a.value == index;
  for (const auto& x : a.args)
    if (arg_uses(x, index)) return true;
  return false;
}

template <class ArgFn>
Fm rebuild(const Fm& f, Nat depth, const ArgFn& on_arg) {
  Formula out = *f;
  switch (f->kind) {
    case Formula::Kind::Atom:
      out.lhs = on_arg(f->lhs, depth);
      out.rhs = on_arg(f->rhs, depth);
      break;
    case Formula::Kind::BForall:
      out.bound = on_arg(f->bound, depth);
      out.kids = {rebuild(f->kids[0], depth + 1, on_arg)};
      break;
    case Formula::Kind::Forall:
    case Formula::Kind::Exists:
      out.kids = {rebuild(f->kids[0], depth + 1, on_arg)};
      break;
    default:
      for (auto& k : out.kids) k = rebuild(k, depth, on_arg);
      break;
  }
  return make(std::move(out));
}

Arg subst_arg(const Arg& a, Nat j, const Arg& with, Nat depth) {
  switch (a.kind) {
    case Arg::Kind::Lit:
      return a;
    case Arg::Kind::Var:
      if (a.value < j) return a;
      if (a.value == j) return shift_arg(with, depth);
      return Arg::var(a.value - 1);
    case Arg::Kind::App: {
      Arg out = a;
      for (auto& x : out.args) x = subst_arg(x, j, with, depth);
      return out;
    }
  }
  return a;
}

}  // namespace

std::size_t free_var_count(const Fm& f) { return fm_free(f, 0); }

bool uses_var(const Fm& f, Nat index) {
  switch (f->kind) {
    case Formula::Kind::Atom:
      return arg_uses(f->lhs, index) || arg_uses(f->rhs, index);
    case Formula::Kind::BForall:
      return arg_uses(f->bound, index) || uses_var(f->kids[0], index + 1);
    case Formula::Kind::Forall:
    case Formula::Kind::Exists:
      return uses_var(f->kids[0], index + 1);
    default:
      for (const auto& k : f->kids)
        if (uses_var(k, index)) return true;
      return false;
  }
}

Arg shift_arg(const Arg& a, Nat d, Nat cutoff) {
  switch (a.kind) {
    case Arg::Kind::Lit:
      return a;
    case Arg::Kind::Var:
      return a.value >= cutoff ? Arg::var(a.value + d) : a;
    case Arg::Kind::App: {
      Arg out = a;
      for (auto& x : out.args) x = shift_arg(x, d, cutoff);
      return out;
    }
  }
  return a;
}

Fm shift(const Fm& f, Nat d, Nat cutoff) {
  return rebuild(f, cutoff, [d](const Arg& a, Nat c) { return shift_arg(a, d, c); });
}

Fm subst_top(const Fm& f, const Arg& a) {
  return rebuild(f, 0, [&a](const Arg& x, Nat depth) { return subst_arg(x, depth, a, depth); });
}

Fm instantiate(const Fm& f, const std::vector<Nat>& values) {
  Fm out = f;
  for (std::size_t i = values.size(); i-- > 0;) out = subst_top(out, Arg::lit(values[i]));
  return out;
}

Fm map_names(const Fm& f, const std::function<Name(const Name&)>& fn) {
  std::function<Arg(const Arg&)> on = [&](const Arg& a) {
    if (a.kind != Arg::Kind::App) return a;
    std::vector<Arg> args;
    for (const auto& x : a.args) args.push_back(on(x));
    return Arg::app(fn(a.name), std::move(args));
  };
  return rebuild(f, 0, [&on](const Arg& a, Nat) { return on(a); });
}

// ------------------------------------------------------------ evaluation

const char* to_string(Truth t) {
  switch (t) {
    case Truth::True:
      return "true";
    case Truth::False:
      return "false";
    case Truth::Unknown:
      return "unknown";
  }
  return "unknown";
}

std::optional<Nat> eval_arg(const Arg& a, const BitString& oracle, const std::vector<Nat>& env) {
  switch (a.kind) {
    case Arg::Kind::Lit:
      return a.value;
    case Arg::Kind::Var:
      if (a.value >= env.size()) throw std::out_of_range("free variable without a value");
      return env[env.size() - 1 - a.value];
    case Arg::Kind::App: {
      std::vector<Nat> xs;
      xs.reserve(a.args.size());
      for (const auto& x : a.args) {
        auto v = eval_arg(x, oracle, env);
        if (!v) return std::nullopt;
        xs.push_back(*v);
      }
      return a.name->query(oracle, xs);
    }
  }
  return std::nullopt;
}

namespace {

bool arg_total(const Arg& a) {
  if (a.kind != Arg::Kind::App) return true;
  if (!a.name->total()) return false;
  for (const auto& x : a.args)
    if (!arg_total(x)) return false;
  return true;
}

// Longest bounded-quantifier range the evaluator will walk.
constexpr Nat kRangeCap = Nat{1} << 20;

Truth eval_fm(const Fm& f, const BitString& oracle, Nat qbound, std::vector<Nat>& env, bool finite) {
  switch (f->kind) {
    case Formula::Kind::Atom: {
      auto l = eval_arg(f->lhs, oracle, env);
      auto r = eval_arg(f->rhs, oracle, env);
      if (!l || !r) return Truth::Unknown;
      return *l == *r ? Truth::True : Truth::False;
    }
    case Formula::Kind::Not:
      switch (eval_fm(f->kids[0], oracle, qbound, env, finite)) {
        case Truth::True:
          return Truth::False;
        case Truth::False:
          return Truth::True;
        default:
          return Truth::Unknown;
      }
    case Formula::Kind::And: {
      Truth a = eval_fm(f->kids[0], oracle, qbound, env, finite);
      if (a == Truth::False) return a;
      Truth b = eval_fm(f->kids[1], oracle, qbound, env, finite);
      if (b == Truth::False) return b;
      return a == Truth::True && b == Truth::True ? Truth::True : Truth::Unknown;
    }
    case Formula::Kind::BForall: {
      auto bound = eval_arg(f->bound, oracle, env);
      if (!bound || *bound >= kRangeCap) return Truth::Unknown;
      bool unknown = false;
      for (Nat w = 0; w <= *bound; ++w) {
        env.push_back(w);
        Truth t = eval_fm(f->kids[0], oracle, qbound, env, finite);
        env.pop_back();
        if (t == Truth::False) return t;
        unknown = unknown || t == Truth::Unknown;
      }
      return unknown ? Truth::Unknown : Truth::True;
    }
    case Formula::Kind::Forall: {
      const Fm& body = f->kids[0];
      if (!finite) {
        if (provably_true(body)) return Truth::True;
        if (!uses_var(body, 0)) {
          env.push_back(0);
          Truth t = eval_fm(body, oracle, qbound, env, finite);
          env.pop_back();
          return t;
        }
      }
      bool unknown = false;
      for (Nat x = 0; x < qbound; ++x) {
        env.push_back(x);
        Truth t = eval_fm(body, oracle, qbound, env, finite);
        env.pop_back();
        if (t == Truth::False) return t;
        unknown = unknown || t == Truth::Unknown;
      }
      return finite && !unknown ? Truth::True : Truth::Unknown;
    }
    default:
      return eval_fm(desugar(f), oracle, qbound, env, finite);
  }
}

}  // namespace

bool provably_true(const Fm& f) {
  switch (f->kind) {
    case Formula::Kind::Atom:
      return same_arg(f->lhs, f->rhs) && arg_total(f->lhs);
    case Formula::Kind::And:
      return provably_true(f->kids[0]) && provably_true(f->kids[1]);
    case Formula::Kind::Forall:
      return provably_true(f->kids[0]);
    case Formula::Kind::BForall:
      return arg_total(f->bound) && provably_true(f->kids[0]);
    default:
      return false;
  }
}

Truth classical_eval(const Fm& f, const BitString& oracle, Nat qbound, const std::vector<Nat>& env) {
  std::vector<Nat> e = env;
  return eval_fm(f, oracle, qbound, e, false);
}

Truth classical_eval(const Fm& f, const PeriodicSet& g, Nat qbound, std::size_t depth, const std::vector<Nat>& env) {
  return classical_eval(f, g.chi(depth), qbound, env);
}

Truth finite_eval(const Fm& f, const BitString& oracle, Nat qbound, const std::vector<Nat>& env) {
  std::vector<Nat> e = env;
  return eval_fm(f, oracle, qbound, e, true);
}

}  // namespace fsm
