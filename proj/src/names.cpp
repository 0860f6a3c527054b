#include "fsm/names.hpp"

#include <algorithm>
#include <array>
#include <map>

namespace fsm {

// ------------------------------------------------------------ terms

Nat Term::eval(std::span<const Nat> env) const {
  switch (op) {
    case Op::Const:
      return value;
    case Op::Var:
      return value < env.size() ? env[value] : 0;
    case Op::Add:
      return sat_add(kids[0].eval(env), kids[1].eval(env));
    case Op::Mul:
      return sat_mul(kids[0].eval(env), kids[1].eval(env));
    case Op::Monus:
      return monus(kids[0].eval(env), kids[1].eval(env));
    case Op::Pair:
      return fsm::pair(kids[0].eval(env), kids[1].eval(env));
    case Op::Fst:
      return fsm::fst(kids[0].eval(env));
    case Op::Snd:
      return fsm::snd(kids[0].eval(env));
    case Op::Half:
      return kids[0].eval(env) / 2;
  }
  return 0;
}

std::string Term::print(const std::vector<std::string>& params) const {
  auto bin = [&](const char* h) {
    return std::string("(") + h + " " + kids[0].print(params) + " " + kids[1].print(params) + ")";
  };
  auto un = [&](const char* h) { return std::string("(") + h + " " + kids[0].print(params) + ")"; };
  switch (op) {
    case Op::Const:
      return std::to_string(value);
    case Op::Var:
      return value < params.size() ? params[value] : "v" + std::to_string(value);
    case Op::Add:
      return bin("+");
    case Op::Mul:
      return bin("*");
    case Op::Monus:
      return bin("-");
    case Op::Pair:
      return bin("pair");
    case Op::Fst:
      return un("fst");
    case Op::Snd:
      return un("snd");
    case Op::Half:
      return un("half");
  }
  return {};
}

namespace {

void collect_vars(const SExpr& e, std::vector<std::string>& out) {
  if (e.is_symbol()) {
    if (std::find(out.begin(), out.end(), e.text) == out.end()) out.push_back(e.text);
  } else if (e.is_list()) {
    for (std::size_t i = 1; i < e.items.size(); ++i) collect_vars(e.items[i], out);
  }
}

Term parse_term(const SExpr& e, const std::vector<std::string>& params) {
  if (e.is_number()) return Term::constant(e.number);
  if (e.is_symbol()) {
    auto it = std::find(params.begin(), params.end(), e.text);
    if (it == params.end()) fail_at(e, "unbound term variable '" + e.text + "'");
    return Term::var(static_cast<Nat>(it - params.begin()));
  }
  if (!e.is_list() || e.items.empty()) fail_at(e, "malformed term");
  std::string_view h = e.head();
  std::vector<Term> args;
  for (std::size_t i = 1; i < e.items.size(); ++i) args.push_back(parse_term(e.items[i], params));
  auto fold = [&](Term (*mk)(Term, Term)) {
    if (args.size() < 2) fail_at(e, "operator needs at least two operands");
    Term acc = args[0];
    for (std::size_t i = 1; i < args.size(); ++i) acc = mk(std::move(acc), args[i]);
    return acc;
  };
  if (h == "+") return fold(&Term::add);
  if (h == "*") return fold(&Term::mul);
  if (h == "-") {
    expect_arity(e, 2);
    return Term::sub(args[0], args[1]);
  }
  if (h == "pair") {
    expect_arity(e, 2);
    return Term::pair(args[0], args[1]);
  }
  if (h == "fst" || h == "snd" || h == "half") {
    expect_arity(e, 1);
    if (h == "fst") return Term::first(args[0]);
    if (h == "snd") return Term::second(args[0]);
    return Term::half(args[0]);
  }
  fail_at(e, "unknown term operator");
}

}  // namespace

// ------------------------------------------------------------ ground functions

GroundFn GroundFn::term(std::vector<std::string> params, Term body) {
  GroundFn f;
  f.params_ = std::move(params);
  f.body_ = std::move(body);
  return f;
}

GroundFn GroundFn::table(std::vector<std::pair<Nat, Nat>> rows, Nat slope, Nat offset) {
  GroundFn f;
  f.is_table_ = true;
  std::sort(rows.begin(), rows.end());
  for (std::size_t i = 1; i < rows.size(); ++i)
    if (rows[i].first == rows[i - 1].first)
      throw std::invalid_argument("table lists key " + std::to_string(rows[i].first) + " twice");
  f.rows_ = std::move(rows);
  f.slope_ = slope;
  f.offset_ = offset;
  return f;
}

Nat GroundFn::operator()(std::span<const Nat> args) const {
  if (!is_table_) return body_.eval(args);
  Nat k = args.empty() ? 0 : args[0];
  auto it = std::lower_bound(rows_.begin(), rows_.end(), std::make_pair(k, Nat{0}));
  if (it != rows_.end() && it->first == k) return it->second;
  return sat_add(sat_mul(slope_, k), offset_);
}

std::string GroundFn::print_body() const {
  if (is_table_) {
    std::string s = "(table";
    for (auto [k, v] : rows_) s += " " + std::to_string(k) + " " + std::to_string(v);
    return s + ") (affine " + std::to_string(slope_) + " " + std::to_string(offset_) + ")";
  }
  std::string text = body_.print(params_);
  // Omit the parameter list when it is the default one.
  std::vector<std::string> implicit;
  collect_vars(parse_sexpr(text), implicit);
  if (implicit == params_) return text;
  std::string s = "(";
  for (std::size_t i = 0; i < params_.size(); ++i) s += (i ? " " : "") + params_[i];
  return s + ") " + text;
}

GroundFn parse_ground(const SExpr& parent, std::size_t first) {
  const auto& it = parent.items;
  if (first >= it.size()) fail_at(parent, "missing ground function");
  if (it[first].head() == "table") {
    if (first + 2 != it.size()) fail_at(parent, "table needs an (affine a b) tail");
    const SExpr& t = it[first];
    if ((t.items.size() - 1) % 2) fail_at(t, "table needs key/value pairs");
    std::vector<std::pair<Nat, Nat>> rows;
    for (std::size_t i = 1; i + 1 < t.items.size(); i += 2)
      rows.emplace_back(expect_number(t.items[i]), expect_number(t.items[i + 1]));
    const SExpr& a = it[first + 1];
    if (a.head() != "affine") fail_at(a, "expected (affine a b)");
    expect_arity(a, 2);
    try {
      return GroundFn::table(std::move(rows), expect_number(a.items[1]), expect_number(a.items[2]));
    } catch (const std::invalid_argument& ex) {
      fail_at(t, ex.what());
    }
  }
  if (first + 2 == it.size()) {
    const SExpr& ps = it[first];
    if (!ps.is_list()) fail_at(ps, "expected a parameter list");
    std::vector<std::string> params;
    for (const auto& p : ps.items) {
      const std::string& n = expect_symbol(p);
      if (std::find(params.begin(), params.end(), n) != params.end())
        fail_at(ps, "repeated parameter '" + n + "'");
      params.push_back(n);
    }
    return GroundFn::term(params, parse_term(it[first + 1], params));
  }
  if (first + 1 != it.size()) fail_at(parent, "too many operands for a ground function");
  std::vector<std::string> params;
  collect_vars(it[first], params);
  return GroundFn::term(params, parse_term(it[first], params));
}

// ------------------------------------------------------------ name nodes

Nat effort_cap(const BitString& tau) { return 4096 + 4096 * static_cast<Nat>(tau.size()); }

namespace {

// Argument vector kept on the stack for the common short case; queries run in tight loops.
class ArgBuf {
 public:
  ArgBuf() = default;
  explicit ArgBuf(std::span<const Nat> xs) {
    for (Nat x : xs) push_back(x);
  }
  void push_back(Nat x) {
    if (n_ < small_.size()) {
      small_[n_++] = x;
      return;
    }
    if (big_.empty()) big_.assign(small_.begin(), small_.end());
    big_.push_back(x);
    ++n_;
  }
  void pop_back() {
    --n_;
    if (!big_.empty()) big_.pop_back();
  }
  Nat* data() { return big_.empty() ? small_.data() : big_.data(); }
  const Nat* data() const { return big_.empty() ? small_.data() : big_.data(); }
  std::size_t size() const { return n_; }
  Nat& operator[](std::size_t i) { return data()[i]; }
  Nat& back() { return data()[n_ - 1]; }
  operator std::span<const Nat>() const { return {data(), n_}; }

 private:
  std::array<Nat, 8> small_{};
  std::vector<Nat> big_;
  std::size_t n_ = 0;
};


class Node : public NameNode, public std::enable_shared_from_this<Node> {
 public:
  Name self() const { return shared_from_this(); }
  Name with_kids(std::vector<Name> kids) const override {
    if (!kids.empty()) throw std::logic_error("leaf name has no children");
    return self();
  }
};

template <class T, class... A>
Name make(A&&... a) {
  return std::make_shared<const T>(std::forward<A>(a)...);
}

void require(bool ok, const std::string& msg) {
  if (!ok) throw ArityError(msg);
}

class CanonNode final : public Node {
 public:
  explicit CanonNode(GroundFn f) : f_(std::move(f)) {}
  std::size_t arity() const override { return f_.arity(); }
  std::optional<Nat> query(const BitString&, std::span<const Nat> args) const override {
    return f_(args);
  }
  std::string print() const override { return "(canon " + f_.print_body() + ")"; }
  bool total() const override { return true; }

 private:
  GroundFn f_;
};

class SuperposeNode final : public Node {
 public:
  SuperposeNode(Name outer, std::vector<Name> inner) : outer_(std::move(outer)), inner_(std::move(inner)) {}
  std::size_t arity() const override { return inner_[0]->arity(); }
  std::optional<Nat> query(const BitString& tau, std::span<const Nat> args) const override {
    ArgBuf ys;
    for (const auto& f : inner_) {
      auto y = f->query(tau, args);
      if (!y) return std::nullopt;
      ys.push_back(*y);
    }
    return outer_->query(tau, ys);
  }
  std::string print() const override {
    std::string s = "(superpose " + outer_->print();
    for (const auto& f : inner_) s += " " + f->print();
    return s + ")";
  }
  std::vector<Name> kids() const override {
    std::vector<Name> k{outer_};
    k.insert(k.end(), inner_.begin(), inner_.end());
    return k;
  }
  Name with_kids(std::vector<Name> k) const override {
    Name o = k.front();
    k.erase(k.begin());
    return superpose(std::move(o), std::move(k));
  }

  bool total() const override {
    for (const auto& k : kids())
      if (!k->total()) return false;
    return true;
  }

 private:
  Name outer_;
  std::vector<Name> inner_;
};

class LiftNode final : public Node {
 public:
  LiftNode(std::size_t k, Name inner) : k_(k), inner_(std::move(inner)) {}
  std::size_t arity() const override { return k_; }
  std::optional<Nat> query(const BitString& tau, std::span<const Nat>) const override {
    return inner_->query(tau, {});
  }
  std::string print() const override {
    return "(lift " + std::to_string(k_) + " " + inner_->print() + ")";
  }
  std::vector<Name> kids() const override { return {inner_}; }
  Name with_kids(std::vector<Name> k) const override { return lift(k_, k.at(0)); }

  bool total() const override {
    for (const auto& k : kids())
      if (!k->total()) return false;
    return true;
  }

 private:
  std::size_t k_;
  Name inner_;
};

class PrimrecNode final : public Node {
 public:
  PrimrecNode(Name base, Name step) : base_(std::move(base)), step_(std::move(step)) {}
  std::size_t arity() const override { return base_->arity() + 1; }
  std::optional<Nat> query(const BitString& tau, std::span<const Nat> args) const override {
    std::span<const Nat> params = args.first(args.size() - 1);
    Nat y = args.back();
    if (y >= effort_cap(tau)) return std::nullopt;
    auto z = base_->query(tau, params);
    ArgBuf buf(params);
    buf.push_back(0);
    buf.push_back(0);
    for (Nat i = 0; z && i < y; ++i) {
      buf[buf.size() - 2] = i;
      buf.back() = *z;
      z = step_->query(tau, buf);
    }
    return z;
  }
  std::string print() const override {
    return "(primrec " + base_->print() + " " + step_->print() + ")";
  }
  std::vector<Name> kids() const override { return {base_, step_}; }
  Name with_kids(std::vector<Name> k) const override { return primrec(k.at(0), k.at(1)); }

 private:
  Name base_, step_;
};

class ChiNode final : public Node {
 public:
  std::size_t arity() const override { return 1; }
  std::optional<Nat> query(const BitString& tau, std::span<const Nat> args) const override {
    auto b = tau.at(args[0]);
    if (!b) return std::nullopt;
    return *b ? 1 : 0;
  }
  std::string print() const override { return "(chi)"; }
};

class EnumNode final : public Node {
 public:
  std::size_t arity() const override { return 1; }
  std::optional<Nat> query(const BitString& tau, std::span<const Nat> args) const override {
    Nat seen = 0;
    for (std::size_t i = 0; i < tau.size(); ++i)
      if (tau[i] && seen++ == args[0]) return i;
    return std::nullopt;
  }
  std::string print() const override { return "(enum)"; }
};

class TableNode final : public Node {
 public:
  explicit TableNode(std::vector<TableEntry> e) : entries_(std::move(e)) {}
  std::size_t arity() const override { return 1; }
  std::optional<Nat> query(const BitString& tau, std::span<const Nat> args) const override {
    for (const auto& e : entries_)
      if (e.x == args[0] && e.pattern.is_prefix_of(tau)) return e.y;
    return std::nullopt;
  }
  std::string print() const override {
    std::string s = "(table (";
    for (std::size_t i = 0; i < entries_.size(); ++i) {
      const auto& e = entries_[i];
      s += (i ? " " : "") + std::string("(\"") + e.pattern.str() + "\" " + std::to_string(e.x) + " " +
           std::to_string(e.y) + ")";
    }
    return s + "))";
  }
  const std::vector<TableEntry>* table_entries() const override { return &entries_; }

 private:
  std::vector<TableEntry> entries_;
};

class SliceNode final : public Node {
 public:
  SliceNode(Name w, SliceKind kind, Nat fixed) : w_(std::move(w)), kind_(kind), fixed_(fixed) {}
  std::size_t arity() const override {
    std::size_t n = w_->arity();
    if (kind_ == SliceKind::PairVar) return n + 1;
    if (kind_ == SliceKind::Head) return n - 1;
    return n;
  }
  std::optional<Nat> query(const BitString& tau, std::span<const Nat> args) const override {
    ArgBuf buf(args);
    switch (kind_) {
      case SliceKind::Even:
        buf.back() = sat_mul(2, buf.back());
        break;
      case SliceKind::Odd:
        buf.back() = sat_add(sat_mul(2, buf.back()), 1);
        break;
      case SliceKind::PairFix:
        buf.back() = fsm::pair(fixed_, buf.back());
        break;
      case SliceKind::PairVar: {
        Nat t = buf.back();
        buf.pop_back();
        buf.back() = fsm::pair(buf.back(), t);
        break;
      }
      case SliceKind::Shift:
        buf.back() = sat_add(buf.back(), 1);
        break;
      case SliceKind::Head:
        buf.push_back(0);
        break;
    }
    return w_->query(tau, buf);
  }
  std::string print() const override {
    std::string k;
    switch (kind_) {
      case SliceKind::Even:
        k = "even";
        break;
      case SliceKind::Odd:
        k = "odd";
        break;
      case SliceKind::PairFix:
        k = "(pairfix " + std::to_string(fixed_) + ")";
        break;
      case SliceKind::PairVar:
        k = "pairvar";
        break;
      case SliceKind::Shift:
        k = "shift";
        break;
      case SliceKind::Head:
        k = "head";
        break;
    }
    return "(slice " + k + " " + w_->print() + ")";
  }
  std::vector<Name> kids() const override { return {w_}; }
  Name with_kids(std::vector<Name> k) const override { return slice(k.at(0), kind_, fixed_); }

  bool total() const override {
    for (const auto& k : kids())
      if (!k->total()) return false;
    return true;
  }

 private:
  Name w_;
  SliceKind kind_;
  Nat fixed_;
};

class CondNode final : public Node {
 public:
  CondNode(Name c, Name a, Name b) : c_(std::move(c)), a_(std::move(a)), b_(std::move(b)) {}
  std::size_t arity() const override { return c_->arity(); }
  std::optional<Nat> query(const BitString& tau, std::span<const Nat> args) const override {
    auto t = c_->query(tau, args);
    if (!t) return std::nullopt;
    return (*t ? a_ : b_)->query(tau, args);
  }
  std::string print() const override {
    return "(cond " + c_->print() + " " + a_->print() + " " + b_->print() + ")";
  }
  std::vector<Name> kids() const override { return {c_, a_, b_}; }
  Name with_kids(std::vector<Name> k) const override { return cond(k.at(0), k.at(1), k.at(2)); }

  bool total() const override {
    for (const auto& k : kids())
      if (!k->total()) return false;
    return true;
  }

 private:
  Name c_, a_, b_;
};

class BSumNode final : public Node {
 public:
  BSumNode(Name bound, Name body) : bound_(std::move(bound)), body_(std::move(body)) {}
  std::size_t arity() const override { return bound_->arity(); }
  std::optional<Nat> query(const BitString& tau, std::span<const Nat> args) const override {
    auto f = bound_->query(tau, args);
    if (!f || *f >= effort_cap(tau)) return std::nullopt;
    ArgBuf buf(args);
    buf.push_back(0);
    Nat total = 0;
    for (Nat w = 0; w <= *f; ++w) {
      buf.back() = w;
      auto g = body_->query(tau, buf);
      if (!g) return std::nullopt;
      total = sat_add(total, *g);
    }
    return total;
  }
  std::string print() const override {
    return "(bsum " + bound_->print() + " " + body_->print() + ")";
  }
  std::vector<Name> kids() const override { return {bound_, body_}; }
  Name with_kids(std::vector<Name> k) const override { return bsum(k.at(0), k.at(1)); }

 private:
  Name bound_, body_;
};

class LeastNode final : public Node {
 public:
  explicit LeastNode(Name m) : m_(std::move(m)) {}
  std::size_t arity() const override { return m_->arity() - 1; }
  std::optional<Nat> query(const BitString& tau, std::span<const Nat> args) const override {
    ArgBuf buf(args);
    buf.push_back(0);
    Nat inner = 0;  // Σ_{u≤s} T(x̄, u)
    Nat y = 0;      // Σ_{w≤s} U(w)
    for (Nat s = 0; s < tau.size(); ++s) {
      buf.back() = s;
      auto t = m_->query(tau, buf);
      if (!t) return std::nullopt;
      inner = sat_add(inner, *t);
      y = sat_add(y, monus(1, inner));
      if (y < s) return y;
    }
    return std::nullopt;
  }
  std::string print() const override { return "(least " + m_->print() + ")"; }
  std::vector<Name> kids() const override { return {m_}; }
  Name with_kids(std::vector<Name> k) const override { return least(k.at(0)); }

 private:
  Name m_;
};

class EmptyNode final : public Node {
 public:
  explicit EmptyNode(std::size_t k) : k_(k) {}
  std::size_t arity() const override { return k_; }
  std::optional<Nat> query(const BitString&, std::span<const Nat>) const override {
    return std::nullopt;
  }
  std::string print() const override { return "(empty " + std::to_string(k_) + ")"; }

 private:
  std::size_t k_;
};

class HoleNode final : public Node {
 public:
  std::size_t arity() const override { return 1; }
  std::optional<Nat> query(const BitString&, std::span<const Nat>) const override {
    return std::nullopt;
  }
  std::string print() const override { return "(hole)"; }
};

}  // namespace

Name NameNode::with_kids(std::vector<Name>) const {
  throw std::logic_error("name does not support child replacement");
}

// ------------------------------------------------------------ constructors

Name canonical(GroundFn f) { return make<CanonNode>(std::move(f)); }

Name canonical(const std::string& term_text) {
  SExpr e = SExpr::list({SExpr::symbol("canon"), parse_sexpr(term_text)});
  return canonical(parse_ground(e, 1));
}

Name canonical_term(std::vector<std::string> params, Term body) {
  return canonical(GroundFn::term(std::move(params), std::move(body)));
}

Name constant_name(std::size_t arity, Nat value) {
  std::vector<std::string> ps;
  for (std::size_t i = 0; i < arity; ++i) ps.push_back("x" + std::to_string(i));
  return canonical_term(std::move(ps), Term::constant(value));
}

Name projection(std::size_t arity, std::size_t index) {
  require(index < arity, "projection index out of range");
  std::vector<std::string> ps;
  for (std::size_t i = 0; i < arity; ++i) ps.push_back("x" + std::to_string(i));
  return canonical_term(std::move(ps), Term::var(index));
}

Name superpose(Name outer, std::vector<Name> inner) {
  require(!inner.empty(), "superpose needs at least one inner name; use lift for nullary names");
  require(outer->arity() == inner.size(),
          "superpose: " + outer->print() + " has arity " + std::to_string(outer->arity()) + " but " +
              std::to_string(inner.size()) + " inner names were given");
  for (const auto& f : inner)
    require(f->arity() == inner[0]->arity(), "superpose: inner name " + f->print() + " has arity " +
                                                 std::to_string(f->arity()) + ", expected " +
                                                 std::to_string(inner[0]->arity()));
  return make<SuperposeNode>(std::move(outer), std::move(inner));
}

Name lift(std::size_t arity, Name inner) {
  require(inner->arity() == 0, "lift expects a nullary name, got " + inner->print());
  return make<LiftNode>(arity, std::move(inner));
}

Name primrec(Name base, Name step) {
  require(step->arity() == base->arity() + 2,
          "primrec: step " + step->print() + " must have arity " + std::to_string(base->arity() + 2));
  return make<PrimrecNode>(std::move(base), std::move(step));
}

Name generic_chi() { return make<ChiNode>(); }
Name generic_enum() { return make<EnumNode>(); }

Name turing_table(std::vector<TableEntry> entries) {
  for (std::size_t i = 0; i < entries.size(); ++i)
    for (std::size_t j = i + 1; j < entries.size(); ++j) {
      const auto& a = entries[i];
      const auto& b = entries[j];
      if (a.x == b.x && a.y != b.y && a.pattern.compatible(b.pattern))
        throw InconsistentTable("patterns \"" + a.pattern.str() + "\" and \"" + b.pattern.str() +
                                "\" are compatible but map " + std::to_string(a.x) + " to " +
                                std::to_string(a.y) + " and " + std::to_string(b.y));
    }
  return make<TableNode>(std::move(entries));
}

Name slice(Name w, SliceKind kind, Nat fixed) {
  require(w->arity() >= 1, "slice needs a name of positive arity, got " + w->print());
  return make<SliceNode>(std::move(w), kind, fixed);
}

Name cond(Name test, Name then_name, Name else_name) {
  require(test->arity() == then_name->arity() && test->arity() == else_name->arity(),
          "cond branches must share the test's arity");
  return make<CondNode>(std::move(test), std::move(then_name), std::move(else_name));
}

Name bsum(Name bound, Name body) {
  require(body->arity() == bound->arity() + 1,
          "bsum: body " + body->print() + " must have arity " + std::to_string(bound->arity() + 1));
  return make<BSumNode>(std::move(bound), std::move(body));
}

Name least(Name matrix) {
  require(matrix->arity() >= 1, "least needs a matrix of positive arity");
  return make<LeastNode>(std::move(matrix));
}

Name empty_name(std::size_t arity) { return make<EmptyNode>(arity); }

Name hole() {
  static const Name h = make<HoleNode>();
  return h;
}

bool is_hole(const Name& n) { return dynamic_cast<const HoleNode*>(n.get()) != nullptr; }

bool mentions_hole(const Name& n) {
  if (is_hole(n)) return true;
  for (const auto& k : n->kids())
    if (mentions_hole(k)) return true;
  return false;
}

Name substitute_hole(const Name& n, const Name& witness) {
  if (is_hole(n)) return witness;
  auto ks = n->kids();
  if (ks.empty()) return n;
  bool changed = false;
  for (auto& k : ks) {
    Name r = substitute_hole(k, witness);
    changed = changed || r != k;
    k = std::move(r);
  }
  return changed ? n->with_kids(std::move(ks)) : n;
}

bool same_name(const Name& a, const Name& b) { return a == b || a->print() == b->print(); }

// ------------------------------------------------------------ parsing

Name parse_name(const SExpr& e) {
  std::string_view h = e.head();
  try {
    if (h == "canon") return canonical(parse_ground(e, 1));
    if (h == "superpose") {
      if (e.items.size() < 3) fail_at(e, "superpose needs an outer and at least one inner name");
      std::vector<Name> inner;
      for (std::size_t i = 2; i < e.items.size(); ++i) inner.push_back(parse_name(e.items[i]));
      return superpose(parse_name(e.items[1]), std::move(inner));
    }
    if (h == "lift") {
      expect_arity(e, 2);
      return lift(expect_number(e.items[1]), parse_name(e.items[2]));
    }
    if (h == "primrec") {
      expect_arity(e, 2);
      return primrec(parse_name(e.items[1]), parse_name(e.items[2]));
    }
    if (h == "chi") {
      expect_arity(e, 0);
      return generic_chi();
    }
    if (h == "enum") {
      expect_arity(e, 0);
      return generic_enum();
    }
    if (h == "table") {
      expect_arity(e, 1);
      const SExpr& rows = e.items[1];
      if (!rows.is_list()) fail_at(rows, "expected a list of (\"bits\" x y) entries");
      std::vector<TableEntry> entries;
      for (const auto& r : rows.items) {
        if (!r.is_list() || r.items.size() != 3) fail_at(r, "expected (\"bits\" x y)");
        const std::string& bits = expect_string(r.items[0]);
        if (bits.find_first_not_of("01") != std::string::npos) fail_at(r, "pattern must be over {0,1}");
        entries.push_back({BitString(bits), expect_number(r.items[1]), expect_number(r.items[2])});
      }
      try {
        return turing_table(std::move(entries));
      } catch (const InconsistentTable& ex) {
        fail_at(e, ex.what());
      }
    }
    if (h == "slice") {
      expect_arity(e, 2);
      const SExpr& k = e.items[1];
      Name w = parse_name(e.items[2]);
      if (k.head() == "pairfix") {
        expect_arity(k, 1);
        return slice(w, SliceKind::PairFix, expect_number(k.items[1]));
      }
      const std::string& ks = expect_symbol(k);
      if (ks == "even") return slice(w, SliceKind::Even);
      if (ks == "odd") return slice(w, SliceKind::Odd);
      if (ks == "pairvar") return slice(w, SliceKind::PairVar);
      if (ks == "shift") return slice(w, SliceKind::Shift);
      if (ks == "head") return slice(w, SliceKind::Head);
      fail_at(k, "unknown slice kind");
    }
    if (h == "cond") {
      expect_arity(e, 3);
      return cond(parse_name(e.items[1]), parse_name(e.items[2]), parse_name(e.items[3]));
    }
    if (h == "bsum") {
      expect_arity(e, 2);
      return bsum(parse_name(e.items[1]), parse_name(e.items[2]));
    }
    if (h == "least") {
      expect_arity(e, 1);
      return least(parse_name(e.items[1]));
    }
    if (h == "empty") {
      expect_arity(e, 1);
      return empty_name(expect_number(e.items[1]));
    }
    if (h == "hole") {
      expect_arity(e, 0);
      return hole();
    }
  } catch (const ArityError& ex) {
    fail_at(e, ex.what());
  }
  fail_at(e, "unknown name form");
}

Name parse_name(std::string_view text) { return parse_name(parse_sexpr(text)); }

}  // namespace fsm
