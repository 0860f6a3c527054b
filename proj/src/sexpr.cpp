#include "fsm/sexpr.hpp"

#include <cctype>

namespace fsm {

std::string_view SExpr::head() const {
  if (kind != Kind::List || items.empty() || !items[0].is_symbol()) return {};
  return items[0].text;
}

std::string SExpr::print() const {
  switch (kind) {
    case Kind::Symbol:
      return text;
    case Kind::Number:
      return std::to_string(number);
    case Kind::String:
      return "\"" + text + "\"";
    case Kind::List: {
      std::string s = "(";
      for (std::size_t i = 0; i < items.size(); ++i) {
        if (i) s += ' ';
        s += items[i].print();
      }
      return s + ")";
    }
  }
  return {};
}

namespace {

class Reader {
 public:
  explicit Reader(std::string_view t) : t_(t) {}

  void skip() {
    while (i_ < t_.size()) {
      if (std::isspace(static_cast<unsigned char>(t_[i_]))) {
        ++i_;
      } else if (t_[i_] == ';') {
        while (i_ < t_.size() && t_[i_] != '\n') ++i_;
      } else {
        break;
      }
    }
  }

  bool done() {
    skip();
    return i_ >= t_.size();
  }

  SExpr read() {
    skip();
    if (i_ >= t_.size()) throw InputError("unexpected end of input", i_);
    std::size_t start = i_;
    char c = t_[i_];
    if (c == '(') {
      ++i_;
      SExpr e = SExpr::list({});
      e.pos = start;
      for (;;) {
        skip();
        if (i_ >= t_.size()) throw InputError("unclosed '('", start);
        if (t_[i_] == ')') {
          ++i_;
          return e;
        }
        e.items.push_back(read());
      }
    }
    if (c == ')') throw InputError("unexpected ')'", i_);
    if (c == '"') {
      ++i_;
      std::string s;
      while (i_ < t_.size() && t_[i_] != '"') s += t_[i_++];
      if (i_ >= t_.size()) throw InputError("unterminated string", start);
      ++i_;
      SExpr e = SExpr::str(std::move(s));
      e.pos = start;
      return e;
    }
    std::string tok;
    while (i_ < t_.size() && !std::isspace(static_cast<unsigned char>(t_[i_])) && t_[i_] != '(' &&
           t_[i_] != ')' && t_[i_] != '"' && t_[i_] != ';')
      tok += t_[i_++];
    bool numeric = !tok.empty();
    for (char d : tok) numeric = numeric && std::isdigit(static_cast<unsigned char>(d));
    SExpr e;
    if (numeric) {
      unsigned __int128 v = 0;
      for (char d : tok) {
        v = v * 10 + static_cast<unsigned>(d - '0');
        if (v > kNatMax) throw InputError("number too large", start);
      }
      e = SExpr::num(static_cast<Nat>(v));
    } else {
      e = SExpr::symbol(tok);
    }
    e.pos = start;
    return e;
  }

 private:
  std::string_view t_;
  std::size_t i_ = 0;
};

}  // namespace

SExpr parse_sexpr(std::string_view text) {
  Reader r(text);
  SExpr e = r.read();
  if (!r.done()) throw InputError("trailing input after expression", e.pos);
  return e;
}

std::vector<SExpr> parse_sexprs(std::string_view text) {
  Reader r(text);
  std::vector<SExpr> out;
  while (!r.done()) out.push_back(r.read());
  return out;
}

void fail_at(const SExpr& e, const std::string& msg) {
  throw InputError(msg + " in " + e.print(), e.pos);
}

Nat expect_number(const SExpr& e) {
  if (!e.is_number()) fail_at(e, "expected a number");
  return e.number;
}

const std::string& expect_symbol(const SExpr& e) {
  if (!e.is_symbol()) fail_at(e, "expected a symbol");
  return e.text;
}

const std::string& expect_string(const SExpr& e) {
  if (!e.is_string()) fail_at(e, "expected a string");
  return e.text;
}

void expect_arity(const SExpr& e, std::size_t n) {
  if (!e.is_list() || e.items.size() != n + 1)
    fail_at(e, "expected " + std::to_string(n) + " operand(s)");
}

namespace {

BitString bits_of(const SExpr& e) {
  const std::string& s = expect_string(e);
  for (char c : s)
    if (c != '0' && c != '1') fail_at(e, "bit string must be over {0,1}");
  return BitString(s);
}

}  // namespace

PeriodicSet parse_set(const SExpr& e) {
  std::string_view h = e.head();
  if (h == "fin") return PeriodicSet::finite(parse_finset(e));
  if (h == "nat") {
    expect_arity(e, 0);
    return PeriodicSet::nat();
  }
  if (h == "prog") {
    expect_arity(e, 2);
    return PeriodicSet::prog(expect_number(e.items[1]), expect_number(e.items[2]));
  }
  if (h == "periodic") {
    expect_arity(e, 2);
    BitString period = bits_of(e.items[2]);
    if (period.empty()) fail_at(e, "period must be nonempty");
    return PeriodicSet(bits_of(e.items[1]), period);
  }
  if (h == "union" || h == "inter" || h == "diff") {
    expect_arity(e, 2);
    PeriodicSet a = parse_set(e.items[1]);
    PeriodicSet b = parse_set(e.items[2]);
    if (h == "union") return a.unite(b);
    if (h == "inter") return a.intersect(b);
    return a.minus(b);
  }
  fail_at(e, "unknown set form");
}

PeriodicSet parse_set(std::string_view text) { return parse_set(parse_sexpr(text)); }

FinSet parse_finset(const SExpr& e) {
  if (e.head() != "fin") fail_at(e, "expected (fin …)");
  std::vector<Nat> xs;
  for (std::size_t i = 1; i < e.items.size(); ++i) xs.push_back(expect_number(e.items[i]));
  return FinSet::from_unsorted(std::move(xs));
}

FinSet parse_finset(std::string_view text) { return parse_finset(parse_sexpr(text)); }

}  // namespace fsm
