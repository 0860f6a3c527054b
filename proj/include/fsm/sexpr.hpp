#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "fsm/core.hpp"

namespace fsm {

// Malformed textual input. pos is a byte offset into the parsed text.
class InputError : public std::runtime_error {
 public:
  InputError(const std::string& msg, std::size_t pos)
      : std::runtime_error(msg + " at offset " + std::to_string(pos)), pos_(pos) {}
  std::size_t pos() const { return pos_; }

 private:
  std::size_t pos_;
};

struct SExpr {
  enum class Kind { Symbol, Number, String, List };

  Kind kind = Kind::List;
  std::string text;  // symbol or string payload
  Nat number = 0;
  std::vector<SExpr> items;
  std::size_t pos = 0;

  static SExpr symbol(std::string s) { return {Kind::Symbol, std::move(s), 0, {}, 0}; }
  static SExpr num(Nat n) { return {Kind::Number, {}, n, {}, 0}; }
  static SExpr str(std::string s) { return {Kind::String, std::move(s), 0, {}, 0}; }
  static SExpr list(std::vector<SExpr> xs) { return {Kind::List, {}, 0, std::move(xs), 0}; }

  bool is_symbol() const { return kind == Kind::Symbol; }
  bool is_symbol(std::string_view s) const { return kind == Kind::Symbol && text == s; }
  bool is_number() const { return kind == Kind::Number; }
  bool is_string() const { return kind == Kind::String; }
  bool is_list() const { return kind == Kind::List; }
  // Head symbol of a nonempty list, or "" otherwise.
  std::string_view head() const;

  std::string print() const;
};

SExpr parse_sexpr(std::string_view text);
std::vector<SExpr> parse_sexprs(std::string_view text);

// Checked accessors that raise InputError at the node's position.
[[noreturn]] void fail_at(const SExpr& e, const std::string& msg);
Nat expect_number(const SExpr& e);
const std::string& expect_symbol(const SExpr& e);
const std::string& expect_string(const SExpr& e);
void expect_arity(const SExpr& e, std::size_t n);

// Set grammar: (fin …) (nat) (prog a d) (periodic "p" "q") (union S S) (inter S S) (diff S S)
PeriodicSet parse_set(const SExpr& e);
PeriodicSet parse_set(std::string_view text);
FinSet parse_finset(const SExpr& e);
FinSet parse_finset(std::string_view text);

}  // namespace fsm
