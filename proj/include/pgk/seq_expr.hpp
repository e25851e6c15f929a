// Copyright 2026 The pgk Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef PGK_SEQ_EXPR_HPP
#define PGK_SEQ_EXPR_HPP

#include <cctype>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>

#include "pgk/errors.hpp"
#include "pgk/interval.hpp"
#include "pgk/rational.hpp"

namespace pgk {

// Expression grammar (EBNF):
//
//   expr   = term   { ("+" | "-") term } ;
//   term   = factor { ("*" | "/") factor } ;
//   factor = base   [ "^" factor ] ;            (right-associative)
//   base   = number | "n" | "p"
//          | ("log" | "sqrt") "(" expr ")"
//          | "(" expr ")" ;
//   number = digits [ "." digits ] ;
//
// "log" is the natural logarithm. There is no unary minus; negative
// constants are written as e.g. "0-0.5". The variables are the 1-based
// index n and the n-th prime p.

/// Evaluation point: the index n and the value of the n-th prime. The
/// prime value is only consulted when the expression mentions p; it is
/// never verified for primality here.
struct eval_context {
  std::uint64_t n = 1;
  std::uint64_t p = 0;
};

namespace detail {

enum class node_kind : std::uint8_t {
  literal,
  var_n,
  var_p,
  log_fn,
  sqrt_fn,
  add,
  sub,
  mul,
  div_op,
  pow_op,
};

struct expr_node {
  node_kind kind;
  rational value;  // literal only
  std::shared_ptr<const expr_node> lhs, rhs;  // unary functions use lhs
};

using node_ptr = std::shared_ptr<const expr_node>;

inline node_ptr make_leaf(node_kind k) {
  auto n = std::make_shared<expr_node>();
  n->kind = k;
  return n;
}

inline node_ptr make_literal(rational v) {
  auto n = std::make_shared<expr_node>();
  n->kind = node_kind::literal;
  n->value = std::move(v);
  return n;
}

inline node_ptr make_unary(node_kind k, node_ptr child) {
  auto n = std::make_shared<expr_node>();
  n->kind = k;
  n->lhs = std::move(child);
  return n;
}

inline node_ptr make_binary(node_kind k, node_ptr l, node_ptr r) {
  auto n = std::make_shared<expr_node>();
  n->kind = k;
  n->lhs = std::move(l);
  n->rhs = std::move(r);
  return n;
}

class parser {
 public:
  explicit parser(std::string_view text) : text_(text) {}

  node_ptr parse() {
    skip_ws();
    if (pos_ >= text_.size()) throw parse_error("empty expression", 0);
    node_ptr e = parse_expr();
    skip_ws();
    if (pos_ < text_.size())
      throw parse_error(std::string("unexpected '") + text_[pos_] + "'", pos_);
    return e;
  }

 private:
  node_ptr parse_expr() {
    node_ptr lhs = parse_term();
    for (;;) {
      skip_ws();
      if (peek() == '+' || peek() == '-') {
        char op = text_[pos_++];
        node_ptr rhs = parse_term();
        lhs = make_binary(op == '+' ? node_kind::add : node_kind::sub,
                          std::move(lhs), std::move(rhs));
      } else {
        return lhs;
      }
    }
  }

  node_ptr parse_term() {
    node_ptr lhs = parse_factor();
    for (;;) {
      skip_ws();
      if (peek() == '*' || peek() == '/') {
        char op = text_[pos_++];
        node_ptr rhs = parse_factor();
        lhs = make_binary(op == '*' ? node_kind::mul : node_kind::div_op,
                          std::move(lhs), std::move(rhs));
      } else {
        return lhs;
      }
    }
  }

  node_ptr parse_factor() {
    node_ptr base = parse_base();
    skip_ws();
    if (peek() == '^') {
      ++pos_;
      node_ptr expo = parse_factor();  // right-associative
      return make_binary(node_kind::pow_op, std::move(base), std::move(expo));
    }
    return base;
  }

  node_ptr parse_base() {
    skip_ws();
    if (pos_ >= text_.size()) throw parse_error("unexpected end of input", pos_);
    char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      node_ptr e = parse_expr();
      expect(')');
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c))) {
      std::size_t start = pos_;
      while (pos_ < text_.size() &&
             std::isalpha(static_cast<unsigned char>(text_[pos_])))
        ++pos_;
      std::string_view name = text_.substr(start, pos_ - start);
      if (name == "n") return make_leaf(node_kind::var_n);
      if (name == "p") return make_leaf(node_kind::var_p);
      if (name == "log" || name == "sqrt") {
        expect('(');
        node_ptr arg = parse_expr();
        expect(')');
        return make_unary(name == "log" ? node_kind::log_fn : node_kind::sqrt_fn,
                          std::move(arg));
      }
      throw parse_error("unknown identifier '" + std::string(name) + "'", start);
    }
    throw parse_error(std::string("unexpected '") + c + "'", pos_);
  }

  node_ptr parse_number() {
    std::size_t start = pos_;
    while (pos_ < text_.size() &&
           std::isdigit(static_cast<unsigned char>(text_[pos_])))
      ++pos_;
    if (peek() == '.') {
      ++pos_;
      std::size_t frac_start = pos_;
      while (pos_ < text_.size() &&
             std::isdigit(static_cast<unsigned char>(text_[pos_])))
        ++pos_;
      if (pos_ == frac_start)
        throw parse_error("digit expected after '.'", pos_);
    }
    return make_literal(parse_rational(text_.substr(start, pos_ - start)));
  }

  void expect(char c) {
    skip_ws();
    if (pos_ >= text_.size() || text_[pos_] != c)
      throw parse_error(std::string("expected '") + c + "'", pos_);
    ++pos_;
  }

  char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }

  void skip_ws() {
    while (pos_ < text_.size() &&
           std::isspace(static_cast<unsigned char>(text_[pos_])))
      ++pos_;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

// precedence levels for printing with minimal parentheses
inline int print_prec(node_kind k) {
  switch (k) {
    case node_kind::add:
    case node_kind::sub: return 1;
    case node_kind::mul:
    case node_kind::div_op: return 2;
    case node_kind::pow_op: return 3;
    default: return 4;
  }
}

/// Literals always come from decimal text, so the denominator is of the
/// form 2^a * 5^b and an exact decimal rendering exists.
inline std::string literal_text(const rational& v) {
  mpz_class num = v.get_num();
  mpz_class den = v.get_den();
  if (den == 1) return num.get_str();
  unsigned long twos = mpz_scan1(den.get_mpz_t(), 0);
  mpz_class rest = den >> twos;
  unsigned long fives = 0;
  while (mpz_divisible_ui_p(rest.get_mpz_t(), 5)) {
    mpz_divexact_ui(rest.get_mpz_t(), rest.get_mpz_t(), 5);
    ++fives;
  }
  if (rest != 1) return to_string(v);  // not decimal-representable
  unsigned long k = std::max(twos, fives);
  mpz_class scale;
  mpz_ui_pow_ui(scale.get_mpz_t(), 10, k);
  mpz_class scaled = num * (scale / den);
  bool neg = scaled < 0;
  std::string digits = (neg ? mpz_class(-scaled) : scaled).get_str();
  if (digits.size() <= k) digits.insert(0, k - digits.size() + 1, '0');
  digits.insert(digits.size() - k, ".");
  return (neg ? "-" : "") + digits;
}

inline void print_node(const expr_node& n, std::string& out) {
  auto child = [&](const expr_node& c, bool needs_parens) {
    if (needs_parens) out += "(";
    print_node(c, out);
    if (needs_parens) out += ")";
  };
  int p = print_prec(n.kind);
  switch (n.kind) {
    case node_kind::literal: out += literal_text(n.value); return;
    case node_kind::var_n: out += "n"; return;
    case node_kind::var_p: out += "p"; return;
    case node_kind::log_fn:
      out += "log(";
      print_node(*n.lhs, out);
      out += ")";
      return;
    case node_kind::sqrt_fn:
      out += "sqrt(";
      print_node(*n.lhs, out);
      out += ")";
      return;
    case node_kind::add:
    case node_kind::mul:
      child(*n.lhs, print_prec(n.lhs->kind) < p);
      out += (n.kind == node_kind::add) ? "+" : "*";
      child(*n.rhs, print_prec(n.rhs->kind) <= p);
      return;
    case node_kind::sub:
    case node_kind::div_op:
      child(*n.lhs, print_prec(n.lhs->kind) < p);
      out += (n.kind == node_kind::sub) ? "-" : "/";
      child(*n.rhs, print_prec(n.rhs->kind) <= p);
      return;
    case node_kind::pow_op:
      child(*n.lhs, print_prec(n.lhs->kind) <= p);
      out += "^";
      child(*n.rhs, print_prec(n.rhs->kind) < p);
      return;
  }
}

inline bool nodes_equal(const expr_node& a, const expr_node& b) {
  if (a.kind != b.kind) return false;
  if (a.kind == node_kind::literal) return a.value == b.value;
  if (a.lhs && (!b.lhs || !nodes_equal(*a.lhs, *b.lhs))) return false;
  if (!a.lhs && b.lhs) return false;
  if (a.rhs && (!b.rhs || !nodes_equal(*a.rhs, *b.rhs))) return false;
  if (!a.rhs && b.rhs) return false;
  return true;
}

inline bool node_uses_p(const expr_node& n) {
  if (n.kind == node_kind::var_p) return true;
  if (n.lhs && node_uses_p(*n.lhs)) return true;
  if (n.rhs && node_uses_p(*n.rhs)) return true;
  return false;
}

inline interval eval_interval(const expr_node& n, const eval_context& ctx,
                              mpfr_prec_t prec) {
  switch (n.kind) {
    case node_kind::literal: return interval::from_rational(n.value, prec);
    case node_kind::var_n: return interval::from_unsigned(ctx.n, prec);
    case node_kind::var_p: return interval::from_unsigned(ctx.p, prec);
    case node_kind::log_fn: return log_i(eval_interval(*n.lhs, ctx, prec));
    case node_kind::sqrt_fn: return sqrt_i(eval_interval(*n.lhs, ctx, prec));
    case node_kind::add:
      return add(eval_interval(*n.lhs, ctx, prec), eval_interval(*n.rhs, ctx, prec));
    case node_kind::sub:
      return sub(eval_interval(*n.lhs, ctx, prec), eval_interval(*n.rhs, ctx, prec));
    case node_kind::mul:
      return mul(eval_interval(*n.lhs, ctx, prec), eval_interval(*n.rhs, ctx, prec));
    case node_kind::div_op:
      return div(eval_interval(*n.lhs, ctx, prec), eval_interval(*n.rhs, ctx, prec));
    case node_kind::pow_op: {
      interval base = eval_interval(*n.lhs, ctx, prec);
      interval expo = eval_interval(*n.rhs, ctx, prec);
      // point integer exponents keep exactness and allow any base sign
      if (expo.is_point() && mpfr_integer_p(expo.lo()) &&
          mpfr_fits_slong_p(expo.lo(), MPFR_RNDN))
        return pow_int(base, mpfr_get_si(expo.lo(), MPFR_RNDN));
      if (base.certainly_nonpositive())
        throw domain_error("fractional power of a nonpositive enclosure");
      if (!base.certainly_positive())
        throw indeterminate_sign_error("power base straddles zero");
      return exp_i(mul(expo, log_i(base)));
    }
  }
  throw error("corrupt expression node");
}

inline std::optional<rational> eval_exact(const expr_node& n,
                                          const eval_context& ctx) {
  switch (n.kind) {
    case node_kind::literal: return n.value;
    case node_kind::var_n:
      return rational(mpz_class(static_cast<unsigned long>(ctx.n)));
    case node_kind::var_p:
      return rational(mpz_class(static_cast<unsigned long>(ctx.p)));
    case node_kind::log_fn:
    case node_kind::sqrt_fn: return std::nullopt;
    default: break;
  }
  auto l = eval_exact(*n.lhs, ctx);
  if (!l) return std::nullopt;
  auto r = eval_exact(*n.rhs, ctx);
  if (!r) return std::nullopt;
  switch (n.kind) {
    case node_kind::add: return *l + *r;
    case node_kind::sub: return *l - *r;
    case node_kind::mul: return *l * *r;
    case node_kind::div_op:
      if (*r == 0) throw domain_error("division by zero");
      return *l / *r;
    case node_kind::pow_op:
      if (!is_integer(*r) || !fits_long(r->get_num()))
        return std::nullopt;  // fractional exponent: no exact path
      return pow_rational(*l, r->get_num().get_si());
    default: break;
  }
  throw error("corrupt expression node");
}

}  // namespace detail

/// Immutable AST of a positive-sequence expression in the variables n
/// and p. Values are shared freely; evaluation is pure.
class seq_expr {
 public:
  static seq_expr parse(std::string_view text) {
    seq_expr e;
    e.root_ = detail::parser(text).parse();
    e.source_ = std::string(text);
    return e;
  }

  /// Canonical rendering; reparsing it yields a structurally identical AST.
  std::string str() const {
    std::string out;
    detail::print_node(*root_, out);
    return out;
  }

  /// The text the expression was parsed from.
  const std::string& source() const { return source_; }

  bool uses_prime_var() const { return detail::node_uses_p(*root_); }

  friend bool structurally_equal(const seq_expr& a, const seq_expr& b) {
    return detail::nodes_equal(*a.root_, *b.root_);
  }

  friend interval evaluate(const seq_expr&, const eval_context&, mpfr_prec_t,
                           bool);
  friend std::optional<rational> evaluate_exact(const seq_expr&,
                                                const eval_context&, bool);

 private:
  seq_expr() = default;
  detail::node_ptr root_;
  std::string source_;
};

/// Enclosure of the expression's value at the given precision. With
/// enforce_positive (the default) a certainly-nonpositive value is an
/// error and an unknown sign asks for precision escalation, matching the
/// positive-sequence hypothesis every consumer relies on.
inline interval evaluate(const seq_expr& e, const eval_context& ctx,
                         mpfr_prec_t prec, bool enforce_positive = true) {
  interval v = detail::eval_interval(*e.root_, ctx, prec);
  if (enforce_positive) {
    if (v.certainly_nonpositive())
      throw nonpositive_error("expression '" + e.source() +
                              "' is not positive at n=" + std::to_string(ctx.n));
    if (!v.certainly_positive())
      throw indeterminate_sign_error("sign of '" + e.source() +
                                     "' unresolved at n=" +
                                     std::to_string(ctx.n));
  }
  return v;
}

/// Exact rational value, or nullopt when the expression leaves rational
/// arithmetic (log, sqrt, or a fractional exponent anywhere in the tree).
inline std::optional<rational> evaluate_exact(const seq_expr& e,
                                              const eval_context& ctx,
                                              bool enforce_positive = true) {
  auto v = detail::eval_exact(*e.root_, ctx);
  if (v && enforce_positive && *v <= 0)
    throw nonpositive_error("expression '" + e.source() +
                            "' is not positive at n=" + std::to_string(ctx.n));
  return v;
}

/// CLI shorthand names for the sequences that come up all the time.
inline std::string expand_shorthand(std::string_view text) {
  if (text == "one") return "1";
  if (text == "nlogn") return "n*log(n)";
  return std::string(text);
}

}  // namespace pgk

#endif  // PGK_SEQ_EXPR_HPP
