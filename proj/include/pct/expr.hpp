#ifndef PCT_EXPR_HPP
#define PCT_EXPR_HPP

#include <cctype>
#include <cmath>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "pct/errors.hpp"
#include "pct/rational.hpp"

namespace pct {

// Immutable expression trees. Shared freely across threads after construction.

enum class NodeKind { Const, Var, Neg, Not, Bin, Cmp, And, Or, Call };
enum class BinOp { Add, Sub, Mul, Div };
enum class CmpOp { Lt, Le, Eq, Ne, Ge, Gt };

enum class Builtin { Ln, Exp, Sqrt, Abs, Min, Max, Floor, EuclidNorm, TowerHeight, Pow, If };

struct ExprNode;
using Expr = std::shared_ptr<const ExprNode>;

struct ExprNode {
  NodeKind kind;
  Rational value;            // Const
  std::string name;          // Var
  BinOp bin_op = BinOp::Add;
  CmpOp cmp_op = CmpOp::Eq;
  Builtin builtin = Builtin::Abs;
  std::vector<Expr> kids;
};

inline Expr make_const(Rational q) {
  auto n = std::make_shared<ExprNode>();
  n->kind = NodeKind::Const;
  n->value = std::move(q);
  return n;
}
inline Expr make_var(std::string name) {
  auto n = std::make_shared<ExprNode>();
  n->kind = NodeKind::Var;
  n->name = std::move(name);
  return n;
}
inline Expr make_unary(NodeKind k, Expr c) {
  auto n = std::make_shared<ExprNode>();
  n->kind = k;
  n->kids = {std::move(c)};
  return n;
}
inline Expr make_bin(BinOp op, Expr l, Expr r) {
  auto n = std::make_shared<ExprNode>();
  n->kind = NodeKind::Bin;
  n->bin_op = op;
  n->kids = {std::move(l), std::move(r)};
  return n;
}
inline Expr make_cmp(CmpOp op, Expr l, Expr r) {
  auto n = std::make_shared<ExprNode>();
  n->kind = NodeKind::Cmp;
  n->cmp_op = op;
  n->kids = {std::move(l), std::move(r)};
  return n;
}
inline Expr make_bool(NodeKind k, Expr l, Expr r) {
  auto n = std::make_shared<ExprNode>();
  n->kind = k;
  n->kids = {std::move(l), std::move(r)};
  return n;
}
inline Expr make_call(Builtin b, std::vector<Expr> args) {
  auto n = std::make_shared<ExprNode>();
  n->kind = NodeKind::Call;
  n->builtin = b;
  n->kids = std::move(args);
  return n;
}

inline const char* builtin_name(Builtin b) {
  switch (b) {
    case Builtin::Ln: return "ln";
    case Builtin::Exp: return "exp";
    case Builtin::Sqrt: return "sqrt";
    case Builtin::Abs: return "abs";
    case Builtin::Min: return "min";
    case Builtin::Max: return "max";
    case Builtin::Floor: return "floor";
    case Builtin::EuclidNorm: return "euclid_norm";
    case Builtin::TowerHeight: return "tower_height";
    case Builtin::Pow: return "pow";
    case Builtin::If: return "if";
  }
  return "?";
}

inline bool expr_equal(const Expr& a, const Expr& b) {
  if (a.get() == b.get()) return true;
  if (!a || !b) return false;
  if (a->kind != b->kind || a->kids.size() != b->kids.size()) return false;
  switch (a->kind) {
    case NodeKind::Const:
      if (a->value != b->value) return false;
      break;
    case NodeKind::Var:
      if (a->name != b->name) return false;
      break;
    case NodeKind::Bin:
      if (a->bin_op != b->bin_op) return false;
      break;
    case NodeKind::Cmp:
      if (a->cmp_op != b->cmp_op) return false;
      break;
    case NodeKind::Call:
      if (a->builtin != b->builtin) return false;
      break;
    default:
      break;
  }
  for (std::size_t i = 0; i < a->kids.size(); ++i)
    if (!expr_equal(a->kids[i], b->kids[i])) return false;
  return true;
}

inline void collect_free_vars(const Expr& e, std::set<std::string>& out) {
  if (e->kind == NodeKind::Var) out.insert(e->name);
  for (const auto& k : e->kids) collect_free_vars(k, out);
}
inline std::set<std::string> free_vars(const Expr& e) {
  std::set<std::string> out;
  collect_free_vars(e, out);
  return out;
}

inline void check_vars(const Expr& e, const std::set<std::string>& declared) {
  for (const auto& v : free_vars(e))
    if (!declared.count(v)) fail(ErrorKind::UnknownIdentifier, "undeclared variable '" + v + "'");
}

// ln/exp/sqrt (and euclid_norm, which hides a sqrt) force binary64 evaluation.
inline bool has_non_exact_node(const Expr& e) {
  if (e->kind == NodeKind::Call &&
      (e->builtin == Builtin::Ln || e->builtin == Builtin::Exp || e->builtin == Builtin::Sqrt ||
       e->builtin == Builtin::EuclidNorm))
    return true;
  for (const auto& k : e->kids)
    if (has_non_exact_node(k)) return true;
  return false;
}

inline bool has_variable_exponent_pow(const Expr& e) {
  if (e->kind == NodeKind::Call && e->builtin == Builtin::Pow && e->kids.size() == 2 &&
      !free_vars(e->kids[1]).empty())
    return true;
  for (const auto& k : e->kids)
    if (has_variable_exponent_pow(k)) return true;
  return false;
}

// ---------------------------------------------------------------------------
// Evaluation

using Env = std::map<std::string, Rational>;

inline Rational eval_exact(const Expr& e, const Env& env);

inline bool eval_truth_exact(const Expr& e, const Env& env) { return eval_exact(e, env) != 0; }

inline Rational eval_exact(const Expr& e, const Env& env) {
  switch (e->kind) {
    case NodeKind::Const:
      return e->value;
    case NodeKind::Var: {
      auto it = env.find(e->name);
      if (it == env.end()) fail(ErrorKind::UnknownIdentifier, "unbound variable '" + e->name + "'");
      return it->second;
    }
    case NodeKind::Neg:
      return -eval_exact(e->kids[0], env);
    case NodeKind::Not:
      return eval_truth_exact(e->kids[0], env) ? Rational(0) : Rational(1);
    case NodeKind::Bin: {
      Rational l = eval_exact(e->kids[0], env);
      Rational r = eval_exact(e->kids[1], env);
      switch (e->bin_op) {
        case BinOp::Add: return l + r;
        case BinOp::Sub: return l - r;
        case BinOp::Mul: return l * r;
        case BinOp::Div:
          if (r == 0) fail(ErrorKind::DivisionByZero, "division by zero");
          return l / r;
      }
      break;
    }
    case NodeKind::Cmp: {
      Rational l = eval_exact(e->kids[0], env);
      Rational r = eval_exact(e->kids[1], env);
      bool t = false;
      switch (e->cmp_op) {
        case CmpOp::Lt: t = l < r; break;
        case CmpOp::Le: t = l <= r; break;
        case CmpOp::Eq: t = l == r; break;
        case CmpOp::Ne: t = l != r; break;
        case CmpOp::Ge: t = l >= r; break;
        case CmpOp::Gt: t = l > r; break;
      }
      return t ? Rational(1) : Rational(0);
    }
    case NodeKind::And:
      return (eval_truth_exact(e->kids[0], env) && eval_truth_exact(e->kids[1], env)) ? Rational(1)
                                                                                      : Rational(0);
    case NodeKind::Or:
      return (eval_truth_exact(e->kids[0], env) || eval_truth_exact(e->kids[1], env)) ? Rational(1)
                                                                                      : Rational(0);
    case NodeKind::Call: {
      switch (e->builtin) {
        case Builtin::Ln:
        case Builtin::Exp:
        case Builtin::Sqrt:
        case Builtin::EuclidNorm:
          fail(ErrorKind::Exactness,
               std::string("'") + builtin_name(e->builtin) + "' is not evaluable in exact mode");
        case Builtin::Abs:
          return rational_abs(eval_exact(e->kids[0], env));
        case Builtin::Min: {
          Rational a = eval_exact(e->kids[0], env), b = eval_exact(e->kids[1], env);
          return a < b ? a : b;
        }
        case Builtin::Max: {
          Rational a = eval_exact(e->kids[0], env), b = eval_exact(e->kids[1], env);
          return a > b ? a : b;
        }
        case Builtin::Floor:
          return Rational(rational_floor(eval_exact(e->kids[0], env)));
        case Builtin::TowerHeight:
          return Rational(tower_height(eval_exact(e->kids[0], env), eval_exact(e->kids[1], env)));
        case Builtin::Pow: {
          Rational b = eval_exact(e->kids[0], env);
          Rational x = eval_exact(e->kids[1], env);
          if (!is_integer(x)) fail(ErrorKind::Domain, "pow exponent must be an integer");
          return rational_pow(b, rational_num(x));
        }
        case Builtin::If:
          return eval_truth_exact(e->kids[0], env) ? eval_exact(e->kids[1], env)
                                                   : eval_exact(e->kids[2], env);
      }
      break;
    }
  }
  fail(ErrorKind::Domain, "malformed expression node");
}

inline double eval_approx(const Expr& e, const Env& env);

inline bool eval_truth_approx(const Expr& e, const Env& env) { return eval_approx(e, env) != 0.0; }

inline double eval_approx(const Expr& e, const Env& env) {
  switch (e->kind) {
    case NodeKind::Const:
      return to_double(e->value);
    case NodeKind::Var: {
      auto it = env.find(e->name);
      if (it == env.end()) fail(ErrorKind::UnknownIdentifier, "unbound variable '" + e->name + "'");
      return to_double(it->second);
    }
    case NodeKind::Neg:
      return -eval_approx(e->kids[0], env);
    case NodeKind::Not:
      return eval_truth_approx(e->kids[0], env) ? 0.0 : 1.0;
    case NodeKind::Bin: {
      double l = eval_approx(e->kids[0], env);
      double r = eval_approx(e->kids[1], env);
      switch (e->bin_op) {
        case BinOp::Add: return l + r;
        case BinOp::Sub: return l - r;
        case BinOp::Mul: return l * r;
        case BinOp::Div:
          if (r == 0.0) fail(ErrorKind::DivisionByZero, "division by zero");
          return l / r;
      }
      break;
    }
    case NodeKind::Cmp: {
      double l = eval_approx(e->kids[0], env);
      double r = eval_approx(e->kids[1], env);
      bool t = false;
      switch (e->cmp_op) {
        case CmpOp::Lt: t = l < r; break;
        case CmpOp::Le: t = l <= r; break;
        case CmpOp::Eq: t = l == r; break;
        case CmpOp::Ne: t = l != r; break;
        case CmpOp::Ge: t = l >= r; break;
        case CmpOp::Gt: t = l > r; break;
      }
      return t ? 1.0 : 0.0;
    }
    case NodeKind::And:
      return (eval_truth_approx(e->kids[0], env) && eval_truth_approx(e->kids[1], env)) ? 1.0 : 0.0;
    case NodeKind::Or:
      return (eval_truth_approx(e->kids[0], env) || eval_truth_approx(e->kids[1], env)) ? 1.0 : 0.0;
    case NodeKind::Call: {
      switch (e->builtin) {
        case Builtin::Ln: {
          double x = eval_approx(e->kids[0], env);
          if (!(x > 0.0)) fail(ErrorKind::Domain, "ln of a non-positive value");
          return std::log(x);
        }
        case Builtin::Exp:
          return std::exp(eval_approx(e->kids[0], env));
        case Builtin::Sqrt: {
          double x = eval_approx(e->kids[0], env);
          if (x < 0.0) fail(ErrorKind::Domain, "sqrt of a negative value");
          return std::sqrt(x);
        }
        case Builtin::Abs:
          return std::fabs(eval_approx(e->kids[0], env));
        case Builtin::Min:
          return std::fmin(eval_approx(e->kids[0], env), eval_approx(e->kids[1], env));
        case Builtin::Max:
          return std::fmax(eval_approx(e->kids[0], env), eval_approx(e->kids[1], env));
        case Builtin::Floor:
          return std::floor(eval_approx(e->kids[0], env));
        case Builtin::EuclidNorm: {
          double a = eval_approx(e->kids[0], env);
          double b = eval_approx(e->kids[1], env);
          return std::sqrt(a * a + b * b);
        }
        case Builtin::TowerHeight: {
          double b = eval_approx(e->kids[0], env);
          double v = eval_approx(e->kids[1], env);
          if (b < 2.0 || std::fabs(b - std::nearbyint(b)) > 1e-9)
            fail(ErrorKind::Domain, "tower_height base must be an integer >= 2");
          if (v <= b) return 0.0;
          double t = b;
          double k = 0.0;
          while (t < v && std::isfinite(t)) {
            t = std::pow(b, t);
            k += 1.0;
          }
          return k;
        }
        case Builtin::Pow: {
          double b = eval_approx(e->kids[0], env);
          double x = eval_approx(e->kids[1], env);
          if (std::fabs(x - std::nearbyint(x)) > 1e-9)
            fail(ErrorKind::Domain, "pow exponent must be an integer");
          double k = std::nearbyint(x);
          if (k < 0.0 && b == 0.0) fail(ErrorKind::DivisionByZero, "0 raised to a negative exponent");
          return std::pow(b, k);
        }
        case Builtin::If:
          return eval_truth_approx(e->kids[0], env) ? eval_approx(e->kids[1], env)
                                                    : eval_approx(e->kids[2], env);
      }
      break;
    }
  }
  fail(ErrorKind::Domain, "malformed expression node");
}

// ---------------------------------------------------------------------------
// Parsing

namespace detail {

struct Lexer {
  const std::string& text;
  std::size_t pos = 0;

  explicit Lexer(const std::string& t) : text(t) {}

  void skip_ws() {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  }
  bool eof() {
    skip_ws();
    return pos >= text.size();
  }
  char peek() {
    skip_ws();
    return pos < text.size() ? text[pos] : '\0';
  }
  bool try_consume(const std::string& tok) {
    skip_ws();
    if (text.compare(pos, tok.size(), tok) == 0) {
      pos += tok.size();
      return true;
    }
    return false;
  }
  void expect(const std::string& tok) {
    if (!try_consume(tok))
      fail(ErrorKind::Syntax, "expected '" + tok + "'", pos);
  }
};

inline bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
inline bool ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.';
}

struct ExprParser {
  Lexer lex;

  explicit ExprParser(const std::string& t) : lex(t) {}

  Expr parse_full() {
    Expr e = parse_or();
    if (!lex.eof()) fail(ErrorKind::Syntax, "unexpected trailing input", lex.pos);
    return e;
  }

  Expr parse_or() {
    Expr l = parse_and();
    while (lex.try_consume("||")) l = make_bool(NodeKind::Or, l, parse_and());
    return l;
  }
  Expr parse_and() {
    Expr l = parse_not();
    while (lex.try_consume("&&")) l = make_bool(NodeKind::And, l, parse_not());
    return l;
  }
  Expr parse_not() {
    lex.skip_ws();
    // '!' only when not part of '!='
    if (lex.pos < lex.text.size() && lex.text[lex.pos] == '!' &&
        (lex.pos + 1 >= lex.text.size() || lex.text[lex.pos + 1] != '=')) {
      ++lex.pos;
      return make_unary(NodeKind::Not, parse_not());
    }
    return parse_cmp();
  }
  Expr parse_cmp() {
    Expr l = parse_add();
    lex.skip_ws();
    CmpOp op;
    if (lex.try_consume("<=")) op = CmpOp::Le;
    else if (lex.try_consume(">=")) op = CmpOp::Ge;
    else if (lex.try_consume("!=")) op = CmpOp::Ne;
    else if (lex.try_consume("==")) op = CmpOp::Eq;
    else if (lex.try_consume("<")) op = CmpOp::Lt;
    else if (lex.try_consume(">")) op = CmpOp::Gt;
    else if (lex.try_consume("=")) op = CmpOp::Eq;
    else return l;
    return make_cmp(op, l, parse_add());
  }
  Expr parse_add() {
    Expr l = parse_mul();
    for (;;) {
      if (lex.try_consume("+")) l = make_bin(BinOp::Add, l, parse_mul());
      else if (lex.try_consume("-")) l = make_bin(BinOp::Sub, l, parse_mul());
      else return l;
    }
  }
  Expr parse_mul() {
    Expr l = parse_unary();
    for (;;) {
      if (lex.try_consume("*")) l = make_bin(BinOp::Mul, l, parse_unary());
      else if (lex.try_consume("/")) {
        Expr r = parse_unary();
        // `a/b` on literals is rational notation, not a division node
        if (l->kind == NodeKind::Const && r->kind == NodeKind::Const && r->value != 0)
          l = make_const(l->value / r->value);
        else
          l = make_bin(BinOp::Div, l, r);
      } else
        return l;
    }
  }
  Expr parse_unary() {
    if (lex.try_consume("-")) {
      Expr c = parse_unary();
      if (c->kind == NodeKind::Const) return make_const(-c->value);  // keeps printing round-trippable
      return make_unary(NodeKind::Neg, c);
    }
    return parse_primary();
  }

  Expr parse_primary() {
    lex.skip_ws();
    if (lex.pos >= lex.text.size()) fail(ErrorKind::Syntax, "expected an expression", lex.pos);
    char c = lex.text[lex.pos];
    if (std::isdigit(static_cast<unsigned char>(c))) return parse_number();
    if (ident_start(c)) return parse_ident_or_call();
    if (c == '(') {
      ++lex.pos;
      Expr e = parse_or();
      lex.expect(")");
      return e;
    }
    fail(ErrorKind::Syntax, "expected a number, identifier or '('", lex.pos);
  }

  Expr parse_number() {
    std::size_t start = lex.pos;
    while (lex.pos < lex.text.size() && std::isdigit(static_cast<unsigned char>(lex.text[lex.pos])))
      ++lex.pos;
    Integer int_part(lex.text.substr(start, lex.pos - start));
    if (lex.pos < lex.text.size() && lex.text[lex.pos] == '.') {
      ++lex.pos;
      std::size_t fstart = lex.pos;
      while (lex.pos < lex.text.size() &&
             std::isdigit(static_cast<unsigned char>(lex.text[lex.pos])))
        ++lex.pos;
      if (lex.pos == fstart) fail(ErrorKind::Syntax, "expected digits after '.'", lex.pos);
      std::string frac = lex.text.substr(fstart, lex.pos - fstart);
      Integer den = 1;
      for (std::size_t i = 0; i < frac.size(); ++i) den *= 10;
      Rational q(int_part * den + Integer(frac), den);
      return make_const(q);
    }
    return make_const(Rational(int_part));
  }

  Expr parse_ident_or_call() {
    std::size_t start = lex.pos;
    while (lex.pos < lex.text.size() && ident_char(lex.text[lex.pos])) ++lex.pos;
    std::string name = lex.text.substr(start, lex.pos - start);
    if (name == "true") return make_const(Rational(1));
    if (name == "false") return make_const(Rational(0));
    lex.skip_ws();
    if (lex.pos < lex.text.size() && lex.text[lex.pos] == '(') {
      ++lex.pos;
      std::vector<Expr> args;
      if (lex.peek() != ')') {
        args.push_back(parse_or());
        while (lex.try_consume(",")) args.push_back(parse_or());
      }
      lex.expect(")");
      return make_builtin_call(name, std::move(args), start);
    }
    return make_var(name);
  }

  Expr make_builtin_call(const std::string& name, std::vector<Expr> args, std::size_t at) {
    struct Entry {
      const char* name;
      Builtin b;
      std::size_t arity;
    };
    static const Entry table[] = {
        {"ln", Builtin::Ln, 1},          {"exp", Builtin::Exp, 1},
        {"sqrt", Builtin::Sqrt, 1},      {"abs", Builtin::Abs, 1},
        {"min", Builtin::Min, 2},        {"max", Builtin::Max, 2},
        {"floor", Builtin::Floor, 1},    {"euclid_norm", Builtin::EuclidNorm, 2},
        {"tower_height", Builtin::TowerHeight, 2},
        {"pow", Builtin::Pow, 2},        {"if", Builtin::If, 3},
    };
    for (const auto& entry : table) {
      if (name == entry.name) {
        if (args.size() != entry.arity)
          fail(ErrorKind::Syntax,
               "'" + name + "' takes " + std::to_string(entry.arity) + " argument(s)", at);
        return make_call(entry.b, std::move(args));
      }
    }
    fail(ErrorKind::UnknownIdentifier, "unknown function '" + name + "'", at);
  }
};

}  // namespace detail

inline Expr parse_expr(const std::string& text) { return detail::ExprParser(text).parse_full(); }

// ---------------------------------------------------------------------------
// Printing (parse_expr of the output reproduces the tree)

namespace detail {

// Precedence levels, loosest first.
enum Prec { PrecOr = 0, PrecAnd, PrecNot, PrecCmp, PrecAdd, PrecMul, PrecUnary, PrecAtom };

inline void print_expr(const Expr& e, int parent, std::string& out) {
  auto wrap = [&](int mine, auto&& body) {
    bool paren = mine < parent;
    if (paren) out += "(";
    body();
    if (paren) out += ")";
  };
  switch (e->kind) {
    case NodeKind::Const:
      if (e->value < 0) {
        wrap(PrecUnary, [&] { out += rational_str(e->value); });
      } else {
        out += rational_str(e->value);
      }
      return;
    case NodeKind::Var:
      out += e->name;
      return;
    case NodeKind::Neg:
      wrap(PrecUnary, [&] {
        out += "-";
        print_expr(e->kids[0], PrecAtom, out);
      });
      return;
    case NodeKind::Not:
      wrap(PrecNot, [&] {
        out += "!";
        print_expr(e->kids[0], PrecAtom, out);
      });
      return;
    case NodeKind::Bin: {
      int mine = (e->bin_op == BinOp::Add || e->bin_op == BinOp::Sub) ? PrecAdd : PrecMul;
      const char* op = e->bin_op == BinOp::Add   ? " + "
                       : e->bin_op == BinOp::Sub ? " - "
                       : e->bin_op == BinOp::Mul ? " * "
                                                 : " / ";
      wrap(mine, [&] {
        print_expr(e->kids[0], mine, out);
        out += op;
        print_expr(e->kids[1], mine + 1, out);  // left-assoc
      });
      return;
    }
    case NodeKind::Cmp: {
      const char* op = nullptr;
      switch (e->cmp_op) {
        case CmpOp::Lt: op = " < "; break;
        case CmpOp::Le: op = " <= "; break;
        case CmpOp::Eq: op = " = "; break;
        case CmpOp::Ne: op = " != "; break;
        case CmpOp::Ge: op = " >= "; break;
        case CmpOp::Gt: op = " > "; break;
      }
      wrap(PrecCmp, [&] {
        print_expr(e->kids[0], PrecCmp + 1, out);
        out += op;
        print_expr(e->kids[1], PrecCmp + 1, out);
      });
      return;
    }
    case NodeKind::And:
      wrap(PrecAnd, [&] {
        print_expr(e->kids[0], PrecAnd, out);
        out += " && ";
        print_expr(e->kids[1], PrecAnd + 1, out);
      });
      return;
    case NodeKind::Or:
      wrap(PrecOr, [&] {
        print_expr(e->kids[0], PrecOr, out);
        out += " || ";
        print_expr(e->kids[1], PrecOr + 1, out);
      });
      return;
    case NodeKind::Call:
      out += builtin_name(e->builtin);
      out += "(";
      for (std::size_t i = 0; i < e->kids.size(); ++i) {
        if (i) out += ", ";
        print_expr(e->kids[i], PrecOr, out);
      }
      out += ")";
      return;
  }
}

}  // namespace detail

inline std::string pretty_print(const Expr& e) {
  std::string out;
  detail::print_expr(e, detail::PrecOr, out);
  return out;
}

}  // namespace pct

#endif
