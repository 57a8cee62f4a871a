#ifndef PCT_CERTIFICATES_HPP
#define PCT_CERTIFICATES_HPP

#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "pct/program.hpp"

namespace pct {

// ---------------------------------------------------------------------------
// Value functions: per-location closed forms or explicit state tables.

using TableKey = std::pair<std::string, std::vector<Rational>>;  // (location name, valuation)

struct ValueFunction {
  std::string name;
  bool is_table = false;

  // closed form, first matching case wins; "*" matches any location
  std::vector<std::pair<std::string, Expr>> cases;

  // table
  std::map<TableKey, Rational> table;
  bool default_is_error = true;
  Rational default_value;
  bool approx_hint = false;  // values came from binary64 computation

  bool exact_capable() const {
    if (is_table) return !approx_hint;
    for (const auto& [loc, e] : cases)
      if (has_non_exact_node(e)) return false;
    return true;
  }
};

inline TableKey table_key(const ProgramGraph& g, const State& s) {
  return {g.location_names[s.location], s.valuation};
}

// Anchor bindings for two-argument value functions (rule 7): the anchor's
// valuation is exposed as sigma.<var> plus sigma.loc (location ordinal).
inline void bind_anchor(const ProgramGraph& g, const State& anchor, Env& env) {
  for (std::size_t i = 0; i < g.variables.size(); ++i)
    env["sigma." + g.variables[i]] = anchor.valuation[i];
  env["sigma.loc"] = Rational(static_cast<long>(anchor.location));
}

inline const Expr* closed_form_case(const ValueFunction& f, const std::string& loc) {
  for (const auto& [name, e] : f.cases)
    if (name == loc) return &e;
  for (const auto& [name, e] : f.cases)
    if (name == "*") return &e;
  return nullptr;
}

inline Rational cert_eval_exact(const ProgramGraph& g, const ValueFunction& f, const State& s,
                                const State* anchor = nullptr) {
  if (f.is_table) {
    if (f.approx_hint)
      fail(ErrorKind::Exactness, "table '" + f.name + "' holds binary64 values");
    auto it = f.table.find(table_key(g, s));
    if (it != f.table.end()) return it->second;
    if (f.default_is_error)
      fail(ErrorKind::UndefinedAt, "'" + f.name + "' has no entry at " + g.state_str(s));
    return f.default_value;
  }
  const Expr* e = closed_form_case(f, g.location_names[s.location]);
  if (!e)
    fail(ErrorKind::UndefinedAt, "'" + f.name + "' has no case for location '" +
                                     g.location_names[s.location] + "'");
  Env env = g.environment(s);
  if (anchor) bind_anchor(g, *anchor, env);
  return eval_exact(*e, env);
}

inline double cert_eval_approx(const ProgramGraph& g, const ValueFunction& f, const State& s,
                               const State* anchor = nullptr) {
  if (f.is_table) {
    auto it = f.table.find(table_key(g, s));
    if (it != f.table.end()) return to_double(it->second);
    if (f.default_is_error)
      fail(ErrorKind::UndefinedAt, "'" + f.name + "' has no entry at " + g.state_str(s));
    return to_double(f.default_value);
  }
  const Expr* e = closed_form_case(f, g.location_names[s.location]);
  if (!e)
    fail(ErrorKind::UndefinedAt, "'" + f.name + "' has no case for location '" +
                                     g.location_names[s.location] + "'");
  Env env = g.environment(s);
  if (anchor) bind_anchor(g, *anchor, env);
  return eval_approx(*e, env);
}

// ---------------------------------------------------------------------------
// Certificate records, one per proof rule.

enum class RuleTag { Variant, Martingale, SMVariant, Upper, SILower, LowerFamily, SIAst };

inline const char* rule_tag_name(RuleTag t) {
  switch (t) {
    case RuleTag::Variant: return "variant";
    case RuleTag::Martingale: return "martingale";
    case RuleTag::SMVariant: return "smvariant";
    case RuleTag::Upper: return "upper";
    case RuleTag::SILower: return "silower";
    case RuleTag::LowerFamily: return "lowerfamily";
    case RuleTag::SIAst: return "siast";
  }
  return "?";
}

struct VariantCert {
  Expr inv;
  ValueFunction U;
  Rational lo, hi, eps;
};

struct SublevelWitness {
  Rational r;
  Integer bound;  // cap on U inside the sublevel set
  Rational eps;
};

struct MartingaleCert {
  Expr inv;
  ValueFunction V, U;
  std::vector<SublevelWitness> witnesses;
};

struct SMVariantCert {
  Expr inv;
  ValueFunction V;
  Expr p_fn, d_fn;  // functions of one variable `v`
  std::vector<Rational> grid;
};

struct SICert {
  Expr inv;
  ValueFunction SI;
  Rational p;
};

struct SILowerCert {
  SICert si;
  ValueFunction U;
  Rational eps;
  Integer bound;                       // H
  std::optional<std::size_t> depth;    // suggested region depth
};

struct LowerFamilyCert {
  Rational p;
  std::vector<std::pair<Integer, SILowerCert>> entries;
};

struct SIAstAnchor {
  State anchor;  // resolved against the program at check time via names
  TableKey key;  // as parsed
  ValueFunction SI, U;
  Rational eps;
  Integer bound;
};

struct SIAstCert {
  Expr inv;
  Rational p;
  std::vector<SIAstAnchor> anchors;
};

struct Certificate {
  RuleTag rule;
  std::variant<VariantCert, MartingaleCert, SMVariantCert, SICert, SILowerCert, LowerFamilyCert,
               SIAstCert>
      body;
};

// ---------------------------------------------------------------------------
// Certificate format

namespace detail {

inline Rational parse_rational_text(Lexer& lex, const std::string& stops) {
  Expr e = parse_expr_until(lex, stops);
  if (!free_vars(e).empty()) fail(ErrorKind::Syntax, "expected a constant", lex.pos);
  return eval_exact(e, {});
}

inline TableKey parse_state_key(Lexer& lex) {
  lex.expect("(");
  TableKey key;
  key.first = parse_name(lex);
  while (lex.try_consume(",")) key.second.push_back(parse_rational_text(lex, ",)"));
  lex.expect(")");
  return key;
}

inline void parse_table_body(Lexer& lex, ValueFunction& f) {
  f.is_table = true;
  lex.expect("{");
  while (!lex.try_consume("}")) {
    if (lex.try_consume("default")) {
      lex.expect("=");
      if (lex.try_consume("error")) {
        f.default_is_error = true;
      } else {
        f.default_is_error = false;
        f.default_value = parse_rational_text(lex, ";");
      }
      lex.expect(";");
    } else if (lex.try_consume("mode")) {
      lex.expect("=");
      std::string m = parse_name(lex);
      if (m == "approx") f.approx_hint = true;
      else if (m != "exact") fail(ErrorKind::Syntax, "table mode must be exact or approx", lex.pos);
      lex.expect(";");
    } else {
      TableKey key = parse_state_key(lex);
      lex.expect("=");
      Rational v = parse_rational_text(lex, ";");
      lex.expect(";");
      if (!f.table.emplace(std::move(key), std::move(v)).second)
        fail(ErrorKind::Syntax, "duplicate table entry", lex.pos);
    }
  }
}

struct CertSection {
  Expr inv = make_const(Rational(1));
  std::map<std::string, ValueFunction> fns;
  std::map<std::string, Rational> scalars;       // lo, hi, eps, p, H
  std::optional<std::size_t> depth;
  Expr p_fn, d_fn;
  std::vector<Rational> grid;
  std::vector<SublevelWitness> witnesses;
};

inline ValueFunction take_fn(CertSection& sec, const std::string& name, RuleTag rule) {
  auto it = sec.fns.find(name);
  if (it == sec.fns.end())
    fail(ErrorKind::RuleMismatch, std::string(rule_tag_name(rule)) + " certificate is missing '" +
                                      name + "'");
  ValueFunction f = std::move(it->second);
  sec.fns.erase(it);
  return f;
}

inline Rational take_scalar(CertSection& sec, const std::string& key, RuleTag rule) {
  auto it = sec.scalars.find(key);
  if (it == sec.scalars.end())
    fail(ErrorKind::RuleMismatch, std::string(rule_tag_name(rule)) + " certificate is missing '" +
                                      key + "'");
  Rational v = it->second;
  sec.scalars.erase(it);
  return v;
}

inline void parse_section_statement(Lexer& lex, CertSection& sec) {
  if (lex.try_consume("invariant")) {
    lex.expect(":");
    sec.inv = parse_expr_until(lex, ";");
    lex.expect(";");
  } else if (lex.try_consume("fn")) {
    std::string name = parse_name(lex);
    lex.expect("at");
    std::string loc = lex.try_consume("*") ? "*" : parse_name(lex);
    lex.expect(":");
    Expr e = parse_expr_until(lex, ";");
    lex.expect(";");
    auto& f = sec.fns[name];
    f.name = name;
    f.cases.emplace_back(loc, e);
  } else if (lex.try_consume("table")) {
    std::string name = parse_name(lex);
    auto& f = sec.fns[name];
    f.name = name;
    parse_table_body(lex, f);
    lex.expect(";");
  } else if (lex.try_consume("witness")) {
    lex.expect(":");
    SublevelWitness w;
    lex.expect("r");
    lex.expect("=");
    w.r = parse_rational_text(lex, ",");
    lex.expect(",");
    lex.expect("H");
    lex.expect("=");
    Rational h = parse_rational_text(lex, ",");
    if (!is_integer(h) || h < 0) fail(ErrorKind::Range, "witness H must be a natural number");
    w.bound = rational_num(h);
    lex.expect(",");
    lex.expect("eps");
    lex.expect("=");
    w.eps = parse_rational_text(lex, ";");
    if (w.eps <= 0) fail(ErrorKind::Range, "witness eps must be positive");
    lex.expect(";");
    sec.witnesses.push_back(std::move(w));
  } else if (lex.try_consume("grid")) {
    lex.expect(":");
    sec.grid.push_back(parse_rational_text(lex, ",;"));
    while (lex.try_consume(",")) sec.grid.push_back(parse_rational_text(lex, ",;"));
    lex.expect(";");
  } else if (lex.try_consume("p_fn")) {
    lex.expect(":");
    sec.p_fn = parse_expr_until(lex, ";");
    lex.expect(";");
  } else if (lex.try_consume("d_fn")) {
    lex.expect(":");
    sec.d_fn = parse_expr_until(lex, ";");
    lex.expect(";");
  } else if (lex.try_consume("depth")) {
    lex.expect(":");
    Rational d = parse_rational_text(lex, ";");
    lex.expect(";");
    if (!is_integer(d) || d < 0) fail(ErrorKind::Range, "depth must be a natural number");
    sec.depth = d.template convert_to<std::size_t>();
  } else {
    std::string key = parse_name(lex);
    lex.expect(":");
    Rational v = parse_rational_text(lex, ";");
    lex.expect(";");
    if (!sec.scalars.emplace(key, v).second)
      fail(ErrorKind::Syntax, "duplicate key '" + key + "'", lex.pos);
  }
}

inline SICert finish_si(CertSection& sec, RuleTag rule) {
  SICert c;
  c.inv = sec.inv;
  c.SI = take_fn(sec, "SI", rule);
  c.p = take_scalar(sec, "p", rule);
  if (c.p <= 0 || c.p >= 1) fail(ErrorKind::Range, "p must lie in (0, 1)");
  return c;
}

inline SILowerCert finish_silower(CertSection& sec) {
  SILowerCert c;
  c.si = finish_si(sec, RuleTag::SILower);
  c.U = take_fn(sec, "U", RuleTag::SILower);
  c.eps = take_scalar(sec, "eps", RuleTag::SILower);
  if (c.eps <= 0) fail(ErrorKind::Range, "eps must be positive");
  Rational h = take_scalar(sec, "H", RuleTag::SILower);
  if (!is_integer(h) || h < 0) fail(ErrorKind::Range, "H must be a natural number");
  c.bound = rational_num(h);
  c.depth = sec.depth;
  return c;
}

inline void reject_leftovers(const CertSection& sec, RuleTag rule, bool allow_witnesses = false,
                             bool allow_grid = false) {
  if (!sec.fns.empty())
    fail(ErrorKind::RuleMismatch, std::string("unexpected value function '") +
                                      sec.fns.begin()->first + "' in a " + rule_tag_name(rule) +
                                      " certificate");
  if (!sec.scalars.empty())
    fail(ErrorKind::RuleMismatch, std::string("unexpected key '") + sec.scalars.begin()->first +
                                      "' in a " + rule_tag_name(rule) + " certificate");
  if (!allow_witnesses && !sec.witnesses.empty())
    fail(ErrorKind::RuleMismatch,
         std::string("witness lines are not part of a ") + rule_tag_name(rule) + " certificate");
  if (!allow_grid && (!sec.grid.empty() || sec.p_fn || sec.d_fn))
    fail(ErrorKind::RuleMismatch, std::string("grid/p_fn/d_fn are not part of a ") +
                                      rule_tag_name(rule) + " certificate");
}

}  // namespace detail

inline Certificate parse_certificate(const std::string& source) {
  std::string text = source;
  detail::strip_comments(text);
  detail::Lexer lex(text);
  lex.expect("rule");
  lex.expect(":");
  std::string rule_name = detail::parse_name(lex);
  lex.expect(";");

  RuleTag rule;
  if (rule_name == "variant") rule = RuleTag::Variant;
  else if (rule_name == "martingale") rule = RuleTag::Martingale;
  else if (rule_name == "smvariant") rule = RuleTag::SMVariant;
  else if (rule_name == "upper") rule = RuleTag::Upper;
  else if (rule_name == "silower") rule = RuleTag::SILower;
  else if (rule_name == "lowerfamily") rule = RuleTag::LowerFamily;
  else if (rule_name == "siast") rule = RuleTag::SIAst;
  else fail(ErrorKind::Syntax, "unknown rule '" + rule_name + "'", lex.pos);

  Certificate cert;
  cert.rule = rule;

  if (rule == RuleTag::LowerFamily) {
    LowerFamilyCert fam;
    std::optional<Rational> p;
    while (!lex.eof()) {
      if (lex.try_consume("entry")) {
        lex.expect("n");
        lex.expect("=");
        Rational n = detail::parse_rational_text(lex, "{");
        if (!is_integer(n) || n < 1) fail(ErrorKind::Range, "entry n must be a positive integer");
        lex.expect("{");
        detail::CertSection sec;
        while (!lex.try_consume("}")) detail::parse_section_statement(lex, sec);
        SILowerCert sub = detail::finish_silower(sec);
        detail::reject_leftovers(sec, RuleTag::SILower);
        for (const auto& [n0, _] : fam.entries)
          if (n0 == rational_num(n)) fail(ErrorKind::Range, "duplicate entry n");
        fam.entries.emplace_back(rational_num(n), std::move(sub));
      } else if (lex.try_consume("p")) {
        lex.expect(":");
        p = detail::parse_rational_text(lex, ";");
        lex.expect(";");
      } else {
        fail(ErrorKind::Syntax, "expected 'p' or 'entry'", lex.pos);
      }
    }
    if (!p) fail(ErrorKind::RuleMismatch, "lowerfamily certificate is missing 'p'");
    if (*p < 0 || *p >= 1) fail(ErrorKind::Range, "p must lie in [0, 1)");
    if (fam.entries.empty()) fail(ErrorKind::RuleMismatch, "lowerfamily needs at least one entry");
    fam.p = *p;
    cert.body = std::move(fam);
    return cert;
  }

  if (rule == RuleTag::SIAst) {
    SIAstCert c;
    detail::CertSection head;
    std::vector<SIAstAnchor> anchors;
    while (!lex.eof()) {
      if (lex.try_consume("anchor")) {
        SIAstAnchor a;
        a.key = detail::parse_state_key(lex);
        lex.expect("{");
        detail::CertSection sec;
        while (!lex.try_consume("}")) detail::parse_section_statement(lex, sec);
        a.SI = detail::take_fn(sec, "SI", RuleTag::SIAst);
        a.U = detail::take_fn(sec, "U", RuleTag::SIAst);
        a.eps = detail::take_scalar(sec, "eps", RuleTag::SIAst);
        if (a.eps <= 0 || a.eps > 1) fail(ErrorKind::Range, "anchor eps must lie in (0, 1]");
        Rational h = detail::take_scalar(sec, "H", RuleTag::SIAst);
        if (!is_integer(h) || h < 0) fail(ErrorKind::Range, "anchor H must be a natural number");
        a.bound = rational_num(h);
        detail::reject_leftovers(sec, RuleTag::SIAst);
        anchors.push_back(std::move(a));
      } else {
        detail::parse_section_statement(lex, head);
      }
    }
    c.inv = head.inv;
    c.p = detail::take_scalar(head, "p", RuleTag::SIAst);
    if (c.p <= 0 || c.p >= 1) fail(ErrorKind::Range, "p must lie in (0, 1)");
    detail::reject_leftovers(head, RuleTag::SIAst);
    if (anchors.empty()) fail(ErrorKind::RuleMismatch, "siast needs at least one anchor");
    c.anchors = std::move(anchors);
    cert.body = std::move(c);
    return cert;
  }

  detail::CertSection sec;
  while (!lex.eof()) detail::parse_section_statement(lex, sec);

  switch (rule) {
    case RuleTag::Variant: {
      VariantCert c;
      c.inv = sec.inv;
      c.U = detail::take_fn(sec, "U", rule);
      c.lo = detail::take_scalar(sec, "lo", rule);
      c.hi = detail::take_scalar(sec, "hi", rule);
      c.eps = detail::take_scalar(sec, "eps", rule);
      if (c.lo >= c.hi) fail(ErrorKind::Range, "lo must be strictly below hi");
      if (c.eps <= 0 || c.eps > 1) fail(ErrorKind::Range, "eps must lie in (0, 1]");
      detail::reject_leftovers(sec, rule);
      cert.body = std::move(c);
      break;
    }
    case RuleTag::Martingale: {
      MartingaleCert c;
      c.inv = sec.inv;
      c.V = detail::take_fn(sec, "V", rule);
      c.U = detail::take_fn(sec, "U", rule);
      c.witnesses = std::move(sec.witnesses);
      for (std::size_t i = 0; i + 1 < c.witnesses.size(); ++i)
        if (!(c.witnesses[i].r < c.witnesses[i + 1].r))
          fail(ErrorKind::Range, "witnesses must be sorted by strictly increasing r");
      detail::reject_leftovers(sec, rule, /*allow_witnesses=*/true);
      cert.body = std::move(c);
      break;
    }
    case RuleTag::SMVariant: {
      SMVariantCert c;
      c.inv = sec.inv;
      c.V = detail::take_fn(sec, "V", rule);
      if (!sec.p_fn || !sec.d_fn)
        fail(ErrorKind::RuleMismatch, "smvariant certificate needs p_fn and d_fn");
      c.p_fn = sec.p_fn;
      c.d_fn = sec.d_fn;
      c.grid = std::move(sec.grid);
      if (c.grid.empty()) fail(ErrorKind::Range, "grid must be nonempty");
      for (std::size_t i = 0; i + 1 < c.grid.size(); ++i)
        if (!(c.grid[i] < c.grid[i + 1]))
          fail(ErrorKind::Range, "grid must be strictly increasing");
      sec.grid.clear();
      sec.p_fn = nullptr;
      sec.d_fn = nullptr;
      detail::reject_leftovers(sec, rule, /*allow_witnesses=*/false, /*allow_grid=*/true);
      cert.body = std::move(c);
      break;
    }
    case RuleTag::Upper: {
      SICert c = detail::finish_si(sec, rule);
      detail::reject_leftovers(sec, rule);
      cert.body = std::move(c);
      break;
    }
    case RuleTag::SILower: {
      SILowerCert c = detail::finish_silower(sec);
      detail::reject_leftovers(sec, rule);
      cert.body = std::move(c);
      break;
    }
    default:
      break;
  }
  return cert;
}

// ---------------------------------------------------------------------------
// Serialization (round-trips through parse_certificate)

namespace detail {

inline void serialize_fn(std::ostringstream& out, const ValueFunction& f) {
  if (f.is_table) {
    out << "table " << f.name << " {\n";
    if (f.approx_hint) out << "  mode = approx;\n";
    for (const auto& [key, v] : f.table) {
      out << "  (" << key.first;
      for (const auto& q : key.second) out << ", " << rational_str(q);
      out << ") = " << rational_str(v) << ";\n";
    }
    out << "  default = "
        << (f.default_is_error ? std::string("error") : rational_str(f.default_value)) << ";\n";
    out << "};\n";
  } else {
    for (const auto& [loc, e] : f.cases)
      out << "fn " << f.name << " at " << loc << ": " << pretty_print(e) << ";\n";
  }
}

inline void serialize_silower_body(std::ostringstream& out, const SILowerCert& c,
                                   const std::string& indent) {
  std::ostringstream body;
  body << "invariant: " << pretty_print(c.si.inv) << ";\n";
  body << "p: " << rational_str(c.si.p) << ";\n";
  body << "eps: " << rational_str(c.eps) << ";\n";
  body << "H: " << c.bound.str() << ";\n";
  if (c.depth) body << "depth: " << *c.depth << ";\n";
  serialize_fn(body, c.si.SI);
  serialize_fn(body, c.U);
  std::istringstream lines(body.str());
  std::string line;
  while (std::getline(lines, line)) out << indent << line << "\n";
}

}  // namespace detail

inline std::string serialize_certificate(const Certificate& cert) {
  std::ostringstream out;
  out << "rule: " << rule_tag_name(cert.rule) << ";\n";
  switch (cert.rule) {
    case RuleTag::Variant: {
      const auto& c = std::get<VariantCert>(cert.body);
      out << "invariant: " << pretty_print(c.inv) << ";\n";
      out << "lo: " << rational_str(c.lo) << ";\n";
      out << "hi: " << rational_str(c.hi) << ";\n";
      out << "eps: " << rational_str(c.eps) << ";\n";
      detail::serialize_fn(out, c.U);
      break;
    }
    case RuleTag::Martingale: {
      const auto& c = std::get<MartingaleCert>(cert.body);
      out << "invariant: " << pretty_print(c.inv) << ";\n";
      detail::serialize_fn(out, c.V);
      detail::serialize_fn(out, c.U);
      for (const auto& w : c.witnesses)
        out << "witness: r = " << rational_str(w.r) << ", H = " << w.bound.str()
            << ", eps = " << rational_str(w.eps) << ";\n";
      break;
    }
    case RuleTag::SMVariant: {
      const auto& c = std::get<SMVariantCert>(cert.body);
      out << "invariant: " << pretty_print(c.inv) << ";\n";
      out << "p_fn: " << pretty_print(c.p_fn) << ";\n";
      out << "d_fn: " << pretty_print(c.d_fn) << ";\n";
      out << "grid: ";
      for (std::size_t i = 0; i < c.grid.size(); ++i)
        out << (i ? ", " : "") << rational_str(c.grid[i]);
      out << ";\n";
      detail::serialize_fn(out, c.V);
      break;
    }
    case RuleTag::Upper: {
      const auto& c = std::get<SICert>(cert.body);
      out << "invariant: " << pretty_print(c.inv) << ";\n";
      out << "p: " << rational_str(c.p) << ";\n";
      detail::serialize_fn(out, c.SI);
      break;
    }
    case RuleTag::SILower: {
      const auto& c = std::get<SILowerCert>(cert.body);
      detail::serialize_silower_body(out, c, "");
      break;
    }
    case RuleTag::LowerFamily: {
      const auto& c = std::get<LowerFamilyCert>(cert.body);
      out << "p: " << rational_str(c.p) << ";\n";
      for (const auto& [n, sub] : c.entries) {
        out << "entry n = " << n.str() << " {\n";
        detail::serialize_silower_body(out, sub, "  ");
        out << "}\n";
      }
      break;
    }
    case RuleTag::SIAst: {
      const auto& c = std::get<SIAstCert>(cert.body);
      out << "invariant: " << pretty_print(c.inv) << ";\n";
      out << "p: " << rational_str(c.p) << ";\n";
      for (const auto& a : c.anchors) {
        out << "anchor (" << a.key.first;
        for (const auto& q : a.key.second) out << ", " << rational_str(q);
        out << ") {\n";
        std::ostringstream body;
        body << "eps: " << rational_str(a.eps) << ";\n";
        body << "H: " << a.bound.str() << ";\n";
        detail::serialize_fn(body, a.SI);
        detail::serialize_fn(body, a.U);
        std::istringstream lines(body.str());
        std::string line;
        while (std::getline(lines, line)) out << "  " << line << "\n";
        out << "}\n";
      }
      break;
    }
  }
  return out.str();
}

inline State resolve_state(const ProgramGraph& g, const TableKey& key) {
  State s;
  s.location = g.location_index(key.first);
  if (key.second.size() != g.variables.size())
    fail(ErrorKind::Range, "state (" + key.first + ", ...) has " +
                               std::to_string(key.second.size()) + " values for " +
                               std::to_string(g.variables.size()) + " variables");
  s.valuation = key.second;
  return s;
}

}  // namespace pct

#endif
