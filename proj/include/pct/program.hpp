#ifndef PCT_PROGRAM_HPP
#define PCT_PROGRAM_HPP

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "pct/expr.hpp"

namespace pct {

enum class LocationKind { Assignment, Nondeterministic, Probabilistic, Terminal };

inline const char* location_kind_name(LocationKind k) {
  switch (k) {
    case LocationKind::Assignment: return "assignment";
    case LocationKind::Nondeterministic: return "nondeterministic";
    case LocationKind::Probabilistic: return "probabilistic";
    case LocationKind::Terminal: return "terminal";
  }
  return "?";
}

struct Update {
  std::size_t var;  // index into ProgramGraph::variables
  Expr expression;
};

struct Transition {
  std::size_t source;
  std::size_t target;
  Expr guard;                    // boolean; defaults to true
  std::optional<Expr> prob;      // present iff source is probabilistic
  std::optional<Update> update;  // present iff source is assignment
};

struct State {
  std::size_t location;
  std::vector<Rational> valuation;  // one entry per program variable, declared order

  friend bool operator==(const State& a, const State& b) {
    return a.location == b.location && a.valuation == b.valuation;
  }
  friend bool operator<(const State& a, const State& b) {
    if (a.location != b.location) return a.location < b.location;
    return std::lexicographical_compare(a.valuation.begin(), a.valuation.end(),
                                        b.valuation.begin(), b.valuation.end());
  }
};

struct ProgramGraph {
  std::vector<std::string> location_names;
  std::vector<LocationKind> location_kinds;
  std::vector<std::string> variables;
  std::size_t init_location = 0;
  std::vector<Rational> init_valuation;
  std::size_t terminal_location = 0;
  std::vector<Transition> transitions;              // declaration order
  std::vector<std::vector<std::size_t>> outgoing;   // per location, declaration order
  bool uses_variable_exponent = false;              // pow with a non-constant exponent anywhere

  std::size_t location_index(const std::string& name) const {
    for (std::size_t i = 0; i < location_names.size(); ++i)
      if (location_names[i] == name) return i;
    fail(ErrorKind::UnknownIdentifier, "unknown location '" + name + "'");
  }
  std::size_t variable_index(const std::string& name) const {
    for (std::size_t i = 0; i < variables.size(); ++i)
      if (variables[i] == name) return i;
    fail(ErrorKind::UnknownIdentifier, "undeclared variable '" + name + "'");
  }

  State initial_state() const { return State{init_location, init_valuation}; }

  bool is_terminal_state(const State& s) const {
    if (s.location != terminal_location) return false;
    for (const auto& v : s.valuation)
      if (v != 0) return false;
    return true;
  }

  Env environment(const State& s) const {
    Env env;
    for (std::size_t i = 0; i < variables.size(); ++i) env.emplace(variables[i], s.valuation[i]);
    return env;
  }

  std::string state_str(const State& s) const {
    std::string out = "(" + location_names[s.location];
    for (std::size_t i = 0; i < variables.size(); ++i)
      out += ", " + variables[i] + "=" + rational_str(s.valuation[i]);
    return out + ")";
  }
};

struct Successor {
  State state;
  LocationKind kind;                  // kind of the *source* location
  std::optional<Rational> probability;  // exact, present for probabilistic sources
  std::size_t transition;             // index into ProgramGraph::transitions
};

// Successors of s under enabled transitions. The terminal state absorbs.
inline std::vector<Successor> successors(const ProgramGraph& g, const State& s) {
  std::vector<Successor> out;
  if (g.is_terminal_state(s)) return out;
  Env env = g.environment(s);
  LocationKind kind = g.location_kinds[s.location];
  for (std::size_t ti : g.outgoing[s.location]) {
    const Transition& t = g.transitions[ti];
    if (!eval_truth_exact(t.guard, env)) continue;
    State next{t.target, s.valuation};
    if (t.update) next.valuation[t.update->var] = eval_exact(t.update->expression, env);
    std::optional<Rational> p;
    if (t.prob) p = eval_exact(*t.prob, env);
    out.push_back(Successor{std::move(next), kind, std::move(p), ti});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Validation

enum class DiagnosticKind { ProbabilityMassNotOne, NonpositiveProbability, NoSuccessor };

struct Diagnostic {
  DiagnosticKind kind;
  State state;
  std::string detail;
};

inline const char* diagnostic_kind_name(DiagnosticKind k) {
  switch (k) {
    case DiagnosticKind::ProbabilityMassNotOne: return "ProbabilityMassNotOne";
    case DiagnosticKind::NonpositiveProbability: return "NonpositiveProbability";
    case DiagnosticKind::NoSuccessor: return "NoSuccessor";
  }
  return "?";
}

template <typename StateRange>
inline std::vector<Diagnostic> validate_program(const ProgramGraph& g, const StateRange& probe) {
  std::vector<Diagnostic> diags;
  for (const State& s : probe) {
    if (g.is_terminal_state(s)) continue;
    auto succ = successors(g, s);
    if (succ.empty()) {
      diags.push_back({DiagnosticKind::NoSuccessor, s, "non-terminal state has no enabled transition"});
      continue;
    }
    if (g.location_kinds[s.location] == LocationKind::Probabilistic) {
      Rational mass = 0;
      for (const auto& sc : succ) {
        if (*sc.probability <= 0)
          diags.push_back({DiagnosticKind::NonpositiveProbability, s,
                           "transition probability " + rational_str(*sc.probability)});
        mass += *sc.probability;
      }
      if (mass != 1)
        diags.push_back({DiagnosticKind::ProbabilityMassNotOne, s, "mass " + rational_str(mass)});
    }
  }
  return diags;
}

// ---------------------------------------------------------------------------
// Program format

namespace detail {

inline std::string parse_name(Lexer& lex) {
  lex.skip_ws();
  std::size_t start = lex.pos;
  while (lex.pos < lex.text.size() && ident_char(lex.text[lex.pos])) ++lex.pos;
  if (lex.pos == start) fail(ErrorKind::Syntax, "expected an identifier", lex.pos);
  return lex.text.substr(start, lex.pos - start);
}

// Reads an expression terminated by one of the given characters (at depth 0).
inline Expr parse_expr_until(Lexer& lex, const std::string& stops) {
  lex.skip_ws();
  std::size_t start = lex.pos;
  int depth = 0;
  while (lex.pos < lex.text.size()) {
    char c = lex.text[lex.pos];
    if (c == '(') ++depth;
    if (c == ')') {
      if (depth == 0 && stops.find(c) != std::string::npos) break;
      --depth;
    } else if (depth == 0 && stops.find(c) != std::string::npos) {
      break;
    }
    ++lex.pos;
  }
  std::string text = lex.text.substr(start, lex.pos - start);
  detail::ExprParser p(text);
  try {
    return p.parse_full();
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::Syntax && e.has_position())
      fail(ErrorKind::Syntax, e.what(), start + e.position());
    throw;
  }
}

inline void strip_comments(std::string& text) {
  std::string out;
  out.reserve(text.size());
  for (std::size_t i = 0; i < text.size();) {
    if (text[i] == '#') {
      while (i < text.size() && text[i] != '\n') ++i;
    } else {
      out += text[i++];
    }
  }
  text = out;
}

}  // namespace detail

inline ProgramGraph parse_program(const std::string& source) {
  std::string text = source;
  detail::strip_comments(text);
  detail::Lexer lex(text);
  ProgramGraph g;

  lex.expect("vars");
  if (!lex.try_consume(";")) {
    g.variables.push_back(detail::parse_name(lex));
    while (lex.try_consume(",")) g.variables.push_back(detail::parse_name(lex));
    lex.expect(";");
  }
  std::set<std::string> declared(g.variables.begin(), g.variables.end());
  if (declared.size() != g.variables.size())
    fail(ErrorKind::Syntax, "duplicate variable declaration", lex.pos);

  lex.expect("init");
  std::string init_name = detail::parse_name(lex);
  g.init_valuation.assign(g.variables.size(), Rational(0));
  lex.expect("(");
  if (!lex.try_consume(")")) {
    std::set<std::string> seen;
    do {
      std::string var = detail::parse_name(lex);
      lex.expect("=");
      Expr v = detail::parse_expr_until(lex, ",)");
      if (!free_vars(v).empty())
        fail(ErrorKind::Syntax, "initial valuation must be constant", lex.pos);
      bool found = false;
      for (std::size_t i = 0; i < g.variables.size(); ++i)
        if (g.variables[i] == var) {
          g.init_valuation[i] = eval_exact(v, {});
          found = true;
        }
      if (!found) fail(ErrorKind::UnknownIdentifier, "undeclared variable '" + var + "'");
      if (!seen.insert(var).second)
        fail(ErrorKind::Syntax, "duplicate initial value for '" + var + "'", lex.pos);
    } while (lex.try_consume(","));
    lex.expect(")");
  }
  lex.expect(";");

  lex.expect("terminal");
  std::string terminal_name = detail::parse_name(lex);
  lex.expect(";");

  struct RawEdge {
    std::size_t source;
    std::string target;
    Expr guard;
    std::optional<Expr> prob;
    std::optional<std::pair<std::string, Expr>> set;
  };
  std::vector<RawEdge> raw;

  auto add_location = [&](const std::string& name, LocationKind kind) {
    for (const auto& existing : g.location_names)
      if (existing == name) fail(ErrorKind::Syntax, "DuplicateLocation: '" + name + "'", lex.pos);
    g.location_names.push_back(name);
    g.location_kinds.push_back(kind);
    return g.location_names.size() - 1;
  };

  while (!lex.eof()) {
    lex.expect("loc");
    std::string loc_name = detail::parse_name(lex);
    lex.expect(":");
    std::string kind_name = detail::parse_name(lex);
    LocationKind kind;
    if (kind_name == "assignment") kind = LocationKind::Assignment;
    else if (kind_name == "nondeterministic") kind = LocationKind::Nondeterministic;
    else if (kind_name == "probabilistic") kind = LocationKind::Probabilistic;
    else if (kind_name == "terminal") kind = LocationKind::Terminal;
    else fail(ErrorKind::Syntax, "unknown location kind '" + kind_name + "'", lex.pos);
    std::size_t loc = add_location(loc_name, kind);
    lex.expect("{");
    while (!lex.try_consume("}")) {
      lex.expect("edge");
      lex.expect("->");
      RawEdge e;
      e.source = loc;
      e.target = detail::parse_name(lex);
      e.guard = make_const(Rational(1));
      while (lex.try_consume("[")) {
        if (lex.try_consume("guard")) {
          lex.expect(":");
          e.guard = detail::parse_expr_until(lex, "]");
        } else if (lex.try_consume("prob")) {
          lex.expect(":");
          e.prob = detail::parse_expr_until(lex, "]");
        } else if (lex.try_consume("set")) {
          std::string var = detail::parse_name(lex);
          lex.expect(":=");
          e.set = {var, detail::parse_expr_until(lex, "]")};
        } else {
          fail(ErrorKind::Syntax, "expected 'guard', 'prob' or 'set'", lex.pos);
        }
        lex.expect("]");
      }
      lex.expect(";");
      raw.push_back(std::move(e));
    }
  }

  // Resolve names, then enforce per-kind shape.
  bool terminal_found = false;
  for (std::size_t i = 0; i < g.location_names.size(); ++i) {
    if (g.location_names[i] == terminal_name) {
      g.terminal_location = i;
      terminal_found = true;
      if (g.location_kinds[i] != LocationKind::Terminal)
        fail(ErrorKind::Syntax, "terminal location '" + terminal_name + "' must have kind terminal");
    } else if (g.location_kinds[i] == LocationKind::Terminal) {
      fail(ErrorKind::Syntax, "DuplicateLocation: second terminal location '" +
                                  g.location_names[i] + "'");
    }
  }
  if (!terminal_found)
    fail(ErrorKind::UnknownIdentifier, "UnknownTargetLocation: terminal '" + terminal_name + "'");
  g.init_location = g.location_index(init_name);

  g.outgoing.assign(g.location_names.size(), {});
  for (const auto& e : raw) {
    Transition t;
    t.source = e.source;
    bool target_ok = false;
    for (std::size_t i = 0; i < g.location_names.size(); ++i)
      if (g.location_names[i] == e.target) {
        t.target = i;
        target_ok = true;
      }
    if (!target_ok)
      fail(ErrorKind::UnknownIdentifier, "UnknownTargetLocation: '" + e.target + "'");
    t.guard = e.guard;
    check_vars(t.guard, declared);
    LocationKind kind = g.location_kinds[t.source];
    if (e.prob) {
      if (kind != LocationKind::Probabilistic)
        fail(ErrorKind::Syntax, "prob annotation on a non-probabilistic source '" +
                                    g.location_names[t.source] + "'");
      check_vars(*e.prob, declared);
      t.prob = e.prob;
    } else if (kind == LocationKind::Probabilistic) {
      fail(ErrorKind::Syntax, "probabilistic edge from '" + g.location_names[t.source] +
                                  "' is missing a prob annotation");
    }
    if (e.set) {
      if (kind != LocationKind::Assignment)
        fail(ErrorKind::Syntax, "set annotation on a non-assignment source '" +
                                    g.location_names[t.source] + "'");
      check_vars(e.set->second, declared);
      t.update = Update{g.variable_index(e.set->first), e.set->second};
    } else if (kind == LocationKind::Assignment) {
      fail(ErrorKind::Syntax, "assignment edge from '" + g.location_names[t.source] +
                                  "' is missing a set annotation");
    }
    if (has_variable_exponent_pow(t.guard) || (t.prob && has_variable_exponent_pow(*t.prob)) ||
        (t.update && has_variable_exponent_pow(t.update->expression)))
      g.uses_variable_exponent = true;
    g.outgoing[t.source].push_back(g.transitions.size());
    g.transitions.push_back(std::move(t));
  }

  for (std::size_t i = 0; i < g.location_names.size(); ++i)
    if (g.location_kinds[i] == LocationKind::Assignment && g.outgoing[i].size() > 1)
      fail(ErrorKind::Syntax, "AssignmentFanout: location '" + g.location_names[i] +
                                  "' has " + std::to_string(g.outgoing[i].size()) + " edges");

  return g;
}

}  // namespace pct

#endif
