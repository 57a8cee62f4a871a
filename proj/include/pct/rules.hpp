#ifndef PCT_RULES_HPP
#define PCT_RULES_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "pct/certificates.hpp"
#include "pct/region.hpp"

namespace pct {

enum class VerdictStatus { VerifiedComplete, VerifiedOnRegion, MarginInconclusive, Refuted };

inline const char* verdict_status_name(VerdictStatus s) {
  switch (s) {
    case VerdictStatus::VerifiedComplete: return "VerifiedComplete";
    case VerdictStatus::VerifiedOnRegion: return "VerifiedOnRegion";
    case VerdictStatus::MarginInconclusive: return "MarginInconclusive";
    case VerdictStatus::Refuted: return "Refuted";
  }
  return "?";
}

struct Violation {
  std::string condition;
  std::size_t state_index;
  std::string state;
  std::string detail;
  double margin;
};

struct Verdict {
  VerdictStatus status = VerdictStatus::Refuted;
  std::string rule;
  std::string conclusion;
  std::vector<Violation> violations;
  std::vector<Violation> margin_warnings;
  std::vector<std::string> frontier_caveats;
  std::size_t states_checked = 0;
  double min_margin = std::numeric_limits<double>::infinity();
  std::map<std::string, double> condition_margins;  // min margin per condition id
  bool exact_arithmetic = false;
  std::vector<std::pair<std::string, std::string>> notes;

  int exit_code() const {
    switch (status) {
      case VerdictStatus::VerifiedComplete: return 0;
      case VerdictStatus::Refuted: return 1;
      default: return 2;
    }
  }
};

namespace detail {

struct CheckNum {
  bool exact = true;
  Rational q;
  double d = 0.0;

  double as_double() const { return exact ? to_double(q) : d; }
};

inline CheckNum num_sub(const CheckNum& a, const CheckNum& b) {
  if (a.exact && b.exact) return {true, a.q - b.q, 0.0};
  return {false, 0, a.as_double() - b.as_double()};
}
inline CheckNum num_from_rational(const Rational& q, bool exact) {
  if (exact) return {true, q, 0.0};
  return {false, 0, to_double(q)};
}

// Verdict accumulator shared by the rule checkers. Comparisons record margins;
// strict inequalities within tau of zero become warnings rather than passes.
struct Checker {
  const ProgramGraph& g;
  const Region& region;
  double tau;
  bool exact;
  Verdict v;

  Checker(const ProgramGraph& graph, const Region& r, double tolerance, bool exact_mode,
          RuleTag rule)
      : g(graph), region(r), tau(tolerance), exact(exact_mode) {
    v.rule = rule_tag_name(rule);
    v.exact_arithmetic = exact_mode;
  }

  void violation(const std::string& cond, std::size_t idx, const std::string& detail,
                 double margin = 0.0) {
    v.violations.push_back({cond, idx, g.state_str(region.states[idx]), detail, margin});
  }
  void warning(const std::string& cond, std::size_t idx, const std::string& detail,
               double margin) {
    v.margin_warnings.push_back({cond, idx, g.state_str(region.states[idx]), detail, margin});
  }
  void note_margin(const std::string& cond, double m) {
    v.min_margin = std::min(v.min_margin, m);
    auto it = v.condition_margins.find(cond);
    if (it == v.condition_margins.end()) v.condition_margins.emplace(cond, m);
    else it->second = std::min(it->second, m);
  }

  // margin >= 0 required
  void require_ge(const CheckNum& margin, const std::string& cond, std::size_t idx,
                  const std::string& detail) {
    double m = margin.as_double();
    note_margin(cond, m);
    bool ok = margin.exact ? margin.q >= 0 : m >= -tau;
    if (!ok) violation(cond, idx, detail, m);
  }
  // margin > 0 required (strict)
  void require_gt(const CheckNum& margin, const std::string& cond, std::size_t idx,
                  const std::string& detail) {
    double m = margin.as_double();
    note_margin(cond, m);
    if (margin.exact) {
      if (!(margin.q > 0)) violation(cond, idx, detail, m);
      return;
    }
    if (m > tau) return;
    if (m > 0.0) warning(cond, idx, detail, m);
    else violation(cond, idx, detail, m);
  }
  // |margin| must vanish
  void require_zero(const CheckNum& margin, const std::string& cond, std::size_t idx,
                    const std::string& detail) {
    double m = margin.as_double();
    bool ok = margin.exact ? margin.q == 0 : std::fabs(m) <= tau;
    if (!ok) violation(cond, idx, detail, m);
  }

  CheckNum vf(const ValueFunction& f, const State& s, const State* anchor = nullptr) {
    if (exact) return {true, cert_eval_exact(g, f, s, anchor), 0.0};
    return {false, 0, cert_eval_approx(g, f, s, anchor)};
  }

  bool truth(const Expr& e, const State& s) {
    Env env = g.environment(s);
    if (exact) return eval_truth_exact(e, env);
    return eval_truth_approx(e, env);
  }

  bool is_integer_valued(const CheckNum& x) {
    if (x.exact) return is_integer(x.q);
    return std::fabs(x.d - std::nearbyint(x.d)) < 1e-9;
  }

  // zero-set membership test "value >= 1"
  bool at_least_one(const CheckNum& x) { return x.exact ? x.q >= 1 : x.d >= 1.0 - tau; }

  void finalize(const std::string& complete_conclusion, const std::string& region_conclusion,
                bool coverage_complete = true) {
    std::sort(v.violations.begin(), v.violations.end(), [](const Violation& a, const Violation& b) {
      if (a.state_index != b.state_index) return a.state_index < b.state_index;
      if (a.condition != b.condition) return a.condition < b.condition;
      return a.detail < b.detail;
    });
    std::sort(v.margin_warnings.begin(), v.margin_warnings.end(),
              [](const Violation& a, const Violation& b) {
                if (a.state_index != b.state_index) return a.state_index < b.state_index;
                return a.condition < b.condition;
              });
    if (!v.violations.empty()) {
      v.status = VerdictStatus::Refuted;
      v.conclusion = "not established";
    } else if (!v.margin_warnings.empty()) {
      v.status = VerdictStatus::MarginInconclusive;
      v.conclusion = "inconclusive (strict comparisons within tolerance)";
    } else if (v.frontier_caveats.empty() && coverage_complete) {
      v.status = VerdictStatus::VerifiedComplete;
      v.conclusion = complete_conclusion;
    } else {
      v.status = VerdictStatus::VerifiedOnRegion;
      v.conclusion = region_conclusion;
    }
  }
};

inline bool program_exact(const ProgramGraph& g) {
  for (const auto& t : g.transitions) {
    if (has_non_exact_node(t.guard)) return false;
    if (t.prob && has_non_exact_node(*t.prob)) return false;
    if (t.update && has_non_exact_node(t.update->expression)) return false;
  }
  return true;
}

}  // namespace detail

inline double default_check_tolerance() { return 1e-9; }

// ---------------------------------------------------------------------------
// Rule 1: bounded integer variant with probable decrease. Conclusion: AST.

inline Verdict check_variant_rule(const ProgramGraph& g, const Region& region,
                                  const VariantCert& c, double tau = default_check_tolerance()) {
  bool exact = detail::program_exact(g) && c.U.exact_capable() && !has_non_exact_node(c.inv);
  detail::Checker ck(g, region, tau, exact, RuleTag::Variant);

  for (std::size_t i = 0; i < region.size(); ++i) {
    const State& s = region.states[i];
    bool inv_holds = false;
    try {
      inv_holds = ck.truth(c.inv, s);
    } catch (const Error& e) {
      ck.violation("eval-error", i, e.what());
      continue;
    }
    if (!inv_holds) continue;
    if (!region.interior[i]) {
      ck.v.frontier_caveats.push_back(g.state_str(s));
      continue;
    }
    ++ck.v.states_checked;
    try {
      auto succ = successors(g, s);
      for (const auto& sc : succ)
        if (!ck.truth(c.inv, sc.state))
          ck.violation("inv-not-inductive", i, "successor " + g.state_str(sc.state) + " leaves the invariant");

      detail::CheckNum u = ck.vf(c.U, s);
      if (!ck.is_integer_valued(u))
        ck.violation("U-integer", i, "U = " + std::to_string(u.as_double()) + " is not an integer");
      ck.require_ge(detail::num_sub(u, detail::num_from_rational(c.lo, u.exact)), "U-range-lo", i,
                    "U below lo");
      ck.require_gt(detail::num_sub(detail::num_from_rational(c.hi, u.exact), u), "U-range-hi", i,
                    "U must stay strictly below hi");

      if (g.is_terminal_state(s)) {
        ck.require_zero(detail::num_sub(u, detail::num_from_rational(c.lo, u.exact)),
                        "U-terminal-lo", i, "terminal state must sit at lo");
        continue;
      }
      LocationKind kind = g.location_kinds[s.location];
      if (kind == LocationKind::Probabilistic) {
        Rational mass = 0;
        double mass_d = 0.0;
        for (const auto& sc : succ) {
          detail::CheckNum us = ck.vf(c.U, sc.state);
          bool decreasing = u.exact ? us.q < u.q : us.d < u.d;
          if (decreasing) {
            mass += *sc.probability;
            mass_d += to_double(*sc.probability);
          }
        }
        detail::CheckNum m = u.exact ? detail::CheckNum{true, mass - c.eps, 0.0}
                                     : detail::CheckNum{false, 0, mass_d - to_double(c.eps)};
        ck.require_gt(m, "U-decrease-mass", i, "mass of strictly decreasing successors vs eps");
      } else {
        for (const auto& sc : succ)
          ck.require_gt(detail::num_sub(u, ck.vf(c.U, sc.state)), "U-strict-decrease", i,
                        "successor " + g.state_str(sc.state));
      }
    } catch (const Error& e) {
      ck.violation("eval-error", i, e.what());
    }
  }
  ck.finalize("AST", "AST on the checked region");
  return ck.v;
}

// ---------------------------------------------------------------------------
// Rule 2: unbounded supermartingale V + variant U with sublevel witnesses.

inline Verdict check_martingale_ast_rule(const ProgramGraph& g, const Region& region,
                                         const MartingaleCert& c,
                                         double tau = default_check_tolerance()) {
  bool exact = detail::program_exact(g) && c.V.exact_capable() && c.U.exact_capable() &&
               !has_non_exact_node(c.inv);
  detail::Checker ck(g, region, tau, exact, RuleTag::Martingale);
  double max_v_seen = -std::numeric_limits<double>::infinity();

  for (std::size_t i = 0; i < region.size(); ++i) {
    const State& s = region.states[i];
    bool inv_holds = false;
    try {
      inv_holds = ck.truth(c.inv, s);
    } catch (const Error& e) {
      ck.violation("eval-error", i, e.what());
      continue;
    }
    if (!inv_holds) continue;
    if (!region.interior[i]) {
      ck.v.frontier_caveats.push_back(g.state_str(s));
      continue;
    }
    ++ck.v.states_checked;
    try {
      auto succ = successors(g, s);
      for (const auto& sc : succ)
        if (!ck.truth(c.inv, sc.state))
          ck.violation("inv-not-inductive", i, "successor " + g.state_str(sc.state) + " leaves the invariant");

      detail::CheckNum vv = ck.vf(c.V, s);
      detail::CheckNum u = ck.vf(c.U, s);
      max_v_seen = std::max(max_v_seen, vv.as_double());
      if (!ck.is_integer_valued(u))
        ck.violation("U-natural", i, "U is not an integer");
      ck.require_ge(u, "U-natural", i, "U must be nonnegative");

      if (g.is_terminal_state(s)) {
        ck.require_zero(vv, "V-terminal-zero", i, "V must vanish at the terminal state");
        ck.require_zero(u, "U-terminal-zero", i, "U must vanish at the terminal state");
        continue;
      }
      ck.require_gt(vv, "V-positive", i, "V must be positive off the terminal state");

      LocationKind kind = g.location_kinds[s.location];
      if (kind == LocationKind::Probabilistic) {
        detail::CheckNum expect{vv.exact, 0, 0.0};
        Rational dec_mass = 0;
        double dec_mass_d = 0.0;
        for (const auto& sc : succ) {
          detail::CheckNum vs = ck.vf(c.V, sc.state);
          if (expect.exact) expect.q += *sc.probability * vs.q;
          else expect.d += to_double(*sc.probability) * vs.d;
          detail::CheckNum us = ck.vf(c.U, sc.state);
          bool decreasing = u.exact ? us.q < u.q : us.d < u.d;
          if (decreasing) {
            dec_mass += *sc.probability;
            dec_mass_d += to_double(*sc.probability);
          }
        }
        ck.require_ge(detail::num_sub(vv, expect), "V-expected-nonincrease", i,
                      "V vs expected successor value");
        for (const auto& w : c.witnesses) {
          bool in_sublevel = vv.exact ? vv.q <= w.r : vv.d <= to_double(w.r) + tau;
          if (!in_sublevel) continue;
          detail::CheckNum m = u.exact
                                   ? detail::CheckNum{true, dec_mass - w.eps, 0.0}
                                   : detail::CheckNum{false, 0, dec_mass_d - to_double(w.eps)};
          ck.require_gt(m, "witness-decrease-mass", i,
                        "sublevel r = " + rational_str(w.r) + ": decreasing mass vs eps_r");
        }
      } else {
        for (const auto& sc : succ) {
          ck.require_ge(detail::num_sub(vv, ck.vf(c.V, sc.state)), "V-nonincrease", i,
                        "successor " + g.state_str(sc.state));
          ck.require_gt(detail::num_sub(u, ck.vf(c.U, sc.state)), "U-strict-decrease", i,
                        "successor " + g.state_str(sc.state));
        }
      }
      for (const auto& w : c.witnesses) {
        bool in_sublevel = vv.exact ? vv.q <= w.r : vv.d <= to_double(w.r) + tau;
        if (in_sublevel)
          ck.require_ge(detail::num_sub(detail::num_from_rational(Rational(w.bound), u.exact), u),
                        "witness-bound", i, "sublevel r = " + rational_str(w.r) + ": U vs H_r");
      }
    } catch (const Error& e) {
      ck.violation("eval-error", i, e.what());
    }
  }
  {
    std::ostringstream mv;
    mv.precision(17);
    mv << max_v_seen;
    ck.v.notes.emplace_back("max_V_on_region", mv.str());
    ck.v.notes.emplace_back("max_witness_r",
                            c.witnesses.empty() ? "none" : rational_str(c.witnesses.back().r));
  }
  ck.finalize("AST", "AST on the checked region");
  return ck.v;
}

// ---------------------------------------------------------------------------
// Rule 3: supermartingale variant with antitone progress functions p and d.
// Conditions are evaluated at decision states (probabilistic / nondeterministic),
// with maximal deterministic assignment chains resolved into macro-successors.

namespace detail {

struct ResolvedSuccessor {
  State state;
  std::optional<Rational> probability;
};

// Follows unique-successor assignment states until a decision or terminal state.
inline bool resolve_chain(const ProgramGraph& g, State s, State& out, std::size_t cap = 100000) {
  std::size_t steps = 0;
  while (!g.is_terminal_state(s) && g.location_kinds[s.location] == LocationKind::Assignment) {
    auto succ = successors(g, s);
    if (succ.size() != 1) return false;
    s = succ[0].state;
    if (++steps > cap) return false;
  }
  out = s;
  return true;
}

}  // namespace detail

inline Verdict check_sm_variant_rule(const ProgramGraph& g, const Region& region,
                                     const SMVariantCert& c,
                                     double tau = default_check_tolerance()) {
  bool exact = detail::program_exact(g) && c.V.exact_capable() && !has_non_exact_node(c.inv) &&
               !has_non_exact_node(c.p_fn) && !has_non_exact_node(c.d_fn);
  detail::Checker ck(g, region, tau, exact, RuleTag::SMVariant);
  std::size_t micro_states = 0;

  auto fn_at = [&](const Expr& f, const detail::CheckNum& x) -> detail::CheckNum {
    Env env;
    if (x.exact) {
      env["v"] = x.q;
      if (exact) return {true, eval_exact(f, env), 0.0};
      return {false, 0, eval_approx(f, env)};
    }
    env["v"] = rational_from_double(x.d);
    return {false, 0, eval_approx(f, env)};
  };

  // Grid-relative antitonicity and positivity of the progress functions.
  for (std::size_t i = 0; i < c.grid.size(); ++i) {
    detail::CheckNum gv = detail::num_from_rational(c.grid[i], exact);
    detail::CheckNum pv = fn_at(c.p_fn, gv);
    detail::CheckNum dv = fn_at(c.d_fn, gv);
    ck.require_gt(pv, "p-positive-on-grid", 0, "p(" + rational_str(c.grid[i]) + ")");
    ck.require_ge(detail::num_sub(detail::num_from_rational(Rational(1), pv.exact), pv),
                  "p-at-most-one-on-grid", 0, "p(" + rational_str(c.grid[i]) + ")");
    ck.require_gt(dv, "d-positive-on-grid", 0, "d(" + rational_str(c.grid[i]) + ")");
    if (i + 1 < c.grid.size()) {
      detail::CheckNum gn = detail::num_from_rational(c.grid[i + 1], exact);
      ck.require_ge(detail::num_sub(pv, fn_at(c.p_fn, gn)), "p-antitone-on-grid", 0,
                    "grid pair " + rational_str(c.grid[i]) + ", " + rational_str(c.grid[i + 1]));
      ck.require_ge(detail::num_sub(dv, fn_at(c.d_fn, gn)), "d-antitone-on-grid", 0,
                    "grid pair " + rational_str(c.grid[i]) + ", " + rational_str(c.grid[i + 1]));
    }
  }

  for (std::size_t i = 0; i < region.size(); ++i) {
    const State& s = region.states[i];
    bool inv_holds = false;
    try {
      inv_holds = ck.truth(c.inv, s);
    } catch (const Error& e) {
      ck.violation("eval-error", i, e.what());
      continue;
    }
    if (!inv_holds) continue;
    if (g.is_terminal_state(s)) {
      ++ck.v.states_checked;
      try {
        ck.require_zero(ck.vf(c.V, s), "V-terminal-zero", i, "V must vanish at the terminal state");
      } catch (const Error& e) {
        ck.violation("eval-error", i, e.what());
      }
      continue;
    }
    if (g.location_kinds[s.location] == LocationKind::Assignment) {
      ++micro_states;  // covered through chain resolution from the decision states
      continue;
    }

    // decision state: resolve successors through assignment chains
    std::vector<detail::ResolvedSuccessor> resolved;
    bool all_in_region = true, chains_ok = true;
    try {
      for (const auto& sc : successors(g, s)) {
        State end;
        if (!detail::resolve_chain(g, sc.state, end)) {
          chains_ok = false;
          break;
        }
        if (!region.contains(end)) all_in_region = false;
        resolved.push_back({end, sc.probability});
      }
    } catch (const Error& e) {
      ck.violation("eval-error", i, e.what());
      continue;
    }
    if (!chains_ok) {
      ck.violation("chain-divergent", i, "a deterministic assignment chain does not reach a decision state");
      continue;
    }
    if (!all_in_region) {
      ck.v.frontier_caveats.push_back(g.state_str(s));
      continue;
    }
    ++ck.v.states_checked;
    try {
      for (const auto& rs : resolved)
        if (!ck.truth(c.inv, rs.state))
          ck.violation("inv-not-inductive", i, "macro-successor " + g.state_str(rs.state) + " leaves the invariant");

      detail::CheckNum vv = ck.vf(c.V, s);
      ck.require_gt(vv, "V-positive", i, "V must be positive off the terminal state");
      detail::CheckNum dv = fn_at(c.d_fn, vv);

      if (g.location_kinds[s.location] == LocationKind::Probabilistic) {
        detail::CheckNum expect{vv.exact, 0, 0.0};
        Rational dec_mass = 0;
        double dec_mass_d = 0.0;
        for (const auto& rs : resolved) {
          detail::CheckNum vs = ck.vf(c.V, rs.state);
          if (expect.exact) expect.q += *rs.probability * vs.q;
          else expect.d += to_double(*rs.probability) * vs.d;
          detail::CheckNum drop = detail::num_sub(detail::num_sub(vv, vs), dv);
          bool enough = drop.exact ? drop.q >= 0 : drop.d >= -tau;
          if (enough) {
            dec_mass += *rs.probability;
            dec_mass_d += to_double(*rs.probability);
          }
        }
        ck.require_ge(detail::num_sub(vv, expect), "V-expected-nonincrease", i,
                      "V vs expected macro-successor value");
        detail::CheckNum pv = fn_at(c.p_fn, vv);
        detail::CheckNum mass = pv.exact && vv.exact
                                    ? detail::CheckNum{true, dec_mass, 0.0}
                                    : detail::CheckNum{false, 0, dec_mass_d};
        ck.require_ge(detail::num_sub(mass, pv), "d-decrease-mass", i,
                      "mass dropping by d(V) vs p(V)");
      } else {
        for (const auto& rs : resolved)
          ck.require_ge(detail::num_sub(detail::num_sub(vv, ck.vf(c.V, rs.state)), dv),
                        "d-decrease", i, "macro-successor " + g.state_str(rs.state));
      }
    } catch (const Error& e) {
      ck.violation("eval-error", i, e.what());
    }
  }
  ck.v.notes.emplace_back("granularity", "decision-state macro-steps");
  ck.v.notes.emplace_back("micro_assignment_states_skipped", std::to_string(micro_states));
  ck.v.notes.emplace_back("antitonicity", "grid-relative");
  ck.finalize("AST", "AST on the checked region");
  return ck.v;
}

// ---------------------------------------------------------------------------
// Rules 4/5 share the SI-indicator core.

namespace detail {

// Checks SI-indicator conditions at interior inv-states. `anchor_state` doubles
// as the init-role state whose SI value must not exceed p.
inline void check_si_core(Checker& ck, const Expr& inv, const ValueFunction& SI, const Rational& p,
                          const State& origin, const State* anchor, bool terminal_ge_one,
                          const ValueFunction* U, const Rational* eps, const Integer* bound) {
  const ProgramGraph& g = ck.g;
  const Region& region = ck.region;

  bool origin_seen = false;
  for (std::size_t i = 0; i < region.size(); ++i) {
    const State& s = region.states[i];
    bool inv_holds = false;
    try {
      inv_holds = ck.truth(inv, s);
    } catch (const Error& e) {
      ck.violation("eval-error", i, e.what());
      continue;
    }
    if (!inv_holds) continue;
    if (!region.interior[i]) {
      ck.v.frontier_caveats.push_back(g.state_str(s));
      continue;
    }
    ++ck.v.states_checked;
    try {
      auto succ = successors(g, s);
      for (const auto& sc : succ)
        if (!ck.truth(inv, sc.state))
          ck.violation("inv-not-inductive", i, "successor " + g.state_str(sc.state) + " leaves the invariant");

      CheckNum si = ck.vf(SI, s, anchor);
      ck.require_ge(si, "SI-nonnegative", i, "SI must be nonnegative");
      if (s == origin) {
        origin_seen = true;
        ck.require_ge(num_sub(num_from_rational(p, si.exact), si), "SI-at-origin", i,
                      "SI at the origin state vs p");
      }
      bool terminal = g.is_terminal_state(s);
      if (terminal && terminal_ge_one)
        ck.require_ge(num_sub(si, num_from_rational(Rational(1), si.exact)), "SI-terminal-ge-one",
                      i, "SI must be at least 1 at the terminal state");
      if (!terminal) {
        if (g.location_kinds[s.location] == LocationKind::Probabilistic) {
          CheckNum expect{si.exact, 0, 0.0};
          for (const auto& sc : succ) {
            CheckNum vs = ck.vf(SI, sc.state, anchor);
            if (expect.exact) expect.q += *sc.probability * vs.q;
            else expect.d += to_double(*sc.probability) * vs.d;
          }
          ck.require_ge(num_sub(si, expect), "SI-expected-nonincrease", i,
                        "SI vs expected successor value");
        } else {
          for (const auto& sc : succ)
            ck.require_ge(num_sub(si, ck.vf(SI, sc.state, anchor)), "SI-nonincrease", i,
                          "successor " + g.state_str(sc.state));
        }
      }

      if (U) {
        CheckNum u = ck.vf(*U, s, anchor);
        if (!ck.is_integer_valued(u)) ck.violation("U-natural", i, "U is not an integer");
        ck.require_ge(u, "U-natural", i, "U must be nonnegative");
        ck.require_ge(num_sub(num_from_rational(Rational(*bound), u.exact), u), "U-bounded", i,
                      "U vs H");
        bool zero_set = ck.at_least_one(si) || terminal;
        bool u_is_zero = u.exact ? u.q == 0 : std::fabs(u.d) <= ck.tau;
        if (zero_set) {
          if (!u_is_zero)
            ck.violation("U-zero-set", i, "U must vanish where SI >= 1 or the state is terminal",
                         u.as_double());
        } else if (u_is_zero) {
          ck.violation("U-zero-set", i, "U vanishes outside {SI >= 1} + terminal");
        } else if (g.location_kinds[s.location] == LocationKind::Probabilistic) {
          Rational mass = 0;
          double mass_d = 0.0;
          for (const auto& sc : succ) {
            CheckNum us = ck.vf(*U, sc.state, anchor);
            bool dec = u.exact ? us.q < u.q : us.d < u.d;
            if (dec) {
              mass += *sc.probability;
              mass_d += to_double(*sc.probability);
            }
          }
          CheckNum m = u.exact ? CheckNum{true, mass - *eps, 0.0}
                               : CheckNum{false, 0, mass_d - to_double(*eps)};
          ck.require_gt(m, "U-decrease-mass", i, "mass of strictly decreasing successors vs eps");
        } else {
          for (const auto& sc : succ)
            ck.require_gt(num_sub(u, ck.vf(*U, sc.state, anchor)), "U-strict-decrease", i,
                          "successor " + g.state_str(sc.state));
        }
      }
    } catch (const Error& e) {
      ck.violation("eval-error", i, e.what());
    }
  }
  if (!origin_seen)
    ck.v.notes.emplace_back("origin_state", "not inside the checked region interior");
}

}  // namespace detail

inline Verdict check_upper_bound_rule(const ProgramGraph& g, const Region& region, const SICert& c,
                                      double tau = default_check_tolerance()) {
  bool exact = detail::program_exact(g) && c.SI.exact_capable() && !has_non_exact_node(c.inv);
  detail::Checker ck(g, region, tau, exact, RuleTag::Upper);
  detail::check_si_core(ck, c.inv, c.SI, c.p, g.initial_state(), nullptr,
                        /*terminal_ge_one=*/true, nullptr, nullptr, nullptr);
  std::string conclusion = "Pr_term <= " + rational_str(c.p);
  ck.finalize(conclusion, conclusion + " (region-relative)");
  return ck.v;
}

inline Verdict check_si_lower_bound_rule(const ProgramGraph& g, const Region& region,
                                         const SILowerCert& c,
                                         double tau = default_check_tolerance()) {
  bool exact = detail::program_exact(g) && c.si.SI.exact_capable() && c.U.exact_capable() &&
               !has_non_exact_node(c.si.inv);
  detail::Checker ck(g, region, tau, exact, RuleTag::SILower);
  detail::check_si_core(ck, c.si.inv, c.si.SI, c.si.p, g.initial_state(), nullptr,
                        /*terminal_ge_one=*/false, &c.U, &c.eps, &c.bound);
  std::string conclusion = "Pr_term >= " + rational_str(Rational(1) - c.si.p);
  ck.finalize(conclusion, conclusion + " (region-relative)");
  return ck.v;
}

inline Verdict check_lower_bound_family(const ProgramGraph& g, const LowerFamilyCert& c,
                                        const std::function<std::size_t(const Integer&)>& depth_for,
                                        double tau = default_check_tolerance()) {
  Verdict agg;
  agg.rule = rule_tag_name(RuleTag::LowerFamily);
  agg.exact_arithmetic = true;
  bool any_refuted = false, any_inconclusive = false;
  std::optional<Rational> best_bound;
  for (const auto& [n, sub] : c.entries) {
    Region region = enumerate_region(g, depth_for(n));
    Verdict v = check_si_lower_bound_rule(g, region, sub, tau);
    agg.states_checked += v.states_checked;
    agg.min_margin = std::min(agg.min_margin, v.min_margin);
    for (const auto& [cond, m] : v.condition_margins) {
      auto it = agg.condition_margins.find(cond);
      if (it == agg.condition_margins.end()) agg.condition_margins.emplace(cond, m);
      else it->second = std::min(it->second, m);
    }
    agg.exact_arithmetic = agg.exact_arithmetic && v.exact_arithmetic;
    for (const auto& viol : v.violations) {
      Violation copy = viol;
      copy.condition = "n=" + n.str() + ":" + copy.condition;
      agg.violations.push_back(copy);
    }
    for (const auto& w : v.margin_warnings) {
      Violation copy = w;
      copy.condition = "n=" + n.str() + ":" + copy.condition;
      agg.margin_warnings.push_back(copy);
    }
    // entry admissibility: the entry's p may exceed the family p by at most 1/n
    Rational allowance = c.p + Rational(1) / Rational(n);
    if (sub.si.p > allowance) {
      agg.violations.push_back({"n=" + n.str() + ":entry-bound", 0, "(aggregate)",
                                "entry p = " + rational_str(sub.si.p) + " exceeds p + 1/n = " +
                                    rational_str(allowance),
                                to_double(allowance - sub.si.p)});
      any_refuted = true;
      continue;
    }
    if (v.status == VerdictStatus::Refuted) {
      any_refuted = true;
    } else if (v.status == VerdictStatus::MarginInconclusive) {
      any_inconclusive = true;
    } else {
      Rational bound = Rational(1) - allowance;
      if (!best_bound || bound > *best_bound) best_bound = bound;
      agg.notes.emplace_back("entry_n=" + n.str(),
                             std::string(verdict_status_name(v.status)) + ", bound " +
                                 rational_str(bound) + ", frontier " +
                                 std::to_string(v.frontier_caveats.size()));
    }
  }
  if (any_refuted) {
    agg.status = VerdictStatus::Refuted;
    agg.conclusion = "not established";
  } else if (any_inconclusive) {
    agg.status = VerdictStatus::MarginInconclusive;
    agg.conclusion = "inconclusive (strict comparisons within tolerance)";
  } else {
    agg.status = VerdictStatus::VerifiedOnRegion;  // a finite prefix never proves the full family
    agg.conclusion = "Pr_term >= " + rational_str(*best_bound) +
                     " (best verified entry of a finite prefix; limit claim Pr_term >= " +
                     rational_str(Rational(1) - c.p) + " not verified)";
  }
  return agg;
}

inline Verdict check_si_ast_rule(const ProgramGraph& g, const Region& region, const SIAstCert& c,
                                 double tau = default_check_tolerance()) {
  bool exact = detail::program_exact(g) && !has_non_exact_node(c.inv);
  for (const auto& a : c.anchors)
    exact = exact && a.SI.exact_capable() && a.U.exact_capable();
  detail::Checker ck(g, region, tau, exact, RuleTag::SIAst);

  std::set<State> anchor_states;
  for (const auto& a : c.anchors) {
    State anchor = resolve_state(g, a.key);
    anchor_states.insert(anchor);
    auto it = region.index.find(anchor);
    if (it == region.index.end())
      fail(ErrorKind::Usage, "anchor " + g.state_str(anchor) + " lies outside the region");
    if (!ck.truth(c.inv, anchor))
      ck.violation("anchor-outside-invariant", it->second, "anchor must satisfy the invariant");
    detail::check_si_core(ck, c.inv, a.SI, c.p, anchor, &anchor, /*terminal_ge_one=*/false, &a.U,
                          &a.eps, &a.bound);
  }

  bool anchors_cover_interior = true;
  for (std::size_t i = 0; i < region.size(); ++i)
    if (region.interior[i] && !anchor_states.count(region.states[i])) {
      anchors_cover_interior = false;
      break;
    }
  std::sort(ck.v.frontier_caveats.begin(), ck.v.frontier_caveats.end());
  ck.v.frontier_caveats.erase(
      std::unique(ck.v.frontier_caveats.begin(), ck.v.frontier_caveats.end()),
      ck.v.frontier_caveats.end());
  if (!anchors_cover_interior)
    ck.v.notes.emplace_back("anchors", "incomplete (fewer anchors than interior states)");
  ck.v.notes.emplace_back("anchor_count", std::to_string(c.anchors.size()));
  ck.finalize("AST", "AST at anchors-x-region strength", anchors_cover_interior);
  return ck.v;
}

// ---------------------------------------------------------------------------
// Reports

inline std::string verdict_report(const Verdict& v) {
  std::ostringstream out;
  out << "rule: " << v.rule << "\n";
  out << "status: " << verdict_status_name(v.status) << "\n";
  out << "conclusion: " << v.conclusion << "\n";
  out << "arithmetic: " << (v.exact_arithmetic ? "exact-rational" : "binary64") << "\n";
  out << "states checked: " << v.states_checked << "\n";
  out.precision(17);
  if (std::isfinite(v.min_margin)) out << "min margin: " << v.min_margin << "\n";
  for (const auto& [cond, m] : v.condition_margins)
    out << "min margin [" << cond << "]: " << m << "\n";
  out << "frontier caveats: " << v.frontier_caveats.size() << "\n";
  for (const auto& [k, val] : v.notes) out << "note " << k << ": " << val << "\n";
  for (const auto& viol : v.violations)
    out << "violation [" << viol.condition << "] at " << viol.state << " (index "
        << viol.state_index << "): " << viol.detail << " (margin " << viol.margin << ")\n";
  for (const auto& w : v.margin_warnings)
    out << "margin-warning [" << w.condition << "] at " << w.state << ": " << w.detail
        << " (margin " << w.margin << ")\n";
  return out.str();
}

inline nlohmann::ordered_json verdict_json(const Verdict& v) {
  nlohmann::ordered_json j;
  j["status"] = verdict_status_name(v.status);
  j["conclusion"] = v.conclusion;
  j["violations"] = nlohmann::ordered_json::array();
  for (const auto& viol : v.violations) {
    nlohmann::ordered_json jv;
    jv["condition"] = viol.condition;
    jv["state_index"] = viol.state_index;
    jv["state"] = viol.state;
    jv["detail"] = viol.detail;
    jv["margin"] = viol.margin;
    j["violations"].push_back(jv);
  }
  j["frontier"] = v.frontier_caveats;
  nlohmann::ordered_json stats;
  stats["rule"] = v.rule;
  stats["arithmetic"] = v.exact_arithmetic ? "exact-rational" : "binary64";
  stats["states_checked"] = v.states_checked;
  stats["min_margin"] = std::isfinite(v.min_margin) ? nlohmann::ordered_json(v.min_margin)
                                                    : nlohmann::ordered_json(nullptr);
  stats["condition_margins"] = nlohmann::ordered_json::object();
  for (const auto& [cond, m] : v.condition_margins) stats["condition_margins"][cond] = m;
  stats["margin_warnings"] = nlohmann::ordered_json::array();
  for (const auto& w : v.margin_warnings) {
    nlohmann::ordered_json jw;
    jw["condition"] = w.condition;
    jw["state"] = w.state;
    jw["margin"] = w.margin;
    stats["margin_warnings"].push_back(jw);
  }
  for (const auto& [k, val] : v.notes) stats["note:" + k] = val;
  j["stats"] = stats;
  return j;
}

// Dispatch on a parsed certificate; lowerfamily uses depth_for (default: the
// entry's own depth hint, else the fallback depth).
inline Verdict check_certificate(const ProgramGraph& g, const Region& region,
                                 const Certificate& cert, double tau = default_check_tolerance(),
                                 std::size_t family_fallback_depth = 8) {
  switch (cert.rule) {
    case RuleTag::Variant:
      return check_variant_rule(g, region, std::get<VariantCert>(cert.body), tau);
    case RuleTag::Martingale:
      return check_martingale_ast_rule(g, region, std::get<MartingaleCert>(cert.body), tau);
    case RuleTag::SMVariant:
      return check_sm_variant_rule(g, region, std::get<SMVariantCert>(cert.body), tau);
    case RuleTag::Upper:
      return check_upper_bound_rule(g, region, std::get<SICert>(cert.body), tau);
    case RuleTag::SILower:
      return check_si_lower_bound_rule(g, region, std::get<SILowerCert>(cert.body), tau);
    case RuleTag::LowerFamily: {
      const auto& fam = std::get<LowerFamilyCert>(cert.body);
      std::map<Integer, std::size_t> depths;
      for (const auto& [n, sub] : fam.entries)
        depths[n] = sub.depth ? *sub.depth : family_fallback_depth;
      return check_lower_bound_family(
          g, fam, [&depths](const Integer& n) { return depths.at(n); }, tau);
    }
    case RuleTag::SIAst:
      return check_si_ast_rule(g, region, std::get<SIAstCert>(cert.body), tau);
  }
  fail(ErrorKind::Usage, "unknown rule");
}

}  // namespace pct

#endif
