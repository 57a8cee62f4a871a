#ifndef PCT_SEMANTICS_HPP
#define PCT_SEMANTICS_HPP

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "pct/parallel.hpp"
#include "pct/region.hpp"

namespace pct {

// ---------------------------------------------------------------------------
// Exact demonic k-step termination probability (monotone lower bounds on
// Pr_term): T_0 = [terminal]; min at nondeterministic states, expectation at
// probabilistic states.

namespace detail {

struct KStepEngine {
  const ProgramGraph& g;
  std::map<State, std::vector<std::optional<Rational>>> memo;

  Rational value(const State& s, std::size_t left) {
    if (g.is_terminal_state(s)) return 1;
    if (left == 0) return 0;
    auto& slots = memo[s];
    if (slots.size() <= left) slots.resize(left + 1);
    if (slots[left]) return *slots[left];
    Rational result = 0;
    auto succ = successors(g, s);
    if (!succ.empty()) {
      switch (g.location_kinds[s.location]) {
        case LocationKind::Assignment:
          result = value(succ[0].state, left - 1);
          break;
        case LocationKind::Probabilistic: {
          for (const auto& sc : succ) result += *sc.probability * value(sc.state, left - 1);
          break;
        }
        default: {  // demonic resolution
          bool first = true;
          for (const auto& sc : succ) {
            Rational v = value(sc.state, left - 1);
            if (first || v < result) result = v;
            first = false;
          }
          break;
        }
      }
    }
    slots[left] = result;
    return result;
  }
};

}  // namespace detail

inline Rational kstep_term_prob_min(const ProgramGraph& g, std::size_t k,
                                    std::optional<State> from = std::nullopt) {
  detail::KStepEngine engine{g, {}};
  return engine.value(from ? *from : g.initial_state(), k);
}

// ---------------------------------------------------------------------------
// Independent oracle: explicit walk of the scheduler/probability tree, no
// memoization and no reuse of the successor helper.

namespace detail {

struct OracleEngine {
  const ProgramGraph& g;
  std::size_t budget;
  std::size_t visited = 0;

  Rational walk(const State& s, std::size_t left) {
    if (++visited > budget) fail(ErrorKind::Budget, "oracle path budget exceeded");
    if (s.location == g.terminal_location) {
      bool all_zero = true;
      for (const auto& v : s.valuation)
        if (v != 0) all_zero = false;
      if (all_zero) return 1;
    }
    if (left == 0) return 0;
    Env env = g.environment(s);
    bool any = false, first_choice = true;
    Rational sum = 0, best = 0;
    State single{0, {}};
    for (std::size_t ti : g.outgoing[s.location]) {
      const Transition& t = g.transitions[ti];
      if (eval_exact(t.guard, env) == 0) continue;
      State next{t.target, s.valuation};
      if (t.update) next.valuation[t.update->var] = eval_exact(t.update->expression, env);
      any = true;
      switch (g.location_kinds[s.location]) {
        case LocationKind::Probabilistic:
          sum += eval_exact(*t.prob, env) * walk(next, left - 1);
          break;
        case LocationKind::Assignment:
          single = next;
          break;
        default: {
          Rational v = walk(next, left - 1);
          if (first_choice || v < best) best = v;
          first_choice = false;
          break;
        }
      }
    }
    if (!any) return 0;
    switch (g.location_kinds[s.location]) {
      case LocationKind::Probabilistic: return sum;
      case LocationKind::Assignment: return walk(single, left - 1);
      default: return best;
    }
  }
};

}  // namespace detail

inline Rational oracle_term_prob(const ProgramGraph& g, std::size_t k,
                                 std::size_t budget = 5000000) {
  detail::OracleEngine engine{g, budget};
  return engine.walk(g.initial_state(), k);
}

// ---------------------------------------------------------------------------
// Reachability value iteration over a region (binary64).

enum class Objective { Min, Max };

struct ValueMap {
  std::vector<double> values;
  std::string objective;
  std::string mode;
  double tol = 0.0;
  std::size_t iterations = 0;
  double residual = 0.0;
  std::size_t absorbed_frontier = 0;  // frontier states pinned as absorbing non-target

  std::string metadata() const {
    std::ostringstream out;
    out << "objective=" << objective << " mode=" << mode << " tol=" << tol
        << " iterations=" << iterations << " residual=" << residual
        << " absorbed_frontier=" << absorbed_frontier;
    return out.str();
  }
};

struct ReachMode {
  bool fixpoint = true;
  std::size_t horizon = 0;
  double tol = 1e-10;
  bool strict_closure = false;

  static ReachMode Fixpoint(double tol, bool strict = false) { return {true, 0, tol, strict}; }
  static ReachMode Horizon(std::size_t k) { return {false, k, 0.0, false}; }
};

inline ValueMap reach_prob(const ProgramGraph& g, const Region& region,
                           const std::function<bool(const State&)>& target, Objective objective,
                           const ReachMode& mode) {
  const std::size_t n = region.size();
  std::vector<char> is_target(n), pinned(n);
  ValueMap vm;
  vm.values.assign(n, 0.0);
  vm.objective = objective == Objective::Min ? "min" : "max";
  vm.mode = mode.fixpoint ? "fixpoint" : "horizon";
  vm.tol = mode.tol;

  struct Edge {
    std::size_t to;
    double p;
  };
  std::vector<std::vector<Edge>> edges(n);
  std::vector<LocationKind> kinds(n);

  for (std::size_t i = 0; i < n; ++i) {
    const State& s = region.states[i];
    kinds[i] = g.location_kinds[s.location];
    is_target[i] = target(s) ? 1 : 0;
    if (is_target[i]) {
      vm.values[i] = 1.0;
      pinned[i] = 1;
      continue;
    }
    if (g.is_terminal_state(s)) {
      pinned[i] = 1;
      continue;
    }
    if (!region.interior[i]) {
      pinned[i] = 1;
      ++vm.absorbed_frontier;
      if (mode.fixpoint && mode.strict_closure)
        fail(ErrorKind::NotClosed,
             "region is not successor-closed at " + g.state_str(s));
      continue;
    }
    for (const auto& sc : successors(g, s))
      edges[i].push_back({region.index.at(sc.state),
                          sc.probability ? to_double(*sc.probability) : 0.0});
    if (edges[i].empty()) pinned[i] = 1;  // stuck state: never reaches the target
  }

  std::vector<double> next(vm.values);
  std::size_t max_iters = mode.fixpoint ? 1000000 : mode.horizon;
  double residual = 0.0;
  std::size_t iter = 0;
  for (; iter < max_iters; ++iter) {
    parallel_for(n, [&](std::size_t i) {
      if (pinned[i]) {
        next[i] = vm.values[i];
        return;
      }
      double v = 0.0;
      switch (kinds[i]) {
        case LocationKind::Assignment:
          v = vm.values[edges[i][0].to];
          break;
        case LocationKind::Probabilistic:
          for (const auto& e : edges[i]) v += e.p * vm.values[e.to];
          break;
        default: {
          bool first = true;
          for (const auto& e : edges[i]) {
            double c = vm.values[e.to];
            if (first) v = c;
            else if (objective == Objective::Min) v = std::min(v, c);
            else v = std::max(v, c);
            first = false;
          }
          break;
        }
      }
      next[i] = v;
    });
    residual = 0.0;
    for (std::size_t i = 0; i < n; ++i) residual = std::max(residual, std::fabs(next[i] - vm.values[i]));
    vm.values.swap(next);
    if (mode.fixpoint && residual < mode.tol) {
      ++iter;
      break;
    }
  }
  vm.iterations = iter;
  vm.residual = residual;
  return vm;
}

inline std::string value_map_csv(const ProgramGraph& g, const Region& region, const ValueMap& vm) {
  std::ostringstream out;
  out << "index,location";
  for (const auto& v : g.variables) out << "," << v;
  out << ",value\n";
  out.precision(17);
  for (std::size_t i = 0; i < region.size(); ++i) {
    out << i << "," << g.location_names[region.states[i].location];
    for (const auto& q : region.states[i].valuation) out << "," << rational_str(q);
    out << "," << vm.values[i] << "\n";
  }
  return out.str();
}

// ---------------------------------------------------------------------------
// Bound on the length of the shortest terminal run, across schedulers.
// d(terminal)=0; +min over probabilistic branches; +max over demonic choices.

constexpr std::uint64_t kInfiniteDistance = std::numeric_limits<std::uint64_t>::max();

inline std::vector<std::uint64_t> shortest_run_bound(const ProgramGraph& g, const Region& region) {
  const std::size_t n = region.size();
  std::vector<std::uint64_t> d(n, kInfiniteDistance);
  std::vector<std::vector<std::size_t>> succ_idx(n);
  for (std::size_t i = 0; i < n; ++i) {
    const State& s = region.states[i];
    if (g.is_terminal_state(s)) {
      d[i] = 0;
      continue;
    }
    if (!region.interior[i]) continue;  // stays infinite
    for (const auto& sc : successors(g, s)) succ_idx[i].push_back(region.index.at(sc.state));
  }
  auto bump = [](std::uint64_t x) { return x == kInfiniteDistance ? x : x + 1; };
  for (std::size_t round = 0; round <= n + 1; ++round) {
    bool changed = false;
    for (std::size_t i = 0; i < n; ++i) {
      const State& s = region.states[i];
      if (d[i] == 0 || !region.interior[i] || succ_idx[i].empty()) continue;
      std::uint64_t v;
      if (g.location_kinds[s.location] == LocationKind::Nondeterministic) {
        v = 0;
        for (std::size_t j : succ_idx[i]) v = std::max(v, d[j]);
      } else if (g.location_kinds[s.location] == LocationKind::Probabilistic) {
        v = kInfiniteDistance;
        for (std::size_t j : succ_idx[i]) v = std::min(v, d[j]);
      } else {
        v = d[succ_idx[i][0]];
      }
      v = bump(v);
      if (v < d[i]) {
        d[i] = v;
        changed = true;
      }
    }
    if (!changed) break;
  }
  return d;
}

// ---------------------------------------------------------------------------
// Monte-Carlo estimation under a fixed policy.

enum class PolicyKind { FirstDeclared, UniformRandom, Table };

struct Policy {
  PolicyKind kind = PolicyKind::FirstDeclared;
  std::map<State, std::size_t> table;  // state -> transition index
};

struct SimulationResult {
  double estimate = 0.0;
  double half_width_95 = 0.0;
  std::size_t censored = 0;
  std::size_t runs = 0;
};

inline SimulationResult simulate(const ProgramGraph& g, const Policy& policy, std::size_t runs,
                                 std::size_t max_steps, std::uint64_t seed) {
  if (runs < 1 || max_steps < 1) fail(ErrorKind::Usage, "simulate needs runs >= 1 and max_steps >= 1");
  std::vector<std::uint8_t> outcome(runs, 0);  // 1 = terminated
  std::string policy_error;

  parallel_for(runs, [&](std::size_t run) {
    std::mt19937_64 rng(seed + run);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    State s = g.initial_state();
    for (std::size_t step = 0; step <= max_steps; ++step) {
      if (g.is_terminal_state(s)) {
        outcome[run] = 1;
        return;
      }
      if (step == max_steps) return;
      auto succ = successors(g, s);
      if (succ.empty()) return;
      std::size_t pick = 0;
      switch (g.location_kinds[s.location]) {
        case LocationKind::Probabilistic: {
          double u = unit(rng);
          double acc = 0.0;
          pick = succ.size() - 1;
          for (std::size_t i = 0; i < succ.size(); ++i) {
            acc += to_double(*succ[i].probability);
            if (u < acc) {
              pick = i;
              break;
            }
          }
          break;
        }
        case LocationKind::Assignment:
          pick = 0;
          break;
        default:
          switch (policy.kind) {
            case PolicyKind::FirstDeclared:
              pick = 0;
              break;
            case PolicyKind::UniformRandom:
              pick = static_cast<std::size_t>(unit(rng) * succ.size());
              if (pick >= succ.size()) pick = succ.size() - 1;
              break;
            case PolicyKind::Table: {
              auto it = policy.table.find(s);
              bool found = false;
              if (it != policy.table.end()) {
                for (std::size_t i = 0; i < succ.size(); ++i)
                  if (succ[i].transition == it->second) {
                    pick = i;
                    found = true;
                  }
              }
              if (!found) {
                policy_error = g.state_str(s);
                return;
              }
              break;
            }
          }
      }
      s = succ[pick].state;
    }
  });

  if (!policy_error.empty())
    fail(ErrorKind::PolicyIncomplete, "table policy has no choice at " + policy_error);

  SimulationResult res;
  res.runs = runs;
  std::size_t successes = 0;
  for (auto o : outcome) successes += o;
  res.censored = runs - successes;
  double n = static_cast<double>(runs);
  double phat = static_cast<double>(successes) / n;
  res.estimate = phat;
  const double z = 1.959963984540054;
  double z2 = z * z;
  res.half_width_95 = (z * std::sqrt(phat * (1.0 - phat) / n + z2 / (4.0 * n * n))) / (1.0 + z2 / n);
  return res;
}

// Demonically optimal memoryless policy extracted from min-reachability values.
inline Policy extract_min_policy(const ProgramGraph& g, const Region& region, const ValueMap& vm) {
  Policy p;
  p.kind = PolicyKind::Table;
  for (std::size_t i = 0; i < region.size(); ++i) {
    const State& s = region.states[i];
    if (g.location_kinds[s.location] != LocationKind::Nondeterministic) continue;
    auto succ = successors(g, s);
    std::optional<std::size_t> best;
    double best_v = 0.0;
    for (const auto& sc : succ) {
      auto it = region.index.find(sc.state);
      if (it == region.index.end()) continue;
      double v = vm.values[it->second];
      if (!best || v < best_v) {
        best = sc.transition;
        best_v = v;
      }
    }
    if (best) p.table[s] = *best;
  }
  return p;
}

}  // namespace pct

#endif
