#ifndef PCT_REGION_HPP
#define PCT_REGION_HPP

#include <cstdlib>
#include <deque>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "pct/program.hpp"

namespace pct {

inline std::size_t state_budget() {
  if (const char* env = std::getenv("PCT_STATE_BUDGET")) {
    long long v = std::atoll(env);
    if (v > 0) return static_cast<std::size_t>(v);
  }
  return 2000000;
}

// A finite window of the reachable state space. `index` is the deterministic
// enumeration order (BFS discovery, ties by transition declaration order).
struct Region {
  std::vector<State> states;
  std::map<State, std::size_t> index;
  std::vector<bool> interior;      // all successors stay inside the region
  std::vector<std::size_t> depth_of;  // BFS discovery depth (0 for custom regions)
  std::size_t depth = 0;

  bool contains(const State& s) const { return index.count(s) != 0; }
  std::size_t size() const { return states.size(); }
  std::size_t frontier_count() const {
    std::size_t n = 0;
    for (bool b : interior)
      if (!b) ++n;
    return n;
  }
};

namespace detail {

inline void compute_interior(const ProgramGraph& g, Region& r) {
  r.interior.assign(r.states.size(), true);
  for (std::size_t i = 0; i < r.states.size(); ++i) {
    for (const auto& sc : successors(g, r.states[i])) {
      if (!r.contains(sc.state)) {
        r.interior[i] = false;
        break;
      }
    }
  }
}

}  // namespace detail

inline Region enumerate_region(const ProgramGraph& g, std::size_t depth,
                               std::size_t budget = state_budget()) {
  Region r;
  r.depth = depth;
  State init = g.initial_state();
  r.index.emplace(init, 0);
  r.states.push_back(init);
  r.depth_of.push_back(0);
  std::deque<std::size_t> frontier{0};
  while (!frontier.empty()) {
    std::size_t i = frontier.front();
    frontier.pop_front();
    if (r.depth_of[i] >= depth) continue;
    for (const auto& sc : successors(g, r.states[i])) {
      if (r.index.count(sc.state)) continue;
      if (r.states.size() >= budget)
        fail(ErrorKind::Budget,
             "RegionBudgetExceeded: more than " + std::to_string(budget) + " states");
      std::size_t j = r.states.size();
      r.index.emplace(sc.state, j);
      r.states.push_back(sc.state);
      r.depth_of.push_back(r.depth_of[i] + 1);
      frontier.push_back(j);
    }
  }
  detail::compute_interior(g, r);
  return r;
}

// Region over an explicit state set; index order = given order.
inline Region region_from_states(const ProgramGraph& g, std::vector<State> states) {
  Region r;
  for (auto& s : states) {
    if (r.index.count(s)) continue;
    r.index.emplace(s, r.states.size());
    r.states.push_back(std::move(s));
    r.depth_of.push_back(0);
  }
  detail::compute_interior(g, r);
  return r;
}

inline std::string region_csv(const ProgramGraph& g, const Region& r) {
  std::ostringstream out;
  out << "index,location";
  for (const auto& v : g.variables) out << "," << v;
  out << ",value\n";
  for (std::size_t i = 0; i < r.states.size(); ++i) {
    out << i << "," << g.location_names[r.states[i].location];
    for (const auto& q : r.states[i].valuation) out << "," << rational_str(q);
    out << "," << (r.interior[i] ? 1 : 0) << "\n";
  }
  return out.str();
}

}  // namespace pct

#endif
