#pragma once

// Shared fixtures and random-path corpora for the test suites.
//
// Two corpora with different steepness budgets: `gentle_random_path`
// keeps knot times on a coarse lattice so segment slopes stay below
// ~2e3 and crossing-knot rounding stays under 1e-13; `random_path`
// allows near-coincident knots (slopes beyond 2e4), where inserted
// crossings are only good to roughly slope * ulp, so checks against it
// use the 1e-9 tier.

#include <cmath>
#include <cstddef>
#include <random>
#include <set>
#include <vector>

#include "doctest.h"
#include "pathlaw/plpath.hpp"

namespace corpus {

inline pathlaw::PLPath ref_path() {
  return pathlaw::make_path({0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0},
                            {0.0, 2.0, 1.0, 3.0});
}

inline void check_knots(const pathlaw::PLPath& p,
                        const std::vector<double>& ts,
                        const std::vector<double>& vs, double tol = 1e-12) {
  REQUIRE(p.knot_count() == ts.size());
  for (std::size_t i = 0; i < ts.size(); ++i) {
    CHECK(std::abs(p.knot_times()[i] - ts[i]) <= tol);
    CHECK(std::abs(p.knot_values()[i] - vs[i]) <= tol);
  }
}

inline pathlaw::PLPath random_path(std::mt19937_64& g) {
  std::uniform_int_distribution<int> nk(2, 64);
  std::uniform_real_distribution<double> interior(1e-6, 1.0 - 1e-6);
  std::uniform_real_distribution<double> val(-5.0, 5.0);
  const int n = nk(g);
  std::set<double> times{0.0, 1.0};
  while (static_cast<int>(times.size()) < n) times.insert(interior(g));
  std::vector<double> ts(times.begin(), times.end());
  std::vector<double> vs;
  vs.reserve(ts.size());
  for (std::size_t i = 0; i < ts.size(); ++i) vs.push_back(val(g));
  return pathlaw::make_path(ts, vs);
}

inline pathlaw::PLPath gentle_random_path(std::mt19937_64& g) {
  std::uniform_int_distribution<int> nk(2, 64);
  std::uniform_int_distribution<int> lattice(1, 199);
  std::uniform_real_distribution<double> val(-5.0, 5.0);
  const int n = nk(g);
  std::set<double> times{0.0, 1.0};
  while (static_cast<int>(times.size()) < n) times.insert(lattice(g) / 200.0);
  std::vector<double> ts(times.begin(), times.end());
  std::vector<double> vs;
  vs.reserve(ts.size());
  for (std::size_t i = 0; i < ts.size(); ++i) vs.push_back(val(g));
  return pathlaw::make_path(ts, vs);
}

inline std::vector<double> union_knot_times(
    std::initializer_list<const pathlaw::PLPath*> paths) {
  std::set<double> times;
  for (const pathlaw::PLPath* p : paths) {
    for (double t : p->knot_times()) times.insert(t);
  }
  return {times.begin(), times.end()};
}

}  // namespace corpus
