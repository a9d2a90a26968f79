#include "pathlaw/samplers.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <random>
#include <vector>

#include "doctest.h"
#include "pathlaw/errors.hpp"
#include "pathlaw/statlab.hpp"

using namespace pathlaw;

namespace {

double mean_of(const std::vector<double>& xs) {
  double s = 0.0;
  for (double v : xs) s += v;
  return s / static_cast<double>(xs.size());
}

double var_of(const std::vector<double>& xs) {
  const double m = mean_of(xs);
  double s = 0.0;
  for (double v : xs) s += (v - m) * (v - m);
  return s / static_cast<double>(xs.size() - 1);
}

std::vector<double> oracle_normals(std::size_t n, double mu, double sd,
                                   std::uint64_t seed) {
  std::mt19937_64 g(seed);
  std::normal_distribution<double> dist(mu, sd);
  std::vector<double> out(n);
  for (double& v : out) v = dist(g);
  return out;
}

std::vector<double> oracle_uniforms(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 g(seed);
  std::uniform_real_distribution<double> dist(0.0, 1.0);
  std::vector<double> out(n);
  for (double& v : out) v = dist(g);
  return out;
}

}  // namespace

TEST_CASE("brownian motion determinism, pinning and moments") {
  const PLPath p = sample_brownian_motion(-1.5, 2.0, 8, Seed{9, 4});
  const PLPath q = sample_brownian_motion(-1.5, 2.0, 8, Seed{9, 4});
  CHECK(p.knot_values() == q.knot_values());
  CHECK(p.knot_times() == q.knot_times());
  CHECK(p.value_front() == -1.5);
  CHECK(p.horizon() == 2.0);
  CHECK(p.knot_count() == 9);

  const PLPath r = sample_brownian_motion(-1.5, 2.0, 8, Seed{9, 5});
  CHECK(p.knot_values() != r.knot_values());

  const std::size_t reps = 100000;
  std::vector<double> ends(reps);
  for (std::size_t k = 0; k < reps; ++k) {
    ends[k] = sample_brownian_motion(-1.5, 2.0, 8, Seed{101, k}).value_back();
  }
  const double se_mean = std::sqrt(2.0 / static_cast<double>(reps));
  CHECK(std::abs(mean_of(ends) - (-1.5)) <= 4.0 * se_mean);
  const double se_var = 2.0 * std::sqrt(2.0 / static_cast<double>(reps - 1));
  CHECK(std::abs(var_of(ends) - 2.0) <= 4.0 * se_var);
}

TEST_CASE("brownian bridge endpoints and midpoint law") {
  const PLPath p = sample_brownian_bridge(0.4, -0.9, 1.0, 256, Seed{5, 0});
  CHECK(p.value_front() == 0.4);
  CHECK(p.value_back() == -0.9);

  const std::size_t reps = 20000;
  std::vector<double> mids(reps);
  for (std::size_t k = 0; k < reps; ++k) {
    mids[k] =
        sample_brownian_bridge(0.4, -0.9, 1.0, 64, Seed{7, k}).value_at(0.5);
  }
  CHECK(std::abs(mean_of(mids) - (-0.25)) <=
        4.0 * std::sqrt(0.25 / static_cast<double>(reps)));
  CHECK(std::abs(var_of(mids) - 0.25) <=
        4.0 * 0.25 * std::sqrt(2.0 / static_cast<double>(reps - 1)));

  // Exact-marginal oracle: midpoint is N((a+b)/2, t/4).
  const std::vector<double> oracle = oracle_normals(reps, -0.25, 0.5, 4242);
  const TestVerdict v = ks_two_sample(mids, oracle, 0.02);
  CHECK(v.pass);
}

TEST_CASE("bessel process stays nonnegative and matches a direct oracle") {
  const std::size_t reps = 20000;
  std::vector<double> ends(reps);
  double low = 1e300;
  for (std::size_t k = 0; k < reps; ++k) {
    const PLPath p = sample_bessel3_process(0.6, 1.0, 16, Seed{11, k});
    ends[k] = p.value_back();
    low = std::min(low, *std::min_element(p.knot_values().begin(),
                                          p.knot_values().end()));
  }
  CHECK(low >= 0.0);

  // Direct draw of the time-t modulus from a single 3-d Gaussian step.
  std::mt19937_64 g(97);
  std::normal_distribution<double> n01(0.0, 1.0);
  std::vector<double> oracle(reps);
  for (double& v : oracle) {
    const double x = 0.6 + n01(g);
    const double y = n01(g);
    const double z = n01(g);
    v = std::sqrt(x * x + y * y + z * z);
  }
  CHECK(ks_two_sample(ends, oracle, 0.02).pass);

  CHECK(sample_bessel3_process(0.6, 1.0, 16, Seed{11, 0}).value_front() == 0.6);
  CHECK_THROWS_AS((void)sample_bessel3_process(-0.1, 1.0, 16, Seed{}),
                  InvalidParams);
}

TEST_CASE("bessel bridge routes pin endpoints and stay nonnegative") {
  const PLPath down = sample_bessel3_bridge(0.8, 0.0, 1.0, 64, Seed{21, 3});
  CHECK(down.value_front() == 0.8);
  CHECK(down.value_back() == 0.0);
  const PLPath up = sample_bessel3_bridge(0.0, 1.1, 1.0, 64, Seed{21, 4});
  CHECK(up.value_front() == 0.0);
  CHECK(up.value_back() == 1.1);
  const PLPath mid = sample_bessel3_bridge(0.7, 1.3, 1.0, 64, Seed{21, 5});
  CHECK(mid.value_front() == 0.7);
  CHECK(mid.value_back() == 1.3);
  for (const PLPath* p : {&down, &up, &mid}) {
    for (double v : p->knot_values()) CHECK(v >= 0.0);
  }

  // Starving the rejection route must surface the budget error.
  CHECK_THROWS_AS(
      (void)sample_bessel3_bridge(0.001, 0.001, 1.0, 16, Seed{1, 1}, 50),
      RejectionBudgetExceeded);
  CHECK_THROWS_AS((void)sample_bessel3_bridge(-0.2, 1.0, 1.0, 16, Seed{}),
                  InvalidParams);
}

TEST_CASE("bessel bridge is reversible in law") {
  const std::size_t reps = 20000;
  // Symmetric bridge: the quarter point and the three-quarter point share
  // a law.
  std::vector<double> q1(reps);
  std::vector<double> q3(reps);
  for (std::size_t k = 0; k < reps; ++k) {
    const PLPath p = sample_bessel3_bridge(0.7, 0.7, 1.0, 64, Seed{31, k});
    q1[k] = p.value_at(0.25);
    q3[k] = p.value_at(0.75);
  }
  CHECK(ks_two_sample(q1, q3, 0.02).pass);

  // Asymmetric endpoints: (0.8 -> 0.6) against the reverse of (0.6 -> 0.8).
  std::vector<double> fwd(reps);
  std::vector<double> rev(reps);
  for (std::size_t k = 0; k < reps; ++k) {
    fwd[k] = sample_bessel3_bridge(0.8, 0.6, 1.0, 64, Seed{33, k})
                 .value_at(0.25);
    rev[k] = sample_bessel3_bridge(0.6, 0.8, 1.0, 64, Seed{34, k})
                 .value_at(0.75);
  }
  CHECK(ks_two_sample(fwd, rev, 0.02).pass);

  // Zero-endpoint route against the reversed mirror route.
  std::vector<double> dz(reps);
  std::vector<double> uz(reps);
  for (std::size_t k = 0; k < reps; ++k) {
    dz[k] = sample_bessel3_bridge(0.9, 0.0, 1.0, 64, Seed{35, k})
                .value_at(0.25);
    uz[k] = sample_bessel3_bridge(0.0, 0.9, 1.0, 64, Seed{36, k})
                .value_at(0.75);
  }
  CHECK(ks_two_sample(dz, uz, 0.02).pass);
}

TEST_CASE("segment extremes reproduce the continuum envelope laws") {
  const double a = 0.3;
  const double b = -0.2;
  const double t = 1.0;
  const ProcessSpec spec{"brownian_bridge", a, b, t, 64};
  const std::size_t reps = 20000;
  std::vector<double> umin(reps);
  std::vector<double> umax(reps);
  for (std::size_t k = 0; k < reps; ++k) {
    CounterRng rng(Seed{41, k});
    const AugmentedPath ap = sample_augmented(spec, rng);
    REQUIRE(ap.seg_min.size() == 64);
    REQUIRE(ap.seg_max.size() == 64);
    const double gmin =
        *std::min_element(ap.seg_min.begin(), ap.seg_min.end());
    const double gmax =
        *std::max_element(ap.seg_max.begin(), ap.seg_max.end());
    // Each extreme must clear every knot on its side.
    const auto& vs = ap.path.knot_values();
    CHECK(gmin <= *std::min_element(vs.begin(), vs.end()));
    CHECK(gmax >= *std::max_element(vs.begin(), vs.end()));
    // Tail-law probability transforms of the global extremes are uniform.
    umin[k] = std::exp(-2.0 * (a - gmin) * (b - gmin) / t);
    umax[k] = std::exp(-2.0 * (gmax - a) * (gmax - b) / t);
  }
  const std::vector<double> uref = oracle_uniforms(reps, 777);
  CHECK(ks_two_sample(umin, uref, 0.02).pass);
  CHECK(ks_two_sample(umax, uref, 0.02).pass);
}

TEST_CASE("positivity rejection rate matches the bridge tail probability") {
  // A bridge stays positive with chance 1 - exp(-2ab/t); the per-segment
  // minimum draws must reproduce that globally.
  const double a = 0.7;
  const double b = 1.3;
  const double expect = 1.0 - std::exp(-2.0 * a * b / 1.0);
  const std::size_t n = 32;
  const double h = 1.0 / static_cast<double>(n);
  const std::size_t trials = 20000;
  std::size_t positive = 0;
  for (std::size_t k = 0; k < trials; ++k) {
    CounterRng rng(Seed{51, k});
    const PLPath p = sample_brownian_bridge(a, b, 1.0, n, Seed{52, k});
    bool all_pos = true;
    const auto& vs = p.knot_values();
    for (std::size_t j = 0; j < n; ++j) {
      all_pos =
          all_pos && segment_min_draw(vs[j], vs[j + 1], h, rng) > 0.0;
    }
    if (all_pos) ++positive;
  }
  CHECK(rate_vs_reference(positive, trials, expect).pass);
}

TEST_CASE("conditioned sampling reproduces the reference acceptance rate") {
  // Bridge to y, accepted when twice its continuum maximum clears y + |x|.
  const double x = 1.2;
  const double y = 0.5;
  const ProcessSpec spec{"brownian_bridge", 0.0, y, 1.0, 64};
  const auto accept = [&](const AugmentedPath& ap) {
    const double gmax =
        *std::max_element(ap.seg_max.begin(), ap.seg_max.end());
    return 2.0 * gmax - y >= std::abs(x);
  };
  std::size_t total_attempts = 0;
  const std::size_t reps = 10000;
  for (std::size_t k = 0; k < reps; ++k) {
    const ConditionedSample cs =
        sample_conditioned(spec, accept, Seed{61, k}, 100000);
    total_attempts += cs.attempts;
    CHECK(accept(cs.sample));
  }
  const TestVerdict v =
      rate_vs_reference(reps, total_attempts, bridge_max_tail(y, x, 1.0));
  CHECK(v.pass);

  // Deterministic replay.
  const ConditionedSample c1 = sample_conditioned(spec, accept, Seed{61, 7});
  const ConditionedSample c2 = sample_conditioned(spec, accept, Seed{61, 7});
  CHECK(c1.attempts == c2.attempts);
  CHECK(c1.sample.path.knot_values() == c2.sample.path.knot_values());

  // Impossible predicate exhausts the budget.
  const auto never = [](const AugmentedPath&) { return false; };
  CHECK_THROWS_AS((void)sample_conditioned(spec, never, Seed{61, 8}, 25),
                  RejectionBudgetExceeded);
}

TEST_CASE("independent streams decorrelate midpoints") {
  const std::size_t reps = 10000;
  std::vector<double> xs(reps);
  std::vector<double> ys(reps);
  for (std::size_t k = 0; k < reps; ++k) {
    xs[k] = sample_brownian_motion(0.0, 1.0, 2, Seed{71, 2 * k}).value_at(0.5);
    ys[k] =
        sample_brownian_motion(0.0, 1.0, 2, Seed{71, 2 * k + 1}).value_at(0.5);
  }
  const double mx = mean_of(xs);
  const double my = mean_of(ys);
  double sxy = 0.0;
  for (std::size_t k = 0; k < reps; ++k) sxy += (xs[k] - mx) * (ys[k] - my);
  const double corr = sxy / (static_cast<double>(reps) *
                             std::sqrt(var_of(xs) * var_of(ys)));
  CHECK(std::abs(corr) <= 4.0 / std::sqrt(static_cast<double>(reps)));
}

TEST_CASE("brownian sampling on a custom grid") {
  std::vector<double> times{0.0, 0.5, 2.0, 2.25};
  CounterRng rng(Seed{81, 0});
  const PLPath p = brownian_motion_at(1.0, times, rng);
  CHECK(p.knot_times() == times);
  CHECK(p.value_front() == 1.0);

  const std::size_t reps = 100000;
  std::vector<double> ends(reps);
  for (std::size_t k = 0; k < reps; ++k) {
    CounterRng r(Seed{83, k});
    ends[k] = brownian_motion_at(0.0, times, r).value_back();
  }
  const double se_var = 2.25 * std::sqrt(2.0 / static_cast<double>(reps - 1));
  CHECK(std::abs(var_of(ends) - 2.25) <= 4.0 * se_var);

  std::vector<double> bad{0.5, 1.0};
  CHECK_THROWS_AS((void)brownian_motion_at(0.0, bad, rng), InvalidParams);
  std::vector<double> flat{0.0, 1.0, 1.0};
  CHECK_THROWS_AS((void)brownian_motion_at(0.0, flat, rng), InvalidParams);
}

TEST_CASE("process spec validation") {
  CounterRng rng(Seed{91, 0});
  ProcessSpec bad{"ornstein", 0.0, 0.0, 1.0, 8};
  CHECK_THROWS_AS((void)sample_augmented(bad, rng), InvalidParams);
  ProcessSpec negt{"brownian_motion", 0.0, 0.0, -1.0, 8};
  CHECK_THROWS_AS((void)sample_augmented(negt, rng), InvalidParams);
  CHECK_THROWS_AS((void)sample_brownian_motion(0.0, 1.0, 0, Seed{}),
                  InvalidParams);

  ProcessSpec bes{"bessel3_process", 0.4, 0.0, 1.0, 8};
  const AugmentedPath ap = sample_augmented(bes, rng);
  CHECK(ap.seg_min.size() == 8);
  CHECK(ap.seg_max.size() == 8);
  for (double m : ap.seg_min) CHECK(m > 0.0);

  // Starting at zero leaves an exact zero minimum on the first segment.
  ProcessSpec bz{"bessel3_process", 0.0, 0.0, 1.0, 8};
  const AugmentedPath zp = sample_augmented(bz, rng);
  CHECK(zp.seg_min[0] == 0.0);
  for (std::size_t j = 1; j < 8; ++j) CHECK(zp.seg_min[j] > 0.0);

  ProcessSpec bb{"bessel3_bridge", 0.7, 1.3, 1.0, 8};
  const AugmentedPath bp = sample_augmented(bb, rng);
  CHECK(bp.seg_min.size() == 8);
  CHECK(bp.seg_max.size() == 8);
  for (double m : bp.seg_min) CHECK(m > 0.0);
}

TEST_CASE("positive segment minima follow the conditioned dip law") {
  const double u = 0.5;
  const double v = 0.9;
  const double h = 0.25;
  const double q0 = std::exp(-2.0 * u * v / h);
  const std::size_t reps = 20000;
  std::vector<double> unit(reps);
  for (std::size_t k = 0; k < reps; ++k) {
    CounterRng rng(Seed{45, k});
    const double m = segment_min_draw_positive(u, v, h, rng);
    REQUIRE(m > 0.0);
    REQUIRE(m <= std::min(u, v));
    // Conditioned tail transform of the minimum must be uniform.
    unit[k] = (std::exp(-2.0 * (u - m) * (v - m) / h) - q0) / (1.0 - q0);
  }
  CHECK(ks_two_sample(unit, oracle_uniforms(reps, 555), 0.02).pass);

  // A zero endpoint collapses the law onto that endpoint.
  CounterRng rng(Seed{45, 999999});
  CHECK(segment_min_draw_positive(0.0, 0.8, h, rng) == 0.0);
  CHECK(segment_min_draw_positive(0.8, 0.0, h, rng) == 0.0);
}

TEST_CASE("refinement realizes the drawn extremes as knots") {
  CounterRng rng(Seed{47, 0});
  const ProcessSpec spec{"brownian_bridge", 0.2, -0.4, 1.0, 16};
  const AugmentedPath ap = sample_augmented(spec, rng);
  const PLPath r = refine_with_extremes(ap);
  CHECK(r.knot_count() == 3 * 16 + 1);
  const auto& ts = ap.path.knot_times();
  const auto& vs = ap.path.knot_values();
  for (std::size_t j = 0; j < 16; ++j) {
    const double w = ts[j + 1] - ts[j];
    CHECK(r.value_at(ts[j]) == vs[j]);
    CHECK(r.value_at(ts[j] + w / 3.0) == ap.seg_min[j]);
    CHECK(r.value_at(ts[j] + 2.0 * w / 3.0) == ap.seg_max[j]);
  }
  CHECK(r.value_back() == vs.back());

  const auto& rv = r.knot_values();
  CHECK(*std::min_element(rv.begin(), rv.end()) ==
        *std::min_element(ap.seg_min.begin(), ap.seg_min.end()));
  CHECK(*std::max_element(rv.begin(), rv.end()) ==
        *std::max_element(ap.seg_max.begin(), ap.seg_max.end()));

  // A path without stored extremes passes through unchanged.
  const AugmentedPath bare{ap.path, {}, {}};
  const PLPath same = refine_with_extremes(bare);
  CHECK(same.knot_times() == ap.path.knot_times());
  CHECK(same.knot_values() == ap.path.knot_values());
}
