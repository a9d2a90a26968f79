#include "pathlaw/plpath.hpp"

#include <cmath>
#include <cstdlib>
#include <random>
#include <set>
#include <sstream>
#include <vector>

#include "doctest.h"
#include "pathlaw/errors.hpp"

using namespace pathlaw;

namespace {

const PLPath kRef = make_path({0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0},
                              {0.0, 2.0, 1.0, 3.0});

void check_knots(const PLPath& p, const std::vector<double>& ts,
                 const std::vector<double>& vs, double tol = 1e-12) {
  REQUIRE(p.knot_count() == ts.size());
  for (std::size_t i = 0; i < ts.size(); ++i) {
    CHECK(std::abs(p.knot_times()[i] - ts[i]) <= tol);
    CHECK(std::abs(p.knot_values()[i] - vs[i]) <= tol);
  }
}

PLPath random_path(std::mt19937_64& g) {
  std::uniform_int_distribution<int> nk(2, 64);
  std::uniform_real_distribution<double> ut(0.0, 1.0);
  std::uniform_real_distribution<double> uv(-5.0, 5.0);
  const int n = nk(g);
  std::set<double> interior;
  for (int i = 0; i < n - 2; ++i) {
    const double u = ut(g);
    if (u > 0.0 && u < 1.0) interior.insert(u);
  }
  std::vector<double> ts{0.0};
  ts.insert(ts.end(), interior.begin(), interior.end());
  ts.push_back(1.0);
  std::vector<double> vs(ts.size());
  for (double& v : vs) v = uv(g);
  return make_path(std::move(ts), std::move(vs));
}

// Random path whose knots sit on a coarse lattice, bounding segment slopes.
// An inserted crossing time carries a half-ulp rounding error; the value
// error it induces scales with the segment slope, so the tightest pointwise
// tolerances are only meaningful on slope-bounded paths.
PLPath gentle_random_path(std::mt19937_64& g) {
  std::uniform_int_distribution<int> nk(2, 64);
  std::uniform_int_distribution<int> lattice(1, 199);
  std::uniform_real_distribution<double> uv(-5.0, 5.0);
  const int n = nk(g);
  std::set<double> interior;
  for (int i = 0; i < n - 2; ++i) {
    interior.insert(static_cast<double>(lattice(g)) / 200.0);
  }
  std::vector<double> ts{0.0};
  ts.insert(ts.end(), interior.begin(), interior.end());
  ts.push_back(1.0);
  std::vector<double> vs(ts.size());
  for (double& v : vs) v = uv(g);
  return make_path(std::move(ts), std::move(vs));
}

// Exact running maximum of a PL path: max of the value at s and every knot
// value before s.  Independent of the envelope sweep.
double brute_prefix_max(const PLPath& p, double s) {
  double m = p.value_at(s);
  const auto& ts = p.knot_times();
  const auto& vs = p.knot_values();
  for (std::size_t i = 0; i < ts.size() && ts[i] <= s; ++i) {
    m = std::max(m, vs[i]);
  }
  return m;
}

}  // namespace

TEST_CASE("construction stores knots and validates input") {
  const PLPath line = make_path({0.0, 1.0}, {0.0, 3.0});
  CHECK(line.horizon() == 1.0);
  CHECK(line.value_at(0.5) == doctest::Approx(1.5).epsilon(1e-15));

  CHECK(kRef.knot_count() == 4);
  CHECK(kRef.knot_values()[1] == 2.0);

  CHECK_THROWS_AS(make_path({0.0, 0.5, 0.5, 1.0}, {0.0, 1.0, 2.0, 3.0}),
                  NonMonotoneTimes);
  CHECK_THROWS_AS(make_path({0.5, 1.0}, {0.0, 1.0}), NonMonotoneTimes);
  CHECK_THROWS_AS(make_path({0.0, 1.0}, {0.0, 1.0, 2.0}), LengthMismatch);
  CHECK_THROWS_AS(make_path({0.0}, {0.0}), EmptyPath);
  CHECK_THROWS_AS(make_path({}, {}), EmptyPath);
}

TEST_CASE("evaluation is exact at knots and linear between them") {
  CHECK(kRef.value_at(1.0 / 3.0) == 2.0);  // stored value, no arithmetic
  CHECK(kRef.value_at(1.0 / 6.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(kRef.value_at(5.0 / 6.0) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(kRef.value_at(0.0) == 0.0);
  CHECK(kRef.value_at(1.0) == 3.0);
  CHECK_THROWS_AS((void)kRef.value_at(-0.1), OutOfDomain);
  CHECK_THROWS_AS((void)kRef.value_at(1.1), OutOfDomain);
}

TEST_CASE("reverse flips the time axis and is an involution") {
  const PLPath line = make_path({0.0, 1.0}, {0.0, 3.0});
  check_knots(reverse(line), {0.0, 1.0}, {3.0, 0.0});

  check_knots(reverse(kRef), {0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0},
              {3.0, 1.0, 2.0, 0.0});

  // dyadic knot times reflect exactly, so the round trip is bitwise
  const PLPath dyadic =
      make_path({0.0, 0.25, 0.5, 0.8125, 1.0}, {0.3, -1.2, 4.0, 0.7, -2.5});
  const PLPath rr = reverse(reverse(dyadic));
  REQUIRE(rr.knot_count() == dyadic.knot_count());
  for (std::size_t i = 0; i < dyadic.knot_count(); ++i) {
    CHECK(rr.knot_times()[i] == dyadic.knot_times()[i]);
    CHECK(rr.knot_values()[i] == dyadic.knot_values()[i]);
  }
}

TEST_CASE("running-extremum envelopes insert crossing knots") {
  check_knots(envelope(kRef, Envelope::prefix_max),
              {0.0, 1.0 / 3.0, 5.0 / 6.0, 1.0}, {0.0, 2.0, 2.0, 3.0});
  check_knots(envelope(kRef, Envelope::prefix_min), {0.0, 1.0}, {0.0, 0.0});
  CHECK(envelope(reverse(kRef), Envelope::suffix_min).value_at(0.0) == 0.0);

  // suffix variants against a direct tail scan
  std::mt19937_64 g(2024);
  for (int rep = 0; rep < 25; ++rep) {
    const PLPath p = random_path(g);
    const PLPath smax = envelope(p, Envelope::suffix_max);
    const PLPath smin = envelope(p, Envelope::suffix_min);
    const auto& ts = p.knot_times();
    const auto& vs = p.knot_values();
    for (int j = 0; j <= 2000; ++j) {
      const double s = static_cast<double>(j) / 2000.0;
      double hi = p.value_at(s);
      double lo = hi;
      for (std::size_t i = 0; i < ts.size(); ++i) {
        if (ts[i] >= s) {
          hi = std::max(hi, vs[i]);
          lo = std::min(lo, vs[i]);
        }
      }
      CHECK(std::abs(smax.value_at(s) - hi) <= 1e-9);
      CHECK(std::abs(smin.value_at(s) - lo) <= 1e-9);
    }
  }
}

TEST_CASE("prefix_max matches a brute-force oracle on a dense grid") {
  std::mt19937_64 g(7);
  for (int rep = 0; rep < 25; ++rep) {
    const PLPath p = random_path(g);
    const PLPath env = envelope(p, Envelope::prefix_max);
    double worst = 0.0;
    for (int j = 0; j <= 10000; ++j) {
      const double s = static_cast<double>(j) / 10000.0;
      worst = std::max(worst, std::abs(env.value_at(s) - brute_prefix_max(p, s)));
    }
    // the envelope's own knots must match the oracle too
    for (double s : env.knot_times()) {
      worst = std::max(worst, std::abs(env.value_at(s) - brute_prefix_max(p, s)));
    }
    CHECK(worst <= 1e-9);
  }
}

TEST_CASE("combine forms exact linear combinations on the union knot set") {
  check_knots(combine(std::vector<PLPath>{kRef}, std::vector<double>{-1.0}, 0.0),
              {0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0}, {0.0, -2.0, -1.0, -3.0});

  const std::vector<PLPath> pair{kRef, kRef};
  check_knots(combine(pair, std::vector<double>{1.0, -1.0}, 5.0), {0.0, 1.0},
              {5.0, 5.0});

  // 2*prefix_max - path lands knots on the union set
  const std::vector<PLPath> pm{kRef, envelope(kRef, Envelope::prefix_max)};
  check_knots(combine(pm, std::vector<double>{-1.0, 2.0}, 0.0),
              {0.0, 1.0 / 3.0, 2.0 / 3.0, 5.0 / 6.0, 1.0},
              {0.0, 2.0, 3.0, 2.0, 3.0});

  const PLPath other = make_path({0.0, 2.0}, {0.0, 1.0});
  CHECK_THROWS_AS(combine(std::vector<PLPath>{kRef, other},
                          std::vector<double>{1.0, 1.0}, 0.0),
                  HorizonMismatch);
  CHECK_THROWS_AS(
      combine(std::vector<PLPath>{kRef}, std::vector<double>{1.0, 2.0}, 0.0),
      LengthMismatch);
}

TEST_CASE("abs_path pins a knot at every sign change") {
  const PLPath cross = make_path({0.0, 1.0}, {-1.0, 1.0});
  check_knots(abs_path(cross), {0.0, 0.5, 1.0}, {1.0, 0.0, 1.0});

  // nonnegative input passes through unchanged
  const PLPath a = abs_path(kRef);
  check_knots(a, kRef.knot_times(), kRef.knot_values());

  // shifted reference path crosses zero three times
  const PLPath shifted =
      combine(std::vector<PLPath>{kRef}, std::vector<double>{1.0}, -1.5);
  const PLPath sa = abs_path(shifted);
  std::vector<double> zeros;
  for (std::size_t i = 0; i < sa.knot_count(); ++i) {
    if (sa.knot_values()[i] == 0.0) zeros.push_back(sa.knot_times()[i]);
  }
  REQUIRE(zeros.size() == 3);
  CHECK(std::abs(zeros[0] - 0.25) <= 1e-12);
  CHECK(std::abs(zeros[1] - 0.5) <= 1e-12);
  CHECK(std::abs(zeros[2] - 0.75) <= 1e-12);

  std::mt19937_64 g(11);
  for (int rep = 0; rep < 25; ++rep) {
    const PLPath p = gentle_random_path(g);
    const PLPath ap = abs_path(p);
    for (int j = 0; j <= 10000; ++j) {
      const double s = static_cast<double>(j) / 10000.0;
      CHECK(ap.value_at(s) >= 0.0);
      CHECK(std::abs(ap.value_at(s) - std::abs(p.value_at(s))) <= 1e-12);
    }
  }
  // steep segments amplify the crossing knot's rounding, so the general
  // corpus gets the coarser tier
  for (int rep = 0; rep < 25; ++rep) {
    const PLPath p = random_path(g);
    const PLPath ap = abs_path(p);
    for (int j = 0; j <= 10000; ++j) {
      const double s = static_cast<double>(j) / 10000.0;
      CHECK(ap.value_at(s) >= 0.0);
      CHECK(std::abs(ap.value_at(s) - std::abs(p.value_at(s))) <= 1e-9);
    }
  }
}

TEST_CASE("pointwise_min inserts intersection knots") {
  const PLPath line = make_path({0.0, 1.0}, {0.0, 2.0});
  check_knots(pointwise_min(line, constant_path(1.0, 1.0)), {0.0, 0.5, 1.0},
              {0.0, 1.0, 1.0});

  const PLPath self = pointwise_min(kRef, kRef);
  for (int j = 0; j <= 1000; ++j) {
    const double s = static_cast<double>(j) / 1000.0;
    CHECK(std::abs(self.value_at(s) - kRef.value_at(s)) <= 1e-12);
  }

  // doubled suffix minimum of the Pitman path capped at 4 collapses to a
  // rise-then-flat shape
  const std::vector<PLPath> pm{kRef, envelope(kRef, Envelope::prefix_max)};
  const PLPath pit = combine(pm, std::vector<double>{-1.0, 2.0}, 0.0);
  const PLPath capped = pointwise_min(
      scale_shift(envelope(pit, Envelope::suffix_min), 2.0, 0.0),
      constant_path(4.0, 1.0));
  check_knots(capped, {0.0, 1.0 / 3.0, 1.0}, {0.0, 4.0, 4.0});

  CHECK_THROWS_AS(pointwise_min(kRef, make_path({0.0, 2.0}, {0.0, 0.0})),
                  HorizonMismatch);

  std::mt19937_64 g(13);
  for (int rep = 0; rep < 25; ++rep) {
    const PLPath p = gentle_random_path(g);
    const PLPath q = gentle_random_path(g);
    const PLPath m = pointwise_min(p, q);
    for (int j = 0; j <= 10000; ++j) {
      const double s = static_cast<double>(j) / 10000.0;
      CHECK(std::abs(m.value_at(s) -
                     std::min(p.value_at(s), q.value_at(s))) <= 1e-12);
    }
  }
  for (int rep = 0; rep < 25; ++rep) {
    const PLPath p = random_path(g);
    const PLPath q = random_path(g);
    const PLPath m = pointwise_min(p, q);
    for (int j = 0; j <= 10000; ++j) {
      const double s = static_cast<double>(j) / 10000.0;
      CHECK(std::abs(m.value_at(s) -
                     std::min(p.value_at(s), q.value_at(s))) <= 1e-9);
    }
  }
}

TEST_CASE("window extrema and integrals are exact on knots") {
  CHECK(max_over(kRef, 0.0, 1.0) == 3.0);
  CHECK(min_over(kRef, 0.0, 1.0) == 0.0);
  CHECK(integral_over(kRef, 0.0, 1.0) == doctest::Approx(1.5).epsilon(1e-14));
  CHECK(integral_over(kRef, 1.0 / 3.0, 2.0 / 3.0) ==
        doctest::Approx(0.5).epsilon(1e-14));

  // windows cutting through segment interiors
  CHECK(max_over(kRef, 0.4, 0.7) == doctest::Approx(1.8).epsilon(1e-14));
  CHECK(min_over(kRef, 0.4, 0.7) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(integral_over(kRef, 0.5, 0.5) == 0.0);
  CHECK_THROWS_AS(max_over(kRef, -0.1, 0.5), OutOfDomain);
  CHECK_THROWS_AS(integral_over(kRef, 0.0, 1.5), OutOfDomain);
}

TEST_CASE("degenerate two-knot paths round-trip every operation") {
  const PLPath c = constant_path(-2.5, 1.0);
  CHECK(c.value_at(0.37) == -2.5);
  check_knots(envelope(c, Envelope::prefix_max), {0.0, 1.0}, {-2.5, -2.5});
  check_knots(envelope(c, Envelope::suffix_min), {0.0, 1.0}, {-2.5, -2.5});
  check_knots(abs_path(c), {0.0, 1.0}, {2.5, 2.5});
  check_knots(reverse(c), {0.0, 1.0}, {-2.5, -2.5});
  check_knots(pointwise_min(c, constant_path(1.0, 1.0)), {0.0, 1.0},
              {-2.5, -2.5});
  CHECK(integral_over(c, 0.0, 1.0) == doctest::Approx(-2.5).epsilon(1e-15));
  CHECK_THROWS_AS(constant_path(0.0, 0.0), DomainError);
  CHECK_THROWS_AS(constant_path(0.0, -1.0), DomainError);
}

TEST_CASE("collinear interior knots are pruned by operations") {
  const PLPath redundant = make_path({0.0, 0.5, 1.0}, {0.0, 1.0, 2.0});
  CHECK(redundant.knot_count() == 3);  // construction stores verbatim
  const PLPath through =
      combine(std::vector<PLPath>{redundant}, std::vector<double>{1.0}, 0.0);
  CHECK(through.knot_count() == 2);
  CHECK(through.value_at(0.5) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("densify refines the grid without changing the function") {
  const PLPath d = densify(kRef, 300);
  CHECK(d.knot_count() >= 301);
  for (int j = 0; j <= 10000; ++j) {
    const double s = static_cast<double>(j) / 10000.0;
    CHECK(std::abs(d.value_at(s) - kRef.value_at(s)) <= 1e-12);
  }
  CHECK(d.horizon() == kRef.horizon());
  CHECK(d.value_front() == kRef.value_front());
  CHECK(d.value_back() == kRef.value_back());
}

TEST_CASE("csv dump uses the documented header and round-trips values") {
  std::ostringstream os;
  write_csv(kRef, os);
  std::istringstream is(os.str());
  std::string header;
  std::getline(is, header);
  CHECK(header == "s,value");
  std::size_t row = 0;
  std::string line;
  while (std::getline(is, line)) {
    const auto comma = line.find(',');
    REQUIRE(comma != std::string::npos);
    const double t = std::strtod(line.substr(0, comma).c_str(), nullptr);
    const double v = std::strtod(line.substr(comma + 1).c_str(), nullptr);
    CHECK(t == kRef.knot_times()[row]);
    CHECK(v == kRef.knot_values()[row]);
    ++row;
  }
  CHECK(row == kRef.knot_count());
}
