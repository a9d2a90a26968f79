#include "pathlaw/samplers.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "pathlaw/errors.hpp"

namespace pathlaw {
namespace {

void check_common(double t, std::size_t n) {
  if (!(t > 0.0) || !std::isfinite(t)) {
    throw InvalidParams("sampler: horizon must be positive and finite");
  }
  if (n < 1) throw InvalidParams("sampler: need at least one step");
}

std::vector<double> uniform_times(double t, std::size_t n) {
  std::vector<double> ts(n + 1);
  for (std::size_t i = 0; i <= n; ++i) {
    ts[i] = t * static_cast<double>(i) / static_cast<double>(n);
  }
  ts[n] = t;
  return ts;
}

// Brownian values on the uniform grid, start pinned to `a`.
std::vector<double> brownian_values(double a, double t, std::size_t n,
                                    CounterRng& rng) {
  const double step_sd = std::sqrt(t / static_cast<double>(n));
  std::vector<double> vs(n + 1);
  vs[0] = a;
  for (std::size_t i = 1; i <= n; ++i) {
    vs[i] = vs[i - 1] + step_sd * rng.normal();
  }
  return vs;
}

// Bridge values via the global construction
//   a + (B_s - (s/t) B_t) + (b - a) s/t
// which pins both endpoints exactly.
std::vector<double> bridge_values(double a, double b, double t, std::size_t n,
                                  CounterRng& rng) {
  std::vector<double> w = brownian_values(0.0, t, n, rng);
  const double wt = w.back();
  std::vector<double> vs(n + 1);
  for (std::size_t i = 0; i <= n; ++i) {
    const double frac = static_cast<double>(i) / static_cast<double>(n);
    vs[i] = a + (w[i] - frac * wt) + (b - a) * frac;
  }
  vs[0] = a;
  vs[n] = b;
  return vs;
}

std::vector<double> bessel_values(double a, double t, std::size_t n,
                                  CounterRng& rng) {
  std::vector<double> x = brownian_values(a, t, n, rng);
  std::vector<double> y = brownian_values(0.0, t, n, rng);
  std::vector<double> z = brownian_values(0.0, t, n, rng);
  std::vector<double> vs(n + 1);
  for (std::size_t i = 0; i <= n; ++i) {
    vs[i] = std::sqrt(x[i] * x[i] + y[i] * y[i] + z[i] * z[i]);
  }
  return vs;
}

// Bessel bridge ending at zero: modulus of (a(1 - s/t) + g1, g2, g3) with
// three independent null bridges g_k.  Start and end are exact.
std::vector<double> bessel_bridge_to_zero_values(double a, double t,
                                                 std::size_t n,
                                                 CounterRng& rng) {
  std::vector<double> g1 = bridge_values(0.0, 0.0, t, n, rng);
  std::vector<double> g2 = bridge_values(0.0, 0.0, t, n, rng);
  std::vector<double> g3 = bridge_values(0.0, 0.0, t, n, rng);
  std::vector<double> vs(n + 1);
  for (std::size_t i = 0; i <= n; ++i) {
    const double frac = static_cast<double>(i) / static_cast<double>(n);
    const double radial = a * (1.0 - frac) + g1[i];
    vs[i] = std::sqrt(radial * radial + g2[i] * g2[i] + g3[i] * g3[i]);
  }
  vs[0] = a;
  vs[n] = 0.0;
  return vs;
}

// Dip level of the excursion below (above) the chord on one segment.  One
// uniform inverts the endpoint-conditioned extreme law of a
// unit-volatility diffusion over a segment of width h.
double dip_radius(double u, double v, double h, CounterRng& rng) {
  const double unit = 1.0 - rng.uniform01();  // in (0, 1]
  const double c2 = -h * std::log(unit) / 2.0;
  const double gap = u - v;
  return std::sqrt(gap * gap + 4.0 * c2);
}

// Same, with the dip law truncated so the minimum stays above zero: the
// inverse CDF is applied on (q0, 1] with q0 = P(min <= 0) = exp(-2uv/h).
// u*v = 0 collapses the law onto min(u, v) exactly.
double dip_radius_positive(double u, double v, double h, CounterRng& rng) {
  const double q0 = std::exp(-2.0 * u * v / h);
  const double unit = q0 + (1.0 - q0) * (1.0 - rng.uniform01());
  const double c2 = unit >= 1.0 ? 0.0 : -h * std::log(unit) / 2.0;
  const double gap = u - v;
  return std::sqrt(gap * gap + 4.0 * c2);
}

// One uniform per extreme, left to right.
void fill_mins(AugmentedPath& out, double h, CounterRng& rng, bool positive) {
  const std::vector<double>& knots = out.path.knot_values();
  const std::size_t n = knots.size() - 1;
  out.seg_min.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double u = knots[j];
    const double v = knots[j + 1];
    const double dip =
        positive ? dip_radius_positive(u, v, h, rng) : dip_radius(u, v, h, rng);
    out.seg_min[j] = (u + v - dip) / 2.0;
  }
}

void fill_maxes(AugmentedPath& out, double h, CounterRng& rng) {
  const std::vector<double>& knots = out.path.knot_values();
  const std::size_t n = knots.size() - 1;
  out.seg_max.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    out.seg_max[j] =
        (knots[j] + knots[j + 1] + dip_radius(knots[j], knots[j + 1], h, rng)) /
        2.0;
  }
}

// Bessel-bridge values for strictly positive endpoints, by resampling a
// Brownian bridge until its continuum minimum stays positive on every
// segment.  The per-segment minima that witness acceptance are exact
// continuum minima of the positive bridge, so they are returned as well.
std::pair<std::vector<double>, std::vector<double>> bessel_bridge_reject(
    double a, double b, double t, std::size_t n, CounterRng& rng,
    std::size_t max_rejections) {
  const double h = t / static_cast<double>(n);
  for (std::size_t attempt = 0; attempt < max_rejections; ++attempt) {
    std::vector<double> vs = bridge_values(a, b, t, n, rng);
    std::vector<double> mins(n);
    bool positive = true;
    for (std::size_t j = 0; j < n; ++j) {
      const double u = vs[j];
      const double v = vs[j + 1];
      mins[j] = (u + v - dip_radius(u, v, h, rng)) / 2.0;
      positive = positive && mins[j] > 0.0;
    }
    if (positive) return {std::move(vs), std::move(mins)};
  }
  throw RejectionBudgetExceeded(
      "bessel3_bridge: no positive bridge within the attempt budget");
}

AugmentedPath augmented_from_values(std::vector<double> ts,
                                    std::vector<double> vs, double h,
                                    CounterRng& rng) {
  AugmentedPath out{make_path(std::move(ts), std::move(vs)), {}, {}};
  fill_mins(out, h, rng, false);
  fill_maxes(out, h, rng);
  return out;
}

void check_bessel_endpoints(double a, double b) {
  if (!(a >= 0.0) || !(b >= 0.0)) {
    throw InvalidParams("bessel3_bridge: endpoints must be nonnegative");
  }
}

std::vector<double> bessel_bridge_values(double a, double b, double t,
                                         std::size_t n, CounterRng& rng,
                                         std::size_t max_rejections,
                                         std::vector<double>* mins_out) {
  check_bessel_endpoints(a, b);
  if (b == 0.0) {
    if (mins_out) mins_out->clear();
    return bessel_bridge_to_zero_values(a, t, n, rng);
  }
  if (a == 0.0) {
    // Reverse the value sequence of the (b -> 0) bridge; the uniform grid
    // times are kept verbatim so reversal is exact.
    std::vector<double> vs = bessel_bridge_to_zero_values(b, t, n, rng);
    std::reverse(vs.begin(), vs.end());
    if (mins_out) mins_out->clear();
    return vs;
  }
  auto [vs, mins] = bessel_bridge_reject(a, b, t, n, rng, max_rejections);
  if (mins_out) *mins_out = std::move(mins);
  return vs;
}

}  // namespace

double segment_min_draw(double u, double v, double h, CounterRng& rng) {
  return (u + v - dip_radius(u, v, h, rng)) / 2.0;
}

double segment_max_draw(double u, double v, double h, CounterRng& rng) {
  return (u + v + dip_radius(u, v, h, rng)) / 2.0;
}

double segment_min_draw_positive(double u, double v, double h,
                                 CounterRng& rng) {
  return (u + v - dip_radius_positive(u, v, h, rng)) / 2.0;
}

PLPath refine_with_extremes(const AugmentedPath& ap) {
  const bool has_min = !ap.seg_min.empty();
  const bool has_max = !ap.seg_max.empty();
  if (!has_min && !has_max) return ap.path;
  const std::vector<double>& ts = ap.path.knot_times();
  const std::vector<double>& vs = ap.path.knot_values();
  const std::size_t n = ts.size() - 1;
  std::vector<double> rts;
  std::vector<double> rvs;
  rts.reserve(3 * n + 1);
  rvs.reserve(3 * n + 1);
  for (std::size_t j = 0; j < n; ++j) {
    rts.push_back(ts[j]);
    rvs.push_back(vs[j]);
    const double w = ts[j + 1] - ts[j];
    if (has_min && has_max) {
      // Minimum at one third, maximum at two thirds: symmetric under time
      // reversal, so neither side of a swap identity is favored.
      rts.push_back(ts[j] + w / 3.0);
      rvs.push_back(ap.seg_min[j]);
      rts.push_back(ts[j] + 2.0 * w / 3.0);
      rvs.push_back(ap.seg_max[j]);
    } else {
      rts.push_back(ts[j] + w / 2.0);
      rvs.push_back(has_min ? ap.seg_min[j] : ap.seg_max[j]);
    }
  }
  rts.push_back(ts[n]);
  rvs.push_back(vs[n]);
  return make_path(std::move(rts), std::move(rvs));
}

PLPath sample_brownian_motion(double a, double t, std::size_t n, Seed seed) {
  check_common(t, n);
  CounterRng rng(seed);
  return make_path(uniform_times(t, n), brownian_values(a, t, n, rng));
}

PLPath sample_brownian_bridge(double a, double b, double t, std::size_t n,
                              Seed seed) {
  check_common(t, n);
  CounterRng rng(seed);
  return make_path(uniform_times(t, n), bridge_values(a, b, t, n, rng));
}

PLPath sample_bessel3_process(double a, double t, std::size_t n, Seed seed) {
  check_common(t, n);
  if (!(a >= 0.0)) throw InvalidParams("bessel3_process: start must be >= 0");
  CounterRng rng(seed);
  return make_path(uniform_times(t, n), bessel_values(a, t, n, rng));
}

PLPath sample_bessel3_bridge(double a, double b, double t, std::size_t n,
                             Seed seed, std::size_t max_rejections) {
  check_common(t, n);
  CounterRng rng(seed);
  return make_path(uniform_times(t, n), bessel_bridge_values(a, b, t, n, rng,
                                                             max_rejections,
                                                             nullptr));
}

AugmentedPath sample_augmented(const ProcessSpec& spec, CounterRng& rng) {
  check_common(spec.t, spec.steps);
  const std::size_t n = spec.steps;
  const double h = spec.t / static_cast<double>(n);
  if (spec.kind == "brownian_motion") {
    return augmented_from_values(uniform_times(spec.t, n),
                                 brownian_values(spec.a, spec.t, n, rng), h,
                                 rng);
  }
  if (spec.kind == "brownian_bridge") {
    return augmented_from_values(
        uniform_times(spec.t, n),
        bridge_values(spec.a, spec.b, spec.t, n, rng), h, rng);
  }
  if (spec.kind == "bessel3_process") {
    if (!(spec.a >= 0.0)) {
      throw InvalidParams("bessel3_process: start must be >= 0");
    }
    AugmentedPath out{make_path(uniform_times(spec.t, n),
                                bessel_values(spec.a, spec.t, n, rng)),
                      {},
                      {}};
    fill_mins(out, h, rng, true);
    fill_maxes(out, h, rng);
    return out;
  }
  if (spec.kind == "bessel3_bridge") {
    std::vector<double> mins;
    std::vector<double> vs =
        bessel_bridge_values(spec.a, spec.b, spec.t, n, rng, 1000000, &mins);
    AugmentedPath out{make_path(uniform_times(spec.t, n), std::move(vs)),
                      std::move(mins),
                      {}};
    // Rejection witnesses double as the conditioned minima; the modulus
    // routes (a or b zero) draw theirs from the truncated dip law.
    if (out.seg_min.empty()) fill_mins(out, h, rng, true);
    fill_maxes(out, h, rng);
    return out;
  }
  throw InvalidParams("sampler: unknown process kind '" + spec.kind + "'");
}

ConditionedSample sample_conditioned(
    const ProcessSpec& spec,
    const std::function<bool(const AugmentedPath&)>& accept, Seed seed,
    std::size_t max_rejections) {
  CounterRng rng(seed);
  for (std::size_t attempt = 1; attempt <= max_rejections; ++attempt) {
    AugmentedPath draw = sample_augmented(spec, rng);
    if (accept(draw)) return ConditionedSample{std::move(draw), attempt};
  }
  throw RejectionBudgetExceeded(
      "sample_conditioned: no accepted draw within the attempt budget");
}

PLPath brownian_motion_at(double a, std::span<const double> times,
                          CounterRng& rng) {
  if (times.size() < 2) {
    throw InvalidParams("brownian_motion_at: need at least two times");
  }
  if (times[0] != 0.0) {
    throw InvalidParams("brownian_motion_at: times must start at 0");
  }
  std::vector<double> ts(times.begin(), times.end());
  std::vector<double> vs(ts.size());
  vs[0] = a;
  for (std::size_t i = 1; i < ts.size(); ++i) {
    const double dt = ts[i] - ts[i - 1];
    if (!(dt > 0.0)) {
      throw InvalidParams("brownian_motion_at: times must strictly increase");
    }
    vs[i] = vs[i - 1] + std::sqrt(dt) * rng.normal();
  }
  return make_path(std::move(ts), std::move(vs));
}

}  // namespace pathlaw
