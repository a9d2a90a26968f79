#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "pathlaw/plpath.hpp"
#include "pathlaw/rng.hpp"

namespace pathlaw {

/// Which diffusion to draw and with what parameters.
///
/// kind is one of "brownian_motion", "brownian_bridge", "bessel3_process",
/// "bessel3_bridge".  `b` is ignored by the unconditioned processes.
struct ProcessSpec {
  std::string kind;
  double a = 0.0;
  double b = 0.0;
  double t = 1.0;
  std::size_t steps = 256;
};

/// A sampled grid skeleton together with draws of the continuum extreme of
/// the process over each grid segment, coupled to the skeleton.
///
/// `seg_min[j]` / `seg_max[j]` refer to the segment between knots j and
/// j+1.  Each extreme is marginally exact given the skeleton for the
/// Brownian kinds and exact up to the O(h) segment drift for the Bessel
/// kinds (whose minima additionally honor nonnegativity, with exact zeros
/// next to pinned-zero endpoints).  Minima and maxima are drawn
/// independently of one another, so only one of the two may be used per
/// event.
struct AugmentedPath {
  PLPath path;
  std::vector<double> seg_min;
  std::vector<double> seg_max;
};

/// Result of rejection sampling: the first accepted draw and how many
/// attempts it took (the accepted one included).
struct ConditionedSample {
  AugmentedPath sample;
  std::size_t attempts = 0;
};

/// Standard Brownian motion started at `a`, sampled on the uniform grid
/// i*t/n, i = 0..n.  The start value is exactly `a`.
PLPath sample_brownian_motion(double a, double t, std::size_t n, Seed seed);

/// Brownian bridge from `a` at time 0 to `b` at time `t` on the uniform
/// grid.  Both endpoints are exact.
PLPath sample_brownian_bridge(double a, double b, double t, std::size_t n,
                              Seed seed);

/// Three-dimensional Bessel process started at `a >= 0`: the modulus of a
/// 3-d Brownian motion started at (a, 0, 0).
PLPath sample_bessel3_process(double a, double t, std::size_t n, Seed seed);

/// Three-dimensional Bessel bridge from `a` to `b` (both >= 0) over [0, t].
/// Endpoints are exact and every value is nonnegative.  Strictly positive
/// endpoints use rejection against the continuum minimum of a Brownian
/// bridge; throws RejectionBudgetExceeded when `max_rejections` attempts
/// all fail.
PLPath sample_bessel3_bridge(double a, double b, double t, std::size_t n,
                             Seed seed, std::size_t max_rejections = 1000000);

/// Draw from `spec` until `accept` holds, consuming one deterministic
/// stream sequentially.  Throws RejectionBudgetExceeded after
/// `max_rejections` failed attempts.
ConditionedSample sample_conditioned(
    const ProcessSpec& spec,
    const std::function<bool(const AugmentedPath&)>& accept, Seed seed,
    std::size_t max_rejections = 1000000);

/// One draw from `spec` on a live stream, with segment extremes filled
/// where the construction supports them (see AugmentedPath).
AugmentedPath sample_augmented(const ProcessSpec& spec, CounterRng& rng);

/// Brownian motion started at `a` observed at the given strictly
/// increasing times; times[0] must be 0.  Used for laws that live on a
/// non-uniform grid.
PLPath brownian_motion_at(double a, std::span<const double> times,
                          CounterRng& rng);

/// Exact draw of the continuum minimum over one grid segment of a
/// unit-volatility diffusion, given its endpoint values `u`, `v` and the
/// segment width `h`: inverse-CDF of the Brownian-bridge dip law using one
/// uniform draw from `rng`.
double segment_min_draw(double u, double v, double h, CounterRng& rng);

/// Same for the continuum maximum over the segment.
double segment_max_draw(double u, double v, double h, CounterRng& rng);

/// Segment-minimum draw conditioned to stay positive (for nonnegative
/// diffusions with endpoints u, v >= 0): the bridge dip law truncated at
/// zero.  When u*v = 0 the draw is exactly min(u, v).
double segment_min_draw_positive(double u, double v, double h,
                                 CounterRng& rng);

/// The skeleton with each segment's drawn extremes inserted as interior
/// knots (minimum at one third of the segment, maximum at two thirds), so
/// that window extrema of the refined path realize the continuum extreme
/// draws.  Paths without stored extremes are returned unchanged.
PLPath refine_with_extremes(const AugmentedPath& ap);

}  // namespace pathlaw
