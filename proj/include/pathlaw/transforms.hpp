#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "pathlaw/plpath.hpp"

namespace pathlaw {

// --- path-to-path transforms -------------------------------------------
//
// All of these are exact on the PL representation: the output carries a
// knot wherever the result can bend, so identities between transformed
// paths hold at knots to float roundoff.

/// 2 * prefix_max(phi) - phi.
PLPath pitman_max(const PLPath& phi);

/// phi - 2 * prefix_min(phi); equals pitman_max(-phi).
PLPath pitman_min(const PLPath& phi);

/// Endpoint-retargeting transform: sends phi to a path ending at x, built
/// from pitman_max, its suffix minimum and a capped pointwise minimum.
PLPath m_x(const PLPath& phi, double x);

/// Reflected retargeting transform: -m_x(-phi, -x).
PLPath mbar_x(const PLPath& phi, double x);

/// Endpoint-swapping involution: n(phi)(0) = phi(t), n(phi)(t) = phi(0),
/// n(n(phi)) = phi, and n commutes with time reversal.
PLPath n_transform(const PLPath& phi);

/// pitman_min(phi) + phi(0).
PLPath q_transform(const PLPath& phi);

/// Tail-anchored variant of n_transform for paths whose far end sits near
/// their eventual infimum; the tail infimum over [s, inf) is truncated to
/// the minimum over [s, horizon].
PLPath s_transform(const PLPath& phi);

/// Time inversion onto [0,1]: knot (u, v) -> (u/(1+u), v/(1+u)), closed
/// with a final linear segment down to (1, 0).  Segmentwise affine in the
/// new time variable, so the output is exact PL.
PLPath iota(const PLPath& phi);

// --- pointwise cross-check routes --------------------------------------
//
// The same maps evaluated one time-point at a time from their defining
// window-extremum formulas.  Independent of the envelope algebra above;
// the pair of routes must agree at output knots.

double m_x_pointwise(const PLPath& phi, double x, double s);
double mbar_x_pointwise(const PLPath& phi, double x, double s);
double n_pointwise(const PLPath& phi, double s);

/// n_transform realized by composing mbar_x with endpoint shifts.
PLPath n_from_retarget(const PLPath& phi);

// --- exponential functionals -------------------------------------------

/// log sum_i exp(terms[i]), max-shifted.  Throws EmptyInput.
double log_sum_exp(std::span<const double> terms);

/// log integral_0^s exp(2 c phi(u)) du, accumulated per segment in log
/// space via an exact closed form.  Requires 0 < s <= horizon, c > 0.
double log_a_functional(const PLPath& phi, double c, double s);

/// Same integral over [lo, hi]; returns -inf when lo == hi.
double log_a_window(const PLPath& phi, double c, double lo, double hi);

/// log_a_functional(phi, c, s) - c * phi(s).
double log_z_functional(const PLPath& phi, double c, double s);

/// Softmax-scale retargeting: values of the c-smoothed analogue of m_x at
/// eval_times, computed entirely in log space.  Throws NumericalRange when
/// c * max(|phi|, |x|) > 700.
std::vector<double> t_cx(const PLPath& phi, double c, double x,
                         std::span<const double> eval_times);

/// log of the A-functional of the t_cx output, accumulated from exact
/// per-segment integrals over the knot set of densify(phi, min_segments);
/// entry k is the integral up to that knot (entry 0 is -inf).  A second
/// computation route for Z-invariance checks: the per-segment numerators
/// come from phi alone while the boundary factors use the computed t_cx
/// values, so the sum cross-checks the transform output.
std::vector<double> t_cx_log_a(const PLPath& phi, double c, double x,
                               std::size_t min_segments);

}  // namespace pathlaw
