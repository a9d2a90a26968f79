#include "pathlaw/transforms.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <vector>

#include "pathlaw/errors.hpp"

namespace pathlaw {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

PLPath lin2(const PLPath& a, double ca, const PLPath& b, double cb,
            double offset) {
  const std::array<PLPath, 2> parts{a, b};
  const std::array<double, 2> coeffs{ca, cb};
  return combine(parts, coeffs, offset);
}

PLPath lin3(const PLPath& a, double ca, const PLPath& b, double cb,
            const PLPath& c, double cc, double offset) {
  const std::array<PLPath, 3> parts{a, b, c};
  const std::array<double, 3> coeffs{ca, cb, cc};
  return combine(parts, coeffs, offset);
}

// log(e^a + e^b) with -inf treated as an absent term.
double lse2(double a, double b) {
  if (a == -kInf) return b;
  if (b == -kInf) return a;
  const double hi = std::max(a, b);
  const double lo = std::min(a, b);
  return hi + std::log1p(std::exp(lo - hi));
}

// log((e^z - 1) / z), continuous through z = 0.
double log_expm1_over_x(double z) {
  if (std::abs(z) < 1e-4) return z / 2.0 + z * z / 24.0;
  if (z > 0.0) {
    if (z > 700.0) return z + std::log1p(-std::exp(-z)) - std::log(z);
    return std::log(std::expm1(z)) - std::log(z);
  }
  return std::log(-std::expm1(z)) - std::log(-z);
}

// Endpoint values that satisfy an exact identity are set to it directly
// instead of inheriting the roundoff of the combine chain.
PLPath with_ends(const PLPath& p, double front, double back) {
  std::vector<double> ts(p.knot_times().begin(), p.knot_times().end());
  std::vector<double> vs(p.knot_values().begin(), p.knot_values().end());
  vs.front() = front;
  vs.back() = back;
  return PLPath(std::move(ts), std::move(vs));
}

}  // namespace

PLPath pitman_max(const PLPath& phi) {
  return lin2(envelope(phi, Envelope::prefix_max), 2.0, phi, -1.0, 0.0);
}

PLPath pitman_min(const PLPath& phi) {
  return lin2(phi, 1.0, envelope(phi, Envelope::prefix_min), -2.0, 0.0);
}

PLPath m_x(const PLPath& phi, double x) {
  if (!std::isfinite(x)) throw DomainError("m_x: target must be finite");
  const PLPath p = pitman_max(phi);
  const PLPath tail = envelope(p, Envelope::suffix_min);
  const PLPath cap = constant_path(p.value_back() + x, p.horizon());
  const PLPath floor_path =
      pointwise_min(scale_shift(tail, 2.0, 0.0), cap);
  const PLPath out = lin2(floor_path, 1.0, p, -1.0, 0.0);
  // Inside the reachable window [2*phi0 - P(t), P(t)] the ends are exactly
  // phi0 and x; outside it they saturate at the computed values.
  const double reach_hi = p.value_back();
  const double reach_lo = 2.0 * phi.value_front() - reach_hi;
  const double front =
      x >= reach_lo ? phi.value_front() : out.value_front();
  const double back = x <= reach_hi ? x : out.value_back();
  return with_ends(out, front, back);
}

PLPath mbar_x(const PLPath& phi, double x) {
  return negate(m_x(negate(phi), -x));
}

PLPath n_transform(const PLPath& phi) {
  const PLPath premin = envelope(phi, Envelope::prefix_min);
  const PLPath sufmin = envelope(phi, Envelope::suffix_min);
  const double swing = phi.value_back() - phi.value_front();
  const PLPath lifted = abs_path(lin2(premin, 1.0, sufmin, -1.0, swing));
  const PLPath centred = abs_path(lin2(premin, 1.0, sufmin, -1.0, 0.0));
  const PLPath out = lin3(phi, 1.0, lifted, 1.0, centred, -1.0, 0.0);
  // The transform swaps the endpoint values exactly.
  return with_ends(out, phi.value_back(), phi.value_front());
}

PLPath q_transform(const PLPath& phi) {
  return scale_shift(pitman_min(phi), 1.0, phi.value_front());
}

PLPath s_transform(const PLPath& phi) {
  const PLPath premin = envelope(phi, Envelope::prefix_min);
  const PLPath sufmin = envelope(phi, Envelope::suffix_min);
  const double f0 = phi.value_front();
  const PLPath lifted = abs_path(lin2(premin, 1.0, sufmin, -1.0, -f0));
  const PLPath centred = abs_path(lin2(premin, 1.0, sufmin, -1.0, 0.0));
  return lin3(phi, 1.0, lifted, 1.0, centred, -1.0, -f0);
}

PLPath iota(const PLPath& phi) {
  const auto& ts = phi.knot_times();
  const auto& vs = phi.knot_values();
  std::vector<double> ot;
  std::vector<double> ov;
  ot.reserve(ts.size() + 1);
  ov.reserve(ts.size() + 1);
  for (std::size_t i = 0; i < ts.size(); ++i) {
    const double d = 1.0 + ts[i];
    const double rt = ts[i] / d;
    // u/(1+u) is only weakly monotone in floating point: knots closer
    // than an ulp of their image collapse; keep the first.
    if (!ot.empty() && rt <= ot.back()) continue;
    ot.push_back(rt);
    ov.push_back(vs[i] / d);
  }
  if (ot.back() < 1.0) {
    ot.push_back(1.0);
    ov.push_back(0.0);
  } else {
    ot.back() = 1.0;
    ov.back() = 0.0;
  }
  return PLPath(std::move(ot), std::move(ov));
}

double m_x_pointwise(const PLPath& phi, double x, double s) {
  const double half = (phi.value_back() - x) / 2.0;
  const double pre = max_over(phi, 0.0, s);
  const double suf = max_over(phi, s, phi.horizon());
  return phi.value_at(s) - half - std::abs(half + pre - suf) +
         std::abs(pre - suf);
}

double mbar_x_pointwise(const PLPath& phi, double x, double s) {
  const double half = (phi.value_back() - x) / 2.0;
  const double pre = min_over(phi, 0.0, s);
  const double suf = min_over(phi, s, phi.horizon());
  return phi.value_at(s) - half + std::abs(half + pre - suf) -
         std::abs(pre - suf);
}

double n_pointwise(const PLPath& phi, double s) {
  const double swing = phi.value_back() - phi.value_front();
  const double pre = min_over(phi, 0.0, s);
  const double suf = min_over(phi, s, phi.horizon());
  return phi.value_at(s) + std::abs(swing + pre - suf) -
         std::abs(pre - suf);
}

PLPath n_from_retarget(const PLPath& phi) {
  const double f0 = phi.value_front();
  const double ft = phi.value_back();
  const PLPath centred = scale_shift(phi, 1.0, -f0);
  return scale_shift(mbar_x(centred, f0 - ft), 1.0, ft);
}

double log_sum_exp(std::span<const double> terms) {
  if (terms.empty()) throw EmptyInput("log_sum_exp: no terms");
  double hi = -kInf;
  for (double t : terms) hi = std::max(hi, t);
  if (hi == -kInf) return -kInf;
  double acc = 0.0;
  for (double t : terms) acc += std::exp(t - hi);
  return hi + std::log(acc);
}

double log_a_window(const PLPath& phi, double c, double lo, double hi) {
  if (!(c > 0.0) || !std::isfinite(c)) {
    throw DomainError("log_a_window: scale must be positive and finite");
  }
  if (!(lo >= 0.0) || !(hi <= phi.horizon()) || !(lo <= hi)) {
    throw OutOfDomain("log_a_window: window outside the path domain");
  }
  if (lo == hi) return -kInf;
  const auto& ts = phi.knot_times();
  const auto& vs = phi.knot_values();
  std::vector<double> terms;
  terms.reserve(ts.size());
  for (std::size_t i = 0; i + 1 < ts.size(); ++i) {
    const double t0 = ts[i];
    const double t1 = ts[i + 1];
    const double a = std::max(t0, lo);
    const double b = std::min(t1, hi);
    if (b <= a) continue;
    const double v0 = vs[i];
    const double v1 = vs[i + 1];
    const auto at = [&](double u) {
      if (u == t0) return v0;
      if (u == t1) return v1;
      return v0 + (v1 - v0) * ((u - t0) / (t1 - t0));
    };
    const double va = at(a);
    const double vb = at(b);
    terms.push_back(2.0 * c * va + std::log(b - a) +
                    log_expm1_over_x(2.0 * c * (vb - va)));
  }
  return log_sum_exp(terms);
}

double log_a_functional(const PLPath& phi, double c, double s) {
  if (!(s > 0.0)) {
    throw OutOfDomain("log_a_functional: time must be positive");
  }
  return log_a_window(phi, c, 0.0, s);
}

double log_z_functional(const PLPath& phi, double c, double s) {
  return log_a_functional(phi, c, s) - c * phi.value_at(s);
}

std::vector<double> t_cx(const PLPath& phi, double c, double x,
                         std::span<const double> eval_times) {
  if (!(c > 0.0) || !std::isfinite(c)) {
    throw DomainError("t_cx: scale must be positive and finite");
  }
  if (!std::isfinite(x)) throw DomainError("t_cx: target must be finite");
  // Everything below runs in log space with max-shifted exponentials, so
  // the absolute error of the output stays near |phi| * eps independent of
  // c; the guard only fences scales far beyond that regime, where the
  // log-domain terms themselves start losing integer resolution.
  double amp = std::abs(x);
  for (double v : phi.knot_values()) amp = std::max(amp, std::abs(v));
  if (c * amp > 1e8) {
    throw NumericalRange("t_cx: c * max(|phi|, |x|) too large for stable output");
  }
  const double t = phi.horizon();
  const double cw = c * (phi.value_back() - x);
  const double log_at = log_a_window(phi, c, 0.0, t);
  std::vector<double> out;
  out.reserve(eval_times.size());
  for (double s : eval_times) {
    if (!(s >= 0.0) || !(s <= t)) {
      throw OutOfDomain("t_cx: eval time outside the path domain");
    }
    // Closed forms at the ends: the braced factor is 1 at s = 0 and
    // e^{c (phi(t) - x)} at s = t.
    if (s == 0.0) {
      out.push_back(phi.value_front());
      continue;
    }
    if (s == t) {
      out.push_back(x);
      continue;
    }
    // A_s(c T)(u)-free rewrite of the braced factor as a sum of two
    // positive terms, so both signs of phi(t) - x stay cancellation-free.
    const double log_tail = log_a_window(phi, c, s, t);
    const double log_head = log_a_window(phi, c, 0.0, s);
    const double log_braced =
        lse2(log_tail - log_at, cw + log_head - log_at);
    out.push_back(phi.value_at(s) - log_braced / c);
  }
  return out;
}

std::vector<double> t_cx_log_a(const PLPath& phi, double c, double x,
                               std::size_t min_segments) {
  const PLPath dens = densify(phi, min_segments);
  const auto& ts = dens.knot_times();
  const auto& vs = dens.knot_values();
  const std::vector<double> tv = t_cx(phi, c, x, ts);
  // Per segment, integral of e^{2 c T} du has the closed form
  // (A(b) - A(a)) / (g(a) g(b)) with g = e^{c (phi - T)}; the numerator
  // uses the exact segment integral of phi, the g factors the computed
  // transform values, so the accumulation cross-checks t_cx itself.
  std::vector<double> out(ts.size(), -kInf);
  double run = -kInf;
  for (std::size_t i = 0; i + 1 < ts.size(); ++i) {
    const double seg = 2.0 * c * vs[i] + std::log(ts[i + 1] - ts[i]) +
                       log_expm1_over_x(2.0 * c * (vs[i + 1] - vs[i]));
    const double ga = c * (vs[i] - tv[i]);
    const double gb = c * (vs[i + 1] - tv[i + 1]);
    run = lse2(run, seg - ga - gb);
    out[i + 1] = run;
  }
  return out;
}

}  // namespace pathlaw
