#include "pathlaw/plpath.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <utility>

#include "pathlaw/errors.hpp"

namespace pathlaw {
namespace {

// Collinearity tolerance for knot pruning, in value.  Genuinely collinear
// knots (flat runs, exact cancellations) deviate from the chord by machine
// ulps only, so this can sit an order below the 1e-12 pointwise-agreement
// contract; chained drops then stay invisible at every caller tolerance.
constexpr double kPruneTol = 1e-13;

// Drops interior knots lying within kPruneTol of the chord through their
// neighbours.  Endpoints always survive.
void prune_collinear(std::vector<double>& ts, std::vector<double>& vs) {
  const std::size_t n = ts.size();
  if (n <= 2) return;
  std::vector<double> ot, ov;
  ot.reserve(n);
  ov.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    while (ot.size() >= 2) {
      const double ta = ot[ot.size() - 2];
      const double va = ov[ot.size() - 2];
      const double tm = ot.back();
      const double vm = ov.back();
      const double chord = va + (vs[k] - va) * ((tm - ta) / (ts[k] - ta));
      if (std::abs(vm - chord) <= kPruneTol) {
        ot.pop_back();
        ov.pop_back();
      } else {
        break;
      }
    }
    ot.push_back(ts[k]);
    ov.push_back(vs[k]);
  }
  ts = std::move(ot);
  vs = std::move(ov);
}

// Values of the path at an ascending list of query times inside its domain.
// Exact (stored) values whenever a query hits a knot.
std::vector<double> values_on(const PLPath& p, const std::vector<double>& qs) {
  const auto& ts = p.knot_times();
  const auto& vs = p.knot_values();
  std::vector<double> out(qs.size());
  std::size_t i = 0;
  for (std::size_t k = 0; k < qs.size(); ++k) {
    const double s = qs[k];
    while (i + 2 < ts.size() && ts[i + 1] <= s) ++i;
    if (s == ts[i]) {
      out[k] = vs[i];
    } else if (s == ts[i + 1]) {
      out[k] = vs[i + 1];
    } else {
      const double w = (s - ts[i]) / (ts[i + 1] - ts[i]);
      out[k] = vs[i] + (vs[i + 1] - vs[i]) * w;
    }
  }
  return out;
}

PLPath prefix_max_impl(const PLPath& p) {
  const auto& ts = p.knot_times();
  const auto& vs = p.knot_values();
  std::vector<double> ot{ts[0]};
  std::vector<double> ov{vs[0]};
  double run = vs[0];
  for (std::size_t i = 0; i + 1 < ts.size(); ++i) {
    const double t0 = ts[i];
    const double t1 = ts[i + 1];
    const double v0 = vs[i];
    const double v1 = vs[i + 1];
    if (v1 <= run) {
      ot.push_back(t1);
      ov.push_back(run);
    } else if (v0 >= run) {
      // current knot sits at the running maximum: follow the segment
      ot.push_back(t1);
      ov.push_back(v1);
      run = v1;
    } else {
      // segment climbs through the running level inside (t0, t1)
      const double cross = t0 + (run - v0) * (t1 - t0) / (v1 - v0);
      if (cross > t0 && cross < t1) {
        ot.push_back(cross);
        ov.push_back(run);
      }
      ot.push_back(t1);
      ov.push_back(v1);
      run = v1;
    }
  }
  prune_collinear(ot, ov);
  return PLPath(std::move(ot), std::move(ov));
}

}  // namespace

PLPath::PLPath(std::vector<double> knot_times, std::vector<double> knot_values)
    : times_(std::move(knot_times)), values_(std::move(knot_values)) {
  if (times_.size() != values_.size()) {
    throw LengthMismatch("knot time and value arrays differ in length");
  }
  if (times_.size() < 2) {
    throw EmptyPath("a path needs at least two knots");
  }
  if (!(times_.front() == 0.0)) {
    throw NonMonotoneTimes("knot times must start at 0");
  }
  for (std::size_t i = 0; i + 1 < times_.size(); ++i) {
    if (!(times_[i] < times_[i + 1])) {
      throw NonMonotoneTimes("knot times must be strictly increasing");
    }
  }
  for (double t : times_) {
    if (!std::isfinite(t)) throw NonMonotoneTimes("knot times must be finite");
  }
  for (double v : values_) {
    if (!std::isfinite(v)) throw DomainError("knot values must be finite");
  }
}

double PLPath::value_at(double s) const {
  if (!(s >= 0.0) || s > horizon()) {
    throw OutOfDomain("evaluation time outside [0, horizon]");
  }
  const auto it = std::lower_bound(times_.begin(), times_.end(), s);
  if (it != times_.end() && *it == s) {
    return values_[static_cast<std::size_t>(it - times_.begin())];
  }
  const std::size_t i = static_cast<std::size_t>(it - times_.begin());
  const double t0 = times_[i - 1];
  const double t1 = times_[i];
  const double w = (s - t0) / (t1 - t0);
  return values_[i - 1] + (values_[i] - values_[i - 1]) * w;
}

PLPath make_path(std::vector<double> times, std::vector<double> values) {
  return PLPath(std::move(times), std::move(values));
}

PLPath constant_path(double value, double horizon) {
  if (!(horizon > 0.0)) throw DomainError("horizon must be positive");
  return PLPath({0.0, horizon}, {value, value});
}

PLPath reverse(const PLPath& path) {
  const auto& ts = path.knot_times();
  const auto& vs = path.knot_values();
  const double T = path.horizon();
  const std::size_t n = ts.size();
  std::vector<double> ot, ov;
  ot.reserve(n);
  ov.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t j = n - 1 - k;
    const double rt = T - ts[j];
    // T - t is only weakly monotone in floating point: knots closer than
    // an ulp of their reflected position collapse; keep the first.
    if (!ot.empty() && rt <= ot.back()) continue;
    ot.push_back(rt);
    ov.push_back(vs[j]);
  }
  return PLPath(std::move(ot), std::move(ov));
}

PLPath envelope(const PLPath& path, Envelope kind) {
  switch (kind) {
    case Envelope::prefix_max:
      return prefix_max_impl(path);
    case Envelope::prefix_min:
      return negate(prefix_max_impl(negate(path)));
    case Envelope::suffix_max:
      return reverse(prefix_max_impl(reverse(path)));
    case Envelope::suffix_min:
      return reverse(negate(prefix_max_impl(negate(reverse(path)))));
  }
  throw DomainError("unknown envelope kind");
}

PLPath combine(std::span<const PLPath> paths, std::span<const double> coeffs,
               double constant) {
  if (paths.empty()) throw EmptyInput("combine needs at least one path");
  if (paths.size() != coeffs.size()) {
    throw LengthMismatch("one coefficient per path required");
  }
  const double T = paths[0].horizon();
  for (const auto& p : paths) {
    if (p.horizon() != T) throw HorizonMismatch("paths must share a horizon");
  }
  std::vector<double> ut;
  for (const auto& p : paths) {
    ut.insert(ut.end(), p.knot_times().begin(), p.knot_times().end());
  }
  std::sort(ut.begin(), ut.end());
  ut.erase(std::unique(ut.begin(), ut.end()), ut.end());

  std::vector<double> uv(ut.size(), constant);
  for (std::size_t pi = 0; pi < paths.size(); ++pi) {
    const auto pv = values_on(paths[pi], ut);
    for (std::size_t k = 0; k < ut.size(); ++k) uv[k] += coeffs[pi] * pv[k];
  }
  prune_collinear(ut, uv);
  return PLPath(std::move(ut), std::move(uv));
}

PLPath scale_shift(const PLPath& path, double coeff, double constant) {
  std::vector<double> vs = path.knot_values();
  for (double& v : vs) v = coeff * v + constant;
  return PLPath(path.knot_times(), std::move(vs));
}

PLPath negate(const PLPath& path) { return scale_shift(path, -1.0, 0.0); }

PLPath abs_path(const PLPath& path) {
  const auto& ts = path.knot_times();
  const auto& vs = path.knot_values();
  std::vector<double> ot{ts[0]};
  std::vector<double> ov{std::abs(vs[0])};
  for (std::size_t i = 0; i + 1 < ts.size(); ++i) {
    const double v0 = vs[i];
    const double v1 = vs[i + 1];
    if (v0 != 0.0 && v1 != 0.0 && ((v0 < 0.0) != (v1 < 0.0))) {
      const double t0 = ts[i];
      const double t1 = ts[i + 1];
      // extended precision: crossing error times segment slope must stay
      // below the 1e-12 pointwise-agreement contract even on steep segments
      const long double lt = static_cast<long double>(t0) +
                             static_cast<long double>(v0) *
                                 (static_cast<long double>(t1) - t0) /
                                 (static_cast<long double>(v0) - v1);
      const double cross = static_cast<double>(lt);
      if (cross > t0 && cross < t1) {
        ot.push_back(cross);
        ov.push_back(0.0);
      }
    }
    ot.push_back(ts[i + 1]);
    ov.push_back(std::abs(v1));
  }
  prune_collinear(ot, ov);
  return PLPath(std::move(ot), std::move(ov));
}

PLPath pointwise_min(const PLPath& a, const PLPath& b) {
  if (a.horizon() != b.horizon()) {
    throw HorizonMismatch("paths must share a horizon");
  }
  std::vector<double> ut;
  ut.reserve(a.knot_count() + b.knot_count());
  ut.insert(ut.end(), a.knot_times().begin(), a.knot_times().end());
  ut.insert(ut.end(), b.knot_times().begin(), b.knot_times().end());
  std::sort(ut.begin(), ut.end());
  ut.erase(std::unique(ut.begin(), ut.end()), ut.end());

  const auto va = values_on(a, ut);
  const auto vb = values_on(b, ut);
  std::vector<double> ot{ut[0]};
  std::vector<double> ov{std::min(va[0], vb[0])};
  for (std::size_t k = 0; k + 1 < ut.size(); ++k) {
    const double d0 = va[k] - vb[k];
    const double d1 = va[k + 1] - vb[k + 1];
    if (d0 != 0.0 && d1 != 0.0 && ((d0 < 0.0) != (d1 < 0.0))) {
      const long double w =
          static_cast<long double>(d0) / (static_cast<long double>(d0) - d1);
      const double cross = static_cast<double>(
          static_cast<long double>(ut[k]) +
          w * (static_cast<long double>(ut[k + 1]) - ut[k]));
      if (cross > ut[k] && cross < ut[k + 1]) {
        ot.push_back(cross);
        ov.push_back(static_cast<double>(
            static_cast<long double>(va[k]) +
            (static_cast<long double>(va[k + 1]) - va[k]) * w));
      }
    }
    ot.push_back(ut[k + 1]);
    ov.push_back(std::min(va[k + 1], vb[k + 1]));
  }
  prune_collinear(ot, ov);
  return PLPath(std::move(ot), std::move(ov));
}

double max_over(const PLPath& path, double lo, double hi) {
  if (!(lo >= 0.0) || !(hi <= path.horizon()) || !(lo <= hi)) {
    throw OutOfDomain("window outside [0, horizon]");
  }
  double m = std::max(path.value_at(lo), path.value_at(hi));
  const auto& ts = path.knot_times();
  const auto& vs = path.knot_values();
  const auto b = std::upper_bound(ts.begin(), ts.end(), lo);
  for (auto it = b; it != ts.end() && *it < hi; ++it) {
    m = std::max(m, vs[static_cast<std::size_t>(it - ts.begin())]);
  }
  return m;
}

double min_over(const PLPath& path, double lo, double hi) {
  return -max_over(negate(path), lo, hi);
}

double integral_over(const PLPath& path, double lo, double hi) {
  if (!(lo >= 0.0) || !(hi <= path.horizon()) || !(lo <= hi)) {
    throw OutOfDomain("window outside [0, horizon]");
  }
  if (lo == hi) return 0.0;
  const auto& ts = path.knot_times();
  const auto& vs = path.knot_values();
  double acc = 0.0;
  double pt = lo;
  double pv = path.value_at(lo);
  const auto b = std::upper_bound(ts.begin(), ts.end(), lo);
  for (auto it = b; it != ts.end() && *it < hi; ++it) {
    const std::size_t i = static_cast<std::size_t>(it - ts.begin());
    acc += (ts[i] - pt) * (vs[i] + pv) * 0.5;
    pt = ts[i];
    pv = vs[i];
  }
  acc += (hi - pt) * (path.value_at(hi) + pv) * 0.5;
  return acc;
}

PLPath densify(const PLPath& path, std::size_t min_segments) {
  const std::size_t nseg = path.knot_count() - 1;
  if (nseg >= min_segments) return path;
  const std::size_t per = (min_segments + nseg - 1) / nseg;
  const auto& ts = path.knot_times();
  const auto& vs = path.knot_values();
  std::vector<double> ot, ov;
  ot.reserve(nseg * per + 1);
  ov.reserve(nseg * per + 1);
  for (std::size_t i = 0; i + 1 < ts.size(); ++i) {
    for (std::size_t j = 0; j < per; ++j) {
      const double w = static_cast<double>(j) / static_cast<double>(per);
      ot.push_back(ts[i] + w * (ts[i + 1] - ts[i]));
      ov.push_back(vs[i] + w * (vs[i + 1] - vs[i]));
    }
  }
  ot.push_back(ts.back());
  ov.push_back(vs.back());
  return PLPath(std::move(ot), std::move(ov));
}

void write_csv(const PLPath& path, std::ostream& out) {
  out << "s,value\n";
  char buf[80];
  const auto& ts = path.knot_times();
  const auto& vs = path.knot_values();
  for (std::size_t i = 0; i < ts.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g\n", ts[i], vs[i]);
    out << buf;
  }
}

}  // namespace pathlaw
