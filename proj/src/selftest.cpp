#include "pathlaw/selftest.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <set>
#include <string>

#include "pathlaw/plpath.hpp"
#include "pathlaw/transforms.hpp"

namespace pathlaw {
namespace {

// Suite-internal collector: fold the worst deviation per named check.
class Devs {
 public:
  void see(const std::string& name, double dev) {
    auto it = worst_.find(name);
    if (it == worst_.end()) {
      worst_.emplace(name, dev);
    } else if (dev > it->second) {
      it->second = dev;
    }
  }
  [[nodiscard]] double get(const std::string& name) const {
    auto it = worst_.find(name);
    return it == worst_.end() ? 0.0 : it->second;
  }

 private:
  std::map<std::string, double> worst_;
};

PLPath random_path(std::mt19937_64& g) {
  std::uniform_int_distribution<int> kcount(2, 64);
  std::uniform_real_distribution<double> interior(1e-6, 1.0 - 1e-6);
  std::uniform_real_distribution<double> val(-5.0, 5.0);
  const int k = kcount(g);
  std::set<double> interior_times;
  while (static_cast<int>(interior_times.size()) < k - 2) {
    interior_times.insert(interior(g));
  }
  std::vector<double> ts;
  ts.push_back(0.0);
  ts.insert(ts.end(), interior_times.begin(), interior_times.end());
  ts.push_back(1.0);
  std::vector<double> vs(ts.size());
  for (double& v : vs) v = val(g);
  return make_path(std::move(ts), std::move(vs));
}

std::vector<double> query_times(const PLPath& p, std::size_t grid) {
  std::set<double> qs(p.knot_times().begin(), p.knot_times().end());
  const double t = p.horizon();
  for (std::size_t i = 0; i <= grid; ++i) {
    qs.insert(t * static_cast<double>(i) / static_cast<double>(grid));
  }
  return {qs.begin(), qs.end()};
}

double sup_diff(const PLPath& a, const PLPath& b,
                const std::vector<double>& qs) {
  double worst = 0.0;
  for (double s : qs) {
    worst = std::max(worst, std::abs(a.value_at(s) - b.value_at(s)));
  }
  return worst;
}

double raw_retarget(const PLPath& p, double x, double s) {
  const double t = p.horizon();
  const double half = (p.value_back() - x) / 2.0;
  const double pre = max_over(p, 0.0, s);
  const double suf = max_over(p, s, t);
  return p.value_at(s) - half - std::abs(half + pre - suf) +
         std::abs(pre - suf);
}

PLPath nonneg_rooted(const PLPath& p) {
  return abs_path(scale_shift(p, 1.0, -p.value_front()));
}

// Exact minimum of u -> phi(u)/(1+u) over [0, s], recomputed from raw knot
// arrays.  On each linear piece the ratio is monotone, so scanning knots
// (plus the query point itself) is exact.
double ratio_prefix_min(const PLPath& p, double s) {
  const auto& ts = p.knot_times();
  const auto& vs = p.knot_values();
  double best = vs[0];
  for (std::size_t i = 0; i < ts.size() && ts[i] <= s; ++i) {
    best = std::min(best, vs[i] / (1.0 + ts[i]));
  }
  best = std::min(best, p.value_at(s) / (1.0 + s));
  return best;
}

void check_one_path(const PLPath& p, Devs& devs) {
  const double t = p.horizon();
  const double f0 = p.value_front();
  const double ft = p.value_back();
  const std::vector<double> qs = query_times(p, 128);
  const PLPath pit = pitman_max(p);

  // Two-sided closed form for the suffix minimum of the transformed path.
  for (double s : qs) {
    const double pre = max_over(p, 0.0, s);
    const double suf = max_over(p, s, t);
    const double rhs = pre + std::max(pre - suf, 0.0);
    devs.see("minp", std::abs(min_over(pit, s, t) - rhs));
  }

  // Retargeting against its raw window formula, and the endpoint identity.
  const double xs[] = {-3.0, -1.0, 0.0, 1.0, 3.0, ft};
  for (double x : xs) {
    const PLPath mx = m_x(p, x);
    std::vector<double> mq = query_times(mx, 128);
    double worst = 0.0;
    for (double s : mq) {
      worst = std::max(worst, std::abs(mx.value_at(s) - raw_retarget(p, x, s)));
    }
    devs.see("mxp", worst);
  }
  devs.see("iden", sup_diff(m_x(p, ft), p, qs));

  // Reconstruction of the path from its transform alone.
  for (double s : qs) {
    const double cap = pit.value_back() + ft;
    const double rhs =
        -pit.value_at(s) + std::min(2.0 * min_over(pit, s, t), cap);
    devs.see("idenp", std::abs(p.value_at(s) - rhs));
  }

  // Boundary pinning and absorption within the reachable target window.
  const double reach = pit.value_back() - f0;
  const double fracs[] = {-1.0, -0.4, 0.0, 0.5, 1.0};
  const double ys[] = {-2.0, 0.0, 2.0, ft};
  for (double frac : fracs) {
    const double x = f0 + frac * reach;
    const PLPath mx = m_x(p, x);
    devs.see("mxbv", std::abs(mx.value_front() - f0));
    devs.see("mxbv", std::abs(mx.value_back() - x));
    devs.see("mxpl", sup_diff(pitman_max(mx), pit, qs));
    for (double y : ys) {
      devs.see("mxpl", sup_diff(m_x(mx, y), m_x(p, y), qs));
    }
  }

  // Endpoint-swap involution and its interplay with the rebased minimum
  // transform and time reversal.
  const PLPath n = n_transform(p);
  devs.see("pnq", std::abs(n.value_front() - ft));
  devs.see("pnq", std::abs(n.value_back() - f0));
  devs.see("pnq", sup_diff(n_transform(n), p, qs));
  devs.see("pnq", sup_diff(q_transform(n), q_transform(p), qs));
  devs.see("pnq", sup_diff(reverse(n), n_transform(reverse(p)), qs));

  // Pinned nonnegative paths collapse the swap to window closed forms.
  const PLPath lo = nonneg_rooted(p);  // lo(0) = 0, lo >= 0
  const PLPath hi = reverse(lo);       // hi(t) = 0, hi >= 0
  const PLPath nlo = n_transform(lo);
  devs.see("fnq", sup_diff(reverse(nlo), q_transform(hi), qs));
  devs.see("fnq", sup_diff(q_transform(lo), lo, qs));
  for (double s : qs) {
    const double rhs = lo.value_at(s) + lo.value_back() - 2.0 * min_over(lo, s, t);
    devs.see("fnq", std::abs(nlo.value_at(s) - rhs));
    const double rhs2 =
        hi.value_at(s) + hi.value_front() - 2.0 * min_over(hi, 0.0, s);
    devs.see("fnq", std::abs(n_transform(hi).value_at(s) - rhs2));
    devs.see("fnq", std::abs(q_transform(hi).value_at(s) - rhs2));
    // Reversed swap of a rooted nonnegative path dominates the recentred
    // reversal in absolute value.
    const double bound = std::abs(lo.value_at(t - s) - lo.value_back());
    devs.see("nonneg", std::max(0.0, bound - reverse(nlo).value_at(s)));
  }

  // Time-inversion algebra at mapped knots.
  const PLPath io = iota(p);
  const PLPath qio = q_transform(io);
  const PLPath rio = reverse(io);
  const PLPath rqio = reverse(qio);
  const auto& kts = p.knot_times();
  const auto& kvs = p.knot_values();
  for (std::size_t i = 0; i < kts.size(); ++i) {
    const double u = kts[i];
    const double tau = u / (1.0 + u);
    const double ratio = kvs[i] / (1.0 + u);
    devs.see("linv", std::abs(io.value_at(tau) - ratio));
    const double qrhs = ratio - 2.0 * ratio_prefix_min(p, u) + f0;
    devs.see("linv", std::abs(qio.value_at(tau) - qrhs));
    if (u > 0.0) {
      // Reversal identities, evaluated with s = 1/u; 1 - tau keeps the
      // lookup on the reflected knot.
      const double sig = 1.0 - tau;
      devs.see("linv", std::abs(rio.value_at(sig) - sig * kvs[i]));
      devs.see("linv", std::abs(rqio.value_at(sig) - qrhs));
    }
  }
}

}  // namespace

std::vector<CheckResult> run_identity_suite(std::uint64_t seed,
                                            std::size_t n_paths) {
  std::mt19937_64 g(seed);
  Devs devs;
  for (std::size_t i = 0; i < n_paths; ++i) {
    check_one_path(random_path(g), devs);
  }
  const char* names[] = {"minp", "mxp", "iden", "idenp", "mxbv",
                         "mxpl", "pnq", "fnq",  "linv",  "nonneg"};
  std::vector<CheckResult> out;
  for (const char* name : names) {
    CheckResult r;
    r.name = name;
    r.max_dev = devs.get(name);
    r.tol = std::string(name) == "linv" ? 1e-6 : 1e-9;
    r.pass = r.max_dev <= r.tol;
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<CheckResult> run_smoothing_suite(std::uint64_t seed) {
  std::mt19937_64 g(seed);
  Devs devs;

  // Exponential-functional invariance: the log-integral of the smoothed
  // retargeted path, reassembled segment by segment, matches the
  // log-integral of the input shifted by the retargeting scale.
  {
    std::uniform_real_distribution<double> xd(-1.5, 1.5);
    for (int rep = 0; rep < 100; ++rep) {
      const PLPath p = random_path(g);
      const double x = xd(g);
      for (double c : {1.0, 4.0, 16.0}) {
        const PLPath dens = densify(p, 512);
        const std::vector<double>& ts = dens.knot_times();
        const std::vector<double> tv = t_cx(p, c, x, ts);
        const std::vector<double> la = t_cx_log_a(p, c, x, 512);
        double worst = 0.0;
        for (std::size_t k = 1; k < ts.size(); ++k) {
          const double want = log_z_functional(p, c, ts[k]) + c * tv[k];
          const double rel =
              std::abs(la[k] - want) / std::max(1.0, std::abs(want));
          worst = std::max(worst, rel);
        }
        devs.see("zinv", worst);
      }
    }
  }

  // Stiff-scale limit: the smoothed retargeting map approaches the exact
  // one uniformly, monotonically along the scale ladder.  The target must
  // sit inside the reachable window (the transform pins its start level
  // only there); lattice knot times keep the smoothing layer thin.
  {
    std::uniform_int_distribution<int> kcount(2, 24);
    std::uniform_int_distribution<int> lattice(1, 63);
    std::uniform_real_distribution<double> val(-2.0, 2.0);
    std::uniform_real_distribution<double> fd(-1.0, 1.0);
    double agg[4] = {0.0, 0.0, 0.0, 0.0};
    for (int rep = 0; rep < 50; ++rep) {
      const int k = kcount(g);
      std::set<double> its;
      while (static_cast<int>(its.size()) < k - 2) {
        its.insert(static_cast<double>(lattice(g)) / 64.0);
      }
      std::vector<double> ts;
      ts.push_back(0.0);
      ts.insert(ts.end(), its.begin(), its.end());
      ts.push_back(1.0);
      std::vector<double> vs(ts.size());
      for (double& v : vs) v = val(g);
      const PLPath p = make_path(std::move(ts), std::move(vs));
      const double reach =
          pitman_max(p).value_back() - p.value_front();
      const double x = p.value_front() + fd(g) * reach;
      const PLPath exact = m_x(p, x);
      std::vector<double> grid(512);
      for (std::size_t i = 0; i < grid.size(); ++i) {
        grid[i] = static_cast<double>(i) / 511.0;
      }
      int ci = 0;
      for (double c : {4.0, 16.0, 64.0, 256.0}) {
        const std::vector<double> tv = t_cx(p, c, x, grid);
        double sup = 0.0;
        for (std::size_t i = 0; i < grid.size(); ++i) {
          sup = std::max(sup, std::abs(tv[i] - exact.value_at(grid[i])));
        }
        agg[ci] = std::max(agg[ci], sup);
        ++ci;
      }
    }
    // Worst-over-corpus distance must shrink along the ladder and land
    // under the stiff-scale budget at its top.
    for (int j = 1; j < 4; ++j) {
      devs.see("tcx_monotone", std::max(0.0, agg[j] - agg[j - 1]));
    }
    devs.see("tcx_limit", agg[3]);
  }

  std::vector<CheckResult> out;
  CheckResult z{"zinv", devs.get("zinv"), 1e-8, false};
  z.pass = z.max_dev <= z.tol;
  out.push_back(z);
  CheckResult lim{"tcx_limit", devs.get("tcx_limit"), 0.05, false};
  lim.pass = lim.max_dev <= lim.tol;
  out.push_back(lim);
  CheckResult mono{"tcx_monotone", devs.get("tcx_monotone"), 1e-3, false};
  mono.pass = mono.max_dev <= mono.tol;
  out.push_back(mono);
  return out;
}

}  // namespace pathlaw
