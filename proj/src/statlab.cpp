#include "pathlaw/statlab.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <utility>
#include <vector>

#include "pathlaw/errors.hpp"

namespace pathlaw {
namespace {

// Largest per-side cloud fed to the O(n^2) distance matrix; beyond this
// rows are thinned with a deterministic even stride.
constexpr std::size_t kMaxEnergyRows = 2000;

std::vector<std::size_t> strided_subset(std::size_t rows, std::size_t want) {
  std::vector<std::size_t> idx;
  if (rows <= want) {
    idx.resize(rows);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    return idx;
  }
  idx.reserve(want);
  for (std::size_t i = 0; i < want; ++i) idx.push_back((i * rows) / want);
  return idx;
}

void validate_matrix(const SampleMatrix& m, const char* which) {
  if (m.rows < 2 || m.cols == 0 || m.data.size() != m.rows * m.cols) {
    throw ShapeMismatch(std::string("energy_perm_test: malformed matrix ") +
                        which);
  }
  for (double v : m.data) {
    if (!std::isfinite(v)) {
      throw ShapeMismatch(std::string("energy_perm_test: non-finite entry in ") +
                          which);
    }
  }
}

}  // namespace

double kolmogorov_tail(double lambda) {
  if (!(lambda > 0.0)) return 1.0;
  if (lambda < 1.18) {
    // Jacobi-transformed series, accurate for small lambda where the
    // alternating series converges slowly.
    const double y = std::exp(-3.141592653589793 * 3.141592653589793 /
                              (8.0 * lambda * lambda));
    const double cdf = std::sqrt(2.0 * 3.141592653589793) / lambda *
                       (y + std::pow(y, 9.0) + std::pow(y, 25.0));
    return std::min(1.0, std::max(0.0, 1.0 - cdf));
  }
  double sum = 0.0;
  double sign = 1.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += sign * term;
    if (term < 1e-16) break;
    sign = -sign;
  }
  return std::min(1.0, std::max(0.0, 2.0 * sum));
}

TestVerdict ks_two_sample(std::span<const double> xs,
                          std::span<const double> ys, double max_statistic,
                          std::string name) {
  if (xs.size() < 2 || ys.size() < 2) {
    throw TooFewSamples("ks_two_sample: need at least two points per side");
  }
  std::vector<double> a(xs.begin(), xs.end());
  std::vector<double> b(ys.begin(), ys.end());
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const std::size_t n = a.size();
  const std::size_t m = b.size();
  std::size_t i = 0;
  std::size_t j = 0;
  double d = 0.0;
  while (i < n && j < m) {
    const double va = a[i];
    const double vb = b[j];
    if (va <= vb) {
      while (i < n && a[i] == va) ++i;
    }
    if (vb <= va) {
      while (j < m && b[j] == vb) ++j;
    }
    d = std::max(d, std::abs(static_cast<double>(i) / n -
                             static_cast<double>(j) / m));
  }
  const double neff = static_cast<double>(n) * m / (n + m);
  TestVerdict v;
  v.name = std::move(name);
  v.statistic = d;
  v.p_value = kolmogorov_tail(std::sqrt(neff) * d);
  v.threshold = max_statistic;
  v.pass = d <= max_statistic;
  return v;
}

TestVerdict energy_perm_test(const SampleMatrix& x, const SampleMatrix& y,
                             int n_perm, Seed seed, double min_p) {
  validate_matrix(x, "x");
  validate_matrix(y, "y");
  if (x.cols != y.cols) {
    throw ShapeMismatch("energy_perm_test: column counts differ");
  }
  if (x.rows < 10 || y.rows < 10) {
    throw ShapeMismatch("energy_perm_test: need at least 10 rows per side");
  }
  if (n_perm < 100) {
    throw ShapeMismatch("energy_perm_test: need at least 100 permutations");
  }

  const std::vector<std::size_t> xi = strided_subset(x.rows, kMaxEnergyRows);
  const std::vector<std::size_t> yi = strided_subset(y.rows, kMaxEnergyRows);
  const std::size_t n = xi.size();
  const std::size_t m = yi.size();
  const std::size_t total = n + m;
  const std::size_t cols = x.cols;

  // Pool the two clouds and standardize each column with pooled moments
  // (a permutation-invariant rescaling, so exchangeability is intact).
  std::vector<double> pooled(total * cols);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < cols; ++c) pooled[r * cols + c] = x.at(xi[r], c);
  }
  for (std::size_t r = 0; r < m; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      pooled[(n + r) * cols + c] = y.at(yi[r], c);
    }
  }
  for (std::size_t c = 0; c < cols; ++c) {
    double mean = 0.0;
    for (std::size_t r = 0; r < total; ++r) mean += pooled[r * cols + c];
    mean /= static_cast<double>(total);
    double var = 0.0;
    for (std::size_t r = 0; r < total; ++r) {
      const double d = pooled[r * cols + c] - mean;
      var += d * d;
    }
    var /= static_cast<double>(total);
    const double scale = var > 0.0 ? 1.0 / std::sqrt(var) : 1.0;
    for (std::size_t r = 0; r < total; ++r) {
      pooled[r * cols + c] = (pooled[r * cols + c] - mean) * scale;
    }
  }

  // Full pairwise distance matrix in float, streamed row-wise below.
  std::vector<float> dist(total * total, 0.0f);
  for (std::size_t r = 0; r < total; ++r) {
    for (std::size_t s = r + 1; s < total; ++s) {
      double acc = 0.0;
      const double* pr = &pooled[r * cols];
      const double* ps = &pooled[s * cols];
      for (std::size_t c = 0; c < cols; ++c) {
        const double d = pr[c] - ps[c];
        acc += d * d;
      }
      const float dv = static_cast<float>(std::sqrt(acc));
      dist[r * total + s] = dv;
      dist[s * total + r] = dv;
    }
  }

  std::vector<double> row_total(total, 0.0);
  for (std::size_t r = 0; r < total; ++r) {
    double acc = 0.0;
    const float* row = &dist[r * total];
    for (std::size_t s = 0; s < total; ++s) acc += row[s];
    row_total[r] = acc;
  }

  const auto energy_for = [&](const std::vector<unsigned char>& in_x) {
    // s_in[r] = sum of distances from r to the current "x" block.
    double sxx = 0.0;
    double sxy = 0.0;
    double syy = 0.0;
    for (std::size_t r = 0; r < total; ++r) {
      const float* row = &dist[r * total];
      double in = 0.0;
      for (std::size_t s = 0; s < total; ++s) {
        in += in_x[s] ? row[s] : 0.0f;
      }
      const double out = row_total[r] - in;
      if (in_x[r]) {
        sxx += in;
        sxy += out;
      } else {
        syy += out;
      }
    }
    const double nn = static_cast<double>(n);
    const double mm = static_cast<double>(m);
    return 2.0 * sxy / (nn * mm) - sxx / (nn * nn) - syy / (mm * mm);
  };

  std::vector<unsigned char> label(total, 0);
  for (std::size_t r = 0; r < n; ++r) label[r] = 1;
  const double observed = energy_for(label);

  CounterRng rng(seed);
  std::vector<std::size_t> order(total);
  std::iota(order.begin(), order.end(), std::size_t{0});
  int at_least = 0;
  for (int p = 0; p < n_perm; ++p) {
    // Fisher-Yates relabeling.
    for (std::size_t k = total - 1; k > 0; --k) {
      const std::size_t pick = rng.next_bits() % (k + 1);
      std::swap(order[k], order[pick]);
    }
    std::vector<unsigned char> lab(total, 0);
    for (std::size_t r = 0; r < n; ++r) lab[order[r]] = 1;
    if (energy_for(lab) >= observed) ++at_least;
  }

  TestVerdict v;
  v.name = "energy";
  v.statistic = observed;
  v.p_value = (1.0 + at_least) / (n_perm + 1.0);
  v.threshold = min_p;
  v.pass = *v.p_value >= min_p;
  return v;
}

double bridge_max_tail(double y, double x, double t) {
  if (!(t > 0.0) || !std::isfinite(t) || !std::isfinite(x) ||
      !std::isfinite(y)) {
    throw DomainError("bridge_max_tail: bad parameters");
  }
  if (std::abs(x) < std::abs(y)) {
    throw DomainError("bridge_max_tail: requires |x| >= |y|");
  }
  return std::exp(-(x * x - y * y) / (2.0 * t));
}

TestVerdict rate_vs_reference(std::uint64_t successes, std::uint64_t trials,
                              double reference) {
  if (trials < 100 || successes > trials || !(reference >= 0.0) ||
      !(reference <= 1.0)) {
    throw DomainError("rate_vs_reference: bad inputs");
  }
  const double rate = static_cast<double>(successes) / trials;
  const double se = std::sqrt(reference * (1.0 - reference) / trials);
  TestVerdict v;
  v.name = "acceptance_rate";
  v.statistic = std::abs(rate - reference);
  v.threshold = 3.0 * se;
  v.pass = v.statistic <= v.threshold;
  return v;
}

}  // namespace pathlaw
