#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pathlaw/rng.hpp"

namespace pathlaw {

/// Row-major matrix of Monte Carlo panel evaluations: one row per
/// replication, one column per functional.
struct SampleMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;
  std::vector<std::string> labels;

  double at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
};

struct TestVerdict {
  std::string name;
  double statistic = 0.0;
  std::optional<double> p_value;
  double threshold = 0.0;
  bool pass = false;
};

/// Upper tail of the asymptotic Kolmogorov distribution.
double kolmogorov_tail(double lambda);

/// Two-sample Kolmogorov-Smirnov: statistic is the ECDF sup-distance,
/// p-value from the asymptotic law at effective size nm/(n+m).
/// pass <=> statistic <= max_statistic.  Throws TooFewSamples.
TestVerdict ks_two_sample(std::span<const double> xs,
                          std::span<const double> ys,
                          double max_statistic = 1.0,
                          std::string name = "ks");

/// Energy-distance permutation test between two point clouds with equal
/// column layout.  p = (1 + #{permuted >= observed}) / (n_perm + 1);
/// pass <=> p >= min_p.  Large inputs are subsampled deterministically
/// to bound the distance matrix.  Throws ShapeMismatch.
TestVerdict energy_perm_test(const SampleMatrix& x, const SampleMatrix& y,
                             int n_perm, Seed seed, double min_p = 0.0);

/// exp(-(x^2 - y^2)/(2t)): tail probability that the running max of a
/// standard bridge ending at y clears (|x|+y)/2.  Requires |x| >= |y|,
/// t > 0; throws DomainError.
double bridge_max_tail(double y, double x, double t);

/// Binomial acceptance-rate check: pass <=> |successes/trials - reference|
/// <= 3 sqrt(reference (1-reference) / trials).  Throws DomainError.
TestVerdict rate_vs_reference(std::uint64_t successes, std::uint64_t trials,
                              double reference);

}  // namespace pathlaw
