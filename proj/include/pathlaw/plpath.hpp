#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

namespace pathlaw {

/// Continuous piecewise-linear function on [0, horizon], stored as knots.
///
/// Knot times are strictly increasing and start at 0; consecutive knots are
/// joined by straight segments.  Every operation on paths is exact on this
/// representation: an output carries a knot wherever the result can bend, so
/// identities between transformed paths can be checked at knots without any
/// quadrature error.
class PLPath {
 public:
  /// Validates and adopts the knot arrays.
  /// Throws EmptyPath, LengthMismatch, NonMonotoneTimes.
  PLPath(std::vector<double> knot_times, std::vector<double> knot_values);

  [[nodiscard]] double horizon() const { return times_.back(); }
  [[nodiscard]] std::size_t knot_count() const { return times_.size(); }
  [[nodiscard]] const std::vector<double>& knot_times() const { return times_; }
  [[nodiscard]] const std::vector<double>& knot_values() const { return values_; }

  [[nodiscard]] double value_front() const { return values_.front(); }
  [[nodiscard]] double value_back() const { return values_.back(); }

  /// Value at time s.  Exact (the stored value) when s hits a knot.
  /// Throws OutOfDomain outside [0, horizon].
  [[nodiscard]] double value_at(double s) const;

 private:
  std::vector<double> times_;
  std::vector<double> values_;
};

/// Convenience constructor mirroring PLPath's validating constructor.
PLPath make_path(std::vector<double> times, std::vector<double> values);

/// Flat path with two knots.
PLPath constant_path(double value, double horizon);

enum class Envelope { prefix_max, prefix_min, suffix_max, suffix_min };

/// Running extremum of the path: prefix variants over [0, s], suffix variants
/// over [s, horizon].  A knot is inserted where a segment crosses the running
/// level; suffix variants are computed by reversal.
PLPath envelope(const PLPath& path, Envelope kind);

/// Time reversal s -> horizon - s.
PLPath reverse(const PLPath& path);

/// Pointwise sum(coeffs[k] * paths[k]) + constant on the union knot set.
/// All paths must share the horizon (HorizonMismatch otherwise).
PLPath combine(std::span<const PLPath> paths, std::span<const double> coeffs,
               double constant);

/// coeff * path + constant.
PLPath scale_shift(const PLPath& path, double coeff, double constant);

PLPath negate(const PLPath& path);

/// |path|, with knots inserted at zero crossings.
PLPath abs_path(const PLPath& path);

/// Pointwise minimum, with knots inserted where the two paths cross.
PLPath pointwise_min(const PLPath& a, const PLPath& b);

/// Exact extrema / integral of the PL representation over [lo, hi].
double max_over(const PLPath& path, double lo, double hi);
double min_over(const PLPath& path, double lo, double hi);
double integral_over(const PLPath& path, double lo, double hi);

/// Splits every segment so the path has at least min_segments segments.
/// The function is unchanged; the extra knots are not pruned.
PLPath densify(const PLPath& path, std::size_t min_segments);

/// Writes "s,value" header plus one knot per line at 17 significant digits.
void write_csv(const PLPath& path, std::ostream& out);

}  // namespace pathlaw
