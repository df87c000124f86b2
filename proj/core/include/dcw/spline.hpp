#pragma once

#include <span>
#include <vector>

namespace dcw {

/// Clamped B-spline basis on [y_min, y_max] with M+1 equally spaced knots
/// (boundary knots at full multiplicity), giving M + degree basis functions.
/// Evaluation clamps its argument to the support; derivatives use the exact
/// lower-degree recursion on the knot system with boundary multiplicity
/// reduced by one.
class SplineBasis {
 public:
  SplineBasis() : SplineBasis(0.0, 1.0, 2, 1) {}  // placeholder basis
  SplineBasis(double y_min, double y_max, int segments, int degree);

  int size() const { return segments_ + degree_; }
  int degree() const { return degree_; }
  int segments() const { return segments_; }
  double y_min() const { return y_min_; }
  double y_max() const { return y_max_; }

  /// Interior + boundary knot sites z_1..z_{M+1} (no multiplicity).
  const std::vector<double>& sites() const { return sites_; }

  /// All basis function values at y (length size()). They sum to one.
  std::vector<double> eval(double y) const;

  /// d/dy of each basis function at y (length size()).
  std::vector<double> eval_derivative(double y) const;

  /// Spline value for a coefficient vector; coefficients beyond
  /// coeffs.size() are treated as zero (coeffs.size() <= size()).
  double value(std::span<const double> coeffs, double y) const;

  /// Exact derivative of the same spline.
  double derivative(std::span<const double> coeffs, double y) const;

 private:
  int find_span(double y) const;
  // Nonzero basis values of given degree at y; writes degree+1 entries.
  void basis_funs(int span, double y, int degree, double* out) const;

  double y_min_;
  double y_max_;
  int segments_;  // M
  int degree_;    // q
  std::vector<double> sites_;
  std::vector<double> knots_;  // extended, length M + 2q + 1
};

}  // namespace dcw
