#pragma once

#include <functional>
#include <vector>

namespace dcw {

/// Settings for the half-line welfare integrals. The upper limit is
/// truncated at zmax = y_max - income; the integrand is checked there and
/// evaluation fails hard if it still exceeds `tail_tol`.
struct QuadratureConfig {
  double y_max = 1000.0;     // income ceiling defining the truncation point
  int initial_panels = 64;   // composite Gauss-Legendre panels to start with
  int max_evals = 1 << 14;   // evaluation cap; panels double until rel_tol met
  double rel_tol = 1e-8;
  double tail_tol = 1e-4;

  double zmax(double income) const { return y_max - income; }
};

/// Composite 8-node Gauss-Legendre over [a, b]. The panel count doubles
/// until |I_k - I_{k-1}| <= rel_tol * max(1, |I_k|); throws numerical_error
/// if the evaluation cap is reached first.
double integrate_adaptive(const std::function<double(double)>& f, double a,
                          double b, int initial_panels, int max_evals,
                          double rel_tol);

/// Convenience overload using the panel/tolerance settings of `cfg`.
double integrate_adaptive(const std::function<double(double)>& f, double a,
                          double b, const QuadratureConfig& cfg);

/// Non-adaptive composite rule with a fixed panel count. Smooth in any
/// parameters of f, which matters inside finite-difference optimizers.
double integrate_fixed(const std::function<double(double)>& f, double a,
                       double b, int panels);

/// Adaptive integration split at known jump locations of f, so piecewise
/// smooth integrands (step demand from degenerate taste offsets) converge.
/// Breaks outside (a, b) are ignored.
double integrate_adaptive_segmented(const std::function<double(double)>& f,
                                    double a, double b,
                                    const std::vector<double>& breaks,
                                    const QuadratureConfig& cfg);

}  // namespace dcw
