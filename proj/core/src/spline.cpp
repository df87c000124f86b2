#include "dcw/spline.hpp"

#include <algorithm>
#include <cmath>

#include "dcw/common.hpp"

namespace dcw {

SplineBasis::SplineBasis(double y_min, double y_max, int segments, int degree)
    : y_min_(y_min), y_max_(y_max), segments_(segments), degree_(degree) {
  if (!(y_max > y_min)) throw config_error("spline: degenerate interval");
  if (degree < 1 || degree > 3) throw config_error("spline: degree must be 1, 2 or 3");
  if (segments < 1) throw config_error("spline: at least one segment required");
  sites_.resize(segments_ + 1);
  const double h = (y_max_ - y_min_) / segments_;
  for (int i = 0; i <= segments_; ++i) sites_[i] = y_min_ + i * h;
  sites_.front() = y_min_;
  sites_.back() = y_max_;

  knots_.reserve(segments_ + 2 * degree_ + 1);
  for (int i = 0; i < degree_; ++i) knots_.push_back(y_min_);
  knots_.insert(knots_.end(), sites_.begin(), sites_.end());
  for (int i = 0; i < degree_; ++i) knots_.push_back(y_max_);
}

int SplineBasis::find_span(double y) const {
  // Span index i such that knots_[i] <= y < knots_[i+1], with the right
  // endpoint folded into the last non-empty span.
  const int n = size();  // number of basis functions
  if (y >= y_max_) return n - 1;
  if (y <= y_min_) return degree_;
  int lo = degree_;
  int hi = n;
  while (hi - lo > 1) {
    const int mid = (lo + hi) / 2;
    if (y < knots_[mid]) hi = mid; else lo = mid;
  }
  return lo;
}

void SplineBasis::basis_funs(int span, double y, int degree, double* out) const {
  // Cox-de Boor triangular scheme; out[0..degree] are the values of
  // B_{span-degree..span, degree} at y.
  double left[4];
  double right[4];
  out[0] = 1.0;
  for (int j = 1; j <= degree; ++j) {
    left[j] = y - knots_[span + 1 - j];
    right[j] = knots_[span + j] - y;
    double saved = 0.0;
    for (int r = 0; r < j; ++r) {
      const double denom = right[r + 1] + left[j - r];
      const double temp = denom != 0.0 ? out[r] / denom : 0.0;
      out[r] = saved + right[r + 1] * temp;
      saved = left[j - r] * temp;
    }
    out[j] = saved;
  }
}

std::vector<double> SplineBasis::eval(double y) const {
  y = std::clamp(y, y_min_, y_max_);
  std::vector<double> values(size(), 0.0);
  const int span = find_span(y);
  double nz[4];
  basis_funs(span, y, degree_, nz);
  for (int r = 0; r <= degree_; ++r) values[span - degree_ + r] = nz[r];
  return values;
}

std::vector<double> SplineBasis::eval_derivative(double y) const {
  y = std::clamp(y, y_min_, y_max_);
  std::vector<double> values(size(), 0.0);
  if (degree_ == 0) return values;
  const int span = find_span(y);
  // Degree q-1 values at the same span: B_{span-q+1..span, q-1}.
  double nz[4];
  basis_funs(span, y, degree_ - 1, nz);
  // B'_{i,q} = q * [ B_{i,q-1}/(t_{i+q}-t_i) - B_{i+1,q-1}/(t_{i+q+1}-t_{i+1}) ].
  for (int i = span - degree_; i <= span; ++i) {
    double d = 0.0;
    const int r = i - (span - degree_ + 1);  // index of B_{i,q-1} in nz
    if (r >= 0 && r <= degree_ - 1) {
      const double den = knots_[i + degree_] - knots_[i];
      if (den > 0.0) d += nz[r] / den;
    }
    const int r2 = r + 1;  // index of B_{i+1,q-1} in nz
    if (r2 >= 0 && r2 <= degree_ - 1) {
      const double den = knots_[i + degree_ + 1] - knots_[i + 1];
      if (den > 0.0) d -= nz[r2] / den;
    }
    values[i] = degree_ * d;
  }
  return values;
}

double SplineBasis::value(std::span<const double> coeffs, double y) const {
  if (static_cast<int>(coeffs.size()) > size()) {
    throw config_error("spline: coefficient vector longer than basis");
  }
  const auto b = eval(y);
  double s = 0.0;
  for (std::size_t i = 0; i < coeffs.size(); ++i) s += coeffs[i] * b[i];
  return s;
}

double SplineBasis::derivative(std::span<const double> coeffs, double y) const {
  if (static_cast<int>(coeffs.size()) > size()) {
    throw config_error("spline: coefficient vector longer than basis");
  }
  const auto b = eval_derivative(y);
  double s = 0.0;
  for (std::size_t i = 0; i < coeffs.size(); ++i) s += coeffs[i] * b[i];
  return s;
}

}  // namespace dcw
