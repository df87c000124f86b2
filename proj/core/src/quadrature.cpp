#include "dcw/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "dcw/common.hpp"

namespace dcw {

namespace {

// 8-node Gauss-Legendre on [-1, 1].
constexpr int kNodes = 8;
constexpr double kX[kNodes] = {
    -0.9602898564975362316835609, -0.7966664774136267395915539,
    -0.5255324099163289858177390, -0.1834346424956498049394761,
    0.1834346424956498049394761,  0.5255324099163289858177390,
    0.7966664774136267395915539,  0.9602898564975362316835609};
constexpr double kW[kNodes] = {
    0.1012285362903762591525314, 0.2223810344533744705443560,
    0.3137066458778872873379622, 0.3626837833783619829651504,
    0.3626837833783619829651504, 0.3137066458778872873379622,
    0.2223810344533744705443560, 0.1012285362903762591525314};

double composite_gl(const std::function<double(double)>& f, double a, double b,
                    int panels) {
  const double h = (b - a) / panels;
  double sum = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double mid = a + (p + 0.5) * h;
    const double half = 0.5 * h;
    double s = 0.0;
    for (int i = 0; i < kNodes; ++i) s += kW[i] * f(mid + half * kX[i]);
    sum += s * half;
  }
  return sum;
}

}  // namespace

double integrate_adaptive(const std::function<double(double)>& f, double a,
                          double b, int initial_panels, int max_evals,
                          double rel_tol) {
  if (b <= a) return 0.0;
  int panels = initial_panels < 1 ? 1 : initial_panels;
  double prev = composite_gl(f, a, b, panels);
  while (true) {
    if (2 * panels * kNodes > max_evals) {
      throw numerical_error("integrate_adaptive: evaluation cap reached before convergence");
    }
    panels *= 2;
    const double cur = composite_gl(f, a, b, panels);
    if (std::fabs(cur - prev) <= rel_tol * std::fmax(1.0, std::fabs(cur))) {
      return cur;
    }
    prev = cur;
  }
}

double integrate_adaptive(const std::function<double(double)>& f, double a,
                          double b, const QuadratureConfig& cfg) {
  return integrate_adaptive(f, a, b, cfg.initial_panels, cfg.max_evals,
                            cfg.rel_tol);
}

double integrate_fixed(const std::function<double(double)>& f, double a,
                       double b, int panels) {
  if (b <= a) return 0.0;
  return composite_gl(f, a, b, panels < 1 ? 1 : panels);
}

double integrate_adaptive_segmented(const std::function<double(double)>& f,
                                    double a, double b,
                                    const std::vector<double>& breaks,
                                    const QuadratureConfig& cfg) {
  if (b <= a) return 0.0;
  std::vector<double> cuts{a};
  for (double x : breaks) {
    if (x > a && x < b) cuts.push_back(x);
  }
  cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    if (cuts[i + 1] - cuts[i] < 1e-14) continue;
    // Per-segment panels scale with length so short segments stay cheap.
    const double frac = (cuts[i + 1] - cuts[i]) / (b - a);
    const int panels = std::max(4, static_cast<int>(cfg.initial_panels * frac));
    total += integrate_adaptive(f, cuts[i], cuts[i + 1], panels, cfg.max_evals,
                                cfg.rel_tol);
  }
  return total;
}

}  // namespace dcw
