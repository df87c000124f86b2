#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "dcw/common.hpp"
#include "dcw/distributions.hpp"
#include "dcw/quadrature.hpp"
#include "dcw/rng.hpp"
#include "dcw/spline.hpp"
#include "dcw/stats.hpp"
#include "test_util.hpp"

using namespace dcw;

TEST_CASE("counter rng is deterministic and order-free") {
  const CounterRng a(42);
  const CounterRng b(42);
  CHECK(a.uniform(3, 17) == b.uniform(3, 17));
  CHECK(a.uniform(3, 17) != a.uniform(3, 18));
  CHECK(a.uniform(3, 17) != a.uniform(4, 17));
  // In (0, 1) strictly.
  for (int i = 0; i < 1000; ++i) {
    const double u = a.uniform(1, i);
    CHECK(u > 0.0);
    CHECK(u < 1.0);
  }
}

TEST_CASE("counter rng mean close to one half") {
  const CounterRng rng(7);
  const int n = 100000;
  double s = 0.0;
  for (int i = 0; i < n; ++i) s += rng.uniform(2, i);
  const double mean = s / n;
  // sd of uniform = sqrt(1/12); allow 4 standard errors.
  CHECK(std::fabs(mean - 0.5) < 4.0 * std::sqrt(1.0 / 12.0 / n));
}

TEST_CASE("normal quantile round trip and known values") {
  CHECK(norm_ppf(0.5) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(norm_ppf(0.975) == doctest::Approx(1.959963984540054).epsilon(1e-12));
  CHECK(norm_ppf(0.0013498980316300933) == doctest::Approx(-3.0).epsilon(1e-10));
  for (double p : {1e-12, 1e-6, 0.01, 0.3, 0.5, 0.7, 0.99, 1.0 - 1e-6}) {
    CHECK(norm_cdf(norm_ppf(p)) == doctest::Approx(p).epsilon(1e-12));
  }
  CHECK_THROWS_AS(norm_ppf(0.0), numerical_error);
  CHECK_THROWS_AS(norm_ppf(1.0), numerical_error);
}

TEST_CASE("norm_logcdf stays finite deep in the tail") {
  CHECK(norm_logcdf(0.0) == doctest::Approx(std::log(0.5)).epsilon(1e-14));
  CHECK(norm_logcdf(-10.0) == doctest::Approx(std::log(norm_cdf(-10.0))).epsilon(1e-10));
  CHECK(std::isfinite(norm_logcdf(-50.0)));
  CHECK(norm_logcdf(-50.0) < -1000.0);
}

TEST_CASE("logistic helpers") {
  CHECK(logistic_cdf(0.0) == 0.5);
  CHECK(logistic_cdf(-1.0) == doctest::Approx(1.0 / (1.0 + std::exp(1.0))).epsilon(1e-15));
  for (double p : {0.01, 0.25, 0.5, 0.9}) {
    CHECK(logistic_cdf(logistic_ppf(p)) == doctest::Approx(p).epsilon(1e-14));
  }
}

TEST_CASE("incomplete beta and F tail probabilities") {
  CHECK(inc_beta(1.0, 1.0, 0.3) == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(inc_beta(2.0, 1.0, 0.3) == doctest::Approx(0.09).epsilon(1e-10));
  // 95th percentile of F(1, 10) is 4.9646; of chi2(1)/1 in the limit 3.8415.
  CHECK(f_survival(4.9646, 1.0, 10.0) == doctest::Approx(0.05).epsilon(2e-3));
  CHECK(f_survival(3.8415, 1.0, 1e6) == doctest::Approx(0.05).epsilon(2e-3));
  CHECK(f_survival(std::numeric_limits<double>::infinity(), 1.0, 10.0) == 0.0);
}

TEST_CASE("distribution cdf, quantile and density agree") {
  const std::vector<Distribution> dists = {
      Distribution::normal(0.3, 1.7), Distribution::logistic(-1.0, 0.4),
      Distribution::uniform(2.0, 1.5)};
  for (const auto& d : dists) {
    for (double p : {0.05, 0.3, 0.5, 0.77, 0.99}) {
      CHECK(d.cdf(d.quantile(p)) == doctest::Approx(p).epsilon(1e-10));
    }
    // density ~ derivative of cdf
    for (double x : {-0.5, 0.9, 2.4}) {
      const double h = 1e-6;
      const double fd = (d.cdf(x + h) - d.cdf(x - h)) / (2.0 * h);
      CHECK(d.density(x) == doctest::Approx(fd).epsilon(1e-5));
    }
  }
  const auto deg = Distribution::degenerate(1.5);
  CHECK(deg.cdf(1.4999) == 0.0);
  CHECK(deg.cdf(1.5) == 1.0);
  CHECK(deg.quantile(0.3) == 1.5);
  CHECK_THROWS_AS(Distribution::normal(0.0, -1.0), config_error);
  CHECK_THROWS_AS(Distribution::normal(std::nan(""), 1.0), config_error);
}

TEST_CASE("affine transforms stay in the family") {
  const auto d = Distribution::logistic(0.3, 0.7);
  const auto pos = d.affine(2.0, -1.0);
  const auto neg = d.affine(-2.0, 1.0);
  for (double x : {-3.0, -0.4, 0.0, 1.2, 5.0}) {
    CHECK(pos.cdf(x) == doctest::Approx(d.cdf((x + 1.0) / 2.0)).epsilon(1e-12));
    CHECK(neg.cdf(x) == doctest::Approx(1.0 - d.cdf((1.0 - x) / 2.0)).epsilon(1e-12));
  }
  CHECK(d.affine(0.0, 3.0).is_degenerate());
}

TEST_CASE("adaptive quadrature hits analytic integrals") {
  // Gauss-Legendre is exact for low-degree polynomials.
  CHECK(integrate_adaptive([](double x) { return x * x * x; }, 0.0, 1.0, 1, 1 << 14, 1e-12) ==
        doctest::Approx(0.25).epsilon(1e-14));
  // Logistic survivor integral: int_0^inf 1/(1+e^z) dz = log 2.
  const double v = integrate_adaptive([](double z) { return logistic_cdf(-z); }, 0.0, 40.0,
                                      64, 1 << 14, 1e-10);
  CHECK(v == doctest::Approx(std::log(2.0)).epsilon(1e-9));
  CHECK(integrate_adaptive([](double) { return 1.0; }, 1.0, 1.0, 8, 1 << 14, 1e-8) == 0.0);
}

TEST_CASE("quadrature reports non-convergence") {
  // A step cannot converge under a tiny evaluation cap.
  const double jump = 0.3141592653589793;
  const auto step = [&](double x) { return x < jump ? 0.0 : 1.0; };
  CHECK_THROWS_AS(integrate_adaptive(step, 0.0, 1.0, 1, 256, 1e-12), numerical_error);
  // Splitting at the jump fixes it.
  QuadratureConfig cfg;
  cfg.rel_tol = 1e-12;
  const double v = integrate_adaptive_segmented(step, 0.0, 1.0, {jump}, cfg);
  CHECK(v == doctest::Approx(1.0 - jump).epsilon(1e-12));
}

TEST_CASE("spline basis counts and partition of unity") {
  const SplineBasis b(0.0, 10.0, 4, 3);
  CHECK(b.size() == 7);  // M + q
  const CounterRng rng(11);
  for (int i = 0; i < 100; ++i) {
    const double y = 10.0 * rng.uniform(1, i);
    const auto vals = b.eval(y);
    double s = 0.0;
    for (double v : vals) {
      CHECK(v >= 0.0);
      s += v;
    }
    CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
  }
  // Clamped ends interpolate the first/last coefficient.
  CHECK(b.eval(0.0).front() == doctest::Approx(1.0));
  CHECK(b.eval(10.0).back() == doctest::Approx(1.0));
}

TEST_CASE("spline derivative matches finite differences") {
  for (int degree : {2, 3}) {
    const SplineBasis b(1.0, 21.0, 8, degree);
    std::vector<double> coeffs(b.size());
    const CounterRng rng(5);
    for (std::size_t i = 0; i < coeffs.size(); ++i) {
      coeffs[i] = 2.0 * rng.uniform(degree, i) - 1.0;
    }
    for (int i = 0; i < 50; ++i) {
      const double y = 1.0 + 19.6 * rng.uniform(9, i) + 0.2;
      const double h = 1e-5;
      const double fd = (b.value(coeffs, y + h) - b.value(coeffs, y - h)) / (2.0 * h);
      CHECK(b.derivative(coeffs, y) == doctest::Approx(fd).epsilon(1e-6));
    }
    // Derivative of the constant spline vanishes.
    std::vector<double> ones(b.size(), 1.0);
    CHECK(b.derivative(ones, 7.3) == doctest::Approx(0.0).epsilon(1e-12));
  }
}

TEST_CASE("spline derivative with an implicit zero tail") {
  // Coefficients only on the leading M functions.
  const SplineBasis b(0.0, 10.0, 6, 3);
  std::vector<double> coeffs = {0.0, 0.5, 0.9, 1.0, 0.6, 0.1};
  for (double y : {0.5, 3.0, 6.7, 9.2, 9.9}) {
    const double h = 1e-5;
    const double fd = (b.value(coeffs, y + h) - b.value(coeffs, y - h)) / (2.0 * h);
    CHECK(b.derivative(coeffs, y) == doctest::Approx(fd).epsilon(1e-6));
  }
}

TEST_CASE("spline rejects bad configuration") {
  CHECK_THROWS_AS(SplineBasis(5.0, 5.0, 4, 3), config_error);
  CHECK_THROWS_AS(SplineBasis(0.0, 1.0, 4, 5), config_error);
  CHECK_THROWS_AS(SplineBasis(0.0, 1.0, 0, 2), config_error);
}
