#pragma once

#include <cmath>
#include <numeric>
#include <vector>

namespace dcw::testutil {

inline double mean(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

inline double sample_sd(const std::vector<double>& v) {
  const double m = mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

/// Standard error of a mean estimated from v.
inline double mean_se(const std::vector<double>& v) {
  return sample_sd(v) / std::sqrt(static_cast<double>(v.size()));
}

/// Binomial standard error of a share p̂ from n draws.
inline double binomial_se(double p_hat, double n) {
  return std::sqrt(std::max(p_hat * (1.0 - p_hat), 1e-12) / n);
}

}  // namespace dcw::testutil
