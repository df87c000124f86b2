#pragma once

namespace dcw {

/// Standard normal density.
double norm_pdf(double x);

/// Standard normal CDF, accurate in both tails (via erfc).
double norm_cdf(double x);

/// log of the standard normal CDF, safe for large negative arguments.
double norm_logcdf(double x);

/// Standard normal quantile (Wichura's PPND16 rational approximation,
/// relative error below 1e-15 on (0,1)).
double norm_ppf(double p);

/// Standard logistic CDF 1 / (1 + exp(-x)).
double logistic_cdf(double x);

/// Standard logistic quantile log(p / (1-p)).
double logistic_ppf(double p);

/// Regularized incomplete beta function I_x(a, b).
double inc_beta(double a, double b, double x);

/// Upper tail probability of an F(d1, d2) statistic.
double f_survival(double f, double d1, double d2);

}  // namespace dcw
