#include "dcw/distributions.hpp"

#include <cmath>
#include <sstream>

#include "dcw/common.hpp"
#include "dcw/stats.hpp"

namespace dcw {

Distribution::Distribution(DistKind k, double loc, double sc)
    : kind_(k), location_(loc), scale_(sc) {
  if (!std::isfinite(loc) || !std::isfinite(sc)) {
    throw config_error("distribution parameters must be finite");
  }
  if (k != DistKind::Degenerate && !(sc > 0.0)) {
    throw config_error("distribution scale must be positive");
  }
}

Distribution Distribution::normal(double mean, double sd) {
  return Distribution(DistKind::Normal, mean, sd);
}
Distribution Distribution::logistic(double location, double scale) {
  return Distribution(DistKind::Logistic, location, scale);
}
Distribution Distribution::uniform(double center, double half_width) {
  return Distribution(DistKind::Uniform, center, half_width);
}
Distribution Distribution::degenerate(double value) {
  return Distribution(DistKind::Degenerate, value, 0.0);
}
Distribution Distribution::two_point(double center, double half_spread) {
  return Distribution(DistKind::TwoPoint, center, half_spread);
}

double Distribution::cdf(double x) const {
  switch (kind_) {
    case DistKind::Normal:
      return norm_cdf((x - location_) / scale_);
    case DistKind::Logistic:
      return logistic_cdf((x - location_) / scale_);
    case DistKind::Uniform: {
      const double t = (x - (location_ - scale_)) / (2.0 * scale_);
      return t <= 0.0 ? 0.0 : (t >= 1.0 ? 1.0 : t);
    }
    case DistKind::Degenerate:
      return x >= location_ ? 1.0 : 0.0;
    case DistKind::TwoPoint:
      if (x < location_ - scale_) return 0.0;
      return x < location_ + scale_ ? 0.5 : 1.0;
  }
  return 0.0;
}

double Distribution::density(double x) const {
  switch (kind_) {
    case DistKind::Normal:
      return norm_pdf((x - location_) / scale_) / scale_;
    case DistKind::Logistic: {
      const double f = logistic_cdf((x - location_) / scale_);
      return f * (1.0 - f) / scale_;
    }
    case DistKind::Uniform:
      return (x >= location_ - scale_ && x <= location_ + scale_)
                 ? 0.5 / scale_
                 : 0.0;
    case DistKind::Degenerate:
    case DistKind::TwoPoint:
      throw numerical_error("density undefined for a distribution with atoms");
  }
  return 0.0;
}

double Distribution::quantile(double p) const {
  if (kind_ == DistKind::Degenerate) return location_;
  if (!(p > 0.0 && p < 1.0)) throw numerical_error("quantile: p outside (0,1)");
  if (kind_ == DistKind::TwoPoint) {
    return p <= 0.5 ? location_ - scale_ : location_ + scale_;
  }
  switch (kind_) {
    case DistKind::Normal:
      return location_ + scale_ * norm_ppf(p);
    case DistKind::Logistic:
      return location_ + scale_ * logistic_ppf(p);
    case DistKind::Uniform:
      return location_ + scale_ * (2.0 * p - 1.0);
    default:
      return location_;
  }
}

Distribution Distribution::affine(double a, double b) const {
  if (a == 0.0) return Distribution::degenerate(b);
  if (kind_ == DistKind::Degenerate) {
    return Distribution::degenerate(a * location_ + b);
  }
  // Symmetric families: a*X + b has location a*loc + b, scale |a|*scale.
  return Distribution(kind_, a * location_ + b, std::fabs(a) * scale_);
}

double Distribution::bracket_radius() const {
  return std::fabs(location_) + 10.0 * scale_;
}

std::vector<double> Distribution::atoms() const {
  switch (kind_) {
    case DistKind::Degenerate: return {location_};
    case DistKind::TwoPoint: return {location_ - scale_, location_ + scale_};
    default: return {};
  }
}

std::string Distribution::describe() const {
  std::ostringstream os;
  switch (kind_) {
    case DistKind::Normal: os << "normal(" << location_ << ", " << scale_ << ")"; break;
    case DistKind::Logistic: os << "logistic(" << location_ << ", " << scale_ << ")"; break;
    case DistKind::Uniform: os << "uniform(" << location_ << " +/- " << scale_ << ")"; break;
    case DistKind::Degenerate: os << "degenerate(" << location_ << ")"; break;
    case DistKind::TwoPoint:
      os << "two_point(" << location_ - scale_ << " | " << location_ + scale_ << ")";
      break;
  }
  return os.str();
}

}  // namespace dcw
