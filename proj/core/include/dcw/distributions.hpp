#pragma once

#include <string>
#include <vector>

namespace dcw {

enum class DistKind { Normal, Logistic, Uniform, Degenerate, TwoPoint };

/// Scalar location-scale distribution with evaluable CDF, density and
/// quantile. Uniform is parameterized by center and half-width; Degenerate
/// is a point mass at `location`; TwoPoint puts mass one half on each of
/// location +/- scale.
class Distribution {
 public:
  static Distribution normal(double mean, double sd);
  static Distribution logistic(double location, double scale);
  static Distribution uniform(double center, double half_width);
  static Distribution degenerate(double value);
  static Distribution two_point(double center, double half_spread);

  double cdf(double x) const;
  double density(double x) const;
  double quantile(double p) const;  // p in (0,1)

  DistKind kind() const { return kind_; }
  double location() const { return location_; }
  double scale() const { return scale_; }
  bool is_degenerate() const { return kind_ == DistKind::Degenerate; }

  /// True when the CDF is continuous with a density.
  bool is_continuous() const {
    return kind_ != DistKind::Degenerate && kind_ != DistKind::TwoPoint;
  }

  /// Atom locations (empty for continuous families).
  std::vector<double> atoms() const;

  /// Distribution of a*X + b for a != 0 (location-scale closure; the
  /// families here are symmetric, so a < 0 stays inside the family).
  Distribution affine(double a, double b) const;

  /// A magnitude useful for bracketing: |location| + 10 * scale.
  double bracket_radius() const;

  std::string describe() const;

 private:
  Distribution(DistKind k, double loc, double sc);

  DistKind kind_;
  double location_;
  double scale_;
};

}  // namespace dcw
