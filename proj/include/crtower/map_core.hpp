#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace crtower {

inline constexpr double kCritical = 0.5;

// Numeric tolerances shared by every module.
inline constexpr double kTolRoot = 1e-12;
inline constexpr double kTolSuper = 1e-9;
inline constexpr double kTolNeutral = 1e-9;
inline constexpr double kTolRegion = 1e-9;
inline constexpr double kTolCrisis = 1e-8;

/// Raised for arguments outside an operation's documented range.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when a numeric search fails to locate what it was asked for.
class NotFoundError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  double width() const { return hi - lo; }
  double mid() const { return 0.5 * (lo + hi); }
  bool contains(double x, double slack = 0.0) const {
    return x >= lo - slack && x <= hi + slack;
  }
  bool interior_contains(double x) const { return x > lo && x < hi; }
  bool contains(const Interval& other, double slack = 0.0) const {
    return other.lo >= lo - slack && other.hi <= hi + slack;
  }
  static Interval spanning(double a, double b) {
    return a <= b ? Interval{a, b} : Interval{b, a};
  }
};

enum class Orientation { MaxAtCritical, MinAtCritical };

inline double logistic(double mu, double x) { return mu * x * (1.0 - x); }
inline double logistic_slope(double mu, double x) { return mu * (1.0 - 2.0 * x); }

/// The logistic map at fixed mu, or its renormalization l^step restricted
/// to a domain symmetric about the critical point.
///
/// A renormalized view carries the periodic endpoint of its domain
/// (`boundary`), which the view maps to itself. The other endpoint maps onto
/// it as well. Views are immutable after construction.
class MapView {
 public:
  static MapView base(double mu);
  static MapView renormalized(double mu, int step, Interval domain, double boundary);

  double mu() const { return mu_; }
  int step() const { return step_; }
  const Interval& domain() const { return domain_; }
  double boundary() const { return boundary_; }
  Orientation orientation() const { return orientation_; }

  bool contains(double x, double slack = kTolRegion) const { return domain_.contains(x, slack); }

  /// l^step(x) without the domain check.
  double apply(double x) const {
    for (int i = 0; i < step_; ++i) x = mu_ * x * (1.0 - x);
    return x;
  }

  /// Preimage of y under the view on the chosen side of c, or nothing when
  /// y is not attained inside the domain.
  std::optional<double> preimage(double y, bool right_branch) const;

 private:
  MapView(double mu, int step, Interval domain, double boundary);

  double mu_;
  int step_;
  Interval domain_;
  double boundary_;
  Orientation orientation_;
  // sign of l^i(boundary) - c for i = 1 .. step-1; picks inverse branches
  std::vector<std::int8_t> sides_;
};

double eval(const MapView& view, double x);

struct PointDerivative {
  double point;
  double derivative;
};

/// n-th iterate under the view together with the chain-rule derivative
/// accumulated along all n*step applications of l_mu.
PointDerivative iterate_with_derivative(const MapView& view, double x, int n);

/// The other point of the domain with the same image as x.
double symmetric_point(const MapView& view, double x);

/// c, F(c), ..., F^n(c) under the view.
std::vector<double> critical_orbit(const MapView& view, int n);

}  // namespace crtower
