#include "crtower/map_core.hpp"

#include <cmath>
#include <sstream>

namespace crtower {

namespace {

std::string describe(const char* what, double x, const Interval& dom) {
  std::ostringstream os;
  os.precision(17);
  os << what << ": x=" << x << " outside [" << dom.lo << ", " << dom.hi << "]";
  return os.str();
}

void require_in_domain(const MapView& view, double x) {
  if (!std::isfinite(x) || !view.contains(x)) throw InputError(describe("domain violation", x, view.domain()));
}

std::optional<double> inverse_branch(double mu, double y, int side) {
  double disc = 0.25 - y / mu;
  if (disc < 0.0) {
    if (disc < -1e-15) return std::nullopt;
    disc = 0.0;
  }
  return kCritical + side * std::sqrt(disc);
}

}  // namespace

MapView::MapView(double mu, int step, Interval domain, double boundary)
    : mu_(mu), step_(step), domain_(domain), boundary_(boundary), orientation_(Orientation::MaxAtCritical) {
  double p = boundary;
  sides_.reserve(static_cast<std::size_t>(step > 1 ? step - 1 : 0));
  for (int i = 1; i < step; ++i) {
    p = logistic(mu, p);
    sides_.push_back(p > kCritical ? 1 : -1);
  }
  orientation_ = apply(kCritical) >= apply(domain.lo) ? Orientation::MaxAtCritical : Orientation::MinAtCritical;
}

MapView MapView::base(double mu) {
  if (!(mu > 0.0 && mu <= 4.0)) throw InputError("mu must lie in (0, 4]");
  return MapView(mu, 1, Interval{0.0, 1.0}, 0.0);
}

MapView MapView::renormalized(double mu, int step, Interval domain, double boundary) {
  if (!(mu > 0.0 && mu <= 4.0)) throw InputError("mu must lie in (0, 4]");
  if (step < 1) throw InputError("step must be positive");
  if (!(domain.lo >= 0.0 && domain.hi <= 1.0 && domain.lo < domain.hi)) throw InputError("domain must be a proper subinterval of [0,1]");
  if (step > 1 && !domain.interior_contains(kCritical)) throw InputError("renormalized domain must contain c in its interior");
  if (boundary != domain.lo && boundary != domain.hi) throw InputError("boundary must be a domain endpoint");
  return MapView(mu, step, domain, boundary);
}

std::optional<double> MapView::preimage(double y, bool right_branch) const {
  double z = y;
  for (int i = step_ - 1; i >= 1; --i) {
    auto w = inverse_branch(mu_, z, sides_[static_cast<std::size_t>(i - 1)]);
    if (!w) return std::nullopt;
    z = *w;
  }
  auto x = inverse_branch(mu_, z, right_branch ? 1 : -1);
  if (!x || !domain_.contains(*x, 1e-12)) return std::nullopt;
  return x;
}

double eval(const MapView& view, double x) {
  require_in_domain(view, x);
  return view.apply(x);
}

PointDerivative iterate_with_derivative(const MapView& view, double x, int n) {
  if (n < 0) throw InputError("iteration count must be non-negative");
  require_in_domain(view, x);
  const double mu = view.mu();
  double d = 1.0;
  const long long total = static_cast<long long>(n) * view.step();
  for (long long i = 0; i < total; ++i) {
    d *= logistic_slope(mu, x);
    x = logistic(mu, x);
  }
  return {x, d};
}

double symmetric_point(const MapView& view, double x) {
  require_in_domain(view, x);
  if (view.step() == 1) return 1.0 - x;
  if (x == kCritical) return kCritical;

  const Interval& dom = view.domain();
  const double target = view.apply(x);
  // opposite monotone branch
  double a = x < kCritical ? kCritical : dom.lo;
  double b = x < kCritical ? dom.hi : kCritical;
  double fa = view.apply(a) - target;
  double fb = view.apply(b) - target;
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  if ((fa > 0.0) == (fb > 0.0)) {
    // accept boundary hits lost to rounding
    if (std::abs(fa) <= kTolRoot) return a;
    if (std::abs(fb) <= kTolRoot) return b;
    throw NotFoundError("symmetric_point: value not attained on the opposite branch (outside the symmetric core)");
  }
  while (b - a > kTolRoot) {
    const double m = 0.5 * (a + b);
    const double fm = view.apply(m) - target;
    if (fm == 0.0) return m;
    if ((fm > 0.0) == (fa > 0.0)) {
      a = m;
      fa = fm;
    } else {
      b = m;
    }
  }
  return 0.5 * (a + b);
}

std::vector<double> critical_orbit(const MapView& view, int n) {
  if (n < 1) throw InputError("critical_orbit needs n >= 1");
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(n) + 1);
  double x = kCritical;
  out.push_back(x);
  for (int i = 0; i < n; ++i) {
    x = view.apply(x);
    out.push_back(x);
  }
  return out;
}

}  // namespace crtower
