#include "wirecons/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

namespace wirecons::numerics {
namespace {

// 15-point Kronrod extension of the 7-point Gauss rule on [-1, 1]
// (QUADPACK QK15 tables). Positive abscissae in descending order; the
// even-indexed entries are Kronrod-only nodes, the odd-indexed ones are the
// Gauss nodes.
constexpr double kNodes[7] = {
    0.991455371120813, 0.949107912342759, 0.864864423359769,
    0.741531185599394, 0.586087235467691, 0.405845151377397,
    0.207784955007898};

constexpr double kKronrodWeights[8] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250,
    0.140653259715525, 0.169004726639267, 0.190350578064785,
    0.204432940075298, 0.209482141084728};  // last entry: center node

constexpr double kGaussWeights[4] = {
    0.129484966168870, 0.279705391489277, 0.381830050505119,
    0.417959183673469};  // last entry: center node

struct PanelEstimate {
  double value;
  double error;
};

PanelEstimate kronrod15(const RealFunction& f, double a, double b) {
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  const double fc = f(mid);
  double kronrod = kKronrodWeights[7] * fc;
  double gauss = kGaussWeights[3] * fc;
  for (int i = 0; i < 7; ++i) {
    const double dx = half * kNodes[i];
    const double pair = f(mid - dx) + f(mid + dx);
    kronrod += kKronrodWeights[i] * pair;
    if (i % 2 == 1) gauss += kGaussWeights[i / 2] * pair;
  }
  kronrod *= half;
  gauss *= half;
  return {kronrod, std::abs(kronrod - gauss)};
}

}  // namespace

void QuadratureSpec::validate() const {
  if (!(relative_tolerance > 0.0) || !(absolute_tolerance > 0.0))
    throw std::domain_error("QuadratureSpec: tolerances must be > 0");
  if (max_subdivisions < 1)
    throw std::domain_error("QuadratureSpec: max_subdivisions must be >= 1");
}

void RootBracket::validate() const {
  if (!(lo < hi))
    throw std::domain_error("RootBracket: requires lo < hi");
  if (!std::isfinite(lo) || !std::isfinite(hi))
    throw std::domain_error("RootBracket: endpoints must be finite");
}

double integrate(const RealFunction& f, double lo, double hi,
                 const QuadratureSpec& spec) {
  spec.validate();
  if (!std::isfinite(lo) || !std::isfinite(hi))
    throw std::domain_error("integrate: bounds must be finite");
  if (lo > hi) throw std::domain_error("integrate: requires lo <= hi");
  if (lo == hi) return 0.0;

  const PanelEstimate whole = kronrod15(f, lo, hi);
  if (!std::isfinite(whole.value))
    throw NumericalError("integrate: integrand is not finite on the interval");
  const double target = std::max(spec.absolute_tolerance,
                                 spec.relative_tolerance * std::abs(whole.value));

  // Each panel carries its share of the global error budget; a split hands
  // half of the budget to each child.
  struct Panel {
    double a, b, budget;
  };
  std::vector<Panel> pending{{lo, hi, target}};
  double total = 0.0;
  int subdivisions = 0;
  while (!pending.empty()) {
    const Panel panel = pending.back();
    pending.pop_back();
    const PanelEstimate est = kronrod15(f, panel.a, panel.b);
    if (!std::isfinite(est.value))
      throw NumericalError("integrate: integrand is not finite on the interval");
    if (est.error <= panel.budget) {
      total += est.value;
      continue;
    }
    const double mid = 0.5 * (panel.a + panel.b);
    if (!(mid > panel.a && mid < panel.b))
      throw NumericalError("integrate: panel too narrow to refine further");
    if (++subdivisions > spec.max_subdivisions)
      throw NumericalError(
          "integrate: tolerance not reached within max_subdivisions");
    pending.push_back({panel.a, mid, 0.5 * panel.budget});
    pending.push_back({mid, panel.b, 0.5 * panel.budget});
  }
  return total;
}

double q_function(double x) {
  if (std::isnan(x)) throw std::domain_error("q_function: x must not be NaN");
  return 0.5 * std::erfc(x / std::numbers::sqrt2);
}

double q_inverse(double eps) {
  if (!(eps > 0.0 && eps < 1.0))
    throw std::domain_error("q_inverse: eps must lie in (0, 1)");
  // Q(-40) == 1 and Q(40) == 0 in double precision, so the root is interior.
  double lo = -40.0;
  double hi = 40.0;
  while (true) {
    const double mid = 0.5 * (lo + hi);
    if (!(mid > lo && mid < hi)) break;
    const double q = q_function(mid);
    if (q == eps) return mid;
    if (q > eps)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

double find_root(const RealFunction& f, RootBracket bracket, double tol) {
  bracket.validate();
  if (!(tol > 0.0)) throw std::domain_error("find_root: tol must be > 0");

  double a = bracket.lo;
  double b = bracket.hi;
  double fa = f(a);
  double fb = f(b);
  if (!std::isfinite(fa) || !std::isfinite(fb))
    throw NumericalError("find_root: objective not finite on the bracket");
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  if ((fa > 0.0) == (fb > 0.0))
    throw std::domain_error("find_root: no sign change on the bracket");

  // Brent: inverse-quadratic / secant steps with a bisection fallback.
  double c = a;
  double fc = fa;
  double d = b - a;
  double e = d;
  constexpr int kMaxIterations = 200;
  for (int iter = 0; iter < kMaxIterations; ++iter) {
    if ((fb > 0.0) == (fc > 0.0)) {
      c = a;
      fc = fa;
      d = b - a;
      e = d;
    }
    if (std::abs(fc) < std::abs(fb)) {
      a = b;
      b = c;
      c = a;
      fa = fb;
      fb = fc;
      fc = fa;
    }
    const double tol1 =
        2.0 * std::numeric_limits<double>::epsilon() * std::abs(b) +
        0.5 * tol * std::abs(b);
    const double xm = 0.5 * (c - b);
    if (std::abs(xm) <= tol1 || fb == 0.0) return b;
    if (std::abs(fb) <= tol) return b;
    if (std::abs(e) >= tol1 && std::abs(fa) > std::abs(fb)) {
      const double s = fb / fa;
      double p, q;
      if (a == c) {
        p = 2.0 * xm * s;
        q = 1.0 - s;
      } else {
        const double qq = fa / fc;
        const double r = fb / fc;
        p = s * (2.0 * xm * qq * (qq - r) - (b - a) * (r - 1.0));
        q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
      }
      if (p > 0.0) q = -q;
      p = std::abs(p);
      const double min1 = 3.0 * xm * q - std::abs(tol1 * q);
      const double min2 = std::abs(e * q);
      if (2.0 * p < std::min(min1, min2)) {
        e = d;
        d = p / q;
      } else {
        d = xm;
        e = d;
      }
    } else {
      d = xm;
      e = d;
    }
    a = b;
    fa = fb;
    if (std::abs(d) > tol1)
      b += d;
    else
      b += (xm >= 0.0 ? tol1 : -tol1);
    fb = f(b);
    if (!std::isfinite(fb))
      throw NumericalError("find_root: objective turned non-finite");
  }
  throw NumericalError("find_root: no convergence within iteration limit");
}

}  // namespace wirecons::numerics
