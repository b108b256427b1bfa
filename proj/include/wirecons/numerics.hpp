#pragma once

#include <functional>
#include <stdexcept>

namespace wirecons::numerics {

/// Thrown when an iterative kernel fails to converge or an evaluation turns
/// non-finite. Domain violations use std::domain_error instead.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using RealFunction = std::function<double(double)>;

struct QuadratureSpec {
  double relative_tolerance = 1e-10;
  double absolute_tolerance = 1e-14;
  int max_subdivisions = 2000;

  void validate() const;
};

/// Interval known to contain a sign change of the objective.
struct RootBracket {
  double lo;
  double hi;

  void validate() const;
};

/// Adaptive quadrature of f over [lo, hi]: a 15-point Kronrod rule per panel,
/// panels split until the embedded error estimate meets the requested
/// tolerance. Throws NumericalError if the subdivision budget runs out.
double integrate(const RealFunction& f, double lo, double hi,
                 const QuadratureSpec& spec = {});

/// Gaussian tail probability Q(x) = 0.5 * erfc(x / sqrt(2)).
double q_function(double x);

/// Inverse of q_function on (0, 1), computed by bisection so that
/// q_function(q_inverse(eps)) == eps to full working precision.
double q_inverse(double eps);

/// Brent's method on a bracketing interval. Returns x with |f(x)| <= tol or
/// with the remaining interval narrower than tol * |x|.
double find_root(const RealFunction& f, RootBracket bracket, double tol);

}  // namespace wirecons::numerics
