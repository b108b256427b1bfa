#include "wirecons/fitting.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

namespace wirecons::fitting {
namespace {

double sum_squared_residuals(const std::vector<GainPoint>& pts, double a,
                             double b, double c) {
  double ssr = 0.0;
  for (const auto& pt : pts) {
    const double t = (pt.node_count - b) / c;
    const double r = pt.gain - a * std::exp(-t * t);
    ssr += r * r;
  }
  return ssr;
}

double r_squared_of(const std::vector<GainPoint>& pts, double ssr) {
  double mean = 0.0;
  for (const auto& pt : pts) mean += pt.gain;
  mean /= static_cast<double>(pts.size());
  double ss_tot = 0.0;
  for (const auto& pt : pts) ss_tot += (pt.gain - mean) * (pt.gain - mean);
  return 1.0 - ssr / ss_tot;
}

struct GnState {
  double a = 0.0, b = 0.0, c = 1.0, ssr = 0.0;
  bool converged = false;
  std::vector<double> residual_norms;
};

// One damped Gauss-Newton descent from the given start. Steps are halved
// until the residual stops growing, so the accepted residual norms are
// non-increasing by construction.
GnState run_damped_gauss_newton(const std::vector<GainPoint>& pts, double a,
                                double b, double c) {
  GnState state;
  state.a = a;
  state.b = b;
  state.c = c;
  state.ssr = sum_squared_residuals(pts, a, b, c);
  state.residual_norms.push_back(std::sqrt(state.ssr));

  const std::size_t m = pts.size();
  Eigen::MatrixXd jacobian(static_cast<Eigen::Index>(m), 3);
  Eigen::VectorXd residual(static_cast<Eigen::Index>(m));

  for (int iter = 0; iter < 200; ++iter) {
    for (std::size_t i = 0; i < m; ++i) {
      const double t = (pts[i].node_count - state.b) / state.c;
      const double e = std::exp(-t * t);
      residual(static_cast<Eigen::Index>(i)) = pts[i].gain - state.a * e;
      jacobian(static_cast<Eigen::Index>(i), 0) = e;
      jacobian(static_cast<Eigen::Index>(i), 1) =
          state.a * e * 2.0 * t / state.c;
      jacobian(static_cast<Eigen::Index>(i), 2) =
          state.a * e * 2.0 * t * t / state.c;
    }
    const Eigen::Matrix3d normal = jacobian.transpose() * jacobian;
    const Eigen::Vector3d rhs = jacobian.transpose() * residual;
    const Eigen::Vector3d step = normal.ldlt().solve(rhs);
    if (!step.allFinite()) return state;

    double lambda = 1.0;
    bool accepted = false;
    double next_a = 0.0, next_b = 0.0, next_c = 0.0, next_ssr = 0.0;
    for (int halving = 0; halving < 60; ++halving, lambda *= 0.5) {
      const double ta = state.a + lambda * step(0);
      const double tb = state.b + lambda * step(1);
      const double tc = state.c + lambda * step(2);
      if (tc == 0.0) continue;
      const double trial = sum_squared_residuals(pts, ta, tb, tc);
      if (std::isfinite(trial) && trial <= state.ssr) {
        next_a = ta;
        next_b = tb;
        next_c = tc;
        next_ssr = trial;
        accepted = true;
        break;
      }
    }

    const double scale =
        std::sqrt(state.a * state.a + state.b * state.b + state.c * state.c);
    if (!accepted) {
      // No damping level makes progress; converged only if the proposed
      // step was already negligible.
      state.converged = step.norm() <= 1e-10 * scale;
      return state;
    }

    const double applied = lambda * step.norm();
    state.a = next_a;
    state.b = next_b;
    state.c = next_c;
    state.ssr = next_ssr;
    state.residual_norms.push_back(std::sqrt(state.ssr));
    if (applied <= 1e-10 * scale) {
      state.converged = true;
      return state;
    }
  }
  return state;
}

}  // namespace

double GaussianFit::model(double x) const {
  const double t = (x - center) / width;
  return amplitude * std::exp(-t * t);
}

GainSeries reliability_gain(
    const std::vector<std::pair<double, double>>& node_count_and_probability,
    GainTransform transform) {
  GainSeries out;
  out.transform = transform;
  for (const auto& [n, prob] : node_count_and_probability) {
    if (!(prob > 0.0 && prob < 1.0)) {
      out.dropped.push_back(
          {n, prob,
           transform == GainTransform::log10_of_failure
               ? "probability outside (0, 1); log10(1 - P) not meaningful"
               : "probability outside (0, 1); log10(P) not meaningful"});
      continue;
    }
    const double gain = transform == GainTransform::log10_of_failure
                            ? std::log10(1.0 - prob)
                            : std::log10(prob);
    out.points.push_back({n, gain});
  }
  return out;
}

GaussianFit fit_gaussian(const GainSeries& series, FitTrace* trace) {
  const auto& pts = series.points;
  if (pts.size() < 4)
    throw std::domain_error("fit_gaussian: needs at least 4 points");

  double gain_lo = pts.front().gain, gain_hi = pts.front().gain;
  double n_lo = pts.front().node_count, n_hi = pts.front().node_count;
  std::size_t extremal = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    gain_lo = std::min(gain_lo, pts[i].gain);
    gain_hi = std::max(gain_hi, pts[i].gain);
    n_lo = std::min(n_lo, pts[i].node_count);
    n_hi = std::max(n_hi, pts[i].node_count);
    if (std::abs(pts[i].gain) > std::abs(pts[extremal].gain)) extremal = i;
  }
  if (gain_lo == gain_hi)
    throw std::domain_error("fit_gaussian: degenerate series, all gains equal");
  if (!(n_hi > n_lo))
    throw std::domain_error(
        "fit_gaussian: degenerate series, all points share one node count");

  const double a0 = pts[extremal].gain;
  const double b0 = pts[extremal].node_count;
  const double half_range = 0.5 * (n_hi - n_lo);

  // Width at which the data decays to 1/e of the extremal gain; falls back
  // to the half range when the series never drops that far.
  double one_e_width = half_range;
  const double threshold = std::abs(a0) / std::exp(1.0);
  double closest = std::numeric_limits<double>::infinity();
  for (const auto& pt : pts) {
    const double distance = std::abs(pt.node_count - b0);
    if (std::abs(pt.gain) <= threshold && distance > 0.0 &&
        distance < closest) {
      closest = distance;
      one_e_width = distance;
    }
  }

  // Deterministic multi-start: a sharp decay makes the half-range start
  // collapse into a tail-fitting valley, so several widths are tried and the
  // best converged descent wins.
  std::vector<double> width_candidates{one_e_width, half_range,
                                       0.25 * half_range};
  width_candidates.erase(
      std::unique(width_candidates.begin(), width_candidates.end()),
      width_candidates.end());

  const GnState* best_converged = nullptr;
  const GnState* best_any = nullptr;
  std::vector<GnState> runs;
  runs.reserve(width_candidates.size());
  for (const double c0 : width_candidates)
    runs.push_back(run_damped_gauss_newton(pts, a0, b0, c0));
  for (const auto& run : runs) {
    if (!best_any || run.ssr < best_any->ssr) best_any = &run;
    if (run.converged && (!best_converged || run.ssr < best_converged->ssr))
      best_converged = &run;
  }

  if (!best_converged) {
    const GnState& fallback = *best_any;
    throw FitError("fit_gaussian: no start converged within the iteration "
                   "limit",
                   GaussianFit{fallback.a, fallback.b, std::abs(fallback.c),
                               r_squared_of(pts, fallback.ssr)});
  }

  if (trace) trace->residual_norms = best_converged->residual_norms;
  return GaussianFit{best_converged->a, best_converged->b,
                     std::abs(best_converged->c),
                     r_squared_of(pts, best_converged->ssr)};
}

}  // namespace wirecons::fitting
