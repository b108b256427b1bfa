#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace wirecons::fitting {

enum class GainTransform {
  log10_of_failure,  // gain = log10(1 - P)
  log10_of_success,  // gain = log10(P)
};

struct GainPoint {
  double node_count;
  double gain;
};

struct DroppedPoint {
  double node_count;
  double probability;
  std::string reason;
};

/// Reliability-gain series: the chosen logarithmic transform of consensus
/// probabilities against node count. Points whose probability falls outside
/// (0, 1) are moved to `dropped` with a diagnostic instead of producing
/// non-finite gains.
struct GainSeries {
  std::vector<GainPoint> points;
  GainTransform transform = GainTransform::log10_of_failure;
  std::vector<DroppedPoint> dropped;
};

struct GaussianFit {
  double amplitude;  // a
  double center;     // b
  double width;      // c, kept positive
  double r_squared;

  double model(double x) const;  // a * exp(-((x - b) / c)^2)
};

/// Convergence failure of the fitter; carries the best iterate reached.
class FitError : public std::runtime_error {
 public:
  FitError(const std::string& what, std::optional<GaussianFit> best = {})
      : std::runtime_error(what), best_(std::move(best)) {}
  const std::optional<GaussianFit>& best_iterate() const { return best_; }

 private:
  std::optional<GaussianFit> best_;
};

GainSeries reliability_gain(
    const std::vector<std::pair<double, double>>& node_count_and_probability,
    GainTransform transform = GainTransform::log10_of_failure);

/// Residual norms of the accepted iterates, for inspecting the damping
/// behaviour.
struct FitTrace {
  std::vector<double> residual_norms;
};

/// Least-squares fit of a * exp(-((x - b) / c)^2) to the gain series.
/// Deterministic initialization (extremal gain, its location, half the node
/// range) followed by damped Gauss-Newton refinement to a relative step of
/// 1e-10. Needs at least 4 points with non-constant gains.
GaussianFit fit_gaussian(const GainSeries& series, FitTrace* trace = nullptr);

}  // namespace wirecons::fitting
