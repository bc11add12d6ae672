#ifndef UIC_BAYES_HPP_
#define UIC_BAYES_HPP_

#include <cstdint>
#include <vector>

#include "uic/gaussmix.hpp"
#include "uic/loss.hpp"

namespace uic {

struct BayesRiskResult {
  double eta;
  double minimizer;  // argmin over yhat of the pointwise risk
  double value;      // minimal pointwise risk
};

/// Minimal achievable pointwise risk at eta. Closed forms are used for the
/// cross-entropy, square and alpha families (and tunable boosting at C = 0);
/// every other family is minimized numerically over
/// [kEpsClip, 1-kEpsClip] to absolute tolerance 1e-10 in the minimizer.
BayesRiskResult pointwise_bayes_risk(const LossSpec& spec, double eta);

/// Divergence generator induced by the loss and prior:
/// f(t) = bayes(pi) - (pi t + 1 - pi) * bayes(pi t / (pi t + 1 - pi)).
double f_exact(const LossSpec& spec, double pi, double t);

/// Closed-form limiting f-function. Supported rows: cross entropy and poly
/// -> -pi log(pi) (1-t); square -> pi (1-t); focal -> the cross-entropy row
/// over (gamma+1); vector scaling -> delta1 times the cross-entropy row;
/// alpha -> pi^alpha (1-t^alpha) / (1-alpha); tunable boosting -> the alpha
/// row scaled by exp(-alpha C) (constant obtained from the reduced
/// stationarity equation of its minimizer). The erf family has no closed
/// form and throws UnsupportedFamilyError.
double f_asymptotic(const LossSpec& spec, double pi, double t);

/// Ratios f_exact / f_asymptotic along a decreasing prior sequence; the
/// ratio at t = 1 is 1 by convention (both sides vanish).
std::vector<double> verify_uic_limit(const LossSpec& spec, double t,
                                     const std::vector<double>& pi_sequence);

/// Sampled f-function surface over (pi, t) grids.
struct FCurve {
  LossSpec spec;
  std::vector<double> pi_grid;
  std::vector<double> t_grid;
  std::vector<std::vector<double>> exact;       // [pi][t]
  std::vector<std::vector<double>> asymptotic;  // [pi][t]; empty for erf
};

std::vector<double> default_t_grid();   // {0, 0.1, ..., 0.9, 1, 2, 5}
std::vector<double> default_pi_grid();  // {1e-2, ..., 1e-8}

FCurve compute_fcurve(const LossSpec& spec, std::vector<double> pi_grid,
                      std::vector<double> t_grid);

struct StatInfoEstimate {
  double value;           // Monte Carlo mean of f(dP/dQ) over Q samples
  double std_error;
  double dual_value;      // bayes(pi) - E[bayes(eta(x))] over mixture samples
  double dual_std_error;
  std::size_t n;
};

/// Monte Carlo statistical information of the task under its loss. Both the
/// f-divergence estimator and the Bayes-risk-difference estimator are
/// returned; they agree within sampling error. Requires mc_samples >= 1000.
StatInfoEstimate statistical_information(const Task& task,
                                         std::size_t mc_samples,
                                         std::uint64_t seed);

}  // namespace uic

#endif  // UIC_BAYES_HPP_
