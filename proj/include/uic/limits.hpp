#ifndef UIC_LIMITS_HPP_
#define UIC_LIMITS_HPP_

#include <Eigen/Core>

#include "uic/gaussmix.hpp"
#include "uic/linear.hpp"

namespace uic {

/// Simplex weights produced by the limiting-classifier programs: a tilt over
/// majority components, plus one over minority components for the alpha-loss
/// program (empty otherwise).
struct SimplexWeights {
  Eigen::VectorXd xi_minus;
  Eigen::VectorXd xi_plus;
};

struct LimitResult {
  LinearClassifier classifier;
  SimplexWeights weights;
  bool converged = true;
  int iterations = 0;
  double residual = 0.0;
};

struct SolveOptions {
  int max_iter = 10000;
  double tol = 1e-10;
  double damping = 0.5;     // fixed-point damping factor
  double step = 0.1;        // initial mirror-descent step
};

/// Square-loss limit: w = 2 rho Sigma_-^{-1} (mu_+ - mu_-), b = -1, with
/// Sigma_- the total (within + between) majority covariance.
LimitResult limit_square(const Task& task);

enum class AlphaSolver { kFixedPoint, kProjectedGradient };

/// Alpha-loss limit. Solves the coupled system
///   xi_-^i  proportional to  pi_-^i exp(w' mu_-^i + w' S_-^i w / 2)
///   xi_+^i  proportional to  pi_+^i exp(-u w' mu_+^i + u^2 w' S_+^i w / 2)
///   w = (u sum xi_+ S_+ + sum xi_- S_-)^{-1} (sum xi_+ mu_+ - sum xi_- mu_-)
/// with u = 1/alpha - 1, either by damped fixed-point iteration or by
/// entropic projected gradient on the equivalent strictly convex program;
/// the two agree. The bias is b = alpha * log(rho).
LimitResult limit_alpha(const Task& task, double alpha,
                        AlphaSolver solver = AlphaSolver::kFixedPoint,
                        const SolveOptions& opts = {});

/// Erf-loss limit: single-simplex program over majority components with
/// theta(xi) = (sum xi S_-)^{-1} sum xi mu_-, then
/// w = (-2 log rho)^{-1/2} S~_-^{-1} (mu_+ - mu~_-),
/// b = -(-2 log rho)^{1/2}.
LimitResult limit_erf(const Task& task, const SolveOptions& opts = {});

struct AucDirection {
  Eigen::VectorXd w;
  double auc;
};

/// AUC-optimal linear direction for one Gaussian per class:
/// w proportional to (S_+ + S_-)^{-1} (mu_+ - mu_-), with
/// auc = Psi(w'(mu_+ - mu_-) / sqrt(w'(S_+ + S_-) w)).
AucDirection optimal_auc_direction(const GaussianMixture& minority,
                                   const GaussianMixture& majority);

}  // namespace uic

#endif  // UIC_LIMITS_HPP_
