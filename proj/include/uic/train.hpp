#ifndef UIC_TRAIN_HPP_
#define UIC_TRAIN_HPP_

#include <cstdint>
#include <vector>

#include "uic/gaussmix.hpp"
#include "uic/linear.hpp"
#include "uic/loss.hpp"

namespace uic {

enum class Optimizer { kSgd, kFullBatchGd };
enum class InitScheme { kZeros, kLogitAdjusted, kExplicit };

struct TrainConfig {
  Optimizer optimizer = Optimizer::kSgd;
  double lr = 0.05;
  double momentum = 0.9;
  int epochs = 200;
  int batch_size = 256;
  std::uint64_t seed = 0;
  InitScheme init = InitScheme::kZeros;
  Eigen::VectorXd w0;  // used by kExplicit
  double b0 = 0.0;
  double divergence_guard = 1e10;
  double grad_tol = 0.0;  // > 0 enables early stop on full gradient norm
  // Population-objective controls: gradients are exact per-component
  // quadrature for any dimension; mc_n is the sample size of the Monte Carlo
  // fallback when the task loss lacks quadrature support.
  int quadrature_order = 64;
  std::size_t mc_n = 1000000;
};

struct TrainResult {
  LinearClassifier classifier;
  std::vector<double> loss_trace;  // objective value per epoch
  double grad_norm_final = 0.0;
};

/// Per-family trainer objective in margin form, y in {0,1}. Every family
/// trains through the logistic link except square, which trains as margin
/// regression on +-1 targets: the link-composed square objective calibrates
/// sigmoid(b) to the class prior instead of reaching the regression plateau
/// the square-loss limit solver characterizes.
double train_margin_value(const LossSpec& spec, int y01, double margin);
double train_margin_grad(const LossSpec& spec, int y01, double margin);
double train_margin_hess(const LossSpec& spec, int y01, double margin);

/// Minimizes the mean trainer objective over the dataset. Deterministic
/// given (cfg.seed, data). Throws NumericalError if the objective exceeds
/// the divergence guard or turns non-finite.
TrainResult fit_linear(const Dataset& data, const LossSpec& spec,
                       const TrainConfig& cfg);
TrainResult fit_linear(const std::vector<LabeledSample>& data,
                       const LossSpec& spec, const TrainConfig& cfg);

/// Minimizes the population risk of the task under its loss by full-batch
/// gradient descent on exact per-component quadrature gradients (the margin
/// of a linear scorer is 1-D Gaussian per component, so expectations reduce
/// to one-dimensional Gauss-Hermite integrals in any input dimension).
TrainResult fit_linear_population(const Task& task, const TrainConfig& cfg);

/// Objective value and gradient of the mean trainer objective on a dataset.
double empirical_objective(const Dataset& data, const LossSpec& spec,
                           const LinearClassifier& clf);
void empirical_gradient(const Dataset& data, const LossSpec& spec,
                        const LinearClassifier& clf, Eigen::VectorXd& grad_w,
                        double& grad_b);

/// Population objective/gradient via the 1-D quadrature reduction.
double population_objective(const Task& task, const LinearClassifier& clf,
                            int order);
void population_gradient(const Task& task, const LinearClassifier& clf,
                         int order, Eigen::VectorXd& grad_w, double& grad_b);

/// Points on {x : w^T x + b = 0} for a 2-D classifier, sampled uniformly
/// along the axis the line extends most. Throws DomainError when w = 0.
std::vector<Eigen::Vector2d> decision_boundary_2d(const LinearClassifier& clf,
                                                  double lo, double hi,
                                                  int n_points = 64);

}  // namespace uic

#endif  // UIC_TRAIN_HPP_
