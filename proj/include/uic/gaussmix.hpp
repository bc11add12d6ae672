#ifndef UIC_GAUSSMIX_HPP_
#define UIC_GAUSSMIX_HPP_

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <cstdint>
#include <vector>

#include "uic/linear.hpp"
#include "uic/loss.hpp"
#include "uic/rng.hpp"

namespace uic {

/// Immutable Gaussian mixture: weights on the simplex, one mean and one
/// symmetric positive-definite covariance per component. Covariances are
/// Cholesky-validated at construction; a factorization failure throws
/// DomainError rather than silently regularizing.
class GaussianMixture {
 public:
  GaussianMixture(std::vector<double> weights,
                  std::vector<Eigen::VectorXd> means,
                  std::vector<Eigen::MatrixXd> covariances);

  static GaussianMixture Single(const Eigen::VectorXd& mean,
                                const Eigen::MatrixXd& covariance);

  int dim() const { return static_cast<int>(means_[0].size()); }
  int components() const { return static_cast<int>(weights_.size()); }
  const std::vector<double>& weights() const { return weights_; }
  const Eigen::VectorXd& mean(int i) const { return means_[i]; }
  const Eigen::MatrixXd& covariance(int i) const { return covariances_[i]; }
  const Eigen::MatrixXd& cholesky_factor(int i) const { return chol_[i]; }

  /// Mixture mean sum_i w_i mu_i.
  Eigen::VectorXd mixture_mean() const;

  /// Total covariance: within-component part plus between-component scatter.
  Eigen::MatrixXd total_covariance() const;

  double log_density(const Eigen::VectorXd& x) const;
  double density(const Eigen::VectorXd& x) const;

  /// CDF of the 1-D mixture (dim() must be 1).
  double cdf1d(double x) const;

  Eigen::VectorXd sample(CounterRng& rng) const;
  Eigen::VectorXd sample_component(int i, CounterRng& rng) const;

 private:
  std::vector<double> weights_;
  std::vector<Eigen::VectorXd> means_;
  std::vector<Eigen::MatrixXd> covariances_;
  std::vector<Eigen::MatrixXd> chol_;      // lower factors L, Sigma = L L^T
  std::vector<double> log_norm_;           // -d/2 log(2 pi) - sum log L_ii
  std::vector<double> log_weights_;
};

/// Classification task (pi, P, Q; loss): minority prior pi, class
/// conditionals P (minority) and Q (majority), and the training loss.
struct Task {
  double pi;
  double rho;  // pi / (1 - pi), stored for convenience
  GaussianMixture minority;
  GaussianMixture majority;
  LossSpec loss;

  Task(double pi, GaussianMixture minority, GaussianMixture majority,
       LossSpec loss);
};

struct LabeledSample {
  Eigen::VectorXd x;
  int y;  // 1 = minority
};

/// Dense dataset view used by trainers: row-major features plus 0/1 labels.
struct Dataset {
  Eigen::MatrixXd x;  // n x d
  Eigen::VectorXi y;  // n

  Eigen::Index size() const { return x.rows(); }
  int dim() const { return static_cast<int>(x.cols()); }
  std::vector<LabeledSample> to_samples() const;
  static Dataset from_samples(const std::vector<LabeledSample>& samples);
};

/// log(p/q * rho) for x; finite whenever either class density is nonzero.
double posterior_log_odds(const Task& task, const Eigen::VectorXd& x);

/// eta(x) = pi p(x) / (pi p(x) + (1-pi) q(x)), evaluated in log space.
double posterior_eta(const Task& task, const Eigen::VectorXd& x);

/// n labeled draws; each sample i uses the substream derived from (seed, i),
/// so the result is independent of evaluation order. Labels are
/// Bernoulli(pi).
std::vector<LabeledSample> sample(const Task& task, std::size_t n,
                                  std::uint64_t seed);

/// Exactly n_minority positives followed by n_majority negatives.
Dataset sample_fixed_counts(const Task& task, std::size_t n_minority,
                            std::size_t n_majority, std::uint64_t seed);
Dataset sample_dataset(const Task& task, std::size_t n, std::uint64_t seed);

enum class RiskMethod { kMonteCarlo, kQuadrature };

struct RiskEstimate {
  double value;
  double std_error;  // sampling SE for MC, order-refinement gap for quadrature
};

/// E[l(y, sigmoid(w^T x + b))] under the task mixture. Quadrature is a
/// tensorized Gauss-Hermite rule per component and supports dim <= 2;
/// Monte Carlo works in any dimension and is reproducible given the seed.
RiskEstimate population_risk(const Task& task, const LinearClassifier& clf,
                             RiskMethod method, std::size_t mc_n = 100000,
                             std::uint64_t seed = 0, int order = 64);

/// Exact AUC of the linear score w^T x between two independent mixtures:
/// sum_ij w_i w_j Psi(w^T (mu_i - nu_j) / sqrt(w^T (S_i + T_j) w)).
double mixture_auc(const GaussianMixture& minority,
                   const GaussianMixture& majority, const Eigen::VectorXd& w);

/// AUC of direction w for one Gaussian per class.
double two_gaussian_auc(const Eigen::VectorXd& mu_pos,
                        const Eigen::MatrixXd& cov_pos,
                        const Eigen::VectorXd& mu_neg,
                        const Eigen::MatrixXd& cov_neg,
                        const Eigen::VectorXd& w);

/// Gauss-Hermite nodes/weights for integrals against exp(-z^2); cached per
/// order, thread safe.
struct GaussHermite {
  std::vector<double> nodes;
  std::vector<double> weights;
};
const GaussHermite& gauss_hermite(int order);

}  // namespace uic

#endif  // UIC_GAUSSMIX_HPP_
