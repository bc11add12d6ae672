#include "uic/gaussmix.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <map>
#include <mutex>

#include "uic/errors.hpp"
#include "uic/math.hpp"

namespace uic {

GaussianMixture::GaussianMixture(std::vector<double> weights,
                                 std::vector<Eigen::VectorXd> means,
                                 std::vector<Eigen::MatrixXd> covariances)
    : weights_(std::move(weights)),
      means_(std::move(means)),
      covariances_(std::move(covariances)) {
  if (weights_.empty() || weights_.size() != means_.size() ||
      weights_.size() != covariances_.size())
    throw DomainError("mixture needs matching weights/means/covariances");
  const Eigen::Index d = means_[0].size();
  if (d < 1) throw DomainError("mixture dimension must be >= 1");
  double wsum = 0.0;
  for (double w : weights_) {
    if (!(w >= 0.0)) throw DomainError("mixture weights must be >= 0");
    wsum += w;
  }
  if (std::abs(wsum - 1.0) > 1e-12)
    throw DomainError("mixture weights must sum to 1 within 1e-12");
  chol_.reserve(weights_.size());
  log_norm_.reserve(weights_.size());
  log_weights_.reserve(weights_.size());
  for (std::size_t i = 0; i < weights_.size(); ++i) {
    if (means_[i].size() != d || covariances_[i].rows() != d ||
        covariances_[i].cols() != d)
      throw DomainError("mixture component dimensions disagree");
    const Eigen::MatrixXd& cov = covariances_[i];
    if ((cov - cov.transpose()).cwiseAbs().maxCoeff() >
        1e-10 * std::max(1.0, cov.cwiseAbs().maxCoeff()))
      throw DomainError("covariance must be symmetric");
    Eigen::LLT<Eigen::MatrixXd> llt(cov);
    if (llt.info() != Eigen::Success)
      throw DomainError("covariance is not positive definite");
    chol_.push_back(llt.matrixL());
    double log_det_half = 0.0;
    for (Eigen::Index k = 0; k < d; ++k)
      log_det_half += std::log(chol_.back()(k, k));
    log_norm_.push_back(-0.5 * d * std::log(2.0 * kPi) - log_det_half);
    log_weights_.push_back(weights_[i] > 0.0
                               ? std::log(weights_[i])
                               : -std::numeric_limits<double>::infinity());
  }
}

GaussianMixture GaussianMixture::Single(const Eigen::VectorXd& mean,
                                        const Eigen::MatrixXd& covariance) {
  return GaussianMixture({1.0}, {mean}, {covariance});
}

Eigen::VectorXd GaussianMixture::mixture_mean() const {
  Eigen::VectorXd m = Eigen::VectorXd::Zero(dim());
  for (int i = 0; i < components(); ++i) m += weights_[i] * means_[i];
  return m;
}

Eigen::MatrixXd GaussianMixture::total_covariance() const {
  const Eigen::VectorXd m = mixture_mean();
  Eigen::MatrixXd total = Eigen::MatrixXd::Zero(dim(), dim());
  for (int i = 0; i < components(); ++i) {
    const Eigen::VectorXd c = means_[i] - m;
    total += weights_[i] * (covariances_[i] + c * c.transpose());
  }
  return total;
}

double GaussianMixture::log_density(const Eigen::VectorXd& x) const {
  if (x.size() != dim()) throw DomainError("density: dimension mismatch");
  std::vector<double> terms(weights_.size());
  for (std::size_t i = 0; i < weights_.size(); ++i) {
    const Eigen::VectorXd z =
        chol_[i].triangularView<Eigen::Lower>().solve(x - means_[i]);
    terms[i] = log_weights_[i] + log_norm_[i] - 0.5 * z.squaredNorm();
  }
  return log_sum_exp(terms);
}

double GaussianMixture::density(const Eigen::VectorXd& x) const {
  return std::exp(log_density(x));
}

double GaussianMixture::cdf1d(double x) const {
  if (dim() != 1) throw DomainError("cdf1d needs a 1-D mixture");
  double c = 0.0;
  for (int i = 0; i < components(); ++i)
    c += weights_[i] * normal_cdf((x - means_[i](0)) / chol_[i](0, 0));
  return c;
}

Eigen::VectorXd GaussianMixture::sample_component(int i,
                                                  CounterRng& rng) const {
  Eigen::VectorXd z(dim());
  for (Eigen::Index k = 0; k < z.size(); ++k) z(k) = rng.normal();
  return means_[i] + chol_[i] * z;
}

Eigen::VectorXd GaussianMixture::sample(CounterRng& rng) const {
  const double u = rng.uniform();
  double acc = 0.0;
  int pick = components() - 1;
  for (int i = 0; i < components(); ++i) {
    acc += weights_[i];
    if (u < acc) {
      pick = i;
      break;
    }
  }
  return sample_component(pick, rng);
}

Task::Task(double pi_, GaussianMixture minority_, GaussianMixture majority_,
           LossSpec loss_)
    : pi(pi_),
      rho(pi_ / (1.0 - pi_)),
      minority(std::move(minority_)),
      majority(std::move(majority_)),
      loss(loss_) {
  if (!(pi > 0.0 && pi <= 0.5)) throw DomainError("pi must lie in (0, 0.5]");
  if (minority.dim() != majority.dim())
    throw DomainError("class conditionals must share a dimension");
  loss.validate();
}

std::vector<LabeledSample> Dataset::to_samples() const {
  std::vector<LabeledSample> out(static_cast<std::size_t>(size()));
  for (Eigen::Index i = 0; i < size(); ++i)
    out[static_cast<std::size_t>(i)] = {x.row(i).transpose(), y(i)};
  return out;
}

Dataset Dataset::from_samples(const std::vector<LabeledSample>& samples) {
  Dataset d;
  if (samples.empty()) return d;
  d.x.resize(static_cast<Eigen::Index>(samples.size()), samples[0].x.size());
  d.y.resize(static_cast<Eigen::Index>(samples.size()));
  for (std::size_t i = 0; i < samples.size(); ++i) {
    d.x.row(static_cast<Eigen::Index>(i)) = samples[i].x.transpose();
    d.y(static_cast<Eigen::Index>(i)) = samples[i].y;
  }
  return d;
}

double posterior_log_odds(const Task& task, const Eigen::VectorXd& x) {
  const double lp = task.minority.log_density(x);
  const double lq = task.majority.log_density(x);
  if (!std::isfinite(lp) && !std::isfinite(lq))
    throw NumericalError("both class densities underflow at this point");
  return std::log(task.pi) - std::log1p(-task.pi) + lp - lq;
}

double posterior_eta(const Task& task, const Eigen::VectorXd& x) {
  return sigmoid(posterior_log_odds(task, x));
}

std::vector<LabeledSample> sample(const Task& task, std::size_t n,
                                  std::uint64_t seed) {
  if (n < 1) throw DomainError("sample: n must be >= 1");
  CounterRng root(seed);
  std::vector<LabeledSample> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    CounterRng r = root.substream(i);
    const int y = r.uniform() < task.pi ? 1 : 0;
    out[i] = {(y == 1 ? task.minority : task.majority).sample(r), y};
  }
  return out;
}

Dataset sample_fixed_counts(const Task& task, std::size_t n_minority,
                            std::size_t n_majority, std::uint64_t seed) {
  CounterRng root(seed);
  const std::size_t n = n_minority + n_majority;
  Dataset d;
  d.x.resize(static_cast<Eigen::Index>(n), task.minority.dim());
  d.y.resize(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    CounterRng r = root.substream(i);
    const bool pos = i < n_minority;
    d.x.row(static_cast<Eigen::Index>(i)) =
        (pos ? task.minority : task.majority).sample(r).transpose();
    d.y(static_cast<Eigen::Index>(i)) = pos ? 1 : 0;
  }
  return d;
}

Dataset sample_dataset(const Task& task, std::size_t n, std::uint64_t seed) {
  return Dataset::from_samples(sample(task, n, seed));
}

const GaussHermite& gauss_hermite(int order) {
  static std::mutex mu;
  static std::map<int, GaussHermite> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(order);
  if (it != cache.end()) return it->second;
  if (order < 1) throw DomainError("quadrature order must be >= 1");
  // Golub-Welsch on the Hermite Jacobi matrix.
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(order, order);
  for (int k = 1; k < order; ++k) {
    const double off = std::sqrt(k / 2.0);
    jacobi(k, k - 1) = off;
    jacobi(k - 1, k) = off;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jacobi);
  GaussHermite gh;
  gh.nodes.resize(order);
  gh.weights.resize(order);
  const double sqrt_pi = std::sqrt(kPi);
  for (int k = 0; k < order; ++k) {
    gh.nodes[k] = es.eigenvalues()(k);
    const double v0 = es.eigenvectors()(0, k);
    gh.weights[k] = sqrt_pi * v0 * v0;
  }
  return cache.emplace(order, std::move(gh)).first->second;
}

namespace {

// E[f(x)] over one Gaussian component by a tensorized Gauss-Hermite rule,
// x = mu + sqrt(2) L z. Supports d <= 2.
template <typename F>
double component_expectation(const Eigen::VectorXd& mu,
                             const Eigen::MatrixXd& chol_l, int order,
                             F&& f) {
  const GaussHermite& gh = gauss_hermite(order);
  const int d = static_cast<int>(mu.size());
  const double norm = std::pow(kPi, -0.5 * d);
  double acc = 0.0;
  if (d == 1) {
    for (int a = 0; a < order; ++a) {
      const Eigen::VectorXd x =
          mu + kSqrt2 * chol_l * Eigen::VectorXd::Constant(1, gh.nodes[a]);
      acc += gh.weights[a] * f(x);
    }
  } else if (d == 2) {
    Eigen::Vector2d z;
    for (int a = 0; a < order; ++a) {
      for (int b = 0; b < order; ++b) {
        z << gh.nodes[a], gh.nodes[b];
        const Eigen::VectorXd x = mu + kSqrt2 * chol_l * z;
        acc += gh.weights[a] * gh.weights[b] * f(x);
      }
    }
  } else {
    throw DomainError("quadrature supports dim <= 2 only");
  }
  return norm * acc;
}

template <typename F>
double mixture_expectation(const GaussianMixture& mix, int order, F&& f) {
  double acc = 0.0;
  for (int i = 0; i < mix.components(); ++i)
    acc += mix.weights()[i] *
           component_expectation(mix.mean(i), mix.cholesky_factor(i), order,
                                 f);
  return acc;
}

double risk_quadrature(const Task& task, const LinearClassifier& clf,
                       int order) {
  auto pos = [&](const Eigen::VectorXd& x) {
    return margin_loss_value(task.loss, +1, clf.margin(x));
  };
  auto neg = [&](const Eigen::VectorXd& x) {
    return margin_loss_value(task.loss, -1, clf.margin(x));
  };
  return task.pi * mixture_expectation(task.minority, order, pos) +
         (1.0 - task.pi) * mixture_expectation(task.majority, order, neg);
}

}  // namespace

RiskEstimate population_risk(const Task& task, const LinearClassifier& clf,
                             RiskMethod method, std::size_t mc_n,
                             std::uint64_t seed, int order) {
  if (clf.w.size() != task.minority.dim())
    throw DomainError("classifier dimension mismatch");
  if (method == RiskMethod::kQuadrature) {
    if (task.minority.dim() > 2)
      throw DomainError("quadrature risk supports dim <= 2 only");
    const double full = risk_quadrature(task, clf, order);
    const double coarse =
        risk_quadrature(task, clf, std::max(2, order / 2));
    return {full, std::abs(full - coarse)};
  }
  if (mc_n < 1) throw DomainError("population_risk: mc_n must be >= 1");
  CounterRng root(seed);
  double sum = 0.0, sum_sq = 0.0;
  for (std::size_t i = 0; i < mc_n; ++i) {
    CounterRng r = root.substream(i);
    const int y = r.uniform() < task.pi ? 1 : 0;
    const Eigen::VectorXd x =
        (y == 1 ? task.minority : task.majority).sample(r);
    const double v = margin_loss_value(task.loss, 2 * y - 1, clf.margin(x));
    sum += v;
    sum_sq += v * v;
  }
  const double n = static_cast<double>(mc_n);
  const double mean = sum / n;
  const double var = std::max(0.0, sum_sq / n - mean * mean);
  return {mean, std::sqrt(var / n)};
}

double two_gaussian_auc(const Eigen::VectorXd& mu_pos,
                        const Eigen::MatrixXd& cov_pos,
                        const Eigen::VectorXd& mu_neg,
                        const Eigen::MatrixXd& cov_neg,
                        const Eigen::VectorXd& w) {
  const double var = w.dot((cov_pos + cov_neg) * w);
  if (var <= 0.0) return 0.5;
  return normal_cdf(w.dot(mu_pos - mu_neg) / std::sqrt(var));
}

double mixture_auc(const GaussianMixture& minority,
                   const GaussianMixture& majority,
                   const Eigen::VectorXd& w) {
  if (w.size() != minority.dim()) throw DomainError("auc: dimension mismatch");
  if (w.norm() == 0.0) return 0.5;
  double auc = 0.0;
  for (int i = 0; i < minority.components(); ++i)
    for (int j = 0; j < majority.components(); ++j)
      auc += minority.weights()[i] * majority.weights()[j] *
             two_gaussian_auc(minority.mean(i), minority.covariance(i),
                              majority.mean(j), majority.covariance(j), w);
  return auc;
}

}  // namespace uic
