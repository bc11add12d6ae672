#include "uic/train.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "uic/errors.hpp"
#include "uic/math.hpp"
#include "uic/rng.hpp"

namespace uic {

double train_margin_value(const LossSpec& spec, int y01, double margin) {
  if (spec.family == Family::kSquare) {
    const double r = margin - (y01 == 1 ? 1.0 : -1.0);
    return r * r;
  }
  return margin_loss_value(spec, 2 * y01 - 1, margin);
}

double train_margin_grad(const LossSpec& spec, int y01, double margin) {
  if (spec.family == Family::kSquare)
    return 2.0 * (margin - (y01 == 1 ? 1.0 : -1.0));
  return margin_loss_grad(spec, 2 * y01 - 1, margin);
}

double train_margin_hess(const LossSpec& spec, int y01, double margin) {
  if (spec.family == Family::kSquare) return 2.0;
  return margin_loss_hess(spec, 2 * y01 - 1, margin);
}

double empirical_objective(const Dataset& data, const LossSpec& spec,
                           const LinearClassifier& clf) {
  const Eigen::VectorXd margins =
      (data.x * clf.w).array() + clf.b;
  double sum = 0.0;
  for (Eigen::Index i = 0; i < data.size(); ++i)
    sum += train_margin_value(spec, data.y(i), margins(i));
  return sum / static_cast<double>(data.size());
}

void empirical_gradient(const Dataset& data, const LossSpec& spec,
                        const LinearClassifier& clf, Eigen::VectorXd& grad_w,
                        double& grad_b) {
  const Eigen::VectorXd margins = (data.x * clf.w).array() + clf.b;
  Eigen::VectorXd g(data.size());
  for (Eigen::Index i = 0; i < data.size(); ++i)
    g(i) = train_margin_grad(spec, data.y(i), margins(i));
  const double inv_n = 1.0 / static_cast<double>(data.size());
  grad_w = inv_n * (data.x.transpose() * g);
  grad_b = inv_n * g.sum();
}

namespace {

void apply_init(const TrainConfig& cfg, int dim, double positive_fraction,
                LinearClassifier& clf) {
  switch (cfg.init) {
    case InitScheme::kZeros:
      clf.w = Eigen::VectorXd::Zero(dim);
      clf.b = 0.0;
      break;
    case InitScheme::kLogitAdjusted: {
      clf.w = Eigen::VectorXd::Zero(dim);
      const double p = std::clamp(positive_fraction, 1e-12, 1.0 - 1e-12);
      clf.b = std::log(p) - std::log1p(-p);
      break;
    }
    case InitScheme::kExplicit:
      if (cfg.w0.size() != dim)
        throw DomainError("explicit init dimension mismatch");
      clf.w = cfg.w0;
      clf.b = cfg.b0;
      break;
  }
}

void check_divergence(double objective, const TrainConfig& cfg, int epoch) {
  if (!std::isfinite(objective) || objective > cfg.divergence_guard)
    throw NumericalError("training diverged at epoch " +
                         std::to_string(epoch) + " (objective " +
                         std::to_string(objective) + ")");
}

}  // namespace

TrainResult fit_linear(const Dataset& data, const LossSpec& spec,
                       const TrainConfig& cfg) {
  if (data.size() < 1) throw DomainError("fit_linear: empty dataset");
  if (!(cfg.lr > 0.0)) throw DomainError("fit_linear: lr must be > 0");
  if (cfg.epochs < 1) throw DomainError("fit_linear: epochs must be >= 1");
  if (cfg.batch_size < 1)
    throw DomainError("fit_linear: batch_size must be >= 1");
  spec.validate();

  const int d = data.dim();
  const Eigen::Index n = data.size();
  const double pos_fraction =
      static_cast<double>(data.y.sum()) / static_cast<double>(n);

  TrainResult result;
  apply_init(cfg, d, pos_fraction, result.classifier);
  Eigen::VectorXd vw = Eigen::VectorXd::Zero(d);
  double vb = 0.0;

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  CounterRng shuffle_root = CounterRng(cfg.seed).substream(0x5u);

  Eigen::MatrixXd xb;
  Eigen::VectorXd gb;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    if (cfg.optimizer == Optimizer::kSgd) {
      CounterRng r = shuffle_root.substream(static_cast<std::uint64_t>(epoch));
      for (Eigen::Index i = n - 1; i > 0; --i)
        std::swap(order[static_cast<std::size_t>(i)],
                  order[r.uniform_index(static_cast<std::uint64_t>(i + 1))]);
      for (Eigen::Index start = 0; start < n; start += cfg.batch_size) {
        const Eigen::Index bsz = std::min<Eigen::Index>(cfg.batch_size,
                                                        n - start);
        xb.resize(bsz, d);
        gb.resize(bsz);
        const Eigen::VectorXd& w = result.classifier.w;
        for (Eigen::Index k = 0; k < bsz; ++k)
          xb.row(k) = data.x.row(order[static_cast<std::size_t>(start + k)]);
        const Eigen::VectorXd margins =
            (xb * w).array() + result.classifier.b;
        for (Eigen::Index k = 0; k < bsz; ++k)
          gb(k) = train_margin_grad(
              spec, data.y(order[static_cast<std::size_t>(start + k)]),
              margins(k));
        const double inv_b = 1.0 / static_cast<double>(bsz);
        const Eigen::VectorXd grad_w = inv_b * (xb.transpose() * gb);
        const double grad_b = inv_b * gb.sum();
        vw = cfg.momentum * vw - cfg.lr * grad_w;
        vb = cfg.momentum * vb - cfg.lr * grad_b;
        result.classifier.w += vw;
        result.classifier.b += vb;
      }
    } else {
      Eigen::VectorXd grad_w;
      double grad_b;
      empirical_gradient(data, spec, result.classifier, grad_w, grad_b);
      vw = cfg.momentum * vw - cfg.lr * grad_w;
      vb = cfg.momentum * vb - cfg.lr * grad_b;
      result.classifier.w += vw;
      result.classifier.b += vb;
    }
    const double objective =
        empirical_objective(data, spec, result.classifier);
    check_divergence(objective, cfg, epoch);
    result.loss_trace.push_back(objective);
    if (cfg.grad_tol > 0.0) {
      Eigen::VectorXd grad_w;
      double grad_b;
      empirical_gradient(data, spec, result.classifier, grad_w, grad_b);
      const double gn = std::sqrt(grad_w.squaredNorm() + grad_b * grad_b);
      if (gn < cfg.grad_tol) break;
    }
  }

  Eigen::VectorXd grad_w;
  double grad_b;
  empirical_gradient(data, spec, result.classifier, grad_w, grad_b);
  result.grad_norm_final =
      std::sqrt(grad_w.squaredNorm() + grad_b * grad_b);
  return result;
}

TrainResult fit_linear(const std::vector<LabeledSample>& data,
                       const LossSpec& spec, const TrainConfig& cfg) {
  return fit_linear(Dataset::from_samples(data), spec, cfg);
}

namespace {

// One-dimensional reduction for population gradients: the margin
// m = w'x + b of a Gaussian component x ~ N(mu, S) is N(w'mu + b, w'Sw),
// and E[h'(m) x] = E[h'(m)] mu + S w E[h'(m)(m - E m)] / Var(m), so every
// expectation is a 1-D Gauss-Hermite integral regardless of dim.
struct ComponentMoments {
  double e_h;        // E[h(m)]         (objective)
  double e_dh;       // E[h'(m)]        (gradient in b / mean part)
  double e_dh_cm;    // E[h'(m)(m-Em)]  (covariance part)
};

template <typename Value, typename Grad>
ComponentMoments margin_moments(double mean_m, double sd_m, int order,
                                Value&& value, Grad&& grad) {
  const GaussHermite& gh = gauss_hermite(order);
  ComponentMoments mom{0.0, 0.0, 0.0};
  const double norm = 1.0 / std::sqrt(kPi);
  for (std::size_t k = 0; k < gh.nodes.size(); ++k) {
    const double dm = kSqrt2 * sd_m * gh.nodes[k];
    const double m = mean_m + dm;
    const double wgt = norm * gh.weights[k];
    mom.e_h += wgt * value(m);
    const double g = grad(m);
    mom.e_dh += wgt * g;
    mom.e_dh_cm += wgt * g * dm;
  }
  return mom;
}

template <typename Body>
void for_each_component(const Task& task, Body&& body) {
  const double class_weight[2] = {1.0 - task.pi, task.pi};
  for (int y = 0; y <= 1; ++y) {
    const GaussianMixture& mix = y == 1 ? task.minority : task.majority;
    for (int i = 0; i < mix.components(); ++i)
      body(y, class_weight[y] * mix.weights()[i], mix.mean(i),
           mix.covariance(i));
  }
}

}  // namespace

double population_objective(const Task& task, const LinearClassifier& clf,
                            int order) {
  double total = 0.0;
  for_each_component(task, [&](int y, double weight, const Eigen::VectorXd& mu,
                               const Eigen::MatrixXd& cov) {
    const double mean_m = clf.w.dot(mu) + clf.b;
    const double sd_m = std::sqrt(std::max(0.0, clf.w.dot(cov * clf.w)));
    if (sd_m < 1e-300) {
      total += weight * train_margin_value(task.loss, y, mean_m);
      return;
    }
    const ComponentMoments mom = margin_moments(
        mean_m, sd_m, order,
        [&](double m) { return train_margin_value(task.loss, y, m); },
        [&](double m) { return train_margin_grad(task.loss, y, m); });
    total += weight * mom.e_h;
  });
  return total;
}

void population_gradient(const Task& task, const LinearClassifier& clf,
                         int order, Eigen::VectorXd& grad_w, double& grad_b) {
  grad_w = Eigen::VectorXd::Zero(clf.w.size());
  grad_b = 0.0;
  for_each_component(task, [&](int y, double weight, const Eigen::VectorXd& mu,
                               const Eigen::MatrixXd& cov) {
    const double mean_m = clf.w.dot(mu) + clf.b;
    const double var_m = std::max(0.0, clf.w.dot(cov * clf.w));
    const double sd_m = std::sqrt(var_m);
    if (sd_m < 1e-300) {
      const double g = train_margin_grad(task.loss, y, mean_m);
      grad_w += weight * g * mu;
      grad_b += weight * g;
      return;
    }
    const ComponentMoments mom = margin_moments(
        mean_m, sd_m, order,
        [&](double m) { return train_margin_value(task.loss, y, m); },
        [&](double m) { return train_margin_grad(task.loss, y, m); });
    grad_w += weight * (mom.e_dh * mu + (mom.e_dh_cm / var_m) * (cov * clf.w));
    grad_b += weight * mom.e_dh;
  });
}

TrainResult fit_linear_population(const Task& task, const TrainConfig& cfg) {
  if (!(cfg.lr > 0.0)) throw DomainError("fit_linear: lr must be > 0");
  if (cfg.epochs < 1) throw DomainError("fit_linear: epochs must be >= 1");
  const int d = task.minority.dim();
  TrainResult result;
  apply_init(cfg, d, task.pi, result.classifier);
  Eigen::VectorXd vw = Eigen::VectorXd::Zero(d);
  double vb = 0.0;
  Eigen::VectorXd grad_w;
  double grad_b = 0.0;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    population_gradient(task, result.classifier, cfg.quadrature_order,
                        grad_w, grad_b);
    vw = cfg.momentum * vw - cfg.lr * grad_w;
    vb = cfg.momentum * vb - cfg.lr * grad_b;
    result.classifier.w += vw;
    result.classifier.b += vb;
    const double objective =
        population_objective(task, result.classifier, cfg.quadrature_order);
    check_divergence(objective, cfg, epoch);
    result.loss_trace.push_back(objective);
    const double gn = std::sqrt(grad_w.squaredNorm() + grad_b * grad_b);
    if (cfg.grad_tol > 0.0 && gn < cfg.grad_tol) break;
  }
  population_gradient(task, result.classifier, cfg.quadrature_order, grad_w,
                      grad_b);
  result.grad_norm_final =
      std::sqrt(grad_w.squaredNorm() + grad_b * grad_b);
  return result;
}

std::vector<Eigen::Vector2d> decision_boundary_2d(const LinearClassifier& clf,
                                                  double lo, double hi,
                                                  int n_points) {
  if (clf.w.size() != 2)
    throw DomainError("decision_boundary_2d needs a 2-D classifier");
  if (clf.w.norm() == 0.0)
    throw DomainError("decision_boundary_2d: w = 0 has no boundary");
  if (n_points < 2) throw DomainError("need at least two boundary points");
  // Parametrize by the coordinate with the smaller |w| component; the line
  // extends along that axis.
  const int free_axis = std::abs(clf.w(0)) < std::abs(clf.w(1)) ? 0 : 1;
  const int solved_axis = 1 - free_axis;
  std::vector<Eigen::Vector2d> points;
  points.reserve(static_cast<std::size_t>(n_points));
  for (int i = 0; i < n_points; ++i) {
    const double t = lo + (hi - lo) * i / (n_points - 1);
    Eigen::Vector2d p;
    p(free_axis) = t;
    p(solved_axis) = -(clf.b + clf.w(free_axis) * t) / clf.w(solved_axis);
    points.push_back(p);
  }
  return points;
}

}  // namespace uic
