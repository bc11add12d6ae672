#include <cmath>
#include <vector>

#include "doctest.h"
#include "uic/errors.hpp"
#include "uic/limits.hpp"
#include "uic/math.hpp"
#include "uic/train.hpp"

using namespace uic;

namespace {

Eigen::VectorXd vec1(double x) {
  Eigen::VectorXd v(1);
  v << x;
  return v;
}

Task balanced_1d_task(LossSpec loss = LossSpec::CrossEntropy()) {
  return Task(0.5,
              GaussianMixture::Single(vec1(1.0),
                                      Eigen::MatrixXd::Identity(1, 1)),
              GaussianMixture::Single(vec1(-1.0),
                                      Eigen::MatrixXd::Identity(1, 1)),
              loss);
}

template <typename F>
double central_diff(F&& f, double x, double h) {
  return (f(x + h) - f(x - h)) / (2.0 * h);
}

}  // namespace

TEST_CASE("balanced symmetric data trains to a centered boundary") {
  const Task task = balanced_1d_task();
  const Dataset data = sample_dataset(task, 20000, 3);
  TrainConfig cfg;
  cfg.epochs = 120;
  cfg.seed = 3;
  const TrainResult r = fit_linear(data, LossSpec::CrossEntropy(), cfg);
  CHECK(std::abs(r.classifier.b) < 0.05);
  CHECK(r.classifier.w(0) > 0.0);
}

TEST_CASE("training is deterministic in the config seed") {
  const Task task = balanced_1d_task();
  const Dataset data = sample_dataset(task, 4000, 1);
  TrainConfig cfg;
  cfg.epochs = 20;
  cfg.seed = 5;
  const TrainResult a = fit_linear(data, LossSpec::Focal(2.0), cfg);
  const TrainResult b = fit_linear(data, LossSpec::Focal(2.0), cfg);
  CHECK(a.classifier.w(0) == b.classifier.w(0));
  CHECK(a.classifier.b == b.classifier.b);
  CHECK(a.loss_trace == b.loss_trace);
  cfg.seed = 6;
  const TrainResult c = fit_linear(data, LossSpec::Focal(2.0), cfg);
  CHECK(a.classifier.w(0) != c.classifier.w(0));
}

TEST_CASE("full-batch descent with a small step is monotone") {
  const Task task = balanced_1d_task();
  const Dataset data = sample_dataset(task, 2000, 9);
  TrainConfig cfg;
  cfg.optimizer = Optimizer::kFullBatchGd;
  cfg.lr = 0.01;
  cfg.momentum = 0.0;
  cfg.epochs = 200;
  const TrainResult r = fit_linear(data, LossSpec::CrossEntropy(), cfg);
  for (std::size_t i = 1; i < r.loss_trace.size(); ++i)
    CHECK(r.loss_trace[i] <= r.loss_trace[i - 1] + 1e-12);
}

TEST_CASE("full-batch gradient equals the mean per-sample margin gradient") {
  const Task task = balanced_1d_task();
  const Dataset data = sample_dataset(task, 512, 11);
  for (const LossSpec& spec :
       {LossSpec::CrossEntropy(), LossSpec::Square(), LossSpec::Alpha(0.5),
        LossSpec::VectorScaling(0.5)}) {
    LinearClassifier clf{vec1(0.3), -0.2};
    Eigen::VectorXd grad_w;
    double grad_b;
    empirical_gradient(data, spec, clf, grad_w, grad_b);
    // finite differences of the empirical objective
    const double fd_w = central_diff(
        [&](double w) {
          LinearClassifier c{vec1(w), clf.b};
          return empirical_objective(data, spec, c);
        },
        clf.w(0), 1e-6);
    const double fd_b = central_diff(
        [&](double b) {
          LinearClassifier c{clf.w, b};
          return empirical_objective(data, spec, c);
        },
        clf.b, 1e-6);
    CHECK(std::abs(grad_w(0) - fd_w) / (1.0 + std::abs(fd_w)) < 1e-5);
    CHECK(std::abs(grad_b - fd_b) / (1.0 + std::abs(fd_b)) < 1e-5);
    // and the gradient is the mean of per-sample margin gradients
    double mean_g = 0.0;
    for (Eigen::Index i = 0; i < data.size(); ++i)
      mean_g +=
          train_margin_grad(spec, data.y(i), clf.margin(data.x.row(i).transpose()));
    mean_g /= static_cast<double>(data.size());
    CHECK(grad_b == doctest::Approx(mean_g).epsilon(1e-12));
  }
}

TEST_CASE("logit-adjusted init equals logit-adjusted loss training") {
  // Training CE from b0 = logit(pi-hat) and calibrating by subtracting b0
  // matches an independent trainer of the shifted objective
  // mean CE(y, sigmoid(m + b0)) started at zero. Full-batch trajectories are
  // identical up to rounding, so boundaries agree far inside the tolerance.
  const Task task = Task(
      0.2, GaussianMixture::Single(vec1(1.0), Eigen::MatrixXd::Identity(1, 1)),
      GaussianMixture::Single(vec1(-1.0), Eigen::MatrixXd::Identity(1, 1)),
      LossSpec::CrossEntropy());
  const Dataset data = sample_dataset(task, 2000, 21);
  const double pos_fraction =
      static_cast<double>(data.y.sum()) / static_cast<double>(data.size());
  const double b0 = std::log(pos_fraction) - std::log1p(-pos_fraction);

  TrainConfig cfg;
  cfg.optimizer = Optimizer::kFullBatchGd;
  cfg.lr = 0.1;
  cfg.momentum = 0.0;
  cfg.epochs = 400;
  cfg.init = InitScheme::kLogitAdjusted;
  const TrainResult adjusted = fit_linear(data, LossSpec::CrossEntropy(), cfg);

  // independent oracle: gradient descent on the bias-shifted objective
  double w = 0.0, b = 0.0;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    double gw = 0.0, gb = 0.0;
    for (Eigen::Index i = 0; i < data.size(); ++i) {
      const double m = w * data.x(i, 0) + b + b0;
      const double g = sigmoid(m) - data.y(i);  // d/dm CE(y, sigmoid(m))
      gw += g * data.x(i, 0);
      gb += g;
    }
    w -= cfg.lr * gw / static_cast<double>(data.size());
    b -= cfg.lr * gb / static_cast<double>(data.size());
  }

  const double calibrated_b = adjusted.classifier.b - b0;
  const double angle =
      std::abs(std::atan(adjusted.classifier.w(0)) - std::atan(w)) * 180.0 /
      kPi;
  CHECK(angle < 1.0);
  CHECK(std::abs(calibrated_b - b) < 1e-2);
}

TEST_CASE("population fit agrees with a large empirical fit") {
  const Task task = Task(
      0.1, GaussianMixture::Single(vec1(1.5), Eigen::MatrixXd::Identity(1, 1)),
      GaussianMixture::Single(vec1(-1.5), Eigen::MatrixXd::Identity(1, 1)),
      LossSpec::CrossEntropy());
  TrainConfig pop_cfg;
  pop_cfg.optimizer = Optimizer::kFullBatchGd;
  pop_cfg.lr = 0.5;
  pop_cfg.momentum = 0.9;
  pop_cfg.epochs = 4000;
  pop_cfg.grad_tol = 1e-12;
  const TrainResult population = fit_linear_population(task, pop_cfg);

  const Dataset data = sample_dataset(task, 1000000, 33);
  TrainConfig emp_cfg = pop_cfg;
  emp_cfg.epochs = 3000;
  const TrainResult empirical =
      fit_linear(data, LossSpec::CrossEntropy(), emp_cfg);

  const double angle = std::abs(std::atan(population.classifier.w(0)) -
                                std::atan(empirical.classifier.w(0))) *
                       180.0 / kPi;
  CHECK(angle < 1.0);
  CHECK(std::abs(population.classifier.b - empirical.classifier.b) < 0.05);
}

TEST_CASE("divergence guard aborts loudly") {
  const Task task = balanced_1d_task(LossSpec::Alpha(0.3));
  const Dataset data = sample_dataset(task, 500, 2);
  TrainConfig cfg;
  cfg.lr = 1e6;
  cfg.epochs = 50;
  CHECK_THROWS_AS(fit_linear(data, LossSpec::Alpha(0.3), cfg),
                  NumericalError);
}

TEST_CASE("decision boundary points") {
  LinearClassifier vertical{Eigen::VectorXd(2), -2.0};
  vertical.w << 1.0, 0.0;
  const auto pts = decision_boundary_2d(vertical, -5.0, 5.0, 11);
  REQUIRE(pts.size() == 11);
  for (const Eigen::Vector2d& p : pts) CHECK(p(0) == doctest::Approx(2.0));
  CHECK(pts.front()(1) == doctest::Approx(-5.0));
  CHECK(pts.back()(1) == doctest::Approx(5.0));

  LinearClassifier diag{Eigen::VectorXd(2), 0.0};
  diag.w << 1.0, 1.0;
  for (const Eigen::Vector2d& p : decision_boundary_2d(diag, -3.0, 3.0))
    CHECK(p(1) == doctest::Approx(-p(0)).epsilon(1e-12));

  LinearClassifier tilted{Eigen::VectorXd(2), 0.7};
  tilted.w << 0.3, -1.1;
  for (const Eigen::Vector2d& p : decision_boundary_2d(tilted, -4.0, 4.0))
    CHECK(std::abs(tilted.w.dot(p) + tilted.b) < 1e-9);

  LinearClassifier zero{Eigen::VectorXd::Zero(2), 1.0};
  CHECK_THROWS_AS(decision_boundary_2d(zero, -1.0, 1.0), DomainError);
}

TEST_CASE("fig-1 style task: alpha hugs the minority spread, ce does not") {
  // One anisotropic minority cluster (long axis at 45 degrees) against an
  // isotropic majority; 200 vs 20000 samples. The alpha(1/2) boundary line
  // rotates toward the minority principal axis.
  Eigen::MatrixXd cov_p(2, 2);
  cov_p << 2.75, 2.25, 2.25, 2.75;
  Eigen::VectorXd mp(2), mq(2);
  mp << -2.0, 0.0;
  mq << 2.0, 0.0;
  const Task task(1.0 / 101.0, GaussianMixture::Single(mp, cov_p),
                  GaussianMixture::Single(mq, Eigen::MatrixXd::Identity(2, 2)),
                  LossSpec::CrossEntropy());
  const Dataset data = sample_fixed_counts(task, 200, 20000, 1);

  TrainConfig cfg;
  cfg.epochs = 80;
  cfg.seed = 1;
  const TrainResult ce = fit_linear(data, LossSpec::CrossEntropy(), cfg);
  const TrainResult alpha = fit_linear(data, LossSpec::Alpha(0.5), cfg);

  CHECK(line_angle_deg(ce.classifier.w, alpha.classifier.w) > 10.0);

  const Eigen::Vector2d lead(std::sqrt(0.5), std::sqrt(0.5));
  const Eigen::Vector2d dir_ce(-ce.classifier.w(1), ce.classifier.w(0));
  const Eigen::Vector2d dir_alpha(-alpha.classifier.w(1),
                                  alpha.classifier.w(0));
  const double proj_ce =
      std::abs(dir_ce.normalized().dot(lead));
  const double proj_alpha =
      std::abs(dir_alpha.normalized().dot(lead));
  CHECK(proj_alpha > proj_ce);
}

TEST_CASE("population square fit recovers the exact least-squares solution") {
  // the population objective for the square family is a quadratic whose
  // minimizer is Cov(x)^{-1} Cov(x, y_pm)
  Eigen::VectorXd mp(2), mq(2);
  mp << -1.0, 0.5;
  mq << 1.5, -0.5;
  const double pi = 0.05;
  const Task task(pi, GaussianMixture::Single(mp, Eigen::MatrixXd::Identity(2, 2)),
                  GaussianMixture::Single(mq, Eigen::MatrixXd::Identity(2, 2)),
                  LossSpec::Square());
  TrainConfig cfg;
  cfg.optimizer = Optimizer::kFullBatchGd;
  cfg.lr = 0.1;
  cfg.momentum = 0.9;
  cfg.epochs = 3000;
  cfg.grad_tol = 1e-14;
  const TrainResult r = fit_linear_population(task, cfg);

  const Eigen::VectorXd mean = pi * mp + (1.0 - pi) * mq;
  Eigen::MatrixXd cov = Eigen::MatrixXd::Identity(2, 2);
  cov += pi * (mp - mean) * (mp - mean).transpose() +
         (1.0 - pi) * (mq - mean) * (mq - mean).transpose();
  const double ey = 2.0 * pi - 1.0;
  const Eigen::VectorXd cov_xy =
      pi * (mp - mean) * (1.0 - ey) + (1.0 - pi) * (mq - mean) * (-1.0 - ey);
  const Eigen::VectorXd w_star = cov.ldlt().solve(cov_xy);
  CHECK((r.classifier.w - w_star).norm() < 1e-8);
  CHECK(r.classifier.b ==
        doctest::Approx(ey - w_star.dot(mean)).epsilon(1e-7));
}
