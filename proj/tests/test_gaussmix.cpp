#include <algorithm>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "uic/errors.hpp"
#include "uic/gaussmix.hpp"
#include "uic/math.hpp"

using namespace uic;

namespace {

Eigen::VectorXd vec1(double x) {
  Eigen::VectorXd v(1);
  v << x;
  return v;
}

GaussianMixture std_normal_1d() {
  return GaussianMixture::Single(vec1(0.0), Eigen::MatrixXd::Identity(1, 1));
}

Task two_gaussian_task(double pi, double mu_p, double mu_q,
                       LossSpec loss = LossSpec::CrossEntropy()) {
  return Task(pi,
              GaussianMixture::Single(vec1(mu_p),
                                      Eigen::MatrixXd::Identity(1, 1)),
              GaussianMixture::Single(vec1(mu_q),
                                      Eigen::MatrixXd::Identity(1, 1)),
              loss);
}

}  // namespace

TEST_CASE("construction validates weights and covariances") {
  CHECK_THROWS_AS(GaussianMixture({0.6, 0.6}, {vec1(0.0), vec1(1.0)},
                                  {Eigen::MatrixXd::Identity(1, 1),
                                   Eigen::MatrixXd::Identity(1, 1)}),
                  DomainError);
  CHECK_THROWS_AS(GaussianMixture({-0.5, 1.5}, {vec1(0.0), vec1(1.0)},
                                  {Eigen::MatrixXd::Identity(1, 1),
                                   Eigen::MatrixXd::Identity(1, 1)}),
                  DomainError);
  Eigen::MatrixXd bad(2, 2);
  bad << 1.0, 2.0, 2.0, 1.0;  // eigenvalues -1 and 3
  CHECK_THROWS_AS(
      GaussianMixture::Single(Eigen::VectorXd::Zero(2), bad), DomainError);
  Eigen::MatrixXd asym(2, 2);
  asym << 1.0, 0.5, -0.5, 1.0;
  CHECK_THROWS_AS(
      GaussianMixture::Single(Eigen::VectorXd::Zero(2), asym), DomainError);
}

TEST_CASE("density reference values") {
  CHECK(std_normal_1d().density(vec1(0.0)) ==
        doctest::Approx(kInvSqrt2Pi).epsilon(1e-14));
  const GaussianMixture two(
      {0.5, 0.5}, {vec1(1.0), vec1(-1.0)},
      {Eigen::MatrixXd::Identity(1, 1), Eigen::MatrixXd::Identity(1, 1)});
  CHECK(two.density(vec1(0.0)) ==
        doctest::Approx(std::exp(-0.5) * kInvSqrt2Pi).epsilon(1e-14));
  CHECK_THROWS_AS(two.density(Eigen::VectorXd::Zero(2)), DomainError);
}

TEST_CASE("density integrates to one") {
  const GaussianMixture mix(
      {0.3, 0.7}, {vec1(-1.5), vec1(2.0)},
      {0.25 * Eigen::MatrixXd::Identity(1, 1),
       4.0 * Eigen::MatrixXd::Identity(1, 1)});
  double integral = 0.0;
  const double h = 1e-3;
  for (double x = -14.0; x <= 14.0; x += h)
    integral += mix.density(vec1(x)) * h;
  CHECK(integral == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("total covariance adds between-cluster scatter") {
  const GaussianMixture mix(
      {0.5, 0.5}, {vec1(2.0), vec1(-2.0)},
      {Eigen::MatrixXd::Identity(1, 1), Eigen::MatrixXd::Identity(1, 1)});
  CHECK(mix.total_covariance()(0, 0) == doctest::Approx(5.0).epsilon(1e-12));
  CHECK(mix.mixture_mean()(0) == doctest::Approx(0.0));
}

TEST_CASE("posterior at symmetric points and priors") {
  const Task task = two_gaussian_task(0.5, 2.0, -2.0);
  CHECK(posterior_eta(task, vec1(0.0)) == doctest::Approx(0.5).epsilon(1e-12));
  // eta shrinks linearly in pi at a fixed point
  const Task t6 = two_gaussian_task(1e-6, 2.0, -2.0);
  const Task t7 = two_gaussian_task(1e-7, 2.0, -2.0);
  const double r =
      posterior_eta(t6, vec1(0.3)) / posterior_eta(t7, vec1(0.3));
  CHECK(r == doctest::Approx(10.0).epsilon(0.01));
}

TEST_CASE("posterior matches a hand computation on the two-cluster config") {
  // means (+-2, +-2); minority covariances diag(0.5, 5) / diag(5, 0.5);
  // majority identity; pi = 1/501; x = (0, 0).
  Eigen::VectorXd mp1(2), mp2(2), mm1(2), mm2(2);
  mp1 << -2.0, 2.0;
  mp2 << -2.0, -2.0;
  mm1 << 2.0, 2.0;
  mm2 << 2.0, -2.0;
  Eigen::MatrixXd cp1(2, 2), cp2(2, 2);
  cp1 << 0.5, 0.0, 0.0, 5.0;
  cp2 << 5.0, 0.0, 0.0, 0.5;
  const GaussianMixture minority({0.5, 0.5}, {mp1, mp2}, {cp1, cp2});
  const GaussianMixture majority(
      {0.5, 0.5}, {mm1, mm2},
      {Eigen::MatrixXd::Identity(2, 2), Eigen::MatrixXd::Identity(2, 2)});
  const double pi = 1.0 / 501.0;
  const Task task(pi, minority, majority, LossSpec::CrossEntropy());

  // direct component-density arithmetic, independent of the library path
  auto comp = [](double det, double quad) {
    return std::exp(-0.5 * quad) / (2.0 * kPi * std::sqrt(det));
  };
  // both minority components have quad form 4/0.5 + 4/5 at the origin
  const double p = 0.5 * comp(2.5, 4.0 / 0.5 + 4.0 / 5.0) * 2.0;
  const double q = 0.5 * comp(1.0, 8.0) * 2.0;  // majority quad form 4 + 4
  const double expected = pi * p / (pi * p + (1.0 - pi) * q);
  CHECK(posterior_eta(task, Eigen::Vector2d(0.0, 0.0)) ==
        doctest::Approx(expected).epsilon(1e-10));
}

TEST_CASE("posterior odds equal rho times the density ratio") {
  const Task task = two_gaussian_task(0.01, 1.0, -1.0);
  for (double x : {-2.0, -0.5, 0.0, 1.3, 3.0}) {
    const double eta = posterior_eta(task, vec1(x));
    const double lhs = std::log(eta / (1.0 - eta));
    const double rhs = std::log(task.rho) +
                       task.minority.log_density(vec1(x)) -
                       task.majority.log_density(vec1(x));
    CHECK(std::abs(lhs - rhs) < 1e-10);
  }
}

TEST_CASE("sampling is reproducible and respects fixed counts") {
  const Task task = two_gaussian_task(0.3, 2.0, -2.0);
  const auto a = sample(task, 500, 42);
  const auto b = sample(task, 500, 42);
  const auto c = sample(task, 500, 43);
  REQUIRE(a.size() == 500);
  bool identical = true, differs = false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    identical = identical && a[i].x == b[i].x && a[i].y == b[i].y;
    differs = differs || a[i].x != c[i].x;
  }
  CHECK(identical);
  CHECK(differs);

  const Dataset d = sample_fixed_counts(task, 200, 1000, 7);
  CHECK(d.size() == 1200);
  CHECK(d.y.head(200).sum() == 200);
  CHECK(d.y.tail(1000).sum() == 0);
}

TEST_CASE("sample mean obeys the clt bound") {
  Eigen::VectorXd mu(2);
  mu << 1.5, -0.5;
  const Task task(0.5, GaussianMixture::Single(mu, Eigen::MatrixXd::Identity(2, 2)),
                  GaussianMixture::Single(mu, Eigen::MatrixXd::Identity(2, 2)),
                  LossSpec::CrossEntropy());
  const std::size_t n = 1000000;
  const Dataset d = sample_dataset(task, n, 5);
  const Eigen::VectorXd mean = d.x.colwise().mean();
  const double bound = 4.0 / std::sqrt(static_cast<double>(n));
  CHECK(std::abs(mean(0) - 1.5) < bound);
  CHECK(std::abs(mean(1) + 0.5) < bound);
}

TEST_CASE("kolmogorov-smirnov agreement between samples and the cdf") {
  const GaussianMixture mix(
      {0.4, 0.6}, {vec1(-2.0), vec1(1.0)},
      {Eigen::MatrixXd::Identity(1, 1),
       0.25 * Eigen::MatrixXd::Identity(1, 1)});
  const Task task(0.5, mix, mix, LossSpec::CrossEntropy());
  const std::size_t n = 100000;
  std::vector<double> xs;
  xs.reserve(n);
  for (const LabeledSample& s : sample(task, n, 9)) xs.push_back(s.x(0));
  std::sort(xs.begin(), xs.end());
  double ks = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double cdf = mix.cdf1d(xs[i]);
    ks = std::max(ks, std::abs(cdf - static_cast<double>(i) / n));
    ks = std::max(ks, std::abs(cdf - static_cast<double>(i + 1) / n));
  }
  CHECK(ks < 0.01);
}

TEST_CASE("population risk of the constant predictor is log 2") {
  const Task task = two_gaussian_task(0.01, 2.0, -2.0);
  LinearClassifier clf{Eigen::VectorXd::Zero(1), 0.0};
  const RiskEstimate quad =
      population_risk(task, clf, RiskMethod::kQuadrature);
  CHECK(quad.value == doctest::Approx(std::log(2.0)).epsilon(1e-12));
  const RiskEstimate mc =
      population_risk(task, clf, RiskMethod::kMonteCarlo, 2000, 3);
  CHECK(mc.value == doctest::Approx(std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("quadrature and monte carlo risks agree within 3 se") {
  const Task task = two_gaussian_task(0.2, 1.0, -1.0, LossSpec::Square());
  LinearClassifier clf{vec1(0.8), -0.1};
  const RiskEstimate quad =
      population_risk(task, clf, RiskMethod::kQuadrature);
  const RiskEstimate mc =
      population_risk(task, clf, RiskMethod::kMonteCarlo, 1000000, 17);
  CHECK(std::abs(quad.value - mc.value) < 3.0 * mc.std_error);
  CHECK(quad.std_error < 1e-10);
}

TEST_CASE("risk is invariant under component permutation") {
  Eigen::VectorXd m1(1), m2(1);
  m1 << -1.0;
  m2 << 2.0;
  const GaussianMixture a({0.3, 0.7}, {m1, m2},
                          {Eigen::MatrixXd::Identity(1, 1),
                           4.0 * Eigen::MatrixXd::Identity(1, 1)});
  const GaussianMixture b({0.7, 0.3}, {m2, m1},
                          {4.0 * Eigen::MatrixXd::Identity(1, 1),
                           Eigen::MatrixXd::Identity(1, 1)});
  const GaussianMixture q = std_normal_1d();
  const Task ta(0.1, a, q, LossSpec::CrossEntropy());
  const Task tb(0.1, b, q, LossSpec::CrossEntropy());
  LinearClassifier clf{vec1(0.5), 0.2};
  const double ra = population_risk(ta, clf, RiskMethod::kQuadrature).value;
  const double rb = population_risk(tb, clf, RiskMethod::kQuadrature).value;
  CHECK(ra == doctest::Approx(rb).epsilon(1e-12));
}

TEST_CASE("quadrature rejects high dimensions; monte carlo does not") {
  const GaussianMixture g3 = GaussianMixture::Single(
      Eigen::VectorXd::Zero(3), Eigen::MatrixXd::Identity(3, 3));
  const Task task(0.2, g3, g3, LossSpec::CrossEntropy());
  LinearClassifier clf{Eigen::VectorXd::Ones(3), 0.0};
  CHECK_THROWS_AS(population_risk(task, clf, RiskMethod::kQuadrature),
                  DomainError);
  CHECK_NOTHROW(population_risk(task, clf, RiskMethod::kMonteCarlo, 2000, 1));
}

TEST_CASE("mixture auc matches the closed two-gaussian form") {
  Eigen::VectorXd mp(2), mq(2);
  mp << 2.0, 0.0;
  mq << 0.0, 0.0;
  const GaussianMixture p =
      GaussianMixture::Single(mp, Eigen::MatrixXd::Identity(2, 2));
  const GaussianMixture q =
      GaussianMixture::Single(mq, Eigen::MatrixXd::Identity(2, 2));
  Eigen::VectorXd w(2);
  w << 1.0, 0.0;
  // score gap w'(x+ - x-) ~ N(2, 2), so the AUC is Psi(sqrt(2)) = 0.9214
  // (Monte Carlo over 2e6 pairs gives 0.9220 +- 9e-4)
  CHECK(mixture_auc(p, q, w) ==
        doctest::Approx(normal_cdf(std::sqrt(2.0))).epsilon(1e-12));
  CHECK(mixture_auc(p, q, Eigen::VectorXd::Zero(2)) == 0.5);
}
