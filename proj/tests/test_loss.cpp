#include <cmath>
#include <vector>

#include "doctest.h"
#include "uic/errors.hpp"
#include "uic/loss.hpp"
#include "uic/math.hpp"

using namespace uic;

namespace {

// Independent central-difference oracle for gradients.
template <typename F>
double central_diff(F&& f, double x, double h) {
  return (f(x + h) - f(x - h)) / (2.0 * h);
}

std::vector<LossSpec> all_family_specs() {
  return {LossSpec::CrossEntropy(),
          LossSpec::Square(),
          LossSpec::Erf(),
          LossSpec::Focal(2.0),
          LossSpec::Poly(1.0),
          LossSpec::VectorScaling(0.5),
          LossSpec::Alpha(0.5),
          LossSpec::TunableBoosting(0.8, 0.5)};
}

// Grid of hyperparameter settings across the parametric families.
std::vector<LossSpec> hyper_grid() {
  std::vector<LossSpec> specs = {LossSpec::CrossEntropy(), LossSpec::Square(),
                                 LossSpec::Erf()};
  for (double g : {0.0, 0.5, 1.0, 2.0, 5.0}) specs.push_back(LossSpec::Focal(g));
  for (double e : {-0.75, -0.25, 0.25, 1.0, 1.5})
    specs.push_back(LossSpec::Poly(e));
  for (double d : {0.1, 0.3, 0.5, 0.8, 1.0})
    specs.push_back(LossSpec::VectorScaling(d));
  for (double a : {0.3, 0.5, 0.7, 0.9, 0.999})
    specs.push_back(LossSpec::Alpha(a));
  for (double c : {0.0, 0.25, 0.5, 1.0})
    specs.push_back(LossSpec::TunableBoosting(0.8, c));
  return specs;
}

}  // namespace

TEST_CASE("math kernel basics") {
  CHECK(normal_cdf(0.0) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(normal_pdf(0.0) == doctest::Approx(kInvSqrt2Pi).epsilon(1e-14));
  double prev = -1.0;
  for (double x = -8.0; x <= 8.0; x += 0.25) {
    CHECK(normal_cdf(x) >= prev);
    prev = normal_cdf(x);
  }
  // double-precision agreement with the erf identity
  CHECK(normal_cdf(1.0) == doctest::Approx(0.84134474606854293).epsilon(1e-12));
}

TEST_CASE("loss values at reference points") {
  CHECK(loss_value(LossSpec::CrossEntropy(), 1, 0.5) ==
        doctest::Approx(std::log(2.0)).epsilon(1e-14));
  // alpha(1/2): l(1, p) = 1/p - 1
  CHECK(loss_value(LossSpec::Alpha(0.5), 1, 0.5) ==
        doctest::Approx(1.0).epsilon(1e-14));
  CHECK(loss_value(LossSpec::Focal(2.0), 1, 1.0) < 1e-20);
  CHECK(loss_value(LossSpec::Square(), 1, 0.25) ==
        doctest::Approx(0.5625).epsilon(1e-14));
}

TEST_CASE("tbl with C=0 is the alpha loss bit for bit") {
  for (double a : {0.3, 0.5, 0.8, 1.0}) {
    const LossSpec tbl = LossSpec::TunableBoosting(a, 0.0);
    const LossSpec alpha = LossSpec::Alpha(a);
    for (int y : {0, 1})
      for (double p = 0.0; p <= 1.0; p += 0.01) {
        CHECK(loss_value(tbl, y, p) == loss_value(alpha, y, p));
        CHECK(loss_grad(tbl, y, p) == loss_grad(alpha, y, p));
        CHECK(loss_hess(tbl, y, p) == loss_hess(alpha, y, p));
      }
  }
}

TEST_CASE("reference gradients") {
  CHECK(loss_grad(LossSpec::Square(), 1, 0.5) ==
        doctest::Approx(-1.0).epsilon(1e-14));
  CHECK(loss_grad(LossSpec::CrossEntropy(), 0, 0.5) ==
        doctest::Approx(2.0).epsilon(1e-14));
  const LossSpec focal = LossSpec::Focal(1.0);
  const double fd = central_diff(
      [&](double p) { return loss_value(focal, 1, p); }, 0.7, 1e-6);
  CHECK(loss_grad(focal, 1, 0.7) == doctest::Approx(fd).epsilon(1e-6));
}

TEST_CASE("analytic gradients match finite differences everywhere") {
  for (const LossSpec& spec : hyper_grid()) {
    for (int y : {0, 1}) {
      for (double p = 0.01; p < 0.995; p += 0.02) {
        const double analytic = loss_grad(spec, y, p);
        const double fd = central_diff(
            [&](double q) { return loss_value(spec, y, q); }, p, 1e-6);
        CHECK_MESSAGE(
            std::abs(analytic - fd) / (1.0 + std::abs(analytic)) < 1e-5,
            spec.label(), " y=", y, " p=", p);
      }
    }
  }
}

TEST_CASE("analytic hessians match finite differences of gradients") {
  for (const LossSpec& spec : hyper_grid()) {
    for (int y : {0, 1}) {
      for (double p = 0.05; p < 0.96; p += 0.05) {
        const double analytic = loss_hess(spec, y, p);
        const double fd = central_diff(
            [&](double q) { return loss_grad(spec, y, q); }, p, 1e-6);
        CHECK_MESSAGE(
            std::abs(analytic - fd) / (1.0 + std::abs(analytic)) < 1e-5,
            spec.label(), " y=", y, " p=", p);
      }
    }
  }
}

TEST_CASE("symmetry l(1, p) == l(0, 1-p) holds exactly off the vs family") {
  for (const LossSpec& spec : all_family_specs()) {
    if (spec.family == Family::kVectorScaling) continue;
    for (int k = 1; k < 64; ++k) {
      const double p = k / 64.0;  // dyadic so 1-p is exact
      CHECK(loss_value(spec, 1, p) == loss_value(spec, 0, 1.0 - p));
    }
  }
  // The vs family is asymmetric by construction for delta1 < 1.
  const LossSpec vs = LossSpec::VectorScaling(0.5);
  CHECK(loss_value(vs, 1, 0.25) != loss_value(vs, 0, 0.75));
}

TEST_CASE("alpha loss is continuous into the cross-entropy limit") {
  const LossSpec near_one = LossSpec::Alpha(1.0 - 1e-4);
  const LossSpec ce = LossSpec::CrossEntropy();
  // The exact gap is (1-alpha) log(p)^2 / 2 + O((1-alpha)^2); at the grid
  // edge p = 0.01 that is 1.06e-3, so the uniform bound carries that
  // constant while the interior of the grid stays below 1e-3.
  for (int y : {0, 1})
    for (double p = 0.01; p <= 0.99; p += 0.01) {
      const double gap =
          std::abs(loss_value(near_one, y, p) - loss_value(ce, y, p));
      CHECK(gap < 1.1e-3);
      if (p >= 0.02 && p <= 0.98) CHECK(gap < 1e-3);
    }
  // alpha = 1 is the analytic limit exactly
  CHECK(loss_value(LossSpec::Alpha(1.0), 1, 0.37) ==
        doctest::Approx(-std::log(0.37)).epsilon(1e-15));
}

TEST_CASE("erf loss is a nonnegative cross-entropy proxy") {
  const LossSpec erf = LossSpec::Erf();
  for (int y : {0, 1})
    for (double p = 0.001; p < 1.0; p += 0.001)
      CHECK(loss_value(erf, y, p) >= 0.0);
  // vanishes as the correct-class probability approaches one
  CHECK(loss_value(erf, 1, 1.0 - 1e-9) < 1e-12);
  CHECK(loss_value(erf, 0, 1e-9) < 1e-12);
  // grows like the cross entropy when badly wrong
  CHECK(loss_value(erf, 1, 1e-6) ==
        doctest::Approx(-logit(1e-6)).epsilon(0.01));
}

TEST_CASE("irrelevant hyperparameters do not affect evaluation") {
  LossSpec ce = LossSpec::CrossEntropy();
  ce.gamma = 7.0;
  ce.epsilon = -3.0;
  ce.alpha = 0.123;
  ce.cpen = 9.0;
  for (double p = 0.05; p < 1.0; p += 0.1)
    CHECK(loss_value(ce, 1, p) == loss_value(LossSpec::CrossEntropy(), 1, p));
}

TEST_CASE("domain errors") {
  CHECK_THROWS_AS(loss_value(LossSpec::CrossEntropy(), 1, -0.1), DomainError);
  CHECK_THROWS_AS(loss_value(LossSpec::CrossEntropy(), 1, 1.1), DomainError);
  CHECK_THROWS_AS(loss_value(LossSpec::CrossEntropy(), 2, 0.5), DomainError);
  CHECK_THROWS_AS(loss_value(LossSpec::Focal(-1.0), 1, 0.5), DomainError);
  CHECK_THROWS_AS(loss_value(LossSpec::Alpha(0.0), 1, 0.5), DomainError);
  CHECK_THROWS_AS(loss_value(LossSpec::Alpha(1.5), 1, 0.5), DomainError);
  CHECK_THROWS_AS(loss_value(LossSpec::VectorScaling(0.0), 1, 0.5),
                  DomainError);
  CHECK_THROWS_AS(loss_value(LossSpec::TunableBoosting(0.8, -0.5), 1, 0.5),
                  DomainError);
}

TEST_CASE("pointwise risk") {
  CHECK(pointwise_risk_value(LossSpec::CrossEntropy(), 0.5, 0.5) ==
        doctest::Approx(std::log(2.0)).epsilon(1e-14));
  // square risk at its minimizer equals eta (1 - eta)
  CHECK(pointwise_risk_value(LossSpec::Square(), 0.3, 0.3) ==
        doctest::Approx(0.21).epsilon(1e-14));
  for (const LossSpec& spec : all_family_specs())
    CHECK(pointwise_risk_value(spec, 0.0, 0.37) ==
          loss_value(spec, 0, 0.37));
  const PointwiseRisk r = pointwise_risk(LossSpec::CrossEntropy(), 0.2, 0.6);
  CHECK(r.eta == 0.2);
  CHECK(r.etahat == 0.6);
  CHECK(r.value == doctest::Approx(0.2 * -std::log(0.6) +
                                   0.8 * -std::log(0.4)));
  CHECK_THROWS_AS(pointwise_risk(LossSpec::Square(), -0.2, 0.5), DomainError);
}

TEST_CASE("margin form composes the logistic link") {
  CHECK(margin_loss_value(LossSpec::CrossEntropy(), +1, 0.0) ==
        doctest::Approx(std::log(2.0)).epsilon(1e-14));
  for (const LossSpec& spec : all_family_specs())
    for (double m : {-3.0, -0.5, 0.0, 1.2, 4.0})
      CHECK(margin_loss_value(spec, +1, m) ==
            loss_value(spec, 1, sigmoid(m)));
  // alpha(1/2) in margin form is exactly exp(-margin) for the positive class
  for (double m : {5.0, 10.0}) {
    const double v = margin_loss_value(LossSpec::Alpha(0.5), +1, m);
    CHECK(v / std::exp(-m) == doctest::Approx(1.0).epsilon(1e-6));
  }
}

TEST_CASE("margin losses decrease in the signed margin") {
  for (const LossSpec& spec :
       {LossSpec::CrossEntropy(), LossSpec::Square(), LossSpec::Focal(2.0),
        LossSpec::Alpha(0.5)}) {
    for (int y_pm : {-1, +1}) {
      double prev = std::numeric_limits<double>::infinity();
      for (double s = -6.0; s <= 6.0; s += 0.25) {
        const double v = margin_loss_value(spec, y_pm, y_pm * s);
        CHECK(v <= prev + 1e-12);
        prev = v;
      }
    }
  }
}

TEST_CASE("margin gradients match finite differences") {
  for (const LossSpec& spec : all_family_specs()) {
    for (int y_pm : {-1, +1}) {
      for (double m = -5.0; m <= 5.0; m += 0.5) {
        const double analytic = margin_loss_grad(spec, y_pm, m);
        const double fd = central_diff(
            [&](double mm) { return margin_loss_value(spec, y_pm, mm); }, m,
            1e-6);
        CHECK(std::abs(analytic - fd) / (1.0 + std::abs(analytic)) < 1e-5);
        const double h_analytic = margin_loss_hess(spec, y_pm, m);
        const double h_fd = central_diff(
            [&](double mm) { return margin_loss_grad(spec, y_pm, mm); }, m,
            1e-6);
        CHECK(std::abs(h_analytic - h_fd) / (1.0 + std::abs(h_analytic)) <
              1e-5);
      }
    }
  }
}
