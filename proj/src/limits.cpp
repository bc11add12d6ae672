#include "uic/limits.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "uic/errors.hpp"
#include "uic/math.hpp"

namespace uic {
namespace {

Eigen::VectorXd solve_spd(const Eigen::MatrixXd& m, const Eigen::VectorXd& v,
                          const char* what) {
  Eigen::LDLT<Eigen::MatrixXd> ldlt(m);
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive())
    throw NumericalError(std::string("singular system in ") + what);
  return ldlt.solve(v);
}

Eigen::VectorXd normalized_exp(const Eigen::VectorXd& log_unnorm) {
  const Eigen::VectorXd shifted =
      (log_unnorm.array() - log_unnorm.maxCoeff()).exp();
  return shifted / shifted.sum();
}

// State of the alpha-loss program over the product of simplices.
struct AlphaProgram {
  const Task& task;
  double u;  // 1/alpha - 1
  Eigen::VectorXd log_prior_m, log_prior_p;

  AlphaProgram(const Task& t, double alpha)
      : task(t), u(1.0 / alpha - 1.0) {
    const auto& wm = t.majority.weights();
    const auto& wp = t.minority.weights();
    log_prior_m.resize(wm.size());
    log_prior_p.resize(wp.size());
    for (std::size_t i = 0; i < wm.size(); ++i)
      log_prior_m(static_cast<Eigen::Index>(i)) = std::log(wm[i]);
    for (std::size_t i = 0; i < wp.size(); ++i)
      log_prior_p(static_cast<Eigen::Index>(i)) = std::log(wp[i]);
  }

  Eigen::VectorXd theta(const Eigen::VectorXd& xm,
                        const Eigen::VectorXd& xp) const {
    const int d = task.majority.dim();
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(d, d);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(d);
    for (int i = 0; i < task.majority.components(); ++i) {
      m += xm(i) * task.majority.covariance(i);
      rhs -= xm(i) * task.majority.mean(i);
    }
    for (int i = 0; i < task.minority.components(); ++i) {
      m += u * xp(i) * task.minority.covariance(i);
      rhs += xp(i) * task.minority.mean(i);
    }
    return solve_spd(m, rhs, "alpha limit w-update");
  }

  // Exponential tilts of the component priors at direction w.
  Eigen::VectorXd tilt_minus(const Eigen::VectorXd& w) const {
    Eigen::VectorXd lg(task.majority.components());
    for (int i = 0; i < task.majority.components(); ++i)
      lg(i) = log_prior_m(i) + w.dot(task.majority.mean(i)) +
              0.5 * w.dot(task.majority.covariance(i) * w);
    return normalized_exp(lg);
  }
  Eigen::VectorXd tilt_plus(const Eigen::VectorXd& w) const {
    Eigen::VectorXd lg(task.minority.components());
    for (int i = 0; i < task.minority.components(); ++i)
      lg(i) = log_prior_p(i) - u * w.dot(task.minority.mean(i)) +
              0.5 * u * u * w.dot(task.minority.covariance(i) * w);
    return normalized_exp(lg);
  }

  // Strictly convex objective whose KKT conditions reproduce the tilts:
  //   H(xi) = KL(xi_- | prior_-) + KL(xi_+ | prior_+)/u
  //           - sum xi_-^i a_-^i(theta) - sum xi_+^i a_+^i(theta)/u
  // with a_-^i = theta' mu_-^i + theta' S_-^i theta / 2 and
  // a_+^i = -u theta' mu_+^i + u^2 theta' S_+^i theta / 2, where theta(xi)
  // maximizes the inner expression (it solves the w-equation), so the
  // envelope theorem yields plain partial derivatives.
  double value(const Eigen::VectorXd& xm, const Eigen::VectorXd& xp) const {
    const Eigen::VectorXd th = theta(xm, xp);
    double h = 0.0;
    for (int i = 0; i < xm.size(); ++i) {
      if (xm(i) > 0.0) h += xm(i) * (std::log(xm(i)) - log_prior_m(i));
      h -= xm(i) * (th.dot(task.majority.mean(i)) +
                    0.5 * th.dot(task.majority.covariance(i) * th));
    }
    for (int i = 0; i < xp.size(); ++i) {
      if (xp(i) > 0.0)
        h += xp(i) * (std::log(xp(i)) - log_prior_p(i)) / u;
      h -= xp(i) *
           (-u * th.dot(task.minority.mean(i)) +
            0.5 * u * u * th.dot(task.minority.covariance(i) * th)) /
           u;
    }
    return h;
  }

  void gradient(const Eigen::VectorXd& xm, const Eigen::VectorXd& xp,
                Eigen::VectorXd& gm, Eigen::VectorXd& gp) const {
    const Eigen::VectorXd th = theta(xm, xp);
    gm.resize(xm.size());
    gp.resize(xp.size());
    for (int i = 0; i < xm.size(); ++i)
      gm(i) = std::log(std::max(xm(i), 1e-300)) - log_prior_m(i) + 1.0 -
              th.dot(task.majority.mean(i)) -
              0.5 * th.dot(task.majority.covariance(i) * th);
    for (int i = 0; i < xp.size(); ++i)
      gp(i) = (std::log(std::max(xp(i), 1e-300)) - log_prior_p(i) + 1.0 +
               u * th.dot(task.minority.mean(i)) -
               0.5 * u * u * th.dot(task.minority.covariance(i) * th)) /
              u;
  }

  // Max-norm defect of the fixed-point equations at (xi, w(xi)).
  double defect(const Eigen::VectorXd& xm, const Eigen::VectorXd& xp) const {
    const Eigen::VectorXd th = theta(xm, xp);
    const double dm = (tilt_minus(th) - xm).cwiseAbs().maxCoeff();
    const double dp = (tilt_plus(th) - xp).cwiseAbs().maxCoeff();
    return std::max(dm, dp);
  }
};

Eigen::VectorXd uniform_from(const std::vector<double>& w) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(w.size()));
  for (std::size_t i = 0; i < w.size(); ++i)
    v(static_cast<Eigen::Index>(i)) = w[i];
  return v;
}

LimitResult solve_alpha_fixed_point(const AlphaProgram& prog,
                                    const SolveOptions& opts) {
  Eigen::VectorXd xm = uniform_from(prog.task.majority.weights());
  Eigen::VectorXd xp = uniform_from(prog.task.minority.weights());
  double res = std::numeric_limits<double>::infinity();
  int iter = 0;
  for (; iter < opts.max_iter; ++iter) {
    const Eigen::VectorXd w = prog.theta(xm, xp);
    const Eigen::VectorXd tm = prog.tilt_minus(w);
    const Eigen::VectorXd tp = prog.tilt_plus(w);
    res = std::max((tm - xm).cwiseAbs().maxCoeff(),
                   (tp - xp).cwiseAbs().maxCoeff());
    if (res < opts.tol) break;
    xm = (1.0 - opts.damping) * xm + opts.damping * tm;
    xp = (1.0 - opts.damping) * xp + opts.damping * tp;
  }
  LimitResult out;
  out.weights = {xm, xp};
  out.classifier.w = prog.theta(xm, xp);
  out.converged = res < opts.tol;
  out.iterations = iter;
  out.residual = res;
  return out;
}

LimitResult solve_alpha_projected_gradient(const AlphaProgram& prog,
                                           const SolveOptions& opts) {
  Eigen::VectorXd xm = uniform_from(prog.task.majority.weights());
  Eigen::VectorXd xp = uniform_from(prog.task.minority.weights());
  double h = prog.value(xm, xp);
  double res = std::numeric_limits<double>::infinity();
  int iter = 0;
  Eigen::VectorXd gm, gp;
  for (; iter < opts.max_iter; ++iter) {
    res = prog.defect(xm, xp);
    if (res < opts.tol) break;
    prog.gradient(xm, xp, gm, gp);
    // Entropic mirror step on each simplex with Armijo backtracking.
    double step = opts.step;
    bool accepted = false;
    for (int back = 0; back < 60; ++back) {
      const Eigen::VectorXd nm =
          normalized_exp(xm.array().log().matrix() - step * gm);
      const Eigen::VectorXd np =
          normalized_exp(xp.array().log().matrix() - step * gp);
      const double hn = prog.value(nm, np);
      if (hn <= h + 1e-12) {
        xm = nm;
        xp = np;
        h = hn;
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;  // stalled at numerical precision
  }
  LimitResult out;
  out.weights = {xm, xp};
  out.classifier.w = prog.theta(xm, xp);
  out.converged = res < opts.tol;
  out.iterations = iter;
  out.residual = res;
  return out;
}

}  // namespace

LimitResult limit_square(const Task& task) {
  const Eigen::VectorXd delta =
      task.minority.mixture_mean() - task.majority.mixture_mean();
  LimitResult out;
  out.classifier.w = 2.0 * task.rho *
                     solve_spd(task.majority.total_covariance(), delta,
                               "square limit");
  out.classifier.b = -1.0;
  out.weights.xi_minus = uniform_from(task.majority.weights());
  return out;
}

LimitResult limit_alpha(const Task& task, double alpha, AlphaSolver solver,
                        const SolveOptions& opts) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw DomainError("limit_alpha needs alpha in (0, 1)");
  if (!(task.rho < 1.0))
    throw DomainError("limit_alpha needs imbalance ratio < 1");
  const AlphaProgram prog(task, alpha);
  LimitResult out = solver == AlphaSolver::kFixedPoint
                        ? solve_alpha_fixed_point(prog, opts)
                        : solve_alpha_projected_gradient(prog, opts);
  out.classifier.b = alpha * std::log(task.rho);
  return out;
}

LimitResult limit_erf(const Task& task, const SolveOptions& opts) {
  if (!(task.rho < 1.0))
    throw DomainError("limit_erf needs imbalance ratio < 1");
  const GaussianMixture& maj = task.majority;
  const int k = maj.components();
  Eigen::VectorXd log_prior(k);
  for (int i = 0; i < k; ++i) log_prior(i) = std::log(maj.weights()[i]);

  auto theta_of = [&](const Eigen::VectorXd& xi) {
    const int d = maj.dim();
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(d, d);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(d);
    for (int i = 0; i < k; ++i) {
      m += xi(i) * maj.covariance(i);
      rhs += xi(i) * maj.mean(i);
    }
    return solve_spd(m, rhs, "erf limit theta");
  };
  auto tilt = [&](const Eigen::VectorXd& th) {
    Eigen::VectorXd lg(k);
    for (int i = 0; i < k; ++i)
      lg(i) = log_prior(i) - th.dot(maj.mean(i)) +
              0.5 * th.dot(maj.covariance(i) * th);
    return normalized_exp(lg);
  };

  Eigen::VectorXd xi = uniform_from(maj.weights());
  double res = std::numeric_limits<double>::infinity();
  int iter = 0;
  for (; iter < opts.max_iter; ++iter) {
    const Eigen::VectorXd t = tilt(theta_of(xi));
    res = (t - xi).cwiseAbs().maxCoeff();
    if (res < opts.tol) break;
    xi = (1.0 - opts.damping) * xi + opts.damping * t;
  }

  const int d = maj.dim();
  Eigen::MatrixXd cov_tilt = Eigen::MatrixXd::Zero(d, d);
  Eigen::VectorXd mean_tilt = Eigen::VectorXd::Zero(d);
  for (int i = 0; i < k; ++i) {
    cov_tilt += xi(i) * maj.covariance(i);
    mean_tilt += xi(i) * maj.mean(i);
  }
  const double scale = std::pow(-2.0 * std::log(task.rho), -0.5);
  LimitResult out;
  out.classifier.w =
      scale * solve_spd(cov_tilt, task.minority.mixture_mean() - mean_tilt,
                        "erf limit w");
  out.classifier.b = -std::sqrt(-2.0 * std::log(task.rho));
  out.weights.xi_minus = xi;
  out.converged = res < opts.tol;
  out.iterations = iter;
  out.residual = res;
  return out;
}

AucDirection optimal_auc_direction(const GaussianMixture& minority,
                                   const GaussianMixture& majority) {
  if (minority.components() != 1 || majority.components() != 1)
    throw DomainError(
        "optimal_auc_direction needs one Gaussian per class");
  const Eigen::VectorXd delta = minority.mean(0) - majority.mean(0);
  const Eigen::MatrixXd s = minority.covariance(0) + majority.covariance(0);
  AucDirection out;
  out.w = solve_spd(s, delta, "optimal auc direction");
  if (out.w.norm() == 0.0) {
    out.auc = 0.5;
    return out;
  }
  out.auc = normal_cdf(out.w.dot(delta) / std::sqrt(out.w.dot(s * out.w)));
  return out;
}

}  // namespace uic
