#include "uic/bayes.hpp"

#include <cmath>

#include "uic/errors.hpp"
#include "uic/math.hpp"

namespace uic {
namespace {

double binary_entropy(double eta) {
  double h = 0.0;
  if (eta > 0.0) h -= eta * std::log(eta);
  if (eta < 1.0) h -= (1.0 - eta) * std::log1p(-eta);
  return h;
}

// Closed-form Bayes risk of the alpha family. The minimizer is
// eta^a / (eta^a + (1-eta)^a); substituting it gives
//   (a/(1-a)) * (Z^{1/a} - 1),   Z = eta^a + (1-eta)^a,
// which is nonnegative (Z >= 1 for a < 1). Evaluated through expm1/log1p to
// keep precision when Z - 1 is tiny.
BayesRiskResult alpha_bayes(double a, double eta) {
  if (a == 1.0) return {eta, eta, binary_entropy(eta)};
  double z_m1;
  if (eta == 0.0 || eta == 1.0) {
    z_m1 = 0.0;
  } else {
    z_m1 = std::exp(a * std::log(eta)) + std::expm1(a * std::log1p(-eta));
  }
  const double pa = (eta > 0.0) ? std::exp(a * std::log(eta)) : 0.0;
  const double qa = (eta < 1.0) ? std::exp(a * std::log1p(-eta)) : 0.0;
  const double minimizer = (pa + qa) > 0.0 ? pa / (pa + qa) : 0.5;
  const double value =
      (a / (1.0 - a)) * std::expm1(std::log1p(z_m1) / a);
  return {eta, minimizer, value};
}

BayesRiskResult numeric_bayes(const LossSpec& spec, double eta) {
  auto risk = [&](double p) { return pointwise_risk_value(spec, eta, p); };
  const ScalarMinimum m =
      minimize_scalar(risk, kEpsClip, 1.0 - kEpsClip, 1e-10);
  return {eta, m.x, m.value};
}

}  // namespace

BayesRiskResult pointwise_bayes_risk(const LossSpec& spec, double eta) {
  spec.validate();
  if (!(eta >= 0.0 && eta <= 1.0))
    throw DomainError("eta must lie in [0, 1]");
  switch (spec.family) {
    case Family::kCrossEntropy:
      return {eta, eta, binary_entropy(eta)};
    case Family::kSquare:
      return {eta, eta, eta * (1.0 - eta)};
    case Family::kAlpha:
      return alpha_bayes(spec.alpha, eta);
    case Family::kTunableBoosting:
      if (spec.cpen == 0.0) return alpha_bayes(spec.alpha, eta);
      return numeric_bayes(spec, eta);
    default:
      return numeric_bayes(spec, eta);
  }
}

double f_exact(const LossSpec& spec, double pi, double t) {
  if (!(pi > 0.0 && pi < 1.0)) throw DomainError("pi must lie in (0, 1)");
  if (!(t >= 0.0)) throw DomainError("t must be >= 0");
  const double denom = pi * t + (1.0 - pi);
  const double eta_t = pi * t / denom;
  return pointwise_bayes_risk(spec, pi).value -
         denom * pointwise_bayes_risk(spec, eta_t).value;
}

double f_asymptotic(const LossSpec& spec, double pi, double t) {
  spec.validate();
  if (!(pi > 0.0 && pi < 1.0)) throw DomainError("pi must lie in (0, 1)");
  if (!(t >= 0.0)) throw DomainError("t must be >= 0");
  const double ce_row = -pi * std::log(pi) * (1.0 - t);
  switch (spec.family) {
    case Family::kCrossEntropy:
    case Family::kPoly:
      return ce_row;
    case Family::kSquare:
      return pi * (1.0 - t);
    case Family::kFocal:
      return ce_row / (spec.gamma + 1.0);
    case Family::kVectorScaling:
      return spec.delta1 * ce_row;
    case Family::kAlpha:
    case Family::kTunableBoosting: {
      const double a = spec.alpha;
      if (a == 1.0)
        return spec.family == Family::kAlpha
                   ? ce_row
                   : std::exp(-spec.cpen) * ce_row;
      const double row = std::pow(pi, a) *
                         (t == 0.0 ? 1.0 : -std::expm1(a * std::log(t))) /
                         (1.0 - a);
      if (spec.family == Family::kAlpha) return row;
      return std::exp(-a * spec.cpen) * row;
    }
    case Family::kErf:
      throw UnsupportedFamilyError(
          "the erf loss has no closed-form limiting f-function");
  }
  throw DomainError("unknown loss family");
}

std::vector<double> verify_uic_limit(const LossSpec& spec, double t,
                                     const std::vector<double>& pi_sequence) {
  if (pi_sequence.empty()) throw DomainError("pi sequence must be nonempty");
  for (std::size_t i = 0; i < pi_sequence.size(); ++i) {
    if (!(pi_sequence[i] > 0.0 && pi_sequence[i] < 0.1))
      throw DomainError("pi sequence entries must lie in (0, 0.1)");
    if (i > 0 && !(pi_sequence[i] < pi_sequence[i - 1]))
      throw DomainError("pi sequence must be strictly decreasing");
  }
  std::vector<double> ratios;
  ratios.reserve(pi_sequence.size());
  for (double pi : pi_sequence) {
    if (t == 1.0) {
      ratios.push_back(1.0);  // removable 0/0 point
      continue;
    }
    ratios.push_back(f_exact(spec, pi, t) / f_asymptotic(spec, pi, t));
  }
  return ratios;
}

std::vector<double> default_t_grid() {
  return {0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0, 2.0, 5.0};
}

std::vector<double> default_pi_grid() {
  return {1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 1e-7, 1e-8};
}

FCurve compute_fcurve(const LossSpec& spec, std::vector<double> pi_grid,
                      std::vector<double> t_grid) {
  if (pi_grid.empty()) pi_grid = default_pi_grid();
  if (t_grid.empty()) t_grid = default_t_grid();
  FCurve curve;
  curve.spec = spec;
  curve.pi_grid = pi_grid;
  curve.t_grid = t_grid;
  const bool has_asymptotic = spec.family != Family::kErf;
  for (double pi : pi_grid) {
    std::vector<double> row_exact, row_asym;
    row_exact.reserve(t_grid.size());
    row_asym.reserve(t_grid.size());
    for (double t : t_grid) {
      row_exact.push_back(f_exact(spec, pi, t));
      if (has_asymptotic) row_asym.push_back(f_asymptotic(spec, pi, t));
    }
    curve.exact.push_back(std::move(row_exact));
    if (has_asymptotic) curve.asymptotic.push_back(std::move(row_asym));
  }
  return curve;
}

StatInfoEstimate statistical_information(const Task& task,
                                         std::size_t mc_samples,
                                         std::uint64_t seed) {
  if (mc_samples < 1000)
    throw DomainError("statistical_information needs mc_samples >= 1000");
  const LossSpec& spec = task.loss;
  const double bayes_prior = pointwise_bayes_risk(spec, task.pi).value;

  CounterRng root(seed);
  CounterRng q_stream = root.substream(0);
  CounterRng mix_stream = root.substream(1);

  // f-divergence form: E_Q[f(dP/dQ)]. Log-ratios are clamped to avoid
  // overflowing exp; the f-function grows slowly in t so the clamp is
  // immaterial at these scales.
  double sum = 0.0, sum_sq = 0.0;
  for (std::size_t i = 0; i < mc_samples; ++i) {
    CounterRng r = q_stream.substream(i);
    const Eigen::VectorXd x = task.majority.sample(r);
    const double log_ratio = std::min(
        700.0, task.minority.log_density(x) - task.majority.log_density(x));
    const double v = f_exact(spec, task.pi, std::exp(log_ratio));
    sum += v;
    sum_sq += v * v;
  }
  const double n = static_cast<double>(mc_samples);
  const double mean = sum / n;
  const double se =
      std::sqrt(std::max(0.0, sum_sq / n - mean * mean) / n);

  // Bayes-risk-difference form: bayes(pi) - E_{pi P + (1-pi) Q}[bayes(eta)].
  double dsum = 0.0, dsum_sq = 0.0;
  for (std::size_t i = 0; i < mc_samples; ++i) {
    CounterRng r = mix_stream.substream(i);
    const int y = r.uniform() < task.pi ? 1 : 0;
    const Eigen::VectorXd x =
        (y == 1 ? task.minority : task.majority).sample(r);
    const double v =
        pointwise_bayes_risk(spec, posterior_eta(task, x)).value;
    dsum += v;
    dsum_sq += v * v;
  }
  const double dmean = dsum / n;
  const double dse =
      std::sqrt(std::max(0.0, dsum_sq / n - dmean * dmean) / n);

  return {mean, se, bayes_prior - dmean, dse, mc_samples};
}

}  // namespace uic
