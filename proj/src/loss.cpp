#include "uic/loss.hpp"

#include <cmath>
#include <cstdio>

#include "uic/errors.hpp"
#include "uic/math.hpp"

namespace uic {
namespace {

// Each symmetric family is implemented through its positive branch
// pos_*(p) = l(1, p); the negative branch is the exact mirror
// l(0, p) = l(1, 1-p). That makes the symmetry identity hold bit for bit.
// Vector scaling is the one asymmetric family and carries its own y=0 branch.

struct Branch {
  double value;
  double grad;
  double hess;
};

Branch ce_pos(double p) {
  return {-std::log(p), -1.0 / p, 1.0 / (p * p)};
}

Branch square_pos(double p) {
  const double r = p - 1.0;
  return {r * r, 2.0 * r, 2.0};
}

// Gaussian-CDF proxy of the logistic loss. The branch in the margin variable
// v = log(p/(1-p)) is
//   g(v) = psi'(v) - v * (1 - psi(v)),
// which is nonnegative, decreasing, ~ -v as v -> -inf and -> 0 as v -> +inf.
// g'(v) = -psi(-v), g''(v) = psi'(v).
Branch erf_pos(double p) {
  const double v = std::log(p) - std::log1p(-p);
  const double pdf = normal_pdf(v);
  const double tail = normal_cdf(-v);  // 1 - psi(v)
  const double value = pdf - v * tail;
  const double dv = 1.0 / (p * (1.0 - p));
  const double d2v = -1.0 / (p * p) + 1.0 / ((1.0 - p) * (1.0 - p));
  return {value, -tail * dv, pdf * dv * dv - tail * d2v};
}

Branch focal_pos(double p, double gamma) {
  const double lp = std::log(p);
  const double q = 1.0 - p;
  const double qg = std::pow(q, gamma);
  const double value = -lp * qg;
  if (gamma == 0.0) return {value, -1.0 / p, 1.0 / (p * p)};
  const double qg1 = std::pow(q, gamma - 1.0);
  const double grad = -qg / p + gamma * lp * qg1;
  const double hess = qg / (p * p) + 2.0 * gamma * qg1 / p -
                      gamma * (gamma - 1.0) * lp * std::pow(q, gamma - 2.0);
  return {value, grad, hess};
}

Branch poly_pos(double p, double epsilon) {
  Branch b = ce_pos(p);
  b.value += epsilon * (1.0 - p);
  b.grad -= epsilon;
  return b;
}

// y=1 branch of vector scaling: log(1 + ((1-p)/p)^delta) = softplus(-delta v)
// in the margin variable v = log(p/(1-p)).
Branch vs_pos(double p, double delta) {
  const double v = std::log(p) - std::log1p(-p);
  const double value = softplus(-delta * v);
  const double s = sigmoid(-delta * v);
  const double dv = 1.0 / (p * (1.0 - p));
  const double d2v = -1.0 / (p * p) + 1.0 / ((1.0 - p) * (1.0 - p));
  const double grad = -delta * s * dv;
  const double hess =
      delta * delta * s * (1.0 - s) * dv * dv - delta * s * d2v;
  return {value, grad, hess};
}

// y=0 branch of vector scaling is plain cross entropy on the negative class.
Branch vs_neg(double p) {
  const double q = 1.0 - p;
  return {-std::log1p(-p), 1.0 / q, 1.0 / (q * q)};
}

// Shared positive branch of the alpha and tunable-boosting families with
// exponent s = (alpha-1)/alpha <= 0:
//   A(p)  = (1 - p^s)/s,  A'(p) = -p^(s-1),  A''(p) = (1-s) p^(s-2),
// and the value at alpha = 1 is the analytic limit A(p) = -log p. The
// boosting factor exp(C (p-1)) multiplies the branch; C = 0 reproduces the
// plain alpha loss exactly (multiplication by e^0 = 1 and adding C-terms
// equal to 0 leave the doubles unchanged).
Branch alpha_tbl_pos(double p, double alpha, double cpen) {
  const double s = (alpha - 1.0) / alpha;
  const double a =
      (s == 0.0) ? -std::log(p) : -std::expm1(s * std::log(p)) / s;
  const double a1 = -std::pow(p, s - 1.0);
  const double a2 = (1.0 - s) * std::pow(p, s - 2.0);
  const double e = std::exp(cpen * (p - 1.0));
  return {a * e, (a1 + cpen * a) * e,
          (a2 + 2.0 * cpen * a1 + cpen * cpen * a) * e};
}

Branch pos_branch(const LossSpec& spec, double p) {
  switch (spec.family) {
    case Family::kCrossEntropy:
      return ce_pos(p);
    case Family::kSquare:
      return square_pos(p);
    case Family::kErf:
      return erf_pos(p);
    case Family::kFocal:
      return focal_pos(p, spec.gamma);
    case Family::kPoly:
      return poly_pos(p, spec.epsilon);
    case Family::kVectorScaling:
      return vs_pos(p, spec.delta1);
    case Family::kAlpha:
      return alpha_tbl_pos(p, spec.alpha, 0.0);
    case Family::kTunableBoosting:
      return alpha_tbl_pos(p, spec.alpha, spec.cpen);
  }
  throw DomainError("unknown loss family");
}

Branch eval_branches(const LossSpec& spec, int y, double etahat) {
  spec.validate();
  if (y != 0 && y != 1) throw DomainError("label must be 0 or 1");
  if (!(etahat >= 0.0 && etahat <= 1.0))
    throw DomainError("etahat must lie in [0, 1]");
  const double p = clamp_unit(etahat);
  if (y == 1) return pos_branch(spec, p);
  if (spec.family == Family::kVectorScaling) return vs_neg(p);
  Branch b = pos_branch(spec, 1.0 - p);
  b.grad = -b.grad;
  return b;
}

std::string trimmed_number(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%g", x);
  return buf;
}

}  // namespace

const char* family_name(Family f) {
  switch (f) {
    case Family::kCrossEntropy:
      return "ce";
    case Family::kSquare:
      return "square";
    case Family::kErf:
      return "erf";
    case Family::kFocal:
      return "focal";
    case Family::kPoly:
      return "poly";
    case Family::kVectorScaling:
      return "vs";
    case Family::kAlpha:
      return "alpha";
    case Family::kTunableBoosting:
      return "tbl";
  }
  return "?";
}

Family family_from_name(const std::string& name) {
  if (name == "ce" || name == "cross_entropy") return Family::kCrossEntropy;
  if (name == "square") return Family::kSquare;
  if (name == "erf") return Family::kErf;
  if (name == "focal") return Family::kFocal;
  if (name == "poly") return Family::kPoly;
  if (name == "vs" || name == "vector_scaling") return Family::kVectorScaling;
  if (name == "alpha") return Family::kAlpha;
  if (name == "tbl" || name == "tunable_boosting")
    return Family::kTunableBoosting;
  throw DomainError("unknown loss family name: " + name);
}

LossSpec LossSpec::CrossEntropy() { return {Family::kCrossEntropy}; }
LossSpec LossSpec::Square() { return {Family::kSquare}; }
LossSpec LossSpec::Erf() { return {Family::kErf}; }
LossSpec LossSpec::Focal(double gamma) {
  LossSpec s{Family::kFocal};
  s.gamma = gamma;
  return s;
}
LossSpec LossSpec::Poly(double epsilon) {
  LossSpec s{Family::kPoly};
  s.epsilon = epsilon;
  return s;
}
LossSpec LossSpec::VectorScaling(double delta1) {
  LossSpec s{Family::kVectorScaling};
  s.delta1 = delta1;
  return s;
}
LossSpec LossSpec::Alpha(double alpha) {
  LossSpec s{Family::kAlpha};
  s.alpha = alpha;
  return s;
}
LossSpec LossSpec::TunableBoosting(double alpha, double cpen) {
  LossSpec s{Family::kTunableBoosting};
  s.alpha = alpha;
  s.cpen = cpen;
  return s;
}

void LossSpec::validate() const {
  switch (family) {
    case Family::kFocal:
      if (!(gamma >= 0.0) || !std::isfinite(gamma))
        throw DomainError("focal gamma must be finite and >= 0");
      break;
    case Family::kPoly:
      if (!std::isfinite(epsilon))
        throw DomainError("poly epsilon must be finite");
      break;
    case Family::kVectorScaling:
      if (!(delta1 > 0.0 && delta1 <= 1.0))
        throw DomainError("vs delta1 must lie in (0, 1]");
      break;
    case Family::kTunableBoosting:
      if (!(cpen >= 0.0) || !std::isfinite(cpen))
        throw DomainError("tbl C must be finite and >= 0");
      [[fallthrough]];
    case Family::kAlpha:
      if (!(alpha > 0.0 && alpha <= 1.0))
        throw DomainError("alpha must lie in (0, 1]");
      break;
    default:
      break;
  }
}

std::string LossSpec::label() const {
  switch (family) {
    case Family::kFocal:
      return "focal(gamma=" + trimmed_number(gamma) + ")";
    case Family::kPoly:
      return "poly(epsilon=" + trimmed_number(epsilon) + ")";
    case Family::kVectorScaling:
      return "vs(delta1=" + trimmed_number(delta1) + ")";
    case Family::kAlpha:
      return "alpha(alpha=" + trimmed_number(alpha) + ")";
    case Family::kTunableBoosting:
      return "tbl(alpha=" + trimmed_number(alpha) +
             ";C=" + trimmed_number(cpen) + ")";
    default:
      return family_name(family);
  }
}

double loss_value(const LossSpec& spec, int y, double etahat) {
  return eval_branches(spec, y, etahat).value;
}

double loss_grad(const LossSpec& spec, int y, double etahat) {
  return eval_branches(spec, y, etahat).grad;
}

double loss_hess(const LossSpec& spec, int y, double etahat) {
  return eval_branches(spec, y, etahat).hess;
}

PointwiseRisk pointwise_risk(const LossSpec& spec, double eta, double etahat) {
  if (!(eta >= 0.0 && eta <= 1.0))
    throw DomainError("eta must lie in [0, 1]");
  const double value = (1.0 - eta) * loss_value(spec, 0, etahat) +
                       eta * loss_value(spec, 1, etahat);
  return {eta, etahat, value};
}

double pointwise_risk_value(const LossSpec& spec, double eta, double etahat) {
  return pointwise_risk(spec, eta, etahat).value;
}

double margin_loss_value(const LossSpec& spec, int y_pm, double margin) {
  if (y_pm != -1 && y_pm != 1) throw DomainError("margin label must be +-1");
  if (!std::isfinite(margin)) throw DomainError("margin must be finite");
  return loss_value(spec, (y_pm + 1) / 2, sigmoid(margin));
}

double margin_loss_grad(const LossSpec& spec, int y_pm, double margin) {
  if (y_pm != -1 && y_pm != 1) throw DomainError("margin label must be +-1");
  if (!std::isfinite(margin)) throw DomainError("margin must be finite");
  const double p = clamp_unit(sigmoid(margin));
  const double dp = p * (1.0 - p);
  return loss_grad(spec, (y_pm + 1) / 2, p) * dp;
}

double margin_loss_hess(const LossSpec& spec, int y_pm, double margin) {
  if (y_pm != -1 && y_pm != 1) throw DomainError("margin label must be +-1");
  if (!std::isfinite(margin)) throw DomainError("margin must be finite");
  const double p = clamp_unit(sigmoid(margin));
  const double dp = p * (1.0 - p);
  const int y = (y_pm + 1) / 2;
  return loss_hess(spec, y, p) * dp * dp +
         loss_grad(spec, y, p) * dp * (1.0 - 2.0 * p);
}

}  // namespace uic
