#ifndef UIC_LOSS_HPP_
#define UIC_LOSS_HPP_

#include <string>

namespace uic {

enum class Family {
  kCrossEntropy,
  kSquare,
  kErf,
  kFocal,
  kPoly,
  kVectorScaling,
  kAlpha,
  kTunableBoosting,
};

const char* family_name(Family f);
Family family_from_name(const std::string& name);

/// Tagged loss family plus hyperparameters; the single source of truth for
/// l(y, yhat). Hyperparameters that do not belong to the chosen family are
/// ignored by every evaluation.
struct LossSpec {
  Family family = Family::kCrossEntropy;
  double gamma = 2.0;    // focal exponent, >= 0
  double epsilon = 1.0;  // poly linear term, any finite real
  double delta1 = 0.5;   // vector-scaling multiplicative factor, in (0, 1]
  double alpha = 0.5;    // alpha / tunable-boosting order, in (0, 1]
  double cpen = 0.0;     // tunable-boosting influence penalty C, >= 0

  static LossSpec CrossEntropy();
  static LossSpec Square();
  static LossSpec Erf();
  static LossSpec Focal(double gamma);
  static LossSpec Poly(double epsilon);
  static LossSpec VectorScaling(double delta1);
  static LossSpec Alpha(double alpha);
  static LossSpec TunableBoosting(double alpha, double cpen);

  /// Throws DomainError if a hyperparameter relevant to the family is outside
  /// its declared range.
  void validate() const;

  /// Short printable label, e.g. "focal(gamma=2)".
  std::string label() const;
};

/// l(y, yhat). yhat must lie in [0,1] and is clamped to
/// [kEpsClip, 1-kEpsClip] before logs/powers; y must be 0 or 1.
double loss_value(const LossSpec& spec, int y, double etahat);

/// Analytic d l / d yhat, same domain as loss_value.
double loss_grad(const LossSpec& spec, int y, double etahat);

/// Analytic d^2 l / d yhat^2.
double loss_hess(const LossSpec& spec, int y, double etahat);

struct PointwiseRisk {
  double eta;
  double etahat;
  double value;
};

/// (1-eta) * l(0, yhat) + eta * l(1, yhat).
PointwiseRisk pointwise_risk(const LossSpec& spec, double eta, double etahat);
double pointwise_risk_value(const LossSpec& spec, double eta, double etahat);

/// Margin composition l(y, sigmoid(margin)) with y_pm in {-1, +1}. The
/// logistic link is used for every family.
double margin_loss_value(const LossSpec& spec, int y_pm, double margin);

/// d/dmargin of margin_loss_value (chain rule through the link, evaluated at
/// the clamped probability).
double margin_loss_grad(const LossSpec& spec, int y_pm, double margin);

/// d^2/dmargin^2 of margin_loss_value.
double margin_loss_hess(const LossSpec& spec, int y_pm, double margin);

}  // namespace uic

#endif  // UIC_LOSS_HPP_
