#ifndef UIC_DIAGNOSTICS_HPP_
#define UIC_DIAGNOSTICS_HPP_

#include <vector>

#include "uic/gaussmix.hpp"
#include "uic/linear.hpp"
#include "uic/loss.hpp"

namespace uic {

struct InfluenceReport {
  LabeledSample point;
  Eigen::VectorXd influence_oracle;    // -H^{-1} grad, on theta = (w, b)
  Eigen::VectorXd influence_theorem3;  // closed form; empty unless alpha loss
  double g_value = 0.0;                // closed-form g at the probe point
  bool hessian_singular_warning = false;
};

/// Influence of upweighting z_star on the fitted parameters theta = (w, b).
/// The oracle -H^{-1} grad l(z_star) is always computed from the full-sample
/// analytic Hessian of the trainer objective; a singular Hessian falls back
/// to the pseudo-inverse and sets the warning flag. The closed-form variant
/// (g-ratio times (X'X/n)^{-1} x*, with X intercept-augmented) is filled in
/// for the alpha family.
InfluenceReport influence(const Dataset& data, const LinearClassifier& clf,
                          const LossSpec& spec, const LabeledSample& z_star);
InfluenceReport influence(const std::vector<LabeledSample>& data,
                          const LinearClassifier& clf, const LossSpec& spec,
                          const LabeledSample& z_star);

/// Closed-form influence weight g(y, margin) of the alpha family.
double influence_g(double alpha, int y01, double margin);

/// Mann-Whitney AUC: fraction of (positive, negative) pairs ranked
/// correctly, ties counting one half. O(n log n).
double auc(const std::vector<double>& scores_pos,
           const std::vector<double>& scores_neg);

struct MetricReport {
  double auc = 0.0;
  double op_auc = 0.0;         // partial AUC on FPR <= cap, divided by cap
  double recall_at_fpr = 0.0;  // TPR at the largest empirical FPR <= point
  double accuracy = 0.0;       // threshold-at-zero accuracy
  double brier = 0.0;          // probabilities taken as sigmoid(score)
  bool resolution_warning = false;  // fewer negatives than 1/fpr_point
};

MetricReport partial_metrics(const std::vector<double>& scores_pos,
                             const std::vector<double>& scores_neg,
                             double fpr_cap = 0.01, double fpr_point = 0.001);

/// Mean squared error between probabilities and binary labels.
double brier(const std::vector<int>& labels,
             const std::vector<double>& probabilities);

}  // namespace uic

#endif  // UIC_DIAGNOSTICS_HPP_
