#include "uic/diagnostics.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>

#include "uic/errors.hpp"
#include "uic/math.hpp"
#include "uic/train.hpp"

namespace uic {

double influence_g(double alpha, int y01, double margin) {
  const double e = 1.0 / (alpha - 2.0);
  const double m = std::clamp(margin, -700.0, 700.0);
  if (y01 == 1)
    return -std::pow(1.0 + std::exp(-m), e) * std::exp(-m);
  return std::pow(1.0 + std::exp(m), e) * std::exp(m);
}

InfluenceReport influence(const Dataset& data, const LinearClassifier& clf,
                          const LossSpec& spec, const LabeledSample& z_star) {
  if (data.size() < 1) throw DomainError("influence: empty dataset");
  if (z_star.x.size() != data.dim() || clf.w.size() != data.dim())
    throw DomainError("influence: dimension mismatch");
  spec.validate();

  const Eigen::Index n = data.size();
  const int d = data.dim();
  const Eigen::VectorXd margins = (data.x * clf.w).array() + clf.b;

  // Mean per-sample Hessian of the trainer objective on theta = (w, b):
  // H = (1/n) sum h''(m_i) z_i z_i' with z = [x; 1].
  Eigen::MatrixXd hess = Eigen::MatrixXd::Zero(d + 1, d + 1);
  Eigen::VectorXd z(d + 1);
  for (Eigen::Index i = 0; i < n; ++i) {
    z.head(d) = data.x.row(i).transpose();
    z(d) = 1.0;
    hess.noalias() +=
        train_margin_hess(spec, data.y(i), margins(i)) * z * z.transpose();
  }
  hess /= static_cast<double>(n);

  const double m_star = clf.margin(z_star.x);
  Eigen::VectorXd grad(d + 1);
  grad.head(d) = train_margin_grad(spec, z_star.y, m_star) * z_star.x;
  grad(d) = train_margin_grad(spec, z_star.y, m_star);

  InfluenceReport report;
  report.point = z_star;

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(hess);
  const double max_eig = es.eigenvalues().cwiseAbs().maxCoeff();
  const double eig_floor = std::max(max_eig, 1.0) * 1e-12;
  if (es.eigenvalues().cwiseAbs().minCoeff() <= eig_floor) {
    report.hessian_singular_warning = true;
    Eigen::VectorXd inv_eigs = es.eigenvalues();
    for (Eigen::Index k = 0; k < inv_eigs.size(); ++k)
      inv_eigs(k) =
          std::abs(inv_eigs(k)) > eig_floor ? 1.0 / inv_eigs(k) : 0.0;
    report.influence_oracle = -(es.eigenvectors() * inv_eigs.asDiagonal() *
                                es.eigenvectors().transpose() * grad);
  } else {
    report.influence_oracle = -es.eigenvectors() *
                              es.eigenvalues().cwiseInverse().asDiagonal() *
                              es.eigenvectors().transpose() * grad;
  }

  if (spec.family == Family::kAlpha) {
    double g_sum = 0.0;
    for (Eigen::Index i = 0; i < n; ++i)
      g_sum += influence_g(spec.alpha, data.y(i), margins(i));
    report.g_value = influence_g(spec.alpha, z_star.y, m_star);
    Eigen::MatrixXd xtx = Eigen::MatrixXd::Zero(d + 1, d + 1);
    for (Eigen::Index i = 0; i < n; ++i) {
      z.head(d) = data.x.row(i).transpose();
      z(d) = 1.0;
      xtx.noalias() += z * z.transpose();
    }
    xtx /= static_cast<double>(n);
    Eigen::VectorXd z_probe(d + 1);
    z_probe.head(d) = z_star.x;
    z_probe(d) = 1.0;
    report.influence_theorem3 =
        (report.g_value / g_sum) *
        xtx.ldlt().solve(z_probe);
  }
  return report;
}

InfluenceReport influence(const std::vector<LabeledSample>& data,
                          const LinearClassifier& clf, const LossSpec& spec,
                          const LabeledSample& z_star) {
  return influence(Dataset::from_samples(data), clf, spec, z_star);
}

namespace {

// Average ranks (1-based) with ties sharing their mean rank.
std::vector<double> average_ranks(const std::vector<double>& values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::sort(idx.begin(), idx.end(),
            [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && values[idx[j + 1]] == values[idx[i]]) ++j;
    const double mean_rank = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[idx[k]] = mean_rank;
    i = j + 1;
  }
  return ranks;
}

}  // namespace

double auc(const std::vector<double>& scores_pos,
           const std::vector<double>& scores_neg) {
  if (scores_pos.empty() || scores_neg.empty())
    throw DomainError("auc needs scores from both classes");
  std::vector<double> all;
  all.reserve(scores_pos.size() + scores_neg.size());
  all.insert(all.end(), scores_pos.begin(), scores_pos.end());
  all.insert(all.end(), scores_neg.begin(), scores_neg.end());
  const std::vector<double> ranks = average_ranks(all);
  double rank_sum_pos = 0.0;
  for (std::size_t i = 0; i < scores_pos.size(); ++i) rank_sum_pos += ranks[i];
  const double np = static_cast<double>(scores_pos.size());
  const double nn = static_cast<double>(scores_neg.size());
  return (rank_sum_pos - np * (np + 1.0) / 2.0) / (np * nn);
}

MetricReport partial_metrics(const std::vector<double>& scores_pos,
                             const std::vector<double>& scores_neg,
                             double fpr_cap, double fpr_point) {
  if (scores_pos.empty() || scores_neg.empty())
    throw DomainError("partial_metrics needs scores from both classes");
  if (!(fpr_cap > 0.0 && fpr_cap < 1.0) ||
      !(fpr_point > 0.0 && fpr_point < 1.0))
    throw DomainError("fpr thresholds must lie in (0, 1)");

  MetricReport report;
  report.auc = auc(scores_pos, scores_neg);
  const double np = static_cast<double>(scores_pos.size());
  const double nn = static_cast<double>(scores_neg.size());
  report.resolution_warning = nn < 1.0 / fpr_point;

  // ROC vertices from high threshold to low; tied scores advance TP and FP
  // together, so segments across ties are trapezoids.
  struct Scored {
    double s;
    int y;
  };
  std::vector<Scored> all;
  all.reserve(scores_pos.size() + scores_neg.size());
  for (double s : scores_pos) all.push_back({s, 1});
  for (double s : scores_neg) all.push_back({s, 0});
  std::sort(all.begin(), all.end(),
            [](const Scored& a, const Scored& b) { return a.s > b.s; });

  double tp = 0.0, fp = 0.0;
  double prev_fpr = 0.0, prev_tpr = 0.0;
  double area = 0.0;          // area under ROC for FPR <= cap
  double recall = 0.0;        // TPR at largest vertex FPR <= fpr_point
  std::size_t i = 0;
  while (i < all.size()) {
    std::size_t j = i;
    while (j + 1 < all.size() && all[j + 1].s == all[i].s) ++j;
    for (std::size_t k = i; k <= j; ++k)
      (all[k].y == 1 ? tp : fp) += 1.0;
    const double fpr = fp / nn;
    const double tpr = tp / np;
    if (fpr <= fpr_point) recall = tpr;
    if (fpr <= fpr_cap) {
      area += 0.5 * (tpr + prev_tpr) * (fpr - prev_fpr);
    } else if (prev_fpr < fpr_cap) {
      // Interpolate the segment crossing the cap.
      const double frac = (fpr_cap - prev_fpr) / (fpr - prev_fpr);
      const double tpr_cap = prev_tpr + frac * (tpr - prev_tpr);
      area += 0.5 * (tpr_cap + prev_tpr) * (fpr_cap - prev_fpr);
    }
    prev_fpr = fpr;
    prev_tpr = tpr;
    i = j + 1;
  }
  report.op_auc = area / fpr_cap;
  report.recall_at_fpr = recall;

  double correct = 0.0;
  for (double s : scores_pos) correct += s > 0.0 ? 1.0 : 0.0;
  for (double s : scores_neg) correct += s > 0.0 ? 0.0 : 1.0;
  report.accuracy = correct / (np + nn);

  double bs = 0.0;
  for (double s : scores_pos) {
    const double p = sigmoid(s);
    bs += (1.0 - p) * (1.0 - p);
  }
  for (double s : scores_neg) {
    const double p = sigmoid(s);
    bs += p * p;
  }
  report.brier = bs / (np + nn);
  return report;
}

double brier(const std::vector<int>& labels,
             const std::vector<double>& probabilities) {
  if (labels.size() != probabilities.size())
    throw DomainError("brier: labels and probabilities differ in length");
  if (labels.empty()) throw DomainError("brier: empty input");
  double sum = 0.0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (!(probabilities[i] >= 0.0 && probabilities[i] <= 1.0))
      throw DomainError("brier: probabilities must lie in [0, 1]");
    const double r = probabilities[i] - static_cast<double>(labels[i]);
    sum += r * r;
  }
  return sum / static_cast<double>(labels.size());
}

}  // namespace uic
