#ifndef UIC_MATH_HPP_
#define UIC_MATH_HPP_

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

namespace uic {

/// Probability estimates are clamped into [kEpsClip, 1 - kEpsClip] before any
/// log or power so every loss stays finite on closed [0,1] inputs.
inline constexpr double kEpsClip = 1e-12;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kInvSqrt2Pi = 0.39894228040143267794;  // 1/sqrt(2*pi)
inline constexpr double kSqrt2 = 1.41421356237309504880;

/// Standard normal CDF via erfc, accurate to ~1e-15 over the double range.
inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / kSqrt2); }

/// Standard normal density.
inline double normal_pdf(double x) {
  return kInvSqrt2Pi * std::exp(-0.5 * x * x);
}

inline double clamp_unit(double p) {
  return std::clamp(p, kEpsClip, 1.0 - kEpsClip);
}

/// Numerically stable logistic function.
inline double sigmoid(double m) {
  if (m >= 0.0) return 1.0 / (1.0 + std::exp(-m));
  const double e = std::exp(m);
  return e / (1.0 + e);
}

/// log(p / (1-p)) for p in (0,1).
inline double logit(double p) { return std::log(p) - std::log1p(-p); }

/// log(1 + exp(x)) without overflow.
inline double softplus(double x) {
  if (x > 0.0) return x + std::log1p(std::exp(-x));
  return std::log1p(std::exp(x));
}

inline double log_sum_exp(std::span<const double> xs) {
  double m = -std::numeric_limits<double>::infinity();
  for (double x : xs) m = std::max(m, x);
  if (!std::isfinite(m)) return m;
  double s = 0.0;
  for (double x : xs) s += std::exp(x - m);
  return m + std::log(s);
}

/// Unsigned angle in degrees between two directions, treating v and -v as the
/// same line orientation. Inputs need not be normalized.
template <typename VecA, typename VecB>
double line_angle_deg(const VecA& a, const VecB& b) {
  const double na = a.norm(), nb = b.norm();
  if (na == 0.0 || nb == 0.0) return 0.0;
  double c = std::abs(a.dot(b)) / (na * nb);
  c = std::min(c, 1.0);
  return std::acos(c) * 180.0 / kPi;
}

struct ScalarMinimum {
  double x;
  double value;
};

/// Minimizes a unimodal-ish scalar function on [lo, hi]. A logit-spaced
/// presearch brackets the minimum (robust for minimizers within a few orders
/// of magnitude of the clamp boundary), then golden-section refines the
/// bracket to absolute width xtol. Returns the best probed point.
template <typename F>
ScalarMinimum minimize_scalar(F&& f, double lo, double hi, double xtol) {
  constexpr int kPresearch = 121;
  const double llo = logit(lo), lhi = logit(hi);
  double best_x = lo, best_f = f(lo);
  int best_i = 0;
  std::vector<double> xs(kPresearch);
  for (int i = 0; i < kPresearch; ++i) {
    const double t = llo + (lhi - llo) * i / (kPresearch - 1);
    xs[i] = sigmoid(t);
    const double fi = (i == 0) ? best_f : f(xs[i]);
    if (fi < best_f) {
      best_f = fi;
      best_x = xs[i];
      best_i = i;
    }
  }
  double a = xs[std::max(0, best_i - 1)];
  double b = xs[std::min(kPresearch - 1, best_i + 1)];

  constexpr double kInvPhi = 0.61803398874989484820;
  double x1 = b - kInvPhi * (b - a);
  double x2 = a + kInvPhi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  while (b - a > xtol) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - kInvPhi * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + kInvPhi * (b - a);
      f2 = f(x2);
    }
    if (f1 < best_f) {
      best_f = f1;
      best_x = x1;
    }
    if (f2 < best_f) {
      best_f = f2;
      best_x = x2;
    }
  }
  return {best_x, best_f};
}

}  // namespace uic

#endif  // UIC_MATH_HPP_
