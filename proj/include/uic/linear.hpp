#ifndef UIC_LINEAR_HPP_
#define UIC_LINEAR_HPP_

#include <Eigen/Core>

namespace uic {

/// Linear scorer w^T x + b with decision rule sign(w^T x + b).
struct LinearClassifier {
  Eigen::VectorXd w;
  double b = 0.0;

  double margin(const Eigen::VectorXd& x) const { return w.dot(x) + b; }
  int predict(const Eigen::VectorXd& x) const {
    return margin(x) > 0.0 ? 1 : 0;
  }
};

}  // namespace uic

#endif  // UIC_LINEAR_HPP_
