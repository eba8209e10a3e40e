#pragma once

#include <Eigen/Core>

namespace tribus {

struct BoxQpResult {
  Eigen::VectorXd x;
  /// Infinity norm of the projected gradient at `x`.
  double kkt_residual = 0.0;
  int iterations = 0;
};

/// Minimizes 0.5 x'Hx - g'x subject to lo <= x <= hi with a primal active-set
/// method. H must be symmetric positive definite on every free subspace the
/// method visits; otherwise DegenerateChainError is thrown. Requires lo <= 0 <= hi.
BoxQpResult solve_box_qp(const Eigen::MatrixXd& H, const Eigen::VectorXd& g, const Eigen::VectorXd& lo,
                         const Eigen::VectorXd& hi);

}  // namespace tribus
