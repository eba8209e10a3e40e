#include "tribus/box_qp.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <limits>
#include <vector>

#include "tribus/errors.hpp"

namespace tribus {

namespace {

enum class Bound : char { Free, Lower, Upper };

double projected_gradient_norm(const Eigen::VectorXd& x, const Eigen::VectorXd& grad, const Eigen::VectorXd& lo,
                               const Eigen::VectorXd& hi) {
  double worst = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    double r = grad[i];
    if (x[i] <= lo[i] && r > 0.0) r = 0.0;  // pushing into the lower bound is allowed
    if (x[i] >= hi[i] && r < 0.0) r = 0.0;
    worst = std::max(worst, std::abs(r));
  }
  return worst;
}

}  // namespace

BoxQpResult solve_box_qp(const Eigen::MatrixXd& H, const Eigen::VectorXd& g, const Eigen::VectorXd& lo,
                         const Eigen::VectorXd& hi) {
  const Eigen::Index n = g.size();
  std::vector<Bound> state(static_cast<std::size_t>(n), Bound::Free);
  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (lo[i] > 0.0 || hi[i] < 0.0 || lo[i] > hi[i]) throw DomainError("box QP needs lo <= 0 <= hi");
    // Degenerate boxes pin the variable.
    if (lo[i] == hi[i]) state[static_cast<std::size_t>(i)] = Bound::Lower;
  }

  BoxQpResult result;
  const int max_iterations = 10 * static_cast<int>(n) + 50;
  for (int iter = 0; iter < max_iterations; ++iter) {
    result.iterations = iter + 1;

    std::vector<Eigen::Index> free;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (state[static_cast<std::size_t>(i)] == Bound::Free) free.push_back(i);
    }

    // Equality-constrained minimizer over the free set with the rest pinned.
    Eigen::VectorXd target = x;
    if (!free.empty()) {
      const auto nf = static_cast<Eigen::Index>(free.size());
      Eigen::MatrixXd Hff(nf, nf);
      Eigen::VectorXd rhs(nf);
      for (Eigen::Index a = 0; a < nf; ++a) {
        rhs[a] = g[free[a]];
        for (Eigen::Index j = 0; j < n; ++j) {
          if (state[static_cast<std::size_t>(j)] != Bound::Free) rhs[a] -= H(free[a], j) * x[j];
        }
        for (Eigen::Index b = 0; b < nf; ++b) Hff(a, b) = H(free[a], free[b]);
      }
      Eigen::LLT<Eigen::MatrixXd> llt(Hff);
      if (llt.info() != Eigen::Success || llt.matrixLLT().diagonal().minCoeff() <= 1e-12 * std::max(1.0, Hff.diagonal().maxCoeff()))
        throw DegenerateChainError("QP Hessian is singular on the free joints (rank-deficient Jacobian with zero damping)");
      const Eigen::VectorXd xf = llt.solve(rhs);
      for (Eigen::Index a = 0; a < nf; ++a) target[free[a]] = xf[a];
    }

    // Walk toward the target, stopping at the first bound hit.
    double step = 1.0;
    Eigen::Index blocking = -1;
    Bound blocking_side = Bound::Free;
    for (Eigen::Index i : free) {
      const double d = target[i] - x[i];
      if (d > 0.0 && target[i] > hi[i]) {
        const double s = (hi[i] - x[i]) / d;
        if (s < step) { step = s; blocking = i; blocking_side = Bound::Upper; }
      } else if (d < 0.0 && target[i] < lo[i]) {
        const double s = (lo[i] - x[i]) / d;
        if (s < step) { step = s; blocking = i; blocking_side = Bound::Lower; }
      }
    }
    step = std::max(step, 0.0);
    x += step * (target - x);
    if (blocking >= 0) {
      state[static_cast<std::size_t>(blocking)] = blocking_side;
      x[blocking] = blocking_side == Bound::Upper ? hi[blocking] : lo[blocking];
      continue;
    }

    // Optimal on the current working set; release the bound with the worst multiplier.
    const Eigen::VectorXd grad = H * x - g;
    Eigen::Index release = -1;
    double worst = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto s = state[static_cast<std::size_t>(i)];
      if (s == Bound::Free || lo[i] == hi[i]) continue;
      // At a lower bound the objective must not decrease moving up: grad >= 0.
      const double violation = s == Bound::Lower ? -grad[i] : grad[i];
      if (violation > worst) { worst = violation; release = i; }
    }
    if (release < 0 || worst <= 1e-14 * std::max(1.0, g.cwiseAbs().maxCoeff())) {
      result.x = x;
      result.kkt_residual = projected_gradient_norm(x, grad, lo, hi);
      return result;
    }
    state[static_cast<std::size_t>(release)] = Bound::Free;
  }

  result.x = x;
  result.kkt_residual = projected_gradient_norm(x, H * x - g, lo, hi);
  return result;
}

}  // namespace tribus
