#include <doctest.h>

#include <limits>

#include "support.hpp"
#include "tribus/box_qp.hpp"
#include "tribus/errors.hpp"

using namespace tribus;

namespace {

double objective(const Eigen::MatrixXd& H, const Eigen::VectorXd& g, const Eigen::VectorXd& x) {
  return 0.5 * x.dot(H * x) - g.dot(x);
}

// Enumerates every lower/upper/free assignment and keeps the best feasible stationary point.
Eigen::VectorXd brute_force(const Eigen::MatrixXd& H, const Eigen::VectorXd& g, const Eigen::VectorXd& lo,
                            const Eigen::VectorXd& hi) {
  const int n = static_cast<int>(g.size());
  int combos = 1;
  for (int i = 0; i < n; ++i) combos *= 3;
  Eigen::VectorXd best;
  double best_f = std::numeric_limits<double>::infinity();
  for (int c = 0; c < combos; ++c) {
    Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
    std::vector<int> free;
    int code = c;
    for (int i = 0; i < n; ++i, code /= 3) {
      if (code % 3 == 0) x[i] = lo[i];
      else if (code % 3 == 1) x[i] = hi[i];
      else free.push_back(i);
    }
    if (!free.empty()) {
      const int m = static_cast<int>(free.size());
      Eigen::MatrixXd A(m, m);
      Eigen::VectorXd b(m);
      for (int a = 0; a < m; ++a) {
        b[a] = g[free[a]];
        for (int j = 0; j < n; ++j) {
          if (std::find(free.begin(), free.end(), j) == free.end()) b[a] -= H(free[a], j) * x[j];
        }
        for (int j = 0; j < m; ++j) A(a, j) = H(free[a], free[j]);
      }
      const Eigen::VectorXd y = A.fullPivLu().solve(b);
      for (int a = 0; a < m; ++a) x[free[a]] = y[a];
    }
    if (((x - lo).array() < -1e-12).any() || ((x - hi).array() > 1e-12).any()) continue;
    const double f = objective(H, g, x);
    if (f < best_f) {
      best_f = f;
      best = x;
    }
  }
  return best;
}

Eigen::MatrixXd random_spd(std::mt19937_64& rng, int n) {
  Eigen::MatrixXd a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = testing::uniform(rng, -1, 1);
  return a * a.transpose() + 0.05 * Eigen::MatrixXd::Identity(n, n);
}

}  // namespace

TEST_CASE("active set matches brute-force enumeration") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 400; ++trial) {
    const int n = 1 + trial % 4;
    const Eigen::MatrixXd H = random_spd(rng, n);
    Eigen::VectorXd g(n), lo(n), hi(n);
    for (int i = 0; i < n; ++i) {
      g[i] = testing::uniform(rng, -2, 2);
      lo[i] = -testing::uniform(rng, 0.0, 1.0);
      hi[i] = testing::uniform(rng, 0.0, 1.0);
    }
    const BoxQpResult r = solve_box_qp(H, g, lo, hi);
    const Eigen::VectorXd x = brute_force(H, g, lo, hi);
    CHECK((r.x - x).cwiseAbs().maxCoeff() < 1e-9);
    CHECK(r.kkt_residual < 1e-9);
  }
}

TEST_CASE("unconstrained optimum is returned when interior") {
  Eigen::MatrixXd H(2, 2);
  H << 2, 0.5, 0.5, 1;
  Eigen::VectorXd g(2);
  g << 0.1, -0.05;
  const Eigen::VectorXd lo = Eigen::VectorXd::Constant(2, -10), hi = Eigen::VectorXd::Constant(2, 10);
  const BoxQpResult r = solve_box_qp(H, g, lo, hi);
  CHECK((r.x - H.ldlt().solve(g)).norm() < 1e-12);
}

TEST_CASE("pinned boxes and invalid bounds") {
  Eigen::MatrixXd H = Eigen::MatrixXd::Identity(2, 2);
  Eigen::VectorXd g(2);
  g << 1, 1;
  Eigen::VectorXd lo(2), hi(2);
  lo << 0, -1;
  hi << 0, 1;
  CHECK(solve_box_qp(H, g, lo, hi).x == Eigen::Vector2d(0, 1));
  lo << 0.1, -1;
  hi << 1, 1;
  CHECK_THROWS_AS(solve_box_qp(H, g, lo, hi), DomainError);
}

TEST_CASE("singular free block is reported") {
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(2, 2);
  H(0, 0) = 1.0;
  Eigen::VectorXd g(2);
  g << 1, 1;
  const Eigen::VectorXd lo = Eigen::VectorXd::Constant(2, -1), hi = Eigen::VectorXd::Constant(2, 1);
  CHECK_THROWS_AS(solve_box_qp(H, g, lo, hi), DegenerateChainError);
}
