#pragma once

#include <Eigen/Dense>
#include <functional>

namespace trackrel {

using LinearOperator = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

struct CgResult {
  Eigen::VectorXd x;
  int iterations = 0;
  double relative_residual = 0.0;
  bool converged = false;
};

/// Jacobi-preconditioned conjugate gradient for an SPD operator. Stops when
/// ||b - A x|| <= tolerance * ||b|| or after max_iterations.
CgResult conjugate_gradient(const LinearOperator& apply, const Eigen::VectorXd& b,
                            const Eigen::VectorXd& diagonal, double tolerance, int max_iterations,
                            const Eigen::VectorXd* initial = nullptr);

/// Cholesky solve of an SPD system, factorizing `a` in place. Only the lower
/// triangle is read. Throws NumericError if factorization fails.
Eigen::VectorXd solve_spd(Eigen::MatrixXd a, const Eigen::VectorXd& b);

}  // namespace trackrel
