#include "trackrel/linalg.hpp"

#include "trackrel/error.hpp"

namespace trackrel {

CgResult conjugate_gradient(const LinearOperator& apply, const Eigen::VectorXd& b,
                            const Eigen::VectorXd& diagonal, double tolerance, int max_iterations,
                            const Eigen::VectorXd* initial) {
  CgResult out;
  const double b_norm = b.norm();
  out.x = initial ? *initial : Eigen::VectorXd::Zero(b.size());
  if (b_norm == 0.0) {
    out.x.setZero();
    out.converged = true;
    return out;
  }
  const Eigen::VectorXd inv_diag = diagonal.cwiseInverse();
  Eigen::VectorXd r = initial ? Eigen::VectorXd(b - apply(out.x)) : b;
  Eigen::VectorXd z = inv_diag.cwiseProduct(r);
  Eigen::VectorXd p = z;
  double rz = r.dot(z);
  out.relative_residual = r.norm() / b_norm;
  while (out.relative_residual > tolerance && out.iterations < max_iterations) {
    const Eigen::VectorXd ap = apply(p);
    const double step = rz / p.dot(ap);
    out.x += step * p;
    r -= step * ap;
    ++out.iterations;
    out.relative_residual = r.norm() / b_norm;
    z = inv_diag.cwiseProduct(r);
    const double rz_next = r.dot(z);
    p = z + (rz_next / rz) * p;
    rz = rz_next;
  }
  out.converged = out.relative_residual <= tolerance;
  return out;
}

Eigen::VectorXd solve_spd(Eigen::MatrixXd a, const Eigen::VectorXd& b) {
  Eigen::LLT<Eigen::Ref<Eigen::MatrixXd>> llt(a);
  if (llt.info() != Eigen::Success) throw NumericError("solve_spd: matrix is not positive definite");
  return llt.solve(b);
}

}  // namespace trackrel
