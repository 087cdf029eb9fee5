#ifndef WBCS_LINALG_HPP
#define WBCS_LINALG_HPP

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include <stdexcept>

#include "wbcs/block_model.hpp"

namespace wbcs {

/// Raised when a matrix expected to be SPD has a nonpositive pivot.
class NotPositiveDefinite : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Solve G x = b for symmetric positive definite G (Cholesky).
inline Vector spd_solve(const Matrix& g, const Vector& b) {
  if (g.rows() != g.cols() || g.rows() != b.size())
    throw std::invalid_argument("spd_solve: dimension mismatch");
  Eigen::LLT<Matrix> llt(g);
  if (llt.info() != Eigen::Success) throw NotPositiveDefinite("spd_solve: matrix is not positive definite");
  return llt.solve(b);
}

struct LeastSquaresSolution {
  Vector x;
  bool regularized = false;  // a 1e-12 ridge was needed
};

/// Minimum-l2-norm minimizer of ||y - A x||_2.
///
/// Wide or square A goes through A'(AA')^{-1} y, tall A through the normal equations. A
/// numerically singular Gram matrix gets a relative 1e-12 ridge and the result is flagged.
inline LeastSquaresSolution min_norm_least_squares(const Matrix& a, const Vector& y) {
  if (a.rows() != y.size()) throw std::invalid_argument("min_norm_least_squares: dimension mismatch");
  const bool wide = a.rows() <= a.cols();
  Matrix gram = wide ? Matrix(a * a.transpose()) : Matrix(a.transpose() * a);
  const Vector rhs = wide ? y : Vector(a.transpose() * y);

  LeastSquaresSolution out;
  Eigen::LLT<Matrix> llt(gram);
  // A pivot that survives Cholesky can still be ~1e-16 of the diagonal; treat that as singular too.
  bool ok = llt.info() == Eigen::Success;
  if (ok) {
    const Vector diag = Matrix(llt.matrixL()).diagonal();
    ok = diag.minCoeff() > 1e-7 * diag.maxCoeff();
  }
  if (!ok) {
    const double scale = gram.diagonal().mean();
    gram.diagonal().array() += 1e-12 * (scale > 0.0 ? scale : 1.0);
    llt.compute(gram);
    if (llt.info() != Eigen::Success)
      throw NotPositiveDefinite("min_norm_least_squares: Gram matrix not factorizable after ridge");
    out.regularized = true;
  }
  const Vector z = llt.solve(rhs);
  out.x = wide ? Vector(a.transpose() * z) : z;
  return out;
}

}  // namespace wbcs

#endif  // WBCS_LINALG_HPP
