#pragma once

#include <complex>

#include <Eigen/Dense>

namespace funcint {

using Complex = std::complex<double>;
using MatrixXc = Eigen::MatrixXcd;
using VectorXc = Eigen::VectorXcd;

/// log(det a) for an invertible complex matrix, accumulated in log space.
Complex log_det(const MatrixXc& a);

/// Max-norm symmetry defect |a - a^T|_max (plain transpose, no conjugation).
double symmetry_defect(const MatrixXc& a);

/// True when the symmetrized real part of `a` is positive definite.
bool real_part_positive_definite(const MatrixXc& a);

/// Lower-triangular L with L L^T = a (plain transpose).  For a real SPD
/// matrix this is the ordinary Cholesky factor; for a complex symmetric
/// matrix with positive-definite real part the principal square root is
/// taken on each pivot.  Throws DegeneracyError when a pivot vanishes.
MatrixXc symmetric_cholesky(const MatrixXc& a);

/// True when every entry has |imag| <= tol * max(1, |matrix|_max).
bool effectively_real(const MatrixXc& a, double tol = 1e-14);

} // namespace funcint
