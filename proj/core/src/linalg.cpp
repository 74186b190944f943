#include "funcint/linalg.hpp"

#include <cmath>

#include "funcint/errors.hpp"

namespace funcint {

Complex log_det(const MatrixXc& a) {
    Eigen::PartialPivLU<MatrixXc> lu(a);
    Complex sum = 0.0;
    const auto diag = lu.matrixLU().diagonal();
    for (Eigen::Index i = 0; i < diag.size(); ++i) {
        const Complex d = diag[i];
        if (d == Complex(0.0, 0.0)) {
            throw DegeneracyError("log_det: matrix is singular");
        }
        sum += std::log(d);
    }
    if (lu.permutationP().determinant() < 0) {
        sum += Complex(0.0, 3.14159265358979323846);
    }
    return sum;
}

double symmetry_defect(const MatrixXc& a) {
    return (a - a.transpose()).cwiseAbs().maxCoeff();
}

bool real_part_positive_definite(const MatrixXc& a) {
    Eigen::MatrixXd re = 0.5 * (a.real() + a.real().transpose());
    Eigen::LDLT<Eigen::MatrixXd> ldlt(re);
    if (ldlt.info() != Eigen::Success) {
        return false;
    }
    const auto d = ldlt.vectorD();
    const double dmax = d.maxCoeff();
    if (dmax <= 0.0) {
        return false;
    }
    const double floor = dmax * static_cast<double>(re.rows()) * 1e-14;
    return d.minCoeff() > floor;
}

MatrixXc symmetric_cholesky(const MatrixXc& a) {
    const Eigen::Index n = a.rows();
    MatrixXc l = MatrixXc::Zero(n, n);
    const double scale = a.cwiseAbs().maxCoeff();
    for (Eigen::Index j = 0; j < n; ++j) {
        Complex pivot = a(j, j);
        for (Eigen::Index k = 0; k < j; ++k) {
            pivot -= l(j, k) * l(j, k);
        }
        if (std::abs(pivot) < 1e-14 * scale) {
            throw DegeneracyError("symmetric_cholesky: vanishing pivot");
        }
        const Complex root = std::sqrt(pivot);
        l(j, j) = root;
        for (Eigen::Index i = j + 1; i < n; ++i) {
            Complex acc = a(i, j);
            for (Eigen::Index k = 0; k < j; ++k) {
                acc -= l(i, k) * l(j, k);
            }
            l(i, j) = acc / root;
        }
    }
    return l;
}

bool effectively_real(const MatrixXc& a, double tol) {
    const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
    return a.imag().cwiseAbs().maxCoeff() <= tol * scale;
}

} // namespace funcint
