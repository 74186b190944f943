#include "funcint/quadforms.hpp"

#include <cmath>
#include <utility>

#include "funcint/errors.hpp"

namespace funcint {

QuadFormPair::QuadFormPair(MatrixXc a, MatrixXc g, Complex logdet, GridPtr grid)
    : a_(std::move(a)), g_(std::move(g)), logdet_a_(logdet), grid_(std::move(grid)) {}

QuadFormPair QuadFormPair::from_matrix(MatrixXc a, GridPtr grid) {
    if (a.rows() != a.cols() || a.rows() == 0) {
        throw DimensionError("QuadFormPair: matrix must be square and non-empty");
    }
    const double scale = a.cwiseAbs().maxCoeff();
    if (symmetry_defect(a) > 1e-12 * std::max(1.0, scale)) {
        throw DegeneracyError("QuadFormPair: matrix is not symmetric");
    }
    if (!real_part_positive_definite(a)) {
        throw DegeneracyError(
            "QuadFormPair: real part of the form is not positive definite; "
            "a nondegenerate form is required (e.g. mass > 0 or Dirichlet walls)");
    }
    if (grid && grid->site_count() != a.rows()) {
        throw DimensionError("QuadFormPair: matrix size does not match grid");
    }

    Eigen::PartialPivLU<MatrixXc> lu(a);
    MatrixXc g = lu.inverse();
    const double residual = (a * g - MatrixXc::Identity(a.rows(), a.cols())).cwiseAbs().maxCoeff();
    if (residual >= 1e-10) {
        throw DegeneracyError("QuadFormPair: inverse residual too large, form is ill-conditioned");
    }

    Complex logdet = 0.0;
    const auto diag = lu.matrixLU().diagonal();
    for (Eigen::Index i = 0; i < diag.size(); ++i) {
        logdet += std::log(diag[i]);
    }
    if (lu.permutationP().determinant() < 0) {
        logdet += Complex(0.0, 3.14159265358979323846);
    }
    return QuadFormPair(std::move(a), std::move(g), logdet, std::move(grid));
}

QuadFormPair QuadFormPair::from_action_density(const GridPtr& grid, double mass,
                                               double stiffness) {
    if (!grid) {
        throw ConfigError("from_action_density: grid required");
    }
    if (mass < 0.0 || stiffness < 0.0) {
        throw DomainError("from_action_density: mass and stiffness must be nonnegative");
    }
    const Eigen::Index n = grid->site_count();
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
    a.diagonal().setConstant(mass * mass);

    for (int axis = 0; axis < grid->axes(); ++axis) {
        const double coef = stiffness / (grid->spacing(axis) * grid->spacing(axis));
        if (coef == 0.0) {
            continue;
        }
        const int extent = grid->dims()[axis];
        for (Eigen::Index site = 0; site < n; ++site) {
            const std::vector<int> idx = grid->unflatten(site);
            const int k = idx[axis];
            // Dirichlet walls sit just outside the interior and contribute
            // the full second-difference diagonal; free ends have degree 1.
            double diag = 2.0;
            if (grid->boundary(axis) == Boundary::Free && (k == 0 || k == extent - 1)) {
                diag = (extent == 1) ? 0.0 : 1.0;
            }
            a(site, site) += coef * diag;
            if (k + 1 < extent) {
                std::vector<int> up = idx;
                up[axis] = k + 1;
                const Eigen::Index other = grid->flatten(up);
                a(site, other) -= coef;
                a(other, site) -= coef;
            }
        }
    }
    return from_matrix(a.cast<Complex>(), grid);
}

QuadFormPair QuadFormPair::direct_sum(const QuadFormPair& a, const QuadFormPair& b) {
    const Eigen::Index na = a.size();
    const Eigen::Index nb = b.size();
    MatrixXc block = MatrixXc::Zero(na + nb, na + nb);
    block.topLeftCorner(na, na) = a.a_;
    block.bottomRightCorner(nb, nb) = b.a_;
    GridPtr grid;
    if (a.grid_ && b.grid_) {
        grid = DomainGrid::tensor_product(*a.grid_, *b.grid_);
    }
    return from_matrix(std::move(block), std::move(grid));
}

void QuadFormPair::check_size(Eigen::Index n, const char* what) const {
    if (n != a_.rows()) {
        throw DimensionError(std::string(what) + ": argument size does not match form");
    }
}

Complex QuadFormPair::q(const VectorXc& values) const {
    check_size(values.size(), "q_eval");
    return values.transpose() * a_ * values;
}

Complex QuadFormPair::w(const VectorXc& values) const {
    check_size(values.size(), "w_eval");
    return values.transpose() * g_ * values;
}

Complex QuadFormPair::q(const FieldVector& b) const {
    return q(b.values());
}

Complex QuadFormPair::w(const DualVector& bp) const {
    return w(bp.values());
}

DualVector QuadFormPair::riesz_d(const FieldVector& b) const {
    check_size(b.size(), "riesz_d");
    return DualVector(b.grid_ptr(), a_ * b.values());
}

FieldVector QuadFormPair::riesz_g(const DualVector& bp) const {
    check_size(bp.size(), "riesz_g");
    return FieldVector(bp.grid_ptr(), g_ * bp.values());
}

QuadFormPair QuadFormPair::scaled(Complex factor) const {
    if (factor == Complex(0.0, 0.0)) {
        throw DomainError("QuadFormPair::scaled: factor must be nonzero");
    }
    return QuadFormPair(factor * a_, g_ / factor, logdet_a_ + static_cast<double>(a_.rows()) * std::log(factor),
                        grid_);
}

Localization Localization::build(QuadFormPtr qf, std::vector<DualVector> rows) {
    if (!qf) {
        throw LocalizationError("localize: quadratic form required");
    }
    const int m = static_cast<int>(rows.size());
    if (m == 0) {
        throw LocalizationError("localize: at least one row required");
    }
    const Eigen::Index n = qf->size();
    MatrixXc r(n, m);
    for (int i = 0; i < m; ++i) {
        if (rows[i].size() != n) {
            throw DimensionError("localize: row size does not match form");
        }
        r.col(i) = rows[i].values();
    }

    Eigen::ColPivHouseholderQR<MatrixXc> qr(r);
    qr.setThreshold(1e-10);
    if (qr.rank() < m) {
        throw LocalizationError("localize: rows are linearly dependent");
    }

    Localization loc;
    loc.qf_ = std::move(qf);
    loc.rows_ = std::move(rows);
    MatrixXc wm = r.transpose() * loc.qf_->g() * r;
    wm = 0.5 * (wm + wm.transpose()).eval();  // exact symmetry for downstream factorizations
    if (!real_part_positive_definite(wm)) {
        throw LocalizationError("localize: pushed-forward form is not positive definite");
    }
    loc.wm_ = wm;
    loc.wm_inv_ = wm.partialPivLu().inverse();
    loc.chol_ = symmetric_cholesky(wm);
    Complex logdet = 0.0;
    for (int i = 0; i < m; ++i) {
        logdet += 2.0 * std::log(loc.chol_(i, i));
    }
    loc.logdet_wm_ = logdet;
    return loc;
}

Complex Localization::scalar_w() const {
    if (dim() != 1) {
        throw LocalizationError("scalar_w: localization is not one-dimensional");
    }
    return wm_(0, 0);
}

VectorXc Localization::apply(const FieldVector& b) const {
    VectorXc u(dim());
    for (int i = 0; i < dim(); ++i) {
        u[i] = pairing(rows_[i], b);
    }
    return u;
}

Complex Localization::q_localized(const VectorXc& u) const {
    if (u.size() != dim()) {
        throw DimensionError("q_localized: argument size does not match localization");
    }
    return u.transpose() * wm_inv_ * u;
}

} // namespace funcint
