#pragma once

#include <memory>
#include <vector>

#include "funcint/spaces.hpp"

namespace funcint {

/// Matrix realization of a nondegenerate quadratic form Q together with its
/// inverse form W on the dual space.
///
/// In folded coordinates Q(b) = b^T A b and W(b') = b'^T G b' with A G = I.
/// A must be symmetric (plain transpose) with positive-definite real part.
/// Immutable after construction; the factorization products are precomputed.
class QuadFormPair {
public:
    /// Validates symmetry and positivity, inverts densely, checks |AG - I|.
    static QuadFormPair from_matrix(MatrixXc a, GridPtr grid = nullptr);

    /// Second-difference-plus-mass form in folded coordinates:
    /// A = stiffness * sum_axis (second difference / spacing^2) + mass^2 * I,
    /// with the per-axis stencil closed by the grid boundary (Dirichlet walls
    /// pinned at zero, free ends left open).
    static QuadFormPair from_action_density(const GridPtr& grid, double mass, double stiffness);

    /// Block-diagonal pair on the tensor-product grid.
    static QuadFormPair direct_sum(const QuadFormPair& a, const QuadFormPair& b);

    const MatrixXc& a() const { return a_; }
    const MatrixXc& g() const { return g_; }
    Complex log_det_a() const { return logdet_a_; }
    Eigen::Index size() const { return a_.rows(); }
    const GridPtr& grid() const { return grid_; }

    Complex q(const FieldVector& b) const;      // b^T A b
    Complex w(const DualVector& bp) const;      // b'^T G b'
    Complex q(const VectorXc& values) const;
    Complex w(const VectorXc& values) const;

    DualVector riesz_d(const FieldVector& b) const;   // D b = A b
    FieldVector riesz_g(const DualVector& bp) const;  // G b'

    /// Pair realizing factor * Q (so W scales by 1 / factor).
    QuadFormPair scaled(Complex factor) const;

private:
    QuadFormPair(MatrixXc a, MatrixXc g, Complex logdet, GridPtr grid);
    void check_size(Eigen::Index n, const char* what) const;

    MatrixXc a_;
    MatrixXc g_;
    Complex logdet_a_;
    GridPtr grid_;
};

using QuadFormPtr = std::shared_ptr<const QuadFormPair>;

/// Finite-rank map L: B -> R^m given by m dual vectors, together with the
/// pushed-forward form Wm_ij = W(b'_i, b'_j) = rows_i^T G rows_j.
/// The inverse form u^T Wm^{-1} u realizes the localized Q.
class Localization {
public:
    static Localization build(QuadFormPtr qf, std::vector<DualVector> rows);

    int dim() const { return static_cast<int>(rows_.size()); }
    const std::vector<DualVector>& rows() const { return rows_; }
    const MatrixXc& wm() const { return wm_; }
    const MatrixXc& wm_inv() const { return wm_inv_; }
    Complex log_det_wm() const { return logdet_wm_; }
    /// Lower-triangular L_chol with L_chol L_chol^T = Wm, the change of
    /// variables used by every localized quadrature.
    const MatrixXc& wm_cholesky() const { return chol_; }
    const QuadFormPtr& quadform() const { return qf_; }

    /// Convenience for one-dimensional localizations: Wm(0,0).
    Complex scalar_w() const;

    /// u = L b = (<b'_1, b>, ..., <b'_m, b>).
    VectorXc apply(const FieldVector& b) const;

    /// Localized form Q_m(u) = u^T Wm^{-1} u.
    Complex q_localized(const VectorXc& u) const;

private:
    Localization() = default;

    QuadFormPtr qf_;
    std::vector<DualVector> rows_;
    MatrixXc wm_;
    MatrixXc wm_inv_;
    MatrixXc chol_;
    Complex logdet_wm_ = 0.0;
};

} // namespace funcint
