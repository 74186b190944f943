#pragma once

#include <string>
#include <vector>

#include "funcint/quadforms.hpp"

namespace funcint {

/// Quadratic-plus-quartic action S(u) = u^T Wm^{-1} u + lambda sum_i u_i^4
/// in localized coordinates.
struct ActionFunctional {
    QuadFormPtr quadratic;
    double quartic_coupling = 0.0;
};

/// One axis-aligned source slice of the generating-functional tables.
///
/// w_s is the Fourier-route table (normalized transform with imaginary
/// source phase); w_tilt is the real-tilt log-partition used by the
/// mean-field and Legendre machinery.  The two agree at zero source and, up
/// to sign, in the quadratic limit; see docs/conventions.md for the table
/// that fixes every factor against the direct-average oracles.
struct EffectiveAxisSlice {
    Eigen::VectorXd uprime;    // requested source nodes, uniform, containing 0
    Eigen::VectorXd w_s;       // -(1/pi) log of the Fourier transform slice
    Eigen::VectorXd w_tilt;    // -(1/pi) log of the real-tilt partition slice
    Eigen::VectorXd mean;      // +1/2 d(w_tilt)/dj, the tilted mean component
    Eigen::VectorXd gamma_v;   // mean-field points, ascending (after gamma_legendre)
    Eigen::VectorXd gamma;     // effective action at gamma_v

    // extended-by-two-nodes tables backing the derivative stencils
    Eigen::VectorXd uprime_ext;
    Eigen::VectorXd w_tilt_ext;
};

class EffectiveState {
public:
    const ActionFunctional& action() const { return action_; }
    const Localization& localization() const { return loc_; }
    double normalization() const { return normalization_; }  // N = flat-normalized Int e^{-pi S}
    const std::vector<EffectiveAxisSlice>& slices() const { return slices_; }
    int quad_order() const { return quad_order_; }
    bool has_gamma() const { return has_gamma_; }

private:
    friend EffectiveState w_s_compute(const ActionFunctional&, const Localization&,
                                      const Eigen::VectorXd&, int);
    friend EffectiveState gamma_legendre(EffectiveState state);

    EffectiveState(ActionFunctional action, Localization loc)
        : action_(std::move(action)), loc_(std::move(loc)) {}

    ActionFunctional action_;
    Localization loc_;
    double normalization_ = 1.0;
    std::vector<EffectiveAxisSlice> slices_;
    int quad_order_ = 0;
    bool has_gamma_ = false;
};

/// Tabulates the generating-functional slices over the given uniform source
/// grid (which must contain 0).  For several axes the localized form must be
/// diagonal, so that axis-aligned sources keep the mean on-axis.
EffectiveState w_s_compute(const ActionFunctional& action, const Localization& loc,
                           const Eigen::VectorXd& uprime_grid, int quad_order = 0);

/// Mean field at an axis-aligned source inside the tabulated range:
/// +1/2 d(w_tilt)/dj along the source axis, matching the direct tilted
/// average Int u e^{-pi S - 2 pi <u', u>} du / Int e^{-pi S - 2 pi <u', u>} du.
Eigen::VectorXd mean_field(const EffectiveState& state, const Eigen::VectorXd& uprime);

/// Legendre step: inverts the (strictly monotone) mean field per axis and
/// tabulates Gamma(v) = w_tilt(j(v)) - 2 j(v) v.  In the quadratic limit
/// Gamma(v) - Gamma(0) recovers the slice form v^2 / Wm_aa.
EffectiveState gamma_legendre(EffectiveState state);

/// |dGamma/dv| at the zero-source mean field, summed over axes.  Stationarity
/// of the effective action at the free mean.
double quantum_eom_residual(const EffectiveState& state);

/// Worst round-trip error of the Legendre pair: for interior sources j,
/// invert dGamma/dv = -2j numerically and compare Gamma(v) + 2 j v with the
/// tabulated w_tilt(j).
double legendre_roundtrip_error(const EffectiveState& state);

/// Worst deviation |Gamma(v) - Gamma(0) - v^2 / Wm_aa| over the table; the
/// quadratic fixed point (meaningful for quartic_coupling = 0).
double quadratic_action_recovery_error(const EffectiveState& state);

/// Sparse multivariate polynomial with real coefficients, degree <= 6.
class Polynomial {
public:
    explicit Polynomial(int dim);

    /// Semicolon-separated monomials: "1.5 u0^2 u1; -2 u1^3; 1".
    static Polynomial parse(const std::string& text, int dim);

    void add_term(std::vector<int> powers, double coeff);
    int dim() const { return dim_; }
    int degree() const;
    double eval(const Eigen::VectorXd& u) const;
    Polynomial derivative(int axis) const;

private:
    struct Term {
        std::vector<int> powers;
        double coeff;
    };

    int dim_;
    std::vector<Term> terms_;
};

/// Integration-by-parts defect of the Gaussian weight e^{-pi Q_m}:
/// sum_i | <d_i F> - pi <F d_i Q_m> | under the normalized weight.
/// Vanishes to quadrature accuracy for any polynomial F.
double schwinger_dyson_residual(const Localization& loc, const Polynomial& f,
                                int quad_order = 24);

} // namespace funcint
