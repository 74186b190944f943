#pragma once

#include <functional>
#include <string>
#include <vector>

#include "funcint/integrators.hpp"

namespace funcint {

/// Driving data for a Pfaffian differential system on R^M:
/// dp = X(p) db + Y(p) dt with p(t_0) = m0, where X has `driver_dim`
/// columns.  Fields are plain callables; built-in sets come from the
/// catalog below.
struct VectorFieldSet {
    int target_dim = 0;
    int driver_dim = 0;
    std::function<Eigen::MatrixXd(const Eigen::VectorXd&)> x;
    std::function<Eigen::VectorXd(const Eigen::VectorXd&)> y;
    Eigen::VectorXd m0;
    double blowup_bound = 1e8;

    /// X = identity, Y = 0: development is translation by the driver.
    static VectorFieldSet flat(int dim);
    /// M = 2, n = 1, X(p) = (-p2, p1): development winds around the circle
    /// through m0.
    static VectorFieldSet rotation(Eigen::Vector2d m0 = Eigen::Vector2d(1.0, 0.0));
    static VectorFieldSet scaled_rotation(double omega,
                                          Eigen::Vector2d m0 = Eigen::Vector2d(1.0, 0.0));
    /// X = identity, Y(p) = B p + c.
    static VectorFieldSet affine(Eigen::MatrixXd b, Eigen::VectorXd c, Eigen::VectorXd m0);
    /// Lookup by catalog name: flat | rotation | scaled-rotation | affine.
    static VectorFieldSet by_name(const std::string& name, const std::vector<double>& params);
};

/// Sampled driver path: raw (unfolded) values, one column per time node.
struct DriverPath {
    Eigen::VectorXd times;
    Eigen::MatrixXd values;  // driver_dim x node count
};

/// Development result.  rank_defects counts visited points where the X
/// columns lost rank (detected on a coarse stride, reported only).
struct ParamSolution {
    Eigen::VectorXd times;
    Eigen::MatrixXd points;  // target_dim x (steps + 1)
    int rank_defects = 0;
};

/// Integrates dp = X(p) db + Y(p) dt by the explicit midpoint rule
/// (Stratonovich-consistent for rough drivers; order 2 for smooth ones).
/// The driver is refined to `steps` intervals by linear interpolation;
/// steps must be at least the driver's own interval count.
ParamSolution develop_path(const VectorFieldSet& vfs, const DriverPath& driver, int steps);

/// Monte Carlo pullback: F averaged over developments of Gaussian-law
/// drivers.  Drivers come from samples on the spec's one-axis grid, made
/// pointed by a zero node at t_a (and a zero node at t_b on Dirichlet
/// grids).  Per-sample development failures are counted out of the mean and
/// reported in McEstimate::failed.
McEstimate pullback_integrate(const VectorFieldSet& vfs, const IntegratorSpec& spec,
                              const std::function<Complex(const ParamSolution&)>& f,
                              std::int64_t count, std::uint64_t seed, int workers = 1,
                              int steps = 0);

/// Point-wise field development on a (d+1) grid: each spatial site evolves
/// along the designated time axis, driven by that site's time series and
/// started from the boundary value f_a(site).
struct FieldDevelopment {
    Eigen::VectorXd times;
    std::vector<Eigen::MatrixXd> site_paths;  // target_dim x time nodes, per spatial site
    std::vector<Eigen::Index> spatial_sites;
};

FieldDevelopment field_parametrize(const VectorFieldSet& vfs, const Eigen::MatrixXd& f_a,
                                   const FieldVector& b, int time_axis = -1);

/// Invertible linear map M on the space together with the induced dual map
/// R = M^T and log Det R'.
class LinearMapPair {
public:
    explicit LinearMapPair(MatrixXc m);

    const MatrixXc& map() const { return m_; }
    Complex log_det() const { return logdet_; }

    VectorXc apply(const VectorXc& x) const { return m_ * x; }
    VectorXc apply_inverse(const VectorXc& y) const;
    /// R y' = M^T y'.
    VectorXc apply_dual(const VectorXc& yp) const { return m_.transpose() * yp; }
    double transpose_defect() const;  // |<R y', x> - <y', M x>| over probes

private:
    MatrixXc m_;
    Eigen::PartialPivLU<MatrixXc> lu_;
    Complex logdet_;
};

/// Residual |LHS - RHS| of the change-of-variable identity for the Gaussian
/// analytic engine.  LHS integrates the comb against the transformed
/// integrator (form rebuilt from M^{-T} A M^{-1}, Z scaled by (Det R')^{-1});
/// RHS pushes the comb through R with the same Jacobian factor and uses the
/// original form.  Both sides are closed-form sums; the residual probes the
/// transformation machinery, not quadrature.
double change_of_variable_residual(const LinearMapPair& pair, const IntegratorSpec& spec,
                                   const DiracComb& comb);

/// Residual of flat-engine translation invariance: integrating the phase
/// shifted by u0 must equal the unshifted value times the compensating
/// phase e^{-2 pi i <u', u0>}.
double translation_invariance_residual(const MatrixXc& wm, const VectorXc& u0,
                                       const VectorXc& uprime, int quad_order = 64);

} // namespace funcint
