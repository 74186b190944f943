#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "funcint/measures.hpp"
#include "funcint/quadforms.hpp"

namespace funcint {

/// Characterization of an integrator by its (Theta, Z) data.
///
/// Gaussian:  Theta = e^{-(pi/s) Q - 2 pi i <.,.>},  Z = e^{-pi s W};
///            requires Re(Q/s) positive definite.
/// Hermite:   order-n Hermite kernel over the same Gaussian weight; only the
///            localized integration formulas are exposed for it.
/// Flat:      translation-invariant integrator on R^m for a given form Wm.
class IntegratorSpec {
public:
    enum class Kind { Gaussian, Hermite, Flat };

    static IntegratorSpec gaussian(QuadFormPtr qf, Complex s);
    static IntegratorSpec hermite(QuadFormPtr qf, int order, int max_order = 12);
    static IntegratorSpec flat(MatrixXc wm);

    Kind kind() const { return kind_; }
    Complex s() const { return s_; }
    int hermite_order() const { return order_; }
    const QuadFormPair& quadform() const;
    const QuadFormPtr& quadform_ptr() const { return qf_; }
    const MatrixXc& flat_wm() const { return flat_wm_; }

private:
    IntegratorSpec() = default;

    Kind kind_ = Kind::Gaussian;
    QuadFormPtr qf_;
    Complex s_ = 1.0;
    int order_ = 0;
    MatrixXc flat_wm_;
};

/// Monte Carlo estimate with a reproducibility contract: the value is a pure
/// function of (seed, samples), independent of the worker count.
struct McEstimate {
    Complex mean = 0.0;
    double std_error = 0.0;
    std::int64_t samples = 0;
    std::uint64_t seed = 0;
    std::int64_t failed = 0;  // integrand failures counted out of the mean
};

/// Z(b') = e^{-pi s W(b')}, the Fourier-Stieltjes transform of the Gaussian
/// integrator.  Only the Gaussian kind exposes Z.
Complex z_eval(const IntegratorSpec& spec, const DualVector& bp);

/// Integral of F_mu against the integrator: sum_k c_k Z(b'_k).
/// Bounded by the total variation of the comb.
Complex integrate_analytic(const IntegratorSpec& spec, const DiracComb& comb);

/// Mean-value route: evaluates the constant kernel Theta~(<b>, .) := Z(.)
/// against the comb.  Agrees with integrate_analytic term by term.
Complex mean_value_route(const IntegratorSpec& spec, const DiracComb& comb);

/// Draws from the centered Gaussian law with covariance (s / 2 pi) G, the
/// law whose phase expectations reproduce Z.  Requires real positive s.
/// Sample i is a pure function of (seed, i).
class GaussianSampler {
public:
    explicit GaussianSampler(const IntegratorSpec& spec, GridPtr grid = nullptr);

    FieldVector sample(std::uint64_t seed, std::uint64_t index) const;
    void sample_values(std::uint64_t seed, std::uint64_t index, Eigen::VectorXd& out) const;

    const GridPtr& grid() const { return grid_; }
    Eigen::Index size() const { return unwhiten_.rows(); }

private:
    GridPtr grid_;
    Eigen::MatrixXd unwhiten_;  // sqrt(s / 2 pi) * L^{-T} from A = L L^T
};

std::vector<FieldVector> sample_gaussian(const IntegratorSpec& spec, std::int64_t count,
                                         std::uint64_t seed);

using McIntegrand = std::function<Complex(const FieldVector&)>;

/// Monte Carlo average of F under the Gaussian law.  Non-finite integrand
/// values raise SamplingError.  Deterministic for fixed (seed, count):
/// samples are drawn from counter-based streams and block sums are combined
/// by a fixed pairwise tree, so the result is bit-identical for any worker
/// count.
McEstimate integrate_mc(const IntegratorSpec& spec, const McIntegrand& f, std::int64_t count,
                        std::uint64_t seed, int workers = 1);

/// Same samples evaluated against several integrands at once.
std::vector<McEstimate> integrate_mc_multi(const IntegratorSpec& spec,
                                           const std::vector<McIntegrand>& fs,
                                           std::int64_t count, std::uint64_t seed,
                                           int workers = 1);

/// Like integrate_mc, but per-sample integrand failures (engine errors or
/// non-finite values) are counted out of the mean instead of aborting.
McEstimate integrate_mc_counting(const IntegratorSpec& spec, const McIntegrand& f,
                                 std::int64_t count, std::uint64_t seed, int workers = 1);

/// Localized order-n Hermite integral
///   (det pi Wm / 2)^{n/2} (det Wm)^{-1/2}
///     * Int f(u) H_alpha(sqrt(pi) v(u)) e^{-pi u^T Wm^{-1} u} du
/// evaluated by tensor Gauss-Hermite quadrature after the change of
/// variables u = L v with L L^T = Wm.  `alpha` is the multi-index of total
/// order n; by default all order sits on the first axis.
Complex integrate_localized_hermite(int n, const std::function<Complex(const VectorXc&)>& f,
                                    const Localization& loc, std::vector<int> alpha = {},
                                    int quad_order = 0);

/// The degree-m Hermite test functional in one localized coordinate:
/// f_m(u) = (pi W / 2)^{m/2} H_m(sqrt(pi / W) u).
std::function<Complex(const VectorXc&)> hermite_test_functional(int m, Complex w);

/// Int f_m against the order-n Hermite integrator on a one-dimensional
/// localization; equals (pi W)^m n! delta_{nm}.
Complex hermite_orthogonality(int n, int m_order, const Localization& loc);

/// <n|m> = Int H^_n against the order-m Hermite integrator, localized.
/// Vanishes unless n = m_order.
Complex scalar_product_nm(int n, int m_order, const Localization& loc);

/// Normalized flat integral Int f(u) e^{-pi u^T Wm^{-1} u} (det Wm)^{-1/2} du.
/// For f = e^{-2 pi i <u', .>} this returns e^{-pi Wm(u')}.
Complex flat_integrate(const MatrixXc& wm, const std::function<Complex(const VectorXc&)>& f,
                       int quad_order = 64);

/// Quadrature route for the defining identity: localize a phase-only comb
/// onto the span of its own points and flat-integrate against s * Wm.
/// Agrees with integrate_analytic for independent points, m <= 4.
Complex definition3_quadrature_route(const IntegratorSpec& spec, const DiracComb& comb,
                                     int quad_order = 64);

} // namespace funcint
