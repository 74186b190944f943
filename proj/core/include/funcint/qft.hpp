#pragma once

#include <utility>
#include <vector>

#include "funcint/integrators.hpp"

namespace funcint {

/// Space-time lattice with Dirichlet walls in time: fluctuations vanish at
/// t_a and t_b, realizing the boundary-conditioned fluctuation space.
/// Interior sites only; site counts are the interior counts.
struct FoliatedLattice {
    int spatial_sites = 4;
    int time_sites = 4;
    double spatial_spacing = 1.0;
    double time_spacing = 1.0;
    Boundary spatial_boundary = Boundary::Dirichlet;

    double t_a = 0.0;
    double s() const { return (time_sites + 1) * time_spacing; }  // t_b - t_a
    double t_b() const { return t_a + s(); }

    GridPtr grid() const;
    /// A = -Laplacian_{d+1} + mass^2 in folded coordinates.
    QuadFormPtr quadform(double mass) const;
    /// One-dimensional localization along the dual unit vector at a site
    /// (defaults to the central site).
    Localization central_localization(double mass, Eigen::Index site = -1) const;
};

/// Normalized overlap at the given Hermite level: 1 for level 0 and 0 for
/// higher levels, evaluated through the localized quadrature (not hardcoded).
Complex vacuum_overlap(const FoliatedLattice& lattice, double mass, int hermite_level = 0);

struct TwoPointResult {
    std::vector<std::pair<Eigen::Index, Eigen::Index>> pairs;
    std::vector<McEstimate> mc;
    std::vector<double> exact;  // (1/2pi) (A^{-1})_ij
};

/// Monte Carlo two-point function <b_i b_j> under the s = 1 Gaussian law on
/// the lattice form, against the exact inverse-matrix reference.
TwoPointResult free_field_twopoint(const FoliatedLattice& lattice, double mass,
                                   const std::vector<std::pair<Eigen::Index, Eigen::Index>>& pairs,
                                   std::int64_t count, std::uint64_t seed, int workers = 1);

/// (s / 2 pi) A^{-1}: the exact covariance for integrator parameter s.
Eigen::MatrixXd exact_twopoint_matrix(const FoliatedLattice& lattice, double mass,
                                      double s = 1.0);

/// Lattice expectation at Hermite level n of a functional expressed in the
/// localized coordinate.  Reduces to vacuum_overlap for f == 1, n = 0.
Complex vev_hermite(const FoliatedLattice& lattice, int n,
                    const std::function<Complex(const VectorXc&)>& f, const Localization& loc);

} // namespace funcint
