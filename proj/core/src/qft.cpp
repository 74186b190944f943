#include "funcint/qft.hpp"

#include <cmath>

#include "funcint/errors.hpp"

namespace funcint {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;
}

GridPtr FoliatedLattice::grid() const {
    if (spatial_sites < 1 || time_sites < 1) {
        throw ConfigError("FoliatedLattice: site counts must be positive");
    }
    GridSpec spec;
    spec.dims = {spatial_sites, time_sites};
    spec.spacing = {spatial_spacing, time_spacing};
    spec.boundary = {spatial_boundary, Boundary::Dirichlet};
    spec.dims_are_interior = true;
    return DomainGrid::build(spec);
}

QuadFormPtr FoliatedLattice::quadform(double mass) const {
    return std::make_shared<QuadFormPair>(
        QuadFormPair::from_action_density(grid(), mass, 1.0));
}

Localization FoliatedLattice::central_localization(double mass, Eigen::Index site) const {
    QuadFormPtr qf = quadform(mass);
    const GridPtr g = qf->grid();
    if (site < 0) {
        site = g->site_count() / 2;
    }
    if (site >= g->site_count()) {
        throw DimensionError("central_localization: site out of range");
    }
    VectorXc row = VectorXc::Zero(g->site_count());
    row[site] = 1.0;
    std::vector<DualVector> rows;
    rows.emplace_back(g, std::move(row));
    return Localization::build(std::move(qf), std::move(rows));
}

Complex vacuum_overlap(const FoliatedLattice& lattice, double mass, int hermite_level) {
    const Localization loc = lattice.central_localization(mass);
    const auto one = [](const VectorXc&) { return Complex(1.0, 0.0); };
    return integrate_localized_hermite(hermite_level, one, loc);
}

Eigen::MatrixXd exact_twopoint_matrix(const FoliatedLattice& lattice, double mass, double s) {
    const QuadFormPtr qf = lattice.quadform(mass);
    return (s / kTwoPi) * qf->g().real();
}

TwoPointResult free_field_twopoint(const FoliatedLattice& lattice, double mass,
                                   const std::vector<std::pair<Eigen::Index, Eigen::Index>>& pairs,
                                   std::int64_t count, std::uint64_t seed, int workers) {
    QuadFormPtr qf = lattice.quadform(mass);
    const Eigen::Index n = qf->size();
    for (const auto& [i, j] : pairs) {
        if (i < 0 || j < 0 || i >= n || j >= n) {
            throw DimensionError("free_field_twopoint: site index out of range");
        }
    }

    const IntegratorSpec spec = IntegratorSpec::gaussian(qf, 1.0);
    std::vector<McIntegrand> fs;
    fs.reserve(pairs.size());
    for (const auto& [i, j] : pairs) {
        fs.push_back([i = i, j = j](const FieldVector& b) {
            return b.values()[i] * b.values()[j];
        });
    }

    TwoPointResult result;
    result.pairs = pairs;
    result.mc = integrate_mc_multi(spec, fs, count, seed, workers);
    const Eigen::MatrixXd exact = exact_twopoint_matrix(lattice, mass, 1.0);
    result.exact.reserve(pairs.size());
    for (const auto& [i, j] : pairs) {
        result.exact.push_back(exact(i, j));
    }
    return result;
}

Complex vev_hermite(const FoliatedLattice& lattice, int n,
                    const std::function<Complex(const VectorXc&)>& f, const Localization& loc) {
    if (loc.dim() != 1) {
        throw LocalizationError("vev_hermite: one-dimensional localization required");
    }
    if (loc.quadform()->size() != lattice.grid()->site_count()) {
        throw DimensionError("vev_hermite: localization does not live on this lattice");
    }
    return integrate_localized_hermite(n, f, loc);
}

} // namespace funcint
