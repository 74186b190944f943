#include "funcint/spaces.hpp"

#include <cmath>

#include "funcint/errors.hpp"

namespace funcint {

std::shared_ptr<const DomainGrid> DomainGrid::build(const GridSpec& spec) {
    const std::size_t axes = spec.dims.size();
    if (axes == 0) {
        throw ConfigError("grid: at least one axis required");
    }
    if (spec.spacing.size() != axes) {
        throw ConfigError("grid: spacing list must match axis count");
    }
    std::vector<Boundary> boundary = spec.boundary;
    if (boundary.size() == 1 && axes > 1) {
        boundary.assign(axes, spec.boundary[0]);
    }
    if (boundary.size() != axes) {
        throw ConfigError("grid: boundary list must match axis count");
    }

    auto grid = std::shared_ptr<DomainGrid>(new DomainGrid());
    grid->spacing_ = spec.spacing;
    grid->boundary_ = boundary;
    grid->dims_.resize(axes);
    grid->sites_ = 1;
    grid->weight_ = 1.0;
    for (std::size_t a = 0; a < axes; ++a) {
        if (spec.spacing[a] <= 0.0) {
            throw ConfigError("grid: spacing must be positive");
        }
        int interior = spec.dims[a];
        if (!spec.dims_are_interior && boundary[a] == Boundary::Dirichlet) {
            interior -= 2;  // wall sites leave the vector space
        }
        if (interior < 1) {
            throw ConfigError("grid: axis has no interior sites");
        }
        grid->dims_[a] = interior;
        grid->sites_ *= interior;
        grid->weight_ *= spec.spacing[a];
    }
    return grid;
}

Eigen::Index DomainGrid::flatten(const std::vector<int>& idx) const {
    Eigen::Index site = 0;
    for (int a = axes() - 1; a >= 0; --a) {
        site = site * dims_[a] + idx[a];
    }
    return site;
}

std::vector<int> DomainGrid::unflatten(Eigen::Index site) const {
    std::vector<int> idx(axes());
    for (int a = 0; a < axes(); ++a) {
        idx[a] = static_cast<int>(site % dims_[a]);
        site /= dims_[a];
    }
    return idx;
}

bool DomainGrid::same_layout(const DomainGrid& other) const {
    return dims_ == other.dims_ && spacing_ == other.spacing_ && boundary_ == other.boundary_;
}

std::shared_ptr<const DomainGrid> DomainGrid::tensor_product(const DomainGrid& a,
                                                             const DomainGrid& b) {
    GridSpec spec;
    spec.dims_are_interior = true;
    spec.dims = a.dims_;
    spec.dims.insert(spec.dims.end(), b.dims_.begin(), b.dims_.end());
    spec.spacing = a.spacing_;
    spec.spacing.insert(spec.spacing.end(), b.spacing_.begin(), b.spacing_.end());
    spec.boundary = a.boundary_;
    spec.boundary.insert(spec.boundary.end(), b.boundary_.begin(), b.boundary_.end());
    return build(spec);
}

namespace {

void check_length(const DomainGrid& grid, Eigen::Index n, const char* what) {
    if (grid.site_count() != n) {
        throw DimensionError(std::string(what) + ": value count does not match grid");
    }
}

} // namespace

FieldVector::FieldVector(GridPtr grid, VectorXc values)
    : grid_(std::move(grid)), values_(std::move(values)) {
    check_length(*grid_, values_.size(), "FieldVector");
}

FieldVector FieldVector::zero(GridPtr grid) {
    VectorXc v = VectorXc::Zero(grid->site_count());
    return FieldVector(std::move(grid), std::move(v));
}

FieldVector FieldVector::from_raw(GridPtr grid, const VectorXc& raw) {
    check_length(*grid, raw.size(), "FieldVector");
    return FieldVector(grid, raw * std::sqrt(grid->weight()));
}

VectorXc FieldVector::raw_values() const {
    return values_ / std::sqrt(grid_->weight());
}

DualVector::DualVector(GridPtr grid, VectorXc values)
    : grid_(std::move(grid)), values_(std::move(values)) {
    check_length(*grid_, values_.size(), "DualVector");
}

DualVector DualVector::zero(GridPtr grid) {
    VectorXc v = VectorXc::Zero(grid->site_count());
    return DualVector(std::move(grid), std::move(v));
}

DualVector DualVector::from_raw(GridPtr grid, const VectorXc& raw) {
    check_length(*grid, raw.size(), "DualVector");
    return DualVector(grid, raw * std::sqrt(grid->weight()));
}

VectorXc DualVector::raw_values() const {
    return values_ / std::sqrt(grid_->weight());
}

Complex pairing(const DualVector& bp, const FieldVector& b) {
    if (!bp.grid().same_layout(b.grid())) {
        throw DimensionError("pairing: arguments live on different grids");
    }
    return bp.values().transpose() * b.values();
}

std::pair<FieldVector, DualVector> rescale_interval(const FieldVector& b, const DualVector& bp,
                                                    double t_a, double t_b) {
    if (!(t_b > t_a)) {
        throw DomainError("rescale_interval: t_b must exceed t_a");
    }
    const double root = std::sqrt(t_b - t_a);
    return {FieldVector(b.grid_ptr(), b.values() / root),
            DualVector(bp.grid_ptr(), bp.values() * root)};
}

} // namespace funcint
