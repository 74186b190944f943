#pragma once

#include <memory>
#include <vector>

#include "funcint/linalg.hpp"

namespace funcint {

enum class Boundary { Free, Dirichlet };

/// How to build a grid.  `dims` counts lattice sites per axis including the
/// wall sites removed under Dirichlet conditions, unless `dims_are_interior`
/// is set (used when a caller already works in the interior representation).
struct GridSpec {
    std::vector<int> dims;
    std::vector<double> spacing;
    std::vector<Boundary> boundary;   // one entry broadcasts to all axes
    bool dims_are_interior = false;
};

/// Uniform rectangular grid holding the discretized function space.
///
/// Dirichlet axes keep interior sites only, so vectors on the grid span a
/// space on which second-difference forms are strictly nondegenerate.  Every
/// site carries the same volume element tau = prod(spacing); values are
/// stored in tau-folded coordinates (raw value times sqrt(tau)), which turns
/// the duality pairing into a plain dot product.
class DomainGrid {
public:
    static std::shared_ptr<const DomainGrid> build(const GridSpec& spec);

    int axes() const { return static_cast<int>(dims_.size()); }
    const std::vector<int>& dims() const { return dims_; }          // interior counts
    double spacing(int axis) const { return spacing_[axis]; }
    Boundary boundary(int axis) const { return boundary_[axis]; }
    Eigen::Index site_count() const { return sites_; }
    double weight() const { return weight_; }                       // per-site tau

    Eigen::Index flatten(const std::vector<int>& idx) const;
    std::vector<int> unflatten(Eigen::Index site) const;

    bool same_layout(const DomainGrid& other) const;

    /// Concatenated-axes grid; vectors on it are blocks (a, b).
    static std::shared_ptr<const DomainGrid> tensor_product(const DomainGrid& a,
                                                            const DomainGrid& b);

private:
    DomainGrid() = default;

    std::vector<int> dims_;
    std::vector<double> spacing_;
    std::vector<Boundary> boundary_;
    Eigen::Index sites_ = 0;
    double weight_ = 1.0;
};

using GridPtr = std::shared_ptr<const DomainGrid>;

/// Element of the discretized space, tau-folded coordinates.
class FieldVector {
public:
    FieldVector(GridPtr grid, VectorXc values);

    const DomainGrid& grid() const { return *grid_; }
    const GridPtr& grid_ptr() const { return grid_; }
    const VectorXc& values() const { return values_; }
    Eigen::Index size() const { return values_.size(); }

    static FieldVector zero(GridPtr grid);
    static FieldVector from_raw(GridPtr grid, const VectorXc& raw);
    VectorXc raw_values() const;

private:
    GridPtr grid_;
    VectorXc values_;
};

/// Element of the dual space, tau-folded coordinates.
class DualVector {
public:
    DualVector(GridPtr grid, VectorXc values);

    const DomainGrid& grid() const { return *grid_; }
    const GridPtr& grid_ptr() const { return grid_; }
    const VectorXc& values() const { return values_; }
    Eigen::Index size() const { return values_.size(); }

    static DualVector zero(GridPtr grid);
    static DualVector from_raw(GridPtr grid, const VectorXc& raw);
    VectorXc raw_values() const;

private:
    GridPtr grid_;
    VectorXc values_;
};

/// Duality pairing <b', b>.  Bilinear (no conjugation); in folded
/// coordinates this is a plain dot product.
Complex pairing(const DualVector& bp, const FieldVector& b);

/// Affine rescale of the source interval to [0, 1]: b -> b / sqrt(t_b - t_a),
/// b' -> sqrt(t_b - t_a) * b'.  Leaves the pairing invariant.
std::pair<FieldVector, DualVector> rescale_interval(const FieldVector& b, const DualVector& bp,
                                                    double t_a, double t_b);

} // namespace funcint
