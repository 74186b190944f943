#pragma once

#include <string>
#include <vector>

#include "funcint/quadforms.hpp"

namespace funcint {

/// Finite complex combination of point masses on the dual space.  This is
/// the executable representation of a measure: every integral against it is
/// a finite sum, which makes it the ground-truth side of each numerical
/// integration route.
class DiracComb {
public:
    DiracComb() = default;

    static DiracComb delta(DualVector point, Complex weight = 1.0);

    void add(DualVector point, Complex weight);

    std::size_t size() const { return points_.size(); }
    const std::vector<DualVector>& points() const { return points_; }
    const std::vector<Complex>& weights() const { return weights_; }
    const DualVector& point(std::size_t k) const { return points_[k]; }
    Complex weight(std::size_t k) const { return weights_[k]; }

    double total_variation() const;

    DiracComb scaled(Complex factor) const;
    static DiracComb sum(const DiracComb& a, Complex ca, const DiracComb& b, Complex cb);

private:
    std::vector<DualVector> points_;
    std::vector<Complex> weights_;
};

double total_variation(const DiracComb& comb);

/// Product-space comb: points are concatenations (a_j, b_k) on the
/// tensor-product grid, weights multiply.  Total variation multiplies.
DiracComb convolve(const DiracComb& a, const DiracComb& b);

/// JSON round trip, format: [{"point": [...], "weight": [re, im]}, ...].
/// Real point entries are plain numbers; complex entries are [re, im] pairs.
std::string comb_to_json(const DiracComb& comb);
DiracComb comb_from_json(const std::string& text, const GridPtr& grid);

/// The kernel weight carried by an integrable functional on top of the
/// oscillatory pairing factor.
struct ThetaWeight {
    enum class Kind { PhaseOnly, Gaussian, Hermite };

    Kind kind = Kind::PhaseOnly;
    Complex s = 1.0;  // Gaussian only
    int order = 0;    // Hermite only

    static ThetaWeight phase_only() { return {Kind::PhaseOnly, 1.0, 0}; }
    static ThetaWeight gaussian(Complex s) { return {Kind::Gaussian, s, 0}; }
    static ThetaWeight hermite(int order) { return {Kind::Hermite, 1.0, order}; }
};

/// F_mu(b) = sum_k c_k Theta(b, b'_k), with Theta chosen per kind:
///   PhaseOnly    e^{-2 pi i <b'_k, b>}
///   Gaussian(s)  e^{-(pi/s) Q(b)} e^{-2 pi i <b'_k, b>}
///   Hermite(n)   H_n(sqrt(pi Q(b))) e^{-pi Q(b)} e^{-2 pi i <b'_k, b>}
/// The divergent determinant prefactor of the Hermite kernel is omitted here
/// and reinstated only in localized formulas, where it is finite.
class IntegrableFunctional {
public:
    IntegrableFunctional(DiracComb comb, ThetaWeight theta, QuadFormPtr qf = nullptr);

    Complex operator()(const FieldVector& b) const;

    const DiracComb& comb() const { return comb_; }
    const ThetaWeight& theta() const { return theta_; }
    const QuadFormPtr& quadform() const { return qf_; }

private:
    DiracComb comb_;
    ThetaWeight theta_;
    QuadFormPtr qf_;
};

Complex f_mu_eval(const IntegrableFunctional& f, const FieldVector& b);

} // namespace funcint
