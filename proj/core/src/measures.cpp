#include "funcint/measures.hpp"

#include <cmath>
#include <utility>

#include <nlohmann/json.hpp>

#include "funcint/errors.hpp"
#include "funcint/quadrature.hpp"

namespace funcint {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;
constexpr double kPi = 3.14159265358979323846;
}

DiracComb DiracComb::delta(DualVector point, Complex weight) {
    DiracComb comb;
    comb.add(std::move(point), weight);
    return comb;
}

void DiracComb::add(DualVector point, Complex weight) {
    if (!points_.empty() && !points_.front().grid().same_layout(point.grid())) {
        throw DimensionError("DiracComb: all points must live on the same grid");
    }
    points_.push_back(std::move(point));
    weights_.push_back(weight);
}

double DiracComb::total_variation() const {
    double sum = 0.0;
    for (const Complex& c : weights_) {
        sum += std::abs(c);
    }
    return sum;
}

DiracComb DiracComb::scaled(Complex factor) const {
    DiracComb out;
    for (std::size_t k = 0; k < size(); ++k) {
        out.add(points_[k], factor * weights_[k]);
    }
    return out;
}

DiracComb DiracComb::sum(const DiracComb& a, Complex ca, const DiracComb& b, Complex cb) {
    DiracComb out;
    for (std::size_t k = 0; k < a.size(); ++k) {
        out.add(a.points_[k], ca * a.weights_[k]);
    }
    for (std::size_t k = 0; k < b.size(); ++k) {
        out.add(b.points_[k], cb * b.weights_[k]);
    }
    return out;
}

double total_variation(const DiracComb& comb) {
    return comb.total_variation();
}

DiracComb convolve(const DiracComb& a, const DiracComb& b) {
    if (a.size() == 0 || b.size() == 0) {
        throw DimensionError("convolve: both combs must be non-empty");
    }
    const GridPtr product =
        DomainGrid::tensor_product(a.point(0).grid(), b.point(0).grid());
    DiracComb out;
    for (std::size_t j = 0; j < a.size(); ++j) {
        for (std::size_t k = 0; k < b.size(); ++k) {
            VectorXc values(product->site_count());
            values << a.point(j).values(), b.point(k).values();
            out.add(DualVector(product, std::move(values)), a.weight(j) * b.weight(k));
        }
    }
    return out;
}

std::string comb_to_json(const DiracComb& comb) {
    nlohmann::json list = nlohmann::json::array();
    for (std::size_t k = 0; k < comb.size(); ++k) {
        nlohmann::json entry;
        const VectorXc& v = comb.point(k).values();
        const bool real_only = v.imag().cwiseAbs().maxCoeff() == 0.0;
        nlohmann::json point = nlohmann::json::array();
        for (Eigen::Index i = 0; i < v.size(); ++i) {
            if (real_only) {
                point.push_back(v[i].real());
            } else {
                point.push_back({v[i].real(), v[i].imag()});
            }
        }
        entry["point"] = std::move(point);
        entry["weight"] = {comb.weight(k).real(), comb.weight(k).imag()};
        list.push_back(std::move(entry));
    }
    return list.dump();
}

DiracComb comb_from_json(const std::string& text, const GridPtr& grid) {
    nlohmann::json list;
    try {
        list = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("comb_from_json: ") + e.what());
    }
    if (!list.is_array()) {
        throw ConfigError("comb_from_json: top level must be a list");
    }
    DiracComb comb;
    for (const auto& entry : list) {
        if (!entry.contains("point") || !entry.contains("weight")) {
            throw ConfigError("comb_from_json: entries need point and weight");
        }
        const auto& point = entry["point"];
        VectorXc values(point.size());
        for (std::size_t i = 0; i < point.size(); ++i) {
            if (point[i].is_array()) {
                values[i] = Complex(point[i][0].get<double>(), point[i][1].get<double>());
            } else {
                values[i] = Complex(point[i].get<double>(), 0.0);
            }
        }
        if (values.size() != grid->site_count()) {
            throw ConfigError("comb_from_json: point length does not match grid");
        }
        const auto& w = entry["weight"];
        comb.add(DualVector(grid, std::move(values)),
                 Complex(w[0].get<double>(), w[1].get<double>()));
    }
    return comb;
}

IntegrableFunctional::IntegrableFunctional(DiracComb comb, ThetaWeight theta, QuadFormPtr qf)
    : comb_(std::move(comb)), theta_(theta), qf_(std::move(qf)) {
    if (theta_.kind != ThetaWeight::Kind::PhaseOnly && !qf_) {
        throw DimensionError("IntegrableFunctional: weighted kinds need a quadratic form");
    }
    if (theta_.kind == ThetaWeight::Kind::Hermite && theta_.order < 0) {
        throw DomainError("IntegrableFunctional: Hermite order must be nonnegative");
    }
}

Complex IntegrableFunctional::operator()(const FieldVector& b) const {
    Complex phase_sum = 0.0;
    for (std::size_t k = 0; k < comb_.size(); ++k) {
        const Complex angle = pairing(comb_.point(k), b);
        phase_sum += comb_.weight(k) * std::exp(Complex(0.0, -kTwoPi) * angle);
    }

    switch (theta_.kind) {
        case ThetaWeight::Kind::PhaseOnly:
            return phase_sum;
        case ThetaWeight::Kind::Gaussian: {
            const Complex qv = qf_->q(b);
            return std::exp(-(kPi / theta_.s) * qv) * phase_sum;
        }
        case ThetaWeight::Kind::Hermite: {
            const Complex qv = qf_->q(b);
            const Complex arg = std::sqrt(kPi * qv);
            return hermite_value(theta_.order, arg) * std::exp(-kPi * qv) * phase_sum;
        }
    }
    return phase_sum;
}

Complex f_mu_eval(const IntegrableFunctional& f, const FieldVector& b) {
    return f(b);
}

} // namespace funcint
