#include "funcint/effective.hpp"

#include <cctype>
#include <cmath>

#include "funcint/errors.hpp"
#include "funcint/quadrature.hpp"

namespace funcint {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kTwoPi = 6.283185307179586476925286766559;

double quartic_sum(const Eigen::VectorXd& u) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < u.size(); ++i) {
        const double u2 = u[i] * u[i];
        s += u2 * u2;
    }
    return s;
}

/// Derivative of the degree-(window-1) Lagrange interpolant through the
/// window of nodes nearest to x.  Handles nonuniform tables.
double lagrange_derivative(const Eigen::VectorXd& xs, const Eigen::VectorXd& ys, double x,
                           int window) {
    const int n = static_cast<int>(xs.size());
    if (n < window) {
        throw DomainError("lagrange_derivative: table too short");
    }
    // bracket x, then center the window
    int lo = 0;
    while (lo + 1 < n && xs[lo + 1] <= x) {
        ++lo;
    }
    int start = lo - window / 2 + 1;
    start = std::max(0, std::min(start, n - window));

    double acc = 0.0;
    for (int i = 0; i < window; ++i) {
        const double xi = xs[start + i];
        double denom = 1.0;
        for (int k = 0; k < window; ++k) {
            if (k != i) {
                denom *= xi - xs[start + k];
            }
        }
        // d/dx of the i-th basis polynomial at x
        double dbasis = 0.0;
        for (int j = 0; j < window; ++j) {
            if (j == i) {
                continue;
            }
            double prod = 1.0;
            for (int k = 0; k < window; ++k) {
                if (k != i && k != j) {
                    prod *= x - xs[start + k];
                }
            }
            dbasis += prod;
        }
        acc += ys[start + i] * dbasis / denom;
    }
    return acc;
}

double lagrange_value(const Eigen::VectorXd& xs, const Eigen::VectorXd& ys, double x,
                      int window) {
    const int n = static_cast<int>(xs.size());
    if (n < window) {
        throw DomainError("lagrange_value: table too short");
    }
    int lo = 0;
    while (lo + 1 < n && xs[lo + 1] <= x) {
        ++lo;
    }
    int start = lo - window / 2 + 1;
    start = std::max(0, std::min(start, n - window));

    double acc = 0.0;
    for (int i = 0; i < window; ++i) {
        double basis = 1.0;
        const double xi = xs[start + i];
        for (int k = 0; k < window; ++k) {
            if (k != i) {
                basis *= (x - xs[start + k]) / (xi - xs[start + k]);
            }
        }
        acc += ys[start + i] * basis;
    }
    return acc;
}

struct SliceQuadrature {
    const Localization* loc;
    double lambda;
    Eigen::MatrixXd l;        // real Cholesky factor of Wm
    Eigen::MatrixXd wm_real;
    int order;

    /// Flat-normalized Int e^{-pi S(u)} e^{-2 pi i j u_axis} du, real part.
    double fourier_point(int axis, double j) const {
        const int m = static_cast<int>(l.rows());
        const double root_pi_inv = 1.0 / std::sqrt(kPi);
        double acc = 0.0;
        Eigen::VectorXd u(m);
        gauss_hermite_tensor(m, order, [&](const Eigen::VectorXd& x, double w) {
            u.noalias() = l * x * root_pi_inv;
            const double damp = std::exp(-kPi * lambda * quartic_sum(u));
            acc += w * damp * std::cos(kTwoPi * j * u[axis]);
        });
        return acc * std::pow(root_pi_inv, m);
    }

    /// Flat-normalized Int e^{-pi S(u)} e^{-2 pi j u_axis} du via the
    /// completed square: e^{pi W(j e_a)} times a shifted quartic average.
    double tilt_log_point(int axis, double j) const {
        const int m = static_cast<int>(l.rows());
        const double root_pi_inv = 1.0 / std::sqrt(kPi);
        const Eigen::VectorXd shift = -j * wm_real.col(axis);
        double acc = 0.0;
        Eigen::VectorXd u(m);
        gauss_hermite_tensor(m, order, [&](const Eigen::VectorXd& x, double w) {
            u.noalias() = shift + l * x * root_pi_inv;
            acc += w * std::exp(-kPi * lambda * quartic_sum(u));
        });
        const double avg = acc * std::pow(root_pi_inv, m);
        if (!(avg > 0.0)) {
            throw ResolutionError("w_s_compute: shifted partition average not positive");
        }
        const double w_j = j * j * wm_real(axis, axis);
        // -(1/pi) log( e^{pi W(j)} * avg )
        return -w_j - std::log(avg) / kPi;
    }
};

} // namespace

EffectiveState w_s_compute(const ActionFunctional& action, const Localization& loc,
                           const Eigen::VectorXd& uprime_grid, int quad_order) {
    if (!action.quadratic) {
        throw ConfigError("w_s_compute: action needs a quadratic form");
    }
    if (action.quadratic.get() != loc.quadform().get()) {
        throw DimensionError("w_s_compute: localization must be built from the action's form");
    }
    if (action.quartic_coupling < 0.0) {
        throw DomainError("w_s_compute: quartic coupling must be nonnegative");
    }
    const int m = loc.dim();
    if (m > 3) {
        throw LocalizationError("w_s_compute: at most three localized dimensions");
    }
    if (!effectively_real(loc.wm())) {
        throw UnsupportedError("w_s_compute: localized form must be real");
    }
    const Eigen::MatrixXd wm_real = loc.wm().real();
    if (m > 1) {
        Eigen::MatrixXd off = wm_real;
        off.diagonal().setZero();
        if (off.cwiseAbs().maxCoeff() > 1e-12 * wm_real.diagonal().maxCoeff()) {
            throw UnsupportedError(
                "w_s_compute: axis-aligned slices need a diagonal localized form");
        }
    }

    const Eigen::Index k = uprime_grid.size();
    if (k < 5) {
        throw ConfigError("w_s_compute: source grid needs at least five nodes");
    }
    const double h = uprime_grid[1] - uprime_grid[0];
    if (!(h > 0.0)) {
        throw ConfigError("w_s_compute: source grid must be ascending");
    }
    Eigen::Index zero_index = -1;
    for (Eigen::Index i = 0; i < k; ++i) {
        if (i + 1 < k) {
            const double step = uprime_grid[i + 1] - uprime_grid[i];
            if (std::abs(step - h) > 1e-10 * std::max(1.0, std::abs(h))) {
                throw ConfigError("w_s_compute: source grid must be uniform");
            }
        }
        if (std::abs(uprime_grid[i]) < 1e-12) {
            zero_index = i;
        }
    }
    if (zero_index <= 0 || zero_index >= k - 1) {
        throw ConfigError("w_s_compute: source grid must contain 0 in its interior");
    }

    if (quad_order <= 0) {
        quad_order = 64;
    }

    SliceQuadrature quad;
    quad.loc = &loc;
    quad.lambda = action.quartic_coupling;
    quad.l = symmetric_cholesky(loc.wm()).real();
    quad.wm_real = wm_real;
    quad.order = quad_order;

    // Convergence guard: the farthest source must be stable under order
    // refinement on both routes.
    {
        SliceQuadrature finer = quad;
        finer.order = quad_order + 16;
        const double jmax = std::max(std::abs(uprime_grid[0]), std::abs(uprime_grid[k - 1]));
        const double a = quad.fourier_point(0, jmax);
        const double b = finer.fourier_point(0, jmax);
        if (std::abs(a - b) > 1e-9 * std::max(1.0, std::abs(a))) {
            throw ResolutionError("w_s_compute: Fourier quadrature not converged; raise the order");
        }
        const double c = quad.tilt_log_point(0, jmax);
        const double d = finer.tilt_log_point(0, jmax);
        if (std::abs(c - d) > 1e-9 * std::max(1.0, std::abs(c))) {
            throw ResolutionError("w_s_compute: tilted quadrature not converged; raise the order");
        }
    }

    EffectiveState state(action, loc);
    state.quad_order_ = quad_order;

    const double n_value = quad.fourier_point(0, 0.0);
    if (!(n_value > 0.0)) {
        throw ResolutionError("w_s_compute: normalization is not positive");
    }
    state.normalization_ = n_value;

    for (int axis = 0; axis < m; ++axis) {
        EffectiveAxisSlice slice;
        slice.uprime = uprime_grid;
        slice.uprime_ext.resize(k + 4);
        slice.uprime_ext.segment(2, k) = uprime_grid;
        slice.uprime_ext[0] = uprime_grid[0] - 2.0 * h;
        slice.uprime_ext[1] = uprime_grid[0] - h;
        slice.uprime_ext[k + 2] = uprime_grid[k - 1] + h;
        slice.uprime_ext[k + 3] = uprime_grid[k - 1] + 2.0 * h;

        slice.w_s.resize(k);
        for (Eigen::Index i = 0; i < k; ++i) {
            const double z = quad.fourier_point(axis, slice.uprime[i]);
            if (!(z > 0.0)) {
                throw ResolutionError("w_s_compute: transform slice crossed zero; shrink the grid");
            }
            slice.w_s[i] = -std::log(z) / kPi;
        }

        slice.w_tilt_ext.resize(k + 4);
        for (Eigen::Index i = 0; i < k + 4; ++i) {
            slice.w_tilt_ext[i] = quad.tilt_log_point(axis, slice.uprime_ext[i]);
        }
        slice.w_tilt = slice.w_tilt_ext.segment(2, k);

        slice.mean.resize(k);
        for (Eigen::Index i = 0; i < k; ++i) {
            slice.mean[i] =
                0.5 * lagrange_derivative(slice.uprime_ext, slice.w_tilt_ext, slice.uprime[i], 5);
        }
        state.slices_.push_back(std::move(slice));
    }
    return state;
}

Eigen::VectorXd mean_field(const EffectiveState& state, const Eigen::VectorXd& uprime) {
    const int m = state.localization().dim();
    if (uprime.size() != m) {
        throw DimensionError("mean_field: source dimension mismatch");
    }
    int axis = 0;
    int nonzero = 0;
    for (int a = 0; a < m; ++a) {
        if (uprime[a] != 0.0) {
            axis = a;
            ++nonzero;
        }
    }
    if (nonzero > 1) {
        throw UnsupportedError("mean_field: sources must be axis-aligned");
    }
    const EffectiveAxisSlice& slice = state.slices()[axis];
    const double j = uprime[axis];
    if (j < slice.uprime[0] || j > slice.uprime[slice.uprime.size() - 1]) {
        throw DomainError("mean_field: source outside the tabulated grid, extrapolation refused");
    }
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(m);
    if (nonzero == 0) {
        for (int a = 0; a < m; ++a) {
            const EffectiveAxisSlice& s = state.slices()[a];
            mean[a] = 0.5 * lagrange_derivative(s.uprime_ext, s.w_tilt_ext, 0.0, 5);
        }
        return mean;
    }
    mean[axis] = 0.5 * lagrange_derivative(slice.uprime_ext, slice.w_tilt_ext, j, 6);
    return mean;
}

EffectiveState gamma_legendre(EffectiveState state) {
    for (EffectiveAxisSlice& slice : state.slices_) {
        const Eigen::Index k = slice.uprime.size();
        // the mean must be strictly monotone in the source for inversion
        const double direction = slice.mean[1] - slice.mean[0];
        for (Eigen::Index i = 0; i + 1 < k; ++i) {
            const double step = slice.mean[i + 1] - slice.mean[i];
            if (step == 0.0 || (step > 0.0) != (direction > 0.0)) {
                throw LegendreError("gamma_legendre: mean field is not strictly monotone");
            }
        }
        Eigen::VectorXd v(k);
        Eigen::VectorXd g(k);
        for (Eigen::Index i = 0; i < k; ++i) {
            v[i] = slice.mean[i];
            g[i] = slice.w_tilt[i] - 2.0 * slice.uprime[i] * slice.mean[i];
        }
        if (direction < 0.0) {
            v.reverseInPlace();
            g.reverseInPlace();
        }
        slice.gamma_v = std::move(v);
        slice.gamma = std::move(g);
    }
    state.has_gamma_ = true;
    return state;
}

namespace {

void require_gamma(const EffectiveState& state) {
    if (!state.has_gamma()) {
        throw LegendreError("effective: run gamma_legendre first");
    }
}

} // namespace

double quantum_eom_residual(const EffectiveState& state) {
    require_gamma(state);
    const Eigen::VectorXd zero = Eigen::VectorXd::Zero(state.localization().dim());
    const Eigen::VectorXd v0 = mean_field(state, zero);
    double residual = 0.0;
    for (int a = 0; a < state.localization().dim(); ++a) {
        const EffectiveAxisSlice& slice = state.slices()[a];
        residual += std::abs(lagrange_derivative(slice.gamma_v, slice.gamma, v0[a], 5));
    }
    return residual;
}

double legendre_roundtrip_error(const EffectiveState& state) {
    require_gamma(state);
    double worst = 0.0;
    for (const EffectiveAxisSlice& slice : state.slices()) {
        const Eigen::Index k = slice.uprime.size();
        for (Eigen::Index i = 1; i + 1 < k; ++i) {
            const double j = slice.uprime[i];
            // invert dGamma/dv = -2 j by bisection on the monotone derivative
            double lo = slice.gamma_v[0];
            double hi = slice.gamma_v[slice.gamma_v.size() - 1];
            auto slope = [&](double v) {
                return lagrange_derivative(slice.gamma_v, slice.gamma, v, 5) + 2.0 * j;
            };
            double flo = slope(lo);
            double fhi = slope(hi);
            if (flo == 0.0) {
                fhi = flo;
            }
            if (flo * fhi > 0.0) {
                throw LegendreError("legendre_roundtrip: source outside invertible range");
            }
            for (int it = 0; it < 80; ++it) {
                const double mid = 0.5 * (lo + hi);
                const double fm = slope(mid);
                if (fm == 0.0) {
                    lo = hi = mid;
                    break;
                }
                if ((fm > 0.0) == (fhi > 0.0)) {
                    hi = mid;
                    fhi = fm;
                } else {
                    lo = mid;
                    flo = fm;
                }
            }
            const double v_star = 0.5 * (lo + hi);
            const double gamma_star = lagrange_value(slice.gamma_v, slice.gamma, v_star, 5);
            const double w_rec = gamma_star + 2.0 * j * v_star;
            worst = std::max(worst, std::abs(w_rec - slice.w_tilt[i]));
        }
    }
    return worst;
}

double quadratic_action_recovery_error(const EffectiveState& state) {
    require_gamma(state);
    double worst = 0.0;
    for (int a = 0; a < state.localization().dim(); ++a) {
        const EffectiveAxisSlice& slice = state.slices()[a];
        const double w_aa = state.localization().wm()(a, a).real();
        const double gamma0 = lagrange_value(slice.gamma_v, slice.gamma, 0.0, 5);
        for (Eigen::Index i = 0; i < slice.gamma_v.size(); ++i) {
            const double v = slice.gamma_v[i];
            const double expected = v * v / w_aa;
            worst = std::max(worst, std::abs(slice.gamma[i] - gamma0 - expected));
        }
    }
    return worst;
}

Polynomial::Polynomial(int dim) : dim_(dim) {
    if (dim < 1) {
        throw DomainError("Polynomial: dimension must be positive");
    }
}

void Polynomial::add_term(std::vector<int> powers, double coeff) {
    if (static_cast<int>(powers.size()) != dim_) {
        throw DimensionError("Polynomial: power vector has wrong length");
    }
    for (const int p : powers) {
        if (p < 0) {
            throw DomainError("Polynomial: negative power");
        }
    }
    terms_.push_back({std::move(powers), coeff});
}

int Polynomial::degree() const {
    int deg = 0;
    for (const Term& t : terms_) {
        int d = 0;
        for (const int p : t.powers) {
            d += p;
        }
        deg = std::max(deg, d);
    }
    return deg;
}

double Polynomial::eval(const Eigen::VectorXd& u) const {
    if (u.size() != dim_) {
        throw DimensionError("Polynomial: argument dimension mismatch");
    }
    double acc = 0.0;
    for (const Term& t : terms_) {
        double prod = t.coeff;
        for (int a = 0; a < dim_; ++a) {
            for (int p = 0; p < t.powers[a]; ++p) {
                prod *= u[a];
            }
        }
        acc += prod;
    }
    return acc;
}

Polynomial Polynomial::derivative(int axis) const {
    if (axis < 0 || axis >= dim_) {
        throw DomainError("Polynomial: derivative axis out of range");
    }
    Polynomial out(dim_);
    for (const Term& t : terms_) {
        if (t.powers[axis] == 0) {
            continue;
        }
        Term d = t;
        d.coeff *= d.powers[axis];
        d.powers[axis] -= 1;
        out.terms_.push_back(std::move(d));
    }
    return out;
}

Polynomial Polynomial::parse(const std::string& text, int dim) {
    Polynomial out(dim);
    std::size_t pos = 0;
    const auto skip_space = [&]() {
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) {
            ++pos;
        }
    };
    while (pos < text.size()) {
        skip_space();
        if (pos >= text.size()) {
            break;
        }
        std::vector<int> powers(dim, 0);
        double coeff = 1.0;
        bool saw_anything = false;
        // optional leading coefficient
        skip_space();
        if (pos < text.size() &&
            (std::isdigit(static_cast<unsigned char>(text[pos])) || text[pos] == '-' ||
             text[pos] == '+' || text[pos] == '.')) {
            std::size_t used = 0;
            coeff = std::stod(text.substr(pos), &used);
            pos += used;
            saw_anything = true;
        }
        // variable factors u<axis>[^power]
        for (;;) {
            skip_space();
            if (pos >= text.size() || text[pos] == ';') {
                break;
            }
            if (text[pos] == '*') {
                ++pos;
                continue;
            }
            if (text[pos] != 'u') {
                throw ConfigError("Polynomial::parse: expected 'u<axis>' in '" + text + "'");
            }
            ++pos;
            std::size_t used = 0;
            const int axis = std::stoi(text.substr(pos), &used);
            pos += used;
            if (axis < 0 || axis >= dim) {
                throw ConfigError("Polynomial::parse: axis out of range");
            }
            int power = 1;
            if (pos < text.size() && text[pos] == '^') {
                ++pos;
                power = std::stoi(text.substr(pos), &used);
                pos += used;
            }
            powers[axis] += power;
            saw_anything = true;
        }
        if (saw_anything) {
            out.add_term(std::move(powers), coeff);
        }
        if (pos < text.size() && text[pos] == ';') {
            ++pos;
        }
    }
    if (out.terms_.empty()) {
        throw ConfigError("Polynomial::parse: no terms in '" + text + "'");
    }
    return out;
}

double schwinger_dyson_residual(const Localization& loc, const Polynomial& f, int quad_order) {
    const int m = loc.dim();
    if (f.dim() != m) {
        throw DimensionError("schwinger_dyson_residual: polynomial dimension mismatch");
    }
    if (f.degree() > 6) {
        throw DomainError("schwinger_dyson_residual: degree above 6 not configured");
    }
    if (m > 3) {
        throw LocalizationError("schwinger_dyson_residual: at most three localized dimensions");
    }
    if (!effectively_real(loc.wm())) {
        throw UnsupportedError("schwinger_dyson_residual: localized form must be real");
    }
    if (2 * quad_order - 1 < f.degree() + 2) {
        throw DomainError("schwinger_dyson_residual: quadrature order too low for this degree");
    }

    const Eigen::MatrixXd l = symmetric_cholesky(loc.wm()).real();
    const Eigen::MatrixXd wm_inv = loc.wm_inv().real();
    const double root_pi_inv = 1.0 / std::sqrt(kPi);

    std::vector<Polynomial> grads;
    grads.reserve(m);
    for (int a = 0; a < m; ++a) {
        grads.push_back(f.derivative(a));
    }

    // normalized averages under e^{-pi u^T Wm^{-1} u}
    Eigen::VectorXd lhs = Eigen::VectorXd::Zero(m);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m);
    Eigen::VectorXd u(m);
    gauss_hermite_tensor(m, quad_order, [&](const Eigen::VectorXd& x, double w) {
        u.noalias() = l * x * root_pi_inv;
        const double fv = f.eval(u);
        const Eigen::VectorXd dq = 2.0 * (wm_inv * u);
        for (int a = 0; a < m; ++a) {
            lhs[a] += w * grads[a].eval(u);
            rhs[a] += w * fv * dq[a];
        }
    });
    const double norm = std::pow(root_pi_inv, m);
    double residual = 0.0;
    for (int a = 0; a < m; ++a) {
        residual += std::abs(norm * lhs[a] - kPi * norm * rhs[a]);
    }
    return residual;
}

} // namespace funcint
