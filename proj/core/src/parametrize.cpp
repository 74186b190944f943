#include "funcint/parametrize.hpp"

#include <cmath>

#include "funcint/errors.hpp"

namespace funcint {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kTwoPi = 6.283185307179586476925286766559;
}

VectorFieldSet VectorFieldSet::flat(int dim) {
    if (dim < 1) {
        throw DomainError("VectorFieldSet::flat: dimension must be positive");
    }
    VectorFieldSet vfs;
    vfs.target_dim = dim;
    vfs.driver_dim = dim;
    vfs.x = [dim](const Eigen::VectorXd&) { return Eigen::MatrixXd::Identity(dim, dim); };
    vfs.y = [dim](const Eigen::VectorXd&) { return Eigen::VectorXd::Zero(dim); };
    vfs.m0 = Eigen::VectorXd::Zero(dim);
    return vfs;
}

VectorFieldSet VectorFieldSet::rotation(Eigen::Vector2d m0) {
    return scaled_rotation(1.0, m0);
}

VectorFieldSet VectorFieldSet::scaled_rotation(double omega, Eigen::Vector2d m0) {
    VectorFieldSet vfs;
    vfs.target_dim = 2;
    vfs.driver_dim = 1;
    vfs.x = [omega](const Eigen::VectorXd& p) {
        Eigen::MatrixXd col(2, 1);
        col(0, 0) = -omega * p[1];
        col(1, 0) = omega * p[0];
        return col;
    };
    vfs.y = [](const Eigen::VectorXd&) { return Eigen::VectorXd::Zero(2); };
    vfs.m0 = m0;
    return vfs;
}

VectorFieldSet VectorFieldSet::affine(Eigen::MatrixXd b, Eigen::VectorXd c, Eigen::VectorXd m0) {
    const int dim = static_cast<int>(m0.size());
    if (b.rows() != dim || b.cols() != dim || c.size() != dim) {
        throw DimensionError("VectorFieldSet::affine: inconsistent dimensions");
    }
    VectorFieldSet vfs;
    vfs.target_dim = dim;
    vfs.driver_dim = dim;
    vfs.x = [dim](const Eigen::VectorXd&) { return Eigen::MatrixXd::Identity(dim, dim); };
    vfs.y = [b = std::move(b), c = std::move(c)](const Eigen::VectorXd& p) {
        return Eigen::VectorXd(b * p + c);
    };
    vfs.m0 = std::move(m0);
    return vfs;
}

VectorFieldSet VectorFieldSet::by_name(const std::string& name,
                                       const std::vector<double>& params) {
    if (name == "flat") {
        const int dim = params.empty() ? 1 : static_cast<int>(params[0]);
        return flat(dim);
    }
    if (name == "rotation") {
        Eigen::Vector2d m0(1.0, 0.0);
        if (params.size() >= 2) {
            m0 << params[0], params[1];
        }
        return rotation(m0);
    }
    if (name == "scaled-rotation") {
        if (params.empty()) {
            throw ConfigError("scaled-rotation: omega parameter required");
        }
        Eigen::Vector2d m0(1.0, 0.0);
        if (params.size() >= 3) {
            m0 << params[1], params[2];
        }
        return scaled_rotation(params[0], m0);
    }
    if (name == "affine") {
        // params: dim, then row-major B, then c, then m0
        if (params.empty()) {
            throw ConfigError("affine: dimension parameter required");
        }
        const int dim = static_cast<int>(params[0]);
        const std::size_t need = 1 + static_cast<std::size_t>(dim) * dim + 2 * dim;
        if (params.size() != need) {
            throw ConfigError("affine: parameter vector has wrong length");
        }
        Eigen::MatrixXd b(dim, dim);
        std::size_t at = 1;
        for (int i = 0; i < dim; ++i) {
            for (int j = 0; j < dim; ++j) {
                b(i, j) = params[at++];
            }
        }
        Eigen::VectorXd c(dim);
        for (int i = 0; i < dim; ++i) {
            c[i] = params[at++];
        }
        Eigen::VectorXd m0(dim);
        for (int i = 0; i < dim; ++i) {
            m0[i] = params[at++];
        }
        return affine(std::move(b), std::move(c), std::move(m0));
    }
    throw ConfigError("unknown vector field set: " + name);
}

namespace {

void validate_fields(const VectorFieldSet& vfs) {
    if (!vfs.x || !vfs.y || vfs.target_dim < 1 || vfs.driver_dim < 1) {
        throw DomainError("develop_path: incomplete vector field set");
    }
    if (vfs.m0.size() != vfs.target_dim) {
        throw DimensionError("develop_path: initial point has wrong dimension");
    }
    const Eigen::MatrixXd x0 = vfs.x(vfs.m0);
    if (x0.rows() != vfs.target_dim || x0.cols() != vfs.driver_dim) {
        throw DimensionError("develop_path: X has wrong shape at m0");
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x0);
    qr.setThreshold(1e-12);
    if (qr.rank() < std::min<Eigen::Index>(vfs.driver_dim, vfs.target_dim)) {
        throw DomainError("develop_path: X columns are dependent at the initial point");
    }
}

Eigen::VectorXd interp_driver(const DriverPath& driver, double t) {
    const Eigen::Index k = driver.times.size();
    if (t <= driver.times[0]) {
        return driver.values.col(0);
    }
    if (t >= driver.times[k - 1]) {
        return driver.values.col(k - 1);
    }
    Eigen::Index lo = 0;
    Eigen::Index hi = k - 1;
    while (hi - lo > 1) {
        const Eigen::Index mid = (lo + hi) / 2;
        if (driver.times[mid] <= t) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    const double span = driver.times[hi] - driver.times[lo];
    const double a = (t - driver.times[lo]) / span;
    return (1.0 - a) * driver.values.col(lo) + a * driver.values.col(hi);
}

} // namespace

ParamSolution develop_path(const VectorFieldSet& vfs, const DriverPath& driver, int steps) {
    validate_fields(vfs);
    const Eigen::Index nodes = driver.times.size();
    if (nodes < 2 || driver.values.cols() != nodes || driver.values.rows() != vfs.driver_dim) {
        throw DimensionError("develop_path: driver shape mismatch");
    }
    if (steps < nodes - 1) {
        throw DomainError("develop_path: steps must cover the driver sampling");
    }

    const double t_a = driver.times[0];
    const double t_b = driver.times[nodes - 1];
    const double h = (t_b - t_a) / steps;

    ParamSolution sol;
    sol.times.resize(steps + 1);
    sol.points.resize(vfs.target_dim, steps + 1);
    sol.points.col(0) = vfs.m0;
    sol.times[0] = t_a;

    const int rank_stride = std::max(1, steps / 32);
    Eigen::VectorXd p = vfs.m0;
    Eigen::VectorXd b_prev = driver.values.col(0);
    for (int k = 0; k < steps; ++k) {
        const double t1 = (k + 1 == steps) ? t_b : t_a + (k + 1) * h;
        const Eigen::VectorXd b_next = interp_driver(driver, t1);
        const Eigen::VectorXd db = b_next - b_prev;

        const Eigen::VectorXd half =
            p + 0.5 * (vfs.x(p) * db + vfs.y(p) * h);
        p += vfs.x(half) * db + vfs.y(half) * h;

        if (!p.allFinite() || p.norm() > vfs.blowup_bound) {
            throw SamplingError("develop_path: solution blew up at step " + std::to_string(k));
        }
        if (k % rank_stride == 0) {
            Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(vfs.x(p));
            qr.setThreshold(1e-12);
            if (qr.rank() < std::min<Eigen::Index>(vfs.driver_dim, vfs.target_dim)) {
                ++sol.rank_defects;
            }
        }
        sol.times[k + 1] = t1;
        sol.points.col(k + 1) = p;
        b_prev = b_next;
    }
    return sol;
}

namespace {

DriverPath driver_from_sample(const FieldVector& b) {
    const DomainGrid& grid = b.grid();
    if (grid.axes() != 1) {
        throw DimensionError("pullback_integrate: drivers need a one-axis grid");
    }
    const double h = grid.spacing(0);
    const Eigen::Index n = grid.site_count();
    const bool dirichlet = grid.boundary(0) == Boundary::Dirichlet;
    const Eigen::Index total = n + 1 + (dirichlet ? 1 : 0);

    DriverPath driver;
    driver.times.resize(total);
    driver.values.resize(1, total);
    driver.times[0] = 0.0;
    driver.values(0, 0) = 0.0;  // pointed at t_a
    const VectorXc raw = b.raw_values();
    for (Eigen::Index i = 0; i < n; ++i) {
        driver.times[i + 1] = (i + 1) * h;
        driver.values(0, i + 1) = raw[i].real();
    }
    if (dirichlet) {
        driver.times[total - 1] = (n + 1) * h;
        driver.values(0, total - 1) = 0.0;
    }
    return driver;
}

} // namespace

McEstimate pullback_integrate(const VectorFieldSet& vfs, const IntegratorSpec& spec,
                              const std::function<Complex(const ParamSolution&)>& f,
                              std::int64_t count, std::uint64_t seed, int workers, int steps) {
    validate_fields(vfs);
    if (vfs.driver_dim != 1) {
        throw DimensionError("pullback_integrate: scalar drivers only");
    }
    const McIntegrand integrand = [&vfs, &f, steps](const FieldVector& b) {
        DriverPath driver = driver_from_sample(b);
        const int wanted = std::max<int>(steps, static_cast<int>(driver.times.size()) - 1);
        const ParamSolution sol = develop_path(vfs, driver, wanted);
        return f(sol);
    };
    // Per-sample development failures are counted out of the mean rather
    // than aborting the whole run.
    return integrate_mc_counting(spec, integrand, count, seed, workers);
}

FieldDevelopment field_parametrize(const VectorFieldSet& vfs, const Eigen::MatrixXd& f_a,
                                   const FieldVector& b, int time_axis) {
    validate_fields(vfs);
    if (vfs.driver_dim != 1) {
        throw DimensionError("field_parametrize: scalar drivers only");
    }
    const DomainGrid& grid = b.grid();
    const int axes = grid.axes();
    if (axes < 2) {
        throw DimensionError("field_parametrize: grid needs a spatial and a time axis");
    }
    if (time_axis < 0) {
        time_axis = axes - 1;
    }
    if (time_axis >= axes) {
        throw DimensionError("field_parametrize: time axis out of range");
    }

    Eigen::Index spatial_count = 1;
    for (int a = 0; a < axes; ++a) {
        if (a != time_axis) {
            spatial_count *= grid.dims()[a];
        }
    }
    if (f_a.rows() != vfs.target_dim || f_a.cols() != spatial_count) {
        throw DimensionError("field_parametrize: boundary field shape mismatch");
    }

    const int nt = grid.dims()[time_axis];
    const double ht = grid.spacing(time_axis);
    const bool dirichlet = grid.boundary(time_axis) == Boundary::Dirichlet;
    const Eigen::Index total = nt + 1 + (dirichlet ? 1 : 0);
    const VectorXc raw = b.raw_values();

    FieldDevelopment out;
    out.site_paths.reserve(spatial_count);
    out.spatial_sites.reserve(spatial_count);

    // Enumerate spatial sites in flattened order with the time index pinned.
    std::vector<int> idx(axes, 0);
    for (Eigen::Index z = 0; z < spatial_count; ++z) {
        DriverPath driver;
        driver.times.resize(total);
        driver.values.resize(1, total);
        driver.times[0] = 0.0;
        driver.values(0, 0) = 0.0;
        for (int k = 0; k < nt; ++k) {
            idx[time_axis] = k;
            const Eigen::Index site = grid.flatten(idx);
            driver.times[k + 1] = (k + 1) * ht;
            driver.values(0, k + 1) = raw[site].real();
        }
        if (dirichlet) {
            driver.times[total - 1] = (nt + 1) * ht;
            driver.values(0, total - 1) = 0.0;
        }

        VectorFieldSet site_vfs = vfs;
        site_vfs.m0 = f_a.col(z);
        const ParamSolution sol =
            develop_path(site_vfs, driver, static_cast<int>(total) - 1);
        if (z == 0) {
            out.times = sol.times;
        }
        out.site_paths.push_back(sol.points);
        out.spatial_sites.push_back(z);

        // advance the spatial odometer (skipping the time axis)
        int a = 0;
        while (a < axes) {
            if (a == time_axis) {
                ++a;
                continue;
            }
            if (++idx[a] < grid.dims()[a]) {
                break;
            }
            idx[a] = 0;
            ++a;
        }
    }
    return out;
}

LinearMapPair::LinearMapPair(MatrixXc m) : m_(std::move(m)), lu_(m_) {
    if (m_.rows() != m_.cols() || m_.rows() == 0) {
        throw DimensionError("LinearMapPair: matrix must be square");
    }
    Complex logdet = 0.0;
    const auto diag = lu_.matrixLU().diagonal();
    const double scale = m_.cwiseAbs().maxCoeff();
    for (Eigen::Index i = 0; i < diag.size(); ++i) {
        if (std::abs(diag[i]) < 1e-13 * scale) {
            throw DegeneracyError("LinearMapPair: map is singular");
        }
        logdet += std::log(diag[i]);
    }
    if (lu_.permutationP().determinant() < 0) {
        logdet += Complex(0.0, kPi);
    }
    logdet_ = logdet;
}

VectorXc LinearMapPair::apply_inverse(const VectorXc& y) const {
    return lu_.solve(y);
}

double LinearMapPair::transpose_defect() const {
    const Eigen::Index n = m_.rows();
    double worst = 0.0;
    CounterRng rng(0x7ru + static_cast<std::uint64_t>(n), 0);
    for (int probe = 0; probe < 4; ++probe) {
        VectorXc x(n);
        VectorXc yp(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            x[i] = Complex(rng.next_uniform(-1.0, 1.0), rng.next_uniform(-1.0, 1.0));
            yp[i] = Complex(rng.next_uniform(-1.0, 1.0), rng.next_uniform(-1.0, 1.0));
        }
        const Complex lhs = (apply_dual(yp).transpose() * x)(0);
        const Complex rhs = (yp.transpose() * (m_ * x))(0);
        worst = std::max(worst, std::abs(lhs - rhs));
    }
    return worst;
}

double change_of_variable_residual(const LinearMapPair& pair, const IntegratorSpec& spec,
                                   const DiracComb& comb) {
    if (spec.kind() != IntegratorSpec::Kind::Gaussian) {
        throw UnsupportedError("change_of_variable_residual: Gaussian kind required");
    }
    const QuadFormPair& qf = spec.quadform();
    if (pair.map().rows() != qf.size()) {
        throw DimensionError("change_of_variable_residual: map does not match form");
    }
    const Complex det_inv = std::exp(-pair.log_det());

    // Transformed side: rebuild the form from scratch as M^{-T} A M^{-1}
    // (fresh dense inversion), with Z scaled by (Det R')^{-1}.
    const Eigen::Index n = qf.size();
    const MatrixXc m_inv = pair.map().partialPivLu().inverse();
    MatrixXc a_bar = m_inv.transpose() * qf.a() * m_inv;
    a_bar = 0.5 * (a_bar + a_bar.transpose()).eval();
    const QuadFormPair qf_bar = QuadFormPair::from_matrix(a_bar);
    Complex lhs = 0.0;
    for (std::size_t k = 0; k < comb.size(); ++k) {
        const Complex w_bar = qf_bar.w(comb.point(k).values());
        lhs += comb.weight(k) * det_inv * std::exp(-kPi * spec.s() * w_bar);
    }

    // Pushforward side: move the comb through R = M^T with the same
    // Jacobian factor and evaluate against the original form.
    Complex rhs = 0.0;
    for (std::size_t k = 0; k < comb.size(); ++k) {
        const VectorXc pushed = pair.apply_dual(comb.point(k).values());
        rhs += comb.weight(k) * det_inv * std::exp(-kPi * spec.s() * qf.w(pushed));
    }
    return std::abs(lhs - rhs);
}

double translation_invariance_residual(const MatrixXc& wm, const VectorXc& u0,
                                       const VectorXc& uprime, int quad_order) {
    const Eigen::Index m = wm.rows();
    if (u0.size() != m || uprime.size() != m) {
        throw DimensionError("translation_invariance_residual: dimension mismatch");
    }
    const auto shifted = [&](const VectorXc& u) {
        const Complex angle = (uprime.transpose() * (u + u0))(0);
        return std::exp(Complex(0.0, -kTwoPi) * angle);
    };
    const Complex lhs = flat_integrate(wm, shifted, quad_order);
    const Complex compensation =
        std::exp(Complex(0.0, -kTwoPi) * (uprime.transpose() * u0)(0));
    const Complex w_up = (uprime.transpose() * wm * uprime)(0);
    const Complex rhs = compensation * std::exp(-kPi * w_up);
    return std::abs(lhs - rhs);
}

} // namespace funcint
