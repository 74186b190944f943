#include "funcint/integrators.hpp"

#include <atomic>
#include <cmath>
#include <mutex>
#include <thread>

#include "funcint/errors.hpp"
#include "funcint/quadrature.hpp"
#include "funcint/rng.hpp"

namespace funcint {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kTwoPi = 6.283185307179586476925286766559;
constexpr int kMaxLocalizedDim = 4;
constexpr std::int64_t kMcBlock = 4096;

} // namespace

IntegratorSpec IntegratorSpec::gaussian(QuadFormPtr qf, Complex s) {
    if (!qf) {
        throw DimensionError("IntegratorSpec: Gaussian kind needs a quadratic form");
    }
    if (!(s.real() > 0.0)) {
        throw DomainError("IntegratorSpec: Re(s) must be positive");
    }
    if (!real_part_positive_definite(qf->a() / s)) {
        throw DegeneracyError("IntegratorSpec: Re(Q/s) is not positive definite");
    }
    IntegratorSpec spec;
    spec.kind_ = Kind::Gaussian;
    spec.qf_ = std::move(qf);
    spec.s_ = s;
    return spec;
}

IntegratorSpec IntegratorSpec::hermite(QuadFormPtr qf, int order, int max_order) {
    if (!qf) {
        throw DimensionError("IntegratorSpec: Hermite kind needs a quadratic form");
    }
    if (order < 0 || order > max_order) {
        throw DomainError("IntegratorSpec: Hermite order out of range");
    }
    IntegratorSpec spec;
    spec.kind_ = Kind::Hermite;
    spec.qf_ = std::move(qf);
    spec.order_ = order;
    return spec;
}

IntegratorSpec IntegratorSpec::flat(MatrixXc wm) {
    if (wm.rows() != wm.cols() || wm.rows() == 0) {
        throw DimensionError("IntegratorSpec: flat form must be square");
    }
    if (symmetry_defect(wm) > 1e-12 * std::max(1.0, wm.cwiseAbs().maxCoeff())) {
        throw DegeneracyError("IntegratorSpec: flat form must be symmetric");
    }
    if (!real_part_positive_definite(wm)) {
        throw DegeneracyError("IntegratorSpec: flat form must have positive-definite real part");
    }
    IntegratorSpec spec;
    spec.kind_ = Kind::Flat;
    spec.flat_wm_ = std::move(wm);
    return spec;
}

const QuadFormPair& IntegratorSpec::quadform() const {
    if (!qf_) {
        throw UnsupportedError("IntegratorSpec: no quadratic form attached");
    }
    return *qf_;
}

Complex z_eval(const IntegratorSpec& spec, const DualVector& bp) {
    if (spec.kind() != IntegratorSpec::Kind::Gaussian) {
        throw UnsupportedError("z_eval: Z is exposed for the Gaussian kind only");
    }
    return std::exp(-kPi * spec.s() * spec.quadform().w(bp));
}

Complex integrate_analytic(const IntegratorSpec& spec, const DiracComb& comb) {
    if (spec.kind() != IntegratorSpec::Kind::Gaussian) {
        throw UnsupportedError("integrate_analytic: Gaussian kind required");
    }
    Complex sum = 0.0;
    for (std::size_t k = 0; k < comb.size(); ++k) {
        sum += comb.weight(k) * z_eval(spec, comb.point(k));
    }
    return sum;
}

Complex mean_value_route(const IntegratorSpec& spec, const DiracComb& comb) {
    // Theta~(<b>, .) is the constant-in-b kernel equal to Z; integrating the
    // comb against it must reproduce integrate_analytic term by term.
    const auto theta_tilde = [&spec](const DualVector& bp) { return z_eval(spec, bp); };
    Complex sum = 0.0;
    for (std::size_t k = 0; k < comb.size(); ++k) {
        sum += comb.weight(k) * theta_tilde(comb.point(k));
    }
    return sum;
}

GaussianSampler::GaussianSampler(const IntegratorSpec& spec, GridPtr grid) {
    if (spec.kind() != IntegratorSpec::Kind::Gaussian) {
        throw UnsupportedError("GaussianSampler: Gaussian kind required");
    }
    const Complex s = spec.s();
    if (std::abs(s.imag()) > 1e-14 * std::abs(s)) {
        throw UnsupportedError("GaussianSampler: sampling requires real s");
    }
    const QuadFormPair& qf = spec.quadform();
    if (!effectively_real(qf.a())) {
        throw UnsupportedError("GaussianSampler: sampling requires a real form");
    }
    grid_ = grid ? std::move(grid) : qf.grid();
    if (!grid_) {
        throw DimensionError("GaussianSampler: no grid available for samples");
    }
    if (grid_->site_count() != qf.size()) {
        throw DimensionError("GaussianSampler: grid does not match form size");
    }

    Eigen::MatrixXd a = qf.a().real();
    Eigen::LLT<Eigen::MatrixXd> llt(a);
    if (llt.info() != Eigen::Success) {
        throw DegeneracyError("GaussianSampler: form is not positive definite");
    }
    // Covariance (s / 2 pi) A^{-1} realized as b = sqrt(s / 2 pi) L^{-T} x.
    const Eigen::Index n = a.rows();
    Eigen::MatrixXd lt_inv = Eigen::MatrixXd::Identity(n, n);
    llt.matrixU().solveInPlace(lt_inv);
    unwhiten_ = std::sqrt(s.real() / kTwoPi) * lt_inv;
}

void GaussianSampler::sample_values(std::uint64_t seed, std::uint64_t index,
                                    Eigen::VectorXd& out) const {
    const Eigen::Index n = unwhiten_.rows();
    CounterRng rng(seed, index);
    Eigen::VectorXd x(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        x[i] = rng.next_normal();
    }
    out.noalias() = unwhiten_ * x;
}

FieldVector GaussianSampler::sample(std::uint64_t seed, std::uint64_t index) const {
    Eigen::VectorXd values(unwhiten_.rows());
    sample_values(seed, index, values);
    return FieldVector(grid_, values.cast<Complex>());
}

std::vector<FieldVector> sample_gaussian(const IntegratorSpec& spec, std::int64_t count,
                                         std::uint64_t seed) {
    GaussianSampler sampler(spec);
    std::vector<FieldVector> out;
    out.reserve(static_cast<std::size_t>(count));
    for (std::int64_t i = 0; i < count; ++i) {
        out.push_back(sampler.sample(seed, static_cast<std::uint64_t>(i)));
    }
    return out;
}

namespace {

// Deterministic pairwise combination over the fixed block layout.
template <typename T>
T pairwise_reduce(std::vector<T> v) {
    std::size_t n = v.size();
    while (n > 1) {
        std::size_t h = 0;
        for (std::size_t i = 0; i + 1 < n; i += 2) {
            v[h++] = v[i] + v[i + 1];
        }
        if (n % 2 == 1) {
            v[h++] = v[n - 1];
        }
        n = h;
    }
    return v.empty() ? T{} : v[0];
}

struct McOptions {
    bool count_failures = false;  // otherwise the first failure throws
};

std::vector<McEstimate> run_mc(const IntegratorSpec& spec,
                               const std::vector<McIntegrand>& fs, std::int64_t count,
                               std::uint64_t seed, int workers, const McOptions& options) {
    if (count <= 0) {
        throw DomainError("integrate_mc: sample count must be positive");
    }
    if (fs.empty()) {
        throw DomainError("integrate_mc: at least one integrand required");
    }
    GaussianSampler sampler(spec);
    const std::size_t nf = fs.size();
    const std::int64_t nblocks = (count + kMcBlock - 1) / kMcBlock;

    std::vector<std::vector<Complex>> block_sums(nf, std::vector<Complex>(nblocks, Complex(0.0)));
    std::vector<std::vector<double>> block_abs2(nf, std::vector<double>(nblocks, 0.0));
    std::vector<std::vector<std::int64_t>> block_failed(nf,
                                                        std::vector<std::int64_t>(nblocks, 0));

    std::atomic<std::int64_t> next_block{0};
    std::mutex error_mutex;
    std::exception_ptr worker_error;

    const auto work = [&]() {
        Eigen::VectorXd values(sampler.size());
        try {
            for (;;) {
                const std::int64_t blk = next_block.fetch_add(1);
                if (blk >= nblocks) {
                    break;
                }
                const std::int64_t begin = blk * kMcBlock;
                const std::int64_t end = std::min(count, begin + kMcBlock);
                for (std::int64_t i = begin; i < end; ++i) {
                    sampler.sample_values(seed, static_cast<std::uint64_t>(i), values);
                    FieldVector b(sampler.grid(), values.cast<Complex>());
                    for (std::size_t j = 0; j < nf; ++j) {
                        Complex v;
                        bool ok = true;
                        if (options.count_failures) {
                            try {
                                v = fs[j](b);
                            } catch (const Error&) {
                                ok = false;
                            }
                        } else {
                            v = fs[j](b);
                        }
                        if (ok && (!std::isfinite(v.real()) || !std::isfinite(v.imag()))) {
                            if (options.count_failures) {
                                ok = false;
                            } else {
                                throw SamplingError("integrate_mc: non-finite integrand at sample " +
                                                    std::to_string(i));
                            }
                        }
                        if (ok) {
                            block_sums[j][blk] += v;
                            block_abs2[j][blk] += std::norm(v);
                        } else {
                            ++block_failed[j][blk];
                        }
                    }
                }
            }
        } catch (...) {
            std::lock_guard<std::mutex> lock(error_mutex);
            if (!worker_error) {
                worker_error = std::current_exception();
            }
        }
    };

    const int nthreads = std::max(1, workers);
    if (nthreads == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(nthreads);
        for (int t = 0; t < nthreads; ++t) {
            pool.emplace_back(work);
        }
        for (auto& th : pool) {
            th.join();
        }
    }
    if (worker_error) {
        std::rethrow_exception(worker_error);
    }

    std::vector<McEstimate> out(nf);
    for (std::size_t j = 0; j < nf; ++j) {
        const Complex sum = pairwise_reduce(block_sums[j]);
        const double abs2 = pairwise_reduce(block_abs2[j]);
        std::int64_t failed = 0;
        for (const std::int64_t c : block_failed[j]) {
            failed += c;
        }
        const std::int64_t used = count - failed;
        if (used <= 0) {
            throw SamplingError("integrate_mc: every sample failed");
        }
        McEstimate est;
        est.samples = count;
        est.seed = seed;
        est.failed = failed;
        est.mean = sum / static_cast<double>(used);
        double variance = 0.0;
        if (used > 1) {
            variance = (abs2 - static_cast<double>(used) * std::norm(est.mean)) /
                       static_cast<double>(used - 1);
            variance = std::max(0.0, variance);
        }
        est.std_error = std::sqrt(variance / static_cast<double>(used));
        out[j] = est;
    }
    return out;
}

} // namespace

McEstimate integrate_mc(const IntegratorSpec& spec, const McIntegrand& f, std::int64_t count,
                        std::uint64_t seed, int workers) {
    return run_mc(spec, {f}, count, seed, workers, {})[0];
}

std::vector<McEstimate> integrate_mc_multi(const IntegratorSpec& spec,
                                           const std::vector<McIntegrand>& fs,
                                           std::int64_t count, std::uint64_t seed, int workers) {
    return run_mc(spec, fs, count, seed, workers, {});
}

McEstimate integrate_mc_counting(const IntegratorSpec& spec, const McIntegrand& f,
                                 std::int64_t count, std::uint64_t seed, int workers) {
    McOptions options;
    options.count_failures = true;
    return run_mc(spec, {f}, count, seed, workers, options)[0];
}

Complex integrate_localized_hermite(int n, const std::function<Complex(const VectorXc&)>& f,
                                    const Localization& loc, std::vector<int> alpha,
                                    int quad_order) {
    if (n < 0) {
        throw DomainError("integrate_localized_hermite: order must be nonnegative");
    }
    const int m = loc.dim();
    if (m > kMaxLocalizedDim) {
        throw LocalizationError("integrate_localized_hermite: localization dimension too large");
    }
    if (alpha.empty()) {
        alpha.assign(m, 0);
        alpha[0] = n;
    }
    if (static_cast<int>(alpha.size()) != m) {
        throw DimensionError("integrate_localized_hermite: multi-index length mismatch");
    }
    int total = 0;
    for (const int a : alpha) {
        if (a < 0) {
            throw DomainError("integrate_localized_hermite: multi-index entries must be >= 0");
        }
        total += a;
    }
    if (total != n) {
        throw DomainError("integrate_localized_hermite: multi-index order must sum to n");
    }
    if (quad_order <= 0) {
        quad_order = std::max(24, n + 12);
    }

    // (det pi Wm / 2)^{n/2}; the (det Wm)^{-1/2} factor cancels against the
    // Jacobian of u = L v computed from the same factorization.
    const Complex prefactor =
        std::exp(0.5 * n * (static_cast<double>(m) * std::log(kPi / 2.0) + loc.log_det_wm()));
    const MatrixXc& l = loc.wm_cholesky();
    const double root_pi_inv = 1.0 / std::sqrt(kPi);

    Complex sum = 0.0;
    VectorXc u(m);
    gauss_hermite_tensor(m, quad_order, [&](const Eigen::VectorXd& x, double w) {
        double h = 1.0;
        for (int i = 0; i < m; ++i) {
            if (alpha[i] > 0) {
                h *= hermite_value(alpha[i], x[i]);
            }
        }
        u.noalias() = l * (x * root_pi_inv).cast<Complex>();
        sum += w * h * f(u);
    });
    return prefactor * std::pow(root_pi_inv, m) * sum;
}

std::function<Complex(const VectorXc&)> hermite_test_functional(int m, Complex w) {
    if (m < 0) {
        throw DomainError("hermite_test_functional: order must be nonnegative");
    }
    const Complex scale = std::pow(kPi * w / 2.0, 0.5 * m);
    const Complex arg_scale = std::sqrt(kPi / w);
    return [m, scale, arg_scale](const VectorXc& u) {
        return scale * hermite_value(m, arg_scale * u[0]);
    };
}

Complex hermite_orthogonality(int n, int m_order, const Localization& loc) {
    if (loc.dim() != 1) {
        throw LocalizationError("hermite_orthogonality: one-dimensional localization required");
    }
    const auto f = hermite_test_functional(m_order, loc.scalar_w());
    return integrate_localized_hermite(n, f, loc, {}, std::max(24, n + m_order + 4));
}

Complex scalar_product_nm(int n, int m_order, const Localization& loc) {
    if (loc.dim() != 1) {
        throw LocalizationError("scalar_product_nm: one-dimensional localization required");
    }
    // <n|m> pairs the degree-n wave functional against the order-m
    // integrator, so the roles swap relative to hermite_orthogonality.
    const auto f = hermite_test_functional(n, loc.scalar_w());
    return integrate_localized_hermite(m_order, f, loc, {}, std::max(24, n + m_order + 4));
}

Complex flat_integrate(const MatrixXc& wm, const std::function<Complex(const VectorXc&)>& f,
                       int quad_order) {
    if (wm.rows() != wm.cols() || wm.rows() == 0) {
        throw DimensionError("flat_integrate: form must be square");
    }
    const int m = static_cast<int>(wm.rows());
    if (m > kMaxLocalizedDim) {
        throw LocalizationError("flat_integrate: dimension too large for tensor quadrature");
    }
    if (!real_part_positive_definite(wm)) {
        throw DegeneracyError("flat_integrate: form must have positive-definite real part");
    }
    const MatrixXc l = symmetric_cholesky(wm);
    const double root_pi_inv = 1.0 / std::sqrt(kPi);

    Complex sum = 0.0;
    VectorXc u(m);
    gauss_hermite_tensor(m, quad_order, [&](const Eigen::VectorXd& x, double w) {
        u.noalias() = l * (x * root_pi_inv).cast<Complex>();
        sum += w * f(u);
    });
    return std::pow(root_pi_inv, m) * sum;
}

Complex definition3_quadrature_route(const IntegratorSpec& spec, const DiracComb& comb,
                                     int quad_order) {
    if (spec.kind() != IntegratorSpec::Kind::Gaussian) {
        throw UnsupportedError("definition3_quadrature_route: Gaussian kind required");
    }
    if (comb.size() == 0) {
        return 0.0;
    }
    if (comb.size() > kMaxLocalizedDim) {
        throw LocalizationError("definition3_quadrature_route: too many comb points to localize");
    }
    Localization loc = Localization::build(spec.quadform_ptr(),
                                           std::vector<DualVector>(comb.points()));
    const std::size_t npts = comb.size();
    std::vector<Complex> weights(comb.weights());
    const auto f = [npts, &weights](const VectorXc& u) {
        Complex acc = 0.0;
        for (std::size_t k = 0; k < npts; ++k) {
            acc += weights[k] * std::exp(Complex(0.0, -kTwoPi) * u[static_cast<Eigen::Index>(k)]);
        }
        return acc;
    };
    return flat_integrate(spec.s() * loc.wm(), f, quad_order);
}

} // namespace funcint
