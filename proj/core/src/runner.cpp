#include "funcint/runner.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>

#include <nlohmann/json.hpp>

#include "funcint/effective.hpp"
#include "funcint/errors.hpp"
#include "funcint/integrators.hpp"
#include "funcint/measures.hpp"
#include "funcint/parametrize.hpp"
#include "funcint/qft.hpp"
#include "funcint/rng.hpp"

namespace funcint {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr double kPi = 3.14159265358979323846;

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string fmt_u64_hex(std::uint64_t v) {
    char buf[24];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

class CsvWriter {
public:
    CsvWriter(const fs::path& path, const std::vector<std::string>& header) : out_(path) {
        if (!out_) {
            throw Error("cannot open output file " + path.string());
        }
        write_cells(header);
    }

    void row(const std::vector<std::string>& cells) { write_cells(cells); }

private:
    void write_cells(const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) {
                out_ << ',';
            }
            out_ << cells[i];
        }
        out_ << '\n';
    }

    std::ofstream out_;
};

struct RunContext {
    fs::path out_dir;
    std::uint64_t seed = 0;
    int workers = 1;
    std::vector<std::string> outputs;
    json extras;  // subcommand-specific manifest payload

    CsvWriter make_csv(const std::string& name, const std::vector<std::string>& header) {
        fs::create_directories(out_dir);
        outputs.push_back(name);
        return CsvWriter(out_dir / name, header);
    }

    void write_json(const std::string& name, const json& payload) {
        fs::create_directories(out_dir);
        outputs.push_back(name);
        std::ofstream out(out_dir / name);
        out << payload.dump(2) << '\n';
    }
};

using SubcommandFn = std::function<std::vector<CheckResult>(const ConfigMap&, RunContext&)>;

// ---------------------------------------------------------------------------
// shared builders

Boundary boundary_from(const std::string& name) {
    if (name == "free") {
        return Boundary::Free;
    }
    if (name == "dirichlet") {
        return Boundary::Dirichlet;
    }
    throw ConfigError("grid: boundary must be free or dirichlet, got " + name);
}

GridPtr grid_from(const ConfigMap& cfg) {
    GridSpec spec;
    spec.dims = cfg.get_int_list("grid", "dims");
    spec.spacing = cfg.get_double_list("grid", "spacing");
    if (spec.spacing.size() == 1 && spec.dims.size() > 1) {
        spec.spacing.assign(spec.dims.size(), spec.spacing[0]);
    }
    spec.boundary = {boundary_from(cfg.get_string("grid", "boundary"))};
    for (const int d : spec.dims) {
        if (d <= 0) {
            throw ConfigError("grid: dims must be positive");
        }
    }
    return DomainGrid::build(spec);
}

QuadFormPtr quadform_from(const ConfigMap& cfg, const GridPtr& grid) {
    const double mass = cfg.get_double("quadform", "mass");
    const double stiffness = cfg.get_double("quadform", "stiffness");
    return std::make_shared<QuadFormPair>(
        QuadFormPair::from_action_density(grid, mass, stiffness));
}

DualVector random_dual(const GridPtr& grid, CounterRng& rng, double scale) {
    VectorXc values(grid->site_count());
    for (Eigen::Index i = 0; i < values.size(); ++i) {
        values[i] = Complex(rng.next_uniform(-scale, scale), 0.0);
    }
    return DualVector(grid, std::move(values));
}

Localization random_onedim_localization(const QuadFormPtr& qf, CounterRng& rng) {
    const GridPtr& grid = qf->grid();
    for (int attempt = 0; attempt < 8; ++attempt) {
        DualVector row = random_dual(grid, rng, 1.0);
        if (row.values().cwiseAbs().maxCoeff() < 1e-6) {
            continue;  // nearly-zero draw, try again
        }
        return Localization::build(qf, {std::move(row)});
    }
    throw LocalizationError("random localization kept degenerating");
}

/// Localization whose pushed-forward form equals the given SPD matrix: the
/// form is wm^{-1} on an m-site grid and the rows are the dual basis.
Localization localization_with_wm(const Eigen::MatrixXd& wm) {
    const int m = static_cast<int>(wm.rows());
    GridSpec spec;
    spec.dims = {m};
    spec.spacing = {1.0};
    spec.boundary = {Boundary::Free};
    spec.dims_are_interior = true;
    GridPtr grid = DomainGrid::build(spec);
    const Eigen::MatrixXd a = wm.inverse();
    QuadFormPtr qf = std::make_shared<QuadFormPair>(
        QuadFormPair::from_matrix(0.5 * (a + a.transpose()).cast<Complex>(), grid));
    std::vector<DualVector> rows;
    for (int i = 0; i < m; ++i) {
        VectorXc e = VectorXc::Zero(m);
        e[i] = 1.0;
        rows.emplace_back(grid, std::move(e));
    }
    return Localization::build(std::move(qf), std::move(rows));
}

DiracComb random_comb(const GridPtr& grid, CounterRng& rng, int points, double scale) {
    DiracComb comb;
    for (int k = 0; k < points; ++k) {
        const double mag = rng.next_uniform(0.4, 1.0);
        const double phase = rng.next_uniform(0.0, 2.0 * kPi);
        comb.add(random_dual(grid, rng, scale), mag * Complex(std::cos(phase), std::sin(phase)));
    }
    return comb;
}

CheckResult check_below(const std::string& name, double value, double tolerance) {
    return {name, value < tolerance, value, tolerance};
}

CheckResult check_at_least(const std::string& name, double value, double threshold) {
    return {name, value >= threshold, value, threshold};
}

// ---------------------------------------------------------------------------
// normcheck: the order-n normalization table over random localizations

std::vector<CheckResult> sub_normcheck(const ConfigMap& cfg, RunContext& ctx) {
    const int nmax = static_cast<int>(cfg.get_int("normcheck", "nmax"));
    const int locs = static_cast<int>(cfg.get_int("normcheck", "locs"));
    const double tolerance = cfg.get_double("normcheck", "tolerance");
    if (nmax < 0 || locs < 1) {
        throw ConfigError("normcheck: nmax must be >= 0 and locs >= 1");
    }
    const GridPtr grid = grid_from(cfg);
    const QuadFormPtr qf = quadform_from(cfg, grid);

    CsvWriter csv = ctx.make_csv(
        "normcheck.csv", {"loc_index", "n", "value_re", "value_im", "deviation"});
    const auto one = [](const VectorXc&) { return Complex(1.0, 0.0); };

    double worst = 0.0;
    for (int li = 0; li < locs; ++li) {
        CounterRng rng(ctx.seed, 1000 + static_cast<std::uint64_t>(li));
        const Localization loc = random_onedim_localization(qf, rng);
        for (int n = 0; n <= nmax; ++n) {
            const Complex value = integrate_localized_hermite(n, one, loc);
            const double target = (n == 0) ? 1.0 : 0.0;
            const double deviation = std::abs(value - target);
            worst = std::max(worst, deviation);
            csv.row({std::to_string(li), std::to_string(n), fmt(value.real()),
                     fmt(value.imag()), fmt(deviation)});
        }
    }
    return {check_below("max_deviation", worst, tolerance)};
}

// ---------------------------------------------------------------------------
// ortho: (pi W)^m n! delta_nm table

std::vector<CheckResult> sub_ortho(const ConfigMap& cfg, RunContext& ctx) {
    const int nmax = static_cast<int>(cfg.get_int("ortho", "nmax"));
    const std::vector<double> w_values = cfg.get_double_list("ortho", "w_values");
    const double rel_tol = cfg.get_double("ortho", "rel_tolerance");
    const double abs_tol = cfg.get_double("ortho", "abs_tolerance");
    if (nmax < 0) {
        throw ConfigError("ortho: nmax must be >= 0");
    }
    for (const double w : w_values) {
        if (w <= 0.0) {
            throw ConfigError("ortho: w values must be positive");
        }
    }

    CsvWriter csv = ctx.make_csv(
        "ortho.csv", {"w", "n", "m", "value_re", "value_im", "target", "error"});

    double worst_rel = 0.0;
    double worst_abs = 0.0;
    for (const double w : w_values) {
        const Localization loc = localization_with_wm(Eigen::MatrixXd::Constant(1, 1, w));
        double factorial = 1.0;
        for (int n = 0; n <= nmax; ++n) {
            if (n > 0) {
                factorial *= n;
            }
            double fact_m = 1.0;
            for (int m = 0; m <= nmax; ++m) {
                if (m > 0) {
                    fact_m *= m;
                }
                const Complex value = hermite_orthogonality(n, m, loc);
                const double target = (n == m) ? std::pow(kPi * w, m) * fact_m : 0.0;
                double error;
                if (n == m) {
                    error = std::abs(value - target) / target;
                    worst_rel = std::max(worst_rel, error);
                } else {
                    error = std::abs(value);
                    worst_abs = std::max(worst_abs, error);
                }
                csv.row({fmt(w), std::to_string(n), std::to_string(m), fmt(value.real()),
                         fmt(value.imag()), fmt(target), fmt(error)});
            }
        }
    }
    return {check_below("diagonal_relative", worst_rel, rel_tol),
            check_below("offdiagonal_absolute", worst_abs, abs_tol)};
}

// ---------------------------------------------------------------------------
// definition3: analytic vs localized quadrature vs Monte Carlo

std::vector<CheckResult> sub_definition3(const ConfigMap& cfg, RunContext& ctx) {
    const int instances = static_cast<int>(cfg.get_int("definition3", "instances"));
    const int max_points = static_cast<int>(cfg.get_int("definition3", "max_points"));
    const std::int64_t samples = cfg.get_int("definition3", "samples");
    const int quad_order = static_cast<int>(cfg.get_int("definition3", "quad_order"));
    const double quad_tol = cfg.get_double("definition3", "quad_tolerance");
    const double z_bound = cfg.get_double("definition3", "z_bound");
    if (instances < 1 || max_points < 1 || max_points > 5) {
        throw ConfigError("definition3: instances >= 1 and 1 <= max_points <= 5 required");
    }
    if (samples < 2) {
        throw ConfigError("definition3: sample count must be at least 2");
    }
    const GridPtr grid = grid_from(cfg);
    const QuadFormPtr qf = quadform_from(cfg, grid);

    CsvWriter csv = ctx.make_csv(
        "definition3.csv",
        {"instance", "points", "s", "analytic_re", "analytic_im", "quad_re", "quad_im",
         "quad_rel", "mc_re", "mc_im", "mc_stderr", "mc_z"});

    json combs = json::array();
    double worst_rel = 0.0;
    double worst_z = 0.0;
    for (int i = 0; i < instances; ++i) {
        CounterRng rng(ctx.seed, 2000 + static_cast<std::uint64_t>(i));
        const double s = rng.next_uniform(0.5, 2.0);
        const int points = 1 + static_cast<int>(rng.next_uniform(0.0, max_points));
        const DiracComb comb = random_comb(grid, rng, points, 0.8);
        combs.push_back(json::parse(comb_to_json(comb)));

        const IntegratorSpec spec = IntegratorSpec::gaussian(qf, s);
        const Complex analytic = integrate_analytic(spec, comb);

        std::string quad_re = "nan";
        std::string quad_im = "nan";
        std::string quad_rel = "nan";
        if (points <= 3) {
            const Complex quad = definition3_quadrature_route(spec, comb, quad_order);
            const double rel = std::abs(quad - analytic) / std::abs(analytic);
            worst_rel = std::max(worst_rel, rel);
            quad_re = fmt(quad.real());
            quad_im = fmt(quad.imag());
            quad_rel = fmt(rel);
        }

        const IntegrableFunctional f(comb, ThetaWeight::phase_only());
        const McEstimate mc = integrate_mc(
            spec, [&f](const FieldVector& b) { return f(b); }, samples, ctx.seed + i,
            ctx.workers);
        const double z = std::abs(mc.mean - analytic) / mc.std_error;
        worst_z = std::max(worst_z, z);

        csv.row({std::to_string(i), std::to_string(points), fmt(s), fmt(analytic.real()),
                 fmt(analytic.imag()), quad_re, quad_im, quad_rel, fmt(mc.mean.real()),
                 fmt(mc.mean.imag()), fmt(mc.std_error), fmt(z)});
    }
    ctx.extras["combs"] = std::move(combs);
    return {check_below("quadrature_relative", worst_rel, quad_tol),
            check_below("mc_z_max", worst_z, z_bound)};
}

// ---------------------------------------------------------------------------
// cov: change-of-variable residuals

std::vector<CheckResult> sub_cov(const ConfigMap& cfg, RunContext& ctx) {
    const int cases = static_cast<int>(cfg.get_int("cov", "cases"));
    const double tolerance = cfg.get_double("cov", "tolerance");
    if (cases < 1) {
        throw ConfigError("cov: cases must be >= 1");
    }
    const GridPtr grid = grid_from(cfg);
    const QuadFormPtr qf = quadform_from(cfg, grid);
    const double s_re = cfg.get_double("integrator", "s_re");
    const double s_im = cfg.get_double("integrator", "s_im");
    const IntegratorSpec spec = IntegratorSpec::gaussian(qf, Complex(s_re, s_im));
    const Eigen::Index n = qf->size();

    CsvWriter csv = ctx.make_csv("cov.csv", {"case", "kind", "residual"});

    double worst = 0.0;
    for (int c = 0; c < cases; ++c) {
        CounterRng rng(ctx.seed, 3000 + static_cast<std::uint64_t>(c));
        MatrixXc m;
        std::string kind;
        if (c == 0) {
            m = MatrixXc::Identity(n, n);
            kind = "identity";
        } else if (c == 1) {
            m = 2.0 * MatrixXc::Identity(n, n);
            kind = "scale";
        } else {
            // orthogonal factor times a safe diagonal: well-conditioned and
            // random enough to probe the transformation bookkeeping
            Eigen::MatrixXd g(n, n);
            for (Eigen::Index i = 0; i < n; ++i) {
                for (Eigen::Index j = 0; j < n; ++j) {
                    g(i, j) = rng.next_uniform(-1.0, 1.0);
                }
            }
            const Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
            Eigen::MatrixXd q = qr.householderQ();
            Eigen::VectorXd d(n);
            for (Eigen::Index i = 0; i < n; ++i) {
                d[i] = rng.next_uniform(0.5, 1.5);
            }
            m = (q * d.asDiagonal()).cast<Complex>();
            kind = "random";
        }
        const LinearMapPair pair(m);
        const DiracComb comb = random_comb(grid, rng, 2, 0.7);
        const double residual = change_of_variable_residual(pair, spec, comb);
        worst = std::max(worst, residual);
        csv.row({std::to_string(c), kind, fmt(residual)});
    }
    return {check_below("max_residual", worst, tolerance)};
}

// ---------------------------------------------------------------------------
// sd: integration-by-parts residuals for polynomial observables

std::vector<CheckResult> sub_sd(const ConfigMap& cfg, RunContext& ctx) {
    const int forms = static_cast<int>(cfg.get_int("sd", "forms"));
    const int max_degree = static_cast<int>(cfg.get_int("sd", "max_degree"));
    const int quad_order = static_cast<int>(cfg.get_int("sd", "quad_order"));
    const double tolerance = cfg.get_double("sd", "tolerance");
    if (forms < 1 || max_degree < 1 || max_degree > 6) {
        throw ConfigError("sd: forms >= 1 and 1 <= max_degree <= 6 required");
    }

    const std::vector<std::pair<int, std::string>> catalog = {
        {1, "1"},          {1, "u0"},         {1, "u0^2"},       {1, "u0^3"},
        {1, "u0^4"},       {2, "u0 u1"},      {2, "u0^2 u1"},    {2, "u0^2 u1^2"},
        {2, "u0^3 u1"},    {2, "1; u0 u1; u1^2"},
    };

    CsvWriter csv = ctx.make_csv("sd.csv", {"form", "m", "poly", "degree", "residual"});

    double worst = 0.0;
    for (int fi = 0; fi < forms; ++fi) {
        const int m = (fi % 2 == 0) ? 1 : 2;
        CounterRng rng(ctx.seed, 4000 + static_cast<std::uint64_t>(fi));
        Eigen::MatrixXd b(m, m);
        for (int i = 0; i < m; ++i) {
            for (int j = 0; j < m; ++j) {
                b(i, j) = rng.next_uniform(-1.0, 1.0);
            }
        }
        const Eigen::MatrixXd wm =
            b * b.transpose() + 0.4 * Eigen::MatrixXd::Identity(m, m);
        const Localization loc = localization_with_wm(wm);

        for (const auto& [dim, text] : catalog) {
            if (dim > m) {
                continue;
            }
            const Polynomial poly = Polynomial::parse(text, m);
            if (poly.degree() > max_degree) {
                continue;
            }
            const double residual = schwinger_dyson_residual(loc, poly, quad_order);
            worst = std::max(worst, residual);
            csv.row({std::to_string(fi), std::to_string(m), text,
                     std::to_string(poly.degree()), fmt(residual)});
        }
    }
    return {check_below("max_residual", worst, tolerance)};
}

// ---------------------------------------------------------------------------
// effective: generating functional, mean field, effective action

std::vector<CheckResult> sub_effective(const ConfigMap& cfg, RunContext& ctx) {
    const std::vector<double> lambdas = cfg.get_double_list("effective", "lambdas");
    const double w_value = cfg.get_double("effective", "w");
    const double halfwidth = cfg.get_double("effective", "grid_halfwidth");
    const int points = static_cast<int>(cfg.get_int("effective", "grid_points"));
    const int quad_order = static_cast<int>(cfg.get_int("effective", "quad_order"));
    const double fixed_point_tol = cfg.get_double("effective", "fixed_point_tolerance");
    const double eom_tol = cfg.get_double("effective", "eom_tolerance");
    const double roundtrip_tol = cfg.get_double("effective", "roundtrip_tolerance");
    if (w_value <= 0.0 || halfwidth <= 0.0 || points < 5 || points % 2 == 0) {
        throw ConfigError("effective: need w > 0, halfwidth > 0, odd points >= 5");
    }
    for (const double lambda : lambdas) {
        if (lambda < 0.0) {
            throw ConfigError("effective: couplings must be nonnegative");
        }
    }

    Eigen::VectorXd uprime_grid(points);
    const double h = 2.0 * halfwidth / (points - 1);
    for (int i = 0; i < points; ++i) {
        uprime_grid[i] = -halfwidth + i * h;
    }
    uprime_grid[(points - 1) / 2] = 0.0;

    const Localization loc = localization_with_wm(Eigen::MatrixXd::Constant(1, 1, w_value));

    double worst_fixed_point = 0.0;
    double worst_eom = 0.0;
    double worst_roundtrip = 0.0;
    double worst_zero_consistency = 0.0;
    json summary = json::array();

    for (std::size_t li = 0; li < lambdas.size(); ++li) {
        const double lambda = lambdas[li];
        ActionFunctional action;
        action.quadratic = loc.quadform();
        action.quartic_coupling = lambda;

        EffectiveState state =
            gamma_legendre(w_s_compute(action, loc, uprime_grid, quad_order));
        const EffectiveAxisSlice& slice = state.slices()[0];

        CsvWriter ws_csv = ctx.make_csv("effective_ws_" + std::to_string(li) + ".csv",
                                        {"uprime", "w_s", "w_tilt", "mean"});
        for (int i = 0; i < points; ++i) {
            ws_csv.row({fmt(slice.uprime[i]), fmt(slice.w_s[i]), fmt(slice.w_tilt[i]),
                        fmt(slice.mean[i])});
        }
        CsvWriter g_csv = ctx.make_csv("effective_gamma_" + std::to_string(li) + ".csv",
                                       {"v", "gamma"});
        for (Eigen::Index i = 0; i < slice.gamma_v.size(); ++i) {
            g_csv.row({fmt(slice.gamma_v[i]), fmt(slice.gamma[i])});
        }

        const double eom = quantum_eom_residual(state);
        const double roundtrip = legendre_roundtrip_error(state);
        const double zero_gap = std::abs(
            slice.w_s[(points - 1) / 2] + std::log(state.normalization()) / kPi);
        worst_eom = std::max(worst_eom, eom);
        worst_roundtrip = std::max(worst_roundtrip, roundtrip);
        worst_zero_consistency = std::max(worst_zero_consistency, zero_gap);

        json entry;
        entry["lambda"] = lambda;
        entry["normalization"] = state.normalization();
        entry["eom_residual"] = eom;
        entry["legendre_roundtrip"] = roundtrip;
        if (lambda == 0.0) {
            const double fp = quadratic_action_recovery_error(state);
            worst_fixed_point = std::max(worst_fixed_point, fp);
            entry["quadratic_fixed_point"] = fp;
        }
        summary.push_back(std::move(entry));
    }
    ctx.write_json("effective_summary.json", summary);
    ctx.extras["summary"] = summary;

    return {check_below("lambda0_quadratic_fixed_point", worst_fixed_point, fixed_point_tol),
            check_below("eom_residual_max", worst_eom, eom_tol),
            check_below("legendre_roundtrip_max", worst_roundtrip, roundtrip_tol),
            check_below("w_s_zero_consistency", worst_zero_consistency, 1e-12)};
}

// ---------------------------------------------------------------------------
// develop: midpoint development error against the circle flow

std::vector<CheckResult> sub_develop(const ConfigMap& cfg, RunContext& ctx) {
    const int base_steps = static_cast<int>(cfg.get_int("develop", "base_steps"));
    const int doublings = static_cast<int>(cfg.get_int("develop", "doublings"));
    const double tolerance = cfg.get_double("develop", "tolerance");
    const double ratio_lo = cfg.get_double("develop", "ratio_lo");
    const double ratio_hi = cfg.get_double("develop", "ratio_hi");
    const int reference_steps = static_cast<int>(cfg.get_int("develop", "reference_steps"));
    if (base_steps < 2 || doublings < 1) {
        throw ConfigError("develop: base_steps >= 2 and doublings >= 1 required");
    }

    const VectorFieldSet vfs = VectorFieldSet::rotation();
    DriverPath driver;
    driver.times.resize(2);
    driver.times << 0.0, 1.0;
    driver.values.resize(1, 2);
    driver.values << 0.0, 1.0;

    CsvWriter csv = ctx.make_csv("develop.csv", {"steps", "error", "ratio"});

    double error_at_reference = -1.0;
    double prev_error = 0.0;
    double worst_ratio_defect = 0.0;
    bool ratios_ok = true;
    for (int k = 0; k <= doublings; ++k) {
        const int steps = base_steps << k;
        const ParamSolution sol = develop_path(vfs, driver, steps);
        double error = 0.0;
        for (Eigen::Index i = 0; i < sol.times.size(); ++i) {
            const double t = sol.times[i];
            const Eigen::Vector2d exact(std::cos(t), std::sin(t));
            error = std::max(error, (sol.points.col(i) - exact).norm());
        }
        std::string ratio_text = "nan";
        if (k > 0) {
            const double ratio = prev_error / error;
            ratio_text = fmt(ratio);
            if (ratio < ratio_lo || ratio > ratio_hi) {
                ratios_ok = false;
            }
            worst_ratio_defect =
                std::max(worst_ratio_defect, std::abs(ratio - 4.0));
        }
        if (steps == reference_steps) {
            error_at_reference = error;
        }
        csv.row({std::to_string(steps), fmt(error), ratio_text});
        prev_error = error;
    }
    if (error_at_reference < 0.0) {
        throw ConfigError("develop: reference_steps must be one of the tested step counts");
    }
    CheckResult ratio_check{"order_two_ratios", ratios_ok, worst_ratio_defect,
                            ratio_hi - 4.0};
    return {check_below("error_at_reference", error_at_reference, tolerance), ratio_check};
}

// ---------------------------------------------------------------------------
// twopoint: lattice free-field correlator against the exact inverse

std::vector<CheckResult> sub_twopoint(const ConfigMap& cfg, RunContext& ctx) {
    FoliatedLattice lattice;
    lattice.spatial_sites = static_cast<int>(cfg.get_int("lattice", "spatial_sites"));
    lattice.time_sites = static_cast<int>(cfg.get_int("lattice", "time_sites"));
    lattice.spatial_spacing = cfg.get_double("lattice", "spacing");
    lattice.time_spacing = cfg.get_double("lattice", "spacing");
    lattice.spatial_boundary = boundary_from(cfg.get_string("lattice", "boundary"));
    const double mass = cfg.get_double("twopoint", "mass");
    const int pair_count = static_cast<int>(cfg.get_int("twopoint", "pairs"));
    const std::int64_t samples = cfg.get_int("twopoint", "samples");
    const int seeds = static_cast<int>(cfg.get_int("twopoint", "seeds"));
    const double coverage_threshold = cfg.get_double("twopoint", "coverage");
    const double z_bound = cfg.get_double("twopoint", "z_bound");
    if (pair_count < 1 || seeds < 1) {
        throw ConfigError("twopoint: pairs >= 1 and seeds >= 1 required");
    }
    if (samples < 2) {
        throw ConfigError("twopoint: sample count must be at least 2");
    }

    const GridPtr grid = lattice.grid();
    const Eigen::Index n = grid->site_count();
    CounterRng rng(ctx.seed, 777);
    std::vector<std::pair<Eigen::Index, Eigen::Index>> pairs;
    while (static_cast<int>(pairs.size()) < pair_count) {
        const auto i = static_cast<Eigen::Index>(rng.next_uniform(0.0, double(n)));
        const auto j = static_cast<Eigen::Index>(rng.next_uniform(0.0, double(n)));
        const auto p = std::minmax(i, j);
        const std::pair<Eigen::Index, Eigen::Index> candidate{p.first, p.second};
        bool dup = false;
        for (const auto& q : pairs) {
            dup = dup || q == candidate;
        }
        if (!dup) {
            pairs.push_back(candidate);
        }
    }

    CsvWriter csv = ctx.make_csv(
        "twopoint.csv",
        {"seed_index", "i", "j", "mc_re", "mc_im", "stderr", "exact", "z"});

    std::int64_t within = 0;
    std::int64_t total = 0;
    for (int sk = 0; sk < seeds; ++sk) {
        const TwoPointResult result = free_field_twopoint(
            lattice, mass, pairs, samples, ctx.seed + static_cast<std::uint64_t>(sk),
            ctx.workers);
        for (std::size_t p = 0; p < pairs.size(); ++p) {
            const McEstimate& mc = result.mc[p];
            const double z = std::abs(mc.mean - result.exact[p]) / mc.std_error;
            within += (z <= z_bound) ? 1 : 0;
            ++total;
            csv.row({std::to_string(sk), std::to_string(pairs[p].first),
                     std::to_string(pairs[p].second), fmt(mc.mean.real()),
                     fmt(mc.mean.imag()), fmt(mc.std_error), fmt(result.exact[p]), fmt(z)});
        }
    }
    const double coverage = static_cast<double>(within) / static_cast<double>(total);

    // exact-column properties: symmetry of the inverse and linear s-scaling
    const Eigen::MatrixXd exact1 = exact_twopoint_matrix(lattice, mass, 1.0);
    const Eigen::MatrixXd exact2 = exact_twopoint_matrix(lattice, mass, 2.0);
    double symmetry = 0.0;
    double scaling = 0.0;
    for (const auto& [i, j] : pairs) {
        symmetry = std::max(symmetry, std::abs(exact1(i, j) - exact1(j, i)));
        scaling = std::max(scaling, std::abs(2.0 * exact1(i, j) - exact2(i, j)));
    }

    const QuadFormPtr qf = lattice.quadform(mass);
    ctx.extras["lattice"] = {{"spatial_sites", lattice.spatial_sites},
                             {"time_sites", lattice.time_sites},
                             {"s", lattice.s()},
                             {"log_det_a", qf->log_det_a().real()}};

    return {check_at_least("coverage", coverage, coverage_threshold),
            check_below("exact_symmetry", symmetry, 1e-14),
            check_below("exact_s_scaling", scaling, 1e-12)};
}

// ---------------------------------------------------------------------------

const std::map<std::string, SubcommandFn>& dispatch_table() {
    static const std::map<std::string, SubcommandFn> table = {
        {"normcheck", sub_normcheck}, {"ortho", sub_ortho},
        {"definition3", sub_definition3}, {"cov", sub_cov},
        {"sd", sub_sd},               {"effective", sub_effective},
        {"develop", sub_develop},     {"twopoint", sub_twopoint},
    };
    return table;
}

constexpr const char* kSharedDefaults = R"(
[run]
seed = 42
workers = 1

[grid]
dims = 6
spacing = 1.0
boundary = dirichlet

[quadform]
mass = 1.0
stiffness = 1.0

[integrator]
s_re = 1.0
s_im = 0.0
)";

const std::map<std::string, std::string>& subcommand_defaults() {
    static const std::map<std::string, std::string> table = {
        {"normcheck", R"(
[normcheck]
nmax = 8
locs = 5
tolerance = 1e-8
)"},
        {"ortho", R"(
[ortho]
nmax = 6
w_values = 0.5, 1, 3
rel_tolerance = 1e-8
abs_tolerance = 1e-10
)"},
        {"definition3", R"(
[definition3]
instances = 20
max_points = 5
samples = 1000000
quad_order = 64
quad_tolerance = 1e-8
z_bound = 3.0
)"},
        {"cov", R"(
[grid]
dims = 8

[cov]
cases = 10
tolerance = 1e-10
)"},
        {"sd", R"(
[sd]
forms = 10
max_degree = 4
quad_order = 24
tolerance = 1e-8
)"},
        {"effective", R"(
[effective]
lambdas = 0, 0.1
w = 1.0
grid_halfwidth = 0.8
grid_points = 33
quad_order = 80
fixed_point_tolerance = 1e-6
eom_tolerance = 1e-6
roundtrip_tolerance = 1e-6
)"},
        {"develop", R"(
[develop]
base_steps = 1250
doublings = 4
reference_steps = 10000
tolerance = 1e-6
ratio_lo = 3.5
ratio_hi = 4.5
)"},
        {"twopoint", R"(
[lattice]
spatial_sites = 6
time_sites = 6
spacing = 1.0
boundary = dirichlet

[twopoint]
mass = 1.0
pairs = 10
samples = 100000
seeds = 10
coverage = 0.98
z_bound = 3.0
)"},
    };
    return table;
}

void merge_defaults(ConfigMap& cfg, const std::string& subcommand) {
    const auto defaults = ConfigMap::parse(std::string(kSharedDefaults) +
                                           subcommand_defaults().at(subcommand));
    for (const auto& [section, entries] : defaults.sections()) {
        for (const auto& [key, value] : entries) {
            cfg.set_default(section, key, value);
        }
    }
}

} // namespace

const std::vector<std::string>& subcommand_names() {
    static const std::vector<std::string> names = {
        "normcheck", "ortho", "definition3", "cov", "sd", "effective", "develop", "twopoint"};
    return names;
}

std::string default_config_text(const std::string& subcommand) {
    const auto& table = subcommand_defaults();
    const auto it = table.find(subcommand);
    if (it == table.end()) {
        throw ConfigError("unknown subcommand: " + subcommand);
    }
    ConfigMap cfg;
    merge_defaults(cfg, subcommand);
    return cfg.resolved_text();
}

RunResult run(const RunOptions& options) {
    RunResult result;
    ConfigMap cfg;
    try {
        const auto& table = dispatch_table();
        const auto entry = table.find(options.subcommand);
        if (entry == table.end()) {
            throw ConfigError("unknown subcommand: " + options.subcommand);
        }
        if (!options.config_text.empty()) {
            cfg = ConfigMap::parse(options.config_text);
        } else if (!options.config_path.empty()) {
            cfg = ConfigMap::load_file(options.config_path);
        }
        merge_defaults(cfg, options.subcommand);
        if (options.seed) {
            cfg.set("run", "seed", std::to_string(*options.seed));
        }
        if (options.workers > 0) {
            cfg.set("run", "workers", std::to_string(options.workers));
        }

        RunContext ctx;
        ctx.out_dir = options.out_dir;
        ctx.seed = cfg.get_u64("run", "seed");
        ctx.workers = static_cast<int>(cfg.get_int("run", "workers"));
        if (ctx.workers < 1) {
            throw ConfigError("run: workers must be >= 1");
        }

        result.checks = entry->second(cfg, ctx);
        result.outputs = ctx.outputs;

        bool all_pass = true;
        for (const CheckResult& check : result.checks) {
            all_pass = all_pass && check.pass;
        }

        json manifest;
        manifest["subcommand"] = options.subcommand;
        manifest["config_hash"] = fmt_u64_hex(cfg.hash());
        manifest["config"] = json::object();
        for (const auto& [section, entries] : cfg.sections()) {
            for (const auto& [key, value] : entries) {
                manifest["config"][section][key] = value;
            }
        }
        manifest["seed"] = ctx.seed;
        manifest["workers"] = ctx.workers;
        manifest["checks"] = json::array();
        for (const CheckResult& check : result.checks) {
            manifest["checks"].push_back({{"name", check.name},
                                          {"pass", check.pass},
                                          {"value", check.value},
                                          {"tolerance", check.tolerance}});
        }
        manifest["outputs"] = result.outputs;
        manifest["pass"] = all_pass;
        if (!ctx.extras.empty()) {
            manifest["extras"] = ctx.extras;
        }
        fs::create_directories(ctx.out_dir);
        const fs::path manifest_path = ctx.out_dir / (options.subcommand + "_manifest.json");
        std::ofstream out(manifest_path);
        out << manifest.dump(2) << '\n';
        result.manifest_path = manifest_path.string();

        result.exit_code = all_pass ? 0 : 1;
    } catch (const ConfigError& e) {
        result.exit_code = 2;
        result.error = e.what();
    } catch (const std::exception& e) {
        result.exit_code = 3;
        result.error = e.what();
    }
    return result;
}

} // namespace funcint
