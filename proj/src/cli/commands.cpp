#include "commands.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <iomanip>
#include <limits>
#include <random>
#include <sstream>

#include "pfrmt/kernels.hpp"
#include "pfrmt/oracle.hpp"
#include "pfrmt/skew_poly.hpp"
#include "pfrmt/version.hpp"

namespace pfrmt::cli {

namespace {

using nlohmann::json;
using Cd = std::complex<double>;

json pack(Cd z) { return json::array({z.real(), z.imag()}); }

template <class R>
json pfaffian_method(const RunConfig& c) {
    auto t0 = std::chrono::steady_clock::now();
    auto e = Ensemble<R>::make(c.ensemble_id(), c.nu, c.quadrature_nodes);
    SpectralParams p(c.kappa1, c.kappa2);
    ZAverage<R> z = (e.beta() == 1) ? z_goe(e, c.n, p) : z_gse(e, c.n, p);
    double ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();

    json r;
    r["value"] = pack(to_std_complex(z.raw));
    r["normalized"] = pack(to_std_complex(z.normalized));
    r["z00"] = pack(to_std_complex(z.z00));
    r["regime"] = to_string(z.diag.regime);
    r["d"] = z.diag.d;
    r["pfaffian_dim"] = z.diag.pf_dim;
    r["rcond_moment"] = z.diag.rcond_moment;
    r["parity_sign"] = z.diag.goe_parity_sign;
    r["precision"] = scalar_traits<R>::name;
    r["time_ms"] = ms;
    return r;
}

json quadrature_method(const RunConfig& c) {
    auto e = Ensemble<double>::make(c.ensemble_id(), c.nu, c.quadrature_nodes);
    SpectralParams p(c.kappa1, c.kappa2);
    auto num = z_eigenvalue_quadrature(e, c.n, p);
    auto den = z_eigenvalue_quadrature(e, c.n, SpectralParams{});
    json r;
    r["value"] = pack(num.value);
    r["normalized"] = pack(num.value / den.value);
    r["error_estimate"] = num.error_estimate;
    r["nodes"] = num.nodes;
    r["time_ms"] = num.ms + den.ms;
    return r;
}

json mc_method(const RunConfig& c) {
    auto e = Ensemble<double>::make(c.ensemble_id(), c.nu, c.quadrature_nodes);
    SpectralParams p(c.kappa1, c.kappa2);
    MCSpec mc;
    mc.samples = c.mc_samples;
    mc.seed = c.seed;
    auto v = z_matrix_montecarlo(e, c.n, p, mc);
    json r;
    r["normalized"] = pack(v.mean);  // the sample average is Z(kappa)/Z(0/0)
    r["stderr"] = json::array({v.stderr_re, v.stderr_im});
    r["samples"] = v.samples;
    r["time_ms"] = v.ms;
    return r;
}

Cd unpack(const json& arr) { return {arr[0].get<double>(), arr[1].get<double>()}; }

} // namespace

json run_compute(const RunConfig& c) {
    json out;
    out["schema_version"] = result_schema_version;
    out["library_version"] = library_version;
    out["config"] = c.echo();

    json results;
    bool want_pf = c.method == "pfaffian" || c.method == "all";
    bool want_quad = c.method == "oracle-quadrature" || c.method == "all";
    bool want_mc = c.method == "oracle-mc" || c.method == "all";

    if (want_pf)
        results["pfaffian"] = c.extended() ? pfaffian_method<DoubleDouble>(c)
                                           : pfaffian_method<double>(c);
    if (want_quad) results["oracle-quadrature"] = quadrature_method(c);
    if (want_mc) {
        try {
            results["oracle-mc"] = mc_method(c);
        } catch (const UnsupportedOracleError& err) {
            if (c.method == "oracle-mc") throw;
            results["oracle-mc"] = json{{"unsupported", err.what()}};
        }
    }
    out["results"] = results;

    // pairwise deviations, always on the normalized values
    json dev;
    if (results.contains("pfaffian") && results.contains("oracle-quadrature")) {
        dev["pfaffian-vs-oracle-quadrature"] =
            rel_dev(unpack(results["pfaffian"]["normalized"]),
                    unpack(results["oracle-quadrature"]["normalized"]));
    }
    if (results.contains("pfaffian") && results.contains("oracle-mc") &&
        results["oracle-mc"].contains("normalized")) {
        Cd a = unpack(results["pfaffian"]["normalized"]);
        Cd b = unpack(results["oracle-mc"]["normalized"]);
        dev["pfaffian-vs-oracle-mc"] = rel_dev(a, b);
        double se_re = results["oracle-mc"]["stderr"][0].get<double>();
        double se_im = results["oracle-mc"]["stderr"][1].get<double>();
        double sig = 0.0;
        if (se_re > 0) sig = std::max(sig, std::fabs(a.real() - b.real()) / se_re);
        if (se_im > 0) sig = std::max(sig, std::fabs(a.imag() - b.imag()) / se_im);
        dev["pfaffian-vs-oracle-mc-sigmas"] = sig;
    }
    if (!dev.empty()) out["deviations"] = dev;
    return out;
}

// ---------------------------------------------------------------------------

namespace {

struct Check {
    std::string name;
    bool pass = false;
    double dev = 0.0;
};

template <class F>
Check run_check(const std::string& name, double tol, F&& worst_dev) {
    Check c{name};
    try {
        c.dev = worst_dev();
        c.pass = c.dev < tol;
    } catch (const std::exception& e) {
        c.dev = std::numeric_limits<double>::infinity();
        c.pass = false;
    }
    return c;
}

double quad_vs_formula(EnsembleId id, int nu, int ndim,
                       const std::vector<Cd>& k1, const std::vector<Cd>& k2,
                       const ZOptions& opts) {
    auto e = Ensemble<double>::make(id, nu);
    SpectralParams p(k1, k2);
    Cd formula;
    if (e.beta() == 1)
        formula = to_std_complex(z_goe(e, ndim, p, opts).normalized);
    else
        formula = to_std_complex(z_gse(e, ndim, p, opts).normalized);
    auto num = z_eigenvalue_quadrature(e, ndim, p);
    auto den = z_eigenvalue_quadrature(e, ndim, SpectralParams{});
    return rel_dev(formula, num.value / den.value);
}

} // namespace

int run_verify(const std::string& level, bool inject_sign_flip, std::ostream& out) {
    std::vector<Check> checks;
    ZOptions opts;
    opts.flip_even_sum_sign = inject_sign_flip;
    std::mt19937_64 eng(20240817);
    auto uni = [&](double a, double b) {
        return std::uniform_real_distribution<double>(a, b)(eng);
    };
    auto rand_skew = [&](int n) {
        return SkewMatrix<double>::from_upper(
            n, [&](int, int) { return Cd(uni(-1, 1), uni(-1, 1)); });
    };

    checks.push_back(run_check("pfaffian-squared-vs-det", 1e-10, [&] {
        double worst = 0.0;
        for (int n = 2; n <= 12; n += 2)
            for (int rep = 0; rep < 4; ++rep) {
                auto m = rand_skew(n);
                Cd pf = pfaffian(m);
                worst = std::max(worst, rel_dev(pf * pf, det<double>(m.to_mat())));
            }
        return worst;
    }));

    checks.push_back(run_check("schur-pfaffian-identity", 1e-9, [&] {
        double worst = 0.0;
        for (int na : {2, 4})
            for (int nd : {2, 4}) {
                auto a = rand_skew(na);
                auto d = rand_skew(nd);
                Mat<Cd> b(na, nd);
                for (auto& v : b.a) v = Cd(uni(-1, 1), uni(-1, 1));
                worst = std::max(worst, rel_dev(pfaffian_schur(a, b, d),
                                                pfaffian(assemble_block_skew(a, b, d))));
            }
        return worst;
    }));

    checks.push_back(run_check("cauchy-vandermonde-forms", 1e-10, [&] {
        double worst = 0.0;
        for (auto [k1n, k2n, ne] : {std::tuple{1, 1, 2}, {2, 2, 0}, {2, 1, 3}, {0, 2, 2}}) {
            std::vector<Cd> v1, v2, ve;
            for (int i = 0; i < k1n; ++i) v1.emplace_back(uni(-2, 2), uni(0.5, 2));
            for (int i = 0; i < k2n; ++i) v2.emplace_back(uni(-2, 2), uni(-2, 2));
            for (int i = 0; i < ne; ++i) ve.emplace_back(uni(-2, 2), uni(-2, 2));
            auto m = sqrt_berezinian_mixed<double>(v1, v2, ve);
            worst = std::max(worst, rel_dev(m.value, m.block_det_form));
        }
        return worst;
    }));

    checks.push_back(run_check("moment-closed-forms", 1e-12, [&] {
        double worst = 0.0;
        auto g1 = Ensemble<double>::make(EnsembleId::gauss_beta1);
        double s2pi = std::sqrt(2.0 * 3.14159265358979323846);
        worst = std::max(worst, rel_dev(g1.moment_single(1), s2pi));
        worst = std::max(worst, rel_dev(g1.moment_single(5), 3.0 * s2pi));
        for (int nu : {1, 2}) {
            auto lag = Ensemble<double>::make(EnsembleId::laguerre_beta1, nu);
            for (int a : {1, 3, 6})
                worst = std::max(worst,
                                 rel_dev(lag.moment_single(a), gamma_half<double>(nu - 1 + 2 * a)));
        }
        return worst;
    }));

    checks.push_back(run_check("analytic-z-pins", 1e-10, [&] {
        double worst = 0.0;
        auto g1 = Ensemble<double>::make(EnsembleId::gauss_beta1);
        auto g4 = Ensemble<double>::make(EnsembleId::gauss_beta4);
        double s2pi = std::sqrt(2.0 * 3.14159265358979323846);
        worst = std::max(worst, rel_dev(to_std_complex(
                                            z_pfaffian(g1, 0, SpectralParams{}, Sector::odd, opts).value),
                                        Cd(s2pi)));
        Cd kap(0.4, 1.1);
        worst = std::max(
            worst, rel_dev(to_std_complex(
                               z_pfaffian(g1, 0, SpectralParams({}, {kap}), Sector::odd, opts).value),
                           -kap * s2pi));
        worst = std::max(
            worst,
            rel_dev(to_std_complex(
                        z_pfaffian(g4, 1, SpectralParams({}, {kap}), Sector::even, opts).value),
                    s2pi * (1.0 + kap * kap)));
        // sparse pins
        std::vector<Cd> k13 = {Cd(0, 1), Cd(0.6, -0.8), Cd(-1.2, 1.5)};
        worst = std::max(
            worst, rel_dev(to_std_complex(
                               z_pfaffian(g1, 0, SpectralParams(k13, {}), Sector::even, opts).value),
                           Cd(1.0)));
        return worst;
    }));

    checks.push_back(run_check("route-equivalence", 1e-9, [&] {
        double worst = 0.0;
        ZOptions asm_opts = opts;
        asm_opts.route = Route::assembled;
        for (auto id : {EnsembleId::gauss_beta1, EnsembleId::gauss_beta4}) {
            auto e = Ensemble<double>::make(id);
            for (auto [k1n, k2n] : {std::pair{1, 1}, {0, 2}, {2, 2}}) {
                std::vector<Cd> v1, v2;
                for (int i = 0; i < k1n; ++i) v1.emplace_back(uni(-1, 1), uni(0.5, 1.5));
                for (int i = 0; i < k2n; ++i) v2.emplace_back(uni(-1, 1), uni(-1, 1));
                SpectralParams p(v1, v2);
                auto a = z_pfaffian(e, 2, p, Sector::even, opts);
                auto b = z_pfaffian(e, 2, p, Sector::even, asm_opts);
                worst = std::max(worst, rel_dev(to_std_complex(a.value), to_std_complex(b.value)));
            }
        }
        return worst;
    }));

    checks.push_back(run_check("kernel-generating-relations", 1e-8, [&] {
        double worst = 0.0;
        worst = std::max(worst,
                         kernel_consistency(Ensemble<double>::make(EnsembleId::gauss_beta1), 1,
                                            Sector::odd)
                             .max_rel_dev);
        worst = std::max(worst,
                         kernel_consistency(Ensemble<double>::make(EnsembleId::gauss_beta1), 2,
                                            Sector::even)
                             .max_rel_dev);
        worst = std::max(worst,
                         kernel_consistency(Ensemble<double>::make(EnsembleId::gauss_beta4), 2,
                                            Sector::even)
                             .max_rel_dev);
        return worst;
    }));

    checks.push_back(run_check("skew-poly-block-diagonal", 1e-10, [&] {
        double worst = 0.0;
        for (auto id : {EnsembleId::gauss_beta1, EnsembleId::gauss_beta4}) {
            auto e = Ensemble<double>::make(id);
            auto mm = build_moment_matrix(e, 6);
            auto basis = skew_orthogonalize(mm);
            double scale = std::max(1.0, to_double(max_abs<double>(mm.matrix.to_mat())));
            worst = std::max(worst, verify_block_diagonal(basis, mm) / scale);
            Cd prod(1.0, 0.0);
            for (double r : basis.pairing_norms) prod *= r;
            worst = std::max(worst, rel_dev(pfaffian(mm.matrix), prod));
        }
        return worst;
    }));

    if (level == "full") {
        checks.push_back(run_check("formula-vs-quadrature-beta1", 1e-6, [&] {
            double worst = 0.0;
            worst = std::max(worst, quad_vs_formula(EnsembleId::gauss_beta1, 0, 2,
                                                    {Cd(0, 1)}, {Cd(0.6, -0.3)}, opts));
            worst = std::max(worst, quad_vs_formula(EnsembleId::gauss_beta1, 0, 2, {},
                                                    {Cd(0.4, 0.2), Cd(-0.8, 0)}, opts));
            worst = std::max(worst, quad_vs_formula(EnsembleId::gauss_beta1, 0, 3, {},
                                                    {Cd(0.5, 0)}, opts));
            worst = std::max(worst, quad_vs_formula(EnsembleId::gauss_beta1, 0, 3,
                                                    {Cd(0, 1)}, {}, opts));
            worst = std::max(worst, quad_vs_formula(EnsembleId::gauss_beta1, 0, 3,
                                                    {Cd(0, 1)}, {Cd(0.3, 0.1), Cd(-0.5, -0.4)},
                                                    opts));
            return worst;
        }));

        checks.push_back(run_check("formula-vs-quadrature-beta4", 1e-5, [&] {
            double worst = 0.0;
            worst = std::max(worst, quad_vs_formula(EnsembleId::gauss_beta4, 0, 1,
                                                    {Cd(0, 1)}, {Cd(0.2, 0)}, opts));
            worst = std::max(worst, quad_vs_formula(EnsembleId::gauss_beta4, 0, 2,
                                                    {Cd(0, 2)}, {Cd(0, 0)}, opts));
            worst = std::max(worst, quad_vs_formula(EnsembleId::gauss_beta4, 0, 2, {},
                                                    {Cd(0.4, 0.3), Cd(-0.6, 0)}, opts));
            return worst;
        }));

        checks.push_back(run_check("laguerre-beta1-vs-quadrature", 1e-6, [&] {
            return quad_vs_formula(EnsembleId::laguerre_beta1, 1, 2, {},
                                   {Cd(0.5, 0.3), Cd(2.0, -0.4)}, opts);
        }));

        checks.push_back(run_check("beta4-confluent-richardson", 1e-6, [&] {
            auto e = Ensemble<double>::make(EnsembleId::gauss_beta4);
            double worst = 0.0;
            auto rich = [&](auto&& f) { return richardson3(f(1e-2), f(5e-3), f(2.5e-3)); };
            worst = std::max(
                worst, rel_dev(rich([&](double eps) { return eps_confluent_moment_pair(e, 1, 2, eps); }),
                               Cd(e.moment_pair(1, 2))));
            Cd kap(0, 1);
            worst = std::max(
                worst,
                rel_dev(rich([&](double eps) { return eps_confluent_cauchy_pair(e, kap, 2, eps); }),
                        e.cauchy_pair(kap, 2)));
            worst = std::max(
                worst, rel_dev(rich([&](double eps) {
                                   return eps_confluent_f_kernel(e, kap, Cd(1, 1), eps);
                               }),
                               e.f_kernel(kap, Cd(1, 1))));
            return worst;
        }));

        checks.push_back(run_check("formula-vs-montecarlo-3sigma", 3.0, [&] {
            MCSpec mc;
            mc.samples = 200000;
            mc.seed = 20240817;
            double worst_sig = 0.0;
            {
                auto e = Ensemble<double>::make(EnsembleId::gauss_beta1);
                SpectralParams p({Cd(0, 1.2)}, {Cd(0.4, 0)});
                Cd f = to_std_complex(z_goe(e, 2, p, opts).normalized);
                auto v = z_matrix_montecarlo(e, 2, p, mc);
                worst_sig = std::max(worst_sig, std::fabs(f.real() - v.mean.real()) /
                                                    std::max(v.stderr_re, 1e-300));
                worst_sig = std::max(worst_sig, std::fabs(f.imag() - v.mean.imag()) /
                                                    std::max(v.stderr_im, 1e-300));
            }
            {
                auto e = Ensemble<double>::make(EnsembleId::gauss_beta4);
                SpectralParams p({Cd(0, 2)}, {Cd(0, 0)});
                Cd f = to_std_complex(z_gse(e, 2, p, opts).normalized);
                auto v = z_matrix_montecarlo(e, 2, p, mc);
                worst_sig = std::max(worst_sig, std::fabs(f.real() - v.mean.real()) /
                                                    std::max(v.stderr_re, 1e-300));
            }
            return worst_sig;
        }));

        checks.push_back(run_check("limit-trick-first-order", 0.5, [&] {
            auto e = Ensemble<double>::make(EnsembleId::gauss_beta1);
            auto rep = limit_trick_check(e, 1, SpectralParams({Cd(0, 1)}, {}), Sector::odd);
            // deviation from clean first-order convergence
            return std::fabs(rep.order - 1.0);
        }));

        checks.push_back(run_check("formula-vs-quadrature-beta1-ndim4", 1e-6, [&] {
            return quad_vs_formula(EnsembleId::gauss_beta1, 0, 4, {Cd(0, 1)}, {Cd(0.5, -0.2)},
                                   opts);
        }));
    }

    int failures = 0;
    out << std::left;
    for (const auto& c : checks) {
        if (!c.pass) ++failures;
        char buf[160];
        std::snprintf(buf, sizeof buf, "%-38s %-5s max-dev %.3e", c.name.c_str(),
                      c.pass ? "ok" : "FAIL", c.dev);
        out << buf << "\n";
    }
    out << (failures == 0 ? "all checks passed" : "SOME CHECKS FAILED") << " ("
        << checks.size() - failures << "/" << checks.size() << ")\n";
    return failures;
}

// ---------------------------------------------------------------------------

std::string format_float(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace {

template <class R>
std::string kernel_grid_csv_impl(const RunConfig& c, const GridSpec& g) {
    auto e = Ensemble<R>::make(c.ensemble_id(), c.nu, c.quadrature_nodes);
    Sector sector = (e.beta() == 1 && g.d % 2 == 1) ? Sector::odd : Sector::even;
    KernelSet<R> ks(e, g.d, sector);

    bool x_is_denominator = (g.kernel == "K12" || g.kernel == "K22");
    std::vector<Cd> xs(g.nx), ys(g.ny);
    for (int i = 0; i < g.nx; ++i) xs[i] = g.x0 + double(i) * g.dx;
    for (int j = 0; j < g.ny; ++j) ys[j] = g.y0 + double(j) * g.dy;
    if (x_is_denominator)
        for (const auto& x : xs)
            if (x.imag() == 0.0)
                throw OnSupportError("grid row touches the real axis in the first argument");
    if (g.kernel == "K22")
        for (const auto& y : ys)
            if (y.imag() == 0.0)
                throw OnSupportError("grid column touches the real axis in the second argument");

    std::vector<Cd> vals(static_cast<std::size_t>(g.nx) * g.ny);
    parallel_for(static_cast<std::int64_t>(vals.size()), [&](std::int64_t t) {
        int i = static_cast<int>(t / g.ny);
        int j = static_cast<int>(t % g.ny);
        auto zx = make_cplx<R>(xs[i].real(), xs[i].imag());
        auto zy = make_cplx<R>(ys[j].real(), ys[j].imag());
        cplx<R> v;
        if (g.kernel == "K11") v = ks.k11(zx, zy);
        else if (g.kernel == "K12") v = ks.k12(zx, zy);
        else v = ks.k22(zx, zy);
        vals[t] = to_std_complex(v);
    });

    std::string csv = "re_x,im_x,re_y,im_y,re_K,im_K\n";
    for (int i = 0; i < g.nx; ++i)
        for (int j = 0; j < g.ny; ++j) {
            const Cd v = vals[static_cast<std::size_t>(i) * g.ny + j];
            csv += format_float(xs[i].real()) + "," + format_float(xs[i].imag()) + "," +
                   format_float(ys[j].real()) + "," + format_float(ys[j].imag()) + "," +
                   format_float(v.real()) + "," + format_float(v.imag()) + "\n";
        }
    return csv;
}

} // namespace

std::string kernel_grid_csv(const RunConfig& c, const GridSpec& g) {
    if (g.kernel != "K11" && g.kernel != "K12" && g.kernel != "K22")
        throw ConfigError("kernel must be K11 | K12 | K22", "kernel");
    if (g.nx < 1 || g.ny < 1) throw ConfigError("grid counts must be >= 1", "grid");
    return c.extended() ? kernel_grid_csv_impl<DoubleDouble>(c, g)
                        : kernel_grid_csv_impl<double>(c, g);
}

json run_bench(const RunConfig& c, const std::vector<int>& n_list) {
    json out;
    out["ensemble"] = c.ensemble;
    out["threads"] = effective_threads();
    json rows = json::array();
    std::vector<double> log_d, log_t;

    for (int n : n_list) {
        json row;
        row["N"] = n;
        RunConfig cc = c;
        cc.n = n;
        auto e = Ensemble<double>::make(c.ensemble_id(), c.nu, c.quadrature_nodes);
        SpectralParams p(c.kappa1, c.kappa2);

        auto t0 = std::chrono::steady_clock::now();
        ZAverage<double> z =
            (e.beta() == 1) ? z_goe(e, n, p) : z_gse(e, n, p);
        double pf_ms =
            std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
                .count();
        row["d"] = z.diag.d;
        row["regime"] = to_string(z.diag.regime);
        row["pfaffian_ms"] = pf_ms;
        row["pfaffian_normalized"] = pack(to_std_complex(z.normalized));

        try {
            auto num = z_eigenvalue_quadrature(e, n, p);
            auto den = z_eigenvalue_quadrature(e, n, SpectralParams{});
            double or_ms = num.ms + den.ms;
            row["oracle_ms"] = or_ms;
            row["oracle_nodes"] = num.nodes;
            row["oracle_normalized"] = pack(num.value / den.value);
            row["speedup"] = or_ms / std::max(pf_ms, 1e-6);
            row["rel_dev"] = rel_dev(to_std_complex(z.normalized), num.value / den.value);

            // parallel scaling of the oracle itself: library path vs serial reference
            QuadratureSpec q;
            auto ts = std::chrono::steady_clock::now();
            auto ser = ref::z_eigenvalue_quadrature_serial(e, n, p, q);
            double ser_ms =
                std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - ts)
                    .count();
            (void)ser;
            row["oracle_serial_ms"] = ser_ms;
            row["oracle_parallel_speedup"] = ser_ms / std::max(num.ms, 1e-6);
        } catch (const BudgetError& err) {
            row["capped"] = err.what();
        }

        if (z.diag.d > 0) {
            log_d.push_back(std::log(static_cast<double>(z.diag.d)));
            log_t.push_back(std::log(std::max(pf_ms, 1e-3)));
        }
        rows.push_back(row);
    }
    out["rows"] = rows;

    if (log_d.size() >= 2) {
        // least-squares slope of log t vs log d
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        const double m = static_cast<double>(log_d.size());
        for (std::size_t i = 0; i < log_d.size(); ++i) {
            sx += log_d[i];
            sy += log_t[i];
            sxx += log_d[i] * log_d[i];
            sxy += log_d[i] * log_t[i];
        }
        double denom = m * sxx - sx * sx;
        if (std::fabs(denom) > 1e-12)
            out["pfaffian_fit_exponent"] = (m * sxy - sx * sy) / denom;
    }
    return out;
}

std::string skew_poly_csv(const RunConfig& c, int d) {
    if (d < 2 || d % 2 != 0) throw ConfigError("skew-poly dump needs even d >= 2", "d");
    auto e = Ensemble<double>::make(c.ensemble_id(), c.nu, c.quadrature_nodes);
    auto mm = build_moment_matrix(e, d);
    auto basis = skew_orthogonalize(mm);

    std::string csv = "index,pairing_norm";
    for (int j = 0; j < d; ++j) csv += ",c" + std::to_string(j);
    csv += "\n";
    for (int i = 0; i < d; ++i) {
        csv += std::to_string(i) + ",";
        if (i % 2 == 0) csv += format_float(basis.pairing_norms[i / 2]);
        for (int j = 0; j < d; ++j) {
            csv += ",";
            csv += format_float(basis.coeffs(i, j).real());
        }
        csv += "\n";
    }
    return csv;
}

} // namespace pfrmt::cli
