// clk: Cauchy-Leray-Koppelman experiment driver.
//
// Subcommands:
//   check-domain  convexity-condition estimates, stability, power-gap sampling
//   solve         apply T_q / H_q / H_0 to configured data at interior probes
//   verify        Koppelman and homotopy residual ladders with measured orders
//   holder        Holder-seminorm calibration and the C^0 -> C^{1/2} gain table

#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "clk/conditions.hpp"
#include "clk/csv.hpp"
#include "clk/errors.hpp"
#include "clk/expr.hpp"
#include "clk/holder.hpp"
#include "clk/mollify.hpp"
#include "clk/operators.hpp"
#include "clk/parallel.hpp"
#include "clk/run_config.hpp"

namespace fs = std::filesystem;
using namespace clk;

namespace {

std::string format_point(const CPoint& p) {
    std::ostringstream ss;
    for (int j = 0; j < p.dim(); ++j) {
        if (j) ss << " ";
        char buf[80];
        std::snprintf(buf, sizeof buf, "%.17g%+.17gi", p[j].real(), p[j].imag());
        ss << buf;
    }
    return ss.str();
}

std::string multi_index_label(const MultiIndex& m) {
    std::string out;
    for (int i : m.indices()) {
        if (!out.empty()) out += ",";
        out += std::to_string(i);
    }
    return out.empty() ? "-" : out;
}

FormField data_field(const ExperimentConfig& cfg) {
    if (cfg.data.coefficients.empty()) throw ConfigError("no data coefficients configured");
    return expression_form_field(cfg.dimension, cfg.data.q, cfg.data.coefficients);
}

FormField dbar_field(const ExperimentConfig& cfg, const FormField& phi) {
    if (!cfg.data.dbar_coefficients.empty())
        return expression_form_field(cfg.dimension, cfg.data.q + 1, cfg.data.dbar_coefficients);
    return dbar_fd_field(phi, cfg.resolutions.fd_step);
}

// ---------------------------------------------------------------- check-domain
void run_check_domain(const ExperimentConfig& cfg, const fs::path& out, RunReport& report) {
    DomainPtr dom = make_domain(cfg.domain);
    double tol = 1e-6 * std::max(1.0, dom->diameter());

    CsvWriter csv((out / "conditions.csv").string(),
                  {"condition", "infimum", "modulus_infimum", "pairs", "diagonal_depth", "witness_zeta",
                   "witness_z"});
    for (auto tag : {ConditionTag::C0, ConditionTag::CPlus, ConditionTag::B, ConditionTag::C}) {
        ConditionReport rep = estimate_condition(*dom, tag, cfg.condition_sampler);
        csv.field(std::string(to_string(tag)))
            .field(rep.infimum)
            .field(rep.modulus_infimum)
            .field(rep.pair_count)
            .field(rep.diagonal_depth)
            .field(format_point(rep.witness_zeta))
            .field(format_point(rep.witness_z));
        csv.end_row();
        std::ostringstream details;
        details << "witness_zeta=[" << format_point(rep.witness_zeta) << "]";
        report.add(std::string("condition-") + to_string(tag) + "-positive", rep.infimum > tol, rep.infimum,
                   tol, details.str());
    }

    auto r = dom->r();
    bool stable = check_stability(*dom, *r, *product_defining_function(r, constant_field(cfg.dimension, 2.0)),
                                  cfg.condition_sampler) &&
                  check_stability(*dom, *r,
                                  *product_defining_function(r, affine_real_field(cfg.dimension, 2.0, 1.0, 0)),
                                  cfg.condition_sampler) &&
                  check_stability(*dom, *r,
                                  *product_defining_function(r, one_plus_normsq_field(cfg.dimension)),
                                  cfg.condition_sampler);
    report.add("stability-under-rescaling", stable, stable ? 1.0 : 0.0, 1.0,
               "three positive-multiplier rescalings of r");

    if (cfg.domain.kind == DomainSpec::Kind::Power) {
        PowerGapReport gap = power_gap_infimum(cfg.domain.exponents, 1.0, 100000, cfg.condition_sampler.seed);
        report.add("power-gap-positive", gap.infimum > 0.0, gap.infimum, 0.0,
                   "sampled gradient-gap quotient infimum");
    }
}

// ------------------------------------------------------------------------ solve
void run_solve(const ExperimentConfig& cfg, const fs::path& out, RunReport& report) {
    DomainPtr dom = make_domain(cfg.domain);
    const int n = cfg.dimension;
    if (cfg.op.tag != "T" && cfg.op.tag != "H" && cfg.op.tag != "H0")
        throw ConfigError("operator tag must be T, H, or H0");
    if (cfg.op.tag == "H" && cfg.data.q >= n)
        throw OutOfScopeError(
            "H on data of maximal type (0,n) is out of scope: such data is dbar-closed for free and is "
            "handled by compactly supported extension, not by this operator");
    if (cfg.op.tag != "H0" && cfg.op.q != cfg.data.q)
        throw ConfigError("operator degree must match the data degree");
    if (cfg.op.tag == "H0" && cfg.data.q != 0) throw DegreeError("H0 needs scalar (0,0) data");

    FormField phi = data_field(cfg);
    FormField dphi = dbar_field(cfg, phi);
    OperatorRules rules = make_operator_rules(*dom, cfg.resolutions.boundary_n, cfg.resolutions.volume_n,
                                              cfg.resolutions.exclusion_radius, cfg.resolutions.fd_step);
    HomotopyContext ctx(dom, std::move(rules));
    std::vector<CPoint> probes = sample_probes(*dom, cfg.probes.count, cfg.probes.seed);

    HomotopySolution sol;
    ResidualReport res;
    if (cfg.op.tag == "T") {
        sol = apply_T(ctx, cfg.op.q, phi, probes);
        res = homotopy_residual(ctx, OperatorTag::T, cfg.op.q, phi, dphi, probes);
    } else if (cfg.op.tag == "H") {
        sol = apply_H(ctx, cfg.op.q, phi, dphi, probes);
        res = homotopy_residual(ctx, OperatorTag::H, cfg.op.q, phi, dphi, probes);
    } else {
        sol = apply_H0(ctx, phi, dphi, probes);
        // residual of the degree-zero homotopy identity: phi = H0 phi + H1 dbar phi
        HomotopySolution h1 = apply_H(ctx, 1, dphi, zero_field(n, std::min(2, n)), probes);
        res.per_probe.resize(probes.size());
        for (std::size_t i = 0; i < probes.size(); ++i) {
            Complex recon = sol.values[i][0] + h1.values[i][0];
            res.per_probe[i] = std::abs(phi.eval(probes[i])[0] - recon);
            res.max_residual = std::max(res.max_residual, res.per_probe[i]);
            double est = sol.error_estimates[i] + h1.error_estimates[i];
            res.per_probe_estimate.push_back(est);
            res.combined_error_estimate = std::max(res.combined_error_estimate, est);
        }
        report.add("h0-internal-consistency", sol.h0_consistency <= 5.0 * sol.h0_consistency_estimate,
                   sol.h0_consistency, 5.0 * sol.h0_consistency_estimate,
                   "gap between the boundary and collar-commutator forms of H0");
    }

    const MultiIndexSet out_set(n, sol.values.empty() ? 0 : sol.values[0].q);
    CsvWriter csv((out / "solution.csv").string(),
                  {"probe", "multi_index", "real", "imag", "error_estimate", "residual"});
    for (std::size_t i = 0; i < probes.size(); ++i) {
        for (int ord = 0; ord < out_set.count(); ++ord) {
            csv.field(format_point(probes[i]))
                .field(multi_index_label(out_set.list()[static_cast<std::size_t>(ord)]))
                .field(sol.values[i][ord].real())
                .field(sol.values[i][ord].imag())
                .field(sol.error_estimates[i])
                .field(i < res.per_probe.size() ? res.per_probe[i] : 0.0);
            csv.end_row();
        }
    }

    report.add("residual-within-5x-estimate", res.max_residual <= 5.0 * res.combined_error_estimate,
               res.max_residual, 5.0 * res.combined_error_estimate, "homotopy identity at the probes");
}

// ----------------------------------------------------------------------- verify
void run_verify(const ExperimentConfig& cfg, const fs::path& out, RunReport& report) {
    const int n = cfg.dimension;
    DomainPtr dom = make_domain(cfg.domain);

    // Koppelman ladder on the configured domain (plus an ellipsoid companion at n=2)
    std::vector<DomainPtr> doms = {dom};
    if (n == 2 && cfg.domain.kind == DomainSpec::Kind::Ball) {
        DomainSpec espec;
        espec.kind = DomainSpec::Kind::Ellipsoid;
        espec.n = 2;
        espec.semi_axes = {1.0, 1.0, 1.0, 2.0};
        doms.push_back(make_domain(espec));
    }
    CsvWriter kcsv((out / "koppelman.csv").string(), {"domain", "h", "max_residual", "order"});
    for (const auto& d : doms) {
        DefiningFunctionPtr r = d->smoothness() == Smoothness::C11 ? mollify(d->r(), 10000) : d->r();
        std::vector<CPoint> zs = sample_probes(*d, 50, cfg.probes.seed, 0.1, 0.5);
        std::vector<CPoint> zetas = sample_probes(*d, 50, cfg.probes.seed + 1, 0.9, 0.999);
        for (auto& zeta : zetas) zeta = d->boundary_projection(zeta);  // admissible boundary points
        double maxres[2] = {0.0, 0.0};
        const double hs[2] = {1e-3, 1e-4};
        for (int li = 0; li < 2; ++li)
            for (std::size_t i = 0; i < zs.size(); ++i)
                for (int q = 0; q < n; ++q)
                    maxres[li] = std::max(maxres[li], koppelman_residual(r, zs[i], zetas[i], q, hs[li]));
        double order = n == 1 ? 2.0 : std::log10(maxres[0] / std::max(maxres[1], 1e-300));
        for (int li = 0; li < 2; ++li) {
            kcsv.field(d->name()).field(hs[li]).field(maxres[li]).field(order);
            kcsv.end_row();
        }
        if (n == 1)
            report.add("koppelman-degenerate-" + d->name(), maxres[0] <= 1e-12, maxres[0], 1e-12,
                       "n=1: Omega0 == Omega1 pointwise");
        else
            report.add("koppelman-order-" + d->name(), order >= 1.7 && order <= 2.3, order, 2.0,
                       "finite-difference order across h = 1e-3, 1e-4");
    }

    // homotopy residual ladder under joint refinement
    FormField phi = cfg.data.coefficients.empty()
                        ? expression_form_field(n, 1, {{"1", n >= 2 ? "z2" : "1"}})
                        : data_field(cfg);
    FormField dphi = dbar_field(cfg, phi);
    std::vector<int> ladder =
        cfg.resolutions.ladder.empty() ? std::vector<int>{16, 32} : cfg.resolutions.ladder;
    std::vector<CPoint> probes = sample_probes(*dom, std::min(cfg.probes.count, 8), cfg.probes.seed, 0.1, 0.42);
    OperatorTag tag = cfg.op.tag == "H" ? OperatorTag::H : OperatorTag::T;
    int q = std::clamp(cfg.op.q, 1, std::max(1, n == 1 ? 1 : n - 1));

    CsvWriter hcsv((out / "homotopy.csv").string(),
                   {"level", "boundary_n", "volume_n", "exclusion", "fd_step", "residual", "estimate"});
    std::vector<double> residuals;
    for (std::size_t li = 0; li < ladder.size(); ++li) {
        int N = ladder[li];
        double scale = static_cast<double>(ladder[0]) / N;
        // eps and h shrink like sqrt(scale): the blend zone must stay resolved
        // relative to the node spacing or its error stalls the measured order
        double eps = cfg.resolutions.exclusion_radius * std::sqrt(scale);
        double h = cfg.resolutions.fd_step * std::sqrt(scale);
        int volN = std::max(8, cfg.resolutions.volume_n * N / ladder[0]);
        OperatorRules rules = make_operator_rules(*dom, N, volN, eps, h);
        HomotopyContext ctx(dom, std::move(rules));
        ResidualReport rep = homotopy_residual(ctx, tag, q, phi, dphi, probes);
        residuals.push_back(rep.max_residual);
        hcsv.field(li).field(N).field(volN).field(eps).field(h).field(rep.max_residual)
            .field(rep.combined_error_estimate);
        hcsv.end_row();
        report.add("homotopy-residual-level-" + std::to_string(li),
                   rep.max_residual <= 5.0 * rep.combined_error_estimate, rep.max_residual,
                   5.0 * rep.combined_error_estimate, "within 5x the reported estimate");
    }
    for (std::size_t li = 0; li + 1 < residuals.size(); ++li) {
        double order = std::log2(residuals[li] / std::max(residuals[li + 1], 1e-300));
        report.add("homotopy-order-step-" + std::to_string(li), order >= 1.0, order, 1.0,
                   "joint refinement N->2N, eps,h -> eps,h/sqrt(2)");
    }

    // zero data sanity: all residuals vanish identically
    {
        OperatorRules rules = make_operator_rules(*dom, ladder[0], std::max(8, cfg.resolutions.volume_n),
                                                  cfg.resolutions.exclusion_radius, cfg.resolutions.fd_step);
        HomotopyContext ctx(dom, std::move(rules));
        ResidualReport rep = homotopy_residual(ctx, tag, q, zero_field(n, q), zero_field(n, q + 1), probes);
        report.add("zero-data-residual", rep.max_residual == 0.0, rep.max_residual, 0.0, "");
    }
}

// ----------------------------------------------------------------------- holder
void run_holder(const ExperimentConfig& cfg, const fs::path& out, RunReport& report) {
    for (double a : cfg.holder.exponents)
        if (a == std::floor(a) && a != 0.0)
            throw UnsupportedExponentError(
                "integer Holder exponent requested: the Zygmund second-difference case is outside the "
                "estimator's range");

    // calibration against closed-form seminorms on [0,1]
    PairSampler cal;
    cal.dim = 1;
    cal.lower = {0.0};
    cal.upper = {1.0};
    cal.count = cfg.holder.pair_count;
    cal.seed = cfg.probes.seed;
    struct Cal {
        const char* name;
        double (*fn)(double);
        double truth;
    };
    const Cal cals[] = {{"sqrt", +[](double x) { return std::sqrt(x); }, 1.0},
                        {"identity", +[](double x) { return x; }, 1.0},
                        {"constant", +[](double) { return 0.7; }, 0.0}};
    CsvWriter ccsv((out / "holder_calibration.csv").string(), {"function", "a", "estimate", "truth"});
    for (const Cal& c : cals) {
        auto f = [fn = c.fn](const std::vector<double>& x) { return CVector{Complex(fn(x[0]))}; };
        double est = holder_seminorm(f, 0.5, cal).seminorm;
        ccsv.field(std::string(c.name)).field(0.5).field(est).field(c.truth);
        ccsv.end_row();
        bool ok = c.truth == 0.0 ? est == 0.0 : est >= 0.9 * c.truth && est <= c.truth * 1.0000001;
        report.add(std::string("calibration-") + c.name, ok, est, c.truth, "sampled vs closed form");
    }

    // rough-data family phi_s = |z1 - p|^s dzbar1 under T_1, measured C^0 -> C^{1/2}
    DomainPtr dom = make_domain(cfg.domain);
    const int n = cfg.dimension;
    OperatorRules rules = make_operator_rules(*dom, cfg.resolutions.boundary_n, cfg.resolutions.volume_n,
                                              cfg.resolutions.exclusion_radius, cfg.resolutions.fd_step);
    int boundary_res = rules.resolution;
    HomotopyContext ctx(dom, std::move(rules));
    RealDir e1(static_cast<std::size_t>(2 * n), 0.0);
    e1[0] = 1.0;
    CPoint pole = Domain::point_on_ray(e1, dom->rho(e1));

    PairSampler ps;
    ps.dim = 2 * n;
    ps.lower.assign(static_cast<std::size_t>(2 * n), -1.0);
    ps.upper.assign(static_cast<std::size_t>(2 * n), 1.0);
    double bres_d = static_cast<double>(boundary_res);
    ps.inside = [dom, bres_d](const std::vector<double>& x) {
        CPoint z(dom->dim());
        for (int i = 0; i < 2 * dom->dim(); ++i) z.set_real_coord(i, x[i]);
        if (dom->r()->value(z) >= -1e-6 || norm2sq(z) < 1e-12) return false;
        double local = M_PI * dom->rho(Domain::direction_of(z)) / bres_d;
        return dom->boundary_distance(z) >= 2.2 * local;
    };
    ps.count = std::min<std::size_t>(cfg.holder.pair_count, 300);
    ps.max_scale_log2 = 10;
    ps.seed = cfg.probes.seed + 17;

    CsvWriter gcsv((out / "gain.csv").string(),
                   {"s", "a", "data_norm", "solution_seminorm", "ratio", "pairs", "arg_x", "arg_y"});
    std::vector<double> ratios;
    for (double s : cfg.holder.exponents) {
        FormField phis;
        phis.n = n;
        phis.q = 1;
        phis.eval = [s, pole, n](const CPoint& p) {
            FormValue v(n, 1);
            v[0] = std::pow(abs2(p[0] - pole[0]), 0.5 * s);
            return v;
        };
        auto cache = ctx.cache(phis, zero_field(n, 2));
        auto u_fn = [&](const std::vector<double>& x) {
            CPoint z(n);
            for (int i = 0; i < 2 * n; ++i) z.set_real_coord(i, x[i]);
            return ctx.apply_T_point(1, cache, z, nullptr).coeffs;
        };
        auto phi_fn = [&](const std::vector<double>& x) {
            CPoint z(n);
            for (int i = 0; i < 2 * n; ++i) z.set_real_coord(i, x[i]);
            return phis.eval(z).coeffs;
        };
        GainReport rep = gain_report(phi_fn, u_fn, 0.0, ps);
        ratios.push_back(rep.ratio);
        std::ostringstream ax, ay;
        for (double v : rep.arg_x) ax << v << " ";
        for (double v : rep.arg_y) ay << v << " ";
        gcsv.field(s).field(rep.a).field(rep.data_norm).field(rep.solution_seminorm).field(rep.ratio)
            .field(rep.pair_count).field(ax.str()).field(ay.str());
        gcsv.end_row();
    }
    double lo = *std::min_element(ratios.begin(), ratios.end());
    double hi = *std::max_element(ratios.begin(), ratios.end());
    report.add("gain-family-bounded", lo > 0.0 && hi <= 2.0 * lo, hi / std::max(lo, 1e-300), 2.0,
               "C^{1/2} gain ratio drift across the rough-data family (evidence, not proof)");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Cauchy-Leray-Koppelman integral operators: experiments and verification"};
    app.require_subcommand(1);

    std::string config_path, out_dir;
    std::int64_t seed_override = -1;
    int threads = 0;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", config_path, "JSON experiment configuration")->required();
        cmd->add_option("--out", out_dir, "output directory (overrides the config)");
        cmd->add_option("--seed", seed_override, "probe/sampler seed override");
        cmd->add_option("--threads", threads, "worker threads (0 = hardware)");
    };

    CLI::App* c1 = app.add_subcommand("check-domain", "estimate the convexity-condition quotients");
    CLI::App* c2 = app.add_subcommand("solve", "apply a homotopy operator to the configured data");
    CLI::App* c3 = app.add_subcommand("verify", "Koppelman + homotopy residual ladders");
    CLI::App* c4 = app.add_subcommand("holder", "seminorm calibration and gain measurement");
    for (CLI::App* c : {c1, c2, c3, c4}) add_common(c);

    CLI11_PARSE(app, argc, argv);

    try {
        ExperimentConfig cfg = ExperimentConfig::from_json_file(config_path);
        if (!out_dir.empty()) cfg.output_dir = out_dir;
        if (seed_override >= 0) {
            cfg.probes.seed = static_cast<std::uint64_t>(seed_override);
            cfg.condition_sampler.seed = static_cast<std::uint64_t>(seed_override);
        }
        worker_threads() = threads;

        fs::path out(cfg.output_dir);
        fs::create_directories(out);

        RunReport report;
        report.config_echo = cfg.echo_json();
        report.fingerprint = version_fingerprint();

        if (app.got_subcommand(c1)) {
            report.command = "check-domain";
            run_check_domain(cfg, out, report);
        } else if (app.got_subcommand(c2)) {
            report.command = "solve";
            run_solve(cfg, out, report);
        } else if (app.got_subcommand(c3)) {
            report.command = "verify";
            run_verify(cfg, out, report);
        } else {
            report.command = "holder";
            run_holder(cfg, out, report);
        }

        report.print_summary(std::cout);
        std::ofstream rep(out / "report.json");
        rep << report.to_json() << "\n";
        return report.all_passed() ? 0 : 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
