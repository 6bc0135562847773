#include "clk/operators.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "clk/errors.hpp"
#include "clk/mollify.hpp"

namespace clk {

namespace {

constexpr int kMollifyK = 10000;  // C^1 perturbation ~1e-8, far below rule error

std::shared_ptr<VolumeRule> make_collar(const Domain& dom, int N, double outer_level) {
    return std::make_shared<VolumeRule>(
        build_volume_rule(dom, RegionTag::Collar, N, std::nullopt, std::make_pair(0.0, outer_level)));
}

}  // namespace

OperatorRules make_operator_rules(const Domain& dom, int boundary_resolution, int volume_resolution,
                                  double exclusion_radius, double fd_step) {
    if (boundary_resolution < 4 || volume_resolution < 4)
        throw ConfigError("operator rules: resolution too small");
    OperatorRules r;
    r.resolution = boundary_resolution;
    r.volume_resolution = volume_resolution;
    r.exclusion_radius = exclusion_radius;
    r.fd_step = fd_step;
    int bhalf = std::max(4, boundary_resolution / 2);
    int vhalf = std::max(4, volume_resolution / 2);
    r.boundary = std::make_shared<BoundaryRule>(build_boundary_rule(dom, boundary_resolution));
    r.boundary_half = std::make_shared<BoundaryRule>(build_boundary_rule(dom, bhalf));
    r.domain_vol = std::make_shared<VolumeRule>(build_volume_rule(dom, RegionTag::Domain, volume_resolution));
    r.domain_vol_half = std::make_shared<VolumeRule>(build_volume_rule(dom, RegionTag::Domain, vhalf));
    r.nbhd_vol = std::make_shared<VolumeRule>(build_volume_rule(dom, RegionTag::Neighborhood, volume_resolution));
    r.nbhd_vol_half = std::make_shared<VolumeRule>(build_volume_rule(dom, RegionTag::Neighborhood, vhalf));
    double outer = 0.76 * dom.delta();  // the cutoff vanishes past 0.75 delta
    r.collar_vol = make_collar(dom, volume_resolution, outer);
    r.collar_vol_half = make_collar(dom, vhalf, outer);
    return r;
}

HomotopyContext::HomotopyContext(DomainPtr dom, OperatorRules rules)
    : dom_(std::move(dom)), rules_(std::move(rules)) {
    DefiningFunctionPtr r_eff = dom_->r();
    if (r_eff->smoothness() == Smoothness::C11) {
        r_eff = mollify(r_eff, kMollifyK);  // smooth weight inside Omega1/Omega01
    }
    kernels_ = std::make_shared<KernelEvaluator>(dom_->dim(), r_eff,
                                                 SingularSetGuard::for_scale(dom_->diameter()));
    ext_ = std::make_shared<ExtensionOperator>(dom_, ExtensionMode::Analytic);
}

HomotopyContext::CachedData HomotopyContext::cache(const FormField& phi, const FormField& dbar_phi) const {
    CachedData c;
    c.field = phi;
    c.boundary = evaluate_at_nodes(phi, *rules_.boundary);
    c.boundary_half = evaluate_at_nodes(phi, *rules_.boundary_half);
    c.domain_vol = evaluate_at_nodes(phi, *rules_.domain_vol);
    c.domain_vol_half = evaluate_at_nodes(phi, *rules_.domain_vol_half);
    FormField ephi = ext_->extend(phi);
    c.nbhd_vol = evaluate_at_nodes(ephi, *rules_.nbhd_vol);
    c.nbhd_vol_half = evaluate_at_nodes(ephi, *rules_.nbhd_vol_half);
    c.collar_ext = evaluate_at_nodes(ephi, *rules_.collar_vol);
    c.collar_ext_half = evaluate_at_nodes(ephi, *rules_.collar_vol_half);
    FormField comm = ext_->commutator(phi, dbar_phi.eval ? dbar_phi : zero_field(phi.n, phi.q + 1));
    c.collar_comm = evaluate_at_nodes(comm, *rules_.collar_vol);
    c.collar_comm_half = evaluate_at_nodes(comm, *rules_.collar_vol_half);
    return c;
}

namespace {

double boundary_node_spacing(const Domain& dom, const CPoint& z, int resolution) {
    // local arc spacing of the boundary rule along the probe's ray
    double rho;
    if (norm2sq(z) > 1e-24) {
        rho = dom.rho(Domain::direction_of(z));
    } else {
        RealDir e(static_cast<std::size_t>(2 * dom.dim()), 0.0);
        e[0] = 1.0;
        rho = dom.rho(e);
    }
    return M_PI * rho / resolution;
}

void check_probe(const Domain& dom, const CPoint& z, int resolution) {
    if (dom.r()->value(z) >= 0.0) throw ProximityError("probe lies outside the open domain");
    if (dom.boundary_distance(z) < 2.0 * boundary_node_spacing(dom, z, resolution))
        throw ProximityError("probe too close to the boundary for the current rule resolution");
}

ExclusionSpec make_exclusion(const Domain& dom, const CPoint& z, double radius) {
    ExclusionSpec ex;
    ex.center = z;
    ex.radius = std::min(radius, 0.5 * dom.boundary_distance(z));
    if (ex.radius <= 0.0) throw ProximityError("exclusion ball collapsed at probe");
    return ex;
}

}  // namespace

FormValue HomotopyContext::apply_T_point(int q, const CachedData& phi, const CPoint& z, double* err,
                                         FormValue* coarse) const {
    const int n = dom_->dim();
    if (q < 1 || q > n) throw DegreeError("apply_T: q must lie in [1, n]");
    check_probe(*dom_, z, rules_.resolution);
    double err_total = 0.0;

    FormValue value(n, q - 1), coarse_value(n, q - 1);
    if (q - 1 <= n - 2) {
        IntegralResult bd = integrate_kernel_boundary_cached(
            *rules_.boundary, *kernels_, KernelKind::Omega01, q - 1, phi.boundary, q, z,
            rules_.boundary_half.get(), &phi.boundary_half);
        value -= bd.value;
        coarse_value -= bd.coarse_value;
        err_total += bd.error_estimate;
    }
    ExclusionSpec ex = make_exclusion(*dom_, z, rules_.exclusion_radius);
    IntegralResult vol = integrate_kernel_volume_cached(*rules_.domain_vol, *kernels_, KernelKind::Omega0,
                                                        q - 1, phi.domain_vol, q, phi.field, z, ex,
                                                        rules_.domain_vol_half.get(), &phi.domain_vol_half);
    value += vol.value;
    coarse_value += vol.coarse_value;
    err_total += vol.error_estimate;
    if (err) *err = err_total;
    if (coarse) *coarse = coarse_value;
    return value;
}

FormValue HomotopyContext::apply_H_point(int q, const CachedData& phi, const CPoint& z, double* err,
                                         FormValue* coarse) const {
    const int n = dom_->dim();
    if (q < 1 || q > n) throw DegreeError("apply_H: q must lie in [1, n]");
    check_probe(*dom_, z, rules_.resolution);
    double err_total = 0.0;

    ExclusionSpec ex = make_exclusion(*dom_, z, rules_.exclusion_radius);
    IntegralResult volU = integrate_kernel_volume_cached(*rules_.nbhd_vol, *kernels_, KernelKind::Omega0,
                                                         q - 1, phi.nbhd_vol, q, phi.field, z, ex,
                                                         rules_.nbhd_vol_half.get(), &phi.nbhd_vol_half);
    FormValue value = volU.value;
    FormValue coarse_value = volU.coarse_value;
    err_total += volU.error_estimate;
    if (q - 1 <= n - 2) {
        IntegralResult col = integrate_kernel_volume_cached(
            *rules_.collar_vol, *kernels_, KernelKind::Omega01, q - 1, phi.collar_comm, q + 1, phi.field, z,
            std::nullopt, rules_.collar_vol_half.get(), &phi.collar_comm_half);
        value += col.value;
        coarse_value += col.coarse_value;
        err_total += col.error_estimate;
    }
    if (err) *err = err_total;
    if (coarse) *coarse = coarse_value;
    return value;
}

Complex HomotopyContext::apply_H0_point(const CachedData& phi, const CachedData& dbar_phi, const CPoint& z,
                                        double* err, double* consistency, double* consistency_estimate) const {
    check_probe(*dom_, z, rules_.resolution);
    double err_total = 0.0;

    IntegralResult bd =
        integrate_kernel_boundary_cached(*rules_.boundary, *kernels_, KernelKind::Omega1, 0, phi.boundary, 0,
                                         z, rules_.boundary_half.get(), &phi.boundary_half);
    err_total += bd.error_estimate;
    Complex route_a = bd.value[0];
    {
        IntegralResult col = integrate_kernel_volume_cached(
            *rules_.collar_vol, *kernels_, KernelKind::Omega1, 0, dbar_phi.collar_ext, 1, dbar_phi.field, z,
            std::nullopt, rules_.collar_vol_half.get(), &dbar_phi.collar_ext_half);
        route_a -= col.value[0];
        err_total += col.error_estimate;
    }
    IntegralResult route_b = integrate_kernel_volume_cached(
        *rules_.collar_vol, *kernels_, KernelKind::Omega1, 0, phi.collar_comm, 1, phi.field, z, std::nullopt,
        rules_.collar_vol_half.get(), &phi.collar_comm_half);
    if (consistency) *consistency = std::abs(route_a - route_b.value[0]);
    if (consistency_estimate) *consistency_estimate = err_total + route_b.error_estimate;
    if (err) *err = err_total;
    return route_a;
}

void HomotopyContext::precheck_nonvanishing(const std::vector<CPoint>& probes) const {
    const auto& collar = rules_.collar_vol->nodes;
    std::size_t stride = std::max<std::size_t>(1, collar.size() / 512);
    double scale = dom_->diameter();
    double floor = 1e-10 * scale * scale;
    auto r = kernels_->defining_function();
    for (std::size_t i = 0; i < collar.size(); i += stride) {
        const CPoint& zeta = collar[i].zeta;
        CVector g = r->gradient(zeta);
        for (const CPoint& z : probes) {
            Complex p = 0.0;
            for (int j = 0; j < dom_->dim(); ++j) p += g[static_cast<std::size_t>(j)] * (zeta[j] - z[j]);
            if (std::abs(p) < floor) {
                std::ostringstream msg;
                msg << "convexity precheck failed: the Leray pairing r_zeta . (zeta - z) vanishes for "
                       "zeta in U \\ D, z in D (sampled pair; the domain is not strictly C-linearly "
                       "convex on the working collar)";
                throw ConvexityPrecheckError(msg.str());
            }
        }
    }
}

namespace {

HomotopySolution run_pointwise(const HomotopyContext& ctx, OperatorTag tag, int q,
                               const HomotopyContext::CachedData& phi,
                               const HomotopyContext::CachedData* dbar_phi,
                               const std::vector<CPoint>& probes) {
    HomotopySolution sol;
    sol.tag = tag;
    sol.q = q;
    sol.probes = probes;
    sol.values.reserve(probes.size());
    sol.error_estimates.reserve(probes.size());
    double consistency = 0.0, consistency_estimate = 0.0;
    for (const CPoint& z : probes) {
        double err = 0.0;
        switch (tag) {
            case OperatorTag::T:
                sol.values.push_back(ctx.apply_T_point(q, phi, z, &err));
                break;
            case OperatorTag::H:
                sol.values.push_back(ctx.apply_H_point(q, phi, z, &err));
                break;
            case OperatorTag::H0: {
                double c = 0.0, cest = 0.0;
                Complex v = ctx.apply_H0_point(phi, *dbar_phi, z, &err, &c, &cest);
                consistency = std::max(consistency, c);
                consistency_estimate = std::max(consistency_estimate, cest);
                sol.values.push_back(FormValue::scalar(ctx.domain().dim(), v));
                break;
            }
        }
        sol.error_estimates.push_back(err);
    }
    sol.h0_consistency = consistency;
    sol.h0_consistency_estimate = consistency_estimate;
    std::ostringstream notes;
    notes << "resolution=" << ctx.rules().resolution << " exclusion=" << ctx.rules().exclusion_radius
          << " fd_step=" << ctx.rules().fd_step;
    sol.notes = notes.str();
    return sol;
}

}  // namespace

HomotopySolution apply_T(const HomotopyContext& ctx, int q, const FormField& phi,
                         const std::vector<CPoint>& probes) {
    auto cache = ctx.cache(phi, zero_field(phi.n, phi.q + 1));
    return run_pointwise(ctx, OperatorTag::T, q, cache, nullptr, probes);
}

HomotopySolution apply_H(const HomotopyContext& ctx, int q, const FormField& phi, const FormField& dbar_phi,
                         const std::vector<CPoint>& probes) {
    ctx.precheck_nonvanishing(probes);
    auto cache = ctx.cache(phi, dbar_phi);
    return run_pointwise(ctx, OperatorTag::H, q, cache, nullptr, probes);
}

HomotopySolution apply_H0(const HomotopyContext& ctx, const FormField& phi, const FormField& dbar_phi,
                          const std::vector<CPoint>& probes) {
    if (phi.q != 0) throw DegreeError("apply_H0: requires scalar (0,0) data");
    ctx.precheck_nonvanishing(probes);
    auto cache = ctx.cache(phi, dbar_phi);
    auto dbar_cache = ctx.cache(dbar_phi.eval ? dbar_phi : zero_field(phi.n, 1), zero_field(phi.n, 2));
    return run_pointwise(ctx, OperatorTag::H0, 0, cache, &dbar_cache, probes);
}

ResidualReport homotopy_residual(const HomotopyContext& ctx, OperatorTag tag, int q, const FormField& phi,
                                 const FormField& dbar_phi, const std::vector<CPoint>& probes) {
    if (tag == OperatorTag::H0) throw std::invalid_argument("homotopy_residual: use tag T or H with q >= 1");
    const int n = ctx.domain().dim();
    const double h = ctx.rules().fd_step;
    if (tag == OperatorTag::H) ctx.precheck_nonvanishing(probes);

    auto cache = ctx.cache(phi, dbar_phi);
    bool has_dbar = static_cast<bool>(dbar_phi.eval);
    std::unique_ptr<HomotopyContext::CachedData> dbar_cache;
    if (has_dbar && q + 1 <= n) dbar_cache = std::make_unique<HomotopyContext::CachedData>(ctx.cache(dbar_phi, zero_field(n, dbar_phi.q + 1)));

    auto op_point = [&](const HomotopyContext::CachedData& c, int deg, const CPoint& p, double* err,
                        FormValue* coarse) {
        return tag == OperatorTag::T ? ctx.apply_T_point(deg, c, p, err, coarse)
                                     : ctx.apply_H_point(deg, c, p, err, coarse);
    };

    ResidualReport rep;
    MultiIndexSet in_set(n, q - 1), out_set(n, q);
    for (const CPoint& z : probes) {
        // dbar of the solution by central differences, assembled on both the
        // fine and half-resolution rules; their gap is the two-grid error bar
        // for the quadrature noise the differencing amplifies.
        FormValue dbar_u(n, q), dbar_u_half(n, q);
        double scale_u = 0.0;
        for (int j = 0; j < n; ++j) {
            FormValue diffs[2], cdiffs[2];  // d/dx_j, d/dy_j
            for (int part = 0; part < 2; ++part) {
                CPoint zp = z, zm = z;
                int coord = 2 * j + part;
                zp.set_real_coord(coord, z.real_coord(coord) + h);
                zm.set_real_coord(coord, z.real_coord(coord) - h);
                FormValue cp(n, q - 1), cm(n, q - 1);
                FormValue up = op_point(cache, q, zp, nullptr, &cp);
                FormValue um = op_point(cache, q, zm, nullptr, &cm);
                scale_u = std::max({scale_u, up.inf_norm(), um.inf_norm()});
                FormValue d = up;
                d -= um;
                d *= 1.0 / (2.0 * h);
                diffs[part] = d;
                FormValue cd = cp;
                cd -= cm;
                cd *= 1.0 / (2.0 * h);
                cdiffs[part] = cd;
            }
            for (int ord = 0; ord < in_set.count(); ++ord) {
                WedgeResult w = wedge_sign(in_set.list()[static_cast<std::size_t>(ord)], j + 1);
                if (w.sign == 0) continue;
                Complex dzbar = 0.5 * (diffs[0][ord] + Complex(0, 1) * diffs[1][ord]);
                Complex cdzbar = 0.5 * (cdiffs[0][ord] + Complex(0, 1) * cdiffs[1][ord]);
                dbar_u[out_set.ordinal(w.merged.mask())] += static_cast<double>(w.sign) * dzbar;
                dbar_u_half[out_set.ordinal(w.merged.mask())] += static_cast<double>(w.sign) * cdzbar;
            }
        }
        double fd_err = max_abs_diff(dbar_u, dbar_u_half);

        FormValue rhs = phi.eval(z);
        rhs -= dbar_u;
        double err2 = 0.0;
        if (dbar_cache) {
            FormValue t2 = op_point(*dbar_cache, q + 1, z, &err2, nullptr);
            rhs -= t2;
        }
        double trunc = 10.0 * h * h * scale_u;
        double res = rhs.inf_norm();
        rep.per_probe.push_back(res);
        rep.per_probe_estimate.push_back(fd_err + trunc + err2);
        rep.max_residual = std::max(rep.max_residual, res);
        rep.combined_error_estimate = std::max(rep.combined_error_estimate, fd_err + trunc + err2);
    }
    return rep;
}

}  // namespace clk
