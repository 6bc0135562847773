#include "clk/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>

#include "clk/errors.hpp"
#include "clk/parallel.hpp"
#include "clk/quad1d.hpp"

namespace clk {

namespace {

/// Product chart on S^{2n-1}: angles t_1..t_{2n-2} in (0,pi) with weight
/// sin^{2n-1-k}(t_k), final angle periodic. For n = 1 a single periodic angle.
struct AngularChart {
    int n;
    std::vector<Rule1D> rules;  // per angle

    AngularChart(int n_, int resolution) : n(n_) {
        int d = 2 * n - 1;
        for (int k = 1; k <= d - 1; ++k) rules.push_back(gauss_legendre_rule(resolution, 0.0, M_PI));
        rules.push_back(periodic_midpoint_rule(std::max(2, resolution)));
    }

    std::size_t count() const {
        std::size_t c = 1;
        for (const auto& r : rules) c *= r.x.size();
        return c;
    }

    /// Chart weight WITHOUT the spherical measure factor: pullback Jacobians
    /// of an explicit parametrization already carry the area/form element.
    void decode_raw(std::size_t idx, std::vector<double>& angles, double& weight) const {
        angles.resize(rules.size());
        weight = 1.0;
        for (std::size_t a = rules.size(); a-- > 0;) {
            std::size_t m = rules[a].x.size();
            std::size_t i = idx % m;
            idx /= m;
            angles[a] = rules[a].x[i];
            weight *= rules[a].w[i];
        }
    }

    /// Chart weight including the measure factor prod sin^{d-1-k}(t_k).
    void decode(std::size_t idx, std::vector<double>& angles, double& weight) const {
        decode_raw(idx, angles, weight);
        int d = static_cast<int>(rules.size());
        for (int k = 0; k < d - 1; ++k) weight *= std::pow(std::sin(angles[static_cast<std::size_t>(k)]), d - 1 - k);
    }

    static RealDir direction(int n, const std::vector<double>& angles) {
        int dim = 2 * n;
        RealDir u(static_cast<std::size_t>(dim));
        double s = 1.0;
        for (int i = 0; i < dim - 1; ++i) {
            u[static_cast<std::size_t>(i)] = s * std::cos(angles[static_cast<std::size_t>(i)]);
            s *= std::sin(angles[static_cast<std::size_t>(i)]);
        }
        u[static_cast<std::size_t>(dim - 1)] = s;
        return u;
    }
};

CPoint to_cpoint(const RealDir& u, double scale) {
    int n = static_cast<int>(u.size()) / 2;
    CPoint p(n);
    for (int j = 0; j < n; ++j)
        p[j] = Complex(scale * u[static_cast<std::size_t>(2 * j)], scale * u[static_cast<std::size_t>(2 * j + 1)]);
    return p;
}

Complex det_complex(std::vector<Complex>& m, int k) {
    // in-place Gaussian elimination with partial pivoting
    Complex det = 1.0;
    for (int c = 0; c < k; ++c) {
        int piv = c;
        double best = std::abs(m[static_cast<std::size_t>(c * k + c)]);
        for (int r = c + 1; r < k; ++r) {
            double v = std::abs(m[static_cast<std::size_t>(r * k + c)]);
            if (v > best) {
                best = v;
                piv = r;
            }
        }
        if (best == 0.0) return 0.0;
        if (piv != c) {
            for (int j = 0; j < k; ++j)
                std::swap(m[static_cast<std::size_t>(piv * k + j)], m[static_cast<std::size_t>(c * k + j)]);
            det = -det;
        }
        Complex p = m[static_cast<std::size_t>(c * k + c)];
        det *= p;
        for (int r = c + 1; r < k; ++r) {
            Complex f = m[static_cast<std::size_t>(r * k + c)] / p;
            for (int j = c; j < k; ++j)
                m[static_cast<std::size_t>(r * k + j)] -= f * m[static_cast<std::size_t>(c * k + j)];
        }
    }
    return det;
}

double det_real_gram(const std::vector<double>& jac, int rows, int cols) {
    // det(J J^T) for J rows x cols (rows = 2n-1 params, cols = 2n coords)
    std::vector<double> g(static_cast<std::size_t>(rows) * rows, 0.0);
    for (int a = 0; a < rows; ++a)
        for (int b = 0; b < rows; ++b) {
            double s = 0.0;
            for (int c = 0; c < cols; ++c)
                s += jac[static_cast<std::size_t>(a * cols + c)] * jac[static_cast<std::size_t>(b * cols + c)];
            g[static_cast<std::size_t>(a * rows + b)] = s;
        }
    double det = 1.0;
    for (int c = 0; c < rows; ++c) {
        int piv = c;
        double best = std::abs(g[static_cast<std::size_t>(c * rows + c)]);
        for (int r = c + 1; r < rows; ++r)
            if (std::abs(g[static_cast<std::size_t>(r * rows + c)]) > best) {
                best = std::abs(g[static_cast<std::size_t>(r * rows + c)]);
                piv = r;
            }
        if (best == 0.0) return 0.0;
        if (piv != c) {
            for (int j = 0; j < rows; ++j)
                std::swap(g[static_cast<std::size_t>(piv * rows + j)], g[static_cast<std::size_t>(c * rows + j)]);
            det = -det;
        }
        double p = g[static_cast<std::size_t>(c * rows + c)];
        det *= p;
        for (int r = c + 1; r < rows; ++r) {
            double f = g[static_cast<std::size_t>(r * rows + c)] / p;
            for (int j = c; j < rows; ++j)
                g[static_cast<std::size_t>(r * rows + j)] -= f * g[static_cast<std::size_t>(c * rows + j)];
        }
    }
    return det;
}

/// Conversion dzeta_1..n ^ dzetabar_1..n = volume_factor(n) * dV.
Complex volume_factor(int n) {
    Complex f = (n * (n - 1) / 2) % 2 ? -1.0 : 1.0;
    for (int i = 0; i < n; ++i) f *= Complex(0.0, -2.0);
    return f;
}

}  // namespace

double BoundaryRule::area() const {
    double s = 0.0;
    for (const auto& nd : nodes) s += nd.surface_weight;
    return s;
}

double VolumeRule::volume() const {
    double s = 0.0;
    for (const auto& nd : nodes) s += nd.weight;
    return s;
}

BoundaryRule build_boundary_rule(const Domain& dom, int resolution) {
    if (!dom.star_shaped()) throw NonStarShapedError("build_boundary_rule: domain is not star-shaped");
    const int n = dom.dim();
    const int d = 2 * n - 1;
    BoundaryRule rule;
    rule.n = n;
    rule.resolution = resolution;

    AngularChart chart(n, resolution);
    std::size_t total = chart.count();
    rule.nodes.resize(total);

    const double hstep = 2e-3;  // fourth-order stencil; truncation ~h^4
    std::size_t chunk = 256;
    std::size_t nchunks = (total + chunk - 1) / chunk;
    parallel_for_chunks(nchunks, [&](std::size_t ci) {
        std::vector<double> angles, pangles;
        std::vector<Complex> jac(static_cast<std::size_t>(d) * n);
        std::vector<double> rjac(static_cast<std::size_t>(d) * 2 * n);
        std::vector<Complex> minor(static_cast<std::size_t>(d) * d);
        for (std::size_t idx = ci * chunk; idx < std::min(total, (ci + 1) * chunk); ++idx) {
            double wt;
            chart.decode_raw(idx, angles, wt);
            auto Phi = [&](const std::vector<double>& a) {
                RealDir u = AngularChart::direction(n, a);
                return to_cpoint(u, dom.rho(u));
            };
            CPoint zeta = Phi(angles);
            for (int a = 0; a < d; ++a) {
                auto shift = [&](double s) {
                    pangles = angles;
                    pangles[static_cast<std::size_t>(a)] += s;
                    return Phi(pangles);
                };
                CPoint p2 = shift(2.0 * hstep), p1 = shift(hstep), m1 = shift(-hstep), m2 = shift(-2.0 * hstep);
                for (int j = 0; j < n; ++j)
                    jac[static_cast<std::size_t>(a * n + j)] =
                        (-p2[j] + 8.0 * p1[j] - 8.0 * m1[j] + m2[j]) / (12.0 * hstep);
            }
            BoundaryNode node;
            node.zeta = zeta;
            node.form_density.resize(static_cast<std::size_t>(n));
            for (int miss = 0; miss < n; ++miss) {
                // columns: dzeta_1..n then dzetabar_k for k != miss ascending
                for (int a = 0; a < d; ++a) {
                    for (int j = 0; j < n; ++j)
                        minor[static_cast<std::size_t>(a * d + j)] = jac[static_cast<std::size_t>(a * n + j)];
                    int cidx = n;
                    for (int k = 0; k < n; ++k) {
                        if (k == miss) continue;
                        minor[static_cast<std::size_t>(a * d + cidx)] = std::conj(jac[static_cast<std::size_t>(a * n + k)]);
                        ++cidx;
                    }
                }
                node.form_density[static_cast<std::size_t>(miss)] = det_complex(minor, d) * wt;
            }
            for (int a = 0; a < d; ++a)
                for (int j = 0; j < n; ++j) {
                    rjac[static_cast<std::size_t>(a * 2 * n + 2 * j)] = jac[static_cast<std::size_t>(a * n + j)].real();
                    rjac[static_cast<std::size_t>(a * 2 * n + 2 * j + 1)] = jac[static_cast<std::size_t>(a * n + j)].imag();
                }
            node.surface_weight = std::sqrt(std::abs(det_real_gram(rjac, d, 2 * n))) * wt;
            rule.nodes[idx] = node;
        }
    });

    // orientation calibration: the Bochner-Martinelli integral of 1 from the
    // star center must be +1 (validated at full precision by the tests).
    KernelEvaluator ev(n, nullptr);
    const MultiIndexSet& cols = ev.col_set(KernelKind::Omega0, 0);
    CPoint center(n);
    CVector coeffs;
    Complex bm = 0.0;
    const std::uint32_t FULL = (1u << n) - 1;
    for (const auto& node : rule.nodes) {
        ev.eval(KernelKind::Omega0, 0, center, node.zeta, coeffs);
        for (int c = 0; c < cols.count(); ++c) {
            std::uint32_t K = cols.list()[static_cast<std::size_t>(c)].mask();
            int miss = __builtin_ctz(FULL & ~K);
            bm += coeffs[static_cast<std::size_t>(c)] * node.form_density[static_cast<std::size_t>(miss)];
        }
    }
    if (bm.real() < 0.0) {
        for (auto& node : rule.nodes)
            for (auto& dnsty : node.form_density) dnsty = -dnsty;
        rule.orientation_flips = 1;
    }
    return rule;
}

double exclusion_blend(double distance, double radius) {
    // wide transition [0.3 r, r]: the tensor rule must resolve the blend, the
    // polar sub-rule integrates the complement exactly in radius
    double t = (distance - 0.3 * radius) / (0.7 * radius);
    if (t <= 0.0) return 0.0;
    if (t >= 1.0) return 1.0;
    return t * t * t * (t * (6.0 * t - 15.0) + 10.0);
}

namespace {

std::vector<VolumeNode> polar_subrule(int n, const ExclusionSpec& ex) {
    AngularChart chart(n, ex.angular);
    Rule1D rad = gauss_legendre_rule(ex.radial, 0.0, ex.radius);
    std::vector<VolumeNode> nodes;
    nodes.reserve(chart.count() * rad.x.size());
    std::vector<double> angles;
    for (std::size_t i = 0; i < chart.count(); ++i) {
        double wang;
        chart.decode(i, angles, wang);
        RealDir u = AngularChart::direction(n, angles);
        for (std::size_t k = 0; k < rad.x.size(); ++k) {
            double s = rad.x[k];
            double w = rad.w[k] * std::pow(s, 2 * n - 1) * wang * (1.0 - exclusion_blend(s, ex.radius));
            if (w == 0.0) continue;
            VolumeNode nd;
            nd.zeta = to_cpoint(u, 1.0);
            for (int j = 0; j < n; ++j) nd.zeta[j] = ex.center[j] + s * nd.zeta[j];
            nd.weight = w;
            nodes.push_back(nd);
        }
    }
    return nodes;
}

}  // namespace

VolumeRule build_volume_rule(const Domain& dom, RegionTag region, int resolution,
                             std::optional<ExclusionSpec> exclusion,
                             std::optional<std::pair<double, double>> radial_band) {
    const int n = dom.dim();
    VolumeRule rule;
    rule.n = n;
    rule.region = region;
    rule.resolution = resolution;

    AngularChart chart(n, resolution);
    int nrad = std::max(4, resolution / 2);
    // the collar is thin but carries the cutoff transition; resolve it radially
    if (region == RegionTag::Collar) nrad = std::max(16, resolution);
    double delta = dom.delta();

    std::size_t nang = chart.count();
    std::vector<std::vector<VolumeNode>> per_dir(nang);
    std::size_t chunk = 64;
    std::size_t nchunks = (nang + chunk - 1) / chunk;
    parallel_for_chunks(nchunks, [&](std::size_t ci) {
        std::vector<double> angles;
        for (std::size_t i = ci * chunk; i < std::min(nang, (ci + 1) * chunk); ++i) {
            double wang;
            chart.decode(i, angles, wang);
            RealDir u = AngularChart::direction(n, angles);
            double lo = 0.0, hi = 0.0;
            switch (region) {
                case RegionTag::Domain:
                    lo = 0.0;
                    hi = dom.rho(u);
                    break;
                case RegionTag::Neighborhood:
                    lo = 0.0;
                    hi = dom.rho_level(u, delta);
                    break;
                case RegionTag::Collar:
                    lo = dom.rho(u);
                    hi = dom.rho_level(u, delta);
                    break;
            }
            if (radial_band) {
                lo = radial_band->first <= 0.0 ? dom.rho(u) : dom.rho_level(u, radial_band->first);
                hi = dom.rho_level(u, radial_band->second);
            }
            if (!(hi > lo)) throw EmptyRegionError("build_volume_rule: empty radial span");
            Rule1D rad = gauss_legendre_rule(nrad, lo, hi);
            auto& out = per_dir[i];
            out.reserve(rad.x.size());
            for (std::size_t k = 0; k < rad.x.size(); ++k) {
                VolumeNode nd;
                nd.zeta = to_cpoint(u, rad.x[k]);
                nd.weight = rad.w[k] * std::pow(rad.x[k], 2 * n - 1) * wang;
                out.push_back(nd);
            }
        }
    });
    std::size_t total = 0;
    for (const auto& v : per_dir) total += v.size();
    rule.nodes.reserve(total);
    for (const auto& v : per_dir)
        rule.nodes.insert(rule.nodes.end(), v.begin(), v.end());

    if (exclusion) {
        if (exclusion->radius <= 0.0) throw std::invalid_argument("exclusion radius must be positive");
        for (auto& nd : rule.nodes) nd.weight *= exclusion_blend(dist(nd.zeta, exclusion->center), exclusion->radius);
        std::erase_if(rule.nodes, [](const VolumeNode& nd) { return nd.weight == 0.0; });
        auto polar = polar_subrule(n, *exclusion);
        double vr = dom.r()->value(exclusion->center);
        for (const auto& nd : polar) {
            double rv = dom.r()->value(nd.zeta);
            bool ok = region == RegionTag::Domain ? rv < 0.0 : rv < delta;
            if (!ok)
                throw ProximityError("build_volume_rule: exclusion ball leaves the integration region");
        }
        (void)vr;
        rule.nodes.insert(rule.nodes.end(), polar.begin(), polar.end());
        rule.exclusion = exclusion;
    }
    return rule;
}

namespace {

struct BoundaryPairEntry {
    int col;       // kernel K ordinal
    int data_ord;  // data M ordinal
    int miss;      // missing zetabar index
    double sign;
};

struct VolumePairEntry {
    int col;
    int data_ord;
    double sign;
};

std::vector<BoundaryPairEntry> boundary_pairing(int n, const MultiIndexSet& cols, int data_q) {
    std::vector<BoundaryPairEntry> out;
    MultiIndexSet data_set(n, data_q);
    const std::uint32_t FULL = (1u << n) - 1;
    for (int c = 0; c < cols.count(); ++c) {
        std::uint32_t K = cols.list()[static_cast<std::size_t>(c)].mask();
        for (int m = 0; m < data_set.count(); ++m) {
            std::uint32_t M = data_set.list()[static_cast<std::size_t>(m)].mask();
            if (K & M) continue;
            std::uint32_t rem = FULL & ~(K | M);
            if (__builtin_popcount(rem) != 1) continue;
            out.push_back({c, m, __builtin_ctz(rem), static_cast<double>(merge_sign(K, M))});
        }
    }
    return out;
}

std::vector<VolumePairEntry> volume_pairing(int n, const MultiIndexSet& cols, int data_q) {
    std::vector<VolumePairEntry> out;
    MultiIndexSet data_set(n, data_q);
    const std::uint32_t FULL = (1u << n) - 1;
    for (int c = 0; c < cols.count(); ++c) {
        std::uint32_t K = cols.list()[static_cast<std::size_t>(c)].mask();
        std::uint32_t M = FULL & ~K;
        if (__builtin_popcount(M) != data_q) continue;
        out.push_back({c, data_set.ordinal(M), static_cast<double>(merge_sign(K, M))});
    }
    return out;
}

FormValue accumulate_boundary(const BoundaryRule& rule, const KernelEvaluator& kernels, KernelKind kind,
                              int q_out, const std::vector<FormValue>& data, const CPoint& z) {
    const int n = rule.n;
    const MultiIndexSet& rows = kernels.row_set(q_out);
    const MultiIndexSet& cols = kernels.col_set(kind, q_out);
    int data_q = data.empty() ? 0 : data[0].q;
    auto pairing = boundary_pairing(n, cols, data_q);

    std::size_t chunk = 256;
    std::size_t nchunks = (rule.nodes.size() + chunk - 1) / chunk;
    std::vector<FormValue> partial(nchunks, FormValue(n, q_out));
    parallel_for_chunks(nchunks, [&](std::size_t ci) {
        CVector coeffs;
        FormValue acc(n, q_out);
        for (std::size_t i = ci * chunk; i < std::min(rule.nodes.size(), (ci + 1) * chunk); ++i) {
            const BoundaryNode& nd = rule.nodes[i];
            kernels.eval(kind, q_out, z, nd.zeta, coeffs);
            const FormValue& dv = data[i];
            for (int rj = 0; rj < rows.count(); ++rj) {
                Complex s = 0.0;
                for (const auto& e : pairing)
                    s += e.sign * coeffs[static_cast<std::size_t>(rj) * cols.count() + e.col] * dv[e.data_ord] *
                         nd.form_density[static_cast<std::size_t>(e.miss)];
                acc[rj] += s;
            }
        }
        partial[ci] = acc;
    });
    return tree_reduce(std::move(partial), FormValue(n, q_out),
                       [](FormValue a, const FormValue& b) { return a + b; });
}

FormValue accumulate_volume(const VolumeRule& rule, const KernelEvaluator& kernels, KernelKind kind,
                            int q_out, const std::vector<FormValue>& data, const CPoint& z,
                            const std::optional<ExclusionSpec>& overlay) {
    const int n = rule.n;
    const MultiIndexSet& rows = kernels.row_set(q_out);
    const MultiIndexSet& cols = kernels.col_set(kind, q_out);
    int data_q = data.empty() ? 0 : data[0].q;
    auto pairing = volume_pairing(n, cols, data_q);
    Complex vf = volume_factor(n);

    std::size_t chunk = 256;
    std::size_t nchunks = (rule.nodes.size() + chunk - 1) / chunk;
    std::vector<FormValue> partial(nchunks, FormValue(n, q_out));
    parallel_for_chunks(nchunks, [&](std::size_t ci) {
        CVector coeffs;
        FormValue acc(n, q_out);
        for (std::size_t i = ci * chunk; i < std::min(rule.nodes.size(), (ci + 1) * chunk); ++i) {
            const VolumeNode& nd = rule.nodes[i];
            double w = nd.weight;
            if (overlay) {
                w *= exclusion_blend(dist(nd.zeta, overlay->center), overlay->radius);
                if (w == 0.0) continue;
            }
            kernels.eval(kind, q_out, z, nd.zeta, coeffs);
            const FormValue& dv = data[i];
            for (int rj = 0; rj < rows.count(); ++rj) {
                Complex s = 0.0;
                for (const auto& e : pairing)
                    s += e.sign * coeffs[static_cast<std::size_t>(rj) * cols.count() + e.col] * dv[e.data_ord];
                acc[rj] += vf * w * s;
            }
        }
        partial[ci] = acc;
    });
    return tree_reduce(std::move(partial), FormValue(n, q_out),
                       [](FormValue a, const FormValue& b) { return a + b; });
}

bool all_zero(const std::vector<FormValue>& values) {
    for (const auto& v : values)
        for (const auto& c : v.coeffs)
            if (c != Complex(0.0)) return false;
    return true;
}

}  // namespace

std::vector<FormValue> evaluate_at_nodes(const FormField& data, const BoundaryRule& rule) {
    std::vector<FormValue> out(rule.nodes.size());
    std::size_t chunk = 256;
    std::size_t nchunks = (out.size() + chunk - 1) / chunk;
    parallel_for_chunks(nchunks, [&](std::size_t ci) {
        for (std::size_t i = ci * chunk; i < std::min(out.size(), (ci + 1) * chunk); ++i)
            out[i] = data.eval(rule.nodes[i].zeta);
    });
    return out;
}

std::vector<FormValue> evaluate_at_nodes(const FormField& data, const VolumeRule& rule) {
    std::vector<FormValue> out(rule.nodes.size());
    std::size_t chunk = 256;
    std::size_t nchunks = (out.size() + chunk - 1) / chunk;
    parallel_for_chunks(nchunks, [&](std::size_t ci) {
        for (std::size_t i = ci * chunk; i < std::min(out.size(), (ci + 1) * chunk); ++i)
            out[i] = data.eval(rule.nodes[i].zeta);
    });
    return out;
}

IntegralResult integrate_kernel_boundary_cached(const BoundaryRule& rule, const KernelEvaluator& kernels,
                                                KernelKind kind, int q_out,
                                                const std::vector<FormValue>& data_at_nodes, int data_q,
                                                const CPoint& z, const BoundaryRule* coarse,
                                                const std::vector<FormValue>* coarse_data) {
    int expect = 2 * rule.n - 1 - (KernelEvaluator::zetabar_degree(kind, rule.n, q_out) + rule.n);
    if (data_q != expect) throw DegreeError("integrate_kernel_boundary: data degree does not match kernel");
    IntegralResult res;
    if (all_zero(data_at_nodes)) {
        res.value = FormValue(rule.n, q_out);
        res.coarse_value = res.value;
        res.has_coarse = coarse && coarse_data;
        return res;
    }
    res.value = accumulate_boundary(rule, kernels, kind, q_out, data_at_nodes, z);
    if (coarse && coarse_data) {
        FormValue cv = accumulate_boundary(*coarse, kernels, kind, q_out, *coarse_data, z);
        res.error_estimate = max_abs_diff(res.value, cv);
        res.coarse_value = std::move(cv);
        res.has_coarse = true;
    }
    return res;
}

IntegralResult integrate_kernel_boundary(const BoundaryRule& rule, const KernelEvaluator& kernels,
                                         KernelKind kind, int q_out, const FormField& data, const CPoint& z,
                                         const BoundaryRule* coarse) {
    auto values = evaluate_at_nodes(data, rule);
    if (coarse) {
        auto cvalues = evaluate_at_nodes(data, *coarse);
        return integrate_kernel_boundary_cached(rule, kernels, kind, q_out, values, data.q, z, coarse, &cvalues);
    }
    return integrate_kernel_boundary_cached(rule, kernels, kind, q_out, values, data.q, z);
}

IntegralResult integrate_kernel_volume_cached(const VolumeRule& rule, const KernelEvaluator& kernels,
                                              KernelKind kind, int q_out,
                                              const std::vector<FormValue>& data_at_nodes, int data_q,
                                              const FormField& data, const CPoint& z,
                                              std::optional<ExclusionSpec> exclusion, const VolumeRule* coarse,
                                              const std::vector<FormValue>* coarse_data) {
    int kdeg = KernelEvaluator::zetabar_degree(kind, rule.n, q_out);
    if (data_q != rule.n - kdeg) throw DegreeError("integrate_kernel_volume: data degree does not match kernel");
    if (rule.exclusion && exclusion)
        throw std::invalid_argument("integrate_kernel_volume: rule already has a baked exclusion");

    IntegralResult res;
    if (!exclusion && all_zero(data_at_nodes)) {
        res.value = FormValue(rule.n, q_out);
        res.coarse_value = res.value;
        res.has_coarse = coarse && coarse_data;
        return res;
    }
    res.value = accumulate_volume(rule, kernels, kind, q_out, data_at_nodes, z, exclusion);
    if (exclusion) {
        auto polar = polar_subrule(rule.n, *exclusion);
        VolumeRule pr;
        pr.n = rule.n;
        pr.region = rule.region;
        pr.nodes = std::move(polar);
        auto pvalues = evaluate_at_nodes(data, pr);
        FormValue pv = accumulate_volume(pr, kernels, kind, q_out, pvalues, z, std::nullopt);
        res.value += pv;
        if (coarse && coarse_data) {
            FormValue cv = accumulate_volume(*coarse, kernels, kind, q_out, *coarse_data, z, exclusion);
            cv += pv;  // same polar core on both levels; the tensor part carries the error
            res.error_estimate = max_abs_diff(res.value, cv);
            res.coarse_value = std::move(cv);
            res.has_coarse = true;
        }
    } else if (coarse && coarse_data) {
        FormValue cv = accumulate_volume(*coarse, kernels, kind, q_out, *coarse_data, z, std::nullopt);
        res.error_estimate = max_abs_diff(res.value, cv);
        res.coarse_value = std::move(cv);
        res.has_coarse = true;
    }
    return res;
}

IntegralResult integrate_kernel_volume(const VolumeRule& rule, const KernelEvaluator& kernels,
                                       KernelKind kind, int q_out, const FormField& data, const CPoint& z,
                                       std::optional<ExclusionSpec> exclusion, const VolumeRule* coarse) {
    auto values = evaluate_at_nodes(data, rule);
    if (coarse) {
        auto cvalues = evaluate_at_nodes(data, *coarse);
        return integrate_kernel_volume_cached(rule, kernels, kind, q_out, values, data.q, data, z, exclusion,
                                              coarse, &cvalues);
    }
    return integrate_kernel_volume_cached(rule, kernels, kind, q_out, values, data.q, data, z, exclusion);
}

namespace {

constexpr std::uint64_t kVolMagic = 0x4b4c435f564f4c31ull;  // "CLK_VOL1"-ish tag
constexpr std::uint64_t kBdyMagic = 0x4b4c435f42445931ull;

template <class T>
void put(std::ostream& os, const T& v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}
template <class T>
T get(std::istream& is) {
    T v{};
    is.read(reinterpret_cast<char*>(&v), sizeof(T));
    return v;
}

}  // namespace

void save_rule(const VolumeRule& rule, std::ostream& os) {
    put(os, kVolMagic);
    put<std::int64_t>(os, rule.n);
    put<std::int64_t>(os, rule.resolution);
    put<std::int64_t>(os, static_cast<std::int64_t>(rule.region));
    put<std::int64_t>(os, static_cast<std::int64_t>(rule.nodes.size()));
    for (const auto& nd : rule.nodes) {
        for (int j = 0; j < rule.n; ++j) {
            put(os, nd.zeta[j].real());
            put(os, nd.zeta[j].imag());
        }
        put(os, nd.weight);
    }
}

VolumeRule load_volume_rule(std::istream& is) {
    if (get<std::uint64_t>(is) != kVolMagic) throw ConfigError("load_volume_rule: bad magic");
    VolumeRule rule;
    rule.n = static_cast<int>(get<std::int64_t>(is));
    rule.resolution = static_cast<int>(get<std::int64_t>(is));
    rule.region = static_cast<RegionTag>(get<std::int64_t>(is));
    auto count = get<std::int64_t>(is);
    rule.nodes.resize(static_cast<std::size_t>(count));
    for (auto& nd : rule.nodes) {
        nd.zeta = CPoint(rule.n);
        for (int j = 0; j < rule.n; ++j) {
            double re = get<double>(is), im = get<double>(is);
            nd.zeta[j] = Complex(re, im);
        }
        nd.weight = get<double>(is);
    }
    if (!is) throw ConfigError("load_volume_rule: truncated stream");
    return rule;
}

void save_rule(const BoundaryRule& rule, std::ostream& os) {
    put(os, kBdyMagic);
    put<std::int64_t>(os, rule.n);
    put<std::int64_t>(os, rule.resolution);
    put<std::int64_t>(os, rule.orientation_flips);
    put<std::int64_t>(os, static_cast<std::int64_t>(rule.nodes.size()));
    for (const auto& nd : rule.nodes) {
        for (int j = 0; j < rule.n; ++j) {
            put(os, nd.zeta[j].real());
            put(os, nd.zeta[j].imag());
        }
        for (int j = 0; j < rule.n; ++j) {
            put(os, nd.form_density[static_cast<std::size_t>(j)].real());
            put(os, nd.form_density[static_cast<std::size_t>(j)].imag());
        }
        put(os, nd.surface_weight);
    }
}

BoundaryRule load_boundary_rule(std::istream& is) {
    if (get<std::uint64_t>(is) != kBdyMagic) throw ConfigError("load_boundary_rule: bad magic");
    BoundaryRule rule;
    rule.n = static_cast<int>(get<std::int64_t>(is));
    rule.resolution = static_cast<int>(get<std::int64_t>(is));
    rule.orientation_flips = static_cast<int>(get<std::int64_t>(is));
    auto count = get<std::int64_t>(is);
    rule.nodes.resize(static_cast<std::size_t>(count));
    for (auto& nd : rule.nodes) {
        nd.zeta = CPoint(rule.n);
        for (int j = 0; j < rule.n; ++j) {
            double re = get<double>(is), im = get<double>(is);
            nd.zeta[j] = Complex(re, im);
        }
        nd.form_density.resize(static_cast<std::size_t>(rule.n));
        for (int j = 0; j < rule.n; ++j) {
            double re = get<double>(is), im = get<double>(is);
            nd.form_density[static_cast<std::size_t>(j)] = Complex(re, im);
        }
        nd.surface_weight = get<double>(is);
    }
    if (!is) throw ConfigError("load_boundary_rule: truncated stream");
    return rule;
}

}  // namespace clk
