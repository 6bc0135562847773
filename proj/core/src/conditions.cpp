#include "clk/conditions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "clk/errors.hpp"
#include "clk/parallel.hpp"
#include "clk/rng.hpp"

namespace clk {

const char* to_string(ConditionTag tag) {
    switch (tag) {
        case ConditionTag::C0: return "c0";
        case ConditionTag::CPlus: return "Cplus";
        case ConditionTag::B: return "b";
        case ConditionTag::C: return "c";
        case ConditionTag::CPlusPlus: return "Cplusplus";
    }
    return "?";
}

namespace {

RealDir random_dir(std::mt19937_64& rng, int d) {
    std::normal_distribution<double> N(0.0, 1.0);
    RealDir w(static_cast<std::size_t>(d));
    double s = 0.0;
    do {
        s = 0.0;
        for (auto& wi : w) {
            wi = N(rng);
            s += wi * wi;
        }
    } while (s < 1e-12);
    s = std::sqrt(s);
    for (auto& wi : w) wi /= s;
    return w;
}

struct SampleSets {
    std::vector<CPoint> boundary;
    std::vector<CPoint> closure;   // interior + boundary (z side)
    std::vector<CPoint> collar;    // U \ D including the boundary
};

SampleSets draw_samples(const Domain& dom, const SamplerConfig& cfg) {
    if (cfg.boundary_samples <= 0 || cfg.interior_samples <= 0 || cfg.collar_samples <= 0)
        throw DegenerateSampleError("condition sampler: all sample counts must be positive");
    int d = 2 * dom.dim();
    SampleSets out;
    auto rng = make_rng(cfg.seed, "condition-samples");
    std::uniform_real_distribution<double> U(0.0, 1.0);

    out.boundary.reserve(static_cast<std::size_t>(cfg.boundary_samples));
    for (int i = 0; i < cfg.boundary_samples; ++i) {
        RealDir w = random_dir(rng, d);
        out.boundary.push_back(Domain::point_on_ray(w, dom.rho(w)));
    }
    out.closure = out.boundary;
    for (int i = 0; i < cfg.interior_samples; ++i) {
        RealDir w = random_dir(rng, d);
        double s = std::pow(U(rng), 1.0 / d);  // radially uniform-ish
        out.closure.push_back(Domain::point_on_ray(w, s * dom.rho(w)));
    }
    double delta = dom.delta();
    for (int i = 0; i < cfg.collar_samples; ++i) {
        RealDir w = random_dir(rng, d);
        double lo = dom.rho(w), hi = dom.rho_level(w, delta);
        if (!(hi > lo)) throw DegenerateSampleError("condition sampler: empty exterior collar");
        out.collar.push_back(Domain::point_on_ray(w, lo + U(rng) * (hi - lo)));
    }
    return out;
}

struct Quotients {
    double signed_q;
    double modulus_q;
    bool valid;
};

/// Hoisted per-point data for the pair loops.
struct ZetaData {
    CVector grad;
    double rv = 0.0;
    double bdist = 0.0;
};

ZetaData zeta_data(const Domain& dom, const DefiningFunction& r, ConditionTag tag, const CPoint& p) {
    ZetaData d;
    d.grad = r.gradient(p);
    if (tag == ConditionTag::B) d.rv = r.value(p);
    if (tag == ConditionTag::CPlusPlus) d.bdist = dom.boundary_distance(p);
    return d;
}

Quotients quotients(int n, ConditionTag tag, const ZetaData& dzeta, const CPoint& zeta, const ZetaData& dz,
                    const CPoint& z) {
    Complex p = 0.0;
    double sep2 = 0.0;
    for (int j = 0; j < n; ++j) {
        p += dzeta.grad[static_cast<std::size_t>(j)] * (zeta[j] - z[j]);
        sep2 += abs2(zeta[j] - z[j]);
    }
    if (sep2 < 1e-24) return {0.0, 0.0, false};
    double rhs = sep2;
    switch (tag) {
        case ConditionTag::B:
            rhs = dzeta.rv - dz.rv + sep2;
            break;
        case ConditionTag::CPlusPlus:
            rhs = dzeta.bdist + dz.bdist + std::abs(p.imag()) + sep2;
            break;
        default:
            break;
    }
    if (!(rhs > 1e-300)) return {0.0, 0.0, false};
    return {p.real() / rhs, std::abs(p) / rhs, true};
}

struct MinState {
    double inf_signed = std::numeric_limits<double>::infinity();
    double inf_modulus = std::numeric_limits<double>::infinity();
    CPoint wz, wzeta;
    std::size_t pairs = 0;
};

MinState merge_min(MinState a, const MinState& b) {
    a.pairs += b.pairs;
    if (b.inf_modulus < a.inf_modulus) a.inf_modulus = b.inf_modulus;
    bool take = b.inf_signed < a.inf_signed;
    if (b.inf_signed == a.inf_signed && !take)
        take = lex_less(b.wzeta, a.wzeta) || (!lex_less(a.wzeta, b.wzeta) && lex_less(b.wz, a.wz));
    if (take) {
        a.inf_signed = b.inf_signed;
        a.wz = b.wz;
        a.wzeta = b.wzeta;
    }
    return a;
}

/// Project p onto the closure of D (radially toward the center).
CPoint clip_to_closure(const Domain& dom, const CPoint& p) {
    if (norm2sq(p) < 1e-24) return p;
    RealDir w = Domain::direction_of(p);
    double s = std::sqrt(norm2sq(p));
    double smax = dom.rho(w);
    if (s <= smax) return p;
    return Domain::point_on_ray(w, smax);
}

}  // namespace

ConditionReport estimate_condition(const Domain& dom, const DefiningFunction& r, ConditionTag tag,
                                   const SamplerConfig& cfg) {
    SampleSets sets = draw_samples(dom, cfg);
    const std::vector<CPoint>* zetas = nullptr;
    const std::vector<CPoint>* zs = nullptr;
    switch (tag) {
        case ConditionTag::C0:
            zetas = &sets.boundary;
            zs = &sets.closure;
            break;
        case ConditionTag::CPlus:
        case ConditionTag::B:
        case ConditionTag::CPlusPlus:
            zetas = &sets.collar;
            zs = &sets.closure;
            break;
        case ConditionTag::C:
            zetas = &sets.boundary;
            zs = &sets.boundary;
            break;
    }

    // near-diagonal refinement pairs: geometric scales off each boundary sample
    std::vector<std::pair<CPoint, CPoint>> diag_pairs;
    if (cfg.diagonal_depth > 0) {
        auto rng = make_rng(cfg.seed, "condition-diagonal");
        double diam = dom.diameter();
        int d = 2 * dom.dim();
        for (const CPoint& zeta : sets.boundary) {
            for (int l = 1; l <= cfg.diagonal_depth; ++l) {
                double t = 0.1 * diam * std::pow(10.0, -3.0 * (l - 1) / std::max(1, cfg.diagonal_depth - 1));
                RealDir v = random_dir(rng, d);
                CPoint cand = zeta;
                for (int j = 0; j < dom.dim(); ++j)
                    cand[j] -= t * Complex(v[static_cast<std::size_t>(2 * j)], v[static_cast<std::size_t>(2 * j + 1)]);
                CPoint z = clip_to_closure(dom, cand);
                if (tag == ConditionTag::C) z = dom.boundary_projection(z);
                diag_pairs.emplace_back(zeta, z);
            }
        }
    }

    std::vector<ZetaData> zdata(zs->size());
    {
        std::size_t chunk = 64;
        std::size_t nchunks = (zs->size() + chunk - 1) / chunk;
        parallel_for_chunks(nchunks, [&](std::size_t ci) {
            for (std::size_t i = ci * chunk; i < std::min(zs->size(), (ci + 1) * chunk); ++i)
                zdata[i] = zeta_data(dom, r, tag, (*zs)[i]);
        });
    }

    std::size_t chunk = 16;
    std::size_t nchunks = (zetas->size() + chunk - 1) / chunk;
    std::vector<MinState> partial(nchunks);
    parallel_for_chunks(nchunks, [&](std::size_t ci) {
        MinState st;
        for (std::size_t i = ci * chunk; i < std::min(zetas->size(), (ci + 1) * chunk); ++i) {
            const CPoint& zeta = (*zetas)[i];
            ZetaData dzeta = zeta_data(dom, r, tag, zeta);
            for (std::size_t k = 0; k < zs->size(); ++k) {
                const CPoint& z = (*zs)[k];
                Quotients qq = quotients(dom.dim(), tag, dzeta, zeta, zdata[k], z);
                if (!qq.valid) continue;
                MinState one;
                one.inf_signed = qq.signed_q;
                one.inf_modulus = qq.modulus_q;
                one.wzeta = zeta;
                one.wz = z;
                one.pairs = 1;
                st = merge_min(st, one);
            }
        }
        partial[ci] = st;
    });
    MinState total;
    for (const auto& st : partial) total = merge_min(total, st);
    for (const auto& [zeta, z] : diag_pairs) {
        ZetaData dzeta = zeta_data(dom, r, tag, zeta);
        ZetaData dz = zeta_data(dom, r, tag, z);
        Quotients qq = quotients(dom.dim(), tag, dzeta, zeta, dz, z);
        if (!qq.valid) continue;
        MinState one;
        one.inf_signed = qq.signed_q;
        one.inf_modulus = qq.modulus_q;
        one.wzeta = zeta;
        one.wz = z;
        one.pairs = 1;
        total = merge_min(total, one);
    }

    ConditionReport rep;
    rep.tag = tag;
    rep.infimum = total.inf_signed;
    rep.modulus_infimum = total.inf_modulus;
    rep.witness_zeta = total.wzeta;
    rep.witness_z = total.wz;
    rep.pair_count = total.pairs;
    rep.diagonal_depth = cfg.diagonal_depth;
    return rep;
}

ConditionReport estimate_condition(const Domain& dom, ConditionTag tag, const SamplerConfig& cfg) {
    return estimate_condition(dom, *dom.r(), tag, cfg);
}

bool check_stability(const Domain& dom, const DefiningFunction& r1, const DefiningFunction& r2,
                     const SamplerConfig& cfg, double tol) {
    // both functions must vanish on the sampled boundary
    auto rng = make_rng(cfg.seed, "stability-boundary");
    double scale = std::max(1.0, dom.diameter());
    for (int i = 0; i < cfg.boundary_samples; ++i) {
        RealDir w = random_dir(rng, 2 * dom.dim());
        CPoint zeta = Domain::point_on_ray(w, dom.rho(w));
        if (std::abs(r1.value(zeta)) > 1e-6 * scale || std::abs(r2.value(zeta)) > 1e-6 * scale)
            throw ZeroSetMismatchError("check_stability: defining functions disagree on the boundary");
    }
    auto sgn = [tol](double v) { return v > tol ? 1 : (v < -tol ? -1 : 0); };
    for (ConditionTag tag : {ConditionTag::C0, ConditionTag::CPlus, ConditionTag::B, ConditionTag::C}) {
        ConditionReport a = estimate_condition(dom, r1, tag, cfg);
        ConditionReport b = estimate_condition(dom, r2, tag, cfg);
        if (sgn(a.infimum) != sgn(b.infimum)) return false;
    }
    return true;
}

double power_gap(const std::vector<double>& m, const std::vector<double>& x, const std::vector<double>& y) {
    double mstar = 2.0;
    for (double mi : m) {
        if (!(mi > 1.0)) throw UnsupportedExponentError("power_gap: exponents must be > 1");
        mstar = std::max(mstar, mi);
    }
    double d2 = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) d2 += (y[i] - x[i]) * (y[i] - x[i]);
    if (d2 == 0.0) return std::numeric_limits<double>::infinity();
    double num = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        double mi = m[i];
        double fx = std::pow(std::abs(x[i]), mi), fy = std::pow(std::abs(y[i]), mi);
        double g = x[i] == 0.0 ? 0.0 : mi * (x[i] > 0 ? 1.0 : -1.0) * std::pow(std::abs(x[i]), mi - 1.0);
        num += fy - fx - g * (y[i] - x[i]);
    }
    return num / std::pow(std::sqrt(d2), mstar);
}

PowerGapReport power_gap_infimum(const std::vector<double>& m, double c0, std::size_t pair_count,
                                 std::uint64_t seed) {
    auto rng = make_rng(seed, "power-gap");
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    std::uniform_real_distribution<double> U01(0.0, 1.0);
    std::size_t d = m.size();
    PowerGapReport rep;
    rep.infimum = std::numeric_limits<double>::infinity();
    rep.pair_count = 0;
    std::vector<double> x(d), y(d);
    for (std::size_t it = 0; it < pair_count; ++it) {
        double nx = 0.0, ny = 0.0;
        for (std::size_t i = 0; i < d; ++i) {
            x[i] = U(rng);
            y[i] = U(rng);
            nx += x[i] * x[i];
            ny += y[i] * y[i];
        }
        // rescale into |x| + |y| < c0; occasionally squeeze the pair together
        double s = c0 * 0.999 / (std::sqrt(nx) + std::sqrt(ny) + 1e-300);
        double shrink = std::pow(2.0, -static_cast<double>(it % 16));
        for (std::size_t i = 0; i < d; ++i) {
            x[i] *= s;
            y[i] = x[i] + shrink * s * (y[i] - x[i]);
        }
        if (U01(rng) < 0.05)
            for (std::size_t i = 0; i < d; ++i) y[i] = 0.0;  // axis-anchored pairs
        double q = power_gap(m, x, y);
        ++rep.pair_count;
        if (q < rep.infimum) {
            rep.infimum = q;
            rep.x = x;
            rep.y = y;
        }
    }
    return rep;
}

}  // namespace clk
