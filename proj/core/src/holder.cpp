#include "clk/holder.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "clk/errors.hpp"
#include "clk/rng.hpp"

namespace clk {

std::vector<std::pair<std::vector<double>, std::vector<double>>> sample_pairs(const PairSampler& s) {
    if (s.count == 0) throw DegenerateSampleError("pair sampler: empty pair budget");
    auto rng = make_rng(s.seed, "holder-pairs");
    std::uniform_real_distribution<double> U(0.0, 1.0);
    std::normal_distribution<double> N(0.0, 1.0);
    int d = s.dim;
    double diam = 0.0;
    for (int i = 0; i < d; ++i) diam += (s.upper[static_cast<std::size_t>(i)] - s.lower[static_cast<std::size_t>(i)]) *
                                        (s.upper[static_cast<std::size_t>(i)] - s.lower[static_cast<std::size_t>(i)]);
    diam = std::sqrt(diam);

    auto clamp_box = [&](std::vector<double>& p) {
        for (int i = 0; i < d; ++i)
            p[static_cast<std::size_t>(i)] =
                std::clamp(p[static_cast<std::size_t>(i)], s.lower[static_cast<std::size_t>(i)], s.upper[static_cast<std::size_t>(i)]);
    };

    std::vector<std::pair<std::vector<double>, std::vector<double>>> pairs;
    pairs.reserve(s.count);
    int scales = s.max_scale_log2 - s.min_scale_log2 + 1;
    std::size_t guard = 0;
    while (pairs.size() < s.count && guard < 400 * s.count) {
        ++guard;
        std::vector<double> x(static_cast<std::size_t>(d));
        for (int i = 0; i < d; ++i)
            x[static_cast<std::size_t>(i)] = s.lower[static_cast<std::size_t>(i)] +
                                             U(rng) * (s.upper[static_cast<std::size_t>(i)] - s.lower[static_cast<std::size_t>(i)]);
        if (s.inside && !s.inside(x)) continue;
        int level = s.min_scale_log2 + static_cast<int>(guard % static_cast<std::size_t>(scales));
        double sep = diam * std::pow(2.0, -level);
        std::vector<double> dir(static_cast<std::size_t>(d));
        double nn = 0.0;
        for (int i = 0; i < d; ++i) {
            dir[static_cast<std::size_t>(i)] = N(rng);
            nn += dir[static_cast<std::size_t>(i)] * dir[static_cast<std::size_t>(i)];
        }
        nn = std::sqrt(std::max(nn, 1e-300));
        std::vector<double> y(static_cast<std::size_t>(d));
        for (int i = 0; i < d; ++i) y[static_cast<std::size_t>(i)] = x[static_cast<std::size_t>(i)] + sep * dir[static_cast<std::size_t>(i)] / nn;
        clamp_box(y);
        if (s.inside && !s.inside(y)) continue;
        bool same = true;
        for (int i = 0; i < d; ++i)
            if (x[static_cast<std::size_t>(i)] != y[static_cast<std::size_t>(i)]) same = false;
        if (same) continue;
        pairs.emplace_back(std::move(x), std::move(y));
    }
    if (pairs.empty()) throw DegenerateSampleError("pair sampler: no admissible pairs found");
    return pairs;
}

namespace {

double vec_dist(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
    return std::sqrt(s);
}

double cvec_norm_diff(const CVector& a, const CVector& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += abs2(a[i] - b[i]);
    return std::sqrt(s);
}

/// all first central differences stacked into one vector
CVector central_gradient(const SampledFunction& f, const std::vector<double>& x, double h) {
    CVector out;
    std::vector<double> p = x;
    for (std::size_t i = 0; i < x.size(); ++i) {
        p[i] = x[i] + h;
        CVector fp = f(p);
        p[i] = x[i] - h;
        CVector fm = f(p);
        p[i] = x[i];
        for (std::size_t c = 0; c < fp.size(); ++c) out.push_back((fp[c] - fm[c]) / (2.0 * h));
    }
    return out;
}

}  // namespace

HolderEstimate holder_seminorm(const SampledFunction& f, double a, const PairSampler& sampler, double fd_step) {
    if (!(a > 0.0) || a == 1.0 || a >= 2.0)
        throw UnsupportedExponentError("holder_seminorm: exponent must lie in (0,1) or (1,2)");
    int k = a < 1.0 ? 0 : 1;
    auto pairs = sample_pairs(sampler);
    HolderEstimate est;
    est.exponent = a;
    est.pair_count = pairs.size();
    for (const auto& [x, y] : pairs) {
        double sep = vec_dist(x, y);
        if (sep <= 0.0) continue;
        double num;
        if (k == 0) {
            num = cvec_norm_diff(f(x), f(y));
        } else {
            num = cvec_norm_diff(central_gradient(f, x, fd_step), central_gradient(f, y, fd_step));
        }
        double quot = num / std::pow(sep, a - k);
        if (quot > est.seminorm) {
            est.seminorm = quot;
            est.arg_x = x;
            est.arg_y = y;
        }
    }
    return est;
}

double sup_norm_estimate(const SampledFunction& f, const PairSampler& sampler) {
    auto pairs = sample_pairs(sampler);
    double m = 0.0;
    for (const auto& [x, y] : pairs) {
        for (const auto& v : f(x)) m = std::max(m, std::abs(v));
        for (const auto& v : f(y)) m = std::max(m, std::abs(v));
    }
    return m;
}

GainReport gain_report(const SampledFunction& phi, const SampledFunction& u, double a,
                       const PairSampler& sampler, double fd_step) {
    if (!(a >= 0.0) || a + 0.5 >= 2.0)
        throw UnsupportedExponentError("gain_report: requires 0 <= a and a + 1/2 < 2");
    if (a + 0.5 == 1.0 || a == 1.0)
        throw UnsupportedExponentError("gain_report: integer target exponent (Zygmund case) unsupported");
    GainReport rep;
    rep.a = a;
    rep.data_norm = a == 0.0 ? sup_norm_estimate(phi, sampler)
                             : holder_seminorm(phi, a, sampler, fd_step).seminorm;
    HolderEstimate sol = holder_seminorm(u, a + 0.5, sampler, fd_step);
    rep.solution_seminorm = sol.seminorm;
    rep.pair_count = sol.pair_count;
    rep.arg_x = sol.arg_x;
    rep.arg_y = sol.arg_y;
    rep.ratio = rep.data_norm == 0.0 ? 0.0 : rep.solution_seminorm / rep.data_norm;
    return rep;
}

}  // namespace clk
