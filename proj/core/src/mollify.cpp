#include "clk/mollify.hpp"

#include <cmath>
#include <map>
#include <algorithm>
#include <mutex>

#include "clk/errors.hpp"
#include "clk/quad1d.hpp"

namespace clk {

namespace {

double hermite_value(int n, double x, double& dval) {
    // physicists' Hermite, H_0 = 1, H_1 = 2x, H_{k+1} = 2x H_k - 2k H_{k-1}
    double hm1 = 0.0, h = 1.0;
    for (int k = 0; k < n; ++k) {
        double hp = 2.0 * x * h - 2.0 * k * hm1;
        hm1 = h;
        h = hp;
    }
    dval = 2.0 * n * hm1;  // H_n' = 2 n H_{n-1}
    return h;
}

}  // namespace

GaussHermite gauss_hermite(int n) {
    GaussHermite gh;
    gh.nodes.resize(static_cast<std::size_t>(n));
    gh.weights.resize(static_cast<std::size_t>(n));
    double lgpre = 0.5 * std::log(M_PI) + (n - 1) * std::log(2.0) + std::lgamma(n + 1.0);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        // Initial guesses (Stroud-Secrest style), refined by Newton.
        double x;
        if (i == 0)
            x = std::sqrt(2.0 * n + 1.0) - 1.85575 * std::pow(2.0 * n + 1.0, -1.0 / 6.0);
        else if (i == 1)
            x = gh.nodes[0] - 1.14 * std::pow(static_cast<double>(n), 0.426) / gh.nodes[0];
        else if (i == 2)
            x = 1.86 * gh.nodes[1] - 0.86 * gh.nodes[0];
        else if (i == 3)
            x = 1.91 * gh.nodes[2] - 0.91 * gh.nodes[1];
        else
            x = 2.0 * gh.nodes[static_cast<std::size_t>(i - 1)] - gh.nodes[static_cast<std::size_t>(i - 2)];
        double d = 0.0;
        for (int it = 0; it < 100; ++it) {
            double h = hermite_value(n, x, d);
            double dx = h / d;
            x -= dx;
            if (std::abs(dx) < 1e-15 * (1.0 + std::abs(x))) break;
        }
        hermite_value(n, x, d);
        // w_i = 2^{n-1} n! sqrt(pi) / (n^2 H_{n-1}(x)^2) with H_{n-1}(x) = H_n'(x)/(2n),
        // i.e. w_i = 2^{n+1} n! sqrt(pi) / H_n'(x)^2
        double w = std::exp(lgpre + 2.0 * std::log(2.0) - 2.0 * std::log(std::abs(d)));
        gh.nodes[static_cast<std::size_t>(i)] = x;
        gh.weights[static_cast<std::size_t>(i)] = w;
        gh.nodes[static_cast<std::size_t>(n - 1 - i)] = -x;
        gh.weights[static_cast<std::size_t>(n - 1 - i)] = w;
    }
    return gh;
}

MollifiedProfile1D mollify_profile(const Profile& p, double sigma, double t, int gl_count) {
    // Composite Gauss-Legendre against the Gaussian weight, split at the image
    // of the profile's kink (coordinate origin). The split keeps the rule
    // spectrally accurate even though |t|^m has limited smoothness there.
    static std::map<int, Rule1D> cache;
    static std::mutex mtx;
    const Rule1D* base;
    {
        std::lock_guard<std::mutex> lock(mtx);
        auto it = cache.find(gl_count);
        if (it == cache.end()) it = cache.emplace(gl_count, gauss_legendre_rule(gl_count, 0.0, 1.0)).first;
        base = &it->second;
    }
    const double inv_sqrt_pi = 1.0 / std::sqrt(M_PI);
    const double c = std::sqrt(2.0) * sigma;
    const double L = 8.5;
    double split = std::clamp(t / c, -L, L);
    double f = 0.0, d1 = 0.0, d2 = 0.0;
    const double bounds[3] = {-L, split, L};
    for (int seg = 0; seg < 2; ++seg) {
        double a = bounds[seg], b = bounds[seg + 1];
        if (!(b > a)) continue;
        for (std::size_t i = 0; i < base->x.size(); ++i) {
            double x = a + (b - a) * base->x[i];
            double w = (b - a) * base->w[i] * std::exp(-x * x);
            double fp = p.d1(t - c * x);
            f += w * p.f(t - c * x);
            d1 += w * fp;
            d2 += w * x * fp;  // second derivative via (f' * G)', no f'' needed
        }
    }
    f *= inv_sqrt_pi;
    d1 *= inv_sqrt_pi;
    d2 *= -2.0 * inv_sqrt_pi / c;
    return {f, d1, d2};
}

namespace {

class MollifiedProfile : public Profile {
  public:
    MollifiedProfile(ProfilePtr base, double sigma) : base_(std::move(base)), sigma_(sigma) {}
    double f(double t) const override { return mollify_profile(*base_, sigma_, t).f; }
    double d1(double t) const override { return mollify_profile(*base_, sigma_, t).d1; }
    double d2(double t) const override { return mollify_profile(*base_, sigma_, t).d2; }
    bool is_smooth() const override { return true; }

  private:
    ProfilePtr base_;
    double sigma_;
};

}  // namespace

DefiningFunctionPtr mollify(const DefiningFunctionPtr& r, int k) {
    if (k <= 0) throw std::invalid_argument("mollify: k must be positive");
    if (auto sep = std::dynamic_pointer_cast<const SeparableDefiningFunction>(r)) {
        double sigma = 1.0 / k;
        std::vector<ProfilePtr> ps;
        ps.reserve(sep->profiles().size());
        for (const auto& p : sep->profiles()) ps.push_back(std::make_shared<MollifiedProfile>(p, sigma));
        return std::make_shared<SeparableDefiningFunction>(sep->dim(), std::move(ps), sep->level());
    }
    if (r->smoothness() == Smoothness::Smooth) return r;  // its own smooth approximant
    throw UnsupportedModeError("mollify: non-separable C^{1,1} defining functions are not supported");
}

}  // namespace clk
